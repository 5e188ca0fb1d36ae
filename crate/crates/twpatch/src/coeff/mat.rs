use serde::{Deserialize, Serialize};

use super::CoeffRing;
use crate::{Error, Result};

/// Dense row-major matrix over a [`CoeffRing`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatRepr")]
pub struct Mat {
    pub ring: CoeffRing,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u64>,
}

#[derive(Deserialize)]
struct MatRepr {
    ring: CoeffRing,
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl TryFrom<MatRepr> for Mat {
    type Error = Error;
    fn try_from(r: MatRepr) -> Result<Self> {
        if r.entries.len() != r.rows * r.cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                r.entries.len(),
                r.rows,
                r.cols
            )));
        }
        let entries = r.entries.iter().map(|&a| r.ring.from_i64(a)).collect();
        Ok(Mat { ring: r.ring, rows: r.rows, cols: r.cols, entries })
    }
}

impl Mat {
    pub fn zeros(ring: CoeffRing, rows: usize, cols: usize) -> Self {
        Mat { ring, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(ring: CoeffRing, n: usize) -> Self {
        Self::scalar(ring, n, 1)
    }

    pub fn scalar(ring: CoeffRing, n: usize, c: u64) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.reduce(c));
        }
        m
    }

    pub fn from_rows(ring: CoeffRing, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let entries = rows.iter().flatten().map(|&a| ring.from_i64(a)).collect();
        Ok(Mat { ring, rows: rows.len(), cols, entries })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(ring: CoeffRing, nrows: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(ring, nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for (i, &a) in c.iter().enumerate() {
                m.set(i, j, a);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, a: u64) {
        self.entries[i * self.cols + j] = a;
    }
    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }
    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&a| a == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows || self.ring != other.ring {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = self.ring;
        let mut out = Mat::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, r.add(cur, r.mul(a, other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("{} columns vs vector of length {}", self.cols, v.len())));
        }
        let r = self.ring;
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0, |acc, (&a, &b)| r.add(acc, r.mul(a, b))))
            .collect())
    }

    fn zip_with(&self, other: &Mat, f: impl Fn(u64, u64) -> u64) -> Result<Mat> {
        if self.rows != other.rows || self.cols != other.cols || self.ring != other.ring {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a, b)).collect();
        Ok(Mat { ring: self.ring, rows: self.rows, cols: self.cols, entries })
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        let r = self.ring;
        self.zip_with(other, |a, b| r.add(a, b))
    }
    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        let r = self.ring;
        self.zip_with(other, |a, b| r.sub(a, b))
    }
    pub fn scale(&self, c: u64) -> Mat {
        let r = self.ring;
        Mat { entries: self.entries.iter().map(|&a| r.mul(a, c)).collect(), ..self.clone() }
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block2(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Result<Mat> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::Dimension("incompatible blocks".into()));
        }
        let mut m = Mat::zeros(a.ring, a.rows + c.rows, a.cols + b.cols);
        for (blk, r0, c0) in [(a, 0, 0), (b, 0, a.cols), (c, a.rows, 0), (d, a.rows, a.cols)] {
            for i in 0..blk.rows {
                for j in 0..blk.cols {
                    m.set(r0 + i, c0 + j, blk.get(i, j));
                }
            }
        }
        Ok(m)
    }

    pub fn block_diag(a: &Mat, b: &Mat) -> Mat {
        let r = a.ring;
        Mat::block2(a, &Mat::zeros(r, a.rows, b.cols), &Mat::zeros(r, b.rows, a.cols), b)
            .expect("block_diag shapes are always compatible")
    }

    /// Reduce every entry into a ring with the same prime and smaller `M`.
    pub fn project(&self, target: CoeffRing) -> Mat {
        Mat {
            ring: target,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&a| self.ring.project(a, &target)).collect(),
        }
    }

    /// Determinant by Berkowitz's division-free algorithm, valid over any
    /// commutative ring and in particular over `Z/p^M`.
    pub fn det(&self) -> Result<u64> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        Ok(self.charpoly()?.last().copied().map_or(1, |c| {
            if self.rows % 2 == 0 {
                c
            } else {
                self.ring.neg(c)
            }
        }))
    }

    /// Coefficients `[1, c_1, ..., c_n]` of `det(X·I - A) = X^n + c_1 X^(n-1) + ...`.
    pub fn charpoly(&self) -> Result<Vec<u64>> {
        if !self.is_square() {
            return Err(Error::Dimension("characteristic polynomial of a non-square matrix".into()));
        }
        let r = self.ring;
        let n = self.rows;
        let mut poly = vec![1 % r.modulus()];
        for k in 0..n {
            // leading k x k block A_k, column C and row R bordering it, diagonal a
            let a = self.get(k, k);
            let col: Vec<u64> = (0..k).map(|i| self.get(i, k)).collect();
            let row: Vec<u64> = (0..k).map(|j| self.get(k, j)).collect();
            // Toeplitz column: 1, -a, -R C, -R A C, -R A^2 C, ...
            let mut t = vec![1 % r.modulus(), r.neg(a)];
            let mut v = col.clone();
            for _ in 0..k {
                let rv = row.iter().zip(&v).fold(0, |acc, (&x, &y)| r.add(acc, r.mul(x, y)));
                t.push(r.neg(rv));
                v = (0..k)
                    .map(|i| (0..k).fold(0, |acc, j| r.add(acc, r.mul(self.get(i, j), v[j]))))
                    .collect();
            }
            let mut next = vec![0; k + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                let mut s = 0;
                for (j, &pj) in poly.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        s = r.add(s, r.mul(t[i - j], pj));
                    }
                }
                *slot = s;
            }
            poly = next;
        }
        Ok(poly)
    }

    pub fn pow(&self, e: u32) -> Result<Mat> {
        let mut acc = Mat::identity(self.ring, self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, m: u32) -> CoeffRing {
        CoeffRing::new(p, m).unwrap()
    }

    fn cofactor_det(r: CoeffRing, m: &Mat) -> u64 {
        let n = m.rows;
        if n == 0 {
            return 1;
        }
        let mut acc = 0;
        for j in 0..n {
            let minor_rows: Vec<Vec<i64>> = (1..n)
                .map(|i| (0..n).filter(|&c| c != j).map(|c| m.get(i, c) as i64).collect())
                .collect();
            let minor = if n == 1 { Mat::zeros(r, 0, 0) } else { Mat::from_rows(r, &minor_rows).unwrap() };
            let term = r.mul(m.get(0, j), cofactor_det(r, &minor));
            acc = if j % 2 == 0 { r.add(acc, term) } else { r.sub(acc, term) };
        }
        acc
    }

    #[test]
    fn berkowitz_matches_cofactor_expansion() {
        let r = ring(3, 2);
        let mut seed = 7u64;
        for n in 1..=4 {
            for _ in 0..20 {
                let entries: Vec<u64> = (0..n * n)
                    .map(|_| {
                        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        (seed >> 33) % 9
                    })
                    .collect();
                let m = Mat { ring: r, rows: n, cols: n, entries };
                assert_eq!(m.det().unwrap(), cofactor_det(r, &m));
            }
        }
    }

    #[test]
    fn charpoly_kills_matrix() {
        let r = ring(5, 1);
        let m = Mat::from_rows(r, &[vec![1, 2, 0], vec![3, 4, 1], vec![0, 1, 2]]).unwrap();
        let cp = m.charpoly().unwrap();
        let mut acc = Mat::zeros(r, 3, 3);
        for (i, &c) in cp.iter().enumerate() {
            acc = acc.add(&m.pow((3 - i) as u32).unwrap().scale(c)).unwrap();
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn json_round_trip_with_negative_entries() {
        let src = r#"{"ring":{"p":3,"M":2},"rows":1,"cols":2,"entries":[-1,4]}"#;
        let m: Mat = serde_json::from_str(src).unwrap();
        assert_eq!(m.entries, vec![8, 4]);
        assert!(serde_json::from_str::<Mat>(r#"{"ring":{"p":3,"M":2},"rows":2,"cols":2,"entries":[1]}"#).is_err());
    }
}
