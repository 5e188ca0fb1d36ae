use super::{CoeffRing, Howell, Mat};
use crate::{Error, Result};

/// Howell form of the stacked rows `[column_i(m) | e_i]`, shared by kernel and solve.
fn augmented(m: &Mat) -> Howell {
    let (r, n) = (m.rows, m.cols);
    Howell::from_rows(
        m.ring,
        r + n,
        (0..n).map(|i| {
            let mut row = m.col(i);
            row.resize(r + n, 0);
            row[r + i] = 1;
            row
        }),
    )
}

/// Generators of `{v : m·v = 0}`.
///
/// The kernel rows of a Howell form of `[mᵀ | I]` are exactly the rows whose
/// pivot lies in the identity block; over a field they form a basis.
pub fn mat_kernel(m: &Mat) -> Vec<Vec<u64>> {
    let r = m.rows;
    augmented(m)
        .rows()
        .into_iter()
        .filter(|(c, _, _)| *c >= r)
        .map(|(_, _, row)| row[r..].to_vec())
        .collect()
}

/// Some `x` with `m·x = b`, or `None`.
///
/// The head of `(b, 0)` is reduced against the pivots of `[mᵀ | I]` that lie in
/// the first `rows` columns; the solution read off the tail is then reduced
/// modulo the kernel's Howell basis, so the answer is the canonical coset
/// representative and does not depend on how the caller ordered anything.
pub fn mat_solve(m: &Mat, b: &[u64]) -> Result<Option<Vec<u64>>> {
    if b.len() != m.rows {
        return Err(Error::Dimension(format!("matrix has {} rows, right-hand side {}", m.rows, b.len())));
    }
    let ring = m.ring;
    let (r, n) = (m.rows, m.cols);
    let h = augmented(m);
    let mut x: Vec<u64> = b.iter().map(|&a| ring.reduce(a)).collect();
    x.resize(r + n, 0);
    for (c, v, row) in h.rows() {
        if c >= r {
            break;
        }
        if x[c] == 0 {
            continue;
        }
        if ring.val(x[c]) < v {
            return Ok(None);
        }
        let k = ring.div_ppow(x[c], v);
        for j in c..r + n {
            x[j] = ring.sub(x[j], ring.mul(k, row[j]));
        }
    }
    if x[..r].iter().any(|&a| a != 0) {
        return Ok(None);
    }
    let mut y = vec![0; r + n];
    for j in 0..n {
        y[r + j] = ring.neg(x[r + j]);
    }
    for (c, v, row) in h.rows() {
        if c < r || y[c] == 0 {
            continue;
        }
        let k = ring.div_ppow(y[c], v);
        for j in c..r + n {
            y[j] = ring.sub(y[j], ring.mul(k, row[j]));
        }
    }
    Ok(Some(y[r..].to_vec()))
}

pub fn span(ring: CoeffRing, n: usize, gens: &[Vec<u64>]) -> Howell {
    Howell::from_rows(ring, n, gens.iter().cloned())
}

/// `{v : map·v ∈ span(target)}`.
pub fn preimage(map: &Mat, target: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = map.cols;
    let mut cols: Vec<Vec<u64>> = (0..n).map(|j| map.col(j)).collect();
    cols.extend(target.iter().cloned());
    let big = Mat::from_cols(map.ring, map.rows, &cols);
    mat_kernel(&big).into_iter().map(|k| k[..n].to_vec()).filter(|v| v.iter().any(|&a| a != 0)).collect()
}

/// Generators of `span(a) ∩ span(b)` inside `R^n`.
pub fn intersection(ring: CoeffRing, n: usize, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut cols: Vec<Vec<u64>> = a.to_vec();
    cols.extend(b.iter().cloned());
    let big = Mat::from_cols(ring, n, &cols);
    let amat = Mat::from_cols(ring, n, a);
    mat_kernel(&big)
        .into_iter()
        .map(|k| amat.mul_vec(&k[..a.len()]).expect("shapes agree"))
        .filter(|v| v.iter().any(|&x| x != 0))
        .collect()
}

/// Exponents `e_1 >= e_2 >= ...` with `span(v)/span(w) ≅ ⊕ Z/p^(e_i)`.
///
/// With `a_j = len(p^j Q / p^(j+1) Q)` the number of factors of exponent
/// exactly `e` is `a_(e-1) - a_e`.  `w` need not lie inside `v`; the quotient
/// taken is `(span(v) + span(w)) / span(w)`.
pub fn cyclic_type(ring: CoeffRing, n: usize, v: &[Vec<u64>], w: &[Vec<u64>]) -> Vec<u32> {
    let m = ring.m();
    let base = span(ring, n, w).len();
    let lens: Vec<u64> = (0..=m)
        .map(|j| {
            let pj = ring.ppow(j);
            let mut h = span(ring, n, w);
            for g in v {
                h.insert(g.iter().map(|&a| ring.mul(a, pj)).collect());
            }
            h.len() - base
        })
        .collect();
    let a: Vec<u64> = (0..m as usize).map(|j| lens[j] - lens[j + 1]).chain([0]).collect();
    let mut out = Vec::new();
    for e in (1..=m).rev() {
        let count = a[e as usize - 1] - a[e as usize];
        out.extend(std::iter::repeat(e).take(count as usize));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, m: u32) -> CoeffRing {
        CoeffRing::new(p, m).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let f3 = ring(3, 1);
        assert_eq!(mat_kernel(&Mat::from_rows(f3, &[vec![0]]).unwrap()), vec![vec![1]]);
        let z9 = ring(3, 2);
        assert_eq!(mat_kernel(&Mat::from_rows(z9, &[vec![3]]).unwrap()), vec![vec![3]]);
        assert!(mat_kernel(&Mat::identity(z9, 2)).is_empty());
        // no rows: the whole domain
        assert_eq!(mat_kernel(&Mat::zeros(z9, 0, 2)), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn solve_examples() {
        let z9 = ring(3, 2);
        assert_eq!(mat_solve(&Mat::from_rows(z9, &[vec![2]]).unwrap(), &[4]).unwrap(), Some(vec![2]));
        assert_eq!(mat_solve(&Mat::from_rows(z9, &[vec![3]]).unwrap(), &[1]).unwrap(), None);
        let f5 = ring(5, 1);
        assert_eq!(mat_solve(&Mat::identity(f5, 2), &[1, 2]).unwrap(), Some(vec![1, 2]));
        assert!(mat_solve(&Mat::identity(f5, 2), &[1]).is_err());
    }

    #[test]
    fn cyclic_types() {
        let z27 = ring(3, 3);
        // Z/27 ⊕ Z/27 modulo (9, 0) and (0, 3): Z/9 ⊕ Z/3
        let v = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(cyclic_type(z27, 2, &v, &[vec![9, 0], vec![0, 3]]), vec![2, 1]);
        assert_eq!(cyclic_type(z27, 2, &v, &[]), vec![3, 3]);
        assert!(cyclic_type(z27, 2, &v, &v).is_empty());
    }

    #[test]
    fn intersections_and_preimages() {
        let z9 = ring(3, 2);
        let i = intersection(z9, 2, &[vec![1, 1]], &[vec![3, 0], vec![0, 3]]);
        let h = span(z9, 2, &i);
        assert_eq!(h.len(), 1);
        assert!(h.contains(&[3, 3]));
        let map = Mat::from_rows(z9, &[vec![1, 2]]).unwrap();
        let pre = span(z9, 2, &preimage(&map, &[vec![3]]));
        // {(x, y) : x + 2y ∈ 3Z/9} has index 3
        assert_eq!(pre.colen(), 1);
    }
}
