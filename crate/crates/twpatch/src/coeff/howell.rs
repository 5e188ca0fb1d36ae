//! Reduced Howell form over the chain ring `Z/p^M`.
//!
//! Columns are processed left to right.  A pivot row has zeros before its
//! pivot column `c` and the entry `p^v` at `c`.  Entries of a row at later
//! pivot columns `c'` are kept in `[0, p^v')`, which makes the form unique
//! for a given submodule.  Whenever a pivot with `v > 0` enters, the
//! annihilator multiple `p^(M-v) · row` is queued for insertion too; that
//! saturation is what gives the Howell property: the rows pivoting at or
//! after column `j` span every element of the submodule that vanishes
//! before `j`.  Kernels and projections rely on that property.

use super::CoeffRing;

#[derive(Clone, Debug)]
pub struct Howell {
    ring: CoeffRing,
    ncols: usize,
    rows: Vec<Vec<u64>>,
    pcol: Vec<usize>,
    pval: Vec<u32>,
    at: Vec<Option<usize>>,
}

impl Howell {
    pub fn new(ring: CoeffRing, ncols: usize) -> Self {
        Howell { ring, ncols, rows: Vec::new(), pcol: Vec::new(), pval: Vec::new(), at: vec![None; ncols] }
    }

    pub fn from_rows<I: IntoIterator<Item = Vec<u64>>>(ring: CoeffRing, ncols: usize, rows: I) -> Self {
        let mut h = Self::new(ring, ncols);
        for r in rows {
            h.insert(r);
        }
        h
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Pivot rows in increasing pivot-column order, with `(column, valuation)`.
    pub fn rows(&self) -> Vec<(usize, u32, &[u64])> {
        self.at
            .iter()
            .flatten()
            .map(|&i| (self.pcol[i], self.pval[i], self.rows[i].as_slice()))
            .collect()
    }

    pub fn generators(&self) -> Vec<Vec<u64>> {
        self.rows().into_iter().map(|(_, _, r)| r.to_vec()).collect()
    }

    /// Valuation of the pivot in column `c`, if there is one.
    pub fn pivot(&self, c: usize) -> Option<u32> {
        self.at[c].map(|i| self.pval[i])
    }

    /// Length of the submodule as a `Z_p`-module: `log_p` of its cardinality.
    pub fn len(&self) -> u64 {
        let m = self.ring.m() as u64;
        self.pval.iter().map(|&v| m - v as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Length of the quotient `R^n / self`.
    pub fn colen(&self) -> u64 {
        self.ncols as u64 * self.ring.m() as u64 - self.len()
    }

    fn axpy(&self, x: &mut [u64], k: u64, row: &[u64], from: usize) {
        if k == 0 {
            return;
        }
        let r = self.ring;
        for j in from..self.ncols {
            if row[j] != 0 {
                x[j] = r.sub(x[j], r.mul(k, row[j]));
            }
        }
    }

    /// Reduce `x` at pivot columns `>= from` into their canonical ranges.
    fn reduce_from(&self, x: &mut [u64], from: usize) {
        for c in from..self.ncols {
            if x[c] == 0 {
                continue;
            }
            if let Some(i) = self.at[c] {
                let k = self.ring.div_ppow(x[c], self.pval[i]);
                let row = &self.rows[i];
                self.axpy(x, k, row, c);
            }
        }
    }

    /// Canonical representative of `x` modulo the submodule.
    pub fn reduce(&self, x: &mut [u64]) {
        assert_eq!(x.len(), self.ncols);
        self.reduce_from(x, 0);
    }

    pub fn normal_form(&self, x: &[u64]) -> Vec<u64> {
        let mut y = x.to_vec();
        self.reduce(&mut y);
        y
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.normal_form(x).iter().all(|&a| a == 0)
    }

    /// Bring every row pivoting before `c` back into canonical range at
    /// columns `>= c` after the row at `c` changed.
    fn clean_above(&mut self, c: usize) {
        let idx = self.at[c].expect("pivot present");
        let (v, row) = (self.pval[idx], self.rows[idx].clone());
        for i in 0..self.rows.len() {
            if self.pcol[i] >= c {
                continue;
            }
            let mut x = std::mem::take(&mut self.rows[i]);
            let k = self.ring.div_ppow(x[c], v);
            if k != 0 {
                self.axpy(&mut x, k, &row, c);
                if !self.ring.is_field() {
                    self.reduce_from(&mut x, c + 1);
                }
            }
            self.rows[i] = x;
        }
    }

    pub fn insert(&mut self, v: Vec<u64>) {
        assert_eq!(v.len(), self.ncols, "vector length does not match the ambient rank");
        let r = self.ring;
        let mut queue = vec![v];
        while let Some(mut x) = queue.pop() {
            let mut c = 0;
            while c < self.ncols {
                if x[c] == 0 {
                    c += 1;
                    continue;
                }
                let (u, unit) = r.split(x[c]).expect("nonzero entry");
                match self.at[c] {
                    Some(i) if u >= self.pval[i] => {
                        let k = r.div_ppow(x[c], self.pval[i]);
                        let row = std::mem::take(&mut self.rows[i]);
                        self.axpy(&mut x, k, &row, c);
                        self.rows[i] = row;
                        c += 1;
                    }
                    slot => {
                        let inv = r.inv(unit).expect("unit");
                        for a in x.iter_mut().skip(c) {
                            *a = r.mul(*a, inv);
                        }
                        self.reduce_from(&mut x, c + 1);
                        if u > 0 {
                            queue.push(x.iter().map(|&a| r.mul(a, r.ppow(r.m() - u))).collect());
                        }
                        match slot {
                            Some(i) => {
                                // smaller valuation wins the column; the old row goes back in the queue
                                let mut old = std::mem::replace(&mut self.rows[i], x.clone());
                                let k = r.ppow(self.pval[i] - u);
                                self.axpy(&mut old, k, &x, c);
                                self.pval[i] = u;
                                queue.push(old);
                            }
                            None => {
                                self.at[c] = Some(self.rows.len());
                                self.rows.push(x);
                                self.pcol.push(c);
                                self.pval.push(u);
                            }
                        }
                        self.clean_above(c);
                        break;
                    }
                }
            }
        }
    }
}
