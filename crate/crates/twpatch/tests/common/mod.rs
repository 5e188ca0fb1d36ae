//! Independent oracles: plain modular arithmetic, a two-sided Smith
//! elimination over `Z/p^M`, and Gaussian elimination over `F_p`.  Nothing
//! here touches the crate's linear algebra.
#![allow(dead_code)]

pub struct Zpm {
    pub p: u64,
    pub m: u32,
    pub q: u64,
}

impl Zpm {
    pub fn new(p: u64, m: u32) -> Self {
        Zpm { p, m, q: p.pow(m) }
    }
    pub fn val(&self, a: u64) -> u32 {
        let mut a = a % self.q;
        if a == 0 {
            return self.m;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }
    /// Inverse of a unit by exhaustive search (the rings are tiny).
    pub fn inv(&self, a: u64) -> u64 {
        (1..self.q).find(|&x| self.mul(a, x) == 1).expect("unit")
    }
}

/// O-generators of `{x : A x = 0}` for `A` given as rows, via `U A V = diag`.
pub fn smith_kernel(r: &Zpm, a: &[Vec<u64>], ncols: usize) -> Vec<Vec<u64>> {
    let mut a: Vec<Vec<u64>> = a.iter().map(|row| row.iter().map(|x| x % r.q).collect()).collect();
    let nrows = a.len();
    // V starts as the identity; column operations on A are mirrored on V
    let mut v: Vec<Vec<u64>> = (0..ncols).map(|i| (0..ncols).map(|j| u64::from(i == j)).collect()).collect();
    let mut vals = Vec::new();
    let mut k = 0;
    while k < nrows.min(ncols) {
        // entry of least valuation in the remaining block
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..nrows {
            for j in k..ncols {
                let vv = r.val(a[i][j]);
                if vv < r.m && best.is_none_or(|b| vv < b.0) {
                    best = Some((vv, i, j));
                }
            }
        }
        let Some((pv, pi, pj)) = best else { break };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        for row in v.iter_mut() {
            row.swap(k, pj);
        }
        let unit = a[k][k] / r.p.pow(pv);
        let uinv = r.inv(unit);
        for x in a[k].iter_mut() {
            *x = r.mul(*x, uinv);
        }
        let piv = a[k][k];
        debug_assert_eq!(piv, r.p.pow(pv));
        // clear column k below and above with row operations
        for i in 0..nrows {
            if i != k && a[i][k] != 0 {
                let f = a[i][k] / piv;
                for j in 0..ncols {
                    let t = r.mul(f, a[k][j]);
                    a[i][j] = r.sub(a[i][j], t);
                }
            }
        }
        // clear row k with column operations
        for j in 0..ncols {
            if j != k && a[k][j] != 0 {
                let f = a[k][j] / piv;
                for row in a.iter_mut() {
                    let t = r.mul(f, row[k]);
                    row[j] = r.sub(row[j], t);
                }
                for row in v.iter_mut() {
                    let t = r.mul(f, row[k]);
                    row[j] = r.sub(row[j], t);
                }
            }
        }
        vals.push(pv);
        k += 1;
    }
    let mut out = Vec::new();
    for j in 0..ncols {
        let scale = if j < vals.len() { r.p.pow(r.m - vals[j]) % r.q } else { 1 };
        if scale == 0 {
            continue;
        }
        out.push((0..ncols).map(|i| r.mul(v[i][j], scale)).collect());
    }
    out
}

/// Rank over `F_p` of a matrix given as rows.
pub fn rank_mod_p(p: u64, rows: &[Vec<u64>]) -> usize {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = (1..p).find(|&x| a[rank][c] * x % p == 1).unwrap();
        for x in a[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..ncols {
                    a[i][j] = (a[i][j] + p * p - f * a[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The group `(Z/p^N)^q` with elements as exponent vectors in mixed radix.
pub struct Group {
    pub c: usize,
    pub q: usize,
}

impl Group {
    pub fn order(&self) -> usize {
        self.c.pow(self.q as u32)
    }
    pub fn add(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b, mut out, mut w) = (a, b, 0, 1);
        for _ in 0..self.q {
            out += ((a % self.c + b % self.c) % self.c) * w;
            a /= self.c;
            b /= self.c;
            w *= self.c;
        }
        out
    }
}

/// `(t0, t1)` of `coker(S^r → S^g)`, relation columns `rels[c][j]` given as
/// coefficient vectors over the group, computed from a Smith-form syzygy
/// module and ranks over the residue field.
pub fn tor_oracle(p: u64, m: u32, n: u32, q: u32, g: usize, rels: &[Vec<Vec<u64>>]) -> (u64, u64) {
    let r = Zpm::new(p, m);
    let grp = Group { c: p.pow(n) as usize, q: q as usize };
    let ord = grp.order();
    let nr = rels.len();
    // O-matrix of d1: column (c, h) is h·rels[c], rows (j, x)
    let mut d1 = vec![vec![0u64; nr * ord]; g * ord];
    for (c, col) in rels.iter().enumerate() {
        for h in 0..ord {
            for (j, s) in col.iter().enumerate() {
                for (x, &a) in s.iter().enumerate() {
                    d1[j * ord + grp.add(h, x)][c * ord + h] = a % r.q;
                }
            }
        }
    }
    let syz = smith_kernel(&r, &d1, nr * ord);
    let aug1: Vec<Vec<u64>> = (0..g)
        .map(|j| rels.iter().map(|col| col[j].iter().sum::<u64>() % p).collect())
        .collect();
    let rank1 = if nr == 0 { 0 } else { rank_mod_p(p, &aug1) };
    // each syzygy, as an element of S^r, augments entrywise
    let aug2: Vec<Vec<u64>> = (0..nr)
        .map(|c| syz.iter().map(|z| z[c * ord..(c + 1) * ord].iter().sum::<u64>() % p).collect())
        .collect();
    let rank2 = if nr == 0 || syz.is_empty() { 0 } else { rank_mod_p(p, &aug2) };
    let t0 = g - rank1;
    let t1 = nr - rank1 - rank2;
    (t0 as u64, t1 as u64)
}

/// Size of the O-span of the given vectors in `(Z/p^M)^n`, by closure.
pub fn brute_span_size(r: &Zpm, n: usize, gens: &[Vec<u64>]) -> usize {
    use std::collections::HashSet;
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut frontier = vec![vec![0u64; n]];
    seen.insert(vec![0; n]);
    while let Some(x) = frontier.pop() {
        for gv in gens {
            let y: Vec<u64> = x.iter().zip(gv).map(|(a, b)| (a + b) % r.q).collect();
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen.len()
}
