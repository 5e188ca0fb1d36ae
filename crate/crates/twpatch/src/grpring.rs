//! Finite modules over the group rings `S_N = O[(Z/p^N)^q]`, `O = Z/p^M`.
//!
//! A module is a presentation `S^r → S^g → M → 0`.  Every computation goes
//! through the underlying free O-module `F = O^{g·|Δ|}` (index
//! `gen·|Δ| + group element`): the relation submodule `W` is the O-span of
//! all group translates of the relation columns, so `M = F/W` as O-modules and
//! lengths do the rest.  Group elements are indexed in mixed radix: the
//! exponent of `t_i` is digit `i` in base `p^N`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::coeff::{cyclic_type, intersection, mat_solve, preimage, span, CoeffRing, Howell, Mat};
use crate::report::{Certificate, Status};
use crate::{Error, Result};

/// Largest `g·|Δ|` handled by any kernel computation.
pub const MAX_COLUMNS: usize = 256;

/// An element of `S_N`: coefficients indexed by group element.
pub type SElem = Vec<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupRingSpec", into = "GroupRingSpec")]
pub struct GroupRing {
    pub ring: CoeffRing,
    pub n: u32,
    pub q: u32,
}

#[derive(Serialize, Deserialize)]
struct GroupRingSpec {
    p: u64,
    #[serde(rename = "M")]
    m: u32,
    #[serde(rename = "N")]
    n: u32,
    q: u32,
}

impl TryFrom<GroupRingSpec> for GroupRing {
    type Error = Error;
    fn try_from(s: GroupRingSpec) -> Result<Self> {
        GroupRing::new(CoeffRing::new(s.p, s.m)?, s.n, s.q)
    }
}

impl From<GroupRing> for GroupRingSpec {
    fn from(g: GroupRing) -> Self {
        GroupRingSpec { p: g.ring.p(), m: g.ring.m(), n: g.n, q: g.q }
    }
}

impl GroupRing {
    pub fn new(ring: CoeffRing, n: u32, q: u32) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(Error::InvalidRing("group ring needs N >= 1 and q >= 1".into()));
        }
        let order = (ring.p() as u128).checked_pow(n * q);
        if order.is_none_or(|o| o > MAX_COLUMNS as u128) {
            return Err(Error::SizeLimit(format!("|Δ| = {}^{} exceeds {MAX_COLUMNS}", ring.p(), n * q)));
        }
        Ok(GroupRing { ring, n, q })
    }

    /// `|Δ_N| = p^{Nq}`.
    pub fn order(&self) -> usize {
        self.ring.p().pow(self.n * self.q) as usize
    }

    /// `p^N`, the order of each generator.
    pub fn cyclic_order(&self) -> u64 {
        self.ring.p().pow(self.n)
    }

    pub fn with_ring(&self, ring: CoeffRing) -> Self {
        GroupRing { ring, ..*self }
    }

    pub fn exponents(&self, mut idx: usize) -> Vec<u64> {
        let c = self.cyclic_order() as usize;
        (0..self.q)
            .map(|_| {
                let e = idx % c;
                idx /= c;
                e as u64
            })
            .collect()
    }

    pub fn index(&self, exps: &[u64]) -> usize {
        let c = self.cyclic_order();
        exps.iter().rev().fold(0usize, |acc, &e| acc * c as usize + (e % c) as usize)
    }

    /// Image of `a` under `S_N → S_{N'}` (exponents mod `p^{N'}`, coefficients
    /// projected to the target's `O`).
    pub fn reduce_elem(&self, target: &GroupRing, a: &[u64]) -> SElem {
        let c = target.cyclic_order();
        let mut out = target.zero();
        for (h, &x) in a.iter().enumerate() {
            if x != 0 {
                let exps: Vec<u64> = self.exponents(h).iter().map(|e| e % c).collect();
                let i = target.index(&exps);
                out[i] = target.ring.add(out[i], self.ring.project(x, &target.ring));
            }
        }
        out
    }

    /// Index of the product of two group elements.
    pub fn compose(&self, a: usize, b: usize) -> usize {
        let (ea, eb) = (self.exponents(a), self.exponents(b));
        let sum: Vec<u64> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
        self.index(&sum)
    }

    pub fn zero(&self) -> SElem {
        vec![0; self.order()]
    }

    pub fn scalar(&self, c: u64) -> SElem {
        let mut v = self.zero();
        v[0] = self.ring.reduce(c);
        v
    }

    pub fn one(&self) -> SElem {
        self.scalar(1)
    }

    /// The group element with the given exponents.
    pub fn group_element(&self, exps: &[u64]) -> SElem {
        let mut v = self.zero();
        v[self.index(exps)] = 1;
        v
    }

    /// `t_i` (0-based).
    pub fn t(&self, i: usize) -> SElem {
        let mut e = vec![0; self.q as usize];
        e[i] = 1;
        self.group_element(&e)
    }

    /// `t_i − 1`.
    pub fn t_minus_one(&self, i: usize) -> SElem {
        self.sub(&self.t(i), &self.one())
    }

    pub fn from_i64(&self, coeffs: &[i64]) -> Result<SElem> {
        if coeffs.len() > self.order() {
            return Err(Error::Dimension(format!(
                "group ring element has {} coefficients, |Δ| = {}",
                coeffs.len(),
                self.order()
            )));
        }
        let mut v = self.zero();
        for (i, &c) in coeffs.iter().enumerate() {
            v[i] = self.ring.from_i64(c);
        }
        Ok(v)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> SElem {
        a.iter().zip(b).map(|(&x, &y)| self.ring.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> SElem {
        a.iter().zip(b).map(|(&x, &y)| self.ring.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[u64]) -> SElem {
        a.iter().map(|&x| self.ring.neg(x)).collect()
    }

    pub fn scale(&self, c: u64, a: &[u64]) -> SElem {
        a.iter().map(|&x| self.ring.mul(c, x)).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> SElem {
        let mut out = self.zero();
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    let k = self.compose(i, j);
                    out[k] = self.ring.add(out[k], self.ring.mul(x, y));
                }
            }
        }
        out
    }

    /// `h·a` for a group element `h` given by index.
    pub fn translate(&self, h: usize, a: &[u64]) -> SElem {
        let mut out = self.zero();
        for (i, &x) in a.iter().enumerate() {
            if x != 0 {
                out[self.compose(h, i)] = x;
            }
        }
        out
    }

    /// The augmentation `Σ a_h`.
    pub fn augmentation(&self, a: &[u64]) -> u64 {
        a.iter().fold(0, |acc, &x| self.ring.add(acc, x))
    }

    /// `S_N` is local, so `a` is a unit iff its augmentation is a unit of O.
    pub fn is_unit(&self, a: &[u64]) -> bool {
        self.ring.is_unit(self.augmentation(a))
    }

    /// Matrix of multiplication by `a` on the O-basis of group elements.
    pub fn mult_matrix(&self, a: &[u64]) -> Mat {
        let n = self.order();
        let cols: Vec<Vec<u64>> = (0..n).map(|h| self.translate(h, a)).collect();
        Mat::from_cols(self.ring, n, &cols)
    }

    pub fn inverse(&self, a: &[u64]) -> Result<SElem> {
        if !self.is_unit(a) {
            return Err(Error::Precondition("element of the maximal ideal has no inverse".into()));
        }
        mat_solve(&self.mult_matrix(a), &self.one())?
            .ok_or_else(|| Error::Precondition("unit without inverse (unreachable)".into()))
    }

    /// Action matrix of `t_i` on `O^{g·|Δ|}`.
    pub fn action_matrix(&self, i: usize, g: usize) -> Mat {
        let n = self.order();
        let ti = self.index(&{
            let mut e = vec![0; self.q as usize];
            e[i] = 1;
            e
        });
        let mut m = Mat::zeros(self.ring, g * n, g * n);
        for gen in 0..g {
            for h in 0..n {
                m.set(gen * n + self.compose(ti, h), gen * n + h, 1);
            }
        }
        m
    }
}

/// `coker(S^r → S^g)`; `relations[c][j]` is the `j`-th entry of relation column `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingModule {
    pub group: GroupRing,
    pub generators: usize,
    pub relations: Vec<Vec<SElem>>,
}

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    groupring: GroupRing,
    generators: usize,
    relations: Vec<Vec<Vec<i64>>>,
}

/// The module as an O-module: `F/W` with the commuting actions of the `t_i`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub group: GroupRing,
    pub generators: usize,
    /// O-span of all translates of the relations, inside `O^{g·|Δ|}`.
    pub w: Howell,
    pub actions: Vec<Mat>,
}

impl Realization {
    pub fn dim(&self) -> usize {
        self.generators * self.group.order()
    }

    /// Length of `M = F/W`.
    pub fn len(&self) -> u64 {
        self.w.colen()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// O-generators of `m_S X = pX + Σ (t_i − 1)X` for `X` given by O-generators.
    pub fn times_maxideal(&self, gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let mut out = self.times_augmentation(gens);
        let r = self.group.ring;
        out.extend(gens.iter().map(|g| g.iter().map(|&a| r.mul(a, r.p())).collect()));
        out
    }

    /// O-generators of `𝔞X = Σ (t_i − 1)X`.
    pub fn times_augmentation(&self, gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let r = self.group.ring;
        let mut out = Vec::new();
        for g in gens {
            for t in &self.actions {
                let tg = t.mul_vec(g).expect("square");
                out.push(tg.iter().zip(g).map(|(&a, &b)| r.sub(a, b)).collect());
            }
        }
        out
    }

    fn unit_vectors(&self) -> Vec<Vec<u64>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect()
    }

    /// `dim_k M/m_S M`.
    pub fn t0(&self) -> u64 {
        let mut h = self.w.clone();
        for v in self.times_maxideal(&self.unit_vectors()) {
            h.insert(v);
        }
        h.colen()
    }

    /// `μ(W) = dim_k W/m_S W`.
    pub fn relation_generators(&self) -> u64 {
        let wg = self.w.generators();
        let mw = span(self.group.ring, self.dim(), &self.times_maxideal(&wg));
        self.w.len() - mw.len()
    }

    /// Cyclic type of `M_Δ = M/𝔞M`, exponents descending.
    pub fn coinvariants(&self) -> Vec<u32> {
        let mut w = self.w.generators();
        w.extend(self.times_augmentation(&self.unit_vectors()));
        let n = self.dim();
        cyclic_type(self.group.ring, n, &self.unit_vectors(), &w)
    }
}

impl GroupRingModule {
    pub fn new(group: GroupRing, generators: usize, relations: Vec<Vec<SElem>>) -> Result<Self> {
        for (c, col) in relations.iter().enumerate() {
            if col.len() != generators {
                return Err(Error::Dimension(format!(
                    "relation {c} has {} entries for {generators} generators",
                    col.len()
                )));
            }
            if col.iter().any(|s| s.len() != group.order()) {
                return Err(Error::Dimension(format!("relation {c} has an element of the wrong size")));
            }
        }
        if generators * group.order() > MAX_COLUMNS {
            return Err(Error::SizeLimit(format!(
                "g·|Δ| = {} exceeds {MAX_COLUMNS}",
                generators * group.order()
            )));
        }
        Ok(GroupRingModule { group, generators, relations })
    }

    pub fn free(group: GroupRing, rank: usize) -> Result<Self> {
        Self::new(group, rank, Vec::new())
    }

    /// `O = S/(t_1 − 1, …, t_q − 1)`.
    pub fn trivial(group: GroupRing) -> Result<Self> {
        let rels = (0..group.q as usize).map(|i| vec![group.t_minus_one(i)]).collect();
        Self::new(group, 1, rels)
    }

    /// `k = S/(p, t_i − 1)`.
    pub fn residue_field(group: GroupRing) -> Result<Self> {
        let mut rels: Vec<Vec<SElem>> = (0..group.q as usize).map(|i| vec![group.t_minus_one(i)]).collect();
        rels.push(vec![group.scalar(group.ring.p())]);
        Self::new(group, 1, rels)
    }

    /// `S/(a)` for a single element.
    pub fn cyclic(group: GroupRing, a: SElem) -> Result<Self> {
        Self::new(group, 1, vec![vec![a]])
    }

    /// The submodule of `S` generated by `gens`, presented by its syzygies.
    pub fn from_ideal(group: GroupRing, gens: &[SElem]) -> Result<Self> {
        let k = gens.len();
        let n = group.order();
        if k * n > MAX_COLUMNS {
            return Err(Error::SizeLimit(format!("{k} generators over |Δ| = {n}")));
        }
        // O-linear map O^{k·n} → S, e_{j,h} ↦ h·gens[j]
        let cols: Vec<Vec<u64>> = (0..k).flat_map(|j| (0..n).map(move |h| (j, h))).map(|(j, h)| group.translate(h, &gens[j])).collect();
        let map = Mat::from_cols(group.ring, n, &cols);
        let syz = crate::coeff::mat_kernel(&map);
        let rels = syz.iter().map(|v| (0..k).map(|j| v[j * n..(j + 1) * n].to_vec()).collect()).collect();
        Self::new(group, k, rels)
    }

    /// The augmentation ideal `𝔞 = (t_1 − 1, …, t_q − 1)`.
    pub fn augmentation_ideal(group: GroupRing) -> Result<Self> {
        let gens: Vec<SElem> = (0..group.q as usize).map(|i| group.t_minus_one(i)).collect();
        Self::from_ideal(group, &gens)
    }

    pub fn direct_sum(&self, other: &GroupRingModule) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::Mismatch("direct sum over different group rings".into()));
        }
        let g = self.generators + other.generators;
        let z = self.group.zero();
        let mut rels = Vec::new();
        for c in &self.relations {
            let mut col = c.clone();
            col.resize(g, z.clone());
            rels.push(col);
        }
        for c in &other.relations {
            let mut col = vec![z.clone(); self.generators];
            col.extend(c.iter().cloned());
            rels.push(col);
        }
        Self::new(self.group, g, rels)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let m: ModuleJson = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        let rels = m
            .relations
            .iter()
            .map(|col| col.iter().map(|s| m.groupring.from_i64(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(m.groupring, m.generators, rels)
    }

    pub fn to_json(&self) -> String {
        let r = self.group.ring;
        let m = ModuleJson {
            groupring: self.group,
            generators: self.generators,
            relations: self
                .relations
                .iter()
                .map(|col| col.iter().map(|s| s.iter().map(|&a| r.signed(a)).collect()).collect())
                .collect(),
        };
        serde_json::to_string(&m).expect("module serializes")
    }

    /// Base change along `S_N → S_{N'}` over `O → O/p^{M'}`: coefficients are
    /// reduced and exponents taken mod `p^{N'}`.
    pub fn reduce_to(&self, target: GroupRing) -> Result<Self> {
        let s = &self.group;
        if target.ring.p() != s.ring.p() || target.q != s.q || target.n > s.n || target.ring.m() > s.ring.m() {
            return Err(Error::Mismatch(format!("cannot reduce from {s:?} to {target:?}")));
        }
        let rels = self.relations.iter().map(|col| col.iter().map(|a| s.reduce_elem(&target, a)).collect()).collect();
        Self::new(target, self.generators, rels)
    }

    /// Flattened relation column `c` inside `O^{g·|Δ|}`.
    fn column_vector(&self, col: &[SElem]) -> Vec<u64> {
        col.iter().flatten().copied().collect()
    }

    pub fn realization(&self) -> Realization {
        let g = self.generators;
        let n = self.group.order();
        let mut w = Howell::new(self.group.ring, g * n);
        for col in &self.relations {
            for h in 0..n {
                let shifted: Vec<SElem> = col.iter().map(|s| self.group.translate(h, s)).collect();
                w.insert(self.column_vector(&shifted));
            }
        }
        let actions = (0..self.group.q as usize).map(|i| self.group.action_matrix(i, g)).collect();
        Realization { group: self.group, generators: g, w, actions }
    }

    /// `(dim_k Tor_0^S(M,k), dim_k Tor_1^S(M,k))`.
    pub fn tor_dims(&self) -> (u64, u64) {
        let r = self.realization();
        let t0 = r.t0();
        let t1 = r.relation_generators() + t0 - self.generators as u64;
        (t0, t1)
    }

    pub fn defect(&self) -> i64 {
        let (t0, t1) = self.tor_dims();
        t0 as i64 - t1 as i64
    }

    /// `defect >= 0`, with a square presentation `S^d → S^d → M → 0` when balanced.
    pub fn is_balanced(&self) -> (bool, Option<GroupRingModule>) {
        if self.defect() < 0 {
            return (false, None);
        }
        let mp = self.minimal_presentation().module;
        let d = mp.generators;
        let mut rels = mp.relations;
        rels.resize(d, vec![self.group.zero(); d]);
        let sq = GroupRingModule { group: self.group, generators: d, relations: rels };
        (true, Some(sq))
    }

    pub fn coinvariants(&self) -> Vec<u32> {
        self.realization().coinvariants()
    }

    /// Nakayama reduction: eliminate generator/relation pairs through unit
    /// entries, then keep only relations independent modulo `m_S W`.
    pub fn minimal_presentation(&self) -> MinimalPresentation {
        let s = &self.group;
        let mut g = self.generators;
        let mut cols = self.relations.clone();
        // sigma[i] expresses old generator i in the current generators
        let mut sigma: Vec<Vec<SElem>> = (0..g)
            .map(|i| (0..g).map(|j| if i == j { s.one() } else { s.zero() }).collect())
            .collect();
        let mut alive: Vec<usize> = (0..g).collect();
        loop {
            let pivot = cols.iter().enumerate().find_map(|(c, col)| col.iter().position(|a| s.is_unit(a)).map(|i| (c, i)));
            let Some((c, i)) = pivot else { break };
            let pcol = cols.remove(c);
            let uinv = s.inverse(&pcol[i]).expect("unit");
            let eliminate = |v: &mut Vec<SElem>| {
                let f = s.mul(&v[i], &uinv);
                for (x, y) in v.iter_mut().zip(&pcol) {
                    *x = s.sub(x, &s.mul(&f, y));
                }
                v.remove(i);
            };
            cols.iter_mut().for_each(eliminate);
            sigma.iter_mut().for_each(eliminate);
            alive.remove(i);
            g -= 1;
        }
        let reduced = GroupRingModule { group: *s, generators: g, relations: cols };
        let real = reduced.realization();
        let wg = real.w.generators();
        let mut h = span(s.ring, real.dim(), &real.times_maxideal(&wg));
        let mut kept = Vec::new();
        for col in &reduced.relations {
            let v = reduced.column_vector(col);
            if !h.contains(&v) {
                h.insert(v);
                kept.push(col.clone());
            }
        }
        MinimalPresentation { module: GroupRingModule { group: *s, generators: g, relations: kept }, sigma, kept: alive }
    }

    /// The exact sequence
    /// `0 → Tor_1(M,O)/p → Tor_1(M,k) → M_Δ →(p) M_Δ → M⊗k → 0`,
    /// with `M` regarded over the untruncated group ring `Λ = Z_p[Δ]`.
    pub fn six_term_check(&self) -> SixTermReport {
        six_term(self)
    }
}

/// A minimal presentation and, for each original generator, its expression
/// in the surviving generators.
#[derive(Clone, Debug)]
pub struct MinimalPresentation {
    pub module: GroupRingModule,
    pub sigma: Vec<Vec<SElem>>,
    /// Original index of each surviving generator.
    pub kept: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SixTermReport {
    /// `dim_k Tor_1^Λ(M,O)/p`
    pub tor1_o_mod_p: u64,
    /// `dim_k Tor_1^Λ(M,k)`
    pub tor1_k: u64,
    /// length of `M_Δ`
    pub coinvariants_len: u64,
    pub ker_p: u64,
    pub coker_p: u64,
    /// `dim_k M ⊗ k`
    pub t0: u64,
    pub image_a_in_t: u64,
    pub image_delta: u64,
    pub injective: bool,
    pub exact_at_tor1_k: bool,
    pub exact_at_coinvariants: bool,
    pub exact_at_end: bool,
    pub alternating_sum_zero: bool,
    pub status: Status,
}

impl SixTermReport {
    pub fn certificate(&self) -> Certificate {
        Certificate::new(
            "six-term Tor sequence",
            self.status,
            "0 → Tor1(M,O)/ϖ → Tor1(M,k) → M_Δ →ϖ M_Δ → M⊗k → 0 is exact",
            serde_json::to_value(self).expect("serializable"),
        )
    }
}

fn six_term(module: &GroupRingModule) -> SixTermReport {
    let s = module.group;
    let ring = s.ring;
    let g = module.generators;
    let n = s.order();
    let dim = g * n;
    let real = module.realization();
    let t0 = real.t0();

    // One more digit of precision: K' = lift(W) + p^M F is the kernel of
    // Λ^g → M, and m_Λ K' ⊇ p^{M+1} F, so it is seen exactly mod p^{M+1}.
    let big = ring.with_m(ring.m() + 1).expect("precision fits");
    let bs = s.with_ring(big);
    let pm = big.ppow(ring.m());
    let mut kgens = Vec::new();
    for col in &module.relations {
        for h in 0..n {
            kgens.push(col.iter().flat_map(|e| bs.translate(h, e)).collect::<Vec<u64>>());
        }
    }
    for i in 0..dim {
        let mut e = vec![0; dim];
        e[i] = pm;
        kgens.push(e);
    }
    let kprime = span(big, dim, &kgens);
    let big_real = Realization {
        group: bs,
        generators: g,
        w: kprime.clone(),
        actions: (0..s.q as usize).map(|i| bs.action_matrix(i, g)).collect(),
    };
    let kg = kprime.generators();
    let mk = span(big, dim, &big_real.times_maxideal(&kg));
    let unit: Vec<Vec<u64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0; dim];
            e[i] = 1;
            e
        })
        .collect();
    let mf = big_real.times_maxideal(&unit);
    let af = big_real.times_augmentation(&unit);
    // Tor_1^Λ(M,k) = (K' ∩ m F)/m K'
    let k_cap_mf = intersection(big, dim, &kg, &mf);
    let tor1_k = span(big, dim, &k_cap_mf).len() - mk.len();
    debug_assert_eq!(tor1_k + g as u64, kprime.len() - mk.len() + t0);

    // Tor_1^Λ(M,O) = (W ∩ 𝔞F)/𝔞W over Z/p^M
    let small_unit: Vec<Vec<u64>> = unit.clone();
    let wg = real.w.generators();
    let af_small = real.times_augmentation(&small_unit);
    let x = intersection(ring, dim, &wg, &af_small);
    let aw = real.times_augmentation(&wg);
    let px: Vec<Vec<u64>> = x.iter().map(|v| v.iter().map(|&a| ring.mul(a, ring.p())).collect()).collect();
    let mut pxaw = px;
    pxaw.extend(aw.iter().cloned());
    let tor1_o_mod_p = span(ring, dim, &x).len() - span(ring, dim, &pxaw).len();

    // image of Tor_1(M,O) in Tor_1(M,k): (K' ∩ 𝔞F + mK')/mK'
    let xprime = intersection(big, dim, &kg, &af);
    let mut xm = xprime;
    xm.extend(mk.generators());
    let image_a_in_t = span(big, dim, &xm).len() - mk.len();

    // coinvariants as O^g / aug(W), and δ(κ) = aug(κ)/p
    let aug = |v: &[u64], r: CoeffRing| -> Vec<u64> {
        (0..g).map(|j| v[j * n..(j + 1) * n].iter().fold(0, |acc, &a| r.add(acc, a))).collect()
    };
    let aug_w: Vec<Vec<u64>> = wg.iter().map(|v| aug(v, ring)).collect();
    let aug_w_h = span(ring, g, &aug_w);
    let coinvariants_len = aug_w_h.colen();
    let p_map = Mat::scalar(ring, g, ring.p());
    let ker_p_gens = preimage(&p_map, &aug_w);
    let mut kp = ker_p_gens.clone();
    kp.extend(aug_w.iter().cloned());
    let ker_p = span(ring, g, &kp).len() - aug_w_h.len();
    let mut pc: Vec<Vec<u64>> = (0..g)
        .map(|j| {
            let mut e = vec![0; g];
            e[j] = ring.p();
            e
        })
        .collect();
    pc.extend(aug_w.iter().cloned());
    let coker_p = span(ring, g, &pc).colen();

    let mut delta_img = aug_w.clone();
    let mut delta_in_ker = true;
    let kerp_h = span(ring, g, &kp);
    for v in &k_cap_mf {
        let a = aug(v, big);
        debug_assert!(a.iter().all(|&c| c % big.p() == 0));
        let d: Vec<u64> = a.iter().map(|&c| ring.reduce(c / big.p())).collect();
        delta_in_ker &= kerp_h.contains(&d);
        delta_img.push(d);
    }
    let image_delta = span(ring, g, &delta_img).len() - aug_w_h.len();

    let injective = image_a_in_t == tor1_o_mod_p;
    let exact_at_tor1_k = image_a_in_t + image_delta == tor1_k;
    let exact_at_coinvariants = delta_in_ker && image_delta == ker_p;
    let exact_at_end = coker_p == t0;
    let alternating_sum_zero = tor1_o_mod_p + coinvariants_len + t0 == tor1_k + coinvariants_len;
    let ok = injective && exact_at_tor1_k && exact_at_coinvariants && exact_at_end && alternating_sum_zero;
    SixTermReport {
        tor1_o_mod_p,
        tor1_k,
        coinvariants_len,
        ker_p,
        coker_p,
        t0,
        image_a_in_t,
        image_delta,
        injective,
        exact_at_tor1_k,
        exact_at_coinvariants,
        exact_at_end,
        alternating_sum_zero,
        status: Status::from_bool(ok),
    }
}

/// Certificates for the `defect` subcommand.
pub fn defect_certificates(m: &GroupRingModule) -> Vec<Certificate> {
    let (t0, t1) = m.tor_dims();
    let d = t0 as i64 - t1 as i64;
    let (balanced, square) = m.is_balanced();
    let mut out = vec![Certificate::new(
        "defect",
        Status::Pass,
        "d_S(M) = dim_k Tor0(M,k) − dim_k Tor1(M,k)",
        json!({"t0": t0, "t1": t1, "defect": d, "balanced": balanced}),
    )];
    if let Some(sq) = square {
        out.push(Certificate::new(
            "square presentation",
            Status::Pass,
            "a balanced module admits a presentation S^d → S^d → M → 0",
            json!({"d": sq.generators, "presentation": serde_json::from_str::<serde_json::Value>(&sq.to_json()).unwrap()}),
        ));
    }
    out.push(m.six_term_check().certificate());
    out
}
