//! Truncated q-expansions over `Z/p^M`, the classical operators on them, and
//! the weight-one identities: the map `ψ = (φ, ⟨p⟩V_p)`, the `U_p` block
//! matrix, the doubling detector and the degeneracy determinant.
//!
//! A `QExpansion` of precision `n` stores `a_0..=a_n`.  Every operator states
//! its precision change: `T_ℓ` and `U_ℓ` map precision `n` to `⌊n/ℓ⌋`, `V_ℓ`
//! to `n·ℓ`, products to the minimum.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::{algebra_span, mat_solve, CoeffRing, Howell, Mat};
use crate::{Error, Result};

/// Compositions may not push precision below this.
pub const MIN_PRECISION: usize = 5;

/// A character given by its values on `0..modulus` (zero off the units).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub values: Vec<u64>,
    pub order: u64,
}

impl DirichletCharacter {
    pub fn trivial() -> Self {
        DirichletCharacter { modulus: 1, values: vec![1], order: 1 }
    }

    /// The quadratic character `(·/ℓ)` for an odd prime `ℓ`.
    pub fn legendre(ring: CoeffRing, l: u64) -> Result<Self> {
        if l < 3 || (2..l).take_while(|d| d * d <= l).any(|d| l % d == 0) {
            return Err(Error::Precondition(format!("{l} is not an odd prime")));
        }
        let squares: Vec<bool> = {
            let mut s = vec![false; l as usize];
            for x in 1..l {
                s[(x * x % l) as usize] = true;
            }
            s
        };
        let values = (0..l)
            .map(|a| match a {
                0 => 0,
                _ if squares[a as usize] => 1,
                _ => ring.neg(1),
            })
            .collect();
        Ok(DirichletCharacter { modulus: l, values, order: 2 })
    }

    /// The character of `(Z/ℓ)^×` sending the primitive root `g` to `image`,
    /// which must be a root of unity of order dividing `p − 1`.
    pub fn from_generator(ring: CoeffRing, l: u64, g: u64, image: u64) -> Result<Self> {
        let order = (1..=ring.p() - 1)
            .find(|&k| ring.pow(image, k) == 1)
            .filter(|k| (ring.p() - 1) % k == 0)
            .ok_or_else(|| Error::Precondition("image is not a root of unity of order dividing p − 1".into()))?;
        let mut values = vec![0; l as usize];
        let (mut x, mut v) = (1u64, 1u64);
        for _ in 0..l - 1 {
            if values[x as usize] != 0 {
                return Err(Error::Precondition(format!("{g} is not a primitive root mod {l}")));
            }
            values[x as usize] = v;
            x = x * g % l;
            v = ring.mul(v, image);
        }
        Ok(DirichletCharacter { modulus: l, values, order })
    }

    pub fn eval(&self, n: u64) -> u64 {
        self.values[(n % self.modulus) as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QExpansion {
    pub ring: CoeffRing,
    /// `a_0, …, a_prec`.
    pub coefficients: Vec<u64>,
    pub weight: i64,
    pub level: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character: Option<DirichletCharacter>,
}

impl QExpansion {
    pub fn new(ring: CoeffRing, coefficients: Vec<u64>, weight: i64, level: u64) -> Self {
        let coefficients = coefficients.into_iter().map(|a| ring.reduce(a)).collect();
        QExpansion { ring, coefficients, weight, level, character: None }
    }

    pub fn from_i64(ring: CoeffRing, coeffs: &[i64], weight: i64, level: u64) -> Self {
        Self::new(ring, coeffs.iter().map(|&a| ring.from_i64(a)).collect(), weight, level)
    }

    pub fn zero(ring: CoeffRing, prec: usize) -> Self {
        Self::new(ring, vec![0; prec + 1], 0, 1)
    }

    pub fn constant(ring: CoeffRing, c: u64, prec: usize) -> Self {
        let mut f = Self::zero(ring, prec);
        f.coefficients[0] = ring.reduce(c);
        f
    }

    pub fn with_character(mut self, chi: DirichletCharacter) -> Self {
        self.character = Some(chi);
        self
    }

    pub fn prec(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coeff(&self, n: usize) -> u64 {
        self.coefficients[n]
    }

    pub fn truncate(&self, prec: usize) -> QExpansion {
        let mut f = self.clone();
        f.coefficients.truncate(prec + 1);
        f
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&a| a == 0)
    }

    fn zip(&self, other: &QExpansion, op: impl Fn(u64, u64) -> u64) -> Result<QExpansion> {
        if self.ring != other.ring {
            return Err(Error::Mismatch("q-expansions over different rings".into()));
        }
        let n = self.prec().min(other.prec());
        let mut f = self.truncate(n);
        for (a, &b) in f.coefficients.iter_mut().zip(&other.coefficients) {
            *a = op(*a, b);
        }
        Ok(f)
    }

    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        self.zip(other, |a, b| self.ring.add(a, b))
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.zip(other, |a, b| self.ring.sub(a, b))
    }

    pub fn scale(&self, c: u64) -> QExpansion {
        let mut f = self.clone();
        f.coefficients.iter_mut().for_each(|a| *a = self.ring.mul(*a, c));
        f
    }

    /// Truncated product; weights add.
    pub fn mul(&self, other: &QExpansion) -> Result<QExpansion> {
        if self.ring != other.ring {
            return Err(Error::Mismatch("q-expansions over different rings".into()));
        }
        let n = self.prec().min(other.prec());
        let r = self.ring;
        let mut c = vec![0u64; n + 1];
        for (i, &a) in self.coefficients.iter().take(n + 1).enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coefficients.iter().take(n + 1 - i).enumerate() {
                c[i + j] = r.add(c[i + j], r.mul(a, b));
            }
        }
        let mut f = QExpansion::new(r, c, self.weight + other.weight, self.level.max(other.level));
        f.character = self.character.clone();
        Ok(f)
    }

    pub fn pow(&self, k: u32) -> Result<QExpansion> {
        let mut acc = QExpansion::constant(self.ring, 1, self.prec());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        acc.weight = self.weight * k as i64;
        Ok(acc)
    }

    /// Reduce the coefficients into a smaller truncation of the same prime.
    pub fn project(&self, target: CoeffRing) -> QExpansion {
        let mut f = self.clone();
        f.ring = target;
        f.coefficients.iter_mut().for_each(|a| *a = self.ring.project(*a, &target));
        f
    }
}

impl fmt::Display for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, &a) in self.coefficients.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let c = self.ring.signed(a);
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let c = c.unsigned_abs();
            match n {
                0 => write!(f, "{c}")?,
                _ if c == 1 => write!(f, "q^{n}")?,
                _ => write!(f, "{c}*q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.prec() + 1)
    }
}

fn is_prime(l: u64) -> bool {
    l >= 2 && (2..l).take_while(|d| d * d <= l).all(|d| l % d != 0)
}

fn shrink(prec: usize, l: u64) -> Result<usize> {
    let n = prec / l as usize;
    if n < 1 {
        return Err(Error::Precision(format!("precision {prec} is too small for an operator of index {l}")));
    }
    Ok(n)
}

/// `a_m(T_ℓ f) = a_{ℓm}(f) + χ(ℓ)ℓ^{k−1}a_{m/ℓ}(f)`.
pub fn hecke_t(f: &QExpansion, l: u64, k: i64, chi: &DirichletCharacter) -> Result<QExpansion> {
    if !is_prime(l) {
        return Err(Error::Precondition(format!("T_ℓ needs a prime, got {l}")));
    }
    if k < 1 {
        return Err(Error::Precondition("weight must be at least 1".into()));
    }
    let r = f.ring;
    let n = shrink(f.prec(), l)?;
    let c = r.mul(r.reduce(chi.eval(l)), r.pow(r.reduce(l), (k - 1) as u64));
    let l = l as usize;
    let coeffs = (0..=n)
        .map(|m| {
            let lower = if m % l == 0 { f.coeff(m / l) } else { 0 };
            r.add(f.coeff(l * m), r.mul(c, lower))
        })
        .collect();
    let mut g = QExpansion::new(r, coeffs, f.weight, f.level);
    g.character = f.character.clone();
    Ok(g)
}

/// `a_n ↦ a_{nℓ}`.
pub fn hecke_u(f: &QExpansion, l: u64) -> Result<QExpansion> {
    if l == 0 {
        return Err(Error::Precondition("U_0 is undefined".into()));
    }
    let n = shrink(f.prec(), l)?;
    let mut g = f.truncate(n);
    for m in 0..=n {
        g.coefficients[m] = f.coeff(m * l as usize);
    }
    Ok(g)
}

/// `Σ a_n q^n ↦ Σ a_n q^{nℓ}`.
pub fn hecke_v(f: &QExpansion, l: u64) -> Result<QExpansion> {
    if l == 0 {
        return Err(Error::Precondition("V_0 is undefined".into()));
    }
    let l = l as usize;
    let mut coeffs = vec![0; f.prec() * l + 1];
    for (n, &a) in f.coefficients.iter().enumerate() {
        coeffs[n * l] = a;
    }
    let mut g = QExpansion::new(f.ring, coeffs, f.weight, f.level);
    g.character = f.character.clone();
    Ok(g)
}

/// `q·d/dq`.
pub fn theta(f: &QExpansion) -> QExpansion {
    let r = f.ring;
    let mut g = f.clone();
    for (n, a) in g.coefficients.iter_mut().enumerate() {
        *a = r.mul(*a, r.reduce(n as u64));
    }
    g.weight = f.weight + 2;
    g
}

/// `∏_{n>=1}(1 − q^n)` by the pentagonal number theorem.
fn euler_product(ring: CoeffRing, prec: usize) -> Vec<u64> {
    let mut c = vec![0u64; prec + 1];
    c[0] = 1;
    for k in 1i64.. {
        let p1 = (k * (3 * k - 1) / 2) as usize;
        if p1 > prec {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { ring.neg(1) };
        c[p1] = ring.add(c[p1], sign);
        let p2 = (k * (3 * k + 1) / 2) as usize;
        if p2 <= prec {
            c[p2] = ring.add(c[p2], sign);
        }
    }
    c
}

fn series_inverse(ring: CoeffRing, a: &[u64]) -> Vec<u64> {
    // a_0 = 1 for every Euler factor
    let n = a.len();
    let mut b = vec![0u64; n];
    b[0] = 1;
    for k in 1..n {
        let mut s = 0;
        for j in 1..=k {
            s = ring.add(s, ring.mul(a[j], b[k - j]));
        }
        b[k] = ring.neg(s);
    }
    b
}

/// `∏ η(q^d)^r` for `(d, r)` pairs; the leading power `Σ d·r/24` must be a
/// non-negative integer.
pub fn eta_quotient(ring: CoeffRing, pairs: &[(u64, i64)], prec: usize) -> Result<QExpansion> {
    let lead: i64 = pairs.iter().map(|&(d, r)| d as i64 * r).sum();
    if lead % 24 != 0 || lead < 0 {
        return Err(Error::Precondition(format!(
            "leading exponent {lead}/24 is not a non-negative integer"
        )));
    }
    if pairs.iter().any(|&(d, _)| d == 0) {
        return Err(Error::Precondition("eta factors need d >= 1".into()));
    }
    let lead = (lead / 24) as usize;
    let base = euler_product(ring, prec);
    let mut acc = QExpansion::constant(ring, 1, prec);
    for &(d, r) in pairs {
        let mut e = vec![0u64; prec + 1];
        for (n, &a) in base.iter().enumerate() {
            if n * d as usize > prec {
                break;
            }
            e[n * d as usize] = a;
        }
        let factor = if r < 0 { series_inverse(ring, &e) } else { e };
        let factor = QExpansion::new(ring, factor, 0, 1);
        for _ in 0..r.unsigned_abs() {
            acc = acc.mul(&factor)?;
        }
    }
    let mut coeffs = vec![0u64; prec + 1];
    for n in lead..=prec {
        coeffs[n] = acc.coeff(n - lead);
    }
    let total: i64 = pairs.iter().map(|&(_, r)| r).sum();
    let level = pairs.iter().fold(1u64, |l, &(d, _)| l.lcm(&d));
    Ok(QExpansion::new(ring, coeffs, total / 2, level))
}

/// `B_0..=B_n` exactly, from `Σ_{j<=m} C(m+1, j) B_j = 0`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=n {
        let mut s = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            s += BigRational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

fn reduce_rational(ring: CoeffRing, x: &BigRational) -> Option<u64> {
    let q = BigInt::from(ring.modulus());
    let num = x.numer().mod_floor(&q).to_u64()?;
    let den = x.denom().mod_floor(&q).to_u64()?;
    Some(ring.mul(num, ring.inv(den)?))
}

/// `E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) q^n`.
pub fn eisenstein(k: u32, prec: usize, ring: CoeffRing) -> Result<QExpansion> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::Precondition(format!("Eisenstein series need even k >= 4, got {k}")));
    }
    let bk = bernoulli_numbers(k as usize).pop().expect("nonempty");
    let c = -BigRational::from_integer(BigInt::from(2 * k)) / bk;
    let cr = reduce_rational(ring, &c).ok_or_else(|| {
        Error::Rejected(format!(
            "{} divides the denominator of −2k/B_k = {c}; by von Staudt–Clausen this happens only when \
             (p − 1) ∤ k, and E_{k} then has non-integral p-adic coefficients",
            ring.p()
        ))
    })?;
    let mut coeffs = vec![0u64; prec + 1];
    coeffs[0] = 1;
    for n in 1..=prec {
        let mut s = 0;
        for d in 1..=n {
            if n % d == 0 {
                s = ring.add(s, ring.pow(ring.reduce(d as u64), (k - 1) as u64));
            }
        }
        coeffs[n] = ring.mul(cr, s);
    }
    Ok(QExpansion::new(ring, coeffs, k as i64, 1))
}

/// `A = E_{p−1}^s` with `s` minimal such that `(p−1)s >= 2` and `A ≡ 1 mod p^m`.
pub fn hasse_lift(ring: CoeffRing, m: u32, prec: usize) -> Result<QExpansion> {
    let p = ring.p();
    let e = eisenstein((p - 1) as u32, prec, ring)?;
    let pm = p.pow(m.min(ring.m()));
    let mut acc = QExpansion::constant(ring, 1, prec);
    for s in 1..=p.pow(m) {
        acc = acc.mul(&e)?;
        let ok = acc.coefficients[1..].iter().all(|&a| a % pm == 0) && (acc.coeff(0) + ring.modulus() - 1) % pm == 0;
        if (p - 1) * s >= 2 && ok {
            acc.weight = ((p - 1) * s) as i64;
            return Ok(acc);
        }
    }
    Err(Error::Rejected(format!("no power of E_{} is ≡ 1 mod {p}^{m}", p - 1)))
}

/// `φ(f) = A·f`, after checking `A ≡ 1 mod p^m` to the working precision.
pub fn hasse_mult(f: &QExpansion, a: &QExpansion, m: u32) -> Result<QExpansion> {
    let r = f.ring;
    let pm = r.p().pow(m.min(r.m()));
    let n = f.prec().min(a.prec());
    let one_mod = (0..=n).all(|i| {
        let target = u64::from(i == 0);
        (a.coeff(i) + r.modulus() - target) % pm == 0
    });
    if !one_mod {
        return Err(Error::Rejected(format!("A is not ≡ 1 mod p^{m} to precision {n}")));
    }
    let mut g = f.mul(a)?;
    g.weight = f.weight + a.weight;
    Ok(g)
}

/// `ψ(f, g) = φ(f) + ⟨p⟩V_p(g)` at the common precision.
pub fn psi_map(f: &QExpansion, g: &QExpansion, diamond_p: u64, a: &QExpansion, m: u32) -> Result<QExpansion> {
    let phi = hasse_mult(f, a, m)?;
    let v = hecke_v(g, f.ring.p())?.scale(diamond_p);
    let mut out = phi.add(&v)?;
    out.weight = phi.weight;
    Ok(out)
}

/// Rank over the residue field of the rows `a_0..=a_n` of the given expansions.
pub fn rank_mod_p(rows: &[QExpansion]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let k = first.ring.residue_field();
    let n = rows.iter().map(QExpansion::prec).min().unwrap_or(0) + 1;
    let mut h = Howell::new(k, n);
    for f in rows {
        h.insert(f.coefficients[..n].iter().map(|&a| a % k.p()).collect());
    }
    h.len() as usize
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiRank {
    pub basis_size: usize,
    pub rank: usize,
    pub injective: bool,
    /// weight `n` of the target
    pub weight: i64,
    /// `n >= m(p−1) + 2`
    pub weight_bound_ok: bool,
}

/// Rank of `ψ` on the doubled basis `{(f_i, 0)} ∪ {(0, f_i)}`.
pub fn psi_rank(basis: &[QExpansion], diamond_p: u64, m: u32) -> Result<PsiRank> {
    let Some(first) = basis.first() else {
        return Ok(PsiRank { basis_size: 0, rank: 0, injective: true, weight: 0, weight_bound_ok: true });
    };
    let r = first.ring;
    let prec = basis.iter().map(QExpansion::prec).min().unwrap_or(0);
    let a = hasse_lift(r, m, prec)?;
    let zero = QExpansion::zero(r, prec);
    let mut rows = Vec::new();
    for f in basis {
        rows.push(psi_map(f, &zero, diamond_p, &a, m)?);
    }
    for f in basis {
        rows.push(psi_map(&zero, f, diamond_p, &a, m)?);
    }
    let rank = rank_mod_p(&rows);
    let weight = first.weight + a.weight;
    Ok(PsiRank {
        basis_size: basis.len(),
        rank,
        injective: rank == 2 * basis.len(),
        weight,
        weight_bound_ok: weight >= m as i64 * (r.p() as i64 - 1) + 2,
    })
}

/// `T_ℓ(A·f) = A·T_ℓ(f)` to the given precision, with `f` expanded far enough.
pub fn hasse_equivariant(f: &QExpansion, a: &QExpansion, l: u64, chi: &DirichletCharacter, prec: usize) -> Result<bool> {
    let lifted = hasse_mult(f, a, 1)?;
    let left = hecke_t(&lifted, l, lifted.weight, chi)?.truncate(prec);
    let right = hasse_mult(&hecke_t(f, l, f.weight, chi)?, a, 1)?.truncate(prec);
    if left.prec() < prec || right.prec() < prec {
        return Err(Error::Precision(format!("inputs too short for precision {prec} after T_{l}")));
    }
    // T_ℓ in weight k carries ℓ^{k−1}; equivariance is a statement mod p
    Ok(left.project(f.ring.residue_field()).coefficients == right.project(f.ring.residue_field()).coefficients)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    Identity,
    T(u64),
    U(u64),
    Theta,
}

impl Operator {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown operator {s:?} (use id, theta, T<ℓ>, U<ℓ>)"));
        match s {
            "id" | "identity" => Ok(Operator::Identity),
            "theta" => Ok(Operator::Theta),
            _ if s.len() > 1 => {
                let n: u64 = s[1..].parse().map_err(|_| bad())?;
                match &s[..1] {
                    "T" => Ok(Operator::T(n)),
                    "U" => Ok(Operator::U(n)),
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Identity => write!(f, "id"),
            Operator::T(l) => write!(f, "T{l}"),
            Operator::U(l) => write!(f, "U{l}"),
            Operator::Theta => write!(f, "theta"),
        }
    }
}

/// A finite space of forms given by an explicit basis of expansions.
#[derive(Clone, Debug)]
pub struct HeckeSpace {
    pub ring: CoeffRing,
    pub basis: Vec<QExpansion>,
    pub weight: i64,
    pub character: DirichletCharacter,
    cache: BTreeMap<String, Mat>,
}

#[derive(Deserialize)]
struct SpaceJson {
    ring: CoeffRing,
    weight: i64,
    #[serde(default = "one")]
    level: u64,
    #[serde(default)]
    character: Option<CharacterJson>,
    basis: Vec<BasisJson>,
    #[serde(default)]
    precision: Option<usize>,
}

fn one() -> u64 {
    1
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CharacterJson {
    Legendre { legendre: u64 },
    Table { modulus: u64, values: Vec<i64> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BasisJson {
    Eta { eta: Vec<(u64, i64)> },
    Coefficients(Vec<i64>),
}

impl HeckeSpace {
    pub fn new(basis: Vec<QExpansion>, character: DirichletCharacter) -> Result<Self> {
        let first = basis.first().ok_or_else(|| Error::Precondition("a Hecke space needs a basis".into()))?;
        let (ring, weight, prec) = (first.ring, first.weight, first.prec());
        if basis.iter().any(|f| f.ring != ring || f.weight != weight || f.prec() != prec) {
            return Err(Error::Mismatch("basis expansions differ in ring, weight or precision".into()));
        }
        if rank_mod_p(&basis) != basis.len() {
            return Err(Error::Precondition("basis is not independent modulo p".into()));
        }
        Ok(HeckeSpace { ring, basis, weight, character, cache: BTreeMap::new() })
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let s: SpaceJson = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        let ring = s.ring;
        let character = match s.character {
            None => DirichletCharacter::trivial(),
            Some(CharacterJson::Legendre { legendre }) => DirichletCharacter::legendre(ring, legendre)?,
            Some(CharacterJson::Table { modulus, values }) => {
                if values.len() as u64 != modulus {
                    return Err(Error::Parse("character table must list one value per residue".into()));
                }
                DirichletCharacter { modulus, values: values.iter().map(|&v| ring.from_i64(v)).collect(), order: 0 }
            }
        };
        let prec = s.precision.unwrap_or(50);
        let basis = s
            .basis
            .iter()
            .map(|b| {
                let mut f = match b {
                    BasisJson::Eta { eta } => eta_quotient(ring, eta, prec)?,
                    BasisJson::Coefficients(c) => QExpansion::from_i64(ring, c, s.weight, s.level),
                };
                f.weight = s.weight;
                f.level = s.level;
                Ok(f.with_character(character.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(basis, character)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn apply(&self, op: Operator, f: &QExpansion) -> Result<QExpansion> {
        match op {
            Operator::Identity => Ok(f.clone()),
            Operator::T(l) => hecke_t(f, l, self.weight, &self.character),
            Operator::U(l) => hecke_u(f, l),
            Operator::Theta => Ok(theta(f)),
        }
    }

    /// Matrix of `op` in the basis: column `i` solves `op(b_i) = Σ c_ji b_j`.
    pub fn operator_matrix(&mut self, op: Operator) -> Result<Mat> {
        let key = op.to_string();
        if let Some(m) = self.cache.get(&key) {
            return Ok(m.clone());
        }
        let images = self.basis.iter().map(|b| self.apply(op, b)).collect::<Result<Vec<_>>>()?;
        let n = images.iter().map(QExpansion::prec).min().unwrap_or(0);
        if n < MIN_PRECISION {
            return Err(Error::Precision(format!("{op} leaves precision {n} < {MIN_PRECISION}")));
        }
        let truncated: Vec<QExpansion> = self.basis.iter().map(|b| b.truncate(n)).collect();
        if rank_mod_p(&truncated) != self.dim() {
            return Err(Error::Precision(format!("basis is not independent at precision {n} after {op}")));
        }
        let cols: Vec<Vec<u64>> = truncated.iter().map(|b| b.coefficients.clone()).collect();
        let bmat = Mat::from_cols(self.ring, n + 1, &cols);
        let mut out = Vec::new();
        for (i, img) in images.iter().enumerate() {
            let c = mat_solve(&bmat, &img.coefficients[..=n])?
                .ok_or_else(|| Error::NotInSpan(format!("{op} of basis vector {i} is not in the span of the basis")))?;
            out.push(c);
        }
        let m = Mat::from_cols(self.ring, self.dim(), &out);
        self.cache.insert(key, m.clone());
        Ok(m)
    }
}

/// Which constant term the `U_p` quadratic carries: `⟨x⟩` (weight one) or
/// `x⟨x⟩` (the homological normalization).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Normalization {
    WeightOne,
    Homology { x: u64 },
}

/// `[[T_p, 1], [−c, 0]]` with `c = ⟨p⟩` (or `p⟨p⟩`), checked against its
/// quadratic relation `A² − T_p A + c = 0`.
pub fn up_block_matrix(tp: &Mat, diamond_p: u64) -> Result<Mat> {
    up_block_matrix_with(tp, diamond_p, Normalization::WeightOne)
}

pub fn up_block_matrix_with(tp: &Mat, diamond_p: u64, norm: Normalization) -> Result<Mat> {
    if !tp.is_square() {
        return Err(Error::Dimension("T_p must be square".into()));
    }
    let r = tp.ring;
    let c = match norm {
        Normalization::WeightOne => r.reduce(diamond_p),
        Normalization::Homology { x } => r.mul(r.reduce(x), diamond_p),
    };
    let d = tp.rows;
    let a = Mat::block2(tp, &Mat::identity(r, d), &Mat::scalar(r, d, r.neg(c)), &Mat::zeros(r, d, d))?;
    if !quadratic_relation_holds(&a, tp, c)? {
        return Err(Error::Rejected("block matrix fails its quadratic relation".into()));
    }
    Ok(a)
}

/// `A² − diag(T, T)·A + c·I = 0`.
pub fn quadratic_relation_holds(a: &Mat, tp: &Mat, c: u64) -> Result<bool> {
    let r = a.ring;
    let t2 = Mat::block_diag(tp, tp);
    let lhs = a.mul(a)?.sub(&t2.mul(a)?)?.add(&Mat::scalar(r, a.rows, c))?;
    Ok(lhs.is_zero())
}

#[derive(Clone, Debug, Serialize)]
pub struct Doubling {
    /// length of the algebra generated by `T` and `T_p`
    pub base_len: u64,
    /// length of the algebra generated by `T`, `T_p` (diagonally) and `U_p`
    pub extended_len: u64,
    pub doubled: bool,
}

/// Compare the algebra generated by `T ∪ {T_p}` with the one generated on the
/// doubled space by the diagonal copies and the block `U_p`.
pub fn doubling_rank(t_gens: &[Mat], tp: &Mat, diamond_p: u64) -> Result<Doubling> {
    let u = up_block_matrix(tp, diamond_p)?;
    doubling_rank_with(t_gens, tp, &u)
}

/// As [`doubling_rank`] with an explicit operator in place of the block `U_p`.
pub fn doubling_rank_with(t_gens: &[Mat], tp: &Mat, u: &Mat) -> Result<Doubling> {
    let r = tp.ring;
    let d = tp.rows;
    if u.rows != 2 * d || !u.is_square() || t_gens.iter().any(|t| t.rows != d || !t.is_square()) {
        return Err(Error::Dimension("operators do not act on the (doubled) space".into()));
    }
    let mut base_gens: Vec<Mat> = t_gens.to_vec();
    base_gens.push(tp.clone());
    let base = algebra_span(r, d, &base_gens);
    let mut ext_gens: Vec<Mat> = base_gens.iter().map(|t| Mat::block_diag(t, t)).collect();
    ext_gens.push(u.clone());
    let ext = algebra_span(r, 2 * d, &ext_gens);
    Ok(Doubling { base_len: base.len(), extended_len: ext.len(), doubled: ext.len() == 2 * base.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct Degeneracy {
    pub matrix: Mat,
    pub det: u64,
    /// `det ≡ (−(αβ)^{−1}(α−β)²)^d mod p`
    pub congruence: bool,
    /// `α ≢ β mod p`
    pub unit: bool,
}

/// `ψ^∨∘ψ = [[x^{−1}(x+1), T_x], [⟨x⟩^{−1}T_x, x+1]]` and its determinant.
pub fn degeneracy_composite(tx: &Mat, diamond_x: u64, x: u64, alpha: u64, beta: u64) -> Result<Degeneracy> {
    let r = tx.ring;
    if !tx.is_square() {
        return Err(Error::Dimension("T_x must be square".into()));
    }
    let xinv = r.inv(r.reduce(x)).ok_or_else(|| Error::Precondition(format!("x = {x} is not invertible")))?;
    let dinv = r.inv(r.reduce(diamond_x)).ok_or_else(|| Error::Precondition("⟨x⟩ is not invertible".into()))?;
    let d = tx.rows;
    let x1 = r.add(r.reduce(x), 1);
    let m = Mat::block2(&Mat::scalar(r, d, r.mul(xinv, x1)), tx, &tx.scale(dinv), &Mat::scalar(r, d, x1))?;
    let det = m.det()?;
    let k = r.residue_field();
    let (a, b) = (r.project(r.reduce(alpha), &k), r.project(r.reduce(beta), &k));
    let congruence = match k.inv(k.mul(a, b)) {
        Some(abinv) => {
            let diff = k.sub(a, b);
            let rhs = k.neg(k.mul(abinv, k.mul(diff, diff)));
            r.project(det, &k) == k.pow(rhs, d as u64)
        }
        None => false,
    };
    Ok(Degeneracy { matrix: m, det, congruence, unit: a != b })
}

/// For an ordinary `U_p` acting on a space with Hecke algebra generated by
/// `t_gens`: whether `U_p` enlarges the algebra.
pub fn companion_criterion(t_gens: &[Mat], up: &Mat) -> Result<bool> {
    let d = up.rows;
    if d == 0 {
        return Ok(false);
    }
    let r = up.ring;
    if !r.is_unit(up.det()?) {
        return Err(Error::Rejected("U_p is not a unit on the space (non-ordinary input)".into()));
    }
    let base = algebra_span(r, d, t_gens).len();
    let mut gens = t_gens.to_vec();
    gens.push(up.clone());
    Ok(algebra_span(r, d, &gens).len() > base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn f5() -> CoeffRing {
        CoeffRing::field(5).unwrap()
    }

    fn eta23(ring: CoeffRing, prec: usize) -> QExpansion {
        let chi = DirichletCharacter::legendre(ring, 23).unwrap();
        eta_quotient(ring, &[(1, 1), (23, 1)], prec).unwrap().with_character(chi)
    }

    #[test]
    fn hecke_t_on_q() {
        let r = f5();
        let one = DirichletCharacter::trivial();
        let q = QExpansion::from_i64(r, &[0, 1, 0, 0, 0, 0, 0, 0, 0], 1, 1);
        let t = hecke_t(&q, 2, 1, &one).unwrap();
        assert_eq!(t.prec(), 4);
        assert_eq!(t.coefficients, vec![0, 0, 1, 0, 0]);
        assert!(hecke_t(&QExpansion::zero(r, 8), 2, 1, &one).unwrap().is_zero());
        assert!(hecke_t(&q, 11, 1, &one).is_err());
    }

    #[test]
    fn delta_and_tau() {
        let big = CoeffRing::new(5, 20).unwrap();
        let delta = eta_quotient(big, &[(1, 24)], 12).unwrap();
        let tau: Vec<i64> = delta.coefficients.iter().map(|&a| big.signed(a)).collect();
        assert_eq!(&tau[..8], &[0, 1, -24, 252, -1472, 4830, -6048, -16744]);
        let d5 = eta_quotient(f5(), &[(1, 24)], 20).unwrap();
        let t2 = hecke_t(&d5, 2, 12, &DirichletCharacter::trivial()).unwrap();
        assert_eq!(t2.coeff(1), 1);
        // Δ is an eigenform: T_2 Δ = τ(2) Δ
        assert_eq!(t2.coefficients, d5.truncate(10).scale(f5().from_i64(-24)).coefficients);
    }

    #[test]
    fn eta_products() {
        let f = eta23(f5(), 30);
        assert_eq!(f.coeff(0), 0);
        assert_eq!(f.coeff(1), 1);
        assert_eq!(f.weight, 1);
        assert_eq!(eta_quotient(f5(), &[], 5).unwrap().coefficients, vec![1, 0, 0, 0, 0, 0]);
        assert!(eta_quotient(f5(), &[(1, 1)], 5).is_err());
        // η(q)^{-1}η(q)^{25} = η^24
        let a = eta_quotient(f5(), &[(1, 25), (1, -1)], 15).unwrap();
        assert_eq!(a, eta_quotient(f5(), &[(1, 24)], 15).unwrap());
    }

    #[test]
    fn u_v_identities() {
        let r = f5();
        let q = QExpansion::from_i64(r, &[0, 1], 1, 1);
        assert_eq!(hecke_v(&q, 2).unwrap().coefficients, vec![0, 0, 1]);
        let f = eta23(r, 30);
        assert_eq!(hecke_u(&hecke_v(&f, 3).unwrap(), 3).unwrap(), f);
        let chi = f.character.clone().unwrap();
        let t3 = hecke_t(&f, 3, 1, &chi).unwrap();
        let u3 = hecke_u(&f, 3).unwrap();
        let v3 = hecke_v(&f, 3).unwrap().scale(chi.eval(3)).truncate(u3.prec());
        assert_eq!(t3, u3.add(&v3).unwrap());
    }

    #[test]
    fn theta_examples() {
        let r = f5();
        assert!(theta(&QExpansion::constant(r, 3, 5)).is_zero());
        let f = QExpansion::from_i64(r, &[0, 1, 0, 1], 1, 1);
        assert_eq!(theta(&f).coefficients, vec![0, 1, 0, 3]);
        assert_eq!(theta(&eta23(r, 10)).coeff(1), 1);
    }

    #[test]
    fn eisenstein_examples() {
        let e4 = eisenstein(4, 20, f5()).unwrap();
        assert_eq!(e4, QExpansion::constant(f5(), 1, 20).tap_weight(4));
        let f7 = CoeffRing::field(7).unwrap();
        let e6 = eisenstein(6, 20, f7).unwrap();
        assert!(e6.coefficients[1..].iter().all(|&a| a == 0));
        assert_eq!(eisenstein(4, 5, f7).unwrap().coeff(1), 240 % 7);
        let big = CoeffRing::new(691, 1).unwrap();
        assert!(matches!(eisenstein(12, 5, big), Err(Error::Rejected(_))));
        assert!(eisenstein(5, 5, f7).is_err());
        for p in [5, 7, 11, 13] {
            let e = eisenstein((p - 1) as u32, 50, CoeffRing::field(p).unwrap()).unwrap();
            assert_eq!(e.coeff(0), 1);
            assert!(e.coefficients[1..].iter().all(|&a| a == 0), "p = {p}");
        }
        let b = bernoulli_numbers(12);
        assert_eq!(b[12], BigRational::new(BigInt::from(-691), BigInt::from(2730)));
        assert!(b[12].is_negative());
    }

    impl QExpansion {
        fn tap_weight(mut self, w: i64) -> Self {
            self.weight = w;
            self
        }
    }

    #[test]
    fn hasse_multiplication() {
        let r = f5();
        let f = eta23(r, 60);
        let a = hasse_lift(r, 1, 60).unwrap();
        assert_eq!(a.weight, 4);
        assert_eq!(hasse_mult(&f, &a, 1).unwrap().coefficients, f.coefficients);
        assert_eq!(hasse_mult(&f, &QExpansion::constant(r, 1, 60), 1).unwrap().coefficients, f.coefficients);
        let chi = f.character.clone().unwrap();
        for l in [2, 3] {
            assert!(hasse_equivariant(&f, &a, l, &chi, 20).unwrap());
        }
        let bad = QExpansion::from_i64(r, &[1, 1], 0, 1);
        assert!(hasse_mult(&f, &bad, 1).is_err());
        // over Z/25 a higher power of E_4 is needed
        let r25 = CoeffRing::new(5, 2).unwrap();
        let a25 = hasse_lift(r25, 2, 20).unwrap();
        assert_eq!(a25.weight, 20);
    }

    #[test]
    fn psi_rank_doubles() {
        let r = f5();
        let f = eta23(r, 30);
        let chi = f.character.clone().unwrap();
        let rank = psi_rank(&[f.clone()], chi.eval(5), 1).unwrap();
        assert_eq!(rank.rank, 2);
        assert!(rank.injective);
        let a = hasse_lift(r, 1, 30).unwrap();
        let z = QExpansion::zero(r, 30);
        assert_eq!(psi_map(&f, &z, 1, &a, 1).unwrap().coefficients, f.coefficients);
        let only_v = psi_map(&z, &f, 4, &a, 1).unwrap();
        assert_eq!(only_v.coeff(5), 4);
        assert_eq!(only_v.coeff(1), 0);
    }

    #[test]
    fn operator_matrices() {
        let r = f5();
        let f = eta23(r, 40);
        let chi = f.character.clone().unwrap();
        let mut space = HeckeSpace::new(vec![f.clone()], chi).unwrap();
        assert_eq!(space.operator_matrix(Operator::Identity).unwrap(), Mat::identity(r, 1));
        let t2 = space.operator_matrix(Operator::T(2)).unwrap();
        assert_eq!(t2.entries, vec![f.coeff(2)]);
        assert!(matches!(space.operator_matrix(Operator::Theta), Err(Error::NotInSpan(_))));
        assert_eq!(Operator::parse("T13").unwrap(), Operator::T(13));
        assert!(Operator::parse("X2").is_err());
    }

    #[test]
    fn up_block_examples() {
        let z9 = CoeffRing::new(3, 2).unwrap();
        let t = Mat::from_rows(z9, &[vec![4]]).unwrap();
        let a = up_block_matrix(&t, 7).unwrap();
        assert_eq!(a, Mat::from_rows(z9, &[vec![4, 1], vec![-7, 0]]).unwrap());
        assert_eq!(a.charpoly().unwrap(), vec![1, z9.neg(4), 7]);
        let zero = Mat::zeros(z9, 1, 1);
        let a = up_block_matrix(&zero, 1).unwrap();
        assert_eq!(a.mul(&a).unwrap(), Mat::scalar(z9, 2, z9.neg(1)));
        let h = up_block_matrix_with(&t, 7, Normalization::Homology { x: 4 }).unwrap();
        assert_eq!(h.get(1, 0), z9.neg(28 % 9));
    }

    #[test]
    fn doubling_detector() {
        let z9 = CoeffRing::new(3, 2).unwrap();
        let zero = Mat::zeros(z9, 1, 1);
        let d = doubling_rank(&[], &zero, 1).unwrap();
        assert_eq!((d.base_len, d.extended_len, d.doubled), (2, 4, true));
        let degenerate = Mat::block_diag(&zero, &zero);
        assert!(!doubling_rank_with(&[], &zero, &degenerate).unwrap().doubled);
        // T = F_5, T_p = α + β with α = 1, β = 2 distinct: splits, still rank 2
        let f5 = CoeffRing::field(5).unwrap();
        let tp = Mat::from_rows(f5, &[vec![3]]).unwrap();
        assert!(doubling_rank(&[], &tp, 2).unwrap().doubled);
    }

    #[test]
    fn degeneracy_examples() {
        let f3 = CoeffRing::field(3).unwrap();
        let t = Mat::from_rows(f3, &[vec![0]]).unwrap();
        let d = degeneracy_composite(&t, 2, 1, 1, 2).unwrap();
        assert_eq!(d.det, 1);
        assert!(d.congruence && d.unit);
        let t = Mat::from_rows(f3, &[vec![2]]).unwrap();
        let d = degeneracy_composite(&t, 1, 1, 1, 1).unwrap();
        assert_eq!(d.det, 0);
        assert!(d.congruence && !d.unit);
        let z9 = CoeffRing::new(3, 2).unwrap();
        let t = Mat::from_rows(z9, &[vec![3]]).unwrap();
        let d = degeneracy_composite(&t, 2, 10, 1, 2).unwrap();
        assert!(d.congruence);
        assert!(degeneracy_composite(&t, 2, 3, 1, 2).is_err());
    }

    #[test]
    fn companion_examples() {
        let z9 = CoeffRing::new(3, 2).unwrap();
        let zero = Mat::zeros(z9, 1, 1);
        let u = up_block_matrix(&zero, 1).unwrap();
        assert!(companion_criterion(&[Mat::block_diag(&zero, &zero)], &u).unwrap());
        // U_p = diag(1, 2) already lies in T = diagonal matrices
        let f5 = CoeffRing::field(5).unwrap();
        let t = Mat::from_rows(f5, &[vec![1, 0], vec![0, 3]]).unwrap();
        let up = Mat::from_rows(f5, &[vec![1, 0], vec![0, 2]]).unwrap();
        assert!(!companion_criterion(&[t], &up).unwrap());
        assert!(!companion_criterion(&[], &Mat::zeros(f5, 0, 0)).unwrap());
        assert!(companion_criterion(&[], &Mat::zeros(f5, 1, 1)).is_err());
    }
}
