use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// `Z/p^M` with `p` an odd prime.  `M = 1` is the residue field.
///
/// Elements are `u64` residues in `[0, p^M)`; products go through `u128`,
/// so any modulus below `2^63` is safe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoeffRing {
    p: u64,
    m: u32,
    q: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl CoeffRing {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidRing(format!("p = {p} must be an odd prime")));
        }
        if m == 0 {
            return Err(Error::InvalidRing("M must be at least 1".into()));
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q < 1 << 63)
            .ok_or_else(|| Error::InvalidRing(format!("{p}^{m} does not fit in 63 bits")))?;
        Ok(CoeffRing { p, m, q })
    }

    pub fn field(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    /// `p^M`, the number of elements.
    pub fn modulus(&self) -> u64 {
        self.q
    }
    pub fn is_field(&self) -> bool {
        self.m == 1
    }

    /// The same prime with a different truncation.
    pub fn with_m(&self, m: u32) -> Result<Self> {
        Self::new(self.p, m)
    }
    pub fn residue_field(&self) -> Self {
        CoeffRing { p: self.p, m: 1, q: self.p }
    }

    pub fn reduce(&self, a: u64) -> u64 {
        a % self.q
    }
    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.q as i64) as u64
    }
    pub fn from_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.q as i128) as u64
    }
    /// Centered lift in `(-p^M/2, p^M/2]`, handy for display.
    pub fn signed(&self, a: u64) -> i64 {
        if a > self.q / 2 {
            a as i64 - self.q as i64
        } else {
            a as i64
        }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }
    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// p-adic valuation, with `val(0) = M`.
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.m;
        }
        let mut v = 0;
        let mut a = a;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }
    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }
    /// `p^v` as a ring element (`0` once `v >= M`).
    pub fn ppow(&self, v: u32) -> u64 {
        if v >= self.m {
            0
        } else {
            self.p.pow(v)
        }
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        // extended Euclid on (a, p^M)
        let (mut r0, mut r1) = (self.q as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let t = r0 / r1;
            (r0, r1) = (r1, r0 - t * r1);
            (s0, s1) = (s1, s0 - t * s1);
        }
        Some(self.from_i128(s0))
    }

    /// Write `a = p^v · u` with `u` a unit; `None` for `a = 0`.
    pub fn split(&self, a: u64) -> Option<(u32, u64)> {
        if a == 0 {
            return None;
        }
        let v = self.val(a);
        Some((v, a / self.p.pow(v)))
    }

    /// Exact quotient `a / p^v` as an integer in `[0, p^(M-v))`, assuming `p^v | a`.
    pub fn div_ppow(&self, a: u64, v: u32) -> u64 {
        a / self.p.pow(v)
    }

    /// Reduce a residue of this ring into a ring with smaller (or equal) `M`.
    pub fn project(&self, a: u64, target: &CoeffRing) -> u64 {
        debug_assert_eq!(self.p, target.p);
        a % target.q
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }
}

#[derive(Serialize, Deserialize)]
struct RingRepr {
    p: u64,
    #[serde(rename = "M")]
    m: u32,
}

impl Serialize for CoeffRing {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RingRepr { p: self.p, m: self.m }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoeffRing {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RingRepr::deserialize(d)?;
        CoeffRing::new(r.p, r.m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(CoeffRing::new(2, 1).is_err());
        assert!(CoeffRing::new(9, 1).is_err());
        assert!(CoeffRing::new(3, 0).is_err());
        assert!(CoeffRing::new(3, 60).is_err());
        assert_eq!(CoeffRing::new(3, 2).unwrap().modulus(), 9);
    }

    #[test]
    fn inverses_and_valuations() {
        let r = CoeffRing::new(3, 3).unwrap();
        for a in r.elements() {
            match r.inv(a) {
                Some(b) => assert_eq!(r.mul(a, b), 1),
                None => assert_eq!(a % 3, 0),
            }
        }
        assert_eq!(r.val(0), 3);
        assert_eq!(r.val(18), 2);
        assert_eq!(r.split(18), Some((2, 2)));
        assert_eq!(r.signed(26), -1);
    }

    #[test]
    fn serde_uses_capital_m() {
        let r = CoeffRing::new(5, 2).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"p":5,"M":2}"#);
        let back: CoeffRing = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<CoeffRing>(r#"{"p":4,"M":1}"#).is_err());
    }
}
