use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::CoeffRing;
use crate::{Error, Result};

pub type Exponent = Vec<u32>;

/// Polynomial over a [`CoeffRing`] with every monomial of total degree above
/// `bound` discarded; a model of `O/p^M[[x_1..x_n]] / m^(bound+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncPoly {
    pub ring: CoeffRing,
    pub nvars: usize,
    pub bound: u32,
    #[serde(with = "term_list")]
    terms: BTreeMap<Exponent, u64>,
}

mod term_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &BTreeMap<Exponent, u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(&Exponent, &u64)> = t.iter().collect();
        v.serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Exponent, u64>, D::Error> {
        let v: Vec<(Exponent, u64)> = Vec::deserialize(d)?;
        Ok(v.into_iter().filter(|(_, c)| *c != 0).collect())
    }
}

pub fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl TruncPoly {
    pub fn zero(ring: CoeffRing, nvars: usize, bound: u32) -> Self {
        TruncPoly { ring, nvars, bound, terms: BTreeMap::new() }
    }

    pub fn constant(ring: CoeffRing, nvars: usize, bound: u32, c: u64) -> Self {
        let mut p = Self::zero(ring, nvars, bound);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(ring: CoeffRing, nvars: usize, bound: u32, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(ring, bound, e, 1)
    }

    pub fn monomial(ring: CoeffRing, bound: u32, e: Exponent, c: u64) -> Self {
        let mut p = Self::zero(ring, e.len(), bound);
        p.add_term(e, c);
        p
    }

    /// Add `c·x^e`, dropping it if it is over the bound or cancels.
    pub fn add_term(&mut self, e: Exponent, c: u64) {
        assert_eq!(e.len(), self.nvars);
        if degree(&e) > self.bound {
            return;
        }
        let r = self.ring;
        let c = r.reduce(c);
        let entry = self.terms.entry(e).or_insert(0);
        *entry = r.add(*entry, c);
        if *entry == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }
    pub fn coeff(&self, e: &[u32]) -> u64 {
        self.terms.get(e).copied().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn nterms(&self) -> usize {
        self.terms.len()
    }
    pub fn constant_term(&self) -> u64 {
        self.coeff(&vec![0; self.nvars])
    }
    /// Lowest total degree present (`None` for zero).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree(e)).min()
    }
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree(e)).max()
    }
    /// The homogeneous part of degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> TruncPoly {
        TruncPoly {
            terms: self.terms.iter().filter(|(e, _)| degree(e) == d).map(|(e, &c)| (e.clone(), c)).collect(),
            ..self.clone()
        }
    }

    fn check(&self, other: &TruncPoly) -> Result<()> {
        if self.ring != other.ring || self.nvars != other.nvars || self.bound != other.bound {
            return Err(Error::Mismatch(format!(
                "polynomials over ({:?}, {} vars, bound {}) and ({:?}, {} vars, bound {})",
                self.ring, self.nvars, self.bound, other.ring, other.nvars, other.bound
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TruncPoly {
        self.scale(self.ring.neg(1))
    }

    pub fn scale(&self, c: u64) -> TruncPoly {
        let r = self.ring;
        TruncPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, &a)| (e.clone(), r.mul(a, c)))
                .filter(|(_, a)| *a != 0)
                .collect(),
            ..self.clone()
        }
    }

    /// Product with monomials of total degree above the bound discarded.
    pub fn mul(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.check(other)?;
        let r = self.ring;
        let mut out = TruncPoly::zero(r, self.nvars, self.bound);
        for (ea, &ca) in &self.terms {
            let da = degree(ea);
            for (eb, &cb) in &other.terms {
                if da + degree(eb) > self.bound {
                    continue;
                }
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, r.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Multiply by the monomial `x^e` (times `c`).
    pub fn mul_monomial(&self, e: &[u32], c: u64) -> TruncPoly {
        let r = self.ring;
        let mut out = TruncPoly::zero(r, self.nvars, self.bound);
        for (ea, &ca) in &self.terms {
            let f: Exponent = ea.iter().zip(e).map(|(x, y)| x + y).collect();
            out.add_term(f, r.mul(ca, c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> TruncPoly {
        let mut acc = TruncPoly::constant(self.ring, self.nvars, self.bound, 1);
        for _ in 0..k {
            acc = acc.mul(self).expect("same parameters");
        }
        acc
    }

    /// Same polynomial viewed with a different truncation bound.
    pub fn with_bound(&self, bound: u32) -> TruncPoly {
        let mut out = TruncPoly::zero(self.ring, self.nvars, bound);
        for (e, c) in self.terms() {
            out.add_term(e.clone(), c);
        }
        out
    }

    /// Rename/embed variables: variable `i` of `self` becomes variable `map[i]`
    /// of a ring with `nvars` variables.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> TruncPoly {
        let mut out = TruncPoly::zero(self.ring, nvars, self.bound);
        for (e, c) in self.terms() {
            let mut f = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            out.add_term(f, c);
        }
        out
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| degree(a).cmp(&degree(b)).then(b.cmp(a)));
        for (e, &c) in ordered {
            let c = self.ring.signed(c);
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                .collect();
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            if s.is_empty() {
                if sign == "-" {
                    s.push('-');
                }
            } else {
                let _ = write!(s, " {sign} ");
            }
            match (mag, mono.is_empty()) {
                (m, true) => {
                    let _ = write!(s, "{m}");
                }
                (1, false) => s.push_str(&mono.join("*")),
                (m, false) => {
                    let _ = write!(s, "{m}*{}", mono.join("*"));
                }
            }
        }
        s
    }

    /// Parse an infix expression such as `phi1 + phi4 + phi1*phi4 - phi2*phi3`.
    /// Supports `+ - * ^`, parentheses, integer literals and the given names.
    pub fn parse(ring: CoeffRing, vars: &[String], bound: u32, src: &str) -> Result<TruncPoly> {
        let tokens = tokenize(src)?;
        let mut p = Parser { ring, vars, bound, tokens, pos: 0 };
        let out = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("unexpected {:?} in {src:?}", p.tokens[p.pos])));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u128),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| Error::Parse(format!("integer {s} too large")))?));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {ch:?} in {src:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: CoeffRing,
    vars: &'a [String],
    bound: u32,
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }
    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<TruncPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<TruncPoly> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<TruncPoly> {
        if self.eat('-') {
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Tok::Num(k)) => {
                    self.pos += 1;
                    let k = u32::try_from(k).map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(base.pow(k))
                }
                other => Err(Error::Parse(format!("expected exponent, found {other:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<TruncPoly> {
        let n = self.vars.len();
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::Num(k)) => {
                self.pos += 1;
                let c = (k % self.ring.modulus() as u128) as u64;
                Ok(TruncPoly::constant(self.ring, n, self.bound, c))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name}")))?;
                Ok(TruncPoly::var(self.ring, n, self.bound, i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}
