//! Degree-truncated free associative algebra over `Z` or `Z/p`, and the
//! Magnus expansion of free-group words into it.
//!
//! Variables are numbered `1..=n`. A [`TruncatedSeries`] keeps only the
//! monomials of degree `<= q`; everything above is discarded on every
//! multiplication, so two series may only be combined when they live in the
//! same [`AlgebraCtx`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient ring selector: `0` for the integers, otherwise a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Modulus(u64);

impl Modulus {
    pub const INTEGERS: Modulus = Modulus(0);

    pub fn new(p: u64) -> Result<Self> {
        if p == 0 || is_prime(p) {
            Ok(Modulus(p))
        } else {
            Err(Error::InvalidModulus(p))
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_integral(self) -> bool {
        self.0 == 0
    }

    /// Canonical representative: unchanged for `p = 0`, otherwise in `[0, p)`.
    pub fn reduce(self, c: &BigInt) -> BigInt {
        if self.0 == 0 {
            c.clone()
        } else {
            c.mod_floor(&BigInt::from(self.0))
        }
    }
}

impl TryFrom<u64> for Modulus {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Modulus::new(p)
    }
}

impl From<Modulus> for u64 {
    fn from(m: Modulus) -> u64 {
        m.0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A word `X_{i1} X_{i2} ... X_{ik}` in the non-commuting variables.
/// The empty word is the unit monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<u8>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(vars: &[usize]) -> Self {
        Monomial(vars.iter().map(|&v| v as u8).collect())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![i as u8])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&v| v as usize)
    }

    fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Monomial(v)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for v in &self.0 {
            write!(f, "X{v}")?;
        }
        Ok(())
    }
}

/// Fixed `(n, q, p)` shared by every series of one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraCtx {
    pub n: usize,
    pub q: usize,
    pub p: Modulus,
    caps: Option<VarCaps>,
}

/// Upper bounds on how often each variable may occur in a kept monomial.
/// Monomials over a bound span a two-sided ideal, so dropping them is a ring
/// map and coefficients of the remaining monomials are unaffected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarCaps([u8; VarCaps::MAX_VARS]);

impl VarCaps {
    pub const MAX_VARS: usize = 32;

    fn admits(&self, m: &Monomial) -> bool {
        let mut seen = [0u8; Self::MAX_VARS];
        m.0.iter().all(|&v| {
            let i = v as usize - 1;
            seen[i] += 1;
            seen[i] <= self.0[i]
        })
    }
}

impl AlgebraCtx {
    pub fn new(n: usize, q: usize, p: Modulus) -> Result<Self> {
        if q == 0 {
            return Err(Error::ParameterMismatch("truncation degree must be >= 1".into()));
        }
        if n > u8::MAX as usize {
            return Err(Error::ParameterMismatch(format!("{n} variables is too many")));
        }
        Ok(AlgebraCtx { n, q, p, caps: None })
    }

    /// Same context keeping only monomials whose count of `X_i` is at most
    /// `caps[i - 1]`.
    pub fn with_caps(self, caps: &[usize]) -> Result<Self> {
        if caps.len() != self.n || self.n > VarCaps::MAX_VARS {
            return Err(Error::ParameterMismatch(format!(
                "{} multiplicity caps for {} variables",
                caps.len(),
                self.n
            )));
        }
        let mut c = [0u8; VarCaps::MAX_VARS];
        for (slot, &v) in c.iter_mut().zip(caps) {
            *slot = v.min(u8::MAX as usize) as u8;
        }
        Ok(AlgebraCtx { caps: Some(VarCaps(c)), ..self })
    }

    pub fn caps(&self) -> Option<VarCaps> {
        self.caps
    }

    fn keeps(&self, m: &Monomial) -> bool {
        m.degree() <= self.q && self.caps.is_none_or(|c| c.admits(m))
    }

    pub fn one(&self) -> TruncatedSeries {
        TruncatedSeries::one(*self)
    }

    /// `1 + X_i`, the expansion of the `i`-th generator.
    pub fn generator(&self, i: usize) -> TruncatedSeries {
        let mut s = self.one();
        s.add_term(Monomial::var(i), BigInt::one());
        s
    }
}

/// Element of `Z<<X_1..X_n>> / (deg > q)` (or its `Z/p` version).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ctx: AlgebraCtx,
    terms: BTreeMap<Monomial, BigInt>,
}

impl TruncatedSeries {
    pub fn zero(ctx: AlgebraCtx) -> Self {
        TruncatedSeries { ctx, terms: BTreeMap::new() }
    }

    pub fn one(ctx: AlgebraCtx) -> Self {
        let mut s = Self::zero(ctx);
        s.terms.insert(Monomial::unit(), BigInt::one());
        s
    }

    /// Builds a series from `(monomial, coefficient)` pairs, summing repeats and
    /// dropping anything above degree `q`.
    pub fn from_terms<I>(ctx: AlgebraCtx, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut s = Self::zero(ctx);
        for (m, c) in terms {
            if let Some(v) = m.vars().find(|&v| v == 0 || v > ctx.n) {
                return Err(Error::ParameterMismatch(format!(
                    "variable X{v} outside 1..={}",
                    ctx.n
                )));
            }
            s.add_term(m, c);
        }
        Ok(s)
    }

    pub fn ctx(&self) -> AlgebraCtx {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::unit()).is_some_and(|c| c.is_one())
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if !self.ctx.keeps(&m) {
            return;
        }
        let p = self.ctx.p;
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                let c = p.reduce(&c);
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let c = p.reduce(&(o.get() + c));
                if c.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = c;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ParameterMismatch(format!(
                "(n, q, p) = ({}, {}, {}) vs ({}, {}, {})",
                self.ctx.n, self.ctx.q, self.ctx.p, other.ctx.n, other.ctx.q, other.ctx.p
            )));
        }
        Ok(())
    }

    /// Coefficient of `m`; monomials longer than `q` are unknowable here.
    pub fn coefficient(&self, m: &Monomial) -> Result<BigInt> {
        if m.degree() > self.ctx.q {
            return Err(Error::TruncationExceeded { len: m.degree(), q: self.ctx.q });
        }
        if !self.ctx.keeps(m) {
            return Err(Error::ParameterMismatch(format!("{m} is outside the kept quotient")));
        }
        Ok(self.terms.get(m).cloned().unwrap_or_default())
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&Monomial::unit()).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.ctx);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Truncated concatenation product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let q = self.ctx.q;
        let mut out = Self::zero(self.ctx);
        for (ma, ca) in &self.terms {
            let room = q - ma.degree();
            for (mb, cb) in &other.terms {
                if mb.degree() <= room {
                    out.add_term(ma.concat(mb), ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// Inverse of `1 + f` as the Neumann series `1 - f + f^2 - ...` cut at degree `q`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.constant_term().is_one() {
            return Err(Error::NonInvertible);
        }
        let mut minus_f = self.neg();
        minus_f.terms.remove(&Monomial::unit());
        let mut result = Self::one(self.ctx);
        let mut power = Self::one(self.ctx);
        for _ in 0..self.ctx.q {
            power = power.mul(&minus_f)?;
            if power.is_empty() {
                break;
            }
            result = result.add(&power)?;
        }
        Ok(result)
    }

    /// Integer power; negative exponents go through [`inverse`](Self::inverse).
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut result = Self::one(self.ctx);
        for _ in 0..e.unsigned_abs() {
            result = result.mul(&base)?;
        }
        Ok(result)
    }

    /// Termwise reduction into a `Z/p` series of the same shape.
    pub fn reduce_mod(&self, p: Modulus) -> Self {
        let ctx = AlgebraCtx { p, ..self.ctx };
        let mut out = Self::zero(ctx);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Largest absolute coefficient, for diagnostics.
    pub fn max_abs_coefficient(&self) -> Option<i64> {
        self.terms.values().map(|c| c.abs().to_i64().unwrap_or(i64::MAX)).max()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut by_degree: Vec<_> = self.terms.iter().collect();
        by_degree.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then(a.0.cmp(b.0)));
        for (i, (m, c)) in by_degree.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}{m}")?;
            }
        }
        Ok(())
    }
}

/// One letter `g^{+1}` or `g^{-1}` of a free-group word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, exp: i8) -> Self {
        Letter { gen, inverse: exp < 0 }
    }

    pub fn exponent(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GroupWord {
    pub letters: Vec<Letter>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord::default()
    }

    pub fn gen(g: usize) -> Self {
        GroupWord { letters: vec![Letter::new(g, 1)] }
    }

    /// From `(generator, exponent)` pairs with exponents `+1` / `-1`.
    pub fn from_pairs(pairs: &[(usize, i8)]) -> Self {
        GroupWord { letters: pairs.iter().map(|&(g, e)| Letter::new(g, e)).collect() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        GroupWord { letters }
    }

    /// `u v u^-1 v^-1`
    pub fn commutator(u: &Self, v: &Self) -> Self {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { letters: out }
    }

    /// Rotates the word cyclically so that it starts at letter `k`.
    pub fn rotate(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(k % self.letters.len());
        }
        GroupWord { letters }
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.letters.iter().filter(|l| l.gen == g).map(|l| l.exponent() as i64).sum()
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            if l.inverse {
                write!(f, "a{}^-1 ", l.gen)?;
            } else {
                write!(f, "a{} ", l.gen)?;
            }
        }
        Ok(())
    }
}

/// Multiplies out `w` with each generator replaced by its assigned series.
pub fn magnus_expand(
    ctx: AlgebraCtx,
    w: &GroupWord,
    assign: &BTreeMap<usize, TruncatedSeries>,
) -> Result<TruncatedSeries> {
    let mut inverses: BTreeMap<usize, TruncatedSeries> = BTreeMap::new();
    let mut acc = TruncatedSeries::one(ctx);
    for l in &w.letters {
        let s = assign.get(&l.gen).ok_or(Error::MissingAssignment(l.gen))?;
        if l.inverse {
            if let std::collections::btree_map::Entry::Vacant(e) = inverses.entry(l.gen) {
                e.insert(s.inverse()?);
            }
            acc = acc.mul(&inverses[&l.gen])?;
        } else {
            acc = acc.mul(s)?;
        }
    }
    Ok(acc)
}

/// The standard assignment `a_i -> 1 + X_i` for `i = 1..=n`.
pub fn standard_assignment(ctx: AlgebraCtx) -> BTreeMap<usize, TruncatedSeries> {
    (1..=ctx.n).map(|i| (i, ctx.generator(i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize, q: usize) -> AlgebraCtx {
        AlgebraCtx::new(n, q, Modulus::INTEGERS).unwrap()
    }

    fn series(c: AlgebraCtx, terms: &[(&[usize], i64)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(c, terms.iter().map(|(m, k)| (Monomial::new(m), BigInt::from(*k))))
            .unwrap()
    }

    #[test]
    fn modulus_rejects_composites() {
        assert!(Modulus::new(0).is_ok());
        assert!(Modulus::new(7).is_ok());
        assert_eq!(Modulus::new(9), Err(Error::InvalidModulus(9)));
        assert_eq!(Modulus::new(1), Err(Error::InvalidModulus(1)));
    }

    #[test]
    fn inverse_pair_truncates_to_one() {
        let c = ctx(1, 2);
        let a = series(c, &[(&[], 1), (&[1], 1)]);
        let b = series(c, &[(&[], 1), (&[1], -1), (&[1, 1], 1)]);
        assert!(a.mul(&b).unwrap().is_one());
    }

    #[test]
    fn product_without_truncation() {
        let c = ctx(2, 3);
        let got = c.generator(1).mul(&c.generator(2)).unwrap();
        let want = series(c, &[(&[], 1), (&[1], 1), (&[2], 1), (&[1, 2], 1)]);
        assert_eq!(got, want);
    }

    #[test]
    fn unit_law() {
        let c = ctx(2, 3);
        let s = series(c, &[(&[], 2), (&[2, 1], -5), (&[1, 1, 2], 3)]);
        assert_eq!(c.one().mul(&s).unwrap(), s);
        assert_eq!(s.mul(&c.one()).unwrap(), s);
    }

    #[test]
    fn mismatched_contexts_are_rejected() {
        let a = ctx(2, 3).generator(1);
        let b = ctx(2, 2).generator(1);
        assert!(matches!(a.mul(&b), Err(Error::ParameterMismatch(_))));
        let c = AlgebraCtx::new(2, 3, Modulus::new(3).unwrap()).unwrap().generator(1);
        assert!(matches!(a.mul(&c), Err(Error::ParameterMismatch(_))));
    }

    #[test]
    fn inverse_of_generator() {
        let c = ctx(1, 3);
        let want = series(c, &[(&[], 1), (&[1], -1), (&[1, 1], 1), (&[1, 1, 1], -1)]);
        assert_eq!(c.generator(1).inverse().unwrap(), want);
        assert!(c.one().inverse().unwrap().is_one());
    }

    #[test]
    fn inverse_of_two_variable_series() {
        let c = ctx(2, 2);
        let a = series(c, &[(&[], 1), (&[1], 1), (&[2], 1)]);
        let inv = a.inverse().unwrap();
        let want = series(
            c,
            &[(&[], 1), (&[1], -1), (&[2], -1), (&[1, 1], 1), (&[1, 2], 1), (&[2, 1], 1), (&[2, 2], 1)],
        );
        assert_eq!(inv, want);
        assert!(a.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn non_invertible() {
        let c = ctx(1, 2);
        let s = series(c, &[(&[], 2), (&[1], 1)]);
        assert_eq!(s.inverse(), Err(Error::NonInvertible));
        assert_eq!(TruncatedSeries::zero(c).inverse(), Err(Error::NonInvertible));
    }

    #[test]
    fn commutator_expansion() {
        let c = ctx(2, 2);
        let w = GroupWord::from_pairs(&[(1, 1), (2, 1), (1, -1), (2, -1)]);
        let e = magnus_expand(c, &w, &standard_assignment(c)).unwrap();
        assert_eq!(e, series(c, &[(&[], 1), (&[1, 2], 1), (&[2, 1], -1)]));
        assert_eq!(e.coefficient(&Monomial::new(&[2, 1])).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn trivial_words_expand_to_one() {
        let c = ctx(2, 4);
        let a = standard_assignment(c);
        assert!(magnus_expand(c, &GroupWord::empty(), &a).unwrap().is_one());
        let w = GroupWord::from_pairs(&[(1, 1), (1, -1)]);
        assert!(magnus_expand(c, &w, &a).unwrap().is_one());
    }

    #[test]
    fn missing_assignment() {
        let c = ctx(2, 2);
        let w = GroupWord::gen(3);
        assert_eq!(magnus_expand(c, &w, &standard_assignment(c)), Err(Error::MissingAssignment(3)));
    }

    #[test]
    fn coefficient_lookup() {
        let c = ctx(2, 2);
        let s = series(c, &[(&[], 1), (&[1, 2], 3)]);
        assert_eq!(s.coefficient(&Monomial::new(&[1, 2])).unwrap(), BigInt::from(3));
        assert_eq!(c.one().coefficient(&Monomial::var(1)).unwrap(), BigInt::zero());
        assert_eq!(
            s.coefficient(&Monomial::new(&[1, 1, 1])),
            Err(Error::TruncationExceeded { len: 3, q: 2 })
        );
    }

    #[test]
    fn coefficients_reduced_mod_p() {
        let c = AlgebraCtx::new(1, 3, Modulus::new(3).unwrap()).unwrap();
        let inv = c.generator(1).inverse().unwrap();
        for (_, k) in inv.terms() {
            assert!(*k >= BigInt::zero() && *k < BigInt::from(3));
        }
        assert_eq!(inv.coefficient(&Monomial::var(1)).unwrap(), BigInt::from(2));
    }

    #[test]
    fn display_is_readable() {
        let c = ctx(2, 2);
        let s = series(c, &[(&[], 1), (&[1, 2], 1), (&[2, 1], -2)]);
        assert_eq!(s.to_string(), "1 + X1X2 - 2X2X1");
    }

    #[test]
    fn caps_drop_overfull_monomials() {
        let c = ctx(2, 4).with_caps(&[1, 1]).unwrap();
        let a = c.generator(1);
        let b = c.generator(2);
        let prod = a.mul(&b).unwrap().mul(&a).unwrap();
        assert_eq!(prod.to_string(), "1 + 2X1 + X2 + X1X2 + X2X1");
        assert!(prod.coefficient(&Monomial::new(&[1, 1])).is_err());
        assert!(ctx(2, 4).with_caps(&[1]).is_err());
    }
}
