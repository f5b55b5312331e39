//! Exact truncated multivariate series with one distinguished Laurent variable.
//!
//! A [`FormalSeries`] lives over a [`Frame`] and is truncated two ways: levels
//! above `zmax` are set to zero, and monomials of degree above `degcap` (degree
//! counted in the non-distinguished variables only) are discarded. The
//! distinguished variable `q_1^1` is carried separately as an integer Laurent
//! exponent `e`, so every term is `coeff * (q_1^1)^e * monomial`.
//!
//! Truncation in degree is lossy, so every series carries `reliable`: the
//! largest degree up to which all stored coefficients are exact. Operations
//! propagate it:
//!
//! | operation                         | reliable degree of the result          |
//! |-----------------------------------|----------------------------------------|
//! | `a + b`                           | `min(Ra, Rb)`                          |
//! | `a * b`                           | `min(Ra + low(b), Rb + low(a), cap)`   |
//! | `d/dq` (ordinary variable)        | `R - 1`                                |
//! | `d/dq_1^1`                        | `R`                                    |
//! | substitution, no `q_1^1` in images| `R`                                    |
//! | substitution, `q_1^1` in images   | `R` if certified complete, else bound  |
//!
//! `low(x)` is the lowest degree at which `x` can be nonzero. Level truncation
//! is exact: it is the restriction to the subspace `q_k = 0, k > zmax`, which
//! commutes with every operation here.

mod frame;
mod monomial;
mod subst;

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use frame::Frame;
pub use monomial::{Monomial, Var, VarId};
pub use subst::{LinearImage, Substitution};

use crate::error::{Gw0Error, Result};
use crate::rational::{format_rational, int, serde_rational, Rational};

pub type TermKey = (i64, Monomial);

#[derive(Clone)]
pub struct FormalSeries {
    frame: Arc<Frame>,
    zmax: usize,
    degcap: usize,
    reliable: i64,
    terms: BTreeMap<TermKey, Rational>,
}

/// Outcome of comparing two series on their common reliable region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub equal: bool,
    /// Largest degree compared; negative when the region is empty.
    pub checked_deg: i64,
    pub first_mismatch: Option<(i64, Monomial)>,
}

pub(crate) struct Accumulator {
    map: HashMap<TermKey, Rational>,
}

impl Accumulator {
    pub(crate) fn new() -> Self {
        Accumulator { map: HashMap::new() }
    }

    pub(crate) fn add(&mut self, key: TermKey, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.map.entry(key) {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub(crate) fn add_scaled(&mut self, s: &FormalSeries, c: &Rational) {
        for (k, v) in &s.terms {
            self.add(k.clone(), v * c);
        }
    }

    pub(crate) fn finish(self) -> BTreeMap<TermKey, Rational> {
        self.map.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }
}

impl FormalSeries {
    pub fn zero(frame: Arc<Frame>, zmax: usize, degcap: usize) -> Self {
        FormalSeries { frame, zmax, degcap, reliable: degcap as i64, terms: BTreeMap::new() }
    }

    pub fn constant(frame: Arc<Frame>, zmax: usize, degcap: usize, c: Rational) -> Self {
        let mut s = Self::zero(frame, zmax, degcap);
        s.push_term(0, Monomial::one(), c);
        s
    }

    pub fn variable(frame: Arc<Frame>, zmax: usize, degcap: usize, v: Var) -> Result<Self> {
        let mut s = Self::zero(frame, zmax, degcap);
        s.check_var(v)?;
        match v {
            Var::Dist => s.push_term(1, Monomial::one(), Rational::one()),
            Var::Plain(id) => s.push_term(0, Monomial::var(id), Rational::one()),
        }
        Ok(s)
    }

    /// Builds a series from explicit terms, validating every variable.
    pub fn from_terms(
        frame: Arc<Frame>,
        zmax: usize,
        degcap: usize,
        terms: impl IntoIterator<Item = (i64, Monomial, Rational)>,
    ) -> Result<Self> {
        let mut s = Self::zero(frame, zmax, degcap);
        for (e, m, c) in terms {
            s.add_term(e, m, c)?;
        }
        Ok(s)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn frame_arc(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn zmax(&self) -> usize {
        self.zmax
    }

    pub fn degcap(&self) -> usize {
        self.degcap
    }

    pub fn reliable(&self) -> i64 {
        self.reliable
    }

    /// Declares the reliable degree; clamped to `degcap`.
    pub fn with_reliable(mut self, r: i64) -> Self {
        self.reliable = r.min(self.degcap as i64);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Monomial, &Rational)> {
        self.terms.iter().map(|((e, m), c)| (e, m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, e: i64, mono: &Monomial) -> Rational {
        self.terms.get(&(e, mono.clone())).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn same_frame(&self, other: &FormalSeries) -> bool {
        Arc::ptr_eq(&self.frame, &other.frame) || *self.frame == *other.frame
    }

    pub fn check_var(&self, v: Var) -> Result<()> {
        let (alpha, level) = (v.alpha() as usize, v.level() as usize);
        if alpha == 0 || alpha > self.dim() {
            return Err(Gw0Error::InvalidVariable(format!(
                "basis index {alpha} outside 1..={}",
                self.dim()
            )));
        }
        if level > self.zmax {
            return Err(Gw0Error::LevelOutOfRange(format!(
                "level {level} above zmax {}",
                self.zmax
            )));
        }
        Ok(())
    }

    fn check_monomial(&self, m: &Monomial) -> Result<()> {
        for (v, _) in m.factors() {
            if v.is_distinguished() {
                return Err(Gw0Error::InvalidVariable(
                    "q_1^1 may only appear through the Laurent exponent".into(),
                ));
            }
            self.check_var(Var::Plain(*v))?;
        }
        Ok(())
    }

    /// Adds a term, validating its variables. Terms above `degcap` are discarded.
    pub fn add_term(&mut self, e: i64, mono: Monomial, c: Rational) -> Result<()> {
        self.check_monomial(&mono)?;
        if mono.degree() as usize <= self.degcap {
            self.push_term(e, mono, c);
        }
        Ok(())
    }

    pub(crate) fn push_term(&mut self, e: i64, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((e, mono)) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub(crate) fn with_terms(&self, terms: BTreeMap<TermKey, Rational>, reliable: i64) -> Self {
        FormalSeries {
            frame: self.frame.clone(),
            zmax: self.zmax,
            degcap: self.degcap,
            reliable: reliable.min(self.degcap as i64),
            terms,
        }
    }

    pub(crate) fn from_parts(
        frame: Arc<Frame>,
        zmax: usize,
        degcap: usize,
        reliable: i64,
        terms: BTreeMap<TermKey, Rational>,
    ) -> Self {
        FormalSeries { frame, zmax, degcap, reliable: reliable.min(degcap as i64), terms }
    }

    /// Lowest degree at which this series can be nonzero, as far as is known.
    pub fn low_degree(&self) -> i64 {
        let stored = self.terms.keys().map(|(_, m)| m.degree() as i64).min();
        let beyond = self.reliable + 1;
        match stored {
            Some(d) => d.min(beyond),
            None => beyond,
        }
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(_, m)| m.degree()).max()
    }

    pub fn min_laurent(&self) -> Option<i64> {
        self.terms.keys().map(|(e, _)| *e).min()
    }

    /// Common value of `e + degree` over all terms, if there is one.
    pub fn weight(&self) -> Option<i64> {
        let mut w = None;
        for (e, m) in self.terms.keys() {
            let t = e + m.degree() as i64;
            match w {
                None => w = Some(t),
                Some(x) if x != t => return None,
                _ => {}
            }
        }
        w
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return self.with_terms(BTreeMap::new(), self.reliable);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        self.with_terms(terms, self.reliable)
    }

    /// Multiplies by `(q_1^1)^k`.
    pub fn shift_laurent(&self, k: i64) -> Self {
        let terms = self.terms.iter().map(|((e, m), v)| ((e + k, m.clone()), v.clone())).collect();
        self.with_terms(terms, self.reliable)
    }

    /// Drops every term of degree above `deg`.
    pub fn truncated(&self, deg: i64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|((_, m), _)| (m.degree() as i64) <= deg)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        self.with_terms(terms, self.reliable.min(deg.max(-1)))
    }

    /// Lowers the degree cap, dropping terms above it.
    pub fn with_degcap(&self, degcap: usize) -> Self {
        let mut s = self.truncated(degcap as i64);
        s.degcap = degcap.min(self.degcap);
        s
    }

    pub fn truncated_to_reliable(&self) -> Self {
        self.truncated(self.reliable)
    }

    /// Restriction to levels `<= zmax`.
    pub fn restrict_levels(&self, zmax: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|((_, m), _)| m.max_level() as usize <= zmax)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let mut s = self.with_terms(terms, self.reliable);
        s.zmax = zmax.min(self.zmax);
        s
    }

    fn combine(&self, other: &FormalSeries, sign: i64) -> FormalSeries {
        assert!(self.same_frame(other), "frame mismatch in series addition");
        let zmax = self.zmax.min(other.zmax);
        let degcap = self.degcap.min(other.degcap);
        let mut terms = self.terms.clone();
        let s = int(sign);
        for (k, v) in &other.terms {
            let add = if sign == 1 { v.clone() } else { v * &s };
            match terms.get_mut(k) {
                Some(x) => {
                    *x += add;
                }
                None => {
                    terms.insert(k.clone(), add);
                }
            }
        }
        terms.retain(|(_, m), v| {
            !v.is_zero() && m.degree() as usize <= degcap && m.max_level() as usize <= zmax
        });
        FormalSeries::from_parts(
            self.frame.clone(),
            zmax,
            degcap,
            self.reliable.min(other.reliable),
            terms,
        )
    }

    pub fn try_add(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.require_frame(other)?;
        Ok(self.combine(other, 1))
    }

    pub fn try_mul(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.require_frame(other)?;
        Ok(self.mul_impl(other))
    }

    pub fn require_frame(&self, other: &FormalSeries) -> Result<()> {
        if self.same_frame(other) {
            Ok(())
        } else {
            Err(Gw0Error::FrameMismatch(format!("{:?} vs {:?}", self.frame, other.frame)))
        }
    }

    pub fn mul(&self, other: &FormalSeries) -> FormalSeries {
        assert!(self.same_frame(other), "frame mismatch in series product");
        self.mul_impl(other)
    }

    /// Product keeping only terms of degree `<=` its reliable degree.
    pub fn mul_reliable(&self, other: &FormalSeries) -> FormalSeries {
        assert!(self.same_frame(other), "frame mismatch in series product");
        let reliable = self.product_reliable(other);
        self.mul_upto(other, reliable.max(-1))
    }

    fn product_reliable(&self, other: &FormalSeries) -> i64 {
        let degcap = self.degcap.min(other.degcap);
        (self.reliable + other.low_degree()).min(other.reliable + self.low_degree()).min(degcap as i64)
    }

    fn mul_impl(&self, other: &FormalSeries) -> FormalSeries {
        let degcap = self.degcap.min(other.degcap);
        self.mul_upto(other, degcap as i64)
    }

    fn mul_upto(&self, other: &FormalSeries, top: i64) -> FormalSeries {
        let zmax = self.zmax.min(other.zmax);
        let degcap = self.degcap.min(other.degcap);
        let reliable = self.product_reliable(other);
        if top < 0 {
            return FormalSeries::from_parts(self.frame.clone(), zmax, degcap, reliable, BTreeMap::new());
        }
        let top = top as u32;
        let mut b: Vec<(u32, &TermKey, &Rational)> =
            other.terms.iter().map(|(k, v)| (k.1.degree(), k, v)).collect();
        b.sort_by_key(|t| t.0);
        let mut acc = Accumulator::new();
        for ((ea, ma), ca) in &self.terms {
            let da = ma.degree();
            if da > top || ma.max_level() as usize > zmax {
                continue;
            }
            let room = top - da;
            for (db, (eb, mb), cb) in &b {
                if *db > room {
                    break;
                }
                if mb.max_level() as usize > zmax {
                    continue;
                }
                acc.add((ea + eb, ma.mul(mb)), ca * *cb);
            }
        }
        FormalSeries::from_parts(self.frame.clone(), zmax, degcap, reliable, acc.finish())
    }

    pub fn pow(&self, k: u32) -> FormalSeries {
        let mut out = FormalSeries::constant(self.frame.clone(), self.zmax, self.degcap, Rational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative.
    pub fn partial(&self, v: Var) -> Result<FormalSeries> {
        self.check_var(v)?;
        let mut terms = BTreeMap::new();
        match v {
            Var::Dist => {
                for ((e, m), c) in &self.terms {
                    if *e != 0 {
                        terms.insert((e - 1, m.clone()), c * int(*e));
                    }
                }
                Ok(self.with_terms(terms, self.reliable))
            }
            Var::Plain(id) => {
                for ((e, m), c) in &self.terms {
                    if let Some((k, dm)) = m.differentiate(id) {
                        let key = (*e, dm);
                        let val = c * int(k as i64);
                        // distinct source monomials give distinct derivatives
                        terms.insert(key, val);
                    }
                }
                Ok(self.with_terms(terms, self.reliable - 1))
            }
        }
    }

    /// `c_n`: the polynomial multiplying `(q_1^1)^(2-n)`, returned at Laurent exponent 0.
    pub fn laurent_component(&self, n: i64) -> FormalSeries {
        self.laurent_slice(2 - n)
    }

    /// The polynomial multiplying `(q_1^1)^e`, returned at Laurent exponent 0.
    pub fn laurent_slice(&self, e: i64) -> FormalSeries {
        let terms = self
            .terms
            .iter()
            .filter(|((te, _), _)| *te == e)
            .map(|((_, m), c)| ((0, m.clone()), c.clone()))
            .collect();
        self.with_terms(terms, self.reliable)
    }

    /// Terms of a single polynomial degree.
    pub fn degree_part(&self, d: u32) -> FormalSeries {
        let terms = self
            .terms
            .iter()
            .filter(|((_, m), _)| m.degree() == d)
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        self.with_terms(terms, self.reliable)
    }

    /// Evaluates at `q_1^1 = x0` and sets every other positive-level variable to zero.
    /// The result is a polynomial in the level-0 variables.
    pub fn evaluate_at_level_zero(&self, x0: &Rational) -> FormalSeries {
        let mut acc = Accumulator::new();
        for ((e, m), c) in &self.terms {
            if m.all_vars(|v| v.level == 0) {
                let factor = pow_int(x0, *e);
                acc.add((0, m.clone()), c * factor);
            }
        }
        self.with_terms(acc.finish(), self.reliable)
    }

    /// Compares coefficients of degree `<= min(Ra, Rb)`.
    pub fn compare_reliable(&self, other: &FormalSeries) -> Comparison {
        let region = self.reliable.min(other.reliable);
        let diff = self - other;
        let first = diff.terms.keys().find(|(_, m)| (m.degree() as i64) <= region).cloned();
        Comparison { equal: first.is_none(), checked_deg: region, first_mismatch: first }
    }

    /// True when no term of degree `<= reliable` survives.
    pub fn vanishes_on_reliable(&self) -> bool {
        self.terms.keys().all(|(_, m)| (m.degree() as i64) > self.reliable)
    }

    pub fn first_reliable_term(&self) -> Option<(i64, Monomial)> {
        self.terms.keys().find(|(_, m)| (m.degree() as i64) <= self.reliable).cloned()
    }

    pub fn raw_terms(&self) -> &BTreeMap<TermKey, Rational> {
        &self.terms
    }
}

fn pow_int(x: &Rational, e: i64) -> Rational {
    let mut r = Rational::one();
    let base = if e < 0 { x.recip() } else { x.clone() };
    for _ in 0..e.unsigned_abs() {
        r *= &base;
    }
    r
}

impl<'a> Add<&'a FormalSeries> for &'a FormalSeries {
    type Output = FormalSeries;
    fn add(self, rhs: &FormalSeries) -> FormalSeries {
        self.combine(rhs, 1)
    }
}

impl<'a> Sub<&'a FormalSeries> for &'a FormalSeries {
    type Output = FormalSeries;
    fn sub(self, rhs: &FormalSeries) -> FormalSeries {
        self.combine(rhs, -1)
    }
}

impl Neg for &FormalSeries {
    type Output = FormalSeries;
    fn neg(self) -> FormalSeries {
        self.scale(&int(-1))
    }
}

impl fmt::Debug for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalSeries[N={}, M={}, D={}, R={}] ", self.dim(), self.zmax, self.degcap, self.reliable)?;
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((e, m), c)| format!("{}*x^{}*{:?}", format_rational(c), e, m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl PartialEq for FormalSeries {
    fn eq(&self, other: &Self) -> bool {
        self.same_frame(other)
            && self.zmax == other.zmax
            && self.degcap == other.degcap
            && self.reliable == other.reliable
            && self.terms == other.terms
    }
}

// JSON wire format.

#[derive(Serialize, Deserialize)]
pub(crate) struct TermDoc {
    e: i64,
    mono: Vec<[u32; 3]>,
    #[serde(with = "serde_rational")]
    coeff: Rational,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SeriesDoc {
    pub(crate) frame: Frame,
    pub(crate) zmax: usize,
    pub(crate) degcap: usize,
    pub(crate) reliable: i64,
    pub(crate) terms: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub(crate) normalform: Option<bool>,
}

impl SeriesDoc {
    pub(crate) fn from_series(s: &FormalSeries, normalform: Option<bool>) -> Self {
        SeriesDoc {
            frame: (*s.frame).clone(),
            zmax: s.zmax,
            degcap: s.degcap,
            reliable: s.reliable,
            terms: s
                .terms
                .iter()
                .map(|((e, m), c)| TermDoc {
                    e: *e,
                    mono: m
                        .factors()
                        .iter()
                        .map(|(v, k)| [v.alpha as u32, v.level as u32, *k])
                        .collect(),
                    coeff: c.clone(),
                })
                .collect(),
            normalform,
        }
    }

    pub(crate) fn into_series(self) -> Result<FormalSeries> {
        if self.reliable > self.degcap as i64 {
            return Err(Gw0Error::Parse("reliable exceeds degcap".into()));
        }
        let mut s = FormalSeries::zero(Arc::new(self.frame), self.zmax, self.degcap);
        s.reliable = self.reliable;
        for t in self.terms {
            let mut factors = Vec::with_capacity(t.mono.len());
            for [alpha, level, k] in t.mono {
                if alpha == 1 && level == 1 {
                    return Err(Gw0Error::Parse(
                        "monomial factor [1,1,*] is forbidden; use \"e\"".into(),
                    ));
                }
                if k == 0 {
                    return Err(Gw0Error::Parse("zero exponent in monomial".into()));
                }
                let alpha = u16::try_from(alpha).map_err(|_| Gw0Error::Parse("alpha too large".into()))?;
                let level = u16::try_from(level).map_err(|_| Gw0Error::Parse("level too large".into()))?;
                factors.push((VarId::new(alpha, level), k));
            }
            let mono = Monomial::from_factors(factors);
            if mono.degree() as usize > s.degcap {
                return Err(Gw0Error::Parse("term degree exceeds degcap".into()));
            }
            if t.coeff.is_zero() {
                return Err(Gw0Error::Parse("zero coefficient stored".into()));
            }
            s.check_monomial(&mono)?;
            if s.terms.insert((t.e, mono), t.coeff).is_some() {
                return Err(Gw0Error::Parse("duplicate term".into()));
            }
        }
        Ok(s)
    }
}

impl Serialize for FormalSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesDoc::from_series(self, None).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SeriesDoc::deserialize(d)?.into_series().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests;
