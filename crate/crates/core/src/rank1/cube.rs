use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Gw0Error, Result};
use crate::potential::Potential;
use crate::rational::{int, rat, Rational};
use crate::series::{FormalSeries, Frame, Var};

/// `q_0 + sum_{i >= 2} alpha_i q_i`. Only nonzero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearForm {
    alphas: BTreeMap<usize, Rational>,
}

impl LinearForm {
    /// The form `q_0`.
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn new(alphas: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self> {
        let mut f = Self::default();
        for (i, a) in alphas {
            if i < 2 {
                return Err(Gw0Error::InvalidArgument(format!("linear form index {i}; indices start at 2")));
            }
            f.set(i, a);
        }
        Ok(f)
    }

    pub fn alpha(&self, i: usize) -> Rational {
        self.alphas.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub(crate) fn set(&mut self, i: usize, a: Rational) {
        if a.is_zero() {
            self.alphas.remove(&i);
        } else {
            self.alphas.insert(i, a);
        }
    }

    pub fn alphas(&self) -> &BTreeMap<usize, Rational> {
        &self.alphas
    }

    /// Largest index with a nonzero coefficient.
    pub fn support(&self) -> usize {
        self.alphas.keys().next_back().copied().unwrap_or(0)
    }

    /// The form as a series, dropping levels above `zmax`.
    pub fn to_series(&self, zmax: usize, degcap: usize) -> FormalSeries {
        let frame = Arc::new(Frame::rank_one());
        let mut s = FormalSeries::variable(frame.clone(), zmax, degcap, Var::q(1, 0)).expect("level 0");
        for (&i, a) in &self.alphas {
            if i <= zmax {
                let q = FormalSeries::variable(frame.clone(), zmax, degcap, Var::q(1, i as u16)).expect("level in range");
                s = &s + &q.scale(a);
            }
        }
        s
    }

    pub fn restrict(&self, max_index: usize) -> LinearForm {
        LinearForm { alphas: self.alphas.range(..=max_index).map(|(k, v)| (*k, v.clone())).collect() }
    }
}

impl Serialize for LinearForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Alphas<'a>(&'a BTreeMap<usize, Rational>);
        impl Serialize for Alphas<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    m.serialize_entry(&k.to_string(), &crate::rational::format_rational(v))?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(1))?;
        m.serialize_entry("alphas", &Alphas(&self.alphas))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for LinearForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            alphas: BTreeMap<String, String>,
        }
        let doc = Doc::deserialize(d)?;
        let mut f = LinearForm::default();
        for (k, v) in doc.alphas {
            let i: usize = k.parse().map_err(|_| D::Error::custom(format!("bad index {k:?}")))?;
            if i.to_string() != k || i < 2 {
                return Err(D::Error::custom(format!("bad index {k:?}")));
            }
            let a = crate::rational::parse_rational(&v).map_err(D::Error::custom)?;
            if a.is_zero() {
                return Err(D::Error::custom(format!("zero coefficient at index {k}")));
            }
            f.set(i, a);
        }
        Ok(f)
    }
}

pub(crate) fn require_rank_one(f: &Potential) -> Result<()> {
    if f.dim() != 1 {
        return Err(Gw0Error::NotRankOne(f.dim()));
    }
    Ok(())
}

/// Reads `L` from `c_3 = -L^3/6`.
///
/// String equation at the `(q_1^1)^0` stratum forces `d_0^3 c_3 = -1`, so
/// `L = -d_0^2 c_3` has unit `q_0` coefficient.
pub fn extract_cube(f: &Potential) -> Result<LinearForm> {
    require_rank_one(f)?;
    if f.reliable() < 3 {
        return Err(Gw0Error::NotACube(format!("c_3 is not reliable (reliable degree {})", f.reliable())));
    }
    let q0 = Var::q(1, 0);
    let c3 = f.c(3);
    let d2 = c3.partial(q0)?.partial(q0)?;
    let d3 = d2.partial(q0)?;
    let minus_one = FormalSeries::constant(c3.frame_arc().clone(), f.zmax(), f.degcap(), int(-1));
    if d3.raw_terms() != minus_one.raw_terms() {
        return Err(Gw0Error::NotACube("d_0^3 c_3 is not -1".into()));
    }
    let l = -&d2;
    let mut form = LinearForm::default();
    for (e, m, c) in l.terms() {
        if *e != 0 || m.degree() != 1 {
            return Err(Gw0Error::NotACube("-d_0^2 c_3 is not linear".into()));
        }
        let v = m.factors()[0].0;
        if v.level == 0 {
            debug_assert!(c.is_one());
        } else {
            form.set(v.level as usize, c.clone());
        }
    }
    let cube = l.pow(3).scale(&rat(1, 6));
    if !(&c3 + &cube).raw_terms().is_empty() {
        return Err(Gw0Error::NotACube("c_3 + L^3/6 does not vanish".into()));
    }
    if !form.alpha(2).is_zero() {
        return Err(Gw0Error::EvenCoefficient { index: 2 });
    }
    Ok(form)
}

/// Walks `beta_{s-t,t}` along the antidiagonal `s` from `beta_{s-2,2} = alpha_{s+1}`
/// using `beta_{i-1,j} + beta_{i,j-1} = alpha_i alpha_j`.
///
/// Returns `(sign, rest)` with `beta_{s-t,t} = sign * alpha_{s+1} + rest`.
pub(crate) fn antidiagonal(alpha: &impl Fn(usize) -> Rational, s: usize, t: usize) -> (i64, Rational) {
    debug_assert!(t >= 2 && s >= t + 2);
    let mut sign = 1;
    let mut rest = Rational::zero();
    for u in 2..t {
        // beta_{s-u-1,u+1} = alpha_{s-u} alpha_{u+1} - beta_{s-u,u}
        sign = -sign;
        rest = alpha(s - u) * alpha(u + 1) - rest;
    }
    (sign, rest)
}

/// `alpha_{2n}` forced by the odd coefficients below it: the symmetry
/// `beta_{n,n-1} = beta_{n-1,n}` on antidiagonal `2n - 1`.
pub fn even_from_odd(alpha: &impl Fn(usize) -> Rational, n: usize) -> Rational {
    if n <= 2 {
        return Rational::zero();
    }
    let s = 2 * n - 1;
    // beta_{n,n-1} = sign * alpha_{2n} + rest, and beta_{n-1,n} = alpha_n^2 - beta_{n,n-1}
    let (sign, rest) = antidiagonal(alpha, s, n - 1);
    let half_square = alpha(n) * alpha(n) * rat(1, 2);
    (half_square - rest) * int(sign)
}

/// Cube form extended to indices `<= 2 zmax + 1` using `c_2`.
///
/// `c_3` at levels `<= zmax` only shows `alpha_i`, `i <= zmax`; the quadratic
/// stratum `c_2 = 1/2 sum beta_ij q_i q_j` encodes the rest through the
/// antidiagonal relations.
pub fn extract_extended(f: &Potential) -> Result<LinearForm> {
    let mut form = extract_cube(f)?;
    let m = f.zmax();
    if f.reliable() < 2 || m < 2 {
        return Ok(form);
    }
    let beta = super::relations::BetaTable::from_potential(f)?;
    form.set(m + 1, beta.get(m, 0));
    for s in m + 1..=2 * m {
        let t = 2.max(s - m);
        if s < t + 2 {
            // only alpha_4 at zmax 2, which vanishes
            continue;
        }
        let known = form.clone();
        let (sign, rest) = antidiagonal(&|i| known.alpha(i), s, t);
        let b = beta.get(s - t, t);
        form.set(s + 1, (b - rest) * int(sign));
    }
    Ok(form)
}
