//! `End(H)`-valued series in `z`, the lower-triangular group and its Lie algebra.
//!
//! Matrices act on coordinate columns. The adjoint is taken with respect to the
//! frame metric: `(Ax, y) = (x, A* y)`, `A* = g^{-1} A^T g`.
//!
//! A [`GroupElement`] is known up to `z^{-order}`. Acting on a potential with
//! levels up to `M` needs `order >= 2M + 1`, because the quadratic term reads
//! `S_{k+l+1}` for `k, l <= M`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Gw0Error, Result};
use crate::matrix::Matrix;
use crate::rational::{int, rat, Rational};
use crate::series::Frame;

/// A truncated Laurent series `sum_i M_i z^i` with matrix coefficients.
///
/// Negative powers are kept down to `z^{-order}`; positive powers are unbounded
/// but finite in number.
#[derive(Clone, PartialEq, Eq)]
pub struct EndSeries {
    frame: Arc<Frame>,
    order: usize,
    coeffs: BTreeMap<i64, Matrix>,
}

impl EndSeries {
    pub fn zero(frame: Arc<Frame>, order: usize) -> Self {
        EndSeries { frame, order, coeffs: BTreeMap::new() }
    }

    pub fn identity(frame: Arc<Frame>, order: usize) -> Self {
        let n = frame.dim();
        let mut s = Self::zero(frame, order);
        s.set(0, Matrix::identity(n));
        s
    }

    pub fn from_coeffs(
        frame: Arc<Frame>,
        order: usize,
        coeffs: impl IntoIterator<Item = (i64, Matrix)>,
    ) -> Result<Self> {
        let mut s = Self::zero(frame, order);
        for (p, m) in coeffs {
            if m.dim() != s.frame.dim() {
                return Err(Gw0Error::FrameMismatch(format!(
                    "coefficient of z^{p} has dimension {}, frame has {}",
                    m.dim(),
                    s.frame.dim()
                )));
            }
            s.set(p, m);
        }
        Ok(s)
    }

    fn set(&mut self, power: i64, m: Matrix) {
        if power < -(self.order as i64) || m.is_zero() {
            self.coeffs.remove(&power);
        } else {
            self.coeffs.insert(power, m);
        }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, power: i64) -> Matrix {
        self.coeffs.get(&power).cloned().unwrap_or_else(|| Matrix::zeros(self.frame.dim()))
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Matrix> {
        &self.coeffs
    }

    /// Highest positive power with a nonzero coefficient.
    pub fn top_positive_power(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied().filter(|p| *p > 0)
    }

    /// Truncated product; the result has the smaller order.
    pub fn mul(&self, other: &EndSeries) -> EndSeries {
        let order = self.order.min(other.order);
        let mut out = EndSeries::zero(self.frame.clone(), order);
        let low = -(order as i64);
        let mut acc: BTreeMap<i64, Matrix> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let p = i + j;
                if p < low {
                    continue;
                }
                let prod = a * b;
                match acc.get_mut(&p) {
                    Some(m) => *m = &*m + &prod,
                    None => {
                        acc.insert(p, prod);
                    }
                }
            }
        }
        for (p, m) in acc {
            out.set(p, m);
        }
        out
    }

    pub fn add(&self, other: &EndSeries) -> EndSeries {
        let order = self.order.min(other.order);
        let mut out = EndSeries::zero(self.frame.clone(), order);
        let mut acc = self.coeffs.clone();
        for (p, m) in &other.coeffs {
            let sum = match acc.get(p) {
                Some(x) => x + m,
                None => m.clone(),
            };
            acc.insert(*p, sum);
        }
        for (p, m) in acc {
            out.set(p, m);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> EndSeries {
        let mut out = EndSeries::zero(self.frame.clone(), self.order);
        for (p, m) in &self.coeffs {
            out.set(*p, m.scale(c));
        }
        out
    }

    /// `M*(-z)`: coefficient of `z^i` becomes `(-1)^i M_i*`.
    pub fn adjoint_reflected(&self) -> EndSeries {
        let mut out = EndSeries::zero(self.frame.clone(), self.order);
        for (p, m) in &self.coeffs {
            let a = self.frame.adjoint(m);
            out.set(*p, if p % 2 == 0 { a } else { -&a });
        }
        out
    }
}

impl fmt::Debug for EndSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EndSeries").field("order", &self.order).field("coeffs", &self.coeffs).finish()
    }
}

/// Result of [`check_symplectic`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SymplecticReport {
    pub pass: bool,
    /// Set when the series has positive powers, which no element of the lower-triangular group has.
    pub positive_power: Option<i64>,
    /// Whether `M*(-z) M(z) = Id` holds on the checkable range.
    pub identity_holds: bool,
    pub first_offending_power: Option<i64>,
    /// Lowest power of `z` at which the product was compared.
    pub checked_down_to: i64,
}

/// Checks `M*(-z) M(z) = Id` and membership in the lower-triangular group.
///
/// With top positive power `P`, the product is exact at powers `>= P - order`.
pub fn check_symplectic(m: &EndSeries) -> SymplecticReport {
    let positive = m.top_positive_power();
    let top = positive.unwrap_or(0);
    let low = top - m.order as i64;
    let prod = m.adjoint_reflected().mul(m);
    let n = m.frame.dim();
    let id = Matrix::identity(n);
    let mut first = None;
    let high = 2 * top;
    for p in (low..=high).rev() {
        let c = prod.coeff(p);
        let ok = if p == 0 { c == id } else { c.is_zero() };
        if !ok {
            first = Some(p);
            break;
        }
    }
    SymplecticReport {
        pass: positive.is_none() && first.is_none(),
        positive_power: positive,
        identity_holds: first.is_none(),
        first_offending_power: first,
        checked_down_to: low,
    }
}

/// `S(z) = Id + sum_{i=1}^{order} S_i z^{-i}` satisfying `S*(-z) S(z) = Id`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElement {
    series: EndSeries,
}

impl GroupElement {
    pub fn identity(frame: Arc<Frame>, order: usize) -> Self {
        GroupElement { series: EndSeries::identity(frame, order) }
    }

    /// Validates shape and the symplectic condition.
    pub fn new(frame: Arc<Frame>, order: usize, powers: impl IntoIterator<Item = (usize, Matrix)>) -> Result<Self> {
        let n = frame.dim();
        let mut coeffs = vec![(0, Matrix::identity(n))];
        for (i, m) in powers {
            if i == 0 {
                return Err(Gw0Error::InvalidArgument("group elements have no explicit z^0 term".into()));
            }
            if i > order {
                return Err(Gw0Error::InvalidArgument(format!("power z^-{i} beyond order {order}")));
            }
            coeffs.push((-(i as i64), m));
        }
        let series = EndSeries::from_coeffs(frame, order, coeffs)?;
        Self::from_series(series)
    }

    pub fn from_series(series: EndSeries) -> Result<Self> {
        let report = check_symplectic(&series);
        if series.coeff(0) != Matrix::identity(series.frame.dim()) {
            return Err(Gw0Error::NotSymplectic("constant term is not the identity".into()));
        }
        if let Some(p) = report.positive_power {
            return Err(Gw0Error::NotSymplectic(format!("positive power z^{p} present")));
        }
        if let Some(p) = report.first_offending_power {
            return Err(Gw0Error::NotSymplectic(format!("S*(-z)S(z) differs from Id at z^{p}")));
        }
        Ok(GroupElement { series })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.series.frame
    }

    pub fn order(&self) -> usize {
        self.series.order
    }

    pub fn series(&self) -> &EndSeries {
        &self.series
    }

    /// `S_i`, the coefficient of `z^{-i}`; zero above the order.
    pub fn s(&self, i: usize) -> Matrix {
        self.series.coeff(-(i as i64))
    }

    pub fn has_s1(&self) -> bool {
        !self.s(1).is_zero()
    }

    /// Truncated product `self * other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.frame() != other.frame() {
            return Err(Gw0Error::FrameMismatch("group elements over different frames".into()));
        }
        Ok(GroupElement { series: self.series.mul(&other.series) })
    }

    /// Inverse by `T_k = -sum_{j=1}^k S_j T_{k-j}`.
    pub fn invert(&self) -> GroupElement {
        let n = self.frame().dim();
        let order = self.order();
        let mut t: Vec<Matrix> = vec![Matrix::identity(n)];
        for k in 1..=order {
            let mut acc = Matrix::zeros(n);
            for j in 1..=k {
                let sj = self.s(j);
                if !sj.is_zero() {
                    acc = &acc - &(&sj * &t[k - j]);
                }
            }
            t.push(acc);
        }
        let mut series = EndSeries::zero(self.frame().clone(), order);
        for (k, m) in t.into_iter().enumerate() {
            series.set(-(k as i64), m);
        }
        GroupElement { series }
    }

    /// Lower the order, dropping higher coefficients.
    pub fn truncated(&self, order: usize) -> GroupElement {
        let mut series = EndSeries::zero(self.frame().clone(), order.min(self.order()));
        for (p, m) in &self.series.coeffs {
            series.set(*p, m.clone());
        }
        GroupElement { series }
    }

    pub(crate) fn powers(&self) -> impl Iterator<Item = (usize, &Matrix)> {
        self.series.coeffs.iter().filter(|(p, _)| **p < 0).map(|(p, m)| ((-p) as usize, m))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement{:?}", self.series)
    }
}

/// `a(z) = sum_i a_i z^{-i}` with `a_i* = (-1)^{i+1} a_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct LieElement {
    frame: Arc<Frame>,
    zmax: usize,
    coeffs: BTreeMap<usize, Matrix>,
}

impl LieElement {
    pub fn zero(frame: Arc<Frame>, zmax: usize) -> Self {
        LieElement { frame, zmax, coeffs: BTreeMap::new() }
    }

    pub fn new(frame: Arc<Frame>, zmax: usize, coeffs: impl IntoIterator<Item = (usize, Matrix)>) -> Result<Self> {
        let mut a = Self::zero(frame, zmax);
        for (i, m) in coeffs {
            a.set(i, m)?;
        }
        Ok(a)
    }

    /// Sets `a_i`, checking the adjoint condition.
    pub fn set(&mut self, i: usize, m: Matrix) -> Result<()> {
        if i == 0 || i > self.zmax {
            return Err(Gw0Error::LieInvariant { power: i, reason: format!("power outside 1..={}", self.zmax) });
        }
        if m.dim() != self.frame.dim() {
            return Err(Gw0Error::FrameMismatch(format!("matrix of dimension {} for frame of dimension {}", m.dim(), self.frame.dim())));
        }
        let adj = self.frame.adjoint(&m);
        let want = if i % 2 == 1 { m.clone() } else { -&m };
        if adj != want {
            let kind = if i % 2 == 1 { "self-adjoint" } else { "skew-adjoint" };
            return Err(Gw0Error::LieInvariant { power: i, reason: format!("coefficient must be {kind}") });
        }
        if m.is_zero() {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, m);
        }
        Ok(())
    }

    /// `(X + (-1)^{i+1} X*) / 2`, the projection of an arbitrary matrix onto the allowed coefficients at `z^{-i}`.
    pub fn project(frame: &Frame, i: usize, x: &Matrix) -> Matrix {
        let adj = frame.adjoint(x);
        let sum = if i % 2 == 1 { x + &adj } else { x - &adj };
        sum.scale(&rat(1, 2))
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn zmax(&self) -> usize {
        self.zmax
    }

    pub fn coeff(&self, i: usize) -> Matrix {
        self.coeffs.get(&i).cloned().unwrap_or_else(|| Matrix::zeros(self.frame.dim()))
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Matrix> {
        &self.coeffs
    }

    pub fn scale(&self, c: &Rational) -> LieElement {
        let mut out = Self::zero(self.frame.clone(), self.zmax);
        for (i, m) in &self.coeffs {
            let s = m.scale(c);
            if !s.is_zero() {
                out.coeffs.insert(*i, s);
            }
        }
        out
    }

    pub fn neg(&self) -> LieElement {
        self.scale(&int(-1))
    }

    pub fn to_series(&self, order: usize) -> EndSeries {
        let mut s = EndSeries::zero(self.frame.clone(), order);
        for (i, m) in &self.coeffs {
            s.set(-(*i as i64), m.clone());
        }
        s
    }
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieElement").field("zmax", &self.zmax).field("coeffs", &self.coeffs).finish()
    }
}

/// `exp(a)` up to `z^{-order}`.
pub fn exp_lie(a: &LieElement, order: usize) -> GroupElement {
    let gen = a.to_series(order);
    let mut total = EndSeries::identity(a.frame.clone(), order);
    let mut term = EndSeries::identity(a.frame.clone(), order);
    for k in 1..=order {
        term = term.mul(&gen).scale(&rat(1, k as i64));
        if term.coeffs.is_empty() {
            break;
        }
        total = total.add(&term);
    }
    GroupElement { series: total }
}

/// Operators `W_{k,l}`, `0 <= k, l <= kmax`, of the quadratic form of the action.
#[derive(Clone, PartialEq, Eq)]
pub struct WMatrixFamily {
    frame: Arc<Frame>,
    kmax: usize,
    w: Vec<Vec<Matrix>>,
}

impl WMatrixFamily {
    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn get(&self, k: usize, l: usize) -> &Matrix {
        &self.w[k][l]
    }

    /// `(W_{k,l})* = W_{l,k}` for every pair, returning the first failure.
    pub fn check_adjoint_symmetry(&self) -> Option<(usize, usize)> {
        for k in 0..=self.kmax {
            for l in 0..=self.kmax {
                if self.frame.adjoint(&self.w[k][l]) != self.w[l][k] {
                    return Some((k, l));
                }
            }
        }
        None
    }
}

impl fmt::Debug for WMatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WMatrixFamily").field("kmax", &self.kmax).field("w", &self.w).finish()
    }
}

/// Solves `sum_{m=0}^k W_{m,l} S_{k-m} = (-1)^{l+1} S_{k+l+1}` for `k, l <= kmax`.
///
/// Needs `S` known to order `2 kmax + 1`.
pub fn w_matrices(s: &GroupElement, kmax: usize) -> Result<WMatrixFamily> {
    let need = 2 * kmax + 1;
    if s.order() < need {
        return Err(Gw0Error::GroupOrderTooSmall { have: s.order(), need, zmax: kmax });
    }
    let n = s.frame().dim();
    let mut w = vec![vec![Matrix::zeros(n); kmax + 1]; kmax + 1];
    for l in 0..=kmax {
        for k in 0..=kmax {
            let top = s.s(k + l + 1);
            let mut acc = if l % 2 == 1 { top } else { -&top };
            for m in 0..k {
                let sk = s.s(k - m);
                if !sk.is_zero() {
                    acc = &acc - &(&w[m][l] * &sk);
                }
            }
            w[k][l] = acc;
        }
    }
    Ok(WMatrixFamily { frame: s.frame().clone(), kmax, w })
}

// JSON: {"frame": ..., "zmax": order, "powers": {"1": [[...]], ...}} in numeric key order.

struct PowerMap<'a>(&'a [(usize, &'a Matrix)]);

impl Serialize for PowerMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (i, m) in self.0 {
            map.serialize_entry(&i.to_string(), m)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct PowersDocOut<'a> {
    frame: &'a Frame,
    zmax: usize,
    powers: PowerMap<'a>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PowersDocIn {
    frame: Frame,
    zmax: usize,
    powers: BTreeMap<String, Matrix>,
}

type ParsedPowers = (Arc<Frame>, usize, Vec<(usize, Matrix)>);

impl PowersDocIn {
    fn parse_powers<E: serde::de::Error>(self) -> std::result::Result<ParsedPowers, E> {
        let mut out = Vec::new();
        for (k, m) in self.powers {
            let i: usize = k.parse().map_err(|_| E::custom(format!("power key {k:?} is not a non-negative integer")))?;
            if i.to_string() != k {
                return Err(E::custom(format!("power key {k:?} is not canonical")));
            }
            if m.is_zero() {
                return Err(E::custom(format!("power {k} has a zero matrix")));
            }
            out.push((i, m));
        }
        out.sort_by_key(|p| p.0);
        Ok((Arc::new(self.frame), self.zmax, out))
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let powers: Vec<_> = self.powers().collect();
        PowersDocOut { frame: self.frame(), zmax: self.order(), powers: PowerMap(&powers) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (frame, order, powers) = PowersDocIn::deserialize(d)?.parse_powers()?;
        GroupElement::new(frame, order, powers).map_err(D::Error::custom)
    }
}

impl Serialize for LieElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let powers: Vec<_> = self.coeffs.iter().map(|(i, m)| (*i, m)).collect();
        PowersDocOut { frame: &self.frame, zmax: self.zmax, powers: PowerMap(&powers) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (frame, zmax, powers) = PowersDocIn::deserialize(d)?.parse_powers()?;
        LieElement::new(frame, zmax, powers).map_err(D::Error::custom)
    }
}

#[derive(Serialize)]
struct WDocOut<'a> {
    frame: &'a Frame,
    kmax: usize,
    #[serde(rename = "W")]
    w: &'a Vec<Vec<Matrix>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WDocIn {
    frame: Frame,
    kmax: usize,
    #[serde(rename = "W")]
    w: Vec<Vec<Matrix>>,
}

impl Serialize for WMatrixFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WDocOut { frame: &self.frame, kmax: self.kmax, w: &self.w }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WMatrixFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = WDocIn::deserialize(d)?;
        let n = doc.frame.dim();
        let ok = doc.w.len() == doc.kmax + 1
            && doc.w.iter().all(|row| row.len() == doc.kmax + 1 && row.iter().all(|m| m.dim() == n));
        if !ok {
            return Err(D::Error::custom("W table shape does not match kmax and frame"));
        }
        Ok(WMatrixFamily { frame: Arc::new(doc.frame), kmax: doc.kmax, w: doc.w })
    }
}

/// Scalar helper for rank-one frames: `c * Id`.
pub fn scalar(frame: &Frame, c: Rational) -> Matrix {
    Matrix::scalar(frame.dim(), c)
}
