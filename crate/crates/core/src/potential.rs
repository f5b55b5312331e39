//! Genus-zero potentials in normal form `F = sum_n (q_1^1)^(2-n) c_n`, `deg c_n = n`.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Gw0Error, Result};
use crate::matrix::Matrix;
use crate::rank1::point_potential;
use crate::rational::Rational;
use crate::series::{FormalSeries, Frame, LinearImage, SeriesDoc, Substitution, Var, VarId};

/// A series whose every term has weight `e + degree = 2`.
///
/// The weight condition is the dilaton equation in shifted variables, so every
/// `Potential` satisfies it by construction.
#[derive(Clone, PartialEq)]
pub struct Potential {
    series: FormalSeries,
}

impl Potential {
    pub fn new(series: FormalSeries) -> Result<Self> {
        if let Some(((e, m), _)) = series.raw_terms().iter().find(|((e, m), _)| e + m.degree() as i64 != 2) {
            return Err(Gw0Error::NotNormalForm(format!(
                "term (q_1^1)^{e} {m:?} has weight {}",
                e + m.degree() as i64
            )));
        }
        Ok(Potential { series })
    }

    pub fn zero(frame: Arc<Frame>, zmax: usize, degcap: usize) -> Self {
        Potential { series: FormalSeries::zero(frame, zmax, degcap) }
    }

    pub fn series(&self) -> &FormalSeries {
        &self.series
    }

    pub fn into_series(self) -> FormalSeries {
        self.series
    }

    pub fn frame(&self) -> &Frame {
        self.series.frame()
    }

    pub fn frame_arc(&self) -> &Arc<Frame> {
        self.series.frame_arc()
    }

    pub fn dim(&self) -> usize {
        self.series.dim()
    }

    pub fn zmax(&self) -> usize {
        self.series.zmax()
    }

    pub fn degcap(&self) -> usize {
        self.series.degcap()
    }

    pub fn reliable(&self) -> i64 {
        self.series.reliable()
    }

    /// The stratum `c_n`, a homogeneous polynomial of degree `n`.
    pub fn c(&self, n: usize) -> FormalSeries {
        self.series.laurent_component(n as i64)
    }

    /// Rebuilds from strata `c_0, c_1, ...`; each must be homogeneous of degree `n`.
    pub fn from_strata(frame: Arc<Frame>, zmax: usize, degcap: usize, reliable: i64, strata: &[FormalSeries]) -> Result<Self> {
        let mut s = FormalSeries::zero(frame, zmax, degcap).with_reliable(reliable);
        for (n, c) in strata.iter().enumerate() {
            for (e, m, v) in c.terms() {
                if *e != 0 || m.degree() as usize != n {
                    return Err(Gw0Error::NotNormalForm(format!("stratum {n} has a term of degree {}", m.degree())));
                }
                s.add_term(2 - n as i64, m.clone(), v.clone())?;
            }
        }
        Potential::new(s)
    }

    pub fn with_reliable(self, r: i64) -> Self {
        Potential { series: self.series.with_reliable(r) }
    }

    /// Strata `n <= deg` only.
    pub fn truncated(&self, deg: i64) -> Self {
        Potential { series: self.series.truncated(deg) }
    }

    pub fn restrict_levels(&self, zmax: usize) -> Self {
        Potential { series: self.series.restrict_levels(zmax) }
    }

    pub fn compare(&self, other: &Potential) -> crate::series::Comparison {
        self.series.compare_reliable(&other.series)
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Potential{:?}", self.series)
    }
}

impl Serialize for Potential {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesDoc::from_series(&self.series, Some(true)).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Potential {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let doc = SeriesDoc::deserialize(d)?;
        if doc.normalform != Some(true) {
            return Err(D::Error::custom("potential documents carry \"normalform\": true"));
        }
        let s = doc.into_series().map_err(D::Error::custom)?;
        Potential::new(s).map_err(D::Error::custom)
    }
}

/// Re-expresses `f` in a new basis.
///
/// Columns of `basis` are the new basis vectors in old coordinates; the first
/// must be the unit `e_1`. Coordinates transform as `q^a = sum_b B_ab q'^b` at
/// every level and the metric as `B^T g B`.
pub fn change_frame(f: &Potential, basis: &Matrix) -> Result<Potential> {
    let n = f.dim();
    if basis.dim() != n {
        return Err(Gw0Error::FrameMismatch(format!("basis change of size {} for dimension {n}", basis.dim())));
    }
    let unit_ok = (0..n).all(|i| basis[(i, 0)] == if i == 0 { Rational::from_integer(1.into()) } else { Rational::zero() });
    if !unit_ok {
        return Err(Gw0Error::InvalidArgument("first new basis vector must be the unit".into()));
    }
    basis.try_inverse()?;
    let metric = &(&basis.transpose() * f.frame().metric()) * basis;
    let target = Arc::new(Frame::new(metric)?);
    let mut sub = Substitution::new(target, f.zmax());
    for level in 0..=f.zmax() as u16 {
        for a in 0..n {
            let mut img = LinearImage::default();
            for b in 0..n {
                img.add(Var::q(b as u16 + 1, level), &basis[(a, b)]);
            }
            sub.set(Var::q(a as u16 + 1, level), img)?;
        }
    }
    Potential::new(sub.apply(f.series())?)
}

/// Coordinates of the unit-first basis for `n` points: `phi_1 = sum e_i`, `phi_a = e_1 - e_a`.
///
/// Column `a` holds `phi_a` in idempotent coordinates.
pub fn points_basis(n: usize) -> Matrix {
    let mut p = Matrix::zeros(n);
    for i in 0..n {
        p[(i, 0)] = Rational::from_integer(1.into());
        for a in 1..n {
            let v = (i == 0) as i64 - (i == a) as i64;
            p[(i, a)] = Rational::from_integer(v.into());
        }
    }
    p
}

/// Sum of `n` point potentials, one per idempotent, written in the basis of [`points_basis`].
pub fn points_potential(n: usize, degcap: usize, zmax: usize) -> Result<Potential> {
    if n == 0 {
        return Err(Gw0Error::InvalidArgument("need at least one point".into()));
    }
    let pt = point_potential(degcap, zmax);
    let p = points_basis(n);
    let frame = Arc::new(Frame::new(&p.transpose() * &p)?);
    let mut total = FormalSeries::zero(frame.clone(), zmax, degcap);
    for i in 0..n {
        // y^i_k = sum_a P_ia q^a_k; the source is rank one, so its q^1_k is y^i_k.
        let mut sub = Substitution::new(frame.clone(), zmax);
        for level in 0..=zmax as u16 {
            let mut img = LinearImage::default();
            for a in 0..n {
                img.add(Var::q(a as u16 + 1, level), &p[(i, a)]);
            }
            sub.set(Var::q(1, level), img)?;
        }
        total = &total + &sub.apply(pt.series())?;
    }
    Potential::new(total)
}

/// All ordinary variables of a frame up to level `zmax`.
pub fn plain_variables(dim: usize, zmax: usize) -> Vec<VarId> {
    let mut out = Vec::new();
    for level in 0..=zmax as u16 {
        for alpha in 1..=dim as u16 {
            let v = VarId::new(alpha, level);
            if !v.is_distinguished() {
                out.push(v);
            }
        }
    }
    out
}

/// All variables, the distinguished one included, ordered by level then index.
pub fn all_variables(dim: usize, zmax: usize) -> Vec<Var> {
    let mut out = Vec::new();
    for level in 0..=zmax as u16 {
        for alpha in 1..=dim as u16 {
            out.push(Var::q(alpha, level));
        }
    }
    out
}
