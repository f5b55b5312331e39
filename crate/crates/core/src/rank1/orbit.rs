use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::action::act_lower;
use crate::error::{Gw0Error, Result};
use crate::loopgroup::{exp_lie, LieElement};
use crate::matrix::Matrix;
use crate::potential::Potential;
use crate::rank1::cube::{extract_cube, require_rank_one};
use crate::rank1::point_potential;
use crate::rational::{int, serde_rational, Rational};

/// Orbit coordinates `(a_3, a_5, ...)` of `exp(sum a_{2i+1} z^{-2i-1}) F^pt`.
///
/// Trailing zeros are dropped, so the point potential has no coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitCoords {
    #[serde(with = "rational_vec")]
    pub coords: Vec<Rational>,
}

mod rational_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct R(#[serde(with = "serde_rational")] Rational);

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let items: Vec<R> = v.iter().cloned().map(R).collect();
        items.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let items = Vec::<R>::deserialize(d)?;
        Ok(items.into_iter().map(|r| r.0).collect())
    }
}

impl OrbitCoords {
    pub fn new(coords: Vec<Rational>) -> Self {
        let mut c = OrbitCoords { coords };
        c.trim();
        c
    }

    fn trim(&mut self) {
        while self.coords.last().is_some_and(|x| x.is_zero()) {
            self.coords.pop();
        }
    }

    /// `a_{2k+1}`, zero past the stored length.
    pub fn get(&self, k: usize) -> Rational {
        if k == 0 {
            return Rational::zero();
        }
        self.coords.get(k - 1).cloned().unwrap_or_else(Rational::zero)
    }

    /// `sum_k a_{2k+1} z^{-2k-1}` as an element of the rank-one Lie algebra.
    pub fn to_lie(&self, zmax: usize) -> Result<LieElement> {
        let frame = std::sync::Arc::new(crate::series::Frame::rank_one());
        let mut a = LieElement::zero(frame, zmax.max(2 * self.coords.len() + 1));
        for (k, c) in self.coords.iter().enumerate() {
            a.set(2 * k + 3, Matrix::scalar(1, c.clone()))?;
        }
        Ok(a)
    }
}

/// Number of coordinates visible at level truncation `zmax`.
pub fn coordinate_depth(zmax: usize) -> usize {
    zmax.saturating_sub(1) / 2
}

/// `a_j = STRIP_SIGN * alpha_j` at each stripping stage. Acting by `exp(a z^{-j})`
/// on a form with `alpha_j` shifts it to `alpha_j - a`; see [`strip_sign_self_test`].
pub const STRIP_SIGN: i64 = -1;

/// Confirms [`STRIP_SIGN`] against the implemented action.
pub fn strip_sign_self_test() -> Result<bool> {
    let zmax = 3;
    let pt = point_potential(3, zmax);
    let a = OrbitCoords::new(vec![int(1)]).to_lie(zmax)?;
    let f = act_lower(&exp_lie(&a, 2 * zmax + 1), &pt)?;
    let alpha = extract_cube(&f)?.alpha(3);
    Ok(alpha * int(STRIP_SIGN) == int(1))
}

/// The orbit point with the given coordinates, at truncation `(degcap, zmax)`.
pub fn rank1_from_coords(a: &OrbitCoords, degcap: usize, zmax: usize) -> Result<Potential> {
    if a.coords.len() > coordinate_depth(zmax) {
        return Err(Gw0Error::InvalidArgument(format!(
            "{} coordinates given but only {} fit below zmax {zmax}",
            a.coords.len(),
            coordinate_depth(zmax)
        )));
    }
    let lie = a.to_lie(zmax)?;
    act_lower(&exp_lie(&lie, 2 * zmax + 1), &point_potential(degcap, zmax))
}

/// Reads the orbit coordinates by stripping `a_3, a_5, ...` one at a time.
///
/// At stage `k` every `alpha_i`, `i < 2k+1`, has been removed; the even one
/// just below must vanish on its own.
pub fn rank1_coords(f: &Potential) -> Result<OrbitCoords> {
    require_rank_one(f)?;
    let zmax = f.zmax();
    let order = 2 * zmax + 1;
    let mut cur = f.clone();
    let mut coords = Vec::new();
    for k in 1..=coordinate_depth(zmax) {
        let j = 2 * k + 1;
        let form = extract_cube(&cur)?;
        for i in 2..j {
            if !form.alpha(i).is_zero() {
                return Err(Gw0Error::EvenCoefficient { index: i });
            }
        }
        let alpha = form.alpha(j);
        coords.push(&alpha * int(STRIP_SIGN));
        if !alpha.is_zero() {
            let frame = cur.frame_arc().clone();
            let strip = LieElement::new(frame, j, [(j, Matrix::scalar(1, alpha))])?;
            cur = act_lower(&exp_lie(&strip, order), &cur)?;
        }
    }
    // what is left must be q_0 up to zmax; only even coefficients can remain
    let rest = extract_cube(&cur)?;
    if let Some((&i, _)) = rest.alphas().range(..=zmax).next() {
        return Err(Gw0Error::EvenCoefficient { index: i });
    }
    Ok(OrbitCoords::new(coords))
}
