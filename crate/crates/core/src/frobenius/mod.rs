//! Small phase space restriction, structure constants and WDVV.

use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::action::act_lower;
use crate::error::{Gw0Error, Result};
use crate::loopgroup::GroupElement;
use crate::potential::Potential;
use crate::rational::{format_rational, int, parse_rational, Rational};
use crate::series::{FormalSeries, Frame, Var};

/// `Phi(t_0) = F(t_0, 0, 0, ...)`, a polynomial in the level-0 coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallPotential {
    phi: FormalSeries,
}

impl SmallPotential {
    pub fn frame(&self) -> &Arc<Frame> {
        self.phi.frame_arc()
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    /// The polynomial itself (levels `<= 0`).
    pub fn series(&self) -> &FormalSeries {
        &self.phi
    }

    /// Degree up to which `Phi` is exact.
    pub fn reliable(&self) -> i64 {
        self.phi.reliable()
    }

    fn d(&self, s: &FormalSeries, a: usize) -> FormalSeries {
        s.partial(Var::q(a as u16 + 1, 0)).expect("level-0 variable")
    }

    /// `d_a d_b d_c Phi`, indices 0-based.
    pub fn third(&self, a: usize, b: usize, c: usize) -> FormalSeries {
        self.d(&self.d(&self.d(&self.phi, a), b), c)
    }
}

/// Restricts `x` to `-1` (the dilaton shift of `t_1^1 = 0`) and every other
/// positive-level coordinate to zero.
pub fn restrict_small(f: &Potential) -> SmallPotential {
    restrict_series(f.series())
}

fn restrict_series(s: &FormalSeries) -> SmallPotential {
    let phi = s.evaluate_at_level_zero(&int(-1)).restrict_levels(0);
    SmallPotential { phi }
}

/// `A_{ab}^c`, mixed tensor at the origin of the small phase space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTensor {
    a: Vec<Vec<Vec<Rational>>>,
}

impl StructureTensor {
    pub fn from_components(a: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let n = a.len();
        if a.iter().any(|r| r.len() != n || r.iter().any(|s| s.len() != n)) {
            return Err(Gw0Error::InvalidArgument("structure tensor must be N x N x N".into()));
        }
        Ok(StructureTensor { a })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `A_{ab}^c`, indices 0-based.
    pub fn get(&self, a: usize, b: usize, c: usize) -> &Rational {
        &self.a[a][b][c]
    }

    pub fn components(&self) -> &Vec<Vec<Vec<Rational>>> {
        &self.a
    }

    /// `A_{1b}^c = delta_b^c`.
    pub fn unit_axiom(&self) -> bool {
        let n = self.dim();
        (0..n).all(|b| (0..n).all(|c| self.a[0][b][c] == if b == c { Rational::one() } else { Rational::zero() }))
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|a| (0..n).all(|b| self.a[a][b] == self.a[b][a]))
    }

    /// `(phi_a phi_b) phi_c = phi_a (phi_b phi_c)` for all basis triples.
    pub fn is_associative(&self) -> bool {
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for v in 0..n {
                        let mut left = Rational::zero();
                        let mut right = Rational::zero();
                        for m in 0..n {
                            left += &self.a[a][b][m] * &self.a[m][c][v];
                            right += &self.a[b][c][m] * &self.a[a][m][v];
                        }
                        if left != right {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

impl Serialize for StructureTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc {
            #[serde(rename = "A")]
            a: Vec<Vec<Vec<String>>>,
        }
        let a = self.a.iter().map(|r| r.iter().map(|v| v.iter().map(format_rational).collect()).collect()).collect();
        Doc { a }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructureTensor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            #[serde(rename = "A")]
            a: Vec<Vec<Vec<String>>>,
        }
        let doc = Doc::deserialize(d)?;
        let mut a = Vec::with_capacity(doc.a.len());
        for r in doc.a {
            let mut row = Vec::with_capacity(r.len());
            for v in r {
                row.push(v.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?);
            }
            a.push(row);
        }
        StructureTensor::from_components(a).map_err(D::Error::custom)
    }
}

/// `A_{ab}^c(t_0) = sum_l g^{cl} d_l d_a d_b Phi`, exact up to degree `reliable - 3`.
pub fn structure_field(f: &Potential) -> Vec<Vec<Vec<FormalSeries>>> {
    let phi = restrict_small(f);
    let n = phi.dim();
    let ginv = phi.frame().inverse_metric().clone();
    let zero = FormalSeries::zero(phi.frame().clone(), 0, f.degcap());
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let thirds: Vec<FormalSeries> = (0..n).map(|l| phi.third(l, a, b)).collect();
                    (0..n)
                        .map(|c| {
                            let mut acc = zero.clone();
                            for (l, t) in thirds.iter().enumerate() {
                                acc = &acc + &t.scale(&ginv[(c, l)]);
                            }
                            acc.truncated_to_reliable()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Structure constants at `t_0 = 0`. Fails when the unit axiom does not hold,
/// which happens only for inputs violating the string equation.
pub fn structure_constants(f: &Potential) -> Result<StructureTensor> {
    let t = structure_constants_unchecked(f)?;
    if !t.unit_axiom() {
        return Err(Gw0Error::ConstraintViolation("unit axiom A_{1b}^c = delta_b^c fails".into()));
    }
    Ok(t)
}

/// Structure constants at `t_0 = 0` without the unit check.
pub fn structure_constants_unchecked(f: &Potential) -> Result<StructureTensor> {
    if f.reliable() < 3 {
        return Err(Gw0Error::InvalidArgument(format!(
            "structure constants need reliable degree >= 3, have {}",
            f.reliable()
        )));
    }
    let field = structure_field(f);
    let a = field
        .iter()
        .map(|r| r.iter().map(|v| v.iter().map(|p| p.coeff(0, &crate::series::Monomial::one())).collect()).collect())
        .collect();
    StructureTensor::from_components(a)
}

/// WDVV verification report. Quadruples are 1-based `(a, b, c, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WdvvReport {
    pub pass: bool,
    pub checked_deg: i64,
    pub quadruples: usize,
    /// Quadruples where the two sides of WDVV differ.
    pub failing: Vec<[usize; 4]>,
    /// Quadruples where one of the TRR-derived identities for
    /// `D = d_{a,0} d_{b,1} d_{c,0} d_{d,0} F` fails.
    pub trr_path_failing: Vec<[usize; 4]>,
}

struct Contractions<'a> {
    phi: &'a SmallPotential,
    ginv: crate::matrix::Matrix,
}

impl Contractions<'_> {
    /// `sum_{e,f} X_e g^{ef} Y_f`.
    fn contract(&self, x: &[FormalSeries], y: &[FormalSeries]) -> FormalSeries {
        let n = self.phi.dim();
        let mut acc = FormalSeries::zero(self.phi.frame().clone(), 0, self.phi.phi.degcap());
        for e in 0..n {
            for f in 0..n {
                let g = &self.ginv[(e, f)];
                if !g.is_zero() {
                    acc = &acc + &x[e].mul_reliable(&y[f]).scale(g);
                }
            }
        }
        acc
    }
}

/// Checks WDVV for `Phi` on all quadruples, and independently the two
/// TRR-derived expressions for `D` whose difference is WDVV.
pub fn check_wdvv(f: &Potential) -> WdvvReport {
    let phi = restrict_small(f);
    let n = phi.dim();
    let ctx = Contractions { phi: &phi, ginv: phi.frame().inverse_metric().clone() };
    let d = |s: &FormalSeries, a: usize| phi.d(s, a);
    // d_{b,1} F restricted; later derivatives are level-0 only and commute with the restriction
    let g: Vec<FormalSeries> = (0..n)
        .map(|b| restrict_series(&f.series().partial(Var::q(b as u16 + 1, 1)).expect("level 1")).phi)
        .collect();
    let first: Vec<FormalSeries> = (0..n).map(|a| d(&phi.phi, a)).collect();
    let second: Vec<Vec<FormalSeries>> = (0..n).map(|a| (0..n).map(|b| d(&first[a], b)).collect()).collect();
    let third: Vec<Vec<Vec<FormalSeries>>> =
        (0..n).map(|a| (0..n).map(|b| (0..n).map(|c| d(&second[a][b], c)).collect()).collect()).collect();
    let fourth = |a: usize, b: usize, c: usize, e: usize| d(&third[a][b][c], e);

    let quads: Vec<[usize; 4]> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).flat_map(move |c| (0..n).map(move |dd| [a, b, c, dd]))))
        .collect();
    let results: Vec<(bool, bool, i64)> = quads
        .par_iter()
        .map(|&[a, b, c, dd]| {
            let t = |x: usize, y: usize| -> Vec<FormalSeries> { (0..n).map(|e| third[x][y][e].clone()).collect() };
            let lhs = ctx.contract(&t(a, b), &t(c, dd));
            let rhs = ctx.contract(&t(c, b), &t(a, dd));
            let cmp = lhs.compare_reliable(&rhs);

            let dval = d(&d(&d(&g[b], a), c), dd);
            let tail = {
                let x: Vec<FormalSeries> = (0..n).map(|e| second[b][e].clone()).collect();
                let y: Vec<FormalSeries> = (0..n).map(|e| fourth(e, a, c, dd)).collect();
                ctx.contract(&x, &y)
            };
            let bad = &lhs + &tail;
            let bac = &rhs + &tail;
            let trr_ok = dval.compare_reliable(&bad).equal && dval.compare_reliable(&bac).equal;
            (cmp.equal, trr_ok, cmp.checked_deg)
        })
        .collect();

    let mut rep = WdvvReport {
        pass: true,
        checked_deg: results.iter().map(|r| r.2).min().unwrap_or(-1),
        quadruples: quads.len(),
        failing: Vec::new(),
        trr_path_failing: Vec::new(),
    };
    for (q, (wdvv, trr, _)) in quads.iter().zip(results) {
        let one_based = q.map(|i| i + 1);
        if !wdvv {
            rep.failing.push(one_based);
        }
        if !trr {
            rep.trr_path_failing.push(one_based);
        }
    }
    rep.pass = rep.failing.is_empty() && rep.trr_path_failing.is_empty() && rep.checked_deg >= 0;
    rep
}

/// Structure constants before and after acting by `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub pass: bool,
    pub before: StructureTensor,
    pub after: StructureTensor,
}

/// Acting by an element with `S_1 = 0` leaves the structure constants fixed.
pub fn check_frobenius_invariance(s: &GroupElement, f: &Potential) -> Result<InvarianceReport> {
    if s.has_s1() {
        return Err(Gw0Error::NonzeroS1);
    }
    let before = structure_constants_unchecked(f)?;
    let after = structure_constants_unchecked(&act_lower(s, f)?)?;
    Ok(InvarianceReport { pass: before == after, before, after })
}
