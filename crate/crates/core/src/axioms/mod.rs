//! Dilaton, string and topological recursion checks, plus the cone pairing identity.
//!
//! All checks work in shifted variables and compare coefficients only up to the
//! reliable degree of the series involved; every result records that degree.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Gw0Error, Result};
use crate::potential::all_variables;
use crate::rational::{int, rat};
use crate::series::{Comparison, FormalSeries, Monomial, Var, VarId};

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckResult {
    pub pass: bool,
    pub checked_deg: i64,
    /// Number of nonzero residual coefficients inside the checked region.
    pub residual_terms: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<String>,
}

impl CheckResult {
    fn from_residual(residual: &FormalSeries, region: i64) -> Self {
        let bad: Vec<_> = residual.terms().filter(|(_, m, _)| (m.degree() as i64) <= region).collect();
        CheckResult {
            pass: bad.is_empty(),
            checked_deg: region,
            residual_terms: bad.len(),
            first_mismatch: bad.first().map(|(e, m, c)| describe(**e, m, c)),
        }
    }

    fn from_comparison(c: &Comparison) -> Self {
        CheckResult {
            pass: c.equal,
            checked_deg: c.checked_deg,
            residual_terms: usize::from(!c.equal),
            first_mismatch: c.first_mismatch.as_ref().map(|(e, m)| format!("(q_1^1)^{e} {m:?}")),
        }
    }
}

fn describe(e: i64, m: &Monomial, c: &crate::rational::Rational) -> String {
    format!("{} (q_1^1)^{e} {m:?}", crate::rational::format_rational(c))
}

/// One topological recursion relation `TRR_{k,l,m}` with indices `alpha, beta, gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrrEntry {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub pass: bool,
    pub checked_deg: i64,
}

/// Combined report; absent sections were not requested.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct AxiomReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilaton: Option<CheckResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub string: Option<CheckResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trr: Vec<TrrEntry>,
    /// Reliable degree of the input.
    pub region: i64,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.dilaton.as_ref().is_none_or(|c| c.pass)
            && self.string.as_ref().is_none_or(|c| c.pass)
            && self.cone.as_ref().is_none_or(|c| c.pass)
            && self.trr.iter().all(|e| e.pass)
    }

    pub fn failing_trr(&self) -> impl Iterator<Item = &TrrEntry> {
        self.trr.iter().filter(|e| !e.pass)
    }
}

/// `sum q_i^a d_{a,i} F = 2F`, evaluated term by term through the Euler operator.
pub fn check_dilaton(f: &FormalSeries) -> CheckResult {
    let mut residual = FormalSeries::zero(f.frame_arc().clone(), f.zmax(), f.degcap());
    for (e, m, c) in f.terms() {
        let w = e + m.degree() as i64 - 2;
        if w != 0 {
            residual.push_term(*e, m.clone(), c * int(w));
        }
    }
    CheckResult::from_residual(&residual, f.reliable())
}

/// Residual `sum q_{i+1}^a d_{a,i} F + (q_0, q_0)/2`.
pub fn string_residual(f: &FormalSeries) -> Result<FormalSeries> {
    let n = f.dim();
    let (zmax, cap) = (f.zmax(), f.degcap());
    let frame = f.frame_arc().clone();
    let mut acc = FormalSeries::zero(frame.clone(), zmax, cap).with_reliable(f.reliable());
    for i in 0..zmax {
        for a in 1..=n as u16 {
            let d = f.partial(Var::q(a, i as u16))?;
            let q = FormalSeries::variable(frame.clone(), zmax, cap, Var::q(a, i as u16 + 1))?;
            acc = &acc + &q.mul(&d);
        }
    }
    let g = frame.metric();
    for a in 0..n {
        for b in 0..n {
            if !g[(a, b)].is_zero() {
                let mono = Monomial::var(VarId::new(a as u16 + 1, 0)).mul(&Monomial::var(VarId::new(b as u16 + 1, 0)));
                acc.add_term(0, mono, &g[(a, b)] * rat(1, 2))?;
            }
        }
    }
    Ok(acc)
}

pub fn check_string(f: &FormalSeries) -> Result<CheckResult> {
    let r = string_residual(f)?;
    Ok(CheckResult::from_residual(&r, r.reliable()))
}

/// `2F = sum_i (p_i, q_i)` with `p_i^a = dF/dq_i^a`, computed through derivatives and products.
pub fn cone_pairing_check(f: &FormalSeries) -> Result<CheckResult> {
    let frame = f.frame_arc().clone();
    let (zmax, cap) = (f.zmax(), f.degcap());
    let mut pairing = FormalSeries::zero(frame.clone(), zmax, cap);
    for v in all_variables(f.dim(), zmax) {
        let p = f.partial(v)?;
        let q = FormalSeries::variable(frame.clone(), zmax, cap, v)?;
        pairing = &pairing + &q.mul(&p);
    }
    let twice = f.scale(&int(2));
    Ok(CheckResult::from_comparison(&pairing.compare_reliable(&twice)))
}

fn var_index(dim: usize, alpha: usize, level: usize) -> usize {
    level * dim + alpha - 1
}

/// Derivatives of a series up to third order, each truncated to its reliable degree.
pub struct DerivativeTable {
    dim: usize,
    vars: Vec<Var>,
    d2: HashMap<(usize, usize), FormalSeries>,
    d3: HashMap<(usize, usize, usize), FormalSeries>,
}

impl DerivativeTable {
    /// Builds all second and third derivatives; independent entries are computed in parallel.
    pub fn new(f: &FormalSeries) -> Result<Self> {
        let dim = f.dim();
        let vars = all_variables(dim, f.zmax());
        let nv = vars.len();
        let base = f.truncated_to_reliable();
        let d1: Vec<FormalSeries> = vars
            .par_iter()
            .map(|v| base.partial(*v).map(|s| s.truncated_to_reliable()))
            .collect::<Result<_>>()?;
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a..nv).map(move |b| (a, b))).collect();
        let d2: HashMap<_, _> = pairs
            .par_iter()
            .map(|&(a, b)| d1[a].partial(vars[b]).map(|s| ((a, b), s.truncated_to_reliable())))
            .collect::<Result<_>>()?;
        let triples: Vec<(usize, usize, usize)> =
            pairs.iter().flat_map(|&(a, b)| (b..nv).map(move |c| (a, b, c))).collect();
        let d3: HashMap<_, _> = triples
            .par_iter()
            .map(|&(a, b, c)| d2[&(a, b)].partial(vars[c]).map(|s| ((a, b, c), s.truncated_to_reliable())))
            .collect::<Result<_>>()?;
        Ok(DerivativeTable { dim, vars, d2, d3 })
    }

    pub fn index(&self, alpha: usize, level: usize) -> usize {
        var_index(self.dim, alpha, level)
    }

    pub fn second(&self, a: usize, b: usize) -> &FormalSeries {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        &self.d2[&(x, y)]
    }

    pub fn third(&self, a: usize, b: usize, c: usize) -> &FormalSeries {
        let mut t = [a, b, c];
        t.sort_unstable();
        &self.d3[&(t[0], t[1], t[2])]
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }
}

/// `sum_mu d_{a,k} d_{mu,0} F g^{mu nu}` for every `(a, k)`, indexed `[var][nu]`.
fn raised_left(f: &FormalSeries, t: &DerivativeTable) -> Vec<Vec<FormalSeries>> {
    let n = f.dim();
    let ginv = f.frame().inverse_metric();
    (0..n * f.zmax())
        .into_par_iter()
        .map(|v| {
            (0..n)
                .map(|nu| {
                    let mut acc = FormalSeries::zero(f.frame_arc().clone(), f.zmax(), f.degcap()).with_reliable(f.degcap() as i64);
                    for mu in 0..n {
                        let g = &ginv[(mu, nu)];
                        if !g.is_zero() {
                            acc = &acc + &t.second(v, t.index(mu + 1, 0)).scale(g);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Both sides of `TRR_{k,l,m}` from a derivative table.
fn trr_sides(
    f: &FormalSeries,
    t: &DerivativeTable,
    left: &[Vec<FormalSeries>],
    (k, l, m): (usize, usize, usize),
    (alpha, beta, gamma): (usize, usize, usize),
) -> (FormalSeries, FormalSeries) {
    let lhs = t.third(t.index(alpha, k + 1), t.index(beta, l), t.index(gamma, m)).clone();
    let mut rhs = FormalSeries::zero(f.frame_arc().clone(), f.zmax(), f.degcap());
    for (nu, lf) in left[t.index(alpha, k)].iter().enumerate() {
        let right = t.third(t.index(nu + 1, 0), t.index(beta, l), t.index(gamma, m));
        rhs = &rhs + &lf.mul_reliable(right);
    }
    (lhs, rhs)
}

fn check_levels(f: &FormalSeries, k: usize, l: usize, m: usize) -> Result<()> {
    if k + 1 > f.zmax() || l > f.zmax() || m > f.zmax() {
        return Err(Gw0Error::LevelOutOfRange(format!(
            "TRR_({k},{l},{m}) needs levels up to {} but zmax is {}",
            (k + 1).max(l).max(m),
            f.zmax()
        )));
    }
    Ok(())
}

fn check_indices(f: &FormalSeries, idx: &[usize]) -> Result<()> {
    if idx.iter().any(|&a| a == 0 || a > f.dim()) {
        return Err(Gw0Error::InvalidVariable(format!("basis indices {idx:?} outside 1..={}", f.dim())));
    }
    Ok(())
}

/// `d_{a,k+1} d_{b,l} d_{c,m} F = d_{a,k} d_{mu,0} F g^{mu nu} d_{nu,0} d_{b,l} d_{c,m} F`.
pub fn check_trr(
    f: &FormalSeries,
    (k, l, m): (usize, usize, usize),
    (alpha, beta, gamma): (usize, usize, usize),
) -> Result<TrrEntry> {
    check_levels(f, k, l, m)?;
    check_indices(f, &[alpha, beta, gamma])?;
    let n = f.dim();
    let base = f.truncated_to_reliable();
    let d = |s: &FormalSeries, a: usize, lev: usize| -> Result<FormalSeries> {
        Ok(s.partial(Var::q(a as u16, lev as u16))?.truncated_to_reliable())
    };
    let bc = d(&d(&base, beta, l)?, gamma, m)?;
    let lhs = d(&bc, alpha, k + 1)?;
    let ak = d(&base, alpha, k)?;
    let ginv = f.frame().inverse_metric();
    let mut rhs = FormalSeries::zero(f.frame_arc().clone(), f.zmax(), f.degcap());
    for mu in 1..=n {
        let left = d(&ak, mu, 0)?;
        for nu in 1..=n {
            let g = &ginv[(mu - 1, nu - 1)];
            if !g.is_zero() {
                rhs = &rhs + &left.mul_reliable(&d(&bc, nu, 0)?).scale(g);
            }
        }
    }
    let c = lhs.compare_reliable(&rhs);
    Ok(TrrEntry { k, l, m, alpha, beta, gamma, pass: c.equal, checked_deg: c.checked_deg })
}

/// Every `TRR_{k,l,m}` with `k + 1, l, m <= zmax`, up to the symmetry `(beta, l) <-> (gamma, m)`.
pub fn trr_sweep(f: &FormalSeries) -> Result<Vec<TrrEntry>> {
    let table = DerivativeTable::new(f)?;
    trr_sweep_with(f, &table)
}

pub fn trr_sweep_with(f: &FormalSeries, table: &DerivativeTable) -> Result<Vec<TrrEntry>> {
    let n = f.dim();
    let zmax = f.zmax();
    let mut jobs = Vec::new();
    for k in 0..zmax {
        for alpha in 1..=n {
            for l in 0..=zmax {
                for beta in 1..=n {
                    for m in 0..=zmax {
                        for gamma in 1..=n {
                            if (l, beta) <= (m, gamma) {
                                jobs.push(((k, l, m), (alpha, beta, gamma)));
                            }
                        }
                    }
                }
            }
        }
    }
    let left = raised_left(f, table);
    Ok(jobs
        .par_iter()
        .map(|&(lev, idx)| {
            let (lhs, rhs) = trr_sides(f, table, &left, lev, idx);
            let c = lhs.compare_reliable(&rhs);
            TrrEntry {
                k: lev.0,
                l: lev.1,
                m: lev.2,
                alpha: idx.0,
                beta: idx.1,
                gamma: idx.2,
                pass: c.equal,
                checked_deg: c.checked_deg,
            }
        })
        .collect())
}

/// Which checks [`verify`] runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    pub dilaton: bool,
    pub string: bool,
    pub trr: bool,
    pub cone: bool,
}

impl Checks {
    pub const ALL: Checks = Checks { dilaton: true, string: true, trr: true, cone: true };
    pub const NONE: Checks = Checks { dilaton: false, string: false, trr: false, cone: false };
}

pub fn verify(f: &FormalSeries, checks: Checks) -> Result<AxiomReport> {
    Ok(AxiomReport {
        dilaton: checks.dilaton.then(|| check_dilaton(f)),
        string: if checks.string { Some(check_string(f)?) } else { None },
        cone: if checks.cone { Some(cone_pairing_check(f)?) } else { None },
        trr: if checks.trr { trr_sweep(f)? } else { Vec::new() },
        region: f.reliable(),
    })
}
