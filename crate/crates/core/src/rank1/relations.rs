use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Gw0Error, Result};
use crate::potential::Potential;
use crate::rank1::cube::{even_from_odd, extract_cube, require_rank_one};
use crate::rational::{int, rat, Rational};
use crate::series::{FormalSeries, Frame, Monomial, Var, VarId};

/// `c_2 = 1/2 sum_{i,j} beta_ij q_i q_j` over levels `{0, 2, ..., zmax}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaTable {
    zmax: usize,
    beta: BTreeMap<(usize, usize), Rational>,
}

impl BetaTable {
    pub fn from_potential(f: &Potential) -> Result<Self> {
        require_rank_one(f)?;
        let mut beta = BTreeMap::new();
        for (_, m, c) in f.c(2).terms() {
            let fs = m.factors();
            let (i, j, v) = match fs {
                [(a, 2)] => (a.level as usize, a.level as usize, c * int(2)),
                [(a, 1), (b, 1)] => (a.level as usize, b.level as usize, c.clone()),
                _ => return Err(Gw0Error::NotNormalForm("c_2 is not quadratic".into())),
            };
            beta.insert((i.min(j), i.max(j)), v);
        }
        Ok(BetaTable { zmax: f.zmax(), beta })
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.beta.get(&(i.min(j), i.max(j))).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn zmax(&self) -> usize {
        self.zmax
    }

    /// Changes one entry (both `beta_ij` and `beta_ji`).
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        let key = (i.min(j), i.max(j));
        if v.is_zero() {
            self.beta.remove(&key);
        } else {
            self.beta.insert(key, v);
        }
    }

    /// `1/2 sum beta_ij q_i q_j` as a series.
    pub fn to_series(&self, frame: &Arc<Frame>, degcap: usize) -> FormalSeries {
        let mut s = FormalSeries::zero(frame.clone(), self.zmax, degcap);
        for (&(i, j), v) in &self.beta {
            let mono = Monomial::from_factors([(VarId::new(1, i as u16), 1), (VarId::new(1, j as u16), 1)]);
            let c = if i == j { v * rat(1, 2) } else { v.clone() };
            s.add_term(0, mono, c).expect("valid levels");
        }
        s
    }
}

/// One named relation and whether it holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Rank1Report {
    pub relations: Vec<Relation>,
}

impl Rank1Report {
    pub fn pass(&self) -> bool {
        self.relations.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(|r| !r.pass)
    }

    fn push(&mut self, name: String, pass: bool) {
        self.relations.push(Relation { name, pass });
    }
}

pub(crate) struct Strata {
    pub frame: Arc<Frame>,
    pub zmax: usize,
    pub degcap: usize,
    pub c: Vec<FormalSeries>,
}

impl Strata {
    pub fn of(f: &Potential) -> Self {
        Strata {
            frame: f.frame_arc().clone(),
            zmax: f.zmax(),
            degcap: f.degcap(),
            c: (0..=f.degcap()).map(|n| f.c(n)).collect(),
        }
    }

    pub fn zero(&self) -> FormalSeries {
        FormalSeries::zero(self.frame.clone(), self.zmax, self.degcap)
    }

    pub fn get(&self, n: i64) -> FormalSeries {
        if n < 0 || n as usize >= self.c.len() {
            self.zero()
        } else {
            self.c[n as usize].clone()
        }
    }

    pub fn q(&self, level: usize) -> FormalSeries {
        if level > self.zmax {
            return self.zero();
        }
        FormalSeries::variable(self.frame.clone(), self.zmax, self.degcap, Var::q(1, level as u16)).expect("valid level")
    }

    pub fn d(&self, s: &FormalSeries, level: usize) -> FormalSeries {
        if level > self.zmax {
            return self.zero();
        }
        s.partial(Var::q(1, level as u16)).expect("valid level")
    }

    /// `sum_{i >= 2} q_{i+1} d_i s`.
    pub fn shift_operator(&self, s: &FormalSeries) -> FormalSeries {
        let mut acc = self.zero();
        for i in 2..self.zmax {
            acc = &acc + &self.q(i + 1).mul(&self.d(s, i));
        }
        acc
    }

    /// String equation at the `(q_1^1)^p` stratum:
    /// `d_0 c_{3-p} + (1+p) q_2 c_{1-p} + sum_{i>=2} q_{i+1} d_i c_{2-p} + 1/2 q_0^2 [p = 0]`.
    pub fn se_residual(&self, p: i64) -> FormalSeries {
        let mut r = &self.d(&self.get(3 - p), 0) + &self.q(2).mul(&self.get(1 - p)).scale(&int(1 + p));
        r = &r + &self.shift_operator(&self.get(2 - p));
        if p == 0 {
            r = &r + &self.q(0).pow(2).scale(&rat(1, 2));
        }
        r
    }

    /// `TRR_{0,1,1}` at the stratum of `c_n`:
    /// `(2-n)(1-n)(-n) c_n - sum_{n1+n2=n+3} (2-n2)(1-n2) d_0^2 c_{n1} d_0 c_{n2}`.
    pub fn trr011_residual(&self, n: i64) -> FormalSeries {
        let mut r = self.get(n).scale(&int((2 - n) * (1 - n) * (-n)));
        for n2 in 0..=n + 3 {
            let n1 = n + 3 - n2;
            let k = (2 - n2) * (1 - n2);
            if k == 0 {
                continue;
            }
            let a = self.d(&self.d(&self.get(n1), 0), 0);
            let b = self.d(&self.get(n2), 0);
            r = &r - &a.mul(&b).scale(&int(k));
        }
        r
    }
}

fn vanishes(s: &FormalSeries) -> bool {
    s.raw_terms().is_empty()
}

/// Checks the explicit rank-one consequences of the axioms stratum by stratum.
///
/// Only strata up to the reliable degree take part.
pub fn check_rank1_relations(f: &Potential) -> Result<Rank1Report> {
    require_rank_one(f)?;
    let st = Strata::of(f);
    let r = f.reliable();
    let mut rep = Rank1Report::default();

    // SE at stratum p involves c_{3-p}, c_{2-p}, c_{1-p}.
    for p in (3 - r)..=4 {
        rep.push(format!("SE({p})"), vanishes(&st.se_residual(p)));
    }
    // TRR_{0,1,1} for c_n involves strata up to n + 1.
    for n in 0..r {
        rep.push(format!("TRR011(c_{n})"), vanishes(&st.trr011_residual(n)));
    }
    if r < 3 {
        return Ok(rep);
    }

    let form = match extract_cube(f) {
        Ok(form) => {
            rep.push("cube".into(), true);
            form
        }
        Err(_) => {
            rep.push("cube".into(), false);
            return Ok(rep);
        }
    };
    let alpha = |i: usize| form.alpha(i);
    let m = f.zmax();
    let beta = BetaTable::from_potential(f)?;

    // even coefficients from odd ones, as far as c_3 shows them
    for n in 2..=m / 2 {
        rep.push(format!("even(alpha_{})", 2 * n), alpha(2 * n) == even_from_odd(&alpha, n));
    }
    // c_0 = -beta_20 / 2, c_1 = -sum_{i>=2} beta_{0,i+1} q_i, beta_00 = 0
    rep.push("beta00".into(), beta.get(0, 0).is_zero());
    if m >= 2 {
        let c0 = FormalSeries::constant(st.frame.clone(), m, f.degcap(), -beta.get(2, 0) * rat(1, 2));
        rep.push("c0".into(), vanishes(&(&st.get(0) - &c0)));
        // the q_M coefficient needs beta_{0,M+1}, which is beyond the table
        let mut c1 = st.get(1);
        for i in 2..m {
            c1 = &c1 + &st.q(i).scale(&beta.get(0, i + 1));
        }
        let top = Monomial::var(VarId::new(1, m as u16));
        rep.push("c1".into(), c1.terms().all(|(_, mono, _)| *mono == top));
    }
    // alpha_n = beta_{n-1,0}
    for n in 3..=m {
        rep.push(format!("alnbe0({n})"), alpha(n) == beta.get(n - 1, 0));
    }
    // beta_{n+1,0} = beta_{n-1,2}
    for n in 3..m {
        rep.push(format!("be0be2({n})"), beta.get(n + 1, 0) == beta.get(n - 1, 2));
    }
    // beta_{i-1,j} + beta_{i,j-1} = alpha_i alpha_j
    for i in 3..=m {
        for j in i..=m {
            rep.push(format!("bebe({i},{j})"), beta.get(i - 1, j) + beta.get(i, j - 1) == alpha(i) * alpha(j));
        }
    }
    Ok(rep)
}
