//! The lower-triangular group acting on potentials, and its Lie algebra.
//!
//! `(S F)(q) = F([S^{-1}(z) q(z)]_+) + 1/2 sum_{k,l} (W_{k,l} q_k, q_l)`.
//! This is a left action: `act(S, act(T, F)) = act(S T, F)`.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Gw0Error, Result};
use crate::loopgroup::{w_matrices, GroupElement, LieElement};
use crate::matrix::Matrix;
use crate::potential::Potential;
use crate::rational::{rat, Rational};
use crate::series::{FormalSeries, Frame, LinearImage, Monomial, Substitution, Var};

/// Options for [`act_lower_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActOptions {
    /// Proceed when `S_1 != 0`. The result is then only as reliable as the
    /// substitution rules allow.
    pub allow_s1: bool,
    /// Caller asserts the input has no terms above its degree cap.
    pub certified_complete: bool,
    /// Reliable degree to report when `S_1 != 0` and the input is not certified.
    pub fallback_reliable: i64,
}

impl Default for ActOptions {
    fn default() -> Self {
        ActOptions { allow_s1: false, certified_complete: false, fallback_reliable: -1 }
    }
}

pub fn act_lower(s: &GroupElement, f: &Potential) -> Result<Potential> {
    act_lower_with(s, f, ActOptions::default())
}

pub fn act_lower_with(s: &GroupElement, f: &Potential, opts: ActOptions) -> Result<Potential> {
    if **s.frame() != *f.frame() {
        return Err(Gw0Error::FrameMismatch("group element and potential live over different frames".into()));
    }
    let zmax = f.zmax();
    let need = 2 * zmax + 1;
    if s.order() < need {
        return Err(Gw0Error::GroupOrderTooSmall { have: s.order(), need, zmax });
    }
    if s.has_s1() && !opts.allow_s1 {
        return Err(Gw0Error::NonzeroS1);
    }
    let frame = f.frame_arc().clone();
    let n = frame.dim();
    let t = s.invert();

    // q_i -> sum_{j <= zmax - i} T_j q_{i+j}
    let mut sub = Substitution::new(frame.clone(), zmax);
    if opts.certified_complete {
        sub = sub.certify_complete();
    }
    sub = sub.with_fallback_reliable(opts.fallback_reliable);
    for i in 0..=zmax {
        for a in 0..n {
            let mut img = LinearImage::default();
            for j in 0..=zmax - i {
                let tj = t.s(j);
                for b in 0..n {
                    let c = &tj[(a, b)];
                    if !c.is_zero() {
                        img.add(Var::q(b as u16 + 1, (i + j) as u16), c);
                    }
                }
            }
            sub.set(Var::q(a as u16 + 1, i as u16), img)?;
        }
    }
    let moved = sub.apply(f.series())?;

    let w = w_matrices(s, zmax)?;
    let mut quad = FormalSeries::zero(frame.clone(), zmax, f.degcap());
    for k in 0..=zmax {
        for l in 0..=zmax {
            add_pairing(&mut quad, &frame, &frame.lower(w.get(k, l)), l, k, &rat(1, 2))?;
        }
    }
    Potential::new(&moved + &quad)
}

/// Adds `c * (A q_k, q_l)`, given `gA`, i.e. `c * sum_{a,b} q_l^a (gA)_{ab} q_k^b`.
fn add_pairing(acc: &mut FormalSeries, frame: &Arc<Frame>, ga: &Matrix, l: usize, k: usize, c: &Rational) -> Result<()> {
    let n = frame.dim();
    for a in 0..n {
        for b in 0..n {
            let v = &ga[(a, b)];
            if v.is_zero() {
                continue;
            }
            let (e, mono) = quadratic_term(Var::q(a as u16 + 1, l as u16), Var::q(b as u16 + 1, k as u16));
            acc.add_term(e, mono, v * c)?;
        }
    }
    Ok(())
}

fn quadratic_term(u: Var, v: Var) -> (i64, Monomial) {
    let mut e = 0;
    let mut mono = Monomial::one();
    for x in [u, v] {
        match x {
            Var::Dist => e += 1,
            Var::Plain(id) => mono = mono.mul(&Monomial::var(id)),
        }
    }
    (e, mono)
}

/// First-order action of `a` on `f`: the derivative at `eps = 0` of `act_lower(exp(eps a), f)`.
///
/// Equals `-( sum_{l,i} (a_l q_{i+l})^b d_{b,i} F
///          + 1/2 sum_l sum_{m<l} (-1)^m (a_l q_{l-1-m}, q_m) )`.
/// For `a = Id z^{-1}` this is minus the string equation residual.
pub fn act_infinitesimal(a: &LieElement, f: &Potential) -> Result<FormalSeries> {
    if **a.frame() != *f.frame() {
        return Err(Gw0Error::FrameMismatch("Lie element and potential live over different frames".into()));
    }
    let frame = f.frame_arc().clone();
    let n = frame.dim();
    let (zmax, cap) = (f.zmax(), f.degcap());
    let mut out = FormalSeries::zero(frame.clone(), zmax, cap);
    for (&l, al) in a.coeffs() {
        for i in 0..=zmax {
            if i + l > zmax {
                break;
            }
            for b in 0..n {
                let mut lin = FormalSeries::zero(frame.clone(), zmax, cap);
                for c in 0..n {
                    let v = &al[(b, c)];
                    if !v.is_zero() {
                        let q = FormalSeries::variable(frame.clone(), zmax, cap, Var::q(c as u16 + 1, (i + l) as u16))?;
                        lin = &lin + &q.scale(v);
                    }
                }
                if lin.is_zero() {
                    continue;
                }
                let d = f.series().partial(Var::q(b as u16 + 1, i as u16))?;
                out = &out + &lin.mul(&d);
            }
        }
        let ga = frame.lower(al);
        for m in 0..l {
            let p = l - 1 - m;
            if p > zmax || m > zmax {
                continue;
            }
            let sign = if m % 2 == 0 { rat(1, 2) } else { rat(-1, 2) };
            add_pairing(&mut out, &frame, &ga, m, p, &sign)?;
        }
    }
    Ok(-&out)
}
