//! Oracles and random inputs shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use gw0::action::act_lower;
use gw0::loopgroup::{exp_lie, GroupElement, LieElement};
use gw0::matrix::Matrix;
use gw0::potential::Potential;
use gw0::rational::{int, rat, Rational};
use gw0::series::{FormalSeries, Frame};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(r: &mut impl Rng) -> Rational {
    rat(r.random_range(-3..=3), r.random_range(1..=3))
}

pub fn nonzero_rational(r: &mut impl Rng) -> Rational {
    loop {
        let x = small_rational(r);
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn random_matrix(r: &mut impl Rng, n: usize) -> Matrix {
    let rows = (0..n).map(|_| (0..n).map(|_| small_rational(r)).collect()).collect();
    Matrix::from_rows(rows).unwrap()
}

pub fn random_lie(r: &mut impl Rng, frame: &Arc<Frame>, from: usize, to: usize) -> LieElement {
    let mut a = LieElement::zero(frame.clone(), to);
    for i in from..=to {
        if r.random_bool(0.6) {
            let x = random_matrix(r, frame.dim());
            a.set(i, LieElement::project(frame, i, &x)).unwrap();
        }
    }
    a
}

pub fn rank_one() -> Arc<Frame> {
    Arc::new(Frame::rank_one())
}

pub fn diag_frame() -> Arc<Frame> {
    Arc::new(Frame::new(Matrix::from_rows(vec![vec![int(2), int(0)], vec![int(0), rat(1, 2)]]).unwrap()).unwrap())
}

pub fn hyperbolic_frame() -> Arc<Frame> {
    Arc::new(Frame::new(Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap()).unwrap())
}

/// `<tau_{k_1} ... tau_{k_n}>` by the string equation alone, no memo, no closed form.
pub fn psi_by_string(k: &[u32]) -> Rational {
    let n = k.len();
    if n < 3 || k.iter().map(|&x| x as usize).sum::<usize>() != n - 3 {
        return Rational::zero();
    }
    if n == 3 {
        return Rational::one();
    }
    let Some(z) = k.iter().position(|&x| x == 0) else {
        return Rational::zero();
    };
    let rest: Vec<u32> = k.iter().enumerate().filter(|&(i, _)| i != z).map(|(_, &x)| x).collect();
    let mut acc = Rational::zero();
    for j in 0..rest.len() {
        if rest[j] > 0 {
            let mut v = rest.clone();
            v[j] -= 1;
            acc += psi_by_string(&v);
        }
    }
    acc
}

/// Coefficients of `(T*(w) T(z) - Id)/(z + w)` at `z^{-k-1} w^{-l-1}`, `T = S^{-1}`,
/// by long division of the bivariate numerator.
pub fn bivariate_w(s: &GroupElement, kmax: usize) -> Vec<Vec<Matrix>> {
    let fr = s.frame().clone();
    let n = fr.dim();
    let t = s.invert();
    let num = |a: usize, b: usize| -> Matrix {
        let m = &fr.adjoint(&t.s(b)) * &t.s(a);
        if a == 0 && b == 0 {
            &m - &Matrix::identity(n)
        } else {
            m
        }
    };
    let mut q: BTreeMap<(usize, usize), Matrix> = BTreeMap::new();
    for d in 1..=s.order() {
        let mut prev = Matrix::zeros(n);
        for a in 0..d {
            let val = &num(a, d - a) - &prev;
            q.insert((a, d - 1 - a), val.clone());
            prev = val;
        }
        assert_eq!(num(d, 0), prev, "numerator not divisible by z + w at degree {d}");
    }
    (0..=kmax)
        .map(|k| (0..=kmax).map(|l| q.get(&(k, l)).cloned().unwrap_or_else(|| Matrix::zeros(n))).collect())
        .collect()
}

/// `p'(0)` for a polynomial of degree `< values.len()` given its values at `1, 2, ...`.
pub fn derivative_at_zero(values: &[FormalSeries]) -> FormalSeries {
    let nodes: Vec<Rational> = (1..=values.len() as i64).map(int).collect();
    let mut out = values[0].scale(&int(0));
    for (j, y) in values.iter().enumerate() {
        let mut w = Rational::zero();
        for k in 0..nodes.len() {
            if k == j {
                continue;
            }
            let mut term = Rational::one() / (&nodes[j] - &nodes[k]);
            for i in 0..nodes.len() {
                if i != j && i != k {
                    term *= -&nodes[i] / (&nodes[j] - &nodes[i]);
                }
            }
            w += term;
        }
        out = &out + &y.scale(&w);
    }
    out
}

/// Linear term in `eps` of `exp(eps a) F`. The image is polynomial in `eps` of
/// degree at most `max(D floor(M/2), M)` on the stored region.
pub fn epsilon_oracle(a: &LieElement, f: &Potential) -> FormalSeries {
    let (d, m) = (f.degcap(), f.zmax());
    let bound = (d * (m / 2)).max(m);
    let order = 2 * m + 1;
    let values: Vec<FormalSeries> = (1..=bound as i64 + 1)
        .map(|e| act_lower(&exp_lie(&a.scale(&int(e)), order), f).unwrap().into_series())
        .collect();
    derivative_at_zero(&values)
}
