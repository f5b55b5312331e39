//! Random inputs shared by unit tests.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::loopgroup::LieElement;
use crate::matrix::Matrix;
use crate::rational::{rat, Rational};
use crate::series::Frame;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(r: &mut impl Rng) -> Rational {
    rat(r.random_range(-3..=3), r.random_range(1..=3))
}

pub fn random_matrix(r: &mut impl Rng, n: usize) -> Matrix {
    let rows = (0..n).map(|_| (0..n).map(|_| small_rational(r)).collect()).collect();
    Matrix::from_rows(rows).unwrap()
}

/// Random element of the Lie algebra with powers `from..=to`, each present with probability one half.
pub fn random_lie(r: &mut impl Rng, frame: &Arc<Frame>, from: usize, to: usize) -> LieElement {
    let mut a = LieElement::zero(frame.clone(), to);
    for i in from..=to {
        if r.random_bool(0.5) {
            let x = random_matrix(r, frame.dim());
            a.set(i, LieElement::project(frame, i, &x)).unwrap();
        }
    }
    a
}
