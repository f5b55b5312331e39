//! The quadratic-Hamiltonian action of the Lie algebra against the finite action.

use gw0::action::{act_infinitesimal, act_lower};
use gw0::loopgroup::{exp_lie, LieElement};
use gw0::matrix::Matrix;
use gw0::rank1::point_potential;
use gw0::rational::{int, rat, Rational};
use gw0::series::FormalSeries;

/// `p'(0)` from `p(0), p(1), ..., p(n-1)` for a polynomial of degree `< n`.
fn derivative_at_zero(values: &[FormalSeries]) -> FormalSeries {
    let n = values.len() as i64;
    let mut out = values[0].scale(&int(0));
    for (j, y) in values.iter().enumerate() {
        let j = j as i64;
        // L_j'(0) for nodes 0..n
        let w: Rational = if j == 0 {
            (1..n).map(|k| -rat(1, k)).sum()
        } else {
            let mut w = rat(1, j);
            for i in 1..n {
                if i != j {
                    w *= rat(-i, j - i);
                }
            }
            w
        };
        out = &out + &y.scale(&w);
    }
    out
}

fn main() {
    let f = point_potential(5, 3);
    let frame = f.frame_arc().clone();
    let a = LieElement::new(frame.clone(), 3, [(3, Matrix::scalar(1, rat(1, 2)))]).unwrap();
    let v = act_infinitesimal(&a, &f).unwrap();
    println!("a F has {} terms, reliable to degree {}", v.len(), v.reliable());

    // exp(eps a) F is a polynomial in eps of degree <= D floor(M/2) on the stored region
    let bound = 5;
    let values: Vec<FormalSeries> =
        (0..=bound + 1).map(|e| act_lower(&exp_lie(&a.scale(&int(e)), 7), &f).unwrap().into_series()).collect();
    let fin = derivative_at_zero(&values);
    println!("agrees with d/deps exp(eps a) F at 0: {}", v.compare_reliable(&fin).equal);

    let string = LieElement::new(frame, 1, [(1, Matrix::identity(1))]).unwrap();
    println!("z^-1 acts trivially: {}", act_infinitesimal(&string, &f).unwrap().vanishes_on_reliable());
}
