//! Acting on the two-point potential by a lower-triangular group element.

use gw0::action::act_lower;
use gw0::axioms::{verify, Checks};
use gw0::loopgroup::{exp_lie, LieElement};
use gw0::matrix::Matrix;
use gw0::potential::points_potential;
use gw0::rational::rat;

fn main() {
    let f = points_potential(2, 6, 4).unwrap();
    let frame = f.frame_arc().clone();
    let x = Matrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(0, 1), rat(-1, 1)]]).unwrap();
    let a = LieElement::new(frame.clone(), 3, [(2, LieElement::project(&frame, 2, &x)), (3, LieElement::project(&frame, 3, &x))]).unwrap();
    let s = exp_lie(&a, 2 * f.zmax() + 1);
    let h = act_lower(&s, &f).unwrap();
    println!("before: {} terms, after: {} terms, reliable degree {}", f.series().len(), h.series().len(), h.reliable());
    let rep = verify(h.series(), Checks::ALL).unwrap();
    println!("image passes dilaton, string, cone and {} TRR relations: {}", rep.trr.len(), rep.pass());
    let back = act_lower(&s.invert(), &h).unwrap();
    println!("acting by the inverse restores the input: {}", back == f);
}
