//! Structure constants, WDVV, and their invariance under the group.

use gw0::action::act_lower;
use gw0::frobenius::{check_frobenius_invariance, check_wdvv, restrict_small, structure_constants};
use gw0::loopgroup::{exp_lie, LieElement};
use gw0::matrix::Matrix;
use gw0::potential::{change_frame, points_potential};
use gw0::rational::{int, rat};

fn main() {
    let f = points_potential(2, 6, 4).unwrap();
    println!("Phi has {} terms", restrict_small(&f).series().len());
    let t = structure_constants(&f).unwrap();
    println!("A = {}", serde_json::to_string(&t).unwrap());
    println!("associative: {}, commutative: {}", t.is_associative(), t.is_commutative());
    let rep = check_wdvv(&f);
    println!("WDVV on {} quadruples up to degree {}: {}", rep.quadruples, rep.checked_deg, rep.pass);

    let frame = f.frame_arc().clone();
    let x = Matrix::from_rows(vec![vec![int(1), rat(2, 3)], vec![int(-1), int(0)]]).unwrap();
    let a = LieElement::new(frame.clone(), 5, [(2, LieElement::project(&frame, 2, &x)), (5, LieElement::project(&frame, 5, &x))]).unwrap();
    let s = exp_lie(&a, 9);
    println!("invariant under S: {}", check_frobenius_invariance(&s, &f).unwrap().pass);
    println!("WDVV after acting: {}", check_wdvv(&act_lower(&s, &f).unwrap()).pass);

    let b = Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(0), int(2)]]).unwrap();
    let g = change_frame(&f, &b).unwrap();
    println!("new basis, A = {}", serde_json::to_string(&structure_constants(&g).unwrap()).unwrap());
}
