//! Exponentials in the twisted loop group, the symplectic check, and `W_{k,l}`.

use std::sync::Arc;

use gw0::loopgroup::{check_symplectic, exp_lie, w_matrices, EndSeries, LieElement};
use gw0::matrix::Matrix;
use gw0::rational::{int, rat};
use gw0::series::Frame;

fn main() {
    let g = Matrix::from_rows(vec![vec![int(2), int(-1)], vec![int(-1), int(1)]]).unwrap();
    let frame = Arc::new(Frame::new(g).unwrap());
    let x = Matrix::from_rows(vec![vec![rat(1, 2), int(1)], vec![int(0), rat(-1, 3)]]).unwrap();
    let mut a = LieElement::zero(frame.clone(), 5);
    for i in 2..=5 {
        // the projection enforces A_i* = (-1)^{i+1} A_i
        a.set(i, LieElement::project(&frame, i, &x)).unwrap();
    }
    let s = exp_lie(&a, 11);
    println!("S(z) = exp(a): {}", serde_json::to_string(&s).unwrap());
    println!("symplectic: {}", check_symplectic(s.series()).pass);
    println!("S^-1 = exp(-a): {}", s.invert() == exp_lie(&a.neg(), 11));

    let w = w_matrices(&s, 5).unwrap();
    println!("W_(0,2) = {}", serde_json::to_string(w.get(0, 2)).unwrap());
    println!("W* symmetric: {}", w.check_adjoint_symmetry().is_none());

    let bad = EndSeries::from_coeffs(frame, 4, [(0, Matrix::identity(2)), (1, x)]).unwrap();
    println!("with a z^1 term: {:?}", check_symplectic(&bad));
}
