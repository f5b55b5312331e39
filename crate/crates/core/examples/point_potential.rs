//! The point potential in normal form, its low strata, and the axiom checks.

use gw0::axioms::{verify, Checks};
use gw0::rank1::{point_potential, psi_intersection};
use gw0::rational::format_rational;

fn main() {
    let f = point_potential(8, 6);
    println!("point potential: degcap {}, zmax {}, {} terms", f.degcap(), f.zmax(), f.series().len());
    for n in 0..=5 {
        println!("c_{n} has {} terms", f.c(n).len());
    }
    let vectors: [&[u32]; 3] = [&[0, 0, 0, 0, 2], &[0, 0, 0, 1, 1, 1], &[0, 0, 0, 0, 3, 1, 1, 1, 0]];
    for k in vectors {
        let v = psi_intersection(k).unwrap();
        println!("<tau{k:?}> = {}", format_rational(&v));
    }
    let rep = verify(f.series(), Checks::ALL).unwrap();
    println!("{} TRR relations checked, all axioms pass: {}", rep.trr.len(), rep.pass());
}
