//! Rank one: orbit coordinates, the cube form, and reconstruction from it.

use gw0::axioms::{verify, Checks};
use gw0::rank1::{check_rank1_relations, extract_extended, rank1_coords, rank1_from_coords, reconstruct_from_c3, OrbitCoords};
use gw0::rational::rat;

fn main() {
    let a = OrbitCoords::new(vec![rat(1, 2), rat(-1, 3)]);
    let f = rank1_from_coords(&a, 6, 6).unwrap();
    println!("coordinates read back: {}", serde_json::to_string(&rank1_coords(&f).unwrap()).unwrap());

    let l = extract_extended(&f).unwrap();
    println!("cube form: {}", serde_json::to_string(&l).unwrap());
    let rep = check_rank1_relations(&f).unwrap();
    println!("{} rank-one relations, all hold: {}", rep.relations.len(), rep.pass());

    let g = reconstruct_from_c3(&l, 6, 6).unwrap();
    println!("reconstruction equals the orbit point: {}", g == f);
    println!("reconstruction passes the full TRR sweep: {}", verify(g.series(), Checks::ALL).unwrap().pass());
}
