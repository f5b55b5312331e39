//! The rank-one theory: point potential, cube lemma, orbit coordinates, reconstruction.

mod cube;
mod orbit;
mod point;
mod psi;
mod reconstruct;
mod relations;

pub use cube::{even_from_odd, extract_cube, extract_extended, LinearForm};
pub use orbit::{
    coordinate_depth, rank1_coords, rank1_from_coords, strip_sign_self_test, OrbitCoords, STRIP_SIGN,
};
pub use point::point_potential;
pub use psi::{psi_intersection, PsiTable};
pub use reconstruct::reconstruct_from_c3;
pub use relations::{check_rank1_relations, BetaTable, Rank1Report, Relation};
