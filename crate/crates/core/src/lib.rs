//! Exact arithmetic for genus-zero descendant potentials and the action of the
//! twisted loop group on them.
//!
//! Potentials live in [`potential`], the group in [`loopgroup`], the action in
//! [`action`], and the axiom checks in [`axioms`]. [`rank1`] covers the
//! one-dimensional theory and [`frobenius`] the small phase space.

#![allow(clippy::needless_range_loop)]

pub mod action;
pub mod axioms;
pub mod cli;
pub mod error;
pub mod frobenius;
pub mod loopgroup;
pub mod matrix;
pub mod potential;
pub mod rank1;
pub mod rational;
pub mod series;

pub use error::{Gw0Error, Result};

#[cfg(test)]
mod testutil;
