//! Exact computational workbench for affine root systems, extended Weyl
//! groups, the positive half of quantum affine algebras (PBW and canonical
//! bases through Drinfeld's bilinear form), level-zero crystals of type
//! `A_n^(1)`, and the limit ring of cell triples.
//!
//! All arithmetic is exact: arbitrary-precision rationals, Laurent
//! polynomials in `q_s`, and reduced rational functions. Nothing here ever
//! touches floating point.

pub mod cells;
pub mod cli;
pub mod crystals;
pub mod error;
pub mod qseries;
pub mod rootdata;
pub mod symfun;
pub mod uplus;
pub mod weyl;

pub use error::{Error, Result};
