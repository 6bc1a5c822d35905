//! Matrix multiplication schemes as rank-one tensor decompositions.
//!
//! A scheme of format (n,m,p) computes the product of an n x m matrix by
//! an m x p matrix as a sum of rank-one terms; the number of terms is the
//! scheme's rank, the number of ring multiplications the algorithm costs.
//! This crate verifies schemes via the Brent equations, searches for
//! lower-rank schemes with a randomized flip graph walk, morphs schemes
//! between formats, and lifts Z_2 schemes to integer coefficients.

pub mod brent;
pub mod error;
pub mod gf2;
pub mod intmat;
pub mod io;
pub mod lift;
pub mod mat;
pub mod morph;
pub mod moves;
pub mod pipeline;
pub mod scheme;
pub mod search;

pub use error::{Error, Result};
pub use gf2::Gf2Matrix;
pub use intmat::IntMatrix;
pub use scheme::{standard_scheme, AnyScheme, Format, Gf2Scheme, IntScheme, Ring, Slot, Term};
