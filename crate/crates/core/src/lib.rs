//! Elliptic hypergeometric series on the computer.
//!
//! The crate evaluates the modified Jacobi theta function, theta shifted
//! factorials and very-well-poised sums, the elliptic Askey-Wilson operator
//! with its Taylor and interpolation expansions (one and several variables),
//! and Bhargava's cubic theta function with the cubic theta factorials built
//! from it. A registry of summation and structural identities is checked at
//! random parameter points by a deterministic, parallel trial engine.

// `!(x <= y)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod params;
pub mod sum;
pub mod scaled;
pub mod theta;
pub mod pochhammer;
pub mod series;
pub mod operator;
pub mod expansion;
pub mod cubic;
pub mod registry;
pub mod report;
pub mod cli;

pub use error::{Error, Result};
pub use params::{c64, relative_residual, EllipticParams, TruncationPolicy, C64};
