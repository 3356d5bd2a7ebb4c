//! Eigenstructure, control paths, counterdiabatic drives and no-jump
//! propagation for a driven two-level system with state-dependent loss.
//!
//! Units throughout: rates in rad/μs, times in μs (ħ = 1).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adiabaticity;
pub mod counterdiabatic;
pub mod error;
pub mod interp;
pub mod linalg;
pub mod metrics;
pub mod paths;
pub mod propagator;
pub mod spectrum;
pub mod table;

pub use error::{Error, Result};
pub use linalg::{Mat2, Vec2};
pub use num_complex::Complex64 as C64;
