//! Numerical tools for translating solitons of fully nonlinear curvature
//! flows: curvature functions of the principal curvatures, the
//! entire/ball classification of the rotationally symmetric translator,
//! the profile ODE solver, geometric identity checks on sampled surfaces
//! and moving-plane reflection predicates.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops mirror the tensor formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod bowl;
pub mod constraint;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod moving_planes;
pub mod ode;
pub mod roots;

pub use curvature::{CurvatureFunction, EigenvalueVector, Exponent, GammaSpec, SymmetricCurvature};
pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
