//! Alternating-direction random walks with Poissonian resets: exact Monte
//! Carlo sampling, closed-form propagators and first-passage statistics,
//! numerical Laplace inversion for arbitrary jump laws, and optimal reset
//! rates.
//!
//! The closed-form layers ([`model`], [`analytic`], [`optimize`]'s closed
//! forms) are generic over [`Scalar`] (`f32` or `f64`). Simulation and
//! numerical inversion work in `f64`.

// `!(x > 0)` is the idiom used to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod inversion;
pub mod model;
pub mod optimize;
pub mod quadrature;
pub mod scalar;
pub mod simulate;

pub use error::{Error, Result};
pub use model::{validate_params, Direction, JumpDistribution, JumpLaw, ModelParams};
pub use scalar::Scalar;

pub type ModelParamsF64 = ModelParams<f64>;
pub type ModelParamsF32 = ModelParams<f32>;
pub type JumpLawF64 = JumpLaw<f64>;
pub type JumpLawF32 = JumpLaw<f32>;
pub type PureDriftF64 = analytic::PureDrift<f64>;
pub type PureDriftF32 = analytic::PureDrift<f32>;
pub type ExpJumpsF64 = analytic::ExpJumps<f64>;
pub type ExpJumpsF32 = analytic::ExpJumps<f32>;
