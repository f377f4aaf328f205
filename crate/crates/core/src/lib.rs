//! Algebraic and numeric engines for bi-local process dynamics.
//!
//! Numeric modules are generic over [`scalar::Real`] (f32 or f64). Symbolic modules are generic
//! over [`scalar::Coeff`], with exact Gaussian rationals as the default coefficient field. The
//! aliases below fix the common choices.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod ccr;
pub mod classical;
pub mod fock;
pub mod format;
pub mod moyal;
pub mod process;
pub mod quantum;
pub mod rng;
pub mod scalar;
pub mod superops;
pub mod thermofield;

pub use scalar::{Coeff, GaussRational, Real};

/// Exact commutation polynomial.
pub type ExactPoly = ccr::NormalPoly<GaussRational>;
/// Exact CCR algebra.
pub type ExactAlgebra = ccr::Algebra<GaussRational>;
/// Exact process element `sum k[A,B]`.
pub type ExactProcess = process::ProcessElement<GaussRational>;

pub type Operator = fock::TruncatedOperator<f64>;
pub type State = fock::StateVector<f64>;
pub type OperatorF32 = fock::TruncatedOperator<f32>;
pub type StateF32 = fock::StateVector<f32>;

pub type Action = classical::TwoPointAction<f64>;
pub type Density = quantum::BilocalDensity<f64>;
pub type Grid = quantum::Grid1d<f64>;
pub type VecDensity = superops::VecDensity<f64>;
pub type ThetaVacuum = thermofield::ThetaVacuum<f64>;
