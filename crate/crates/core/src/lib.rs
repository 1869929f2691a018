//! Fixed-memory-length Grünwald-Letnikov fractional derivatives.
//!
//! The crate provides the discrete operator, closed-form values for the
//! common catalog functions, an integral representation of the
//! continuous-limit operator and an implicit solver for fractional
//! differential equations with fixed memory.

// `!(x > y)` is used on purpose so that NaN falls into the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod closed_forms;
pub mod error;
pub mod funcspec;
pub mod grunwald;
pub mod integral;
pub mod solver;
pub mod specfun;

pub use closed_forms::{
    classical_sin, closed_form, d_constant, d_cos, d_exp, d_power, d_sin, sincos_coeffs,
    SinCosCoeffs,
};
pub use error::{Error, Result};
pub use funcspec::FunctionSpec;
pub use grunwald::{
    classical_gl_derivative, estimate_convergence_order, fm_gl_derivative, fm_gl_derivative_series,
    grunwald_weights, FracOrder, GridSpec, Series, WeightTable,
};
pub use integral::{fm_gl_integral_form, IntegralEstimate};
pub use solver::{
    periodicity_defect, solve_linear, solve_nonlinear, HistorySegment, RotationSystem, Trajectory,
    VectorField,
};
