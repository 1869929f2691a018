//! Special functions: Gamma, its reciprocal and the two-parameter
//! Mittag-Leffler function, all on the real line.

mod dd;
mod gamma;
mod mittag_leffler;

pub use gamma::{gamma, ln_gamma, recip_gamma, sin_pi, POLE_TOLERANCE};
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_with, ml, ml_reflection_alpha2, ml_series, MlConfig, MlQuery,
    DEFAULT_TOL,
};
