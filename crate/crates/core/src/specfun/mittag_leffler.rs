//! Two-parameter Mittag-Leffler function on the real line.
//!
//! `E_{α,β}(z) = Σ_{k≥0} z^k / Γ(αk + β)`
//!
//! Three evaluation paths:
//!
//! * integer `α` (the exponential and trigonometric families): the terms are
//!   produced by the exact ratio recurrence `t_{k+1} = t_k · z / Π_j (αk+β+j)`
//!   in double-double, so the alternating series for large negative `z`
//!   does not lose its significant digits to cancellation;
//! * other `α`: the plain series in f64 with Neumaier-compensated summation;
//! * `α = 2`, `z` at or below [`MlConfig::reflection_threshold`]: the
//!   large-argument form
//!   `E_{2,β}(-x²) = x^{1-β} cos(x + (1-β)π/2) + Σ_{k≥1} (-1)^{k+1} x^{-2k} / Γ(β-2k)`.
//!   Its tail is asymptotic, so if the terms start growing before they fall
//!   below `tol` the evaluation falls back to the series.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::dd::Dd;
use super::gamma::{ln_gamma, recip_gamma};
use crate::error::{Error, Result};

/// Default absolute truncation target.
pub const DEFAULT_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlQuery {
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
    pub tol: f64,
}

impl MlQuery {
    pub fn new(alpha: f64, beta: f64, z: f64) -> Self {
        MlQuery {
            alpha,
            beta,
            z,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(format!(
                "Mittag-Leffler alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid(format!(
                "Mittag-Leffler tol must be positive, got {}",
                self.tol
            )));
        }
        if !self.beta.is_finite() || !self.z.is_finite() {
            return Err(Error::invalid("Mittag-Leffler beta and z must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlConfig {
    /// For `α = 2`, arguments `z <= reflection_threshold` try the
    /// large-argument form first.
    pub reflection_threshold: f64,
    /// Maximum number of series terms before giving up.
    pub term_cap: usize,
}

impl Default for MlConfig {
    fn default() -> Self {
        MlConfig {
            reflection_threshold: -25.0,
            term_cap: 10_000,
        }
    }
}

/// `E_{α,β}(z)` with the default configuration.
pub fn mittag_leffler(q: &MlQuery) -> Result<f64> {
    mittag_leffler_with(q, &MlConfig::default())
}

/// Shorthand for `mittag_leffler(&MlQuery::new(alpha, beta, z))`.
pub fn ml(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    mittag_leffler(&MlQuery::new(alpha, beta, z))
}

pub fn mittag_leffler_with(q: &MlQuery, cfg: &MlConfig) -> Result<f64> {
    q.validate()?;
    if q.alpha == 2.0 && q.z <= cfg.reflection_threshold {
        if let Some(v) = ml_reflection_alpha2(q.beta, q.z, q.tol) {
            return Ok(v);
        }
    }
    ml_series(q, cfg)
}

/// The power series alone, regardless of the argument size.
pub fn ml_series(q: &MlQuery, cfg: &MlConfig) -> Result<f64> {
    q.validate()?;
    if q.z == 0.0 {
        return Ok(recip_gamma(q.beta));
    }
    let a = q.alpha;
    if a == a.floor() && a <= 16.0 {
        series_integer_alpha(a as u32, q.beta, q.z, q.tol, cfg.term_cap)
    } else {
        series_f64(a, q.beta, q.z, q.tol, cfg.term_cap)
    }
}

/// Large-argument form of `E_{2,β}(z)` for `z < 0`.
///
/// Returns `None` when the asymptotic tail starts to diverge before its
/// terms drop below `tol`. Exact (finite tail) whenever `β` is an integer.
pub fn ml_reflection_alpha2(beta: f64, z: f64, tol: f64) -> Option<f64> {
    if !(z < 0.0) {
        return None;
    }
    let x = (-z).sqrt();
    let lead = x.powf(1.0 - beta) * (x + (1.0 - beta) * FRAC_PI_2).cos();
    let beta_is_int = beta == beta.floor();
    let inv_x2 = 1.0 / (x * x);

    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut xpow = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..=400u32 {
        let arg = beta - 2.0 * k as f64;
        if beta_is_int && arg <= 0.0 {
            // 1/Γ vanishes from here on.
            return Some(lead + (sum + comp));
        }
        xpow *= inv_x2;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * xpow * recip_gamma(arg);
        if !term.is_finite() || term.abs() > prev {
            return None;
        }
        neumaier_add(&mut sum, &mut comp, term);
        if term.abs() < tol {
            return Some(lead + (sum + comp));
        }
        prev = term.abs();
    }
    None
}

#[inline]
fn neumaier_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

fn series_integer_alpha(p: u32, beta: f64, z: f64, tol: f64, cap: usize) -> Result<f64> {
    let pf = p as f64;
    // Terms with Γ at a pole vanish; start from the first live one.
    let k0: u64 = if beta <= 0.0 && beta == beta.floor() {
        ((1.0 - beta) / pf).ceil() as u64
    } else {
        0
    };
    let zd = Dd::from_f64(z);
    let mut term = Dd::from_f64(recip_gamma(pf * k0 as f64 + beta));
    for _ in 0..k0 {
        term = term.mul(zd);
    }
    let mut sum = Dd::ZERO;
    let mut small_run = 0;
    let mut k = k0;
    let mut n_terms = 0usize;
    loop {
        sum = sum.add(term);
        n_terms += 1;

        // term_{k+1} = term_k · z / Π_{j<p} (pk + β + j), denominators exact in dd
        let mut denom = Dd::from_f64(1.0);
        for j in 0..p {
            denom = denom.mul(Dd::sum_exact((p as u64 * k + j as u64) as f64, beta));
        }
        let ratio = z.abs() / denom.to_f64().abs();
        term = term.mul(zd).div(denom);
        k += 1;

        if term.abs() < tol && ratio < 1.0 {
            small_run += 1;
            if small_run >= 2 {
                return Ok(sum.to_f64());
            }
        } else {
            small_run = 0;
        }
        if n_terms >= cap || !term.hi.is_finite() {
            return Err(Error::NonConvergence {
                what: "Mittag-Leffler series",
                terms: n_terms,
                last_term: term.hi,
            });
        }
    }
}

fn series_f64(alpha: f64, beta: f64, z: f64, tol: f64, cap: usize) -> Result<f64> {
    let ln_abs_z = z.abs().ln();
    // Past this Gamma argument the terms decrease monotonically.
    let peak_arg = z.abs().powf(1.0 / alpha) + 1.0;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut small_run = 0;
    let mut last = 0.0;
    for k in 0..cap {
        let arg = alpha * k as f64 + beta;
        let term = if arg > 30.0 {
            let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            sign * (k as f64 * ln_abs_z - ln_gamma(arg)).exp()
        } else {
            z.powi(k as i32) * recip_gamma(arg)
        };
        if !term.is_finite() {
            break;
        }
        neumaier_add(&mut sum, &mut comp, term);
        last = term;
        if term.abs() < tol && arg > peak_arg {
            small_run += 1;
            if small_run >= 2 {
                return Ok(sum + comp);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "Mittag-Leffler series",
        terms: cap,
        last_term: last,
    })
}
