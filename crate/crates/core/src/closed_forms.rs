//! Exact fixed-memory derivatives of the catalog functions.
//!
//! All denominators `Γ(k - α + 1)` go through [`recip_gamma`], so integer
//! orders need no special case: the pole terms simply vanish.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspec::{Catalog, FunctionSpec};
use crate::specfun::{ml, recip_gamma};

fn check_memory(l: f64) -> Result<()> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::invalid(format!(
            "memory length must be positive, got {l}"
        )));
    }
    Ok(())
}

/// `C / (L^α Γ(1 - α))`. Zero at every positive integer order.
pub fn d_constant(c: f64, alpha: f64, l: f64) -> f64 {
    c * recip_gamma(1.0 - alpha) * l.powf(-alpha)
}

/// Derivative of `t^n`:
/// `Σ_{k=0}^{n} n!/(n-k)! · L^{k-α} (t-L)^{n-k} / Γ(k - α + 1)`.
pub fn d_power(n: u32, t: f64, alpha: f64, l: f64) -> f64 {
    let s = t - l;
    let mut falling = 1.0; // n!/(n-k)!
    let mut acc = 0.0;
    for k in 0..=n {
        if k > 0 {
            falling *= (n - k + 1) as f64;
        }
        acc += recip_gamma(k as f64 - alpha + 1.0)
            * l.powf(k as f64 - alpha)
            * falling
            * s.powi((n - k) as i32);
    }
    acc
}

/// Derivative of `e^t`: `e^{t-L} L^{-α} E_{1,1-α}(L)`.
pub fn d_exp(t: f64, alpha: f64, l: f64) -> Result<f64> {
    check_memory(l)?;
    Ok((t - l).exp() * l.powf(-alpha) * ml(1.0, 1.0 - alpha, l)?)
}

/// Coefficients of the sine/cosine rule,
/// `a = L^{-α} E_{2,1-α}(-L²)`, `b = L^{1-α} E_{2,2-α}(-L²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinCosCoeffs {
    pub a: f64,
    pub b: f64,
}

impl SinCosCoeffs {
    /// `a sin(t - L) + b cos(t - L)`
    pub fn d_sin(&self, t: f64, l: f64) -> f64 {
        let (s, c) = (t - l).sin_cos();
        self.a * s + self.b * c
    }

    /// `a cos(t - L) - b sin(t - L)`
    pub fn d_cos(&self, t: f64, l: f64) -> f64 {
        let (s, c) = (t - l).sin_cos();
        self.a * c - self.b * s
    }
}

pub fn sincos_coeffs(alpha: f64, l: f64) -> Result<SinCosCoeffs> {
    check_memory(l)?;
    let z = -l * l;
    Ok(SinCosCoeffs {
        a: l.powf(-alpha) * ml(2.0, 1.0 - alpha, z)?,
        b: l.powf(1.0 - alpha) * ml(2.0, 2.0 - alpha, z)?,
    })
}

pub fn d_sin(t: f64, alpha: f64, l: f64) -> Result<f64> {
    Ok(sincos_coeffs(alpha, l)?.d_sin(t, l))
}

pub fn d_cos(t: f64, alpha: f64, l: f64) -> Result<f64> {
    Ok(sincos_coeffs(alpha, l)?.d_cos(t, l))
}

/// Classical (lower terminal 0) derivative of `sin`: `t^{1-α} E_{2,2-α}(-t²)`.
pub fn classical_sin(t: f64, alpha: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!(
            "classical_sin needs t > 0, got {t}"
        )));
    }
    Ok(t.powf(1.0 - alpha) * ml(2.0, 2.0 - alpha, -t * t)?)
}

/// Closed form for any catalog function, by linearity. Harmonic `j` uses
/// `D^α sin(j t) = j^α · d_sin(j t, α, j L)` (substitute `u = j t`).
pub fn catalog_derivative(c: &Catalog, t: f64, alpha: f64, l: f64) -> Result<f64> {
    check_memory(l)?;
    Ok(match c {
        Catalog::Constant(v) => d_constant(*v, alpha, l),
        Catalog::Sin { coef } => coef * d_sin(t, alpha, l)?,
        Catalog::Cos { coef } => coef * d_cos(t, alpha, l)?,
        Catalog::Exp { coef } => coef * d_exp(t, alpha, l)?,
        Catalog::Power { n, coef } => coef * d_power(*n, t, alpha, l),
        Catalog::Polynomial(cs) => cs
            .iter()
            .enumerate()
            .map(|(n, c)| c * d_power(n as u32, t, alpha, l))
            .sum(),
        Catalog::Fourier(terms) => {
            let mut acc = 0.0;
            for term in terms {
                if term.harmonic == 0 {
                    acc += d_constant(term.cos_coef, alpha, l);
                    continue;
                }
                let j = term.harmonic as f64;
                let k = sincos_coeffs(alpha, j * l)?;
                acc += j.powf(alpha)
                    * (term.sin_coef * k.d_sin(j * t, j * l)
                        + term.cos_coef * k.d_cos(j * t, j * l));
            }
            acc
        }
    })
}

/// [`catalog_derivative`] for a [`FunctionSpec`]; only catalog variants have
/// closed forms.
pub fn closed_form(f: &FunctionSpec, t: f64, alpha: f64, l: f64) -> Result<f64> {
    match f.as_catalog() {
        Some(c) => catalog_derivative(c, t, alpha, l),
        None => Err(Error::invalid(
            "closed form available only for catalog functions",
        )),
    }
}
