//! Comparative experiments: limits at integer orders, the effect of the
//! memory length, and the non-periodicity of the classical operator.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{classical_sin, closed_form};
use crate::error::{Error, Result};
use crate::funcspec::FunctionSpec;
use crate::grunwald::{fm_gl_derivative, fm_gl_derivative_series, FracOrder, GridSpec};
use crate::solver::series_periodicity_defect;

/// Window size used when a function has no closed form.
pub const DISCRETE_N: usize = 8192;

/// Derivative at `t` by closed form when one exists, else the discrete sum.
fn derivative_at(f: &FunctionSpec, t: f64, alpha: f64, l: f64) -> Result<f64> {
    if f.as_catalog().is_some() {
        closed_form(f, t, alpha, l)
    } else {
        fm_gl_derivative(
            f,
            t,
            &FracOrder::new(alpha)?,
            &GridSpec::new(l, DISCRETE_N)?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpRow {
    pub alpha: f64,
    pub value: f64,
    /// Integer order the row is compared against.
    pub reference_order: u32,
    pub reference: f64,
    pub abs_error: f64,
}

/// Fractional derivative at each `α` next to the integer derivative it
/// approaches. All orders must lie in one bracket `(m-1, m)`; each row is
/// compared with the nearer end, ties going to `m`.
pub fn interpolation_curve(
    f: &FunctionSpec,
    t: f64,
    l: f64,
    alphas: &[f64],
) -> Result<Vec<InterpRow>> {
    let Some(&first) = alphas.first() else {
        return Ok(Vec::new());
    };
    let m = first.floor() as u32 + 1;
    for &a in alphas {
        if !(a > (m - 1) as f64 && a < m as f64) {
            return Err(Error::invalid(format!(
                "order {a} is outside the common bracket ({}, {m})",
                m - 1
            )));
        }
    }
    let upper = f.derivative(m).eval(t)?;
    let lower = f.derivative(m - 1).eval(t)?;
    alphas
        .par_iter()
        .map(|&alpha| {
            let value = derivative_at(f, t, alpha, l)?;
            let (reference_order, reference) = if m as f64 - alpha <= alpha - (m - 1) as f64 {
                (m, upper)
            } else {
                (m - 1, lower)
            };
            Ok(InterpRow {
                alpha,
                value,
                reference_order,
                reference,
                abs_error: (value - reference).abs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemorySweep {
    pub times: Vec<f64>,
    /// One derivative series per memory length, in input order.
    pub series: Vec<(f64, Vec<f64>)>,
    /// `sup_t |D_{L_i} f - D_{L_{i+1}} f|` for consecutive lengths.
    pub sup_distances: Vec<f64>,
}

/// Derivative series of `f` on `points` uniform times in `[t0, t1]`, once
/// per memory length.
pub fn memory_sweep(
    f: &FunctionSpec,
    alpha: f64,
    t_range: (f64, f64),
    ls: &[f64],
    points: usize,
) -> Result<MemorySweep> {
    let (t0, t1) = t_range;
    if !(t1 > t0) || points < 2 {
        return Err(Error::invalid("need t1 > t0 and at least 2 points"));
    }
    if ls.is_empty() || ls[0] <= 0.0 || ls.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "memory lengths must be positive and increasing",
        ));
    }
    let times: Vec<f64> = (0..points)
        .map(|i| t0 + (t1 - t0) * i as f64 / (points - 1) as f64)
        .collect();
    let series = ls
        .par_iter()
        .map(|&l| {
            let vals = times
                .iter()
                .map(|&t| derivative_at(f, t, alpha, l))
                .collect::<Result<Vec<_>>>()?;
            Ok((l, vals))
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_distances = series
        .windows(2)
        .map(|w| {
            w[0].1
                .iter()
                .zip(&w[1].1)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(MemorySweep {
        times,
        series,
        sup_distances,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub t: f64,
    pub classical: f64,
    pub envelope: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonperiodicityDemo {
    pub rows: Vec<Fig1Row>,
    /// Defect of the classical derivative of `sin` over the last two periods.
    pub classical_defect: f64,
    /// Defect of the fixed-memory discrete derivative of `sin` over the same
    /// window, on a grid with `2π / h` an integer.
    pub fixed_memory_defect: f64,
}

/// Steps per period used for the aligned fixed-memory comparison.
const ALIGNED_STEPS: usize = 256;

/// `max |g(t + 2π) - g(t)|` for the classical derivative of `sin`, sampled on
/// `samples` points of `[t_start, t_end - 2π]`.
pub fn classical_sin_defect(alpha: f64, t_start: f64, t_end: f64, samples: usize) -> Result<f64> {
    let span = t_end - 2.0 * PI - t_start;
    if !(t_start > 0.0) || !(span >= 0.0) || samples < 2 {
        return Err(Error::invalid(
            "need 0 < t_start, t_end - t_start >= 2π and at least 2 samples",
        ));
    }
    let mut worst = 0.0f64;
    for i in 0..samples {
        let t = t_start + span * i as f64 / (samples - 1) as f64;
        worst = worst.max((classical_sin(t + 2.0 * PI, alpha)? - classical_sin(t, alpha)?).abs());
    }
    Ok(worst)
}

/// Classical derivative of `sin` (lower terminal 0) on `steps` points of
/// `(0, t_max]` against its asymptote `sin(t + απ/2)`.
pub fn nonperiodicity_demo(alpha: f64, t_max: f64, steps: usize) -> Result<NonperiodicityDemo> {
    if !(t_max > 2.0 * PI) || steps == 0 {
        return Err(Error::invalid("need t_max > 2π and steps >= 1"));
    }
    let shift = alpha * FRAC_PI_2;
    let rows = (1..=steps)
        .into_par_iter()
        .map(|i| {
            let t = t_max * i as f64 / steps as f64;
            let classical = classical_sin(t, alpha)?;
            let envelope = (t + shift).sin();
            Ok(Fig1Row {
                t,
                classical,
                envelope,
                difference: classical - envelope,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let window_start = (t_max - 4.0 * PI).max(1e-3);
    let classical_defect = classical_sin_defect(alpha, window_start, t_max, 1000)?;

    let periods = (t_max / (2.0 * PI)).floor().max(1.0);
    let grid = GridSpec::new(2.0 * PI * periods, ALIGNED_STEPS * periods as usize)?;
    let series = fm_gl_derivative_series(
        &FunctionSpec::sin(),
        window_start,
        window_start + 4.0 * PI,
        &FracOrder::new(alpha)?,
        &grid,
    )?;
    let fixed_memory_defect = series_periodicity_defect(&series, 2.0 * PI)?;
    Ok(NonperiodicityDemo {
        rows,
        classical_defect,
        fixed_memory_defect,
    })
}
