//! Grünwald weights and the two discrete operators built on them.
//!
//! Fixed memory length: the window always spans `[t - L, t]` with
//! `N` steps of `h = L / N`,
//!
//! ```text
//! D_L^α f(t) ≈ h^{-α} Σ_{k=0}^{N} w_k f(t - k h),   w_k = (-1)^k C(α, k)
//! ```
//!
//! Classical (fixed lower terminal `a`): the same sum over `[a, t]`, so the
//! window grows with `t`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspec::FunctionSpec;

/// Order `α >= 0` with its integer bracket `m = floor(α) + 1`,
/// i.e. `m - 1 <= α < m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracOrder {
    alpha: f64,
    m: u32,
}

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!(
                "order must be finite and >= 0, got {alpha}"
            )));
        }
        Ok(FracOrder {
            alpha,
            m: alpha.floor() as u32 + 1,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn is_integer(&self) -> bool {
        self.alpha == self.alpha.floor()
    }
}

/// Memory length `L` split into `N` steps. `h` is always derived as `L / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    memory: f64,
    n: usize,
    h: f64,
}

impl GridSpec {
    pub fn new(memory: f64, n: usize) -> Result<Self> {
        if !(memory > 0.0) || !memory.is_finite() {
            return Err(Error::invalid(format!(
                "memory length must be positive, got {memory}"
            )));
        }
        if n == 0 {
            return Err(Error::invalid("window needs N >= 1 steps"));
        }
        Ok(GridSpec {
            memory,
            n,
            h: memory / n as f64,
        })
    }

    pub fn memory(&self) -> f64 {
        self.memory
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// The window must cover the highest finite difference: `N >= ceil(α) + 2`.
    pub fn check_order(&self, order: &FracOrder) -> Result<()> {
        let need = order.alpha().ceil() as usize + 2;
        if self.n < need {
            return Err(Error::invalid(format!(
                "N = {} too small for order {}: need N >= {need}",
                self.n,
                order.alpha()
            )));
        }
        Ok(())
    }
}

/// `w_0 .. w_N` for one order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    alpha: f64,
    w: Vec<f64>,
}

impl WeightTable {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `Σ_k w_k · window[k]` where `window[k] = f(t - k h)`.
    pub fn apply(&self, window: &[f64]) -> f64 {
        debug_assert_eq!(window.len(), self.w.len());
        let mut acc = 0.0;
        for (w, x) in self.w.iter().zip(window) {
            acc += w * x;
        }
        acc
    }

    /// Same sum with samples stored oldest first: `samples[last - k] = f(t - k h)`.
    pub fn apply_rev(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.w.len());
        let mut acc = 0.0;
        for (w, x) in self.w.iter().zip(samples.iter().rev()) {
            acc += w * x;
        }
        acc
    }
}

/// Weights by the recurrence `w_k = w_{k-1} (k - 1 - α) / k`.
///
/// For integer `α = m` every weight beyond `k = m` is exactly zero.
pub fn grunwald_weights(alpha: f64, n: usize) -> Result<WeightTable> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!(
            "order must be finite and >= 0, got {alpha}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("weight table needs N >= 1"));
    }
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for k in 1..=n {
        let prev = w[k - 1];
        w.push(prev * ((k - 1) as f64 - alpha) / k as f64);
    }
    Ok(WeightTable { alpha, w })
}

/// Fixed-memory discrete derivative at one point:
/// `h^{-α} Σ_{k=0}^{N} w_k f(t - k h)`.
pub fn fm_gl_derivative(
    f: &FunctionSpec,
    t: f64,
    order: &FracOrder,
    grid: &GridSpec,
) -> Result<f64> {
    let table = grunwald_weights(order.alpha(), grid.n())?;
    fm_gl_with_table(f, t, &table, grid)
}

/// As [`fm_gl_derivative`] with a precomputed table of length `N + 1`.
pub fn fm_gl_with_table(
    f: &FunctionSpec,
    t: f64,
    table: &WeightTable,
    grid: &GridSpec,
) -> Result<f64> {
    if table.len() != grid.n() + 1 {
        return Err(Error::invalid("weight table does not match the grid"));
    }
    let h = grid.h();
    let mut acc = 0.0;
    for (k, w) in table.weights().iter().enumerate() {
        acc += w * f.eval(t - k as f64 * h)?;
    }
    Ok(acc / h.powf(table.alpha()))
}

/// Uniformly spaced values starting at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub t0: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl Series {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.time(i), v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Number of grid steps of size `h` that fit in `[t0, t1]`, tolerating
/// rounding in the span.
pub(crate) fn steps_in(t0: f64, t1: f64, h: f64) -> usize {
    ((t1 - t0) / h + 1e-9).floor().max(0.0) as usize
}

/// Fixed-memory derivative on the output grid `t0, t0 + h, …, <= t1`.
///
/// `f` is sampled once per node of `[t0 - L, t1]`; every output is the same
/// weight table applied to a sliding window of those samples.
pub fn fm_gl_derivative_series(
    f: &FunctionSpec,
    t0: f64,
    t1: f64,
    order: &FracOrder,
    grid: &GridSpec,
) -> Result<Series> {
    if !(t1 > t0) {
        return Err(Error::invalid(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    let h = grid.h();
    let n = grid.n();
    let outputs = steps_in(t0, t1, h) + 1;
    let samples = (0..n + outputs)
        .map(|j| f.eval(t0 + (j as f64 - n as f64) * h))
        .collect::<Result<Vec<f64>>>()?;
    let table = grunwald_weights(order.alpha(), n)?;
    let scale = h.powf(order.alpha());
    let values = (0..outputs)
        .into_par_iter()
        .map(|i| table.apply_rev(&samples[i..=i + n]) / scale)
        .collect();
    Ok(Series { t0, h, values })
}

/// Classical Grünwald-Letnikov derivative with lower terminal `a`,
/// `steps` subintervals of `[a, t]`.
pub fn classical_gl_derivative(
    f: &FunctionSpec,
    t: f64,
    alpha: f64,
    a: f64,
    steps: usize,
) -> Result<f64> {
    if !(t > a) {
        return Err(Error::invalid(format!("need t > a, got t = {t}, a = {a}")));
    }
    let grid = GridSpec::new(t - a, steps)?;
    let table = grunwald_weights(alpha, steps)?;
    fm_gl_with_table(f, t, &table, &grid)
}

/// Empirical order `log2(|v_h - v_{h/2}| / |v_{h/2} - v_{h/4}|)` from the
/// three finest entries of a halving sequence `(h, value)`.
pub fn estimate_convergence_order(values_at: &[(f64, f64)]) -> Result<f64> {
    const FLOOR: f64 = 1e-14;
    if values_at.len() < 3 {
        return Err(Error::invalid("need at least three (h, value) pairs"));
    }
    for w in values_at.windows(2) {
        if (w[1].0 - 0.5 * w[0].0).abs() > 1e-9 * w[0].0.abs() {
            return Err(Error::invalid(format!(
                "step sequence must halve: {} then {}",
                w[0].0, w[1].0
            )));
        }
    }
    let tail = &values_at[values_at.len() - 3..];
    let d1 = (tail[0].1 - tail[1].1).abs();
    let d2 = (tail[1].1 - tail[2].1).abs();
    if d1 < FLOOR || d2 < FLOOR {
        return Err(Error::Degenerate(FLOOR));
    }
    Ok((d1 / d2).log2())
}
