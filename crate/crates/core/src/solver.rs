//! Time stepping for fixed-memory fractional systems `D_L^α x = F(x)`.
//!
//! The operator at `t0` reads back to `t0 - L`, so a run starts from a full
//! history segment instead of a point value. Each step solves the discrete
//! operator equation at the new time point:
//!
//! ```text
//! h^{-α} Σ_{k=0}^{N} w_k x_{n-k} = F(x_n)
//! ```

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::closed_forms::{sincos_coeffs, SinCosCoeffs};
use crate::error::{Error, Result};
use crate::funcspec::FunctionSpec;
use crate::grunwald::{grunwald_weights, GridSpec, Series};

/// Largest acceptable 1-norm condition estimate of `I - h^α A`.
pub const MAX_CONDITION: f64 = 1e14;

/// States on `[t0 - L, t0]` at step `h`: `N + 1` vectors, oldest first,
/// the last one at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistorySegment {
    t0: f64,
    grid: GridSpec,
    dim: usize,
    data: Vec<f64>,
}

impl HistorySegment {
    /// From `N + 1` sample vectors, oldest first.
    pub fn from_samples(t0: f64, grid: GridSpec, samples: &[Vec<f64>]) -> Result<Self> {
        if samples.len() != grid.n() + 1 {
            return Err(Error::invalid(format!(
                "history needs N + 1 = {} samples, got {}",
                grid.n() + 1,
                samples.len()
            )));
        }
        let dim = samples[0].len();
        if dim == 0 || samples.iter().any(|s| s.len() != dim) {
            return Err(Error::invalid(
                "history samples must share a nonzero dimension",
            ));
        }
        Ok(HistorySegment {
            t0,
            grid,
            dim,
            data: samples.concat(),
        })
    }

    /// Samples one function per component on the history grid.
    pub fn from_specs(t0: f64, grid: GridSpec, components: &[FunctionSpec]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("history needs at least one component"));
        }
        let n = grid.n();
        let mut data = Vec::with_capacity((n + 1) * components.len());
        for i in 0..=n {
            let t = t0 - (n - i) as f64 * grid.h();
            for c in components {
                data.push(c.eval(t)?);
            }
        }
        Ok(HistorySegment {
            t0,
            grid,
            dim: components.len(),
            data,
        })
    }

    pub fn constant(t0: f64, grid: GridSpec, value: &[f64]) -> Result<Self> {
        let comps: Vec<_> = value.iter().map(|&v| FunctionSpec::constant(v)).collect();
        Self::from_specs(t0, grid, &comps)
    }

    /// `c · (cos t, sin t)`.
    pub fn cos_sin(t0: f64, grid: GridSpec, c: f64) -> Result<Self> {
        let mut h = Self::from_specs(t0, grid, &[FunctionSpec::cos(), FunctionSpec::sin()])?;
        h.data.iter_mut().for_each(|x| *x *= c);
        Ok(h)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.n() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 - (self.grid.n() - i) as f64 * self.grid.h()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut h = self.clone();
        h.data.iter_mut().for_each(|x| *x *= c);
        h
    }

    /// Applies `m` to every sample vector.
    pub fn mapped(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::invalid("matrix dimension does not match history"));
        }
        let mut out = self.clone();
        for (src, dst) in self
            .data
            .chunks(self.dim)
            .zip(out.data.chunks_mut(self.dim))
        {
            let y = m * DVector::from_column_slice(src);
            dst.copy_from_slice(y.as_slice());
        }
        Ok(out)
    }
}

/// Solution samples: `state(i)` is `x(t0 + i h)`, with `state(0)` the last
/// history sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t0: f64,
    pub h: f64,
    pub dim: usize,
    states: Vec<f64>,
    pub history: HistorySegment,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.h
    }

    pub fn states_flat(&self) -> &[f64] {
        &self.states
    }

    pub fn component(&self, j: usize) -> Vec<f64> {
        self.states
            .iter()
            .skip(j)
            .step_by(self.dim)
            .copied()
            .collect()
    }

    /// Component `j` over history and solution as a piecewise-linear
    /// function, so it can be fed back through the discrete operator.
    pub fn component_spec(&self, j: usize) -> Result<FunctionSpec> {
        let n = self.history.grid().n();
        let mut times = Vec::with_capacity(n + self.len());
        let mut values = Vec::with_capacity(n + self.len());
        for i in 0..n {
            times.push(self.history.time(i));
            values.push(self.history.sample(i)[j]);
        }
        for i in 0..self.len() {
            times.push(self.time(i));
            values.push(self.state(i)[j]);
        }
        FunctionSpec::samples(times, values)
    }

    /// The samples with `t_start <= t <= t_end` (within a 1e-9 step slack).
    pub fn window(&self, t_start: f64, t_end: f64) -> StateWindow<'_> {
        let eps = 1e-9;
        let first = ((t_start - self.t0) / self.h - eps).ceil().max(0.0) as usize;
        let last =
            (((t_end - self.t0) / self.h + eps).floor() as isize).min(self.len() as isize - 1);
        let (first, last) = if last < first as isize {
            (0, 0)
        } else {
            (first.min(self.len()), last as usize + 1)
        };
        StateWindow {
            t0: self.time(first),
            h: self.h,
            dim: self.dim,
            data: &self.states[first * self.dim..last * self.dim],
        }
    }

    pub fn all(&self) -> StateWindow<'_> {
        StateWindow {
            t0: self.t0,
            h: self.h,
            dim: self.dim,
            data: &self.states,
        }
    }
}

/// A borrowed run of uniformly spaced state vectors.
#[derive(Debug, Clone, Copy)]
pub struct StateWindow<'a> {
    pub t0: f64,
    pub h: f64,
    pub dim: usize,
    pub data: &'a [f64],
}

impl StateWindow<'_> {
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn periodicity_defect(&self, period: f64) -> Result<f64> {
        defect(self.h, self.dim, self.data, period)
    }

    /// Max-norm distance from `exact(t)` over the window.
    pub fn max_deviation(&self, exact: impl Fn(f64) -> Vec<f64>) -> f64 {
        self.data
            .chunks(self.dim)
            .enumerate()
            .map(|(i, x)| {
                let e = exact(self.t0 + i as f64 * self.h);
                x.iter()
                    .zip(&e)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Grid shift corresponding to `period`, if it is a whole number of steps.
pub fn period_in_steps(period: f64, h: f64) -> Result<usize> {
    let p = period / h;
    if !(period > 0.0) || (p - p.round()).abs() > 1e-9 * p.max(1.0) {
        return Err(Error::GridMisaligned { period, h });
    }
    Ok(p.round() as usize)
}

fn defect(h: f64, dim: usize, data: &[f64], period: f64) -> Result<f64> {
    let p = period_in_steps(period, h)?;
    let len = data.len() / dim;
    if len < 2 * p + 1 {
        return Err(Error::invalid(format!(
            "need two periods of samples ({}), have {len}",
            2 * p + 1
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..len - p {
        for j in 0..dim {
            worst = worst.max((data[(i + p) * dim + j] - data[i * dim + j]).abs());
        }
    }
    Ok(worst)
}

/// `max |x(t + T) - x(t)|` over all overlapping samples.
pub fn periodicity_defect(traj: &Trajectory, period: f64) -> Result<f64> {
    traj.all().periodicity_defect(period)
}

/// The same for a scalar derivative series.
pub fn series_periodicity_defect(series: &Series, period: f64) -> Result<f64> {
    defect(series.h, 1, &series.values, period)
}

/// `A = [[a, -b], [b, a]]`, multiplication by `a + i b` in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSystem {
    pub a: f64,
    pub b: f64,
}

impl RotationSystem {
    pub fn new(a: f64, b: f64) -> Self {
        RotationSystem { a, b }
    }

    /// Coefficients taken directly from the sine/cosine rule. With `L = 2π`
    /// this makes `(cos t, sin t)` an exact solution.
    pub fn from_coeffs(k: SinCosCoeffs) -> Self {
        RotationSystem { a: k.a, b: k.b }
    }

    /// System for which `c (cos t, sin t)` is an exact solution at any `L`:
    /// `a' + i b' = (a + i b) e^{-iL}`. Equals [`Self::from_coeffs`] when
    /// `L` is a multiple of `2π`.
    pub fn periodic(alpha: f64, l: f64) -> Result<Self> {
        let k = sincos_coeffs(alpha, l)?;
        let (s, c) = l.sin_cos();
        Ok(RotationSystem {
            a: k.a * c + k.b * s,
            b: k.b * c - k.a * s,
        })
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[self.a, -self.b, self.b, self.a])
    }
}

/// Right-hand side `F(x)` of a nonlinear system.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()>;
}

/// `F(x) = A x`.
pub struct LinearField(pub DMatrix<f64>);

impl VectorField for LinearField {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        out.copy_from_slice((&self.0 * DVector::from_column_slice(x)).as_slice());
        Ok(())
    }
}

/// Any closure `(x, out)`.
pub struct FnField<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        (self.f)(x, out)
    }
}

fn step_count(hist: &HistorySegment, t_end: f64) -> Result<usize> {
    if !(t_end > hist.t0) {
        return Err(Error::invalid(format!(
            "t_end = {t_end} must exceed t0 = {}",
            hist.t0
        )));
    }
    // rounded up to the next grid node
    Ok(((t_end - hist.t0) / hist.grid.h() - 1e-9).ceil() as usize)
}

/// Workspace shared by both steppers: history then states in one flat buffer.
struct Stepper {
    dim: usize,
    n: usize,
    w: Vec<f64>,
    buf: Vec<f64>,
}

impl Stepper {
    fn new(hist: &HistorySegment, alpha: f64, steps: usize) -> Result<Self> {
        let n = hist.grid.n();
        let w = grunwald_weights(alpha, n)?.weights().to_vec();
        let mut buf = Vec::with_capacity((n + 1 + steps) * hist.dim);
        buf.extend_from_slice(&hist.data);
        Ok(Stepper {
            dim: hist.dim,
            n,
            w,
            buf,
        })
    }

    /// `-Σ_{k=1}^{N} w_k x_{now-k}` for the state about to be appended.
    fn memory_term(&self, out: &mut [f64]) {
        let d = self.dim;
        let now = self.buf.len() / d;
        out.iter_mut().for_each(|x| *x = 0.0);
        for k in 1..=self.n {
            let wk = self.w[k];
            let past = &self.buf[(now - k) * d..(now - k + 1) * d];
            for (o, x) in out.iter_mut().zip(past) {
                *o -= wk * x;
            }
        }
    }

    fn last(&self) -> &[f64] {
        &self.buf[self.buf.len() - self.dim..]
    }

    fn finish(self, hist: &HistorySegment) -> Trajectory {
        let skip = self.n * self.dim;
        Trajectory {
            t0: hist.t0,
            h: hist.grid.h(),
            dim: self.dim,
            states: self.buf[skip..].to_vec(),
            history: hist.clone(),
        }
    }
}

/// Implicit fixed-memory scheme for `D_L^α x = A x`:
/// `(I - h^α A) x_n = -Σ_{k=1}^{N} w_k x_{n-k}`, factored once.
pub fn solve_linear(
    a: &DMatrix<f64>,
    hist: &HistorySegment,
    alpha: f64,
    t_end: f64,
) -> Result<Trajectory> {
    let d = hist.dim;
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::invalid(format!(
            "matrix is {}x{}, history has dimension {d}",
            a.nrows(),
            a.ncols()
        )));
    }
    let steps = step_count(hist, t_end)?;
    let ha = hist.grid.h().powf(alpha);
    let m = DMatrix::<f64>::identity(d, d) - a * ha;
    let lu = m.clone().lu();
    let inv = lu.try_inverse().ok_or(Error::Singular(f64::INFINITY))?;
    let cond = one_norm(&m) * one_norm(&inv);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Singular(cond));
    }

    let mut st = Stepper::new(hist, alpha, steps)?;
    let mut rhs = DVector::<f64>::zeros(d);
    for _ in 0..steps {
        st.memory_term(rhs.as_mut_slice());
        let x = lu.solve(&rhs).ok_or(Error::Singular(cond))?;
        st.buf.extend_from_slice(x.as_slice());
    }
    Ok(st.finish(hist))
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Fixed-point iteration `x ← h^α F(x) - Σ_{k≥1} w_k x_{n-k}` per step,
/// seeded with the previous state, until the update is at most `fp_tol`.
pub fn solve_nonlinear(
    field: &dyn VectorField,
    hist: &HistorySegment,
    alpha: f64,
    t_end: f64,
    fp_tol: f64,
    fp_max: usize,
) -> Result<Trajectory> {
    let d = hist.dim;
    if field.dim() != d {
        return Err(Error::invalid(format!(
            "vector field has dimension {}, history {d}",
            field.dim()
        )));
    }
    if !(fp_tol > 0.0) || fp_max == 0 {
        return Err(Error::invalid("need fp_tol > 0 and fp_max >= 1"));
    }
    let steps = step_count(hist, t_end)?;
    let ha = hist.grid.h().powf(alpha);
    let mut st = Stepper::new(hist, alpha, steps)?;
    let mut mem = vec![0.0; d];
    let mut fx = vec![0.0; d];
    for step in 1..=steps {
        st.memory_term(&mut mem);
        let mut x = st.last().to_vec();
        let mut converged = false;
        let mut residual = f64::INFINITY;
        for _ in 0..fp_max {
            field.eval(&x, &mut fx)?;
            residual = 0.0;
            for j in 0..d {
                let next = ha * fx[j] + mem[j];
                residual = residual.max((next - x[j]).abs());
                x[j] = next;
            }
            if !residual.is_finite() {
                break;
            }
            if residual <= fp_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::SolverNonConvergence {
                step,
                iterations: fp_max,
                residual,
            });
        }
        st.buf.extend_from_slice(&x);
    }
    Ok(st.finish(hist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grunwald::{fm_gl_derivative, FracOrder};
    use std::f64::consts::PI;

    fn rot_grid(n: usize) -> GridSpec {
        GridSpec::new(2.0 * PI, n).unwrap()
    }

    #[test]
    fn history_layout() {
        let g = GridSpec::new(1.0, 4).unwrap();
        let h = HistorySegment::from_specs(2.0, g, &[FunctionSpec::power(1)]).unwrap();
        assert_eq!(h.len(), 5);
        assert_eq!(h.sample(4), &[2.0]);
        assert_eq!(h.sample(0), &[1.0]);
        assert_eq!(h.time(0), 1.0);
        assert!(HistorySegment::from_samples(0.0, g, &vec![vec![1.0]; 3]).is_err());
    }

    #[test]
    fn zero_history_stays_zero() {
        let g = rot_grid(256);
        let sys = RotationSystem::periodic(0.5, 2.0 * PI).unwrap();
        let h = HistorySegment::cos_sin(0.0, g, 0.0).unwrap();
        let tr = solve_linear(&sys.matrix(), &h, 0.5, 6.0 * PI).unwrap();
        assert!(tr.states_flat().iter().all(|&x| x == 0.0));
        assert_eq!(periodicity_defect(&tr, 2.0 * PI).unwrap(), 0.0);
    }

    #[test]
    fn end_time_rounds_up_to_grid() {
        let g = GridSpec::new(1.0, 10).unwrap();
        let h = HistorySegment::constant(0.0, g, &[1.0]).unwrap();
        let tr = solve_linear(&DMatrix::zeros(1, 1), &h, 0.5, 0.25).unwrap();
        assert_eq!(tr.len(), 4);
        assert!(tr.time(3) >= 0.25);
    }

    #[test]
    fn constant_history_decays_without_forcing() {
        let g = GridSpec::new(1.0, 100).unwrap();
        let h = HistorySegment::constant(0.0, g, &[1.0]).unwrap();
        let tr = solve_linear(&DMatrix::zeros(1, 1), &h, 0.5, 20.0).unwrap();
        let xs = tr.component(0);
        assert!(xs[1] < 1.0);
        assert!(xs.last().unwrap().abs() < 0.05, "{}", xs.last().unwrap());
    }

    #[test]
    fn rotation_system_matches_paper_coefficients_at_two_pi() {
        let p = RotationSystem::periodic(0.5, 2.0 * PI).unwrap();
        let k = RotationSystem::from_coeffs(sincos_coeffs(0.5, 2.0 * PI).unwrap());
        assert!((p.a - k.a).abs() < 1e-12 && (p.b - k.b).abs() < 1e-12);
    }

    #[test]
    fn periodic_solution_first_order() {
        let mut devs = Vec::new();
        for n in [512, 1024] {
            let g = rot_grid(n);
            let sys = RotationSystem::periodic(0.5, 2.0 * PI).unwrap();
            let h = HistorySegment::cos_sin(0.0, g, 1.0).unwrap();
            let tr = solve_linear(&sys.matrix(), &h, 0.5, 6.0 * PI).unwrap();
            devs.push(tr.all().max_deviation(|t| vec![t.cos(), t.sin()]));
        }
        let ratio = devs[1] / devs[0];
        assert!((0.35..=0.65).contains(&ratio), "{devs:?}");
    }

    #[test]
    fn any_memory_length_has_the_periodic_solution() {
        let l = 5.0;
        let g = GridSpec::new(l, 2000).unwrap();
        let sys = RotationSystem::periodic(0.7, l).unwrap();
        let h = HistorySegment::cos_sin(0.0, g, 2.0).unwrap();
        let tr = solve_linear(&sys.matrix(), &h, 0.7, 10.0).unwrap();
        let dev = tr
            .all()
            .max_deviation(|t| vec![2.0 * t.cos(), 2.0 * t.sin()]);
        assert!(dev < 5e-2, "{dev}");
        // without the e^{-iL} phase the circle is not a solution
        let raw = RotationSystem::from_coeffs(sincos_coeffs(0.7, l).unwrap());
        let off = solve_linear(&raw.matrix(), &h, 0.7, 10.0).unwrap();
        assert!(
            off.all()
                .max_deviation(|t| vec![2.0 * t.cos(), 2.0 * t.sin()])
                > 0.5
        );
    }

    #[test]
    fn stepping_rule_is_the_discrete_operator() {
        let g = GridSpec::new(2.0, 64).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[-0.3, 1.1, -0.7, 0.2]);
        let h = HistorySegment::from_specs(0.0, g, &[FunctionSpec::cos(), FunctionSpec::exp()])
            .unwrap();
        let tr = solve_linear(&a, &h, 0.6, 3.0).unwrap();
        let order = FracOrder::new(0.6).unwrap();
        let specs = [tr.component_spec(0).unwrap(), tr.component_spec(1).unwrap()];
        for i in [1, 10, tr.len() - 1] {
            let ax = &a * DVector::from_column_slice(tr.state(i));
            for j in 0..2 {
                let d = fm_gl_derivative(&specs[j], tr.time(i), &order, &g).unwrap();
                assert!(
                    (d - ax[j]).abs() < 1e-10,
                    "step {i} comp {j}: {d} vs {}",
                    ax[j]
                );
            }
        }
    }

    #[test]
    fn linear_in_history() {
        let g = rot_grid(128);
        let sys = RotationSystem::periodic(0.4, 2.0 * PI).unwrap();
        let h = HistorySegment::from_specs(
            0.0,
            g,
            &[FunctionSpec::parse("t^2").unwrap(), FunctionSpec::sin()],
        )
        .unwrap();
        let base = solve_linear(&sys.matrix(), &h, 0.4, 8.0).unwrap();
        let scaled = solve_linear(&sys.matrix(), &h.scaled(-3.5), 0.4, 8.0).unwrap();
        for (x, y) in base.states_flat().iter().zip(scaled.states_flat()) {
            assert!((y + 3.5 * x).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn rotation_equivariance() {
        let g = rot_grid(128);
        let sys = RotationSystem::periodic(0.5, 2.0 * PI).unwrap();
        let (s, c) = 0.9f64.sin_cos();
        let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let h = HistorySegment::from_specs(0.0, g, &[FunctionSpec::exp(), FunctionSpec::cos()])
            .unwrap();
        let rotated_first = solve_linear(&sys.matrix(), &h.mapped(&r).unwrap(), 0.5, 6.0).unwrap();
        let plain = solve_linear(&sys.matrix(), &h, 0.5, 6.0).unwrap();
        for i in 0..plain.len() {
            let y = &r * DVector::from_column_slice(plain.state(i));
            for j in 0..2 {
                assert!((y[j] - rotated_first.state(i)[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_step_matrix() {
        // h^α A = I makes I - h^α A zero
        let g = GridSpec::new(1.0, 4).unwrap();
        let a = DMatrix::identity(1, 1) * 0.25f64.powf(-0.5);
        let h = HistorySegment::constant(0.0, g, &[1.0]).unwrap();
        assert!(matches!(
            solve_linear(&a, &h, 0.5, 1.0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn nonlinear_linear_case_agrees() {
        let g = GridSpec::new(1.5, 96).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[-0.5, 0.8, -0.8, -0.5]);
        let h = HistorySegment::from_specs(0.0, g, &[FunctionSpec::sin(), FunctionSpec::cos()])
            .unwrap();
        let lin = solve_linear(&a, &h, 0.8, 4.0).unwrap();
        let tol = 1e-13;
        let non = solve_nonlinear(&LinearField(a), &h, 0.8, 4.0, tol, 200).unwrap();
        for (x, y) in lin.states_flat().iter().zip(non.states_flat()) {
            assert!((x - y).abs() < 10.0 * tol * lin.len() as f64);
        }
    }

    #[test]
    fn nonlinear_zero_field() {
        let g = GridSpec::new(1.0, 32).unwrap();
        let h = HistorySegment::constant(0.0, g, &[0.0, 0.0]).unwrap();
        let f = FnField {
            dim: 2,
            f: |_: &[f64], out: &mut [f64]| {
                out.iter_mut().for_each(|o| *o = 0.0);
                Ok(())
            },
        };
        let tr = solve_nonlinear(&f, &h, 0.5, 2.0, 1e-14, 10).unwrap();
        assert!(tr.states_flat().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn nonlinear_decay_to_zero() {
        let g = GridSpec::new(1.0, 64).unwrap();
        let h = HistorySegment::constant(0.0, g, &[1.0]).unwrap();
        let f = FnField {
            dim: 1,
            f: |x: &[f64], out: &mut [f64]| {
                out[0] = -x[0];
                Ok(())
            },
        };
        let tr = solve_nonlinear(&f, &h, 0.5, 15.0, 1e-13, 100).unwrap();
        let xs = tr.component(0);
        assert!(xs.last().unwrap().abs() < 0.1 * xs[0].abs());
    }

    #[test]
    fn nonlinear_failure_reports_step() {
        let g = GridSpec::new(1.0, 4).unwrap();
        let h = HistorySegment::constant(0.0, g, &[1.0]).unwrap();
        let f = FnField {
            dim: 1,
            f: |x: &[f64], out: &mut [f64]| {
                out[0] = 50.0 * x[0] * x[0];
                Ok(())
            },
        };
        match solve_nonlinear(&f, &h, 0.5, 1.0, 1e-12, 20) {
            Err(Error::SolverNonConvergence {
                step, iterations, ..
            }) => {
                assert_eq!(step, 1);
                assert_eq!(iterations, 20);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defect_checks() {
        let g = rot_grid(64);
        let h = HistorySegment::cos_sin(0.0, g, 1.0).unwrap();
        let tr = solve_linear(
            &RotationSystem::periodic(0.5, 2.0 * PI).unwrap().matrix(),
            &h,
            0.5,
            4.0 * PI,
        )
        .unwrap();
        assert!(matches!(
            periodicity_defect(&tr, 1.0),
            Err(Error::GridMisaligned { .. })
        ));
        assert!(periodicity_defect(&tr, 4.0 * PI).is_err());
        let w = tr.window(2.0 * PI, 4.0 * PI);
        assert_eq!(w.len(), 65);
        assert!((w.t0 - 2.0 * PI).abs() < 1e-12);
    }
}
