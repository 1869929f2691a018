//! One function per subcommand, each returning a [`Report`].

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use fmgl::analysis::{interpolation_curve, memory_sweep, nonperiodicity_demo};
use fmgl::funcspec::random_expr;
use fmgl::grunwald::{fm_gl_derivative_series, grunwald_weights};
use fmgl::solver::period_in_steps;
use fmgl::specfun::{gamma as gamma_fn, mittag_leffler, recip_gamma, MlQuery};
use fmgl::*;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{Cell, Report, Table};
use crate::{
    ClassicArgs, CorpusArgs, DeriveArgs, Fig1Args, GammaArgs, InterpArgs, Method, MlArgs,
    OracleArgs, SimulateArgs, SweepArgs, SystemKind, WeightsArgs,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fmgl::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::InvalidArgument(_) | Error::Parse(_) | Error::GridMisaligned { .. } => 2,
                Error::Singular(_) | Error::SolverNonConvergence { .. } => 4,
                _ => 3,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("argument structs serialize")
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `t0, t0 + h, …` up to `t1` (rounding slack 1e-9 steps).
fn step_grid(t0: f64, t1: f64, h: f64) -> CliResult<Vec<f64>> {
    if t1.is_nan() || t0.is_nan() || t1 <= t0 {
        return Err(usage(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    let n = ((t1 - t0) / h + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| t0 + i as f64 * h).collect())
}

fn point_grid(t0: f64, t1: f64, points: usize) -> CliResult<Vec<f64>> {
    if t1.is_nan() || t0.is_nan() || t1 <= t0 || points < 2 {
        return Err(usage("need t1 > t0 and at least 2 points"));
    }
    Ok((0..points)
        .map(|i| t0 + (t1 - t0) * i as f64 / (points - 1) as f64)
        .collect())
}

pub fn derive(a: &DeriveArgs) -> CliResult<Report> {
    let f = FunctionSpec::from_name(&a.function)?;
    let order = FracOrder::new(a.alpha)?;
    let grid = GridSpec::new(a.memory, a.n)?;
    grid.check_order(&order)?;
    let times = step_grid(a.t0, a.t1, grid.h())?;

    let mut fd_error = 0.0f64;
    let integral = |t: f64| fm_gl_integral_form(&f, t, &order, a.memory, a.panels);
    let values: Vec<f64> = match a.method {
        Method::Discrete => fm_gl_derivative_series(&f, a.t0, a.t1, &order, &grid)?.values,
        Method::Integral => {
            let est = times
                .par_iter()
                .map(|&t| integral(t))
                .collect::<Result<Vec<_>>>()?;
            fd_error = est.iter().map(|e| e.max_fd_error).fold(0.0, f64::max);
            est.into_iter().map(|e| e.value).collect()
        }
        Method::Oracle => times
            .par_iter()
            .map(|&t| closed_form(&f, t, a.alpha, a.memory))
            .collect::<Result<_>>()?,
    };

    let oracle: Option<Vec<f64>> = if a.compare {
        Some(if f.as_catalog().is_some() {
            times
                .par_iter()
                .map(|&t| closed_form(&f, t, a.alpha, a.memory))
                .collect::<Result<_>>()?
        } else {
            let est = times
                .par_iter()
                .map(|&t| integral(t))
                .collect::<Result<Vec<_>>>()?;
            fd_error = fd_error.max(est.iter().map(|e| e.max_fd_error).fold(0.0, f64::max));
            est.into_iter().map(|e| e.value).collect()
        })
    } else {
        None
    };
    if fd_error > fmgl::integral::FD_WARN_THRESHOLD {
        eprintln!("fmgl: warning: finite-difference derivatives with estimated error {fd_error:e}");
    }

    let mut cols = vec!["t", "value"];
    if oracle.is_some() {
        cols.extend(["oracle", "abs_error"]);
    }
    let mut table = Table::new(cols);
    let mut max_err = 0.0f64;
    for (i, (&t, &v)) in times.iter().zip(&values).enumerate() {
        let mut row = vec![Cell::Num(t), Cell::Num(v)];
        if let Some(o) = &oracle {
            let err = (v - o[i]).abs();
            max_err = max_err.max(err);
            row.extend([Cell::Num(o[i]), Cell::Num(err)]);
        }
        table.push(row);
    }
    let mut r = Report::new("derive", config(a), table).with("h", json!(grid.h()));
    if oracle.is_some() {
        r = r.with("max_abs_error", json!(max_err));
    }
    Ok(r)
}

fn read_matrix(path: &Path) -> CliResult<DMatrix<f64>> {
    let text = fs::read_to_string(path)?;
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| usage(format!("bad matrix entry '{s}'")))
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(usage("matrix file must hold a non-empty square matrix"));
    }
    Ok(DMatrix::from_row_slice(d, d, &rows.concat()))
}

pub fn simulate(a: &SimulateArgs) -> CliResult<Report> {
    let grid = GridSpec::new(a.memory, a.n)?;
    let h = grid.h();
    let (matrix, rotation) = match a.system {
        SystemKind::Rotation => {
            let sys = RotationSystem::periodic(a.alpha, a.memory)?;
            (sys.matrix(), Some(sys))
        }
        SystemKind::File => {
            let p = a
                .matrix_file
                .as_deref()
                .ok_or_else(|| usage("--system file needs --matrix-file"))?;
            (read_matrix(p)?, None)
        }
    };
    let cossin = a.history.trim() == "cossin";
    let history = if cossin {
        HistorySegment::cos_sin(a.t0, grid, a.c)?
    } else {
        let comps = a
            .history
            .split(';')
            .map(FunctionSpec::from_name)
            .collect::<Result<Vec<_>>>()?;
        HistorySegment::from_specs(a.t0, grid, &comps)?.scaled(a.c)
    };
    if history.dim() != matrix.nrows() {
        return Err(usage(format!(
            "history has {} components, system has dimension {}",
            history.dim(),
            matrix.nrows()
        )));
    }
    FracOrder::new(a.alpha)?;
    let traj = solve_linear(&matrix, &history, a.alpha, a.t_end)?;

    let period = match a.period {
        Some(p) => period_in_steps(p, h)? as f64 * h,
        None => (2.0 * PI / h).round().max(1.0) * h,
    };
    let end = traj.time(traj.len() - 1);
    // skip the first period when there is room for two more
    let defect = if end - (a.t0 + period) >= 2.0 * period - 1e-9 * h {
        Some(traj.window(a.t0 + period, end).periodicity_defect(period)?)
    } else if end - a.t0 >= 2.0 * period - 1e-9 * h {
        Some(traj.all().periodicity_defect(period)?)
    } else {
        None
    };
    let deviation = (rotation.is_some() && cossin).then(|| {
        traj.all()
            .max_deviation(|t| vec![a.c * t.cos(), a.c * t.sin()])
    });

    let mut cols = vec!["t".to_string()];
    cols.extend((1..=traj.dim).map(|j| format!("x{j}")));
    let mut table = Table::new(cols);
    for i in 0..traj.len() {
        let mut row = vec![Cell::Num(traj.time(i))];
        row.extend(traj.state(i).iter().map(|&x| Cell::Num(x)));
        table.push(row);
    }
    let mut r = Report::new("simulate", config(a), table)
        .with_sidecar()
        .with("alpha", json!(a.alpha))
        .with("L", json!(a.memory))
        .with("N", json!(a.n))
        .with("h", json!(h))
        .with("period", json!(period))
        .with("periodicity_defect", json!(defect))
        .with("max_deviation_from_exact", json!(deviation));
    if let Some(sys) = rotation {
        r = r.with("a", json!(sys.a)).with("b", json!(sys.b));
    }
    Ok(r)
}

pub fn weights(a: &WeightsArgs) -> CliResult<Report> {
    let w = grunwald_weights(a.alpha, a.n)?;
    let mut table = Table::new(["k", "w", "partial_sum"]);
    let mut s = 0.0;
    for (k, &wk) in w.weights().iter().enumerate() {
        s += wk;
        table.push(vec![Cell::Int(k as i64), Cell::Num(wk), Cell::Num(s)]);
    }
    Ok(Report::new("weights", config(a), table))
}

pub fn ml(a: &MlArgs) -> CliResult<Report> {
    let v = mittag_leffler(&MlQuery::new(a.alpha, a.beta, a.z).with_tol(a.tol))?;
    let mut table = Table::new(["alpha", "beta", "z", "value"]);
    table.push(vec![a.alpha.into(), a.beta.into(), a.z.into(), v.into()]);
    Ok(Report::new("ml", config(a), table))
}

pub fn gamma(a: &GammaArgs) -> CliResult<Report> {
    let mut table = Table::new(["x", "gamma", "recip_gamma"]);
    for &x in &a.x {
        table.push(vec![x.into(), gamma_fn(x)?.into(), recip_gamma(x).into()]);
    }
    Ok(Report::new("gamma", config(a), table))
}

pub fn classic(a: &ClassicArgs) -> CliResult<Report> {
    let f = FunctionSpec::from_name(&a.function)?;
    let times = point_grid(a.t0, a.t1, a.points)?;
    if times[0] <= a.a {
        return Err(usage(format!(
            "all times must exceed the terminal a = {}",
            a.a
        )));
    }
    if a.compare && (f != FunctionSpec::sin() || a.a != 0.0) {
        return Err(usage("--compare needs --fn sin and a = 0"));
    }
    let values = times
        .par_iter()
        .map(|&t| classical_gl_derivative(&f, t, a.alpha, a.a, a.steps))
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec!["t", "value"];
    if a.compare {
        cols.extend(["oracle", "abs_error"]);
    }
    let mut table = Table::new(cols);
    for (&t, &v) in times.iter().zip(&values) {
        let mut row = vec![Cell::Num(t), Cell::Num(v)];
        if a.compare {
            let o = classical_sin(t, a.alpha)?;
            row.extend([Cell::Num(o), Cell::Num((v - o).abs())]);
        }
        table.push(row);
    }
    Ok(Report::new("classic", config(a), table))
}

pub fn sweep(a: &SweepArgs) -> CliResult<Report> {
    let f = FunctionSpec::from_name(&a.function)?;
    let s = memory_sweep(&f, a.alpha, (a.t0, a.t1), &a.ls, a.points)?;
    let mut cols = vec!["t".to_string()];
    cols.extend(s.series.iter().map(|(l, _)| format!("L={l:?}")));
    let mut table = Table::new(cols);
    for (i, &t) in s.times.iter().enumerate() {
        let mut row = vec![Cell::Num(t)];
        row.extend(s.series.iter().map(|(_, v)| Cell::Num(v[i])));
        table.push(row);
    }
    Ok(Report::new("sweep", config(a), table)
        .with_sidecar()
        .with("sup_distances", json!(s.sup_distances)))
}

pub fn interp(a: &InterpArgs) -> CliResult<Report> {
    let f = FunctionSpec::from_name(&a.function)?;
    let rows = interpolation_curve(&f, a.t, a.memory, &a.alphas)?;
    let mut table = Table::new([
        "alpha",
        "value",
        "reference_order",
        "reference",
        "abs_error",
    ]);
    for r in rows {
        table.push(vec![
            r.alpha.into(),
            r.value.into(),
            Cell::Int(r.reference_order as i64),
            r.reference.into(),
            r.abs_error.into(),
        ]);
    }
    Ok(Report::new("interp", config(a), table).with_sidecar())
}

pub fn fig1(a: &Fig1Args) -> CliResult<Report> {
    let d = nonperiodicity_demo(a.alpha, a.t_max, a.steps)?;
    let mut table = Table::new(["t", "classical", "envelope", "difference"]);
    for r in &d.rows {
        table.push(vec![
            r.t.into(),
            r.classical.into(),
            r.envelope.into(),
            r.difference.into(),
        ]);
    }
    Ok(Report::new("fig1", config(a), table)
        .with_sidecar()
        .with("classical_defect", json!(d.classical_defect))
        .with("fixed_memory_defect", json!(d.fixed_memory_defect)))
}

pub fn oracle(a: &OracleArgs) -> CliResult<Report> {
    let f = FunctionSpec::from_name(&a.function)?;
    if f.as_catalog().is_none() {
        return Err(usage(
            "oracle needs a catalog function (sin, cos, exp, const:, pow:, poly:, fourier:)",
        ));
    }
    let times = point_grid(a.t0, a.t1, a.points)?;
    let mut table = Table::new(["t", "value"]);
    for &t in &times {
        table.push(vec![
            t.into(),
            closed_form(&f, t, a.alpha, a.memory)?.into(),
        ]);
    }
    Ok(Report::new("oracle", config(a), table))
}

pub fn corpus(a: &CorpusArgs) -> CliResult<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut table = Table::new(["expr"]);
    for _ in 0..a.count {
        table.push(vec![Cell::Text(random_expr(&mut rng, a.depth).to_string())]);
    }
    Ok(Report::new("corpus", config(a), table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_grid_includes_endpoint_despite_rounding() {
        let g = step_grid(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g[10] - 1.0).abs() < 1e-15);
        assert!(step_grid(1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn point_grid_hits_both_ends() {
        let g = point_grid(-1.0, 2.0, 4).unwrap();
        assert_eq!(g, [-1.0, 0.0, 1.0, 2.0]);
        assert!(point_grid(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(
            CliError::from(Error::InvalidArgument("x".into())).exit_code(),
            2
        );
        assert_eq!(CliError::from(Error::Singular(1e16)).exit_code(), 4);
        assert_eq!(CliError::from(Error::Degenerate(1e-14)).exit_code(), 3);
        assert_eq!(usage("x").exit_code(), 2);
    }

    #[test]
    fn matrix_file_accepts_commas_spaces_and_comments() {
        let p = std::env::temp_dir().join(format!("fmgl-matrix-{}.txt", std::process::id()));
        fs::write(&p, "# rotation\n0, -1\n1 0\n\n").unwrap();
        let m = read_matrix(&p).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        fs::write(&p, "1 2\n3\n").unwrap();
        assert_eq!(read_matrix(&p).unwrap_err().exit_code(), 2);
        fs::remove_file(&p).ok();
    }

    #[test]
    fn weights_partial_sums_column() {
        let r = weights(&WeightsArgs { alpha: 0.5, n: 3 }).unwrap();
        let csv = r.table.to_csv();
        assert_eq!(csv.lines().nth(3), Some("2,-0.125,0.375"));
    }
}
