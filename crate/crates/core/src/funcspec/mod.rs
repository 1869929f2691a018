//! Scalar functions of time: an analytic catalog with exact derivatives,
//! parsed expressions, and sampled data.

mod expr;

pub use expr::{parse, random_expr, BinOp, Expr, ExprKind, Func, ParseError, ParseErrorKind, Span};

use crate::error::{Error, Result};

/// Whether derivatives are exact or come from finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capability {
    Analytic,
    FiniteDifference,
}

/// `Σ_j sin_coef·sin(j t) + cos_coef·cos(j t)`, one entry per harmonic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerm {
    pub harmonic: u32,
    pub sin_coef: f64,
    pub cos_coef: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Catalog {
    Constant(f64),
    Sin {
        coef: f64,
    },
    Cos {
        coef: f64,
    },
    Exp {
        coef: f64,
    },
    /// `coef · t^n`
    Power {
        n: u32,
        coef: f64,
    },
    /// `c[0] + c[1] t + c[2] t² + …`
    Polynomial(Vec<f64>),
    Fourier(Vec<FourierTerm>),
}

impl Catalog {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Catalog::Constant(c) => *c,
            Catalog::Sin { coef } => coef * t.sin(),
            Catalog::Cos { coef } => coef * t.cos(),
            Catalog::Exp { coef } => coef * t.exp(),
            Catalog::Power { n, coef } => coef * t.powi(*n as i32),
            Catalog::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci),
            Catalog::Fourier(terms) => terms
                .iter()
                .map(|term| {
                    let x = term.harmonic as f64 * t;
                    term.sin_coef * x.sin() + term.cos_coef * x.cos()
                })
                .sum(),
        }
    }

    fn derivative1(&self) -> Catalog {
        match self {
            Catalog::Constant(_) => Catalog::Constant(0.0),
            Catalog::Sin { coef } => Catalog::Cos { coef: *coef },
            Catalog::Cos { coef } => Catalog::Sin { coef: -coef },
            Catalog::Exp { coef } => Catalog::Exp { coef: *coef },
            Catalog::Power { n: 0, .. } => Catalog::Constant(0.0),
            Catalog::Power { n, coef } => Catalog::Power {
                n: n - 1,
                coef: coef * *n as f64,
            },
            Catalog::Polynomial(c) => Catalog::Polynomial(
                c.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, ci)| ci * i as f64)
                    .collect(),
            ),
            Catalog::Fourier(terms) => Catalog::Fourier(
                terms
                    .iter()
                    .map(|term| {
                        let j = term.harmonic as f64;
                        FourierTerm {
                            harmonic: term.harmonic,
                            sin_coef: -j * term.cos_coef,
                            cos_coef: j * term.sin_coef,
                        }
                    })
                    .collect(),
            ),
        }
        .normalized()
    }

    fn normalized(self) -> Catalog {
        match self {
            Catalog::Power { n: 0, coef } => Catalog::Constant(coef),
            Catalog::Polynomial(mut c) => {
                while c.len() > 1 && c.last() == Some(&0.0) {
                    c.pop();
                }
                match c.len() {
                    0 => Catalog::Constant(0.0),
                    1 => Catalog::Constant(c[0]),
                    _ => Catalog::Polynomial(c),
                }
            }
            other => other,
        }
    }
}

/// Piecewise-linear interpolant through `(times[i], values[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Samples {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.is_empty() {
            return Err(Error::invalid(
                "samples need equally many times and values, at least one",
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("sample times must be strictly increasing"));
        }
        Ok(Samples { times, values })
    }

    /// Uniform grid `t0 + i h`.
    pub fn uniform(t0: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len()).map(|i| t0 + i as f64 * h).collect();
        Samples::new(times, values)
    }

    fn eval(&self, t: f64) -> Result<f64> {
        let first = self.times[0];
        let last = *self.times.last().unwrap();
        let slack = 1e-12 * t.abs().max(1.0);
        if t < first - slack || t > last + slack {
            return Err(Error::domain(format!(
                "t = {t} outside the sampled range [{first}, {last}]"
            )));
        }
        if self.times.len() == 1 {
            return Ok(self.values[0]);
        }
        let i = self.times.partition_point(|&x| x <= t);
        let i = i.clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        if t == t0 {
            return Ok(v0);
        }
        if t == t1 {
            return Ok(v1);
        }
        let s = (t - t0) / (t1 - t0);
        Ok(v0 + s * (v1 - v0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Catalog(Catalog),
    Expression(Expr),
    Samples(Samples),
    /// `order`-th derivative of `base` by central differences.
    FiniteDiff {
        base: Box<FunctionSpec>,
        order: u32,
    },
}

impl FunctionSpec {
    pub fn sin() -> Self {
        FunctionSpec::Catalog(Catalog::Sin { coef: 1.0 })
    }

    pub fn cos() -> Self {
        FunctionSpec::Catalog(Catalog::Cos { coef: 1.0 })
    }

    pub fn exp() -> Self {
        FunctionSpec::Catalog(Catalog::Exp { coef: 1.0 })
    }

    pub fn constant(c: f64) -> Self {
        FunctionSpec::Catalog(Catalog::Constant(c))
    }

    pub fn power(n: u32) -> Self {
        FunctionSpec::Catalog(Catalog::Power { n, coef: 1.0 }.normalized())
    }

    pub fn polynomial(coefs: Vec<f64>) -> Self {
        FunctionSpec::Catalog(Catalog::Polynomial(coefs).normalized())
    }

    pub fn fourier(terms: Vec<FourierTerm>) -> Self {
        FunctionSpec::Catalog(Catalog::Fourier(terms))
    }

    pub fn samples(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(FunctionSpec::Samples(Samples::new(times, values)?))
    }

    /// Parses an expression; a `t`-free expression becomes a catalog constant.
    pub fn parse(src: &str) -> Result<Self> {
        let e = parse(src)?;
        if e.is_constant() {
            return Ok(FunctionSpec::constant(e.eval(0.0)?));
        }
        Ok(FunctionSpec::Expression(e))
    }

    /// Catalog names used on the command line, falling back to an expression:
    /// `sin`, `cos`, `exp`, `const:C`, `pow:N`, `poly:c0,c1,…`,
    /// `fourier:s1,c1;s2,c2;…` (harmonics numbered from 1).
    pub fn from_name(src: &str) -> Result<Self> {
        let s = src.trim();
        match s {
            "sin" => return Ok(Self::sin()),
            "cos" => return Ok(Self::cos()),
            "exp" => return Ok(Self::exp()),
            _ => {}
        }
        let bad = |what: &str| Error::invalid(format!("malformed {what} in '{src}'"));
        if let Some(c) = s.strip_prefix("const:") {
            return Ok(Self::constant(
                c.trim().parse().map_err(|_| bad("constant"))?,
            ));
        }
        if let Some(n) = s.strip_prefix("pow:") {
            return Ok(Self::power(n.trim().parse().map_err(|_| bad("power"))?));
        }
        if let Some(c) = s.strip_prefix("poly:") {
            let coefs = c
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("polynomial"))?;
            return Ok(Self::polynomial(coefs));
        }
        if let Some(c) = s.strip_prefix("fourier:") {
            let mut terms = Vec::new();
            for (j, pair) in c.split(';').enumerate() {
                let xs = pair
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("fourier term"))?;
                let [s_coef, c_coef] = xs[..] else {
                    return Err(bad("fourier term"));
                };
                terms.push(FourierTerm {
                    harmonic: j as u32 + 1,
                    sin_coef: s_coef,
                    cos_coef: c_coef,
                });
            }
            return Ok(Self::fourier(terms));
        }
        Self::parse(s)
    }

    pub fn capability(&self) -> Capability {
        match self {
            FunctionSpec::Catalog(_) => Capability::Analytic,
            _ => Capability::FiniteDifference,
        }
    }

    pub fn as_catalog(&self) -> Option<&Catalog> {
        match self {
            FunctionSpec::Catalog(c) => Some(c),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            FunctionSpec::Catalog(c) => Ok(c.eval(t)),
            FunctionSpec::Expression(e) => e.eval(t),
            FunctionSpec::Samples(s) => s.eval(t),
            FunctionSpec::FiniteDiff { base, order } => {
                Ok(central_difference(base, t, *order)?.value)
            }
        }
    }

    /// Value plus an error estimate (zero for analytic variants).
    pub fn eval_with_error(&self, t: f64) -> Result<FdEstimate> {
        match self {
            FunctionSpec::FiniteDiff { base, order } => central_difference(base, t, *order),
            _ => Ok(FdEstimate {
                value: self.eval(t)?,
                error: 0.0,
            }),
        }
    }

    pub fn derivative(&self, order: u32) -> FunctionSpec {
        if order == 0 {
            return self.clone();
        }
        match self {
            FunctionSpec::Catalog(c) => {
                let mut d = c.clone();
                for _ in 0..order {
                    d = d.derivative1();
                }
                FunctionSpec::Catalog(d)
            }
            FunctionSpec::FiniteDiff { base, order: k } => FunctionSpec::FiniteDiff {
                base: base.clone(),
                order: k + order,
            },
            other => FunctionSpec::FiniteDiff {
                base: Box::new(other.clone()),
                order,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    pub value: f64,
    pub error: f64,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Central difference of order `k` with spacing `s`, error O(s²).
fn central_raw(f: &FunctionSpec, t: f64, k: u32, s: f64) -> Result<f64> {
    let half = k as f64 / 2.0;
    let mut acc = 0.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(k, j) * f.eval(t + (half - j as f64) * s)?;
    }
    Ok(acc / s.powi(k as i32))
}

/// One Richardson step on the central difference gives O(s⁴); the step
/// balances that truncation against roundoff ε/s^k.
fn central_difference(f: &FunctionSpec, t: f64, k: u32) -> Result<FdEstimate> {
    if k == 0 {
        return Ok(FdEstimate {
            value: f.eval(t)?,
            error: 0.0,
        });
    }
    let s = f64::EPSILON.powf(1.0 / (k as f64 + 4.0)) * t.abs().max(1.0);
    let d1 = central_raw(f, t, k, s)?;
    let d2 = central_raw(f, t, k, 2.0 * s)?;
    let d4 = central_raw(f, t, k, 4.0 * s)?;
    let fine = (4.0 * d1 - d2) / 3.0;
    let coarse = (4.0 * d2 - d4) / 3.0;
    Ok(FdEstimate {
        value: fine,
        error: (fine - coarse).abs() / 15.0,
    })
}
