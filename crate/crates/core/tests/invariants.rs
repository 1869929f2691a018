use std::f64::consts::PI;

use fmgl::funcspec::{parse, random_expr, FourierTerm};
use fmgl::specfun::{gamma, ml, recip_gamma};
use fmgl::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(-1)^n C(α-1, n) = Π_{j=1}^{n} (j - α) / j`
fn partial_sum_oracle(alpha: f64, n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * (j as f64 - alpha) / j as f64)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn gamma_recurrence_on_grid() {
    for i in 1..500 {
        let x = i as f64 * 0.01;
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        assert!(rel(lhs, rhs) <= 1e-12, "x = {x}: {lhs} vs {rhs}");
    }
}

#[test]
fn gamma_times_reciprocal_is_one() {
    for i in -499..500 {
        let x = i as f64 * 0.01 + 0.005;
        assert!(
            rel(gamma(x).unwrap() * recip_gamma(x), 1.0) <= 1e-12,
            "x = {x}"
        );
    }
}

#[test]
fn gamma_against_euler_limit() {
    let n = 1_000_000u32;
    for x in [0.3, 0.5, 1.7] {
        // n! n^x / (x (x+1) … (x+n)) in log form
        let mut log = x * (n as f64).ln() - x.ln();
        for k in 1..=n {
            log += (k as f64).ln() - (x + k as f64).ln();
        }
        assert!(rel(log.exp(), gamma(x).unwrap()) <= 1e-4, "x = {x}");
    }
}

#[test]
fn mittag_leffler_trig_identities_across_switchover() {
    let mut x = 0.5 + 1e-3;
    while x < 20.0 {
        let z = -x * x;
        assert!(
            (ml(2.0, 1.0, z).unwrap() - x.cos()).abs() <= 1e-9,
            "cos at x = {x}"
        );
        assert!(
            (ml(2.0, 2.0, z).unwrap() - x.sin() / x).abs() <= 1e-9,
            "sinc at x = {x}"
        );
        x += 0.0137;
    }
}

#[test]
fn mittag_leffler_exponential() {
    for i in 0..=100 {
        let z = -5.0 + 0.1 * i as f64;
        assert!(rel(ml(1.0, 1.0, z).unwrap(), z.exp()) <= 1e-10, "z = {z}");
    }
}

#[test]
fn weights_partial_sums_well_conditioned() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let alpha: f64 = rand::Rng::gen_range(&mut rng, 0.0..1.9);
        let w = grunwald_weights(alpha, 64).unwrap();
        let mut s = 0.0;
        for (n, wk) in w.weights().iter().enumerate() {
            s += wk;
            let o = partial_sum_oracle(alpha, n);
            assert!(rel(s, o) <= 1e-12, "α {alpha} n {n}: {s} vs {o}");
        }
    }
}

#[test]
fn weights_partial_sums_conditioning_scaled() {
    // Near and past α = 2 the partial sums are far smaller than the weights
    // they add up, so the attainable relative accuracy scales with
    // Σ|w_k| / |S_n|.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let alpha: f64 = rand::Rng::gen_range(&mut rng, 0.0..3.0);
        let w = grunwald_weights(alpha, 64).unwrap();
        let (mut s, mut mass) = (0.0, 0.0);
        for (n, wk) in w.weights().iter().enumerate() {
            s += wk;
            mass += wk.abs();
            let o = partial_sum_oracle(alpha, n);
            let bound = 1e-12 * (mass / o.abs()).max(1.0);
            assert!(
                rel(s, o) <= bound,
                "α {alpha} n {n}: rel {} bound {bound}",
                rel(s, o)
            );
        }
    }
}

#[test]
fn constant_rule_first_order_in_one_over_n() {
    let target = d_constant(1.0, 0.5, 1.0);
    let order = FracOrder::new(0.5).unwrap();
    let errs: Vec<(usize, f64)> = (8..=13)
        .map(|k| {
            let n = 1usize << k;
            let v = fm_gl_derivative(
                &FunctionSpec::constant(1.0),
                0.0,
                &order,
                &GridSpec::new(1.0, n).unwrap(),
            )
            .unwrap();
            (n, (v - target).abs())
        })
        .collect();
    // fit c from the coarsest point and require the bound everywhere
    let c = errs[0].1 * errs[0].0 as f64;
    for (n, e) in &errs {
        assert!(*e <= 1.05 * c / *n as f64, "N {n}: {e} > c/N with c = {c}");
    }
}

#[test]
fn sine_empirical_order_is_one() {
    let order = FracOrder::new(0.5).unwrap();
    let pts: Vec<(f64, f64)> = [500, 1000, 2000]
        .iter()
        .map(|&n| {
            let g = GridSpec::new(30.0, n).unwrap();
            (
                g.h(),
                fm_gl_derivative(&FunctionSpec::sin(), 5.0, &order, &g).unwrap(),
            )
        })
        .collect();
    let p = estimate_convergence_order(&pts).unwrap();
    assert!((p - 1.0).abs() <= 0.2, "{p}");
}

#[test]
fn sine_series_against_closed_form() {
    let order = FracOrder::new(0.5).unwrap();
    // at N = 3000 the first-order error peaks at 2.5e-3
    let g = GridSpec::new(30.0, 6000).unwrap();
    let s = fm_gl_derivative_series(&FunctionSpec::sin(), 0.0, 4.0 * PI, &order, &g).unwrap();
    let k = sincos_coeffs(0.5, 30.0).unwrap();
    for (t, v) in s.iter() {
        assert!((v - k.d_sin(t, 30.0)).abs() <= 2e-3, "t = {t}");
    }
}

#[test]
fn classical_sine_against_mittag_leffler() {
    for t in [0.5, 3.0, 10.0, 20.0, 35.0] {
        let d = classical_gl_derivative(&FunctionSpec::sin(), t, 0.5, 0.0, 8192).unwrap();
        let e = classical_sin(t, 0.5).unwrap();
        assert!((d - e).abs() <= 5e-3, "t = {t}: {d} vs {e}");
    }
}

#[test]
fn classical_is_only_asymptotically_periodic() {
    let at = |t: f64| classical_gl_derivative(&FunctionSpec::sin(), t, 0.5, 0.0, 16384).unwrap();
    let (a, b) = (at(30.0), at(30.0 + 2.0 * PI));
    assert!((a - b).abs() < 1e-2);
    assert!((a - (30.0 + PI / 4.0).sin()).abs() < 2e-2);
    assert!((b - (30.0 + 2.0 * PI + PI / 4.0).sin()).abs() < 2e-2);
}

#[test]
fn parser_round_trip_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let e = random_expr(&mut rng, 4);
        let printed = e.to_string();
        assert_eq!(parse(&printed).unwrap(), e, "{printed}");
    }
}

#[test]
fn finite_difference_wrapper_matches_catalog() {
    let cases = [
        (FunctionSpec::sin(), "sin(t)"),
        (FunctionSpec::exp(), "exp(t)"),
        (FunctionSpec::power(3), "t^3"),
    ];
    for (cat, src) in cases {
        let expr = FunctionSpec::parse(src).unwrap();
        for order in 1..=2 {
            for t in [-1.0, 0.3, 2.0] {
                let a = cat.derivative(order).eval(t).unwrap();
                let b = expr.derivative(order).eval(t).unwrap();
                assert!(
                    (a - b).abs() <= 1e-6,
                    "{src} order {order} t {t}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn fourier_second_derivative_scales_by_square() {
    let f = FunctionSpec::fourier(vec![FourierTerm {
        harmonic: 1,
        sin_coef: 1.0,
        cos_coef: 0.0,
    }]);
    let expected = FunctionSpec::fourier(vec![FourierTerm {
        harmonic: 1,
        sin_coef: -1.0,
        cos_coef: 0.0,
    }]);
    assert_eq!(f.derivative(2), expected);
}

fn catalog_strategy() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        Just(FunctionSpec::sin()),
        Just(FunctionSpec::cos()),
        Just(FunctionSpec::exp()),
        (0u32..6).prop_map(FunctionSpec::power),
        prop::collection::vec(-3.0f64..3.0, 1..5).prop_map(FunctionSpec::polynomial),
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..4).prop_map(|cs| {
            FunctionSpec::fourier(
                cs.into_iter()
                    .enumerate()
                    .map(|(j, (s, c))| FourierTerm {
                        harmonic: j as u32 + 1,
                        sin_coef: s,
                        cos_coef: c,
                    })
                    .collect(),
            )
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derivative_composes(f in catalog_strategy(), j in 0u32..4, k in 0u32..4) {
        prop_assert_eq!(f.derivative(j).derivative(k), f.derivative(j + k));
    }

    #[test]
    fn discrete_operator_is_linear(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        alpha in 0.05f64..2.5,
        t in -5.0f64..5.0,
    ) {
        let g = GridSpec::new(4.0, 400).unwrap();
        let order = FracOrder::new(alpha).unwrap();
        let f = FunctionSpec::sin();
        let h = FunctionSpec::parse("t^2 - exp(-t)").unwrap();
        let combo = FunctionSpec::parse(&format!("{a:?}*sin(t) + {b:?}*(t^2 - exp(-t))")).unwrap();
        let lhs = fm_gl_derivative(&combo, t, &order, &g).unwrap();
        let rhs = a * fm_gl_derivative(&f, t, &order, &g).unwrap()
            + b * fm_gl_derivative(&h, t, &order, &g).unwrap();
        // cancellation in the weighted sum limits what "relative" can mean
        let scale = (a.abs() + b.abs()) * g.h().powf(-alpha) * 60.0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn aligned_series_is_periodic(alpha in 0.05f64..2.9, periods in 1usize..4, start in -3.0f64..3.0) {
        let p = 128;
        let g = GridSpec::new(2.0 * PI * periods as f64, p * periods).unwrap();
        let f = FunctionSpec::fourier(vec![
            FourierTerm { harmonic: 1, sin_coef: 1.0, cos_coef: 0.5 },
            FourierTerm { harmonic: 2, sin_coef: -0.3, cos_coef: 0.0 },
        ]);
        let s = fm_gl_derivative_series(&f, start, start + 4.0 * PI, &FracOrder::new(alpha).unwrap(), &g).unwrap();
        let d = solver::series_periodicity_defect(&s, 2.0 * PI).unwrap();
        let scale = s.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(d <= 1e-13 * scale.max(1.0) * g.h().powf(-alpha).max(1.0), "{}", d);
    }

    #[test]
    fn closed_forms_periodic_and_rotational(t in -50.0f64..50.0, alpha in 0.0f64..2.0, l in 0.5f64..30.0) {
        let k = sincos_coeffs(alpha, l).unwrap();
        prop_assert!((k.d_sin(t + 2.0 * PI, l) - k.d_sin(t, l)).abs() <= 1e-12 * k.a.abs().max(k.b.abs()).max(1.0));
        prop_assert!((k.d_cos(t + 2.0 * PI, l) - k.d_cos(t, l)).abs() <= 1e-12 * k.a.abs().max(k.b.abs()).max(1.0));
        let (s, c) = (k.d_sin(t, l), k.d_cos(t, l));
        prop_assert!((s * s + c * c - (k.a * k.a + k.b * k.b)).abs() <= 1e-12 * (k.a * k.a + k.b * k.b).max(1.0));
    }
}
