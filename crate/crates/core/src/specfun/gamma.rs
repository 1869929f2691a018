use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

// Lanczos approximation after Pugh (2004), r = 10.900511, 11 terms;
// relative accuracy ~1e-15 for x >= 0.5.
const GAMMA_R: f64 = 10.900511;

#[allow(clippy::excessive_precision)]
const GAMMA_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

#[allow(clippy::excessive_precision)]
const TWO_SQRT_E_OVER_PI: f64 = 1.8603827342052657173362492472666631120594218414085755;

/// Distance from a non-positive integer below which `gamma` reports a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

fn lanczos_sum(x: f64) -> f64 {
    GAMMA_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(GAMMA_DK[0], |s, (i, &dk)| s + dk / (x + i as f64 - 1.0))
}

/// Γ(x) for x >= 0.5. The power is split in two so that the result stays
/// finite up to the f64 overflow point of Γ itself (x ≈ 171.6).
fn gamma_pos(x: f64) -> f64 {
    // (n-1)! is exact in f64 through n = 23
    if x == x.floor() && x <= 23.0 {
        let mut f = 1.0;
        for k in 2..x as u32 {
            f *= k as f64;
        }
        return f;
    }
    let half = ((x - 0.5 + GAMMA_R) / E).powf(0.5 * (x - 0.5));
    lanczos_sum(x) * TWO_SQRT_E_OVER_PI * half * half
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = π / (sin(πx) Γ(1-x)), all factors positive on (0, 0.5)
        return PI.ln() - sin_pi(x).ln() - ln_gamma(1.0 - x);
    }
    (lanczos_sum(x) * TWO_SQRT_E_OVER_PI).ln() + (x - 0.5) * ((x - 0.5 + GAMMA_R) / E).ln()
}

/// sin(πx) with exact argument reduction, so that integers give exact zeros.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// The Gamma function on the real line.
///
/// Lanczos for `x >= 0.5`, reflection `Γ(x)Γ(1-x) = π / sin(πx)` below.
/// Arguments within [`POLE_TOLERANCE`] of a non-positive integer are poles.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma of NaN"));
    }
    if x <= 0.0 && (x - x.round()).abs() <= POLE_TOLERANCE {
        return Err(Error::Pole(x));
    }
    if x >= 0.5 {
        Ok(gamma_pos(x))
    } else {
        Ok(PI / (sin_pi(x) * gamma_pos(1.0 - x)))
    }
}

/// 1/Γ(x), the entire function: exactly zero at 0, -1, -2, ...
pub fn recip_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x >= 0.5 {
        if x > 171.0 {
            (-ln_gamma(x)).exp()
        } else {
            1.0 / gamma_pos(x)
        }
    } else {
        sin_pi(x) * gamma_pos(1.0 - x) / PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn known_values() {
        assert!(rel(gamma(1.0).unwrap(), 1.0) < 1e-15);
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-14);
        assert!(rel(gamma(10.0).unwrap(), 362880.0) < 1e-14);
    }

    #[test]
    fn negative_half_from_reflection() {
        // Γ(-1/2) = Γ(1/2) / (-1/2)
        assert!(rel(gamma(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma(-1.5).unwrap(), 4.0 * PI.sqrt() / 3.0) < 1e-14);
    }

    #[test]
    fn poles_are_errors() {
        for x in [0.0, -1.0, -2.0, -7.0, -3.0 + 5e-13] {
            assert!(matches!(gamma(x), Err(Error::Pole(_))), "x = {x}");
        }
        assert!(gamma(-3.0 + 1e-9).is_ok());
    }

    #[test]
    fn recip_gamma_zeros_and_values() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        assert!(rel(recip_gamma(2.0), 1.0) < 1e-15);
        assert!(rel(recip_gamma(-0.5), -0.5 / PI.sqrt()) < 1e-14);
        assert_eq!(recip_gamma(400.0), 0.0);
    }

    #[test]
    fn large_arguments_stay_finite() {
        // Γ(171) = 170!
        let g = gamma(171.0).unwrap();
        assert!(g.is_finite());
        assert!(rel(g, 7.257415615307994e306) < 1e-12);
        assert!(gamma(172.0).unwrap().is_infinite());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for x in [0.1, 0.5, 1.3, 7.25, 50.0, 150.0] {
            assert!(
                (ln_gamma(x) - gamma(x).unwrap().ln()).abs() < 1e-12 * ln_gamma(x).abs().max(1.0)
            );
        }
    }

    #[test]
    fn sin_pi_exact_at_integers() {
        for n in -20..20 {
            assert_eq!(sin_pi(n as f64), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(-2.5) + 1.0).abs() < 1e-16);
    }
}
