//! Complementary error function and its scaled form erfcx(x) = exp(x²)·erfc(x).

use std::f64::consts::PI;

/// erfc(x) for any real x.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Scaled complementary error function exp(x²)·erfc(x) for x ≥ 0.
///
/// Below the crossover the product is formed directly (erfc keeps full
/// relative precision there); above it a continued fraction is evaluated
/// with the modified Lentz method, which stays finite for arbitrarily
/// large x where erfc itself underflows.
pub fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0 || x.is_nan());
    if x < ERFCX_CROSSOVER {
        (x * x).exp() * libm::erfc(x)
    } else {
        erfcx_continued_fraction(x)
    }
}

const ERFCX_CROSSOVER: f64 = 4.0;

/// exp(x²)·erfc(x) = (1/√π) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
fn erfcx_continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (PI.sqrt() * f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_agree_at_crossover() {
        let x = ERFCX_CROSSOVER;
        let direct = (x * x).exp() * libm::erfc(x);
        let cf = erfcx_continued_fraction(x);
        assert!(((direct - cf) / direct).abs() < 1e-14, "{direct} {cf}");
    }

    #[test]
    fn known_values() {
        assert_eq!(erfcx(0.0), 1.0);
        assert!((erfc(0.0) - 1.0).abs() < 1e-16);
        assert!((erfc(-40.0) - 2.0).abs() < 1e-16);
        // large-x asymptote 1/(x√π)
        let x = 1e8;
        assert!((erfcx(x) * x * PI.sqrt() - 1.0).abs() < 1e-15);
    }
}
