//! First-order propagation of independent standard deviations.

use crate::error::{Error, Result};
use crate::measurement::Measurement;

/// τ = 1/Γ with σ_τ = |σ_Γ/Γ²|.
pub fn propagate_reciprocal(gamma_rate: f64, sigma_gamma: f64) -> Result<Measurement> {
    if !(gamma_rate > 0.0) {
        return Err(Error::domain(format!("rate must be positive, got {gamma_rate}")));
    }
    Ok(Measurement::new(1.0 / gamma_rate, (sigma_gamma / (gamma_rate * gamma_rate)).abs()))
}

/// r = τ1/τ2 with relative errors added in quadrature.
pub fn propagate_ratio(tau1: f64, sigma1: f64, tau2: f64, sigma2: f64) -> Result<Measurement> {
    if !(tau2 > 0.0) {
        return Err(Error::domain(format!("denominator must be positive, got {tau2}")));
    }
    let r = tau1 / tau2;
    let rel1 = if sigma1 == 0.0 { 0.0 } else { sigma1 / tau1 };
    let rel2 = sigma2 / tau2;
    Ok(Measurement::new(r, (r * rel1.hypot(rel2)).abs()))
}

/// Intermediate and final values of the cooperativity propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooperativityEstimate {
    /// γ/γ_tot.
    pub rate_ratio: Measurement,
    pub cooperativity: Measurement,
}

/// ρ = γ/γ_tot and C = ρ·C_max, each with relative errors in quadrature.
pub fn propagate_cooperativity(
    gamma: f64,
    sigma_gamma: f64,
    gamma_tot: f64,
    sigma_tot: f64,
    cmax: f64,
    sigma_cmax: f64,
) -> Result<CooperativityEstimate> {
    for (name, v) in [("gamma", gamma), ("gamma_tot", gamma_tot), ("cmax", cmax)] {
        if !(v > 0.0) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    let rho = gamma / gamma_tot;
    let sigma_rho = rho * (sigma_gamma / gamma).hypot(sigma_tot / gamma_tot);
    let c = rho * cmax;
    let sigma_c = c * (sigma_rho / rho).hypot(sigma_cmax / cmax);
    Ok(CooperativityEstimate {
        rate_ratio: Measurement::new(rho, sigma_rho),
        cooperativity: Measurement::new(c, sigma_c),
    })
}

/// Δν₂ − Δν₁ for two independent fitted widths.
pub fn broadening(first: Measurement, second: Measurement) -> Measurement {
    Measurement::new(second.value - first.value, first.sigma.hypot(second.sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        assert_eq!(propagate_reciprocal(2.0, 0.0).unwrap(), Measurement::new(0.5, 0.0));
        assert_eq!(propagate_ratio(1.3, 0.0, 1.3, 0.0).unwrap(), Measurement::new(1.0, 0.0));
        let c = propagate_cooperativity(1.0, 0.0, 4.0, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(c.cooperativity, Measurement::new(0.125, 0.0));
        assert!(propagate_reciprocal(0.0, 1.0).is_err());
        assert!(propagate_ratio(1.0, 0.1, 0.0, 0.1).is_err());
    }

    #[test]
    fn reciprocal_matches_finite_difference() {
        let (g, s): (f64, f64) = (0.517, 0.015);
        let h = 1e-8 * g;
        let fd = ((1.0 / (g + h) - 1.0 / g) / h).abs() * s;
        let m = propagate_reciprocal(g, s).unwrap();
        assert!(((fd - m.sigma) / m.sigma).abs() < 1e-6);
    }

    #[test]
    fn broadening_adds_in_quadrature() {
        let d = broadening(Measurement::new(500.0, 30.0), Measurement::new(595.0, 40.0));
        assert_eq!(d, Measurement::new(95.0, 50.0));
    }
}
