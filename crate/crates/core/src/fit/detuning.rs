//! Lorentzian fit of decay rate against cavity-emitter detuning.

use serde::{Deserialize, Serialize};

use super::lineshape::{DetuningLorentzian, Model};
use super::lm::{lm_minimize, Data, FitResult, LmOptions};
use crate::error::{Error, Result};
use crate::measurement::Measurement;

/// One lifetime measurement at a given detuning. `delta` may be in any
/// frequency unit as long as it matches the κ passed alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningPoint {
    pub delta: f64,
    pub tau: f64,
    pub sigma_tau: f64,
}

#[derive(Debug, Clone, Default)]
pub struct DetuningOptions {
    /// Cavity linewidth in the units of `delta`, for the width comparison.
    pub kappa: Option<f64>,
    /// `true` entries drop the matching point from the fit.
    pub exclude: Vec<bool>,
    pub lm: LmOptions,
}

struct Flat;

impl Model for Flat {
    fn param_names(&self) -> &[&'static str] {
        &["gamma"]
    }

    fn eval(&self, _: f64, p: &[f64]) -> f64 {
        p[0]
    }

    fn gradient(&self, _: f64, _: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
    }
}

/// Fits 1/τ(δ) = γ + A·(w/2)²/(δ² + (w/2)²) weighted by 1/σ²(1/τ).
///
/// Derived: `ratio` = (γ + A)/γ and `width` = w. With κ given, also
/// `width_over_kappa` and the `width_exceeds_kappa` flag. When the data show
/// no resolvable peak the fit falls back to a constant rate with A = 0.
pub fn fit_detuning_series(points: &[DetuningPoint], opts: &DetuningOptions) -> Result<FitResult> {
    if !opts.exclude.is_empty() && opts.exclude.len() != points.len() {
        return Err(Error::Input(format!(
            "exclusion mask has {} entries for {} points",
            opts.exclude.len(),
            points.len()
        )));
    }
    let kept: Vec<&DetuningPoint> = points
        .iter()
        .enumerate()
        .filter(|(i, _)| !opts.exclude.get(*i).copied().unwrap_or(false))
        .map(|(_, p)| p)
        .collect();
    for p in &kept {
        if !(p.tau > 0.0) || !(p.sigma_tau > 0.0) {
            return Err(Error::Input(format!(
                "lifetime and its sigma must be positive at delta = {}",
                p.delta
            )));
        }
    }
    if kept.len() < 4 {
        return Err(Error::InsufficientData(format!("{} usable points", kept.len())));
    }
    let x: Vec<f64> = kept.iter().map(|p| p.delta).collect();
    let y: Vec<f64> = kept.iter().map(|p| 1.0 / p.tau).collect();
    let w: Vec<f64> = kept
        .iter()
        .map(|p| {
            let s = p.sigma_tau / (p.tau * p.tau);
            1.0 / (s * s)
        })
        .collect();
    let data = Data { x: &x, y: &y, weights: &w };

    let init = initial_guess(&x, &y);
    let span = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
    let bounds = [(0.0, f64::INFINITY), (0.0, f64::INFINITY), (1e-9 * span.max(f64::MIN_POSITIVE), f64::INFINITY)];
    let full = if kept.len() >= 6 && init[1] > 0.0 {
        match lm_minimize(&DetuningLorentzian, data, &init, Some(&bounds), opts.lm) {
            Ok(fit) if fit.params[1] > 0.0 => Some(fit),
            Ok(_) | Err(Error::Singular(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let mut fit = match full {
        Some(mut fit) => {
            let (g, a) = (fit.params[0], fit.params[1]);
            let c = &fit.covariance;
            // r = 1 + A/γ
            let (dg, da) = (-a / (g * g), 1.0 / g);
            let var = dg * dg * c[(0, 0)] + da * da * c[(1, 1)] + 2.0 * dg * da * c[(0, 1)];
            fit.derived.insert("ratio".into(), Measurement::new(1.0 + a / g, var.max(0.0).sqrt()));
            let width = fit.measurement("width").expect("width parameter");
            fit.derived.insert("width".into(), width);
            if let Some(kappa) = opts.kappa {
                let over = width.value > kappa;
                fit.derived.insert(
                    "width_over_kappa".into(),
                    Measurement::new(width.value / kappa, width.sigma / kappa),
                );
                fit.flags.insert("width_exceeds_kappa".into(), over);
                if over {
                    fit.warnings.push(format!(
                        "width exceeds cavity linewidth: fitted {:.6e} vs kappa {:.6e}",
                        width.value, kappa
                    ));
                }
            }
            fit
        }
        None => {
            let mean = weighted_mean(&y, &w);
            let mut fit = lm_minimize(&Flat, data, &[mean], None, opts.lm)?;
            fit.fixed.insert("amplitude".into(), 0.0);
            fit.derived.insert("ratio".into(), Measurement::exact(1.0));
            fit.warnings
                .push("no resonant enhancement resolved; fitted a constant rate".into());
            fit
        }
    };
    fit.fixed.insert("excluded_points".into(), (points.len() - kept.len()) as f64);
    Ok(fit)
}

fn weighted_mean(y: &[f64], w: &[f64]) -> f64 {
    let sw: f64 = w.iter().sum();
    y.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sw
}

/// γ from the smallest rate, A from the peak excess, w from the half-maximum
/// crossing nearest zero detuning.
fn initial_guess(x: &[f64], y: &[f64]) -> [f64; 3] {
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let amp = hi - lo;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs()));
    let half = lo + 0.5 * amp;
    let span = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let width = order
        .iter()
        .find(|&&i| y[i] < half)
        .map(|&i| 2.0 * x[i].abs())
        .filter(|w| *w > 0.0)
        .unwrap_or(0.5 * span);
    [lo, amp, width.max(f64::MIN_POSITIVE)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(gamma: f64, amp: f64, width: f64) -> Vec<DetuningPoint> {
        (-10..=10)
            .map(|i| {
                let d = 0.3 * i as f64;
                let rate = DetuningLorentzian.eval(d, &[gamma, amp, width]);
                DetuningPoint {
                    delta: d,
                    tau: 1.0 / rate,
                    sigma_tau: 0.01 / rate,
                }
            })
            .collect()
    }

    #[test]
    fn exact_series_recovered() {
        let r = fit_detuning_series(&series(0.5, 0.4, 1.3), &DetuningOptions::default()).unwrap();
        assert!((r.param("width").unwrap() - 1.3).abs() < 1e-8);
        assert!((r.derived("ratio").unwrap().value - 1.8).abs() < 1e-8);
    }

    #[test]
    fn flat_series_gives_unit_ratio() {
        let r = fit_detuning_series(&series(0.5, 0.0, 1.3), &DetuningOptions::default()).unwrap();
        assert_eq!(r.derived("ratio").unwrap(), Measurement::exact(1.0));
        assert!((r.param("gamma").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exclusion_and_errors() {
        let pts = series(0.5, 0.4, 1.3);
        let mut mask = vec![false; pts.len()];
        mask[10] = true;
        let r = fit_detuning_series(&pts, &DetuningOptions { exclude: mask, ..Default::default() }).unwrap();
        assert_eq!(r.fixed["excluded_points"], 1.0);
        assert!(matches!(
            fit_detuning_series(&pts[..3], &DetuningOptions::default()),
            Err(Error::InsufficientData(_))
        ));
        assert!(fit_detuning_series(&pts, &DetuningOptions { exclude: vec![true], ..Default::default() }).is_err());
    }

    #[test]
    fn width_flag_against_kappa() {
        let opts = DetuningOptions { kappa: Some(1.0), ..Default::default() };
        let r = fit_detuning_series(&series(0.5, 0.4, 1.3), &opts).unwrap();
        assert!(r.flags["width_exceeds_kappa"]);
    }
}
