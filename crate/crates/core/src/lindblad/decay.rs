use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};

/// Population window, as fractions of the initial excited population, over
/// which a decay is treated as single-exponential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayWindow {
    pub lower: f64,
    pub upper: f64,
}

impl Default for DecayWindow {
    fn default() -> Self {
        Self { lower: 1e-3, upper: 1e-1 }
    }
}

/// RMS residual of ln P above which a decay is flagged non-exponential.
pub const NON_EXPONENTIAL_RESIDUAL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    /// RMS residual of the log-linear regression.
    pub rms_residual: f64,
    pub non_exponential: bool,
}

/// Log-linear least squares on the |e,0⟩ population of `trajectory`.
pub fn extract_decay_rate(trajectory: &Trajectory, window: DecayWindow) -> Result<DecayFit> {
    extract_decay_rate_from_series(&trajectory.times, &trajectory.excited_population(), window)
}

/// Ordinary least squares of ln P against t over samples with
/// `window.lower ≤ P/P(0) ≤ window.upper`.
pub fn extract_decay_rate_from_series(times: &[f64], population: &[f64], window: DecayWindow) -> Result<DecayFit> {
    let p0 = *population
        .first()
        .ok_or_else(|| Error::InsufficientData("empty population series".into()))?;
    if !(p0 > 0.0) {
        return Err(Error::InsufficientData("initial excited population is not positive".into()));
    }
    let (ts, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(population)
        .filter(|(_, &p)| p > 0.0 && (window.lower..=window.upper).contains(&(p / p0)))
        .map(|(&t, &p)| (t, p.ln()))
        .unzip();
    let n = ts.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "{n} samples inside the population window [{}, {}], need 10",
            window.lower, window.upper
        )));
    }
    let nf = n as f64;
    let t_mean = ts.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = ts.iter().map(|t| (t - t_mean).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - t_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * t_mean;
    let ssr: f64 = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - intercept - slope * t).powi(2))
        .sum();
    let rms_residual = (ssr / nf).sqrt();
    Ok(DecayFit {
        rate: -slope,
        std_error: (ssr / (nf - 2.0) / sxx).sqrt(),
        n_samples: n,
        rms_residual,
        non_exponential: rms_residual > NON_EXPONENTIAL_RESIDUAL,
    })
}
