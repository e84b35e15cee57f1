//! exGaussian fits of time-correlated photon-counting histograms.

use serde::{Deserialize, Serialize};

use super::fit_counts;
use super::lineshape::ExGaussian;
use super::lm::{FitResult, LmOptions};
use super::propagate::propagate_reciprocal;
use crate::error::{Error, Result};
use crate::measurement::Measurement;

/// Instrument response width used when none is given (ns).
pub const DEFAULT_SIGMA_IRF_NS: f64 = 0.228;

const UNIFORM_BIN_TOLERANCE: f64 = 1e-9;

/// Photon counts binned on a uniform time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Bin centres in ns, strictly increasing and evenly spaced.
    pub bin_centers: Vec<f64>,
    pub counts: Vec<f64>,
    pub meta: String,
}

impl Histogram {
    pub fn new(bin_centers: Vec<f64>, counts: Vec<f64>, meta: impl Into<String>) -> Result<Self> {
        let h = Self {
            bin_centers,
            counts,
            meta: meta.into(),
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bin_centers.len() != self.counts.len() {
            return Err(Error::Input(format!(
                "{} bin centres but {} counts",
                self.bin_centers.len(),
                self.counts.len()
            )));
        }
        if self.bin_centers.len() < 2 {
            return Err(Error::InsufficientData("histogram needs at least two bins".into()));
        }
        if let Some(c) = self.counts.iter().find(|c| !(**c >= 0.0) || !c.is_finite()) {
            return Err(Error::Input(format!("negative or non-finite count {c}")));
        }
        let w = self.bin_centers[1] - self.bin_centers[0];
        if !(w > 0.0) {
            return Err(Error::Input("bin centres must be strictly increasing".into()));
        }
        for (i, pair) in self.bin_centers.windows(2).enumerate() {
            let d = pair[1] - pair[0];
            if !(d > 0.0) {
                return Err(Error::Input(format!("bin centres not increasing at bin {}", i + 1)));
            }
            if ((d - w) / w).abs() > UNIFORM_BIN_TOLERANCE * self.bin_centers.len() as f64 {
                return Err(Error::Input(format!("non-uniform bin width at bin {}", i + 1)));
            }
        }
        Ok(())
    }

    pub fn bin_width(&self) -> f64 {
        let n = self.bin_centers.len();
        (self.bin_centers[n - 1] - self.bin_centers[0]) / (n - 1) as f64
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// How each bin is weighted in the least-squares cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Weighting {
    /// w = 1/max(counts, 1).
    Counts,
    /// w = 1/max(model, floor) with the model re-evaluated at the current
    /// estimate; iterated to a fixed point (equivalent to Poisson maximum
    /// likelihood at the solution).
    #[default]
    Model,
}

#[derive(Debug, Clone, Copy)]
pub struct LifetimeOptions {
    pub sigma_irf: f64,
    /// Initial (a, μ, Γ, b); heuristics are used when absent.
    pub init: Option<[f64; 4]>,
    pub weighting: Weighting,
    pub lm: LmOptions,
}

impl Default for LifetimeOptions {
    fn default() -> Self {
        Self {
            sigma_irf: DEFAULT_SIGMA_IRF_NS,
            init: None,
            weighting: Weighting::default(),
            lm: LmOptions::default(),
        }
    }
}

/// Fits (a, μ, Γ, b) with the instrument width fixed at `sigma_irf` (ns).
///
/// Derived quantities: `tau` (ns), `linewidth_mhz` (lifetime-limited, 1/2πτ).
pub fn fit_lifetime(hist: &Histogram, sigma_irf: f64, init: Option<[f64; 4]>) -> Result<FitResult> {
    fit_lifetime_with(
        hist,
        &LifetimeOptions {
            sigma_irf,
            init,
            ..LifetimeOptions::default()
        },
    )
}

pub fn fit_lifetime_with(hist: &Histogram, opts: &LifetimeOptions) -> Result<FitResult> {
    hist.validate()?;
    if !(opts.sigma_irf > 0.0) {
        return Err(Error::domain(format!("sigma_irf must be positive, got {}", opts.sigma_irf)));
    }
    check_peak(&hist.counts)?;
    let model = ExGaussian {
        sigma: opts.sigma_irf,
        bin_width: hist.bin_width(),
    };
    let init = match opts.init {
        Some(p) => p,
        None => initial_guess(hist, opts.sigma_irf),
    };
    let span = hist.bin_centers[hist.bin_centers.len() - 1] - hist.bin_centers[0];
    let bounds = [
        (0.0, f64::INFINITY),
        (hist.bin_centers[0] - span, hist.bin_centers[hist.bin_centers.len() - 1] + span),
        (1e-9 / span, f64::INFINITY),
        (0.0, f64::INFINITY),
    ];
    let init = clamp_into(init, &bounds);

    let mut fit = fit_counts(&model, &hist.bin_centers, &hist.counts, &init, &bounds, opts.weighting, opts.lm)?;

    fit.fixed.insert("sigma_irf_ns".into(), opts.sigma_irf);
    if let Some(m) = fit.measurement("gamma") {
        let tau = propagate_reciprocal(m.value, m.sigma)?;
        fit.derived.insert("tau".into(), tau);
        fit.derived.insert("linewidth_mhz".into(), linewidth_mhz(tau));
    }
    Ok(fit)
}

/// Lifetime-limited linewidth 1/(2πτ) in MHz from τ in ns.
pub fn linewidth_mhz(tau_ns: Measurement) -> Measurement {
    let k = 1e3 / (2.0 * std::f64::consts::PI);
    Measurement::new(k / tau_ns.value, k * tau_ns.sigma / (tau_ns.value * tau_ns.value))
}

fn check_peak(counts: &[f64]) -> Result<()> {
    let max = counts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let med = median(counts);
    if !(max > 3.0 * med) {
        return Err(Error::NoPeak(format!("maximum {max} is not above three times the median {med}")));
    }
    Ok(())
}

pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn clamp_into(mut p: [f64; 4], bounds: &[(f64, f64); 4]) -> [f64; 4] {
    for (v, &(lo, hi)) in p.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
    p
}

/// μ at the peak bin, a from the peak height, b from the pre-trigger
/// baseline, Γ from a log-linear fit to the tail between 10% and 1% of peak.
fn initial_guess(hist: &Histogram, sigma: f64) -> [f64; 4] {
    let t = &hist.bin_centers;
    let c = &hist.counts;
    let n = c.len();
    let bw = hist.bin_width();
    let (ipk, &peak) = c
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let head = (n / 20).max(1);
    let b = median(&c[..head]);
    let height = (peak - b).max(1.0);
    let a = height / (bw * sigma * std::f64::consts::FRAC_PI_2.sqrt());

    let (lo, hi) = (b + 0.01 * height, b + 0.1 * height);
    let tail: Vec<(f64, f64)> = (ipk..n)
        .filter(|&i| c[i] > lo && c[i] <= hi)
        .map(|i| (t[i], (c[i] - b).ln()))
        .collect();
    let gamma = match log_slope(&tail) {
        Some(s) if s < 0.0 => -s,
        _ => {
            // time to fall to 1/e of the peak
            let target = b + height / std::f64::consts::E;
            let i = (ipk..n).find(|&i| c[i] <= target).unwrap_or(n - 1);
            1.0 / (t[i] - t[ipk]).max(bw)
        }
    };
    [a, t[ipk], gamma, b]
}

fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
