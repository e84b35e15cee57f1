//! Seeded synthetic lifetime histograms, PLE scans and detuning series.
//!
//! Every draw comes from one ChaCha20 stream seeded from the spec, so a spec
//! fully determines its output.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{exgaussian_eval, lorentzian_eval, DetuningPoint, Histogram, Scan, ScanMeta};
use crate::qed::{effective_decay_rate, CoupledSystem};

/// Identifier of the random generator, recorded next to generated data.
pub const GENERATOR_ID: &str = "chacha20/rand_chacha-0.9/seed_from_u64";

pub const MIN_BINS: usize = 8;

/// Evenly spaced sample points from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub n_bins: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.n_bins).map(|i| self.start + step * i as f64).collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.n_bins - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Expected signal counts (background excluded) summed over all time;
    /// overrides the truth amplitude `a`.
    TotalEvents(f64),
    /// Expected peak height above background; overrides `amp`.
    PeakCounts(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Noise {
    None,
    Poisson,
    /// Additive Gaussian noise; negative results are clipped to zero.
    Gaussian(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub truth: BTreeMap<String, f64>,
    pub axis: Axis,
    pub scale: Option<Scale>,
    pub noise: Noise,
    /// Standard deviation of the per-scan centre frequency (MHz).
    pub jitter_mhz: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(truth: &[(&str, f64)], axis: Axis, noise: Noise, seed: u64) -> Self {
        Self {
            truth: truth.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            axis,
            scale: None,
            noise,
            jitter_mhz: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis.n_bins < MIN_BINS {
            return Err(Error::Input(format!("need at least {MIN_BINS} bins, got {}", self.axis.n_bins)));
        }
        if !(self.axis.stop > self.axis.start) {
            return Err(Error::Input("axis stop must exceed start".into()));
        }
        match self.scale {
            Some(Scale::TotalEvents(s) | Scale::PeakCounts(s)) if !(s > 0.0) => {
                return Err(Error::Input(format!("scale must be positive, got {s}")))
            }
            _ => {}
        }
        if let Noise::Gaussian(s) = self.noise {
            if !(s >= 0.0) {
                return Err(Error::Input(format!("noise sigma must be nonnegative, got {s}")));
            }
        }
        if !(self.jitter_mhz >= 0.0) {
            return Err(Error::Input(format!("jitter must be nonnegative, got {}", self.jitter_mhz)));
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.truth
            .get(key)
            .copied()
            .ok_or_else(|| Error::Input(format!("truth is missing '{key}'")))
    }

    fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.seed)
    }
}

/// Generated data plus any warnings about the spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesized<T> {
    pub data: T,
    pub warnings: Vec<String>,
}

fn sample(expected: f64, noise: Noise, rng: &mut ChaCha20Rng) -> Result<f64> {
    Ok(match noise {
        Noise::None => expected,
        Noise::Poisson if expected <= 0.0 => 0.0,
        Noise::Poisson => Poisson::new(expected)
            .map_err(|e| Error::Input(format!("poisson mean {expected}: {e}")))?
            .sample(rng),
        Noise::Gaussian(s) => {
            let n = Normal::new(expected, s).map_err(|e| Error::Input(e.to_string()))?;
            n.sample(rng).max(0.0)
        }
    })
}

/// Lifetime histogram with expected counts exgaussian_eval(t)·Δt per bin.
///
/// Truth keys: `a`, `mu`, `sigma_irf`, `gamma`, `b` (ns and ns⁻¹).
pub fn synth_lifetime_histogram(spec: &SynthSpec) -> Result<Synthesized<Histogram>> {
    spec.validate()?;
    let (mu, sigma, gamma, b) = (spec.get("mu")?, spec.get("sigma_irf")?, spec.get("gamma")?, spec.get("b")?);
    if !(sigma > 0.0) || !(gamma > 0.0) {
        return Err(Error::Input("sigma_irf and gamma must be positive".into()));
    }
    let a = match spec.scale {
        Some(Scale::TotalEvents(n)) => n * gamma / (sigma * (2.0 * std::f64::consts::PI).sqrt()),
        Some(Scale::PeakCounts(_)) => {
            return Err(Error::Input("lifetime histograms are scaled by total_events".into()))
        }
        None => spec.get("a")?,
    };
    let mut warnings = Vec::new();
    if spec.axis.start > mu - 3.0 * sigma || spec.axis.stop < mu + 5.0 / gamma {
        warnings.push(format!(
            "axis [{}, {}] ns does not cover mu - 3 sigma to mu + 5/gamma = [{}, {}] ns",
            spec.axis.start,
            spec.axis.stop,
            mu - 3.0 * sigma,
            mu + 5.0 / gamma
        ));
    }
    let t = spec.axis.points();
    let w = spec.axis.step();
    let mut rng = spec.rng();
    let counts = t
        .iter()
        .map(|&t| sample(w * exgaussian_eval(t, a, mu, sigma, gamma, b), spec.noise, &mut rng))
        .collect::<Result<Vec<f64>>>()?;
    let meta = format!("synthetic seed={} generator={GENERATOR_ID}", spec.seed);
    Ok(Synthesized {
        data: Histogram::new(t, counts, meta)?,
        warnings,
    })
}

/// Independent scans of one line plus their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct PleSynthesis {
    pub scans: Vec<Scan>,
    pub integrated: Scan,
    /// Centre frequency used for each scan (GHz).
    pub centers: Vec<f64>,
}

/// `n_scans` PLE scans, each centred at ν0 plus an independent Gaussian
/// jitter draw. Truth keys: `amp`, `nu0` (GHz), `fwhm` (GHz), `b`.
pub fn synth_ple_scan(spec: &SynthSpec, n_scans: usize) -> Result<PleSynthesis> {
    spec.validate()?;
    if n_scans == 0 {
        return Err(Error::Input("need at least one scan".into()));
    }
    let (nu0, fwhm, b) = (spec.get("nu0")?, spec.get("fwhm")?, spec.get("b")?);
    if !(fwhm > 0.0) {
        return Err(Error::Input("fwhm must be positive".into()));
    }
    let amp = match spec.scale {
        Some(Scale::PeakCounts(p)) => p,
        Some(Scale::TotalEvents(_)) => {
            return Err(Error::Input("PLE scans are scaled by peak_counts".into()))
        }
        None => spec.get("amp")?,
    };
    let f = spec.axis.points();
    let mut rng = spec.rng();
    let jitter = Normal::new(0.0, spec.jitter_mhz * 1e-3).map_err(|e| Error::Input(e.to_string()))?;
    let mut scans = Vec::with_capacity(n_scans);
    let mut centers = Vec::with_capacity(n_scans);
    for index in 0..n_scans {
        let center = if spec.jitter_mhz > 0.0 { nu0 + jitter.sample(&mut rng) } else { nu0 };
        let counts = f
            .iter()
            .map(|&v| sample(lorentzian_eval(v, amp, center, fwhm, b), spec.noise, &mut rng))
            .collect::<Result<Vec<f64>>>()?;
        let meta = ScanMeta {
            index,
            repump: false,
            tag: format!("synthetic seed={} generator={GENERATOR_ID}", spec.seed),
        };
        scans.push(Scan::new(f.clone(), counts, meta)?);
        centers.push(center);
    }
    let integrated = Scan::integrate(&scans)?;
    Ok(PleSynthesis {
        scans,
        integrated,
        centers,
    })
}

/// Lifetimes against detuning from the adiabatically eliminated rate.
///
/// With two transitions the rate is the equal-weight mean of two γ_eff curves
/// whose emitter frequencies sit `splitting` apart, centred on the nominal
/// one. Detunings and splitting are in rad/s; lifetimes are returned in ns
/// with σ_τ = `relative_error`·τ.
pub fn synth_detuning_series(
    system: &CoupledSystem,
    n_transitions: usize,
    splitting: f64,
    deltas: &[f64],
    relative_error: f64,
) -> Result<Vec<DetuningPoint>> {
    let offsets: &[f64] = match n_transitions {
        1 => &[0.0],
        2 => &[-0.5, 0.5],
        n => return Err(Error::Input(format!("n_transitions must be 1 or 2, got {n}"))),
    };
    if !(relative_error >= 0.0) {
        return Err(Error::Input("relative error must be nonnegative".into()));
    }
    deltas
        .iter()
        .map(|&delta| {
            let mut rate = 0.0;
            for k in offsets {
                rate += effective_decay_rate(&system.with_delta(delta + k * splitting))?.rate;
            }
            rate /= offsets.len() as f64;
            let tau = 1e9 / rate;
            Ok(DetuningPoint {
                delta,
                tau,
                sigma_tau: relative_error * tau,
            })
        })
        .collect()
}
