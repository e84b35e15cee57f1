//! Lorentzian fits of photoluminescence-excitation scans.

use serde::{Deserialize, Serialize};

use super::fit_counts;
use super::lifetime::Weighting;
use super::lineshape::Lorentzian;
use super::lm::{FitResult, LmOptions};
use crate::error::{Error, Result};
use crate::measurement::Measurement;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    pub index: usize,
    /// Whether a repump pulse preceded the scan.
    pub repump: bool,
    pub tag: String,
}

/// Counts against laser frequency offset (GHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub frequency_offsets: Vec<f64>,
    pub counts: Vec<f64>,
    pub meta: ScanMeta,
}

impl Scan {
    pub fn new(frequency_offsets: Vec<f64>, counts: Vec<f64>, meta: ScanMeta) -> Result<Self> {
        let s = Self {
            frequency_offsets,
            counts,
            meta,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frequency_offsets.len() != self.counts.len() {
            return Err(Error::Input(format!(
                "{} frequencies but {} counts",
                self.frequency_offsets.len(),
                self.counts.len()
            )));
        }
        if let Some(i) = self.frequency_offsets.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Input(format!("frequency axis not increasing at point {}", i + 1)));
        }
        if let Some(c) = self.counts.iter().find(|c| !(**c >= 0.0) || !c.is_finite()) {
            return Err(Error::Input(format!("negative or non-finite count {c}")));
        }
        Ok(())
    }

    pub fn span(&self) -> f64 {
        match (self.frequency_offsets.first(), self.frequency_offsets.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    /// Points with lo ≤ ν ≤ hi.
    pub fn window(&self, lo: f64, hi: f64) -> Result<Scan> {
        let (f, c): (Vec<f64>, Vec<f64>) = self
            .frequency_offsets
            .iter()
            .zip(&self.counts)
            .filter(|(f, _)| lo <= **f && **f <= hi)
            .map(|(f, c)| (*f, *c))
            .unzip();
        if f.is_empty() {
            return Err(Error::Input(format!("window [{lo}, {hi}] GHz contains no points")));
        }
        Ok(Scan {
            frequency_offsets: f,
            counts: c,
            meta: self.meta.clone(),
        })
    }

    /// Point-wise sum of scans sharing one frequency axis.
    pub fn integrate(scans: &[Scan]) -> Result<Scan> {
        let first = scans
            .first()
            .ok_or_else(|| Error::InsufficientData("no scans to integrate".into()))?;
        let mut counts = vec![0.0; first.counts.len()];
        for s in scans {
            if s.frequency_offsets != first.frequency_offsets {
                return Err(Error::Input(format!("scan {} has a different frequency axis", s.meta.index)));
            }
            for (acc, c) in counts.iter_mut().zip(&s.counts) {
                *acc += c;
            }
        }
        Ok(Scan {
            frequency_offsets: first.frequency_offsets.clone(),
            counts,
            meta: ScanMeta {
                index: 0,
                repump: first.meta.repump,
                tag: format!("integrated over {} scans", scans.len()),
            },
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PleOptions {
    /// Initial (amp, ν0, Δν, b) in counts and GHz.
    pub init: Option<[f64; 4]>,
    pub weighting: Weighting,
    pub lm: LmOptions,
}

impl Default for PleOptions {
    fn default() -> Self {
        Self {
            init: None,
            weighting: Weighting::default(),
            lm: LmOptions::default(),
        }
    }
}

/// Fits (amp, ν0, Δν, b) to a scan holding a single line.
///
/// Derived: `fwhm_mhz`. A width above half the scan span, or an amplitude
/// below three of its standard deviations, sets the `unreliable` flag.
pub fn fit_ple(scan: &Scan, init: Option<[f64; 4]>) -> Result<FitResult> {
    fit_ple_with(scan, &PleOptions { init, ..PleOptions::default() })
}

pub fn fit_ple_with(scan: &Scan, opts: &PleOptions) -> Result<FitResult> {
    scan.validate()?;
    let span = scan.span();
    if !(span > 0.0) {
        return Err(Error::InsufficientData("scan needs at least two frequencies".into()));
    }
    let f = &scan.frequency_offsets;
    let step = span / (f.len() - 1) as f64;
    let bounds = [
        (0.0, f64::INFINITY),
        (f[0] - span, f[f.len() - 1] + span),
        (1e-6 * step, 1e3 * span),
        (0.0, f64::INFINITY),
    ];
    let mut init = opts.init.unwrap_or_else(|| initial_guess(scan));
    for (v, &(lo, hi)) in init.iter_mut().zip(&bounds) {
        *v = v.clamp(lo, hi);
    }
    let mut fit = fit_counts(&Lorentzian, f, &scan.counts, &init, &bounds, opts.weighting, opts.lm)?;
    let fwhm = fit.measurement("fwhm").expect("fwhm parameter");
    fit.derived
        .insert("fwhm_mhz".into(), Measurement::new(1e3 * fwhm.value, 1e3 * fwhm.sigma));
    let amp = fit.measurement("amp").expect("amp parameter");
    let too_wide = fwhm.value > 0.5 * span;
    let insignificant = !(amp.value > 3.0 * amp.sigma);
    if too_wide {
        fit.warnings.push(format!(
            "unreliable: fitted width {:.4} GHz exceeds half the scan span {:.4} GHz",
            fwhm.value, span
        ));
    }
    if insignificant {
        fit.warnings.push(format!(
            "unreliable: amplitude {:.4e} is within 3 sigma ({:.4e}) of zero; no line in the window",
            amp.value, amp.sigma
        ));
    }
    fit.flags.insert("unreliable".into(), too_wide || insignificant);
    Ok(fit)
}

fn initial_guess(scan: &Scan) -> [f64; 4] {
    let f = &scan.frequency_offsets;
    let c = &scan.counts;
    let mut sorted = c.clone();
    sorted.sort_by(f64::total_cmp);
    let b = sorted[sorted.len() / 10];
    let (ipk, &peak) = c
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let amp = (peak - b).max(1.0);
    let half = b + 0.5 * amp;
    let left = (0..=ipk).rev().find(|&i| c[i] < half).unwrap_or(0);
    let right = (ipk..c.len()).find(|&i| c[i] < half).unwrap_or(c.len() - 1);
    let step = scan.span() / (f.len() - 1) as f64;
    let fwhm = (f[right] - f[left]).max(2.0 * step);
    [amp, f[ipk], fwhm, b]
}
