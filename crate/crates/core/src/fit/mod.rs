//! Weighted nonlinear least squares, the lifetime and linewidth models, and
//! propagation of fitted uncertainties.

pub mod detuning;
pub mod lifetime;
pub mod lineshape;
pub mod lm;
pub mod ple;
pub mod propagate;
pub mod special;

pub use detuning::{fit_detuning_series, DetuningOptions, DetuningPoint};
pub use lifetime::{fit_lifetime, fit_lifetime_with, linewidth_mhz, Histogram, LifetimeOptions, Weighting, DEFAULT_SIGMA_IRF_NS};
pub use lineshape::{exgaussian_eval, exgaussian_gradient, lorentzian_eval, lorentzian_gradient, DetuningLorentzian, ExGaussian, Lorentzian, Model};
pub use lm::{lm_minimize, Data, FitResult, LmOptions};
pub use ple::{fit_ple, fit_ple_with, PleOptions, Scan, ScanMeta};
pub use propagate::{broadening, propagate_cooperativity, propagate_ratio, propagate_reciprocal, CooperativityEstimate};
pub use special::{erfc, erfcx};

use crate::error::Result;

const MAX_REWEIGHT: usize = 50;
/// Relative parameter change below which reweighting stops.
const REWEIGHT_TOL: f64 = 1e-13;
const MODEL_VARIANCE_FLOOR: f64 = 1e-3;

/// Fits photon counts with Poisson-motivated weights.
///
/// The first pass weights each point by 1/max(count, 1). With
/// [`Weighting::Model`] the weights are then recomputed from the fitted
/// model and the fit repeated until the parameters settle.
pub(crate) fn fit_counts<M: Model>(
    model: &M,
    x: &[f64],
    y: &[f64],
    init: &[f64],
    bounds: &[(f64, f64)],
    weighting: Weighting,
    options: LmOptions,
) -> Result<FitResult> {
    let weights: Vec<f64> = y.iter().map(|c| 1.0 / c.max(1.0)).collect();
    let mut fit = lm_minimize(model, Data { x, y, weights: &weights }, init, Some(bounds), options)?;
    if weighting == Weighting::Model {
        for _ in 0..MAX_REWEIGHT {
            let weights: Vec<f64> = x
                .iter()
                .map(|&t| 1.0 / model.eval(t, &fit.params).max(MODEL_VARIANCE_FLOOR))
                .collect();
            let next = lm_minimize(model, Data { x, y, weights: &weights }, &fit.params, Some(bounds), options)?;
            let settled = next
                .params
                .iter()
                .zip(&fit.params)
                .all(|(a, b)| (a - b).abs() <= REWEIGHT_TOL * b.abs().max(1e-300));
            fit = next;
            if settled {
                break;
            }
        }
    }
    Ok(fit)
}
