//! Decay rate against cavity detuning: a single transition recovers the
//! resonant ratio, while two unresolved transitions widen the peak past κ.

use cavityfit::fit::{fit_detuning_series, DetuningOptions};
use cavityfit::synth::synth_detuning_series;
use cavityfit::units::{ghz_to_rad_s, mhz_to_rad_s, rad_s_to_ghz};
use cavityfit::CoupledSystem;

fn main() -> cavityfit::Result<()> {
    let gamma = mhz_to_rad_s(82.0);
    let kappa = ghz_to_rad_s(50.0);
    let g = (0.7 * kappa * gamma / 4.0).sqrt();
    let system = CoupledSystem::from_rates(gamma, 0.0, kappa, g, 0.0)?;
    let deltas: Vec<f64> = (0..41).map(|i| kappa * (-3.0 + 0.15 * i as f64)).collect();

    for (n, splitting) in [(1, 0.0), (2, kappa)] {
        let mut points = synth_detuning_series(&system, n, splitting, &deltas, 0.01)?;
        for p in &mut points {
            p.delta = rad_s_to_ghz(p.delta);
        }
        let fit = fit_detuning_series(&points, &DetuningOptions { kappa: Some(50.0), ..DetuningOptions::default() })?;
        println!(
            "{n} transition(s): ratio {:.3}, width {:.1} GHz, wider than kappa: {}",
            fit.derived("ratio").unwrap(),
            fit.derived("width").unwrap().value,
            fit.flags.get("width_exceeds_kappa").copied().unwrap_or(false)
        );
        for w in &fit.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
