//! Checks the adiabatically eliminated decay rate against full
//! master-equation runs across a detuning sweep.

use cavityfit::lindblad::{
    evolve_master_equation, extract_decay_rate, validate_adiabatic_elimination, Basis, BasisState, DecayWindow,
    DissipatorSpec, StepSize, TimeGrid, TruncatedState, ValidationOptions,
};
use cavityfit::CoupledSystem;

fn main() -> cavityfit::Result<()> {
    // rates in units of gamma
    let system = CoupledSystem::from_rates(1.0, 0.0, 100.0, 2.0, 0.0)?;

    let grid = TimeGrid::default_for(&system, 801)?;
    let rho0 = TruncatedState::pure(Basis::single_excitation(), BasisState::E0)?;
    let traj = evolve_master_equation(&system, &DissipatorSpec::from_system(&system), &rho0, &grid, StepSize::Auto)?;
    let fit = extract_decay_rate(&traj, DecayWindow::default())?;
    println!(
        "single run: rate {:.5} from {} samples, trace drift {:.1e}",
        fit.rate, fit.n_samples, traj.diagnostics.max_trace_drift
    );

    let deltas: Vec<f64> = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0].iter().map(|f| f * system.kappa()).collect();
    let opts = ValidationOptions { order_check: true, ..ValidationOptions::default() };
    let report = validate_adiabatic_elimination(&system, &deltas, opts)?;
    println!("{:>8} {:>10} {:>10} {:>10} {:>7}", "delta", "closed", "oracle", "rel err", "order");
    for r in &report.rows {
        println!(
            "{:>8.1} {:>10.5} {:>10.5} {:>10.2e} {:>7.2}",
            r.delta,
            r.closed_form,
            r.oracle,
            r.relative_error,
            r.order_ratio.unwrap_or(f64::NAN)
        );
    }
    println!("max relative error {:.2e}, tolerance {:?}, passed {:?}", report.max_relative_error, report.tolerance, report.passed);
    for w in &report.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
