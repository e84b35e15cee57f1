//! Closed-form cavity QED: Purcell factor, coupling rate, eliminated decay
//! rate and the enhancement inferred from a measured lifetime ratio.

use cavityfit::qed::{
    branching_fraction, coupling_rate, effective_decay_rate, lifetime_ratio, purcell_enhancement,
    purcell_from_ratio_measured,
};
use cavityfit::units::{rad_s_to_ghz, wavelength_to_omega};
use cavityfit::{CavityParams, CoupledSystem, EmitterParams, Measurement, ModeVolume};

fn main() -> cavityfit::Result<()> {
    let lambda = 1180e-9;
    let omega = wavelength_to_omega(lambda);
    let cavity = CavityParams {
        omega_c: omega,
        q_factor: 3000.0,
        mode_volume: ModeVolume::ReducedWavelengthCubed(1.0),
        refractive_index: 3.5,
        overlap: 1.0,
    };
    let emitter = EmitterParams {
        omega_e: omega,
        gamma: 2.0 * std::f64::consts::PI * 82e6,
        gamma_d: 0.0,
        dipole_moment: 1e-30,
        eta: 0.3,
        dw: 0.7,
        xi: 0.325,
    };

    let fp = cavity.purcell_factor()?;
    let g = coupling_rate(&emitter, &cavity)?;
    println!("F_P = {fp:.1}, kappa/2pi = {:.1} GHz, g/2pi = {:.3} GHz", rad_s_to_ghz(cavity.kappa()), rad_s_to_ghz(g));

    let system = CoupledSystem::new(emitter, cavity)?;
    let regime = system.bad_cavity_check();
    println!("bad cavity: {} (kappa/g = {:.1})", regime.bad_cavity, cavity.kappa() / g);
    for detuning in [0.0, 0.5, 1.0, 2.0] {
        let sys = system.with_delta(detuning * cavity.kappa());
        let rate = effective_decay_rate(&sys)?.rate;
        println!(
            "  delta = {detuning:.1} kappa: gamma_eff/gamma = {:.3}, F = {:.2}",
            rate / system.gamma(),
            purcell_enhancement(&sys, 1.0)?
        );
    }
    println!("on-resonance lifetime ratio {:.3}", lifetime_ratio(&system)?);

    // Inverting a measured lifetime ratio needs the fraction of decay that
    // goes through the cavity-coupled line.
    let branching = branching_fraction(0.3, 0.7, 0.325)?;
    let ratio = Measurement::new(1.72, 0.05);
    let f = purcell_from_ratio_measured(ratio, branching)?;
    println!("ratio {ratio:.2} with gamma_eg/gamma = {:.5}: F = {f:.1}", branching.value());
    Ok(())
}
