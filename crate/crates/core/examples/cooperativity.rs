//! Error propagation from fitted lifetimes and linewidths to the lifetime
//! ratio, the emitter-cavity cooperativity and the thermal broadening.

use cavityfit::fit::{broadening, linewidth_mhz, propagate_cooperativity, propagate_ratio, propagate_reciprocal};
use cavityfit::Measurement;

fn main() -> cavityfit::Result<()> {
    // fitted decay rates (1/ns) off and on resonance
    let off = propagate_reciprocal(0.517, 0.015)?;
    let on = propagate_reciprocal(0.887, 0.020)?;
    println!("tau_off = {off:.2} ns, tau_on = {on:.2} ns");

    let ratio = propagate_ratio(off.value, off.sigma, on.value, on.sigma)?;
    println!("lifetime ratio {ratio:.2}");

    let natural = linewidth_mhz(off);
    let total = Measurement::new(578.81, 31.90);
    let c = propagate_cooperativity(natural.value, natural.sigma, total.value, total.sigma, ratio.value - 1.0, ratio.sigma)?;
    println!("gamma/2pi = {natural:.1} MHz, gamma_tot/2pi = {total:.1} MHz");
    println!("gamma/gamma_tot = {:.3}, C = {:.3}", c.rate_ratio, c.cooperativity);

    let cold = Measurement::new(500.0, 20.0);
    println!("broadening between two temperatures {:.0} MHz", broadening(cold, total));
    Ok(())
}
