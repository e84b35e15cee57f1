use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use super::hamiltonian::{build_hamiltonian, jump_operator};
use super::master::{substeps, StepSize};
use super::{Basis, BasisState, Diagnostics, DissipatorSpec, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::qed::CoupledSystem;

/// No-jump evolution of (c_e, c_g) on {|e,0⟩, |g,1⟩} under
/// H_eff = H − (i/2)Σ Γ_j L_j†L_j.
///
/// The returned trajectory uses the three-state basis; the |g,0⟩ entry holds
/// the probability lost from the subspace, 1 − ‖ψ‖².
pub fn evolve_effective(
    system: &CoupledSystem,
    dissipators: &DissipatorSpec,
    psi0: [Complex64; 2],
    grid: &TimeGrid,
    step: StepSize,
) -> Result<Trajectory> {
    if dissipators.has_dephasing() {
        return Err(Error::DephasingUnsupported);
    }
    let norm0 = psi0[0].norm_sqr() + psi0[1].norm_sqr();
    if (norm0 - 1.0).abs() > 1e-12 {
        return Err(Error::Input(format!("initial amplitudes have norm² {norm0}")));
    }
    let basis = Basis::single_excitation();
    let mut h = build_hamiltonian(system, &basis);
    for d in dissipators.channels() {
        let l = jump_operator(&basis, d.kind);
        h -= (l.adjoint() * &l) * Complex64::new(0.0, 0.5 * d.rate);
    }
    let e = basis.index_of(BasisState::E0).unwrap();
    let g = basis.index_of(BasisState::G1).unwrap();
    let minus_i = Complex64::new(0.0, -1.0);
    let gen = Matrix2::new(h[(e, e)], h[(e, g)], h[(g, e)], h[(g, g)]) * minus_i;

    let m = substeps(system, dissipators, grid, step)?;
    let dt = grid.interval() / m as f64;
    let half = Complex64::new(0.5 * dt, 0.0);
    let full = Complex64::new(dt, 0.0);
    let mut psi = Vector2::new(psi0[0], psi0[1]);
    let mut populations = Vec::with_capacity(grid.n_points);
    let mut coherences = Vec::with_capacity(grid.n_points);
    let mut record = |psi: &Vector2<Complex64>| {
        let pe = psi[0].norm_sqr();
        let pg = psi[1].norm_sqr();
        populations.push(vec![1.0 - pe - pg, pe, pg]);
        coherences.push(psi[0] * psi[1].conj());
    };
    record(&psi);
    for _ in 1..grid.n_points {
        for _ in 0..m {
            let k1 = gen * psi;
            let k2 = gen * (psi + k1 * half);
            let k3 = gen * (psi + k2 * half);
            let k4 = gen * (psi + k3 * full);
            let two = Complex64::new(2.0, 0.0);
            psi += (k1 + k2 * two + k3 * two + k4) * Complex64::new(dt / 6.0, 0.0);
        }
        record(&psi);
    }
    let min_population = populations
        .iter()
        .flat_map(|row| row.iter().copied())
        .fold(f64::INFINITY, f64::min);
    Ok(Trajectory {
        basis,
        times: grid.times(),
        populations,
        coherences: Some(coherences),
        diagnostics: Diagnostics {
            max_trace_drift: 0.0,
            max_hermiticity_error: 0.0,
            min_population,
            step: dt,
            steps: (m * (grid.n_points - 1)) as u64,
        },
    })
}
