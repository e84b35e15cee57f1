use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{build_hamiltonian, jump_operator};
use super::{
    hermiticity_error, min_population, trace, BasisState, CMatrix, Diagnostics, DissipatorSpec, TimeGrid,
    Trajectory, TruncatedState, TRACE_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::qed::CoupledSystem;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// How the fixed RK4 step is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepSize {
    /// The largest step that divides the output interval and stays below
    /// 1/(50·r) for every rate r in the problem, including |δ| and γ_d.
    Auto,
    /// A caller-chosen step; it must respect [`stability_bound`] and divide
    /// the output interval.
    Fixed(f64),
}

/// h_max = min(1/(50κ), 1/(50g + ε), 1/(50γ + ε)).
pub fn stability_bound(system: &CoupledSystem) -> f64 {
    let eps = f64::EPSILON;
    let kappa = 1.0 / (50.0 * system.kappa() + eps);
    let g = 1.0 / (50.0 * system.g().abs() + eps);
    let gamma = 1.0 / (50.0 * system.gamma() + eps);
    kappa.min(g).min(gamma)
}

fn auto_bound(system: &CoupledSystem, dissipators: &DissipatorSpec) -> f64 {
    let eps = f64::EPSILON;
    stability_bound(system)
        .min(1.0 / (50.0 * system.delta().abs() + eps))
        .min(1.0 / (50.0 * dissipators.max_rate() + eps))
}

/// Number of RK4 substeps per output interval.
pub(crate) fn substeps(
    system: &CoupledSystem,
    dissipators: &DissipatorSpec,
    grid: &TimeGrid,
    step: StepSize,
) -> Result<usize> {
    let dt = grid.interval();
    match step {
        StepSize::Auto => Ok((dt / auto_bound(system, dissipators)).ceil().max(1.0) as usize),
        StepSize::Fixed(h) => {
            let bound = stability_bound(system);
            if !(h > 0.0) || h > bound {
                return Err(Error::StepTooLarge { step: h, bound });
            }
            let m = (dt / h).round().max(1.0);
            if ((m * h - dt) / dt).abs() > 1e-9 {
                return Err(Error::Input(format!(
                    "step {h:e} does not divide the output interval {dt:e}"
                )));
            }
            Ok(m as usize)
        }
    }
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Superoperator 𝓛 acting on column-stacked ρ:
/// dρ/dt = −i[H,ρ] + Σ Γ(LρL† − ½{L†L, ρ}).
pub fn liouvillian(system: &CoupledSystem, dissipators: &DissipatorSpec, basis: &super::Basis) -> CMatrix {
    let n = basis.len();
    let id = CMatrix::identity(n, n);
    let h = build_hamiltonian(system, basis);
    let minus_i = Complex64::new(0.0, -1.0);
    let mut sup = (kron(&id, &h) - kron(&h.transpose(), &id)) * minus_i;
    for d in dissipators.channels() {
        let l = jump_operator(basis, d.kind);
        let ldl = l.adjoint() * &l;
        let rate = Complex64::new(d.rate, 0.0);
        let half = Complex64::new(0.5, 0.0);
        let term = kron(&l.conjugate(), &l) - (kron(&id, &ldl) + kron(&ldl.transpose(), &id)) * half;
        sup += term * rate;
    }
    sup
}

struct Rk4 {
    sup: CMatrix,
    k: [DVector<Complex64>; 4],
    tmp: DVector<Complex64>,
}

impl Rk4 {
    fn new(sup: CMatrix) -> Self {
        let dim = sup.nrows();
        let z = DVector::zeros(dim);
        Self {
            sup,
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    fn step(&mut self, y: &mut DVector<Complex64>, h: f64) {
        let half = Complex64::new(0.5 * h, 0.0);
        let full = Complex64::new(h, 0.0);
        let [k1, k2, k3, k4] = &mut self.k;
        k1.gemv(ONE, &self.sup, y, ZERO);
        self.tmp.copy_from(y);
        self.tmp.axpy(half, k1, ONE);
        k2.gemv(ONE, &self.sup, &self.tmp, ZERO);
        self.tmp.copy_from(y);
        self.tmp.axpy(half, k2, ONE);
        k3.gemv(ONE, &self.sup, &self.tmp, ZERO);
        self.tmp.copy_from(y);
        self.tmp.axpy(full, k3, ONE);
        k4.gemv(ONE, &self.sup, &self.tmp, ZERO);
        let sixth = Complex64::new(h / 6.0, 0.0);
        let third = Complex64::new(h / 3.0, 0.0);
        y.axpy(sixth, k1, ONE);
        y.axpy(third, k2, ONE);
        y.axpy(third, k3, ONE);
        y.axpy(sixth, k4, ONE);
    }
}

fn unvec(y: &DVector<Complex64>, n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, y.as_slice())
}

/// Density matrices at every grid point.
pub(crate) fn integrate(
    sup: CMatrix,
    rho0: &CMatrix,
    grid: &TimeGrid,
    substeps: usize,
) -> Vec<CMatrix> {
    let n = rho0.nrows();
    let h = grid.interval() / substeps as f64;
    let mut y = DVector::from_column_slice(rho0.as_slice());
    let mut rk = Rk4::new(sup);
    let mut out = Vec::with_capacity(grid.n_points);
    out.push(rho0.clone());
    for _ in 1..grid.n_points {
        for _ in 0..substeps {
            rk.step(&mut y, h);
        }
        out.push(unvec(&y, n));
    }
    out
}

pub(crate) fn trajectory_from_snapshots(
    basis: &super::Basis,
    grid: &TimeGrid,
    snapshots: &[CMatrix],
    h: f64,
    steps: u64,
) -> Result<Trajectory> {
    let times = grid.times();
    let mut diag = Diagnostics {
        min_population: f64::INFINITY,
        step: h,
        steps,
        ..Diagnostics::default()
    };
    let e0 = basis.index_of(BasisState::E0);
    let g1 = basis.index_of(BasisState::G1);
    let mut populations = Vec::with_capacity(snapshots.len());
    let mut coherences = Vec::with_capacity(snapshots.len());
    for (t, rho) in times.iter().zip(snapshots) {
        let tr = trace(rho);
        let drift = (tr - 1.0).abs();
        diag.max_trace_drift = diag.max_trace_drift.max(drift);
        diag.max_hermiticity_error = diag.max_hermiticity_error.max(hermiticity_error(rho));
        diag.min_population = diag.min_population.min(min_population(rho));
        if drift > TRACE_TOLERANCE {
            return Err(Error::TraceDrift {
                time: *t,
                trace: tr,
                tolerance: TRACE_TOLERANCE,
            });
        }
        populations.push((0..rho.nrows()).map(|i| rho[(i, i)].re).collect());
        if let (Some(e), Some(g)) = (e0, g1) {
            coherences.push(rho[(e, g)]);
        }
    }
    Ok(Trajectory {
        basis: basis.clone(),
        times,
        populations,
        coherences: (e0.is_some() && g1.is_some()).then_some(coherences),
        diagnostics: diag,
    })
}

/// Integrates the Lindblad master equation with classical fixed-step RK4.
///
/// Trace, Hermiticity and population positivity are checked at every stored
/// step; a trace drift beyond 1e−9 is an error.
pub fn evolve_master_equation(
    system: &CoupledSystem,
    dissipators: &DissipatorSpec,
    rho0: &TruncatedState,
    grid: &TimeGrid,
    step: StepSize,
) -> Result<Trajectory> {
    rho0.validate()?;
    let m = substeps(system, dissipators, grid, step)?;
    let basis = rho0.basis();
    let sup = liouvillian(system, dissipators, basis);
    let snapshots = integrate(sup, rho0.rho(), grid, m);
    let h = grid.interval() / m as f64;
    trajectory_from_snapshots(basis, grid, &snapshots, h, (m * (grid.n_points - 1)) as u64)
}

/// Observed RK4 convergence order under step halving.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderCheck {
    /// The coarsest step, 4h.
    pub step: f64,
    /// max |ρ(4h) − ρ_ref| over every stored element and time.
    pub error_coarse: f64,
    /// Same for 2h.
    pub error_fine: f64,
    /// error_coarse / error_fine; 16 for an exact fourth-order method.
    pub ratio: f64,
}

/// Runs the integration at 4h, 2h and h, where h is no larger than the step
/// the same `step` gives a normal run, and compares the first two against the
/// Richardson extrapolation ρ(h) + (ρ(h) − ρ(2h))/15.
///
/// Probing from 4h upwards keeps the truncation error above round-off even
/// when the production step is far below what the dynamics need.
pub fn rk4_order_check(
    system: &CoupledSystem,
    dissipators: &DissipatorSpec,
    rho0: &TruncatedState,
    grid: &TimeGrid,
    step: StepSize,
) -> Result<OrderCheck> {
    rho0.validate()?;
    let m = substeps(system, dissipators, grid, step)?.div_ceil(4);
    let sup = liouvillian(system, dissipators, rho0.basis());
    let coarse = integrate(sup.clone(), rho0.rho(), grid, m);
    let fine = integrate(sup.clone(), rho0.rho(), grid, 2 * m);
    let finest = integrate(sup, rho0.rho(), grid, 4 * m);
    let fifteenth = Complex64::new(1.0 / 15.0, 0.0);
    let mut e1 = 0.0f64;
    let mut e2 = 0.0f64;
    for ((c, f), ff) in coarse.iter().zip(&fine).zip(&finest) {
        let reference = ff + (ff - f) * fifteenth;
        e1 = e1.max((c - &reference).camax());
        e2 = e2.max((f - &reference).camax());
    }
    Ok(OrderCheck {
        step: grid.interval() / m as f64,
        error_coarse: e1,
        error_fine: e2,
        ratio: e1 / e2,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{Basis, DissipatorKind};
    use super::*;

    fn excited(basis: Basis) -> TruncatedState {
        TruncatedState::pure(basis, BasisState::E0).unwrap()
    }

    #[test]
    fn free_emitter_decay() {
        let gamma = 1.0;
        let sys = CoupledSystem::from_rates(gamma, 0.0, 100.0, 0.0, 0.0).unwrap();
        let grid = TimeGrid::new(3.0 / gamma, 301).unwrap();
        let traj = evolve_master_equation(
            &sys,
            &DissipatorSpec::from_system(&sys),
            &excited(Basis::single_excitation()),
            &grid,
            StepSize::Auto,
        )
        .unwrap();
        let pe = traj.excited_population();
        assert!((pe.last().unwrap() - (-3.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn empty_cavity_decay() {
        let kappa = 4.0;
        let sys = CoupledSystem::from_rates(0.0, 0.0, kappa, 0.0, 0.0).unwrap();
        let rho0 = TruncatedState::pure(Basis::single_excitation(), BasisState::G1).unwrap();
        let grid = TimeGrid::new(1.0, 101).unwrap();
        let traj = evolve_master_equation(
            &sys,
            &DissipatorSpec::new([(kappa, DissipatorKind::CavityLoss)]).unwrap(),
            &rho0,
            &grid,
            StepSize::Auto,
        )
        .unwrap();
        let p1 = traj.population(BasisState::G1).unwrap();
        for (t, p) in traj.times.iter().zip(&p1) {
            assert!((p - (-kappa * t).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn oversized_step_is_rejected() {
        let sys = CoupledSystem::from_rates(1.0, 0.0, 100.0, 5.0, 0.0).unwrap();
        let grid = TimeGrid::new(1.0, 11).unwrap();
        let r = evolve_master_equation(
            &sys,
            &DissipatorSpec::from_system(&sys),
            &excited(Basis::single_excitation()),
            &grid,
            StepSize::Fixed(1e-2),
        );
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
        let ok = evolve_master_equation(
            &sys,
            &DissipatorSpec::from_system(&sys),
            &excited(Basis::single_excitation()),
            &grid,
            StepSize::Fixed(1e-4),
        )
        .unwrap();
        assert!((ok.diagnostics.step - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn invariants_hold_with_dephasing() {
        let sys = CoupledSystem::from_rates(1.0, 3.0, 100.0, 5.0, 20.0).unwrap();
        let grid = TimeGrid::new(2.0, 201).unwrap();
        let traj = evolve_master_equation(
            &sys,
            &DissipatorSpec::from_system(&sys),
            &excited(Basis::single_excitation()),
            &grid,
            StepSize::Auto,
        )
        .unwrap();
        let d = traj.diagnostics;
        assert!(d.max_trace_drift <= 1e-9);
        assert!(d.max_hermiticity_error <= 1e-12);
        assert!(d.min_population >= -1e-10);
        for tr in traj.traces() {
            assert!((tr - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let sys = CoupledSystem::from_rates(1.0, 0.0, 100.0, 5.0, 0.0).unwrap();
        let grid = TimeGrid::new(0.5, 51).unwrap();
        let check = rk4_order_check(
            &sys,
            &DissipatorSpec::from_system(&sys),
            &excited(Basis::single_excitation()),
            &grid,
            StepSize::Auto,
        )
        .unwrap();
        assert!(check.ratio >= 12.0, "{check:?}");
    }
}
