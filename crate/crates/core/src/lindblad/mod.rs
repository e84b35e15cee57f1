//! Brute-force integration of the Jaynes-Cummings master equation.
//!
//! The emitter⊗photon space is truncated to at most five states. Starting
//! from a single excitation nothing ever reaches |e,1⟩ or |g,2⟩, so the
//! three-state basis {|g,0⟩, |e,0⟩, |g,1⟩} is exact for decay studies and the
//! larger basis exists only to check that claim.
//!
//! Units: ħ = 1, so Hamiltonians are angular frequencies (rad/s) and times are
//! in seconds (or whatever reciprocal unit the rates use).

mod decay;
mod effective;
mod hamiltonian;
mod master;
mod validate;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qed::CoupledSystem;

pub use decay::{extract_decay_rate, extract_decay_rate_from_series, DecayFit, DecayWindow};
pub use effective::evolve_effective;
pub use hamiltonian::{build_hamiltonian, lowering_operator, annihilation_operator};
pub use master::{
    evolve_master_equation, liouvillian, rk4_order_check, stability_bound, OrderCheck, StepSize,
};
pub use validate::{validate_adiabatic_elimination, ValidationOptions, ValidationReport, ValidationRow};

pub(crate) type CMatrix = DMatrix<Complex64>;

/// Product states |atom, photons⟩ available to the truncated basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisState {
    G0,
    E0,
    G1,
    E1,
    G2,
}

impl BasisState {
    pub fn excited(self) -> bool {
        matches!(self, BasisState::E0 | BasisState::E1)
    }

    pub fn photons(self) -> u32 {
        match self {
            BasisState::G0 | BasisState::E0 => 0,
            BasisState::G1 | BasisState::E1 => 1,
            BasisState::G2 => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BasisState::G0 => "g0",
            BasisState::E0 => "e0",
            BasisState::G1 => "g1",
            BasisState::E1 => "e1",
            BasisState::G2 => "g2",
        }
    }

    pub(crate) fn from_parts(excited: bool, photons: u32) -> Option<Self> {
        match (excited, photons) {
            (false, 0) => Some(BasisState::G0),
            (true, 0) => Some(BasisState::E0),
            (false, 1) => Some(BasisState::G1),
            (true, 1) => Some(BasisState::E1),
            (false, 2) => Some(BasisState::G2),
            _ => None,
        }
    }
}

/// Ordered list of basis states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    states: Vec<BasisState>,
}

impl Basis {
    /// {|g,0⟩, |e,0⟩, |g,1⟩}
    pub fn single_excitation() -> Self {
        Self {
            states: vec![BasisState::G0, BasisState::E0, BasisState::G1],
        }
    }

    /// {|g,0⟩, |e,0⟩, |g,1⟩, |e,1⟩, |g,2⟩}
    pub fn extended() -> Self {
        Self {
            states: vec![
                BasisState::G0,
                BasisState::E0,
                BasisState::G1,
                BasisState::E1,
                BasisState::G2,
            ],
        }
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: BasisState) -> Option<usize> {
        self.states.iter().position(|&s| s == state)
    }
}

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-9;
pub const POPULATION_FLOOR: f64 = -1e-10;

/// A density matrix over a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    basis: Basis,
    rho: CMatrix,
}

impl TruncatedState {
    pub fn new(basis: Basis, rho: CMatrix) -> Result<Self> {
        if rho.nrows() != basis.len() || rho.ncols() != basis.len() {
            return Err(Error::Input(format!(
                "density matrix is {}x{} but the basis has {} states",
                rho.nrows(),
                rho.ncols(),
                basis.len()
            )));
        }
        let state = Self { basis, rho };
        state.validate()?;
        Ok(state)
    }

    /// |s⟩⟨s|
    pub fn pure(basis: Basis, state: BasisState) -> Result<Self> {
        let idx = basis
            .index_of(state)
            .ok_or_else(|| Error::Input(format!("{state:?} is not in the basis")))?;
        let n = basis.len();
        let mut rho = CMatrix::zeros(n, n);
        rho[(idx, idx)] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, rho })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_error(&self.rho);
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::Input(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = trace(&self.rho);
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::Input(format!("density matrix trace {tr} != 1")));
        }
        let min = min_population(&self.rho);
        if min < POPULATION_FLOOR {
            return Err(Error::Input(format!("negative population {min:e}")));
        }
        Ok(())
    }
}

pub(crate) fn hermiticity_error(rho: &CMatrix) -> f64 {
    let n = rho.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn trace(rho: &CMatrix) -> f64 {
    (0..rho.nrows()).map(|i| rho[(i, i)].re).sum()
}

pub(crate) fn min_population(rho: &CMatrix) -> f64 {
    (0..rho.nrows()).map(|i| rho[(i, i)].re).fold(f64::INFINITY, f64::min)
}

/// Lindblad channel labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DissipatorKind {
    /// (γ, |g⟩⟨e|)
    EmitterDecay,
    /// (γ_d, |e⟩⟨e|)
    PureDephasing,
    /// (κ, a)
    CavityLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dissipator {
    pub rate: f64,
    pub kind: DissipatorKind,
}

/// Set of (rate, channel) pairs. Zero-rate channels are dropped.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DissipatorSpec {
    channels: Vec<Dissipator>,
}

impl DissipatorSpec {
    pub fn new(channels: impl IntoIterator<Item = (f64, DissipatorKind)>) -> Result<Self> {
        let mut out = Vec::new();
        for (rate, kind) in channels {
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(Error::domain(format!("dissipation rate {rate} for {kind:?} must be nonnegative")));
            }
            if rate > 0.0 {
                out.push(Dissipator { rate, kind });
            }
        }
        Ok(Self { channels: out })
    }

    /// Emitter decay γ, pure dephasing γ_d and cavity loss κ of `system`.
    pub fn from_system(system: &CoupledSystem) -> Self {
        Self::new([
            (system.gamma(), DissipatorKind::EmitterDecay),
            (system.gamma_d(), DissipatorKind::PureDephasing),
            (system.kappa(), DissipatorKind::CavityLoss),
        ])
        .expect("validated system rates are nonnegative")
    }

    /// [`DissipatorSpec::from_system`] without the dephasing channel.
    pub fn without_dephasing(system: &CoupledSystem) -> Self {
        Self::new([
            (system.gamma(), DissipatorKind::EmitterDecay),
            (system.kappa(), DissipatorKind::CavityLoss),
        ])
        .expect("validated system rates are nonnegative")
    }

    pub fn channels(&self) -> &[Dissipator] {
        &self.channels
    }

    pub fn has_dephasing(&self) -> bool {
        self.channels.iter().any(|d| d.kind == DissipatorKind::PureDephasing)
    }

    pub fn max_rate(&self) -> f64 {
        self.channels.iter().map(|d| d.rate).fold(0.0, f64::max)
    }
}

/// Linear output grid from 0 to `t_end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_points: usize) -> Result<Self> {
        if !(t_end > 0.0) || n_points < 2 {
            return Err(Error::Input("time grid needs t_end > 0 and at least 2 points".into()));
        }
        Ok(Self { t_end, n_points })
    }

    /// Five e-folding times of the closed-form effective decay rate.
    pub fn default_for(system: &CoupledSystem, n_points: usize) -> Result<Self> {
        let rate = crate::qed::effective_decay_rate(system)?.rate;
        Self::new(5.0 / rate, n_points)
    }

    pub fn interval(&self) -> f64 {
        self.t_end / (self.n_points - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_end * i as f64 / (self.n_points - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.time(i)).collect()
    }
}

/// Invariant checks accumulated over every stored step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    pub min_population: f64,
    pub step: f64,
    pub steps: u64,
}

/// Populations (and the |e,0⟩–|g,1⟩ coherence) sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub basis: Basis,
    pub times: Vec<f64>,
    /// `populations[i][k]`: occupation of basis state `k` at `times[i]`.
    pub populations: Vec<Vec<f64>>,
    /// ⟨e,0|ρ|g,1⟩ per time, when both states are in the basis.
    pub coherences: Option<Vec<Complex64>>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    /// Occupation series of one basis state.
    pub fn population(&self, state: BasisState) -> Option<Vec<f64>> {
        let k = self.basis.index_of(state)?;
        Some(self.populations.iter().map(|row| row[k]).collect())
    }

    pub fn excited_population(&self) -> Vec<f64> {
        self.population(BasisState::E0)
            .expect("every basis contains |e,0>")
    }

    pub fn traces(&self) -> Vec<f64> {
        self.populations.iter().map(|row| row.iter().sum()).collect()
    }

    /// A trajectory holding only an excited-state population series, for
    /// post-processing externally generated decay curves.
    pub fn from_excited_population(times: Vec<f64>, excited: Vec<f64>) -> Result<Self> {
        if times.len() != excited.len() {
            return Err(Error::Input("times and populations differ in length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("time grid must be strictly increasing".into()));
        }
        let populations = excited.iter().map(|&p| vec![1.0 - p, p, 0.0]).collect();
        Ok(Self {
            basis: Basis::single_excitation(),
            times,
            populations,
            coherences: None,
            diagnostics: Diagnostics::default(),
        })
    }

    /// CSV with columns `t_s,P_g0,P_e0,P_g1,trace`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        let g0 = self.basis.index_of(BasisState::G0);
        let e0 = self.basis.index_of(BasisState::E0);
        let g1 = self.basis.index_of(BasisState::G1);
        writeln!(out, "t_s,P_g0,P_e0,P_g1,trace")?;
        for (t, row) in self.times.iter().zip(&self.populations) {
            let pick = |k: Option<usize>| k.map_or(0.0, |k| row[k]);
            let tr: f64 = row.iter().sum();
            writeln!(out, "{},{},{},{},{}", t, pick(g0), pick(e0), pick(g1), tr)?;
        }
        Ok(())
    }
}
