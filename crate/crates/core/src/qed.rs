//! Closed-form relations for a two-level emitter in a leaky cavity.
//!
//! All rates are angular frequencies (rad/s). The cavity loss rate is always
//! derived as κ = ω_c / Q and never stored.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::Measurement;
use crate::units::{omega_to_wavelength, EPSILON_0, HBAR, SPEED_OF_LIGHT};

/// Intrinsic properties of the emitter, measured away from the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    /// Transition angular frequency ω_e.
    pub omega_e: f64,
    /// Total population decay rate γ outside the cavity.
    pub gamma: f64,
    /// Pure-dephasing rate γ_d.
    pub gamma_d: f64,
    /// Transition dipole magnitude |μ| in C·m.
    pub dipole_moment: f64,
    /// Quantum efficiency η.
    pub eta: f64,
    /// Debye-Waller factor.
    pub dw: f64,
    /// Zero-phonon-line branching ratio ξ.
    pub xi: f64,
}

impl EmitterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_e > 0.0) {
            return Err(Error::domain("emitter frequency must be positive"));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("gamma_d", self.gamma_d),
            ("dipole_moment", self.dipole_moment),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        check_unit_interval("eta", self.eta)?;
        check_unit_interval("dw", self.dw)?;
        check_unit_interval("xi", self.xi)?;
        Ok(())
    }

    pub fn branching_fraction(&self) -> Result<BranchingFraction> {
        branching_fraction(self.eta, self.dw, self.xi)
    }
}

/// Mode volume with an explicit unit tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModeVolume {
    CubicMeters(f64),
    CubicMicrometers(f64),
    CubicNanometers(f64),
    /// Multiples of (λ/n)³ at the cavity wavelength.
    ReducedWavelengthCubed(f64),
}

impl ModeVolume {
    pub fn magnitude(&self) -> f64 {
        match *self {
            ModeVolume::CubicMeters(v)
            | ModeVolume::CubicMicrometers(v)
            | ModeVolume::CubicNanometers(v)
            | ModeVolume::ReducedWavelengthCubed(v) => v,
        }
    }

    /// Absolute volume in m³; `wavelength_m` and `n` resolve the reduced unit.
    pub fn to_cubic_meters(&self, wavelength_m: f64, n: f64) -> f64 {
        match *self {
            ModeVolume::CubicMeters(v) => v,
            ModeVolume::CubicMicrometers(v) => v * 1e-18,
            ModeVolume::CubicNanometers(v) => v * 1e-27,
            ModeVolume::ReducedWavelengthCubed(v) => v * (wavelength_m / n).powi(3),
        }
    }
}

/// A length with an explicit unit tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Length {
    Meters(f64),
    Micrometers(f64),
    Nanometers(f64),
}

impl Length {
    pub fn magnitude(&self) -> f64 {
        match *self {
            Length::Meters(v) | Length::Micrometers(v) | Length::Nanometers(v) => v,
        }
    }
}

/// Resonator properties. κ is derived from ω_c and Q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub omega_c: f64,
    pub q_factor: f64,
    pub mode_volume: ModeVolume,
    pub refractive_index: f64,
    /// Normalized field-dipole overlap (E·μ)/(|E_max||μ|).
    pub overlap: f64,
}

impl CavityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0) || !(self.q_factor > 0.0) {
            return Err(Error::domain("cavity frequency and Q must be positive"));
        }
        if !(self.mode_volume.magnitude() > 0.0) {
            return Err(Error::domain("mode volume must be positive"));
        }
        if !(self.refractive_index >= 1.0) {
            return Err(Error::domain("refractive index must be at least 1"));
        }
        if !(-1.0..=1.0).contains(&self.overlap) {
            return Err(Error::domain(format!("overlap {} outside [-1, 1]", self.overlap)));
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        self.omega_c / self.q_factor
    }

    /// Vacuum wavelength of the cavity resonance in meters.
    pub fn wavelength(&self) -> f64 {
        omega_to_wavelength(self.omega_c)
    }

    pub fn mode_volume_m3(&self) -> f64 {
        self.mode_volume
            .to_cubic_meters(self.wavelength(), self.refractive_index)
    }

    pub fn purcell_factor(&self) -> Result<f64> {
        let volume = match self.mode_volume {
            ModeVolume::ReducedWavelengthCubed(_) => self.mode_volume,
            _ => ModeVolume::CubicMeters(self.mode_volume_m3()),
        };
        purcell_factor(
            Length::Meters(self.wavelength()),
            self.refractive_index,
            self.q_factor,
            volume,
        )
    }
}

/// Whether the cavity is leaky enough for adiabatic elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeFlag {
    pub bad_cavity: bool,
}

/// Emitter, cavity, coupling g and detuning δ = ω_c − ω_e.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledSystem {
    emitter: EmitterParams,
    cavity: CavityParams,
    g: f64,
    delta: f64,
}

impl CoupledSystem {
    /// Couples `emitter` to `cavity`, deriving g from the dipole and mode
    /// volume and δ from the two resonance frequencies.
    pub fn new(emitter: EmitterParams, cavity: CavityParams) -> Result<Self> {
        let g = coupling_rate(&emitter, &cavity)?;
        let delta = cavity.omega_c - emitter.omega_e;
        Ok(Self { emitter, cavity, g, delta })
    }

    /// Like [`CoupledSystem::new`] but with an externally known coupling.
    pub fn with_coupling(emitter: EmitterParams, cavity: CavityParams, g: f64, delta: f64) -> Result<Self> {
        emitter.validate()?;
        cavity.validate()?;
        if !g.is_finite() || !delta.is_finite() {
            return Err(Error::domain("g and delta must be finite"));
        }
        Ok(Self { emitter, cavity, g, delta })
    }

    /// A system specified purely by its rates, for model and oracle studies.
    ///
    /// The optical frequencies are placeholders chosen so that κ = `kappa`;
    /// the emitter is ideal (η = DW = ξ = 1).
    pub fn from_rates(gamma: f64, gamma_d: f64, kappa: f64, g: f64, delta: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::domain("kappa must be positive"));
        }
        let q_factor = 1e6;
        let omega_c = kappa * q_factor;
        let emitter = EmitterParams {
            omega_e: omega_c - delta,
            gamma,
            gamma_d,
            dipole_moment: 0.0,
            eta: 1.0,
            dw: 1.0,
            xi: 1.0,
        };
        let cavity = CavityParams {
            omega_c,
            q_factor,
            mode_volume: ModeVolume::ReducedWavelengthCubed(1.0),
            refractive_index: 1.0,
            overlap: 1.0,
        };
        Self::with_coupling(emitter, cavity, g, delta)
    }

    pub fn emitter(&self) -> &EmitterParams {
        &self.emitter
    }

    pub fn cavity(&self) -> &CavityParams {
        &self.cavity
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.emitter.gamma
    }

    pub fn gamma_d(&self) -> f64 {
        self.emitter.gamma_d
    }

    pub fn kappa(&self) -> f64 {
        self.cavity.kappa()
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..*self }
    }

    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..*self }
    }

    /// κ ≥ 10·g and κ ≥ 10·γ.
    pub fn bad_cavity_check(&self) -> RegimeFlag {
        let k = self.kappa();
        RegimeFlag {
            bad_cavity: k >= 10.0 * self.g.abs() && k >= 10.0 * self.emitter.gamma,
        }
    }
}

/// γ_eg/γ, the fraction of decay through the cavity-coupled transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchingFraction {
    value: f64,
}

impl BranchingFraction {
    pub fn new(value: f64) -> Result<Self> {
        check_unit_interval("branching fraction", value)?;
        Ok(Self { value })
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {v} outside [0, 1]")))
    }
}

/// Single-photon Rabi frequency g = (|μ|/n)·√(ω/(2ε0ħV))·overlap.
///
/// The vacuum-field normalization is the SI one, E_vac = √(ħω/(2ε0 n² V)),
/// which makes 4g²/(κγ_eg) equal to F_P·overlap² exactly. The sign of the
/// overlap is kept.
pub fn coupling_rate(emitter: &EmitterParams, cavity: &CavityParams) -> Result<f64> {
    emitter.validate()?;
    cavity.validate()?;
    let v = cavity.mode_volume_m3();
    let omega = cavity.omega_c;
    if !(v > 0.0) || !(omega > 0.0) {
        return Err(Error::domain("mode volume and frequency must be positive"));
    }
    let n = cavity.refractive_index;
    Ok(emitter.dipole_moment / n * (omega / (2.0 * EPSILON_0 * HBAR * v)).sqrt() * cavity.overlap)
}

/// Wigner-Weisskopf spontaneous emission rate γ_eg = ω³ n |μ|² / (3π ε0 ħ c³).
pub fn wigner_weisskopf_rate(omega_e: f64, n: f64, dipole_moment: f64) -> Result<f64> {
    if !(omega_e > 0.0) || !(n > 0.0) || !(dipole_moment > 0.0) {
        return Err(Error::domain("omega_e, n and dipole moment must be positive"));
    }
    Ok(omega_e.powi(3) * n * dipole_moment * dipole_moment
        / (3.0 * PI * EPSILON_0 * HBAR * SPEED_OF_LIGHT.powi(3)))
}

/// Purcell factor F_P = (3/4π²)(λ/n)³(Q/V).
///
/// The mode volume must be either in the same length system as `wavelength`
/// or in units of (λ/n)³.
pub fn purcell_factor(wavelength: Length, n: f64, q_factor: f64, mode_volume: ModeVolume) -> Result<f64> {
    if !(wavelength.magnitude() > 0.0) || !(n > 0.0) || !(q_factor > 0.0) || !(mode_volume.magnitude() > 0.0) {
        return Err(Error::domain("wavelength, n, Q and V must be positive"));
    }
    let prefactor = 3.0 / (4.0 * PI * PI);
    let reduced_cube = (wavelength.magnitude() / n).powi(3);
    let volume = match (wavelength, mode_volume) {
        (_, ModeVolume::ReducedWavelengthCubed(v)) => return Ok(prefactor * q_factor / v),
        (Length::Meters(_), ModeVolume::CubicMeters(v))
        | (Length::Micrometers(_), ModeVolume::CubicMicrometers(v))
        | (Length::Nanometers(_), ModeVolume::CubicNanometers(v)) => v,
        (l, v) => {
            return Err(Error::UnitMismatch(format!(
                "wavelength {l:?} and mode volume {v:?} use different length units"
            )))
        }
    };
    Ok(prefactor * reduced_cube * q_factor / volume)
}

/// Lorentzian cavity filter (κ/2)²/((κ/2)² + δ²).
pub fn cavity_lorentzian(kappa: f64, delta: f64) -> f64 {
    let hk = 0.5 * kappa;
    hk * hk / (hk * hk + delta * delta)
}

/// Purcell enhancement of the coupled transition,
/// F = f_open + F_P·overlap²·(κ/2)²/((κ/2)² + δ²).
///
/// `open_fraction` is γ_eg,⊥/γ_eg; 1 for an open cavity.
pub fn purcell_enhancement(system: &CoupledSystem, open_fraction: f64) -> Result<f64> {
    let cavity = system.cavity();
    purcell_enhancement_from_factor(
        cavity.purcell_factor()?,
        cavity.overlap,
        system.kappa(),
        system.delta(),
        open_fraction,
    )
}

/// [`purcell_enhancement`] from an already known Purcell factor.
pub fn purcell_enhancement_from_factor(
    purcell_factor: f64,
    overlap: f64,
    kappa: f64,
    delta: f64,
    open_fraction: f64,
) -> Result<f64> {
    if !(open_fraction > 0.0 && open_fraction <= 1.0) {
        return Err(Error::domain(format!("open fraction {open_fraction} outside (0, 1]")));
    }
    if !(kappa > 0.0) {
        return Err(Error::domain("kappa must be positive"));
    }
    Ok(open_fraction + purcell_factor * overlap * overlap * cavity_lorentzian(kappa, delta))
}

/// Decay rate after adiabatic elimination of the cavity, with the regime flag
/// under which the approximation was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveRate {
    pub rate: f64,
    pub regime: RegimeFlag,
}

/// γ_eff = γ + (4g²/κ)·(κ/2)²/((κ/2)² + δ²).
pub fn effective_decay_rate(system: &CoupledSystem) -> Result<EffectiveRate> {
    let kappa = system.kappa();
    if !(kappa > 0.0) {
        return Err(Error::domain("kappa must be positive"));
    }
    let g = system.g();
    let rate = system.gamma() + 4.0 * g * g / kappa * cavity_lorentzian(kappa, system.delta());
    Ok(EffectiveRate {
        rate,
        regime: system.bad_cavity_check(),
    })
}

/// τ_off/τ_on = 1 + 4g²/(κγ).
pub fn lifetime_ratio(system: &CoupledSystem) -> Result<f64> {
    let gamma = system.gamma();
    if !(gamma > 0.0) {
        return Err(Error::domain("gamma must be positive for a lifetime ratio"));
    }
    let on_resonance = effective_decay_rate(&system.with_delta(0.0))?.rate;
    Ok(on_resonance / gamma)
}

/// Inverse of [`lifetime_ratio`]: the cavity-added rate 4g²/κ = γ(r − 1).
pub fn cavity_rate_from_ratio(gamma: f64, ratio: f64) -> Result<f64> {
    if !(gamma > 0.0) || !(ratio >= 1.0) {
        return Err(Error::domain("gamma must be positive and ratio at least 1"));
    }
    Ok(gamma * (ratio - 1.0))
}

/// γ_eg/γ = η·DW·ξ.
pub fn branching_fraction(eta: f64, dw: f64, xi: f64) -> Result<BranchingFraction> {
    check_unit_interval("eta", eta)?;
    check_unit_interval("dw", dw)?;
    check_unit_interval("xi", xi)?;
    BranchingFraction::new(eta * dw * xi)
}

/// Resonant Purcell enhancement from a measured lifetime ratio,
/// F = 1 + (γ/γ_eg)·(r − 1).
pub fn purcell_from_ratio(ratio: f64, branching: BranchingFraction) -> Result<f64> {
    if !(ratio >= 1.0) {
        return Err(Error::domain(format!(
            "lifetime ratio {ratio} < 1: the cavity cannot lengthen the lifetime"
        )));
    }
    if !(branching.value() > 0.0) {
        return Err(Error::domain("branching fraction must be positive"));
    }
    Ok(1.0 + (ratio - 1.0) / branching.value())
}

/// Uncertainty of [`purcell_from_ratio`] from the ratio uncertainty alone.
pub fn purcell_from_ratio_measured(ratio: Measurement, branching: BranchingFraction) -> Result<Measurement> {
    let value = purcell_from_ratio(ratio.value, branching)?;
    Ok(Measurement::new(value, ratio.sigma / branching.value()))
}

/// C = 4g²/(κ(γ + γ_d)).
pub fn cooperativity_from_rates(system: &CoupledSystem) -> Result<f64> {
    let kappa = system.kappa();
    let total = system.gamma() + system.gamma_d();
    if !(kappa > 0.0) || !(total > 0.0) {
        return Err(Error::domain("kappa and gamma + gamma_d must be positive"));
    }
    let g = system.g();
    Ok(4.0 * g * g / (kappa * total))
}

/// C = (γ/γ_tot)·(r − 1) from the lifetime-limited and measured linewidths.
pub fn cooperativity_from_measurements(gamma_lifetime_limited: f64, gamma_total: f64, ratio: f64) -> Result<f64> {
    if !(gamma_lifetime_limited > 0.0) {
        return Err(Error::domain("lifetime-limited linewidth must be positive"));
    }
    if !(gamma_total >= gamma_lifetime_limited) {
        return Err(Error::domain(format!(
            "total linewidth {gamma_total} narrower than the lifetime limit {gamma_lifetime_limited}"
        )));
    }
    if !(ratio >= 1.0) {
        return Err(Error::domain("lifetime ratio must be at least 1"));
    }
    Ok(gamma_lifetime_limited / gamma_total * (ratio - 1.0))
}

/// Lifetime-limited FWHM Δν = 1/(2πτ) in Hz for τ in seconds.
pub fn lifetime_limited_linewidth(tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::domain("lifetime must be positive"));
    }
    Ok(1.0 / (2.0 * PI * tau))
}

/// [`lifetime_limited_linewidth`] with σ_Δν = σ_τ/(2πτ²). Units follow τ:
/// nanoseconds in, GHz out.
pub fn lifetime_limited_linewidth_measured(tau: Measurement) -> Result<Measurement> {
    let value = lifetime_limited_linewidth(tau.value)?;
    Ok(Measurement::new(value, (tau.sigma / (2.0 * PI * tau.value * tau.value)).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{mhz_to_rad_s, rad_s_to_mhz};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn siv_emitter() -> EmitterParams {
        EmitterParams {
            omega_e: 2.0 * PI * 406.8e12,
            gamma: 1.0 / 1.94e-9,
            gamma_d: 0.0,
            dipole_moment: 1.0e-29,
            eta: 0.3,
            dw: 0.7,
            xi: 0.325,
        }
    }

    fn phc_cavity(volume: ModeVolume) -> CavityParams {
        CavityParams {
            omega_c: 2.0 * PI * 406.8e12,
            q_factor: 4100.0,
            mode_volume: volume,
            refractive_index: 2.4,
            overlap: 1.0,
        }
    }

    #[test]
    fn coupling_rate_matches_high_precision_evaluation() {
        // 40-digit evaluation of (μ/n)·sqrt(ω/(2 ε0 ħ V)) with CODATA 2018 constants
        let g = coupling_rate(&siv_emitter(), &phc_cavity(ModeVolume::CubicMeters(2.88e-20))).unwrap();
        assert!(rel(g, 28_724_037_003.665_955) < 1e-12, "{g}");
    }

    #[test]
    fn coupling_rate_zero_overlap_and_volume_scaling() {
        let mut c = phc_cavity(ModeVolume::CubicMeters(2.88e-20));
        c.overlap = 0.0;
        assert_eq!(coupling_rate(&siv_emitter(), &c).unwrap(), 0.0);
        let g1 = coupling_rate(&siv_emitter(), &phc_cavity(ModeVolume::CubicMeters(2.88e-20))).unwrap();
        let g2 = coupling_rate(&siv_emitter(), &phc_cavity(ModeVolume::CubicMeters(5.76e-20))).unwrap();
        assert!(rel(g2, g1 / 2f64.sqrt()) < 1e-15);
        c.overlap = -0.5;
        assert!(coupling_rate(&siv_emitter(), &c).unwrap() < 0.0);
    }

    #[test]
    fn coupling_rate_rejects_bad_volume() {
        let c = phc_cavity(ModeVolume::CubicMeters(0.0));
        assert!(matches!(coupling_rate(&siv_emitter(), &c), Err(Error::Domain(_))));
    }

    #[test]
    fn wigner_weisskopf_scaling() {
        let w = 2.0 * PI * 406.8e12;
        let base = wigner_weisskopf_rate(w, 2.4, 1e-29).unwrap();
        assert!(rel(base, 16_901_900.964_019_535) < 1e-12, "{base}");
        assert!(rel(wigner_weisskopf_rate(w, 2.4, 2e-29).unwrap(), 4.0 * base) < 1e-15);
        assert!(rel(wigner_weisskopf_rate(w, 4.8, 1e-29).unwrap(), 2.0 * base) < 1e-15);
        assert!(wigner_weisskopf_rate(w, 2.4, 0.0).is_err());
    }

    #[test]
    fn coupling_and_emission_rates_reproduce_purcell_factor() {
        let cavity = phc_cavity(ModeVolume::CubicMeters(2.88e-20));
        let g = coupling_rate(&siv_emitter(), &cavity).unwrap();
        let geg = wigner_weisskopf_rate(cavity.omega_c, 2.4, 1e-29).unwrap();
        let fp = cavity.purcell_factor().unwrap();
        assert!(rel(4.0 * g * g / (cavity.kappa() * geg), fp) < 1e-9);
        assert!(rel(fp, 313.212_032_568_053_3) < 1e-12, "{fp}");
    }

    #[test]
    fn purcell_factor_examples() {
        let lambda = Length::Nanometers(737.0);
        let unit = purcell_factor(lambda, 2.4, 1.0, ModeVolume::ReducedWavelengthCubed(1.0)).unwrap();
        assert!((unit - 0.075_990_887_731_753_33).abs() < 1e-15);
        let fp = purcell_factor(lambda, 2.4, 4100.0, ModeVolume::ReducedWavelengthCubed(1.0)).unwrap();
        assert!((fp - 311.6).abs() < 0.05);
        let doubled = purcell_factor(lambda, 2.4, 8200.0, ModeVolume::ReducedWavelengthCubed(1.0)).unwrap();
        assert!(rel(doubled, 2.0 * fp) < 1e-15);
        let v_nm3 = (737.0f64 / 2.4).powi(3);
        let same = purcell_factor(lambda, 2.4, 4100.0, ModeVolume::CubicNanometers(v_nm3)).unwrap();
        assert!(rel(same, fp) < 1e-12);
    }

    #[test]
    fn purcell_factor_unit_mismatch() {
        let r = purcell_factor(Length::Nanometers(737.0), 2.4, 4100.0, ModeVolume::CubicMeters(2.9e-20));
        assert!(matches!(r, Err(Error::UnitMismatch(_))));
    }

    #[test]
    fn purcell_enhancement_examples() {
        let fp = 311.6;
        let kappa = 1.0e11;
        let on = purcell_enhancement_from_factor(fp, 1.0, kappa, 0.0, 1.0).unwrap();
        assert_eq!(on, 1.0 + fp);
        let half = purcell_enhancement_from_factor(fp, 1.0, kappa, kappa / 2.0, 1.0).unwrap();
        assert!(rel(half - 1.0, fp / 2.0) < 1e-15);
        let far = purcell_enhancement_from_factor(fp, 1.0, kappa, 1e9 * kappa, 1.0).unwrap();
        assert!((far - 1.0).abs() < 1e-12);
        // overlap enters squared
        let weak = purcell_enhancement_from_factor(fp, 0.5, kappa, 0.0, 1.0).unwrap();
        assert!(rel(weak - 1.0, fp / 4.0) < 1e-15);
        assert!(purcell_enhancement_from_factor(fp, 1.0, kappa, 0.0, 0.0).is_err());
        assert!(purcell_enhancement_from_factor(fp, 1.0, kappa, 0.0, 1.5).is_err());
    }

    #[test]
    fn purcell_enhancement_of_system_on_resonance() {
        let cavity = phc_cavity(ModeVolume::ReducedWavelengthCubed(1.0));
        let sys = CoupledSystem::new(siv_emitter(), cavity).unwrap();
        let f = purcell_enhancement(&sys, 1.0).unwrap();
        assert!(rel(f, 1.0 + cavity.purcell_factor().unwrap()) < 1e-12);
    }

    #[test]
    fn effective_rate_examples() {
        let sys = CoupledSystem::from_rates(1.0, 0.0, 100.0, 5.0, 0.0).unwrap();
        let eff = effective_decay_rate(&sys).unwrap();
        assert!((eff.rate - 2.0).abs() < 1e-12);
        assert!(eff.regime.bad_cavity);
        let uncoupled = effective_decay_rate(&sys.with_g(0.0)).unwrap();
        assert_eq!(uncoupled.rate, 1.0);
        let strong = CoupledSystem::from_rates(1.0, 0.0, 100.0, 50.0, 0.0).unwrap();
        assert!(!effective_decay_rate(&strong).unwrap().regime.bad_cavity);
    }

    #[test]
    fn lifetime_ratio_examples() {
        let sys = CoupledSystem::from_rates(1.0, 0.0, 100.0, 5.0, 37.0).unwrap();
        assert!((lifetime_ratio(&sys).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(lifetime_ratio(&sys.with_g(0.0)).unwrap(), 1.0);
        let dark = CoupledSystem::from_rates(0.0, 0.0, 100.0, 5.0, 0.0).unwrap();
        assert!(lifetime_ratio(&dark).is_err());
    }

    #[test]
    fn lifetime_ratio_round_trip() {
        let gamma = 3.7e8;
        let kappa = 6.0e11;
        for r in [1.0, 1.3, 1.72, 2.98, 11.0] {
            let added = cavity_rate_from_ratio(gamma, r).unwrap();
            let g = (added * kappa / 4.0).sqrt();
            let sys = CoupledSystem::from_rates(gamma, 0.0, kappa, g, 0.0).unwrap();
            assert!(rel(lifetime_ratio(&sys).unwrap(), r) < 1e-12);
        }
    }

    #[test]
    fn cavity_rate_from_measured_ratio() {
        let gamma = mhz_to_rad_s(82.03);
        let added = cavity_rate_from_ratio(gamma, 1.72).unwrap();
        assert!((rad_s_to_mhz(added) - 59.1).abs() < 0.05);
    }

    #[test]
    fn branching_fraction_examples() {
        assert_eq!(branching_fraction(1.0, 1.0, 1.0).unwrap().value(), 1.0);
        let b = branching_fraction(0.3, 0.7, 0.325).unwrap();
        assert!((b.value() - 0.06825).abs() < 1e-15);
        let zero = branching_fraction(0.0, 0.7, 0.325).unwrap();
        assert_eq!(zero.value(), 0.0);
        assert!(purcell_from_ratio(1.5, zero).is_err());
        assert!(branching_fraction(1.1, 0.7, 0.325).is_err());
        assert!(branching_fraction(0.3, -0.1, 0.325).is_err());
    }

    #[test]
    fn purcell_from_ratio_examples() {
        let b = branching_fraction(0.3, 0.7, 0.325).unwrap();
        assert!((purcell_from_ratio(1.72, b).unwrap() - 11.549).abs() < 1e-3);
        assert!((purcell_from_ratio(2.98, b).unwrap() - 30.01).abs() < 0.01);
        assert_eq!(purcell_from_ratio(1.0, b).unwrap(), 1.0);
        assert!(purcell_from_ratio(0.9, b).is_err());
    }

    #[test]
    fn cooperativity_from_rates_examples() {
        let sys = CoupledSystem::from_rates(1.0, 0.0, 100.0, 5.0, 0.0).unwrap();
        let c0 = cooperativity_from_rates(&sys).unwrap();
        assert!(rel(c0, lifetime_ratio(&sys).unwrap() - 1.0) < 1e-12);
        let dephased = CoupledSystem::from_rates(1.0, 1.0, 100.0, 5.0, 0.0).unwrap();
        assert!((cooperativity_from_rates(&dephased).unwrap() - 0.5).abs() < 1e-12);
        let huge = CoupledSystem::from_rates(1.0, 1e12, 100.0, 5.0, 0.0).unwrap();
        assert!(cooperativity_from_rates(&huge).unwrap() < 1e-10);
        let dead = CoupledSystem::from_rates(0.0, 0.0, 100.0, 5.0, 0.0).unwrap();
        assert!(cooperativity_from_rates(&dead).is_err());
    }

    #[test]
    fn cooperativity_from_measurements_examples() {
        let c = cooperativity_from_measurements(82.22, 578.81, 1.72).unwrap();
        assert!((c - 0.10).abs() < 0.005);
        assert!((cooperativity_from_measurements(82.22, 82.22, 1.72).unwrap() - 0.72).abs() < 1e-12);
        let c2 = cooperativity_from_measurements(107.42, 107.42 + 506.0, 2.98).unwrap();
        assert!((c2 - 0.35).abs() < 0.005, "{c2}");
        assert!(cooperativity_from_measurements(82.22, 50.0, 1.72).is_err());
    }

    #[test]
    fn lifetime_limited_linewidth_examples() {
        let off = lifetime_limited_linewidth(1.94e-9).unwrap();
        assert!((off / 1e6 - 82.0).abs() < 0.05);
        let on = lifetime_limited_linewidth(1.13e-9).unwrap();
        assert!((on / 1e6 - 140.845).abs() < 1e-3);
        assert!(((on - off) / 1e6 - 59.0).abs() < 0.5);
        let doubled = lifetime_limited_linewidth(3.88e-9).unwrap();
        assert!(rel(doubled, off / 2.0) < 1e-15);
        assert!(lifetime_limited_linewidth(0.0).is_err());
        let m = lifetime_limited_linewidth_measured(Measurement::new(2.0, 0.1)).unwrap();
        assert!(rel(m.sigma, 0.1 / (2.0 * PI * 4.0)) < 1e-15);
    }
}
