//! Physical constants (CODATA 2018) and unit conversions.
//!
//! Every rate handled by the library is an angular frequency in rad/s.
//! Measured linewidths are usually quoted in ν-space (MHz); the helpers here
//! are the only place the factor 2π is applied.

use std::f64::consts::PI;

/// Vacuum permittivity ε0 (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Reduced Planck constant ħ (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum c (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn mhz_to_rad_s(nu_mhz: f64) -> f64 {
    2.0 * PI * nu_mhz * 1e6
}

pub fn rad_s_to_mhz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e6)
}

pub fn ghz_to_rad_s(nu_ghz: f64) -> f64 {
    2.0 * PI * nu_ghz * 1e9
}

pub fn rad_s_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e9)
}

/// Angular frequency of light with vacuum wavelength `lambda_m`.
pub fn wavelength_to_omega(lambda_m: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / lambda_m
}

pub fn omega_to_wavelength(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

/// Converts a wavelength offset from the reference `lambda_ref_m` into an
/// angular-frequency detuning, δω = −2πc·Δλ/λ².
///
/// A red shift (positive Δλ) is a negative frequency offset.
pub fn wavelength_offset_to_omega(delta_lambda_m: f64, lambda_ref_m: f64) -> f64 {
    -2.0 * PI * SPEED_OF_LIGHT * delta_lambda_m / (lambda_ref_m * lambda_ref_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mhz_round_trip() {
        let w = mhz_to_rad_s(82.03);
        assert!((rad_s_to_mhz(w) - 82.03).abs() < 1e-12);
        assert!((w - 2.0 * PI * 82.03e6).abs() < 1e-3);
    }

    #[test]
    fn red_shift_is_negative_detuning() {
        let lambda = 737e-9;
        let d = wavelength_offset_to_omega(0.06e-9, lambda);
        assert!(d < 0.0);
        // 0.06 nm at 737 nm is about 33 GHz
        let ghz = rad_s_to_ghz(-d);
        assert!((ghz - 33.14).abs() < 0.05, "{ghz}");
    }

    #[test]
    fn wavelength_omega_inverse() {
        let w = wavelength_to_omega(737e-9);
        assert!((omega_to_wavelength(w) - 737e-9).abs() < 1e-20);
    }
}
