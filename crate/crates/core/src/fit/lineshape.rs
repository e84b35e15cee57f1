//! Lifetime, spectral and detuning lineshapes with analytic gradients.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use super::special::{erfc, erfcx};

/// A model y = f(x; θ) with named parameters.
///
/// `gradient` defaults to central finite differences; the built-in models
/// override it with closed forms.
pub trait Model: Sync {
    fn param_names(&self) -> &[&'static str];

    fn eval(&self, x: f64, params: &[f64]) -> f64;

    fn gradient(&self, x: f64, params: &[f64], out: &mut [f64]) {
        let mut p = params.to_vec();
        for (j, g) in out.iter_mut().enumerate() {
            let h = if params[j] == 0.0 { 1e-6 } else { 1e-6 * params[j].abs() };
            p[j] = params[j] + h;
            let up = self.eval(x, &p);
            p[j] = params[j] - h;
            let down = self.eval(x, &p);
            p[j] = params[j];
            *g = (up - down) / (2.0 * h);
        }
    }

    fn n_params(&self) -> usize {
        self.param_names().len()
    }
}

/// Background-free exGaussian without its amplitude: returns (f₀/a, G) where
/// G = exp(−u²/2σ²). Both pieces are needed by the gradient.
fn exgaussian_core(t: f64, mu: f64, sigma: f64, gamma: f64) -> (f64, f64) {
    let u = t - mu;
    let x = (sigma * sigma * gamma - u) / (SQRT_2 * sigma);
    let gauss = (-(u * u) / (2.0 * sigma * sigma)).exp();
    let prefactor = sigma * FRAC_PI_2.sqrt();
    let shape = if x >= 0.0 {
        // exp(E)·erfc(x) = exp(E − x²)·erfcx(x) and E − x² = −u²/2σ²
        gauss * erfcx(x)
    } else {
        let exponent = -gamma * u + 0.5 * sigma * sigma * gamma * gamma;
        exponent.exp() * erfc(x)
    };
    (prefactor * shape, gauss)
}

/// Gaussian instrument response (width σ) convolved with a·exp(−Γt) for t ≥ 0,
/// plus a flat background b.
pub fn exgaussian_eval(t: f64, a: f64, mu: f64, sigma: f64, gamma_rate: f64, b: f64) -> f64 {
    a * exgaussian_core(t, mu, sigma, gamma_rate).0 + b
}

/// Partial derivatives of [`exgaussian_eval`] with respect to (a, μ, Γ, b).
pub fn exgaussian_gradient(t: f64, a: f64, mu: f64, sigma: f64, gamma_rate: f64) -> [f64; 4] {
    let (shape, gauss) = exgaussian_core(t, mu, sigma, gamma_rate);
    let u = t - mu;
    let s2 = sigma * sigma;
    [
        shape,
        a * (gamma_rate * shape - gauss),
        a * ((s2 * gamma_rate - u) * shape - s2 * gauss),
        1.0,
    ]
}

/// Peak of height `amp` and full width `fwhm` centred on `nu0`, plus background.
pub fn lorentzian_eval(nu: f64, amp: f64, nu0: f64, fwhm: f64, b: f64) -> f64 {
    let h = 0.5 * fwhm;
    let d = nu - nu0;
    amp * h * h / (d * d + h * h) + b
}

/// Partial derivatives of [`lorentzian_eval`] with respect to (amp, ν0, Δν, b).
pub fn lorentzian_gradient(nu: f64, amp: f64, nu0: f64, fwhm: f64) -> [f64; 4] {
    let h = 0.5 * fwhm;
    let d = nu - nu0;
    let den = d * d + h * h;
    [
        h * h / den,
        amp * h * h * 2.0 * d / (den * den),
        amp * h * d * d / (den * den),
        1.0,
    ]
}

/// exGaussian histogram model with the instrument width held fixed.
/// Parameters: (a, mu, gamma, b); values are counts per bin.
#[derive(Debug, Clone, Copy)]
pub struct ExGaussian {
    pub sigma: f64,
    pub bin_width: f64,
}

impl Model for ExGaussian {
    fn param_names(&self) -> &[&'static str] {
        &["a", "mu", "gamma", "b"]
    }

    fn eval(&self, x: f64, p: &[f64]) -> f64 {
        self.bin_width * exgaussian_eval(x, p[0], p[1], self.sigma, p[2], p[3])
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let g = exgaussian_gradient(x, p[0], p[1], self.sigma, p[2]);
        for (o, gi) in out.iter_mut().zip(g) {
            *o = self.bin_width * gi;
        }
    }
}

/// Lorentzian with parameters (amp, nu0, fwhm, b).
#[derive(Debug, Clone, Copy, Default)]
pub struct Lorentzian;

impl Model for Lorentzian {
    fn param_names(&self) -> &[&'static str] {
        &["amp", "nu0", "fwhm", "b"]
    }

    fn eval(&self, x: f64, p: &[f64]) -> f64 {
        lorentzian_eval(x, p[0], p[1], p[2], p[3])
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&lorentzian_gradient(x, p[0], p[1], p[2]));
    }
}

/// Decay rate against detuning: γ + A·(w/2)²/(δ² + (w/2)²), centred at δ = 0.
/// Parameters: (gamma, amplitude, width).
#[derive(Debug, Clone, Copy, Default)]
pub struct DetuningLorentzian;

impl Model for DetuningLorentzian {
    fn param_names(&self) -> &[&'static str] {
        &["gamma", "amplitude", "width"]
    }

    fn eval(&self, x: f64, p: &[f64]) -> f64 {
        lorentzian_eval(x, p[1], 0.0, p[2], p[0])
    }

    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let g = lorentzian_gradient(x, p[1], 0.0, p[2]);
        out[0] = 1.0;
        out[1] = g[0];
        out[2] = g[2];
    }
}
