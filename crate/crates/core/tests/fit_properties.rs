use cavityfit::fit::{
    exgaussian_eval, fit_lifetime, fit_ple, lm_minimize, propagate_cooperativity, propagate_ratio,
    propagate_reciprocal, Data, ExGaussian, FitResult, LmOptions, Lorentzian, Model,
};
use cavityfit::synth::{synth_lifetime_histogram, synth_ple_scan, Axis, Noise, Scale, SynthSpec};
use cavityfit::Histogram;
use proptest::prelude::*;

fn lifetime_hist(gamma: f64, events: f64, seed: u64) -> Histogram {
    let mut spec = SynthSpec::new(
        &[("mu", 3.0), ("sigma_irf", 0.228), ("gamma", gamma), ("b", 20.0)],
        Axis { start: 0.0, stop: 25.0, n_bins: 401 },
        Noise::Poisson,
        seed,
    );
    spec.scale = Some(Scale::TotalEvents(events));
    synth_lifetime_histogram(&spec).unwrap().data
}

fn assert_psd(fit: &FitResult) {
    let c = &fit.covariance;
    assert!((c - c.transpose()).amax() <= 1e-12 * c.amax());
    let eig = c.clone().symmetric_eigen().eigenvalues;
    let top = eig.amax();
    assert!(eig.iter().all(|&l| l >= -1e-12 * top), "{eig}");
}

/// Weights regenerated from the model at the fitted parameters, then a fresh
/// minimization started from those parameters; returns the relative change
/// in cost.
fn refit_cost_change<M: Model>(model: &M, x: &[f64], y: &[f64], fit: &FitResult) -> f64 {
    let weights: Vec<f64> = x.iter().map(|&t| 1.0 / model.eval(t, &fit.params).max(1e-3)).collect();
    let refit = lm_minimize(model, Data { x, y, weights: &weights }, &fit.params, None, LmOptions::default()).unwrap();
    (refit.cost - fit.cost).abs() / fit.cost
}

/// σ_f from first-order propagation with central-difference partials.
fn fd_sigma(f: impl Fn(&[f64]) -> f64, x: &[f64], sigma: &[f64]) -> f64 {
    let mut var = 0.0;
    for i in 0..x.len() {
        let h = 1e-6 * x[i];
        let mut up = x.to_vec();
        let mut down = x.to_vec();
        up[i] += h;
        down[i] -= h;
        let d = (f(&up) - f(&down)) / (2.0 * h);
        var += (d * sigma[i]).powi(2);
    }
    var.sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lifetime_fits_are_psd_fixed_points_and_deterministic(
        gamma in 0.4f64..2.5,
        events in 2e4f64..1e6,
        seed in any::<u64>(),
    ) {
        let h = lifetime_hist(gamma, events, seed);
        let fit = fit_lifetime(&h, 0.228, None).unwrap();
        prop_assert!(fit.converged);
        assert_psd(&fit);

        let again = fit_lifetime(&h, 0.228, None).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&fit.params), bits(&again.params));
        prop_assert_eq!(bits(fit.covariance.as_slice()), bits(again.covariance.as_slice()));

        let model = ExGaussian { sigma: 0.228, bin_width: h.bin_width() };
        let change = refit_cost_change(&model, &h.bin_centers, &h.counts, &fit);
        prop_assert!(change < 1e-12, "{}", change);
    }

    #[test]
    fn ple_fits_are_psd_and_fixed_points(
        fwhm in 0.2f64..1.2,
        peak in 20.0f64..500.0,
        seed in any::<u64>(),
    ) {
        let spec = SynthSpec::new(
            &[("amp", peak), ("nu0", 0.3), ("fwhm", fwhm), ("b", 3.0)],
            Axis { start: -4.0, stop: 4.0, n_bins: 161 },
            Noise::Poisson,
            seed,
        );
        let scan = &synth_ple_scan(&spec, 1).unwrap().scans[0];
        let fit = fit_ple(scan, None).unwrap();
        prop_assert!(fit.converged);
        assert_psd(&fit);
        let change = refit_cost_change(&Lorentzian, &scan.frequency_offsets, &scan.counts, &fit);
        prop_assert!(change < 1e-12, "{}", change);
    }
}

#[test]
fn propagation_matches_finite_difference_jacobians() {
    for (g, s) in [(0.517, 0.015), (2.010, 0.022)] {
        let m = propagate_reciprocal(g, s).unwrap();
        let fd = fd_sigma(|x| 1.0 / x[0], &[g], &[s]);
        assert!(((m.sigma - fd) / fd).abs() < 1e-6);
    }
    for x in [[1.94, 1.13], [1.48, 0.50]] {
        let sig = if x[0] > 1.9 { [0.06, 0.01] } else { [0.05, 0.01] };
        let m = propagate_ratio(x[0], sig[0], x[1], sig[1]).unwrap();
        let fd = fd_sigma(|v| v[0] / v[1], &x, &sig);
        assert!(((m.sigma - fd) / fd).abs() < 1e-6);
    }
    let x = [82.22, 578.81, 0.72];
    let sig = [2.39, 31.90, 0.05];
    let c = propagate_cooperativity(x[0], sig[0], x[1], sig[1], x[2], sig[2]).unwrap();
    let fd_rho = fd_sigma(|v| v[0] / v[1], &x[..2], &sig[..2]);
    let fd_c = fd_sigma(|v| v[0] / v[1] * v[2], &x, &sig);
    assert!(((c.rate_ratio.sigma - fd_rho) / fd_rho).abs() < 1e-6);
    assert!(((c.cooperativity.sigma - fd_c) / fd_c).abs() < 1e-6);
}

#[test]
fn exgaussian_tail_is_the_input_exponential() {
    let (a, mu, gamma) = (1000.0, 3.0, 0.517);
    let mut errors = Vec::new();
    for sigma in [0.0228, 0.00228, 0.000228] {
        // log-linear least squares on t well past the Gaussian edge
        let t: Vec<f64> = (0..200).map(|i| mu + 5.0 * 0.228 + 0.05 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|&t| exgaussian_eval(t, a, mu, sigma, gamma, 0.0).ln()).collect();
        let n = t.len() as f64;
        let (mt, my) = (t.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let sxy: f64 = t.iter().zip(&y).map(|(t, y)| (t - mt) * (y - my)).sum();
        let sxx: f64 = t.iter().map(|t| (t - mt).powi(2)).sum();
        errors.push((-sxy / sxx - gamma).abs() / gamma);
    }
    assert!(errors.iter().all(|e| *e < 1e-10), "{errors:?}");
}

#[test]
fn poisson_bins_average_to_the_model() {
    let n_seeds = 10_000u64;
    let base = |seed, noise| {
        SynthSpec::new(
            &[("a", 60.0), ("mu", 2.0), ("sigma_irf", 0.228), ("gamma", 0.8), ("b", 4.0)],
            Axis { start: 0.0, stop: 10.0, n_bins: 200 },
            noise,
            seed,
        )
    };
    let expected = synth_lifetime_histogram(&base(0, Noise::None)).unwrap().data.counts;
    let mut sums = vec![0.0; expected.len()];
    for seed in 0..n_seeds {
        let h = synth_lifetime_histogram(&base(seed, Noise::Poisson)).unwrap().data;
        for (s, c) in sums.iter_mut().zip(&h.counts) {
            *s += c;
        }
    }
    let outside = sums
        .iter()
        .zip(&expected)
        .filter(|(s, e)| {
            let mean = *s / n_seeds as f64;
            let se = (*e / n_seeds as f64).sqrt();
            (mean - *e).abs() > 3.0 * se
        })
        .count();
    assert!(outside * 100 <= expected.len(), "{outside} of {} bins outside 3 SE", expected.len());
}
