//! The subcommands. Each returns a report (or writes data) and an exit code.

use std::path::Path;

use serde::Serialize;

use super::cli::{CooperativityArgs, DetuningArgs, FitLifetimeArgs, FitPleArgs, PurcellArgs, SimulateArgs, SynthArgs};
use super::config::KeyValues;
use super::csvio::{self, read_detuning, read_histogram, read_scan};
use super::report::{exact_text, Report, ResultValue, Table};
use super::{resolve_out, sha256_hex, EXIT_NUMERICAL, EXIT_OK};
use crate::error::{Error, Result};
use crate::fit::{
    broadening, fit_detuning_series, fit_lifetime_with, fit_ple_with, propagate_cooperativity, propagate_ratio,
    DetuningOptions, DetuningPoint, FitResult, LifetimeOptions, PleOptions, Scan,
};
use crate::lindblad::{
    evolve_master_equation, extract_decay_rate, validate_adiabatic_elimination, Basis, BasisState, DecayWindow,
    DissipatorSpec, StepSize, TimeGrid, TruncatedState, ValidationOptions,
};
use crate::measurement::Measurement;
use crate::qed::{
    branching_fraction, effective_decay_rate, purcell_enhancement_from_factor, purcell_from_ratio_measured,
    CoupledSystem,
};
use crate::synth::{self, Axis, Noise, Scale, SynthSpec, GENERATOR_ID};
use crate::units::{ghz_to_rad_s, mhz_to_rad_s, wavelength_to_omega};

pub struct Outcome {
    pub report: Option<Report>,
    pub exit: i32,
}

impl Outcome {
    fn report(report: Report) -> Self {
        let exit = if report.converged == Some(false) { EXIT_NUMERICAL } else { EXIT_OK };
        Self {
            report: Some(report),
            exit,
        }
    }
}

fn echo_file(report: &mut Report, key: &str, path: &Path) -> Result<()> {
    let bytes = std::fs::read(path)?;
    report.input(key, path.display());
    report.input(&format!("{key}_sha256"), sha256_hex(&bytes));
    Ok(())
}

fn push_param(report: &mut Report, fit: &FitResult, param: &str, name: &str, decimals: usize, unit: &str) {
    if let Some(m) = fit.measurement(param) {
        report.push(ResultValue::measured(name, m, decimals, unit));
    }
}

fn attach_fit(report: &mut Report, fit: &FitResult, prefix: &str) {
    report.push(ResultValue::exact(&format!("{prefix}reduced_chi2"), fit.reduced_chi2, 3, ""));
    report.push(ResultValue::exact(&format!("{prefix}iterations"), fit.n_iter as f64, 0, ""));
    report.warnings.extend(fit.warnings.iter().map(|w| format!("{prefix}{w}")));
    report.converged = Some(report.converged.unwrap_or(true) && fit.converged);
}

pub fn fit_lifetime(a: &FitLifetimeArgs, argv: Vec<String>) -> Result<Outcome> {
    let mut report = Report::new("fit-lifetime", argv);
    echo_file(&mut report, "input", &a.input)?;
    report.input("sigma_irf_ns", exact_text(a.sigma_irf_ns));
    report.input("fixed_parameters", "sigma_irf_ns");
    report.input("weighting", format!("{:?}", a.weighting).to_lowercase());
    let hist = read_histogram(&a.input)?;
    let opts = LifetimeOptions {
        sigma_irf: a.sigma_irf_ns,
        weighting: a.weighting.into(),
        ..LifetimeOptions::default()
    };
    let fit = fit_lifetime_with(&hist, &opts)?;
    report.cite("exgaussian-lineshape");
    report.cite("reciprocal-propagation");
    report.cite("lifetime-limited-linewidth");
    report.push(ResultValue::exact("sigma_irf_ns", a.sigma_irf_ns, 3, "ns"));
    push_param(&mut report, &fit, "a", "a", 1, "counts/ns");
    push_param(&mut report, &fit, "mu", "mu_ns", 3, "ns");
    push_param(&mut report, &fit, "gamma", "gamma_per_ns", 3, "1/ns");
    push_param(&mut report, &fit, "b", "b_per_ns", 2, "counts/ns");
    if let Some(tau) = fit.derived("tau") {
        report.push(ResultValue::measured("tau_ns", tau, 2, "ns"));
    }
    if let Some(lw) = fit.derived("linewidth_mhz") {
        report.push(ResultValue::measured("linewidth_mhz", lw, 1, "MHz"));
    }
    attach_fit(&mut report, &fit, "");
    Ok(Outcome::report(report))
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [lo, hi] => {
            let lo: f64 = lo.trim().parse().map_err(|_| Error::Input(format!("bad window '{s}'")))?;
            let hi: f64 = hi.trim().parse().map_err(|_| Error::Input(format!("bad window '{s}'")))?;
            if !(hi > lo) {
                return Err(Error::Input(format!("window '{s}' must have lo < hi")));
            }
            Ok((lo, hi))
        }
        _ => Err(Error::Input(format!("window '{s}' must be 'lo,hi'"))),
    }
}

fn windowed(scan: Scan, window: Option<(f64, f64)>) -> Result<Scan> {
    match window {
        Some((lo, hi)) => scan.window(lo, hi),
        None => Ok(scan),
    }
}

fn push_ple(report: &mut Report, fit: &FitResult, prefix: &str) {
    push_param(report, fit, "amp", &format!("{prefix}amp"), 1, "counts");
    push_param(report, fit, "nu0", &format!("{prefix}nu0_ghz"), 4, "GHz");
    push_param(report, fit, "b", &format!("{prefix}b"), 2, "counts");
    if let Some(w) = fit.derived("fwhm_mhz") {
        report.push(ResultValue::measured(&format!("{prefix}fwhm_mhz"), w, 0, "MHz"));
    }
    attach_fit(report, fit, prefix);
}

pub fn fit_ple(a: &FitPleArgs, argv: Vec<String>) -> Result<Outcome> {
    let mut report = Report::new("fit-ple", argv);
    echo_file(&mut report, "input", &a.input)?;
    let window = a.window_ghz.as_deref().map(parse_window).transpose()?;
    if let Some((lo, hi)) = window {
        report.input("window_ghz", format!("{},{}", exact_text(lo), exact_text(hi)));
    }
    report.input("weighting", format!("{:?}", a.weighting).to_lowercase());
    let opts = PleOptions {
        weighting: a.weighting.into(),
        ..PleOptions::default()
    };
    report.cite("lorentzian-lineshape");
    let scan = windowed(read_scan(&a.input)?, window)?;
    let fit = fit_ple_with(&scan, &opts)?;
    push_ple(&mut report, &fit, "");
    if let Some(other) = &a.compare {
        echo_file(&mut report, "compare", other)?;
        let scan2 = windowed(read_scan(other)?, window)?;
        let fit2 = fit_ple_with(&scan2, &opts)?;
        push_ple(&mut report, &fit2, "compare_");
        let (w1, w2) = (fit.derived("fwhm_mhz"), fit2.derived("fwhm_mhz"));
        if let (Some(w1), Some(w2)) = (w1, w2) {
            report.cite("independent-difference");
            report.push(ResultValue::measured("broadening_mhz", broadening(w1, w2), 0, "MHz"));
        }
    }
    Ok(Outcome::report(report))
}

fn parse_indices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Input(format!("bad row index '{t}'"))))
        .collect()
}

pub fn detuning_series(a: &DetuningArgs, argv: Vec<String>) -> Result<Outcome> {
    let mut report = Report::new("detuning-series", argv);
    echo_file(&mut report, "input", &a.input)?;
    let table = read_detuning(&a.input)?;
    let delta = table.delta_ghz(a.lambda_nm)?;
    if let Some(l) = a.lambda_nm {
        report.input("lambda_nm", exact_text(l));
    }
    if let Some(k) = a.kappa_ghz {
        if !(k > 0.0) {
            return Err(Error::Input("--kappa-ghz must be positive".into()));
        }
        report.input("kappa_ghz", exact_text(k));
    }
    let mut exclude = vec![false; delta.len()];
    if let Some(s) = &a.exclude {
        for i in parse_indices(s)? {
            *exclude
                .get_mut(i)
                .ok_or_else(|| Error::Input(format!("excluded row {i} out of range")))? = true;
        }
        report.input("exclude", s);
    }
    let points: Vec<DetuningPoint> = (0..delta.len())
        .map(|i| DetuningPoint {
            delta: delta[i],
            tau: table.tau_ns[i],
            sigma_tau: table.sigma_tau_ns[i],
        })
        .collect();

    // Endpoint ratio: the most detuned point against the one nearest resonance.
    let kept: Vec<&DetuningPoint> = points.iter().zip(&exclude).filter(|(_, x)| !**x).map(|(p, _)| p).collect();
    let off = kept.iter().max_by(|x, y| x.delta.abs().total_cmp(&y.delta.abs()));
    let on = kept.iter().min_by(|x, y| x.delta.abs().total_cmp(&y.delta.abs()));
    if let (Some(off), Some(on)) = (off, on) {
        report.cite("lifetime-ratio");
        report.push(ResultValue::measured("tau_off_ns", Measurement::new(off.tau, off.sigma_tau), 2, "ns"));
        report.push(ResultValue::measured("tau_on_ns", Measurement::new(on.tau, on.sigma_tau), 2, "ns"));
        let r = propagate_ratio(off.tau, off.sigma_tau, on.tau, on.sigma_tau)?;
        report.push(ResultValue::measured("endpoint_ratio", r, 2, ""));
    }

    let opts = DetuningOptions {
        kappa: a.kappa_ghz,
        exclude,
        ..DetuningOptions::default()
    };
    let fit = fit_detuning_series(&points, &opts)?;
    report.cite("detuning-lorentzian");
    push_param(&mut report, &fit, "gamma", "gamma_per_ns", 4, "1/ns");
    push_param(&mut report, &fit, "amplitude", "amplitude_per_ns", 4, "1/ns");
    push_param(&mut report, &fit, "width", "width_ghz", 2, "GHz");
    if let Some(r) = fit.derived("ratio") {
        report.push(ResultValue::measured("fitted_ratio", r, 2, ""));
    }
    if let Some(r) = fit.derived("width_over_kappa") {
        report.push(ResultValue::measured("width_over_kappa", r, 2, ""));
    }
    attach_fit(&mut report, &fit, "");
    Ok(Outcome::report(report))
}

pub fn cooperativity(a: &CooperativityArgs, argv: Vec<String>) -> Result<Outcome> {
    let mut report = Report::new("cooperativity", argv);
    for (k, v) in [
        ("gamma_mhz", a.gamma_mhz),
        ("sigma_gamma_mhz", a.sigma_gamma_mhz),
        ("gamma_tot_mhz", a.gamma_tot_mhz),
        ("sigma_tot_mhz", a.sigma_tot_mhz),
        ("ratio", a.ratio),
        ("sigma_ratio", a.sigma_ratio),
    ] {
        report.input(k, exact_text(v));
    }
    if !(a.gamma_tot_mhz >= a.gamma_mhz) {
        return Err(Error::Input(format!(
            "total linewidth {} MHz is below the lifetime limit {} MHz",
            a.gamma_tot_mhz, a.gamma_mhz
        )));
    }
    if !(a.ratio > 1.0) {
        return Err(Error::Input(format!("lifetime ratio {} must exceed 1", a.ratio)));
    }
    let cmax = Measurement::new(a.ratio - 1.0, a.sigma_ratio);
    report.cite("cooperativity-from-linewidths");
    let est = propagate_cooperativity(a.gamma_mhz, a.sigma_gamma_mhz, a.gamma_tot_mhz, a.sigma_tot_mhz, cmax.value, cmax.sigma)?;
    report.push(ResultValue::measured("rate_ratio", est.rate_ratio, 3, ""));
    report.push(ResultValue::measured("cmax", cmax, 2, ""));
    report.push(ResultValue::measured("cooperativity", est.cooperativity, 2, ""));
    if let Some(p) = a.gamma_tot_projected_mhz {
        report.input("gamma_tot_projected_mhz", exact_text(p));
        report.input("sigma_tot_projected_mhz", exact_text(a.sigma_tot_projected_mhz));
        if !(p >= a.gamma_mhz) {
            return Err(Error::Input(format!(
                "projected linewidth {p} MHz is below the lifetime limit {} MHz",
                a.gamma_mhz
            )));
        }
        let proj = propagate_cooperativity(a.gamma_mhz, a.sigma_gamma_mhz, p, a.sigma_tot_projected_mhz, cmax.value, cmax.sigma)?;
        report.push(ResultValue::measured("projected_rate_ratio", proj.rate_ratio, 3, ""));
        report.push(ResultValue::measured("projected_cooperativity", proj.cooperativity, 2, ""));
    }
    Ok(Outcome::report(report))
}

pub fn purcell(a: &PurcellArgs, argv: Vec<String>) -> Result<Outcome> {
    let mut report = Report::new("purcell", argv);
    let measurement = [a.ratio, a.sigma_ratio, a.eta, a.dw, a.xi].iter().any(Option::is_some);
    let model = [a.fp, a.overlap, a.q, a.lambda_nm, a.detuning_ghz, a.open_fraction]
        .iter()
        .any(Option::is_some);
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Input(format!("--{name} is required in this mode")));
    match (measurement, model) {
        (true, true) => Err(Error::Input(
            "choose one mode: --ratio/--eta/--dw/--xi (measurement) or --fp/--overlap/--q/--lambda-nm/--detuning-ghz (model)".into(),
        )),
        (false, false) => Err(Error::Input("no inputs: give a measurement or a model".into())),
        (true, false) => {
            let (ratio, eta, dw, xi) = (need(a.ratio, "ratio")?, need(a.eta, "eta")?, need(a.dw, "dw")?, need(a.xi, "xi")?);
            let sigma = a.sigma_ratio.unwrap_or(0.0);
            for (k, v) in [("ratio", ratio), ("sigma_ratio", sigma), ("eta", eta), ("dw", dw), ("xi", xi)] {
                report.input(k, exact_text(v));
            }
            report.input("mode", "measurement");
            let b = branching_fraction(eta, dw, xi)?;
            report.cite("branching-fraction");
            report.cite("purcell-from-lifetime-ratio");
            report.push(ResultValue::exact("branching_fraction", b.value(), 5, ""));
            let f = purcell_from_ratio_measured(Measurement::new(ratio, sigma), b)?;
            report.push(ResultValue::measured("f_min", f, 1, ""));
            Ok(Outcome::report(report))
        }
        (false, true) => {
            let fp = need(a.fp, "fp")?;
            let q = need(a.q, "q")?;
            let lambda = need(a.lambda_nm, "lambda-nm")?;
            let overlap = a.overlap.unwrap_or(1.0);
            let detuning = a.detuning_ghz.unwrap_or(0.0);
            let open = a.open_fraction.unwrap_or(1.0);
            for (k, v) in [("fp", fp), ("q", q), ("lambda_nm", lambda), ("overlap", overlap), ("detuning_ghz", detuning), ("open_fraction", open)] {
                report.input(k, exact_text(v));
            }
            report.input("mode", "model");
            if !(q > 0.0) || !(lambda > 0.0) {
                return Err(Error::Input("--q and --lambda-nm must be positive".into()));
            }
            let kappa = wavelength_to_omega(lambda * 1e-9) / q;
            report.cite("cavity-linewidth");
            report.cite("purcell-enhancement");
            report.push(ResultValue::exact("kappa_ghz", kappa / ghz_to_rad_s(1.0), 2, "GHz"));
            let f = purcell_enhancement_from_factor(fp, overlap, kappa, ghz_to_rad_s(detuning), open)?;
            report.push(ResultValue::exact("enhancement", f, 2, ""));
            Ok(Outcome::report(report))
        }
    }
}

const RATE_KEYS: [(&str, f64); 2] = [("_rad_s", 1.0), ("_mhz", 2.0 * std::f64::consts::PI * 1e6)];

fn rate_options(stem: &str) -> Vec<(String, f64)> {
    RATE_KEYS.iter().map(|(s, f)| (format!("{stem}{s}"), *f)).collect()
}

fn rate(kv: &KeyValues, stem: &str, default: Option<f64>) -> Result<f64> {
    let owned = rate_options(stem);
    let opts: Vec<(&str, f64)> = owned.iter().map(|(k, f)| (k.as_str(), *f)).collect();
    match (kv.quantity(&opts)?, default) {
        (Some(v), _) => Ok(v),
        (None, Some(d)) => Ok(d),
        (None, None) => kv.require_quantity(&opts),
    }
}

fn rate_list(kv: &KeyValues, stem: &str) -> Result<Option<Vec<f64>>> {
    let mut found = None;
    for (suffix, factor) in RATE_KEYS {
        if let Some(v) = kv.list(&format!("{stem}{suffix}"))? {
            if found.is_some() {
                return Err(Error::UnitMismatch(format!("give {stem} in one unit only")));
            }
            found = Some(v.into_iter().map(|x| x * factor).collect());
        }
    }
    Ok(found)
}

fn fmt_row(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| exact_text(*v)).collect()
}

pub fn simulate(a: &SimulateArgs, argv: Vec<String>) -> Result<Outcome> {
    let mut report = Report::new("simulate", argv);
    echo_file(&mut report, "config", &a.config)?;
    let kv = KeyValues::read(&a.config)?;
    let gamma = rate(&kv, "gamma", None)?;
    let gamma_d = rate(&kv, "gamma_d", Some(0.0))?;
    let kappa = rate(&kv, "kappa", None)?;
    let g = rate(&kv, "g", None)?;
    let delta = rate(&kv, "delta", Some(0.0))?;
    let sweep = rate_list(&kv, "delta_sweep")?;
    let basis = match kv.get::<String>("basis")?.as_deref() {
        None | Some("single") => Basis::single_excitation(),
        Some("extended") => Basis::extended(),
        Some(other) => return Err(Error::Input(format!("basis must be 'single' or 'extended', got '{other}'"))),
    };
    let n_points: usize = kv.get("n_points")?.unwrap_or(801);
    let horizon: f64 = kv.get("horizon_over_gamma_eff")?.unwrap_or(8.0);
    let step: Option<f64> = kv.get("step_s")?;
    let order_check: bool = kv.get("order_check")?.unwrap_or(false);
    kv.finish()?;
    for (k, v) in kv.echo() {
        report.input(&format!("config.{k}"), v);
    }
    if let Some(j) = a.jobs {
        report.input("jobs", j);
    }

    let system = CoupledSystem::from_rates(gamma, gamma_d, kappa, g, delta)?;
    let flag = system.bad_cavity_check();
    if !flag.bad_cavity {
        report.warnings.push(format!(
            "outside the bad-cavity regime (kappa = {kappa:e} vs 10 max(g, gamma) = {:e}); adiabatic elimination may be inaccurate",
            10.0 * g.abs().max(gamma)
        ));
    }
    let closed = effective_decay_rate(&system)?.rate;
    report.cite("adiabatic-elimination");
    report.cite("lindblad-master-equation");

    let grid = TimeGrid::new(horizon / closed, n_points)?;
    let diss = DissipatorSpec::from_system(&system);
    let rho0 = TruncatedState::pure(basis, BasisState::E0)?;
    let step = match step {
        Some(h) => StepSize::Fixed(h),
        None => StepSize::Auto,
    };
    let traj = evolve_master_equation(&system, &diss, &rho0, &grid, step)?;
    let traj_path = match &a.trajectory {
        Some(p) => p.clone(),
        None => {
            let rp = resolve_out(a.out.as_deref(), "simulate.report.json");
            let stem = rp.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let stem = stem.strip_suffix(".report").unwrap_or(&stem).to_string();
            rp.with_file_name(format!("{stem}.trajectory.csv"))
        }
    };
    traj.write_csv(std::io::BufWriter::new(std::fs::File::create(&traj_path)?))?;
    report.input("trajectory", traj_path.display());

    let decay = extract_decay_rate(&traj, DecayWindow::default())?;
    report.push(ResultValue::exact("closed_form_rate", closed, 6, "1/s"));
    report.push(ResultValue::measured("oracle_rate", Measurement::new(decay.rate, decay.std_error), 6, "1/s"));
    report.push(ResultValue::exact("relative_error", ((decay.rate - closed) / closed).abs(), 6, ""));
    report.push(ResultValue::exact("max_trace_drift", traj.diagnostics.max_trace_drift, 12, ""));
    report.push(ResultValue::exact("max_hermiticity_error", traj.diagnostics.max_hermiticity_error, 15, ""));
    report.push(ResultValue::exact("min_population", traj.diagnostics.min_population, 12, ""));
    if decay.non_exponential {
        report.warnings.push("oracle population decay is not single-exponential in the fit window".into());
    }

    if let Some(deltas) = sweep {
        let opts = ValidationOptions {
            horizon,
            n_points,
            order_check,
            ..ValidationOptions::default()
        };
        let run = || validate_adiabatic_elimination(&system, &deltas, opts);
        let v = match a.jobs {
            Some(j) => rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Input(e.to_string()))?
                .install(run)?,
            None => run()?,
        };
        report.warnings.extend(v.warnings.iter().cloned());
        report.push(ResultValue::exact("sweep_max_relative_error", v.max_relative_error, 6, ""));
        if let Some(t) = v.tolerance {
            report.push(ResultValue::exact("sweep_tolerance", t, 2, ""));
        }
        let mut table = Table {
            columns: [
                "delta_rad_s",
                "closed_form",
                "oracle",
                "oracle_std_error",
                "relative_error",
                "max_trace_drift",
                "max_hermiticity_error",
                "order_ratio",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            rows: Vec::new(),
        };
        for r in &v.rows {
            let mut row = fmt_row(&[
                r.delta,
                r.closed_form,
                r.oracle,
                r.oracle_std_error,
                r.relative_error,
                r.max_trace_drift,
                r.max_hermiticity_error,
            ]);
            row.push(r.order_ratio.map(exact_text).unwrap_or_else(|| "-".into()));
            table.rows.push(row);
        }
        report.tables.insert("validation".into(), table);
    }
    Ok(Outcome::report(report))
}

#[derive(Serialize)]
struct SynthMeta<'a> {
    schema_version: u32,
    tool_version: &'a str,
    generator: &'a str,
    seed: u64,
    spec_sha256: String,
    spec: std::collections::BTreeMap<String, String>,
    warnings: Vec<String>,
}

fn noise_from(kv: &KeyValues) -> Result<Noise> {
    let sigma: Option<f64> = kv.get("noise_sigma_counts")?;
    match kv.get::<String>("noise")?.as_deref() {
        None | Some("poisson") => Ok(Noise::Poisson),
        Some("none") => Ok(Noise::None),
        Some("gaussian") => Ok(Noise::Gaussian(
            sigma.ok_or_else(|| Error::Input("gaussian noise needs noise_sigma_counts".into()))?,
        )),
        Some(other) => Err(Error::Input(format!("unknown noise '{other}'"))),
    }
}

/// Everything that determines a synthetic data set, hashed into the sidecar.
#[derive(Serialize)]
enum SynthJob {
    Lifetime(SynthSpec),
    Ple { spec: SynthSpec, n_scans: usize },
    Detuning {
        gamma_rad_s: f64,
        kappa_rad_s: f64,
        g_rad_s: f64,
        n_transitions: usize,
        splitting_rad_s: f64,
        deltas_ghz: Vec<f64>,
        relative_error: f64,
    },
}

fn synth_job(kv: &KeyValues) -> Result<SynthJob> {
    let kind: String = kv.require("kind")?;
    let seed: u64 = kv.get("seed")?.unwrap_or(0);
    match kind.as_str() {
        "lifetime" => {
            let mut spec = SynthSpec::new(
                &[
                    ("mu", kv.require("mu_ns")?),
                    ("sigma_irf", kv.get("sigma_irf_ns")?.unwrap_or(crate::fit::DEFAULT_SIGMA_IRF_NS)),
                    ("gamma", kv.require("gamma_per_ns")?),
                    ("b", kv.get("b_per_ns")?.unwrap_or(0.0)),
                ],
                Axis {
                    start: kv.require("t_start_ns")?,
                    stop: kv.require("t_stop_ns")?,
                    n_bins: kv.require("n_bins")?,
                },
                noise_from(kv)?,
                seed,
            );
            match (kv.get::<f64>("a_per_ns")?, kv.get::<f64>("total_events")?) {
                (Some(a), None) => {
                    spec.truth.insert("a".into(), a);
                }
                (None, Some(n)) => spec.scale = Some(Scale::TotalEvents(n)),
                _ => return Err(Error::Input("give exactly one of a_per_ns, total_events".into())),
            }
            Ok(SynthJob::Lifetime(spec))
        }
        "ple" => {
            let fwhm = kv.require_quantity(&[("fwhm_ghz", 1.0), ("fwhm_mhz", 1e-3)])?;
            let mut spec = SynthSpec::new(
                &[("nu0", kv.get("nu0_ghz")?.unwrap_or(0.0)), ("fwhm", fwhm), ("b", kv.get("b_counts")?.unwrap_or(0.0))],
                Axis {
                    start: kv.require("f_start_ghz")?,
                    stop: kv.require("f_stop_ghz")?,
                    n_bins: kv.require("n_points")?,
                },
                noise_from(kv)?,
                seed,
            );
            match (kv.get::<f64>("amp_counts")?, kv.get::<f64>("peak_counts")?) {
                (Some(a), None) => {
                    spec.truth.insert("amp".into(), a);
                }
                (None, Some(p)) => spec.scale = Some(Scale::PeakCounts(p)),
                _ => return Err(Error::Input("give exactly one of amp_counts, peak_counts".into())),
            }
            spec.jitter_mhz = kv.get("jitter_mhz")?.unwrap_or(0.0);
            Ok(SynthJob::Ple {
                spec,
                n_scans: kv.get("n_scans")?.unwrap_or(1),
            })
        }
        "detuning" => {
            let start: f64 = kv.require("delta_start_ghz")?;
            let stop: f64 = kv.require("delta_stop_ghz")?;
            let n: usize = kv.require("n_points")?;
            if n < 2 || !(stop > start) {
                return Err(Error::Input("need n_points >= 2 and delta_stop_ghz > delta_start_ghz".into()));
            }
            Ok(SynthJob::Detuning {
                gamma_rad_s: mhz_to_rad_s(kv.require("gamma_mhz")?),
                kappa_rad_s: ghz_to_rad_s(kv.require("kappa_ghz")?),
                g_rad_s: ghz_to_rad_s(kv.require("g_ghz")?),
                n_transitions: kv.get("n_transitions")?.unwrap_or(1),
                splitting_rad_s: ghz_to_rad_s(kv.get("splitting_ghz")?.unwrap_or(0.0)),
                deltas_ghz: (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
                relative_error: kv.require("relative_error")?,
            })
        }
        other => Err(Error::Input(format!("unknown kind '{other}' (lifetime, ple, detuning)"))),
    }
}

pub fn synth(a: &SynthArgs) -> Result<Outcome> {
    let kv = KeyValues::read(&a.spec)?;
    let job = synth_job(&kv)?;
    kv.finish()?;
    let hash = sha256_hex(&serde_json::to_vec(&job)?);
    let out = resolve_out(a.out.as_deref(), "synth.csv");
    // detuning series are noiseless, so their seed is unused
    let seed = match &job {
        SynthJob::Lifetime(s) | SynthJob::Ple { spec: s, .. } => s.seed,
        SynthJob::Detuning { .. } => 0,
    };
    let comments = vec![
        format!("generator {GENERATOR_ID}"),
        format!("seed {seed}"),
        format!("spec_sha256 {hash}"),
    ];
    let mut buf = Vec::new();
    let warnings = match &job {
        SynthJob::Lifetime(spec) => {
            let h = synth::synth_lifetime_histogram(spec)?;
            csvio::write_histogram(&mut buf, &comments, &h.data)?;
            h.warnings
        }
        SynthJob::Ple { spec, n_scans } => {
            let p = synth::synth_ple_scan(spec, *n_scans)?;
            csvio::write_scans(&mut buf, &comments, &p.integrated, &p.scans)?;
            vec![]
        }
        SynthJob::Detuning {
            gamma_rad_s,
            kappa_rad_s,
            g_rad_s,
            n_transitions,
            splitting_rad_s,
            deltas_ghz,
            relative_error,
        } => {
            let sys = CoupledSystem::from_rates(*gamma_rad_s, 0.0, *kappa_rad_s, *g_rad_s, 0.0)?;
            let deltas: Vec<f64> = deltas_ghz.iter().map(|d| ghz_to_rad_s(*d)).collect();
            let pts = synth::synth_detuning_series(&sys, *n_transitions, *splitting_rad_s, &deltas, *relative_error)?;
            let tau: Vec<f64> = pts.iter().map(|p| p.tau).collect();
            let sigma: Vec<f64> = pts.iter().map(|p| p.sigma_tau).collect();
            csvio::write_detuning(&mut buf, &comments, deltas_ghz, &tau, &sigma)?;
            vec![]
        }
    };
    std::fs::write(&out, &buf)?;
    let meta = SynthMeta {
        schema_version: super::report::SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        generator: GENERATOR_ID,
        seed,
        spec_sha256: hash,
        spec: kv.echo().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        warnings: warnings.clone(),
    };
    let mut meta_json = serde_json::to_string_pretty(&meta)?;
    meta_json.push('\n');
    let meta_path = out.with_file_name(format!(
        "{}.meta.json",
        out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    ));
    std::fs::write(&meta_path, meta_json)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!("data: {}", out.display());
    println!("metadata: {}", meta_path.display());
    Ok(Outcome { report: None, exit: EXIT_OK })
}
