//! Published values reproduced at their printed precision, through the same
//! report path the command line uses where a command exists.

mod common;

use cavityfit::fit::{propagate_ratio, propagate_reciprocal};
use cavityfit::qed::{branching_fraction, lifetime_limited_linewidth, purcell_from_ratio};
use common::{display, run_cli, value};

#[test]
fn branching_fraction_from_emitter_factors() {
    let b = branching_fraction(0.3, 0.7, 0.325).unwrap();
    assert_eq!(format!("{:.5}", b.value()), "0.06825");
}

#[test]
fn table_i_reciprocal_rows() {
    // (Γ, σ_Γ) → (τ, σ_τ) for all rows of both emitters
    let rows = [
        (0.644, 0.025, "1.55", "0.06"),
        (0.577, 0.020, "1.73", "0.06"),
        (0.615, 0.012, "1.63", "0.03"),
        (0.656, 0.010, "1.52", "0.02"),
        (0.799, 0.007, "1.25", "0.01"),
        (0.887, 0.009, "1.13", "0.01"),
        (0.716, 0.009, "1.40", "0.02"),
        (0.718, 0.006, "1.39", "0.01"),
        (0.661, 0.011, "1.51", "0.02"),
        (0.591, 0.008, "1.69", "0.02"),
        (0.573, 0.015, "1.75", "0.05"),
        (0.569, 0.011, "1.76", "0.03"),
        (0.527, 0.014, "1.90", "0.05"),
        (0.517, 0.015, "1.94", "0.06"),
        (0.675, 0.023, "1.48", "0.05"),
        (0.846, 0.013, "1.18", "0.02"),
        (1.034, 0.013, "0.97", "0.01"),
        (1.384, 0.015, "0.72", "0.01"),
        (2.010, 0.022, "0.50", "0.01"),
        (2.030, 0.034, "0.49", "0.01"),
        (1.703, 0.022, "0.59", "0.01"),
        (1.753, 0.032, "0.57", "0.01"),
        (1.816, 0.040, "0.55", "0.01"),
    ];
    let mismatched: Vec<String> = rows
        .iter()
        .filter_map(|&(g, s, tau, stau)| {
            let m = propagate_reciprocal(g, s).unwrap();
            let got = format!("{:.2} ± {:.2}", m.value, m.sigma);
            let want = format!("{tau} ± {stau}");
            (got != want).then(|| format!("Γ = {g}: {got} vs {want}"))
        })
        .collect();
    assert!(mismatched.is_empty(), "{mismatched:?}");
}

#[test]
fn table_ii_ratio_rows() {
    let p1 = propagate_ratio(1.94, 0.06, 1.13, 0.01).unwrap();
    let p2 = propagate_ratio(1.48, 0.05, 0.50, 0.01).unwrap();
    assert_eq!(
        [format!("{:.2} ± {:.2}", p1.value, p1.sigma), format!("{:.2} ± {:.2}", p2.value, p2.sigma)],
        ["1.72 ± 0.05", "2.98 ± 0.11"]
    );
}

#[test]
fn table_iii_cooperativity_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_cli(
        &[
            "cooperativity",
            "--gamma-mhz", "82.22",
            "--sigma-gamma-mhz", "2.39",
            "--gamma-tot-mhz", "578.81",
            "--sigma-tot-mhz", "31.90",
            "--ratio", "1.72",
            "--sigma-ratio", "0.05",
        ],
        &dir.path().join("c.json"),
    );
    assert_eq!(code, 0);
    let r = r.unwrap();
    assert_eq!(display(&r, "cmax"), "0.72 ± 0.05");
    assert_eq!(display(&r, "cooperativity"), "0.10 ± 0.01");
    assert_eq!(display(&r, "rate_ratio"), "0.140 ± 0.009");
}

#[test]
fn cooperativity_projections() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run_cli(
        &[
            "cooperativity",
            "--gamma-mhz", "82.22",
            "--sigma-gamma-mhz", "2.39",
            "--gamma-tot-mhz", "578.81",
            "--sigma-tot-mhz", "31.90",
            "--ratio", "1.72",
            "--sigma-ratio", "0.05",
            "--gamma-tot-projected-mhz", "420",
        ],
        &dir.path().join("p1.json"),
    );
    assert_eq!(code, 0);
    assert_eq!(format!("{:.2}", value(r.as_ref().unwrap(), "projected_cooperativity")), "0.14");

    let (code, r) = run_cli(
        &["cooperativity", "--gamma-mhz", "107.42", "--gamma-tot-mhz", "613.42", "--ratio", "2.98"],
        &dir.path().join("p2.json"),
    );
    assert_eq!(code, 0);
    assert_eq!(format!("{:.2}", value(r.as_ref().unwrap(), "cooperativity")), "0.35");
}

#[test]
fn purcell_lower_bounds() {
    let dir = tempfile::tempdir().unwrap();
    for (ratio, want) in [("1.72", "11.5"), ("2.98", "30.0")] {
        let (code, r) = run_cli(
            &["purcell", "--ratio", ratio, "--eta", "0.3", "--dw", "0.7", "--xi", "0.325"],
            &dir.path().join(format!("f{ratio}.json")),
        );
        assert_eq!(code, 0);
        assert_eq!(format!("{:.1}", value(r.as_ref().unwrap(), "f_min")), want);
    }
    let b = branching_fraction(0.3, 0.7, 0.325).unwrap();
    assert_eq!(purcell_from_ratio(1.0, b).unwrap(), 1.0);
}

#[test]
fn lifetime_limited_linewidths() {
    let off = lifetime_limited_linewidth(1.94e-9).unwrap() / 1e6;
    let on = lifetime_limited_linewidth(1.13e-9).unwrap() / 1e6;
    assert_eq!(format!("{off:.1}"), "82.0");
    // expected lifetime-reduction broadening, quoted as 59-60 MHz
    let d = format!("{:.0}", on - off);
    assert!(d == "59" || d == "60", "{d}");
}

#[test]
fn detuning_report_endpoint_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p1.csv");
    std::fs::write(
        &csv,
        "delta_ghz,tau_ns,sigma_tau_ns\n0,1.13,0.01\n20,1.25,0.01\n40,1.40,0.02\n60,1.52,0.02\n\
         90,1.69,0.02\n130,1.90,0.05\n200,1.94,0.06\n",
    )
    .unwrap();
    let (code, r) = run_cli(&["detuning-series", csv.to_str().unwrap()], &dir.path().join("d.json"));
    assert_eq!(code, 0);
    assert_eq!(display(r.as_ref().unwrap(), "endpoint_ratio"), "1.72 ± 0.05");
}

#[test]
fn fit_lifetime_echoes_fixed_irf_width() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("p1.spec");
    std::fs::write(
        &spec,
        "kind = lifetime\nmu_ns = 3\ngamma_per_ns = 0.517\nb_per_ns = 40\ntotal_events = 1e6\n\
         t_start_ns = 0\nt_stop_ns = 25\nn_bins = 501\nseed = 3\n",
    )
    .unwrap();
    let data = dir.path().join("p1_offres.csv");
    let argv = ["cavityfit", "synth", "--spec", spec.to_str().unwrap(), "--out", data.to_str().unwrap()];
    assert_eq!(cavityfit::pipeline::run(argv), 0);
    let (code, r) = run_cli(&["fit-lifetime", data.to_str().unwrap()], &dir.path().join("fit.json"));
    assert_eq!(code, 0);
    let r = r.unwrap();
    let irf = common::result(&r, "sigma_irf_ns");
    assert_eq!(irf["sigma"], "exact");
    assert_eq!(format!("{:.3}", value(&r, "sigma_irf_ns")), "0.228");
    assert!(r["inputs"]["fixed_parameters"].as_str().unwrap().contains("sigma_irf_ns"));
    let (tau, s) = (value(&r, "tau_ns"), common::sigma(&r, "tau_ns"));
    assert!((tau - 1.0 / 0.517).abs() <= 2.0 * s, "{tau} ± {s}");
}
