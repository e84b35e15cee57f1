//! Drives the file-based pipeline: writes a synthetic histogram from a spec,
//! fits it, and prints the JSON report.

use cavityfit::pipeline::{run, EXIT_OK};

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join(format!("cavityfit-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let spec = dir.join("lifetime.spec");
    std::fs::write(
        &spec,
        "kind = lifetime\nmu_ns = 3\ngamma_per_ns = 0.517\nsigma_irf_ns = 0.228\nb_per_ns = 40\n\
         total_events = 1e6\nt_start_ns = 0\nt_stop_ns = 25\nn_bins = 501\nseed = 11\n",
    )?;
    let data = dir.join("lifetime.csv");
    let report = dir.join("lifetime.report.json");
    let path = |p: &std::path::Path| p.to_string_lossy().into_owned();

    let code = run(["cavityfit".into(), "synth".into(), "--spec".into(), path(&spec), "--out".into(), path(&data)]);
    assert_eq!(code, EXIT_OK);
    let code = run(["cavityfit".into(), "fit-lifetime".into(), path(&data), "--out".into(), path(&report)]);
    assert_eq!(code, EXIT_OK);
    println!("{}", std::fs::read_to_string(&report)?);

    let code = run(["cavityfit", "cooperativity", "--gamma-mhz", "82.22", "--gamma-tot-mhz", "60", "--ratio", "1.7"]);
    println!("gamma_tot below gamma: exit code {code}");
    std::fs::remove_dir_all(&dir)
}
