//! Lorentzian fits of synthetic PLE scans: single scans, their sum, and the
//! broadening between two lines.

use cavityfit::fit::{broadening, fit_ple};
use cavityfit::synth::{synth_ple_scan, Axis, Noise, SynthSpec};

fn main() -> cavityfit::Result<()> {
    let axis = Axis { start: -3.0, stop: 3.0, n_bins: 121 };
    let mut spec = SynthSpec::new(&[("amp", 50.0), ("nu0", 0.1), ("fwhm", 0.58), ("b", 2.0)], axis, Noise::Poisson, 3);
    spec.jitter_mhz = 40.0;
    let set = synth_ple_scan(&spec, 5)?;
    for (scan, center) in set.scans.iter().zip(&set.centers) {
        let fit = fit_ple(scan, None)?;
        println!(
            "scan {}: center {center:+.3} GHz, fit nu0 {:+.3}, fwhm {:.0} MHz",
            scan.meta.index,
            fit.param("nu0").unwrap(),
            fit.derived("fwhm_mhz").unwrap()
        );
    }
    let integrated = fit_ple(&set.integrated, None)?;
    let narrow = integrated.derived("fwhm_mhz").unwrap();
    println!("integrated: fwhm {narrow:.0} MHz, unreliable {}", integrated.flags["unreliable"]);

    let wide_spec = SynthSpec::new(&[("amp", 50.0), ("nu0", 0.1), ("fwhm", 0.68), ("b", 2.0)], axis, Noise::Poisson, 4);
    let wide = fit_ple(&synth_ple_scan(&wide_spec, 1)?.scans[0], None)?;
    let wide = wide.derived("fwhm_mhz").unwrap();
    println!("broadening {:.0} MHz", broadening(narrow, wide));
    Ok(())
}
