//! Two-level emitter coupled to a lossy optical cavity.
//!
//! The crate has four layers:
//!
//! - [`qed`]: closed-form cavity-QED relations (coupling rate, Purcell factor
//!   and enhancement, adiabatically eliminated decay rate, cooperativity).
//! - [`lindblad`]: a brute-force Lindblad master-equation integrator on the
//!   truncated emitter-photon space, used as an oracle for the closed forms.
//! - [`fit`]: Levenberg-Marquardt fitting with the exGaussian lifetime and
//!   Lorentzian linewidth models, plus first-order error propagation.
//! - [`synth`]: seeded synthetic histograms, PLE scans and detuning series.
//!
//! [`pipeline`] glues these together behind the `cavityfit` command line tool
//! and its CSV/JSON file formats.

pub mod error;
pub mod fit;
pub mod lindblad;
pub mod measurement;
pub mod pipeline;
pub mod qed;
pub mod synth;
pub mod units;

pub use error::{Error, Result};
pub use fit::{FitResult, Histogram, Scan};
pub use measurement::Measurement;
pub use qed::{BranchingFraction, CavityParams, CoupledSystem, EmitterParams, ModeVolume};
