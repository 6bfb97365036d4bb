//! Exact finite-volume observables for the disordered pinning model and
//! numerical checks of its localized-phase properties.

pub mod cli;
pub mod disorder_mc;
pub mod error;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod plot;
pub mod quenched_dp;
pub mod report;
pub mod stats;
pub mod theorems;

pub use error::{Error, Result};
pub use model::{DisorderFamily, DisorderLaw, DisorderSample, EllSpec, InterArrivalLaw, LawSpec};
pub use numerics::{LogValue, ScaledJet};
pub use quenched_dp::{log_partition, QuenchedSystem};
pub use theorems::{full_report, run_check, CheckConfig, CheckId};
