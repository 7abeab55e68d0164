//! File formats, Monte Carlo BER harness and command-line front end for
//! [`convk_core`].

pub mod cli;
pub mod error;
pub mod format;
pub mod harness;
pub mod plan;
pub mod scheme;

pub use error::{Error, Result};
pub use harness::{run_point, run_sweep, BerRecord, SweepResult};
pub use plan::{PlanPoint, StopRule, SweepPlan};
pub use scheme::{Decoder, Scheme};
