//! Monte-Carlo comparison of the beamforming schemes.

pub mod config;
pub mod io;
pub mod iteration;
pub mod scheme;
pub mod ser;
pub mod sweep;

pub use config::ConfigOverrides;
pub use iteration::{run_iteration_study, IterationRow};
pub use scheme::{design_all, design_beams, upper_bound, Design, DesignSet, DesignSettings, Scheme};
pub use ser::{simulate_ser, SerOutcome};
pub use sweep::{realization_seed, run_sweep, SchemeStats, SimResult, SweepSpec, SweepVariable};
