//! Robust joint transmit and reflect beamforming for IRS-assisted links with
//! hardware impairments.

// Negated comparisons below reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod linalg;
pub mod los;
pub mod mm;
pub mod model;
pub mod sdr;
pub mod sim;
pub mod txbf;

pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

pub use channel::{draw_channels, Geometry, LosChannel, RayleighSpec};
pub use error::{Error, Result};
pub use mm::{run_mm, LiftedPhaseVector, MmSettings, MmSolution};
pub use model::{ChannelSet, CompositeChannel, EvalResult, PhaseConstraint, ReflectConfig, SystemConfig};
pub use sdr::{solve_sdr, SdrMethod, SdrSettings, UpperBoundResult};
pub use txbf::TransmitBeam;
