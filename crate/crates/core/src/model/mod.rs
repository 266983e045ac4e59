//! Shared domain types: medium constants, grids, waveforms, control
//! schedules and polarization states.
//!
//! Units: times in seconds, lengths in meters, every rate and Rabi frequency
//! as an angular frequency (rad/s). Waveform amplitudes are in s^(-1/2) so
//! that the integral of |psi|^2 over time is a probability.

mod control;
mod grid;
mod medium;
mod polarization;
mod waveform;

pub use control::{ControlSchedule, ControlSegment, OffWindow, RampShape, WriteRead};
pub use grid::{SpatialGrid, TimeGrid};
pub use medium::{medium_from_od, MediumParams, GAMMA13_RB85, SPEED_OF_LIGHT};
pub use polarization::{PolarizationState, QubitPhoton};
pub use waveform::{waveform_norm, ComplexWaveform};

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;
