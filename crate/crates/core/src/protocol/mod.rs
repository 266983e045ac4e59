//! Memory runs: write, hold, read, and the figures of merit.
//!
//! A run freezes the medium at the moment of the storage event (OD and
//! control drift over the sub-millisecond duty window, the event lasts a few
//! microseconds), integrates the full write / hold / read sequence and
//! scores the retrieved pulse against the input.

mod duty;
mod optimize;
mod sweep;

pub use duty::{DecayModel, DutyWindowModel};
pub use optimize::{
    fit_gaussian, optimize_gaussian, optimize_input_waveform, GaussianFit, GaussianOptimum, GaussianSearch,
    WaveformOptimum,
};
pub use sweep::{compare_control_strategies, control_sweep, storage_time_sweep, ControlComparison, DriftScenario};

use serde::{Deserialize, Serialize};

use crate::eit;
use crate::error::{Error, Result};
use crate::model::{ComplexWaveform, ControlSchedule, MediumParams, OffWindow, RampShape, WriteRead, C64};
use crate::solver::{propagate_with_kicks, BlochCoefficients, SolverConfig, SpinWaveKick};

/// Width of the integration windows, centered on each pulse peak, s.
pub const EFFICIENCY_WINDOW: f64 = 700e-9;

/// Storage time of a one-pulse delay, s.
pub const ONE_PULSE_DELAY: f64 = 700e-9;

/// Control switching time, s.
pub const SWITCH_RAMP: f64 = 70e-9;

/// Photon probability emitted before and after the control comes back on.
#[derive(Debug, Clone)]
pub struct StorageRun {
    /// Full output time series at the medium exit.
    pub output: ComplexWaveform,
    /// `output` with everything from read-on onward zeroed.
    pub transmitted: ComplexWaveform,
    /// `output` with everything before read-on zeroed.
    pub retrieved: ComplexWaveform,
    pub off_window: Option<OffWindow>,
    /// Excitation held by the atoms in the middle of the hold.
    pub stored_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StorageResult {
    pub efficiency: f64,
    pub likeness: f64,
    /// Fraction of the input that leaves before read-on.
    pub leakage: f64,
    pub stored_fraction: f64,
    /// Fully-off hold, s.
    pub storage_time: f64,
    /// Control-off midpoint of the falling ramp, s.
    pub switch_off: f64,
    pub input: ComplexWaveform,
    pub retrieved: ComplexWaveform,
    pub transmitted: ComplexWaveform,
}

/// When the control starts switching off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchTiming {
    /// Fall midpoint when the pulse peak is halfway through the medium:
    /// input peak plus half the group delay.
    HalfDelay,
    /// Fall midpoint this long after the input peak, s.
    AfterPeak(f64),
}

impl SwitchTiming {
    pub fn switch_off(&self, medium: &MediumParams, omega: f64, input_peak: f64) -> Result<f64> {
        Ok(match *self {
            SwitchTiming::HalfDelay => input_peak + 0.5 * eit::group_delay(medium, omega)?,
            SwitchTiming::AfterPeak(dt) => input_peak + dt,
        })
    }
}

/// Switching and scoring choices shared by every run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageOptions {
    pub timing: SwitchTiming,
    pub ramp: f64,
    pub shape: RampShape,
    /// Integration window for the efficiency, s.
    pub window: f64,
}

impl Default for StorageOptions {
    fn default() -> Self {
        Self {
            timing: SwitchTiming::HalfDelay,
            ramp: SWITCH_RAMP,
            shape: RampShape::RaisedCosine,
            window: EFFICIENCY_WINDOW,
        }
    }
}

/// `integral |psi_out|^2 / integral |psi_in|^2`, each over `window`
/// centered on its own peak.
pub fn efficiency(input: &ComplexWaveform, retrieved: &ComplexWaveform, window: f64) -> Result<f64> {
    let e_in = input.energy_around_peak(window)?;
    if !(e_in > 0.0) {
        return Err(Error::ZeroNorm);
    }
    if retrieved.norm() == 0.0 {
        return Ok(0.0);
    }
    Ok(retrieved.energy_around_peak(window)? / e_in)
}

/// Normalized squared overlap of the two envelopes after moving the
/// retrieved pulse onto the input peak.
pub fn likeness(input: &ComplexWaveform, retrieved: &ComplexWaveform) -> Result<f64> {
    let (n_in, n_out) = (input.norm(), retrieved.norm());
    if !(n_in > 0.0 && n_out > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let aligned = retrieved.shifted(input.peak_time() - retrieved.peak_time());
    let ov = input.overlap(&aligned);
    Ok((ov.norm_sqr() / (n_in * n_out)).min(1.0))
}

/// Runs the whole schedule and splits the output at read-on.
///
/// Without an off-window (control never switched off) everything is
/// transmitted and nothing retrieved.
pub fn store_and_retrieve(
    medium: impl Into<BlochCoefficients>,
    control: &ControlSchedule,
    input: &ComplexWaveform,
    cfg: &SolverConfig,
) -> Result<StorageRun> {
    store_with_hold_factor(medium.into(), control, input, cfg, C64::new(1.0, 0.0))
}

/// [`store_and_retrieve`] with the spin wave multiplied by `factor` in the
/// middle of the hold.
pub(crate) fn store_with_hold_factor(
    coeffs: BlochCoefficients,
    control: &ControlSchedule,
    input: &ComplexWaveform,
    cfg: &SolverConfig,
    factor: C64,
) -> Result<StorageRun> {
    let off = control.off_window()?;
    let grid = cfg.time_grid;
    let kicks: Vec<SpinWaveKick> = off
        .iter()
        .map(|w| SpinWaveKick {
            at_step: grid.nearest_index(0.5 * (w.off_start + w.read_on)),
            factor,
        })
        .collect();
    let prop = propagate_with_kicks(coeffs, control, input, cfg, &kicks)?;
    let output = prop.output;
    let Some(w) = off else {
        let retrieved = ComplexWaveform::zeros(grid);
        return Ok(StorageRun {
            transmitted: output.clone(),
            output,
            retrieved,
            off_window: None,
            stored_fraction: 0.0,
        });
    };
    let zero = C64::new(0.0, 0.0);
    let split = |keep_after: bool| {
        let samples = grid
            .times()
            .zip(output.samples())
            .map(|(t, &s)| if (t >= w.read_on) == keep_after { s } else { zero })
            .collect();
        ComplexWaveform::new(grid, samples)
    };
    Ok(StorageRun {
        transmitted: split(false)?,
        retrieved: split(true)?,
        stored_fraction: prop.kick_states.first().map_or(0.0, |s| s.stored_excitation()),
        off_window: Some(w),
        output,
    })
}

/// Scores a finished run against its input.
pub fn score(run: StorageRun, input: &ComplexWaveform, window: f64) -> Result<StorageResult> {
    let w = run
        .off_window
        .ok_or_else(|| Error::Schedule("storage run has no off-window".into()))?;
    let n_in = input.norm();
    let eta = efficiency(input, &run.retrieved, window)?;
    let like = if run.retrieved.norm() > 0.0 {
        likeness(input, &run.retrieved)?
    } else {
        0.0
    };
    Ok(StorageResult {
        efficiency: eta,
        likeness: like,
        leakage: run.transmitted.norm() / n_in,
        stored_fraction: run.stored_fraction / n_in,
        storage_time: w.hold(),
        switch_off: 0.5 * (w.fall_start + w.off_start),
        input: input.clone(),
        retrieved: run.retrieved,
        transmitted: run.transmitted,
    })
}

/// Time after read-on kept for the retrieved pulse to leave the medium.
fn retrieval_tail(delay: f64, window: f64) -> f64 {
    (4.0 * delay).max(1.0e-6) + window
}

/// Write / hold / read schedule and matching solver span for one event.
pub fn storage_schedule(
    medium: &MediumParams,
    omega_write: f64,
    omega_read: f64,
    storage_time: f64,
    input: &ComplexWaveform,
    opts: &StorageOptions,
    cfg: &SolverConfig,
) -> Result<(ControlSchedule, SolverConfig)> {
    let switch_off = opts.timing.switch_off(medium, omega_write, input.peak_time())?;
    let start = input.grid().start();
    let read_on = switch_off + 0.5 * opts.ramp + storage_time;
    let delay = eit::group_delay(medium, omega_read)?;
    let end = read_on + opts.ramp + retrieval_tail(delay, opts.window);
    let control = ControlSchedule::write_read(
        WriteRead {
            omega_write,
            omega_read,
            switch_off,
            hold: storage_time,
            ramp: opts.ramp,
            shape: opts.shape,
        },
        start,
        end,
    )?;
    Ok((control, cfg.with_span(start, end)?))
}

/// One storage event `event_time` into the duty window.
///
/// OD and control are evaluated at `event_time` and held for the event.
/// The spin wave dephases at `decay.gamma12` throughout (the solver
/// integrates it) and picks up the inhomogeneous factor
/// `exp(-(t_s / tau_b)^2)` in the middle of the hold.
#[allow(clippy::too_many_arguments)]
pub fn run_storage(
    m_base: &MediumParams,
    duty: &DutyWindowModel,
    decay: &DecayModel,
    event_time: f64,
    storage_time: f64,
    input: &ComplexWaveform,
    opts: &StorageOptions,
    cfg: &SolverConfig,
) -> Result<StorageResult> {
    if !(0.0..=duty.duration).contains(&event_time) {
        return Err(Error::param(
            "event_time",
            format!("{event_time} s lies outside the {} s duty window", duty.duration),
        ));
    }
    if !(storage_time >= 0.0) || event_time + storage_time > duty.duration {
        return Err(Error::param(
            "storage_time",
            format!("{storage_time} s does not fit in the duty window after {event_time} s"),
        ));
    }
    let medium = m_base.with_od(duty.od_at(event_time))?.with_gamma12(decay.gamma12)?;
    let omega = duty.control_at(event_time);
    let (control, cfg) = storage_schedule(&medium, omega, omega, storage_time, input, opts, cfg)?;
    let factor = C64::new(decay.inhomogeneous_factor(storage_time), 0.0);
    let run = store_with_hold_factor((&medium).into(), &control, input, &cfg, factor)?;
    score(run, input, opts.window)
}

/// Gaussian test pulse centered at zero on a grid wide enough for the
/// efficiency window.
pub fn gaussian_input(fwhm: f64, step: f64, window: f64) -> Result<ComplexWaveform> {
    let half = (0.5 * window).max(3.0 * fwhm) + 100e-9;
    let grid = crate::model::TimeGrid::spanning(-half, half, step)?;
    ComplexWaveform::gaussian(grid, 0.0, fwhm)
}

#[cfg(test)]
mod tests;
