use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_storage, DecayModel, DutyWindowModel, StorageOptions, StorageResult, SwitchTiming};
use crate::eit;
use crate::error::{Error, Result};
use crate::model::{ComplexWaveform, MediumParams};
use crate::solver::SolverConfig;

/// OD drift applied to every starting OD of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftScenario {
    /// Duty window, s.
    pub duration: f64,
    /// OD at the end of the window over OD at the start.
    pub od_ratio: f64,
    /// Operating point the pulse sequence was set up for: control level
    /// (rad/s) at this OD, and the switch timing derived from both.
    pub omega_ref: f64,
    pub od_ref: f64,
    pub storage_time: f64,
    /// Storage events spread evenly over the window and averaged.
    pub event_samples: usize,
    pub decay: DecayModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlComparison {
    pub od: Vec<f64>,
    pub compensated: Vec<f64>,
    pub constant: Vec<f64>,
}

impl DriftScenario {
    fn event_times(&self) -> Vec<f64> {
        let last = self.duration - self.storage_time;
        let n = self.event_samples.max(1);
        if n == 1 {
            return vec![0.0];
        }
        (0..n).map(|i| last * i as f64 / (n - 1) as f64).collect()
    }

    /// Compensated control level: keeps the group delay of the reference
    /// point, `omega_ref * sqrt(od / od_ref)`.
    pub fn omega_at(&self, od: f64) -> f64 {
        self.omega_ref * (od / self.od_ref).sqrt()
    }
}

/// Duty-window-averaged efficiency against starting OD for two ways of
/// running the control while the OD drifts by `od_ratio`:
///
/// * compensated: the control follows the OD, `Omega ~ sqrt(OD)`, anchored
///   at the reference point, so the group delay never changes;
/// * constant: the control stays at `omega_ref`.
///
/// The switch timing is derived once from the reference point and used for
/// every event, as a fixed pulse sequence would be. At the reference OD
/// without drift the two strategies are the same run.
pub fn compare_control_strategies(
    m_base: &MediumParams,
    scenario: &DriftScenario,
    od_values: &[f64],
    input: &ComplexWaveform,
    opts: &StorageOptions,
    cfg: &SolverConfig,
) -> Result<ControlComparison> {
    if !(scenario.od_ratio > 0.0 && scenario.od_ref > 0.0) {
        return Err(Error::param("od_ratio", "OD ratio and reference OD must be positive"));
    }
    let events = scenario.event_times();
    let timing = match opts.timing {
        SwitchTiming::HalfDelay => {
            SwitchTiming::AfterPeak(0.5 * eit::group_delay(&m_base.with_od(scenario.od_ref)?, scenario.omega_ref)?)
        }
        t => t,
    };
    let o = StorageOptions { timing, ..*opts };
    let mut jobs = Vec::new();
    for (k, &od) in od_values.iter().enumerate() {
        let od_end = od * scenario.od_ratio;
        let comp = DutyWindowModel::new(
            scenario.duration,
            od,
            od_end,
            scenario.omega_at(od),
            scenario.omega_at(od_end),
        )?;
        let cons = DutyWindowModel::constant_control(scenario.duration, od, od_end, scenario.omega_ref)?;
        for &t in &events {
            jobs.push((k, true, comp, t));
            jobs.push((k, false, cons, t));
        }
    }
    let etas = jobs
        .par_iter()
        .map(|(_, _, duty, t)| {
            run_storage(m_base, duty, &scenario.decay, *t, scenario.storage_time, input, &o, cfg).map(|r| r.efficiency)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = od_values.len();
    let (mut comp, mut cons) = (vec![0.0; n], vec![0.0; n]);
    for ((k, compensated, ..), eta) in jobs.iter().zip(etas) {
        let w = eta / events.len() as f64;
        if *compensated {
            comp[*k] += w;
        } else {
            cons[*k] += w;
        }
    }
    Ok(ControlComparison {
        od: od_values.to_vec(),
        compensated: comp,
        constant: cons,
    })
}

/// One run per storage time, all at the same event time.
#[allow(clippy::too_many_arguments)]
pub fn storage_time_sweep(
    m_base: &MediumParams,
    duty: &DutyWindowModel,
    decay: &DecayModel,
    event_time: f64,
    storage_times: &[f64],
    input: &ComplexWaveform,
    opts: &StorageOptions,
    cfg: &SolverConfig,
) -> Result<Vec<StorageResult>> {
    storage_times
        .par_iter()
        .map(|&ts| run_storage(m_base, duty, decay, event_time, ts, input, opts, cfg))
        .collect()
}

/// One run per control Rabi frequency on an undrifting medium.
pub fn control_sweep(
    medium: &MediumParams,
    omegas: &[f64],
    storage_time: f64,
    decay: &DecayModel,
    input: &ComplexWaveform,
    opts: &StorageOptions,
    cfg: &SolverConfig,
) -> Result<Vec<StorageResult>> {
    omegas
        .par_iter()
        .map(|&w| {
            let duty = DutyWindowModel::frozen(storage_time.max(1e-6), medium.od(), w)?;
            run_storage(medium, &duty, decay, 0.0, storage_time, input, opts, cfg)
        })
        .collect()
}
