use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GAMMA13_RB85;

/// Linear drift of the optical depth and control over one memory duty
/// window (the atoms are released from the trap and expand).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DutyWindowModel {
    /// s
    pub duration: f64,
    pub od_start: f64,
    pub od_end: f64,
    /// rad/s
    pub control_start: f64,
    /// rad/s
    pub control_end: f64,
}

impl DutyWindowModel {
    pub fn new(duration: f64, od_start: f64, od_end: f64, control_start: f64, control_end: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::param("duration", "must be positive"));
        }
        if !(od_start > 0.0 && od_end > 0.0) {
            return Err(Error::param("od", "must stay positive over the duty window"));
        }
        if !(control_start >= 0.0 && control_end >= 0.0) {
            return Err(Error::param("control", "must be non-negative"));
        }
        Ok(Self {
            duration,
            od_start,
            od_end,
            control_start,
            control_end,
        })
    }

    /// Dual-rail setting: 0.3 ms window, OD 300 -> 250, control
    /// 10.2 -> 9.2 gamma13.
    pub fn dual_rail() -> Self {
        Self {
            duration: 0.3e-3,
            od_start: 300.0,
            od_end: 250.0,
            control_start: 10.2 * GAMMA13_RB85,
            control_end: 9.2 * GAMMA13_RB85,
        }
    }

    /// No drift at all.
    pub fn frozen(duration: f64, od: f64, control: f64) -> Result<Self> {
        Self::new(duration, od, od, control, control)
    }

    /// Control scaled as `sqrt(OD)` so the group delay stays constant while
    /// the OD drifts.
    pub fn compensated(duration: f64, od_start: f64, od_end: f64, control_start: f64) -> Result<Self> {
        Self::new(
            duration,
            od_start,
            od_end,
            control_start,
            control_start * (od_end / od_start).sqrt(),
        )
    }

    /// OD drifts, control stays at its initial value.
    pub fn constant_control(duration: f64, od_start: f64, od_end: f64, control: f64) -> Result<Self> {
        Self::new(duration, od_start, od_end, control, control)
    }

    fn fraction(&self, t: f64) -> f64 {
        (t / self.duration).clamp(0.0, 1.0)
    }

    pub fn od_at(&self, t: f64) -> f64 {
        self.od_start + (self.od_end - self.od_start) * self.fraction(t)
    }

    pub fn control_at(&self, t: f64) -> f64 {
        self.control_start + (self.control_end - self.control_start) * self.fraction(t)
    }
}

/// Spin-wave decay during the hold: homogeneous dephasing `gamma12` plus a
/// Gaussian envelope from inhomogeneous broadening,
/// amplitude factor `exp(-gamma12 t) exp(-(t / tau_b)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    /// rad/s
    pub gamma12: f64,
    /// s; `None` disables the Gaussian term.
    pub tau_b: Option<f64>,
}

impl DecayModel {
    pub fn new(gamma12: f64, tau_b: Option<f64>) -> Result<Self> {
        if !(gamma12 >= 0.0 && gamma12.is_finite()) {
            return Err(Error::param("gamma12", "must be non-negative"));
        }
        if let Some(tb) = tau_b {
            if !(tb > 0.0) {
                return Err(Error::param("tau_b", "must be positive"));
            }
        }
        Ok(Self { gamma12, tau_b })
    }

    pub fn disabled() -> Self {
        Self {
            gamma12: 0.0,
            tau_b: None,
        }
    }

    /// Chooses `tau_b` so that the retrieved intensity has fallen to half
    /// after `half_time` of storage.
    pub fn calibrated(gamma12: f64, half_time: f64) -> Result<Self> {
        if !(half_time > 0.0) {
            return Err(Error::param("half_time", "must be positive"));
        }
        let budget = std::f64::consts::LN_2 - 2.0 * gamma12 * half_time;
        if !(budget > 0.0) {
            return Err(Error::param(
                "half_time",
                format!("gamma12 alone halves the efficiency before {half_time} s"),
            ));
        }
        Self::new(gamma12, Some(half_time / (0.5 * budget).sqrt()))
    }

    /// Calibrated to halve at 15 us with `gamma12 = 0.0007 gamma13`.
    pub fn default_rb85() -> Self {
        Self::calibrated(0.0007 * GAMMA13_RB85, 15e-6).expect("valid default decay")
    }

    /// Gaussian part of the amplitude factor.
    pub fn inhomogeneous_factor(&self, t: f64) -> f64 {
        match self.tau_b {
            Some(tb) => (-(t / tb).powi(2)).exp(),
            None => 1.0,
        }
    }

    pub fn amplitude_factor(&self, t: f64) -> f64 {
        (-self.gamma12 * t).exp() * self.inhomogeneous_factor(t)
    }

    /// Retrieved-intensity factor after `t` of storage.
    pub fn efficiency_factor(&self, t: f64) -> f64 {
        self.amplitude_factor(t).powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duty_window_is_linear() {
        let d = DutyWindowModel::dual_rail();
        assert_eq!(d.od_at(0.0), 300.0);
        assert!((d.od_at(0.15e-3) - 275.0).abs() < 1e-12);
        assert_eq!(d.od_at(1.0), 250.0);
        assert!((d.control_at(0.3e-3) - 9.2 * GAMMA13_RB85).abs() < 1e-6);
    }

    #[test]
    fn compensation_tracks_sqrt_od() {
        let d = DutyWindowModel::compensated(1.0, 300.0, 250.0, 10.2).unwrap();
        assert!((d.control_end - 10.2 * (250.0f64 / 300.0).sqrt()).abs() < 1e-12);
        // a measured 10.2 -> 9.2 ramp is within 1.5% of this rule
        assert!((d.control_end - 9.2).abs() / 9.2 < 0.015);
    }

    #[test]
    fn calibration_halves_at_target() {
        let d = DecayModel::default_rb85();
        assert!((d.efficiency_factor(15e-6) - 0.5).abs() < 1e-12);
        let tb = d.tau_b.unwrap();
        assert!((tb - 38.9e-6).abs() < 0.1e-6, "tau_b = {tb}");
        assert!(DecayModel::calibrated(1e6, 15e-6).is_err());
    }

    #[test]
    fn disabled_decay_is_identity() {
        let d = DecayModel::disabled();
        assert_eq!(d.efficiency_factor(100e-6), 1.0);
    }
}
