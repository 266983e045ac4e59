use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RampShape {
    Linear,
    #[default]
    RaisedCosine,
}

impl RampShape {
    /// Interpolation weight for a fraction `x` in [0, 1] of the segment.
    fn weight(self, x: f64) -> f64 {
        match self {
            RampShape::Linear => x,
            RampShape::RaisedCosine => 0.5 * (1.0 - (PI * x).cos()),
        }
    }
}

/// One piece of a control Rabi-frequency profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSegment {
    pub t_start: f64,
    pub t_end: f64,
    pub omega_start: f64,
    pub omega_end: f64,
    pub shape: RampShape,
}

impl ControlSegment {
    pub fn hold(t_start: f64, t_end: f64, omega: f64) -> Self {
        Self {
            t_start,
            t_end,
            omega_start: omega,
            omega_end: omega,
            shape: RampShape::Linear,
        }
    }

    pub fn ramp(t_start: f64, t_end: f64, from: f64, to: f64, shape: RampShape) -> Self {
        Self {
            t_start,
            t_end,
            omega_start: from,
            omega_end: to,
            shape,
        }
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    fn value(&self, t: f64) -> f64 {
        let x = ((t - self.t_start) / self.duration()).clamp(0.0, 1.0);
        self.omega_start + (self.omega_end - self.omega_start) * self.shape.weight(x)
    }
}

/// Piecewise control Rabi frequency `Omega_c(t)`, rad/s.
///
/// Segments are contiguous and ordered. Before the first segment the
/// schedule holds its first value; after the last it holds its last value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    segments: Vec<ControlSegment>,
}

/// Switching parameters for a write / hold / read sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WriteRead {
    /// Control level while the photon is written, rad/s.
    pub omega_write: f64,
    /// Control level after the read ramp, rad/s.
    pub omega_read: f64,
    /// Midpoint of the falling (switch-off) ramp, s.
    pub switch_off: f64,
    /// Fully-off interval between the end of the fall and the start of the
    /// rise, s. Zero means the ramps abut.
    pub hold: f64,
    /// Duration of each switching ramp, s.
    pub ramp: f64,
    pub shape: RampShape,
}

/// Location of the single switched-off interval of a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffWindow {
    /// Start of the falling ramp.
    pub fall_start: f64,
    /// Control reaches zero.
    pub off_start: f64,
    /// Control starts rising again.
    pub read_on: f64,
    /// End of the rising ramp.
    pub rise_end: f64,
}

impl OffWindow {
    pub fn hold(&self) -> f64 {
        self.read_on - self.off_start
    }
}

const OFF_LEVEL: f64 = 0.0;

impl ControlSchedule {
    pub fn new(segments: Vec<ControlSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Schedule("needs at least one segment".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.t_end > s.t_start) {
                return Err(Error::Schedule(format!(
                    "segment {i} has non-positive duration [{}, {}]",
                    s.t_start, s.t_end
                )));
            }
            if !(s.omega_start >= 0.0 && s.omega_end >= 0.0) || !(s.omega_start.is_finite() && s.omega_end.is_finite())
            {
                return Err(Error::Schedule(format!(
                    "segment {i} has a negative or non-finite Rabi frequency"
                )));
            }
        }
        for (i, w) in segments.windows(2).enumerate() {
            let scale = w[0].duration().max(w[1].duration());
            if (w[1].t_start - w[0].t_end).abs() > 1e-9 * scale {
                return Err(Error::Schedule(format!(
                    "segments {i} and {} are not contiguous ({} vs {})",
                    i + 1,
                    w[0].t_end,
                    w[1].t_start
                )));
            }
        }
        Ok(Self { segments })
    }

    pub fn constant(omega: f64, t_start: f64, t_end: f64) -> Result<Self> {
        Self::new(vec![ControlSegment::hold(t_start, t_end, omega)])
    }

    /// Linear ramp from `from` to `to` over `[t_start, t_end]`.
    pub fn linear(from: f64, to: f64, t_start: f64, t_end: f64) -> Result<Self> {
        Self::new(vec![ControlSegment::ramp(t_start, t_end, from, to, RampShape::Linear)])
    }

    /// Write level, falling ramp, optional fully-off hold, rising ramp,
    /// read level, spanning `[t_start, t_end]`.
    pub fn write_read(p: WriteRead, t_start: f64, t_end: f64) -> Result<Self> {
        if !(p.ramp > 0.0) {
            return Err(Error::Schedule(format!(
                "ramp duration must be positive, got {}",
                p.ramp
            )));
        }
        if !(p.hold >= 0.0) {
            return Err(Error::Schedule(format!(
                "off-window shorter than the switching ramps (hold {} s)",
                p.hold
            )));
        }
        let fall_start = p.switch_off - 0.5 * p.ramp;
        let off_start = fall_start + p.ramp;
        let read_on = off_start + p.hold;
        let rise_end = read_on + p.ramp;
        if fall_start <= t_start || rise_end >= t_end {
            return Err(Error::Schedule(format!(
                "switching [{fall_start}, {rise_end}] does not fit inside [{t_start}, {t_end}]"
            )));
        }
        let mut segs = vec![
            ControlSegment::hold(t_start, fall_start, p.omega_write),
            ControlSegment::ramp(fall_start, off_start, p.omega_write, OFF_LEVEL, p.shape),
        ];
        if p.hold > 0.0 {
            segs.push(ControlSegment::hold(off_start, read_on, OFF_LEVEL));
        }
        segs.push(ControlSegment::ramp(
            read_on,
            rise_end,
            OFF_LEVEL,
            p.omega_read,
            p.shape,
        ));
        segs.push(ControlSegment::hold(rise_end, t_end, p.omega_read));
        Self::new(segs)
    }

    pub fn segments(&self) -> &[ControlSegment] {
        &self.segments
    }

    pub fn start(&self) -> f64 {
        self.segments[0].t_start
    }

    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].t_end
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        if t <= self.start() {
            return self.segments[0].omega_start;
        }
        if t >= self.end() {
            return self.segments[self.segments.len() - 1].omega_end;
        }
        let idx = self.segments.partition_point(|s| s.t_end < t);
        self.segments[idx.min(self.segments.len() - 1)].value(t)
    }

    pub fn max_omega(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.omega_start.max(s.omega_end))
            .fold(0.0, f64::max)
    }

    /// Finds the switched-off interval: a ramp falling to zero, optional
    /// zero segments, then a ramp rising from zero. Returns `Ok(None)` for a
    /// schedule that never reaches zero.
    pub fn off_window(&self) -> Result<Option<OffWindow>> {
        let segs = &self.segments;
        let mut found: Option<OffWindow> = None;
        let mut i = 0;
        while i < segs.len() {
            let s = segs[i];
            if s.omega_start > OFF_LEVEL && s.omega_end == OFF_LEVEL {
                let mut j = i + 1;
                while j < segs.len() && segs[j].omega_start == OFF_LEVEL && segs[j].omega_end == OFF_LEVEL {
                    j += 1;
                }
                if j == segs.len() {
                    return Err(Error::Schedule(
                        "control switches off but never switches back on".into(),
                    ));
                }
                let rise = segs[j];
                if found.is_some() {
                    return Err(Error::Schedule("schedule contains more than one off-window".into()));
                }
                found = Some(OffWindow {
                    fall_start: s.t_start,
                    off_start: s.t_end,
                    read_on: rise.t_start,
                    rise_end: rise.t_end,
                });
                i = j + 1;
                continue;
            }
            if s.omega_start == OFF_LEVEL && i == 0 {
                return Err(Error::Schedule(
                    "schedule starts switched off; nothing can be written".into(),
                ));
            }
            i += 1;
        }
        Ok(found)
    }
}
