//! Closed-form steady-state EIT response of the three-level medium.
//!
//! Setting the time derivatives of the Bloch pair to zero for a probe
//! component `exp(-i delta t)` gives a field transfer function
//! `H(delta) = exp(i (OD/2) chi(delta))` with the normalized susceptibility
//!
//! ```text
//! chi(delta) = i gamma13 (gamma12 - i delta)
//!              / ((gamma13 - i delta)(gamma12 - i delta) + Omega_c^2 / 4)
//! ```
//!
//! `Im chi` is the absorption (1 on resonance with the control off) and
//! `Re chi` the dispersion. Intensity transmission is
//! `T = exp(-OD Im chi)` and the medium delay is `(OD/2) d(Re chi)/d(delta)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MediumParams, C64, SPEED_OF_LIGHT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionSpectrum {
    /// Probe detunings, rad/s.
    pub detunings: Vec<f64>,
    /// Intensity transmission at each detuning.
    pub transmission: Vec<f64>,
}

fn numerator(m: &MediumParams, delta: f64) -> C64 {
    C64::new(0.0, m.gamma13()) * C64::new(m.gamma12(), -delta)
}

fn denominator(m: &MediumParams, omega_c: f64, delta: f64) -> C64 {
    C64::new(m.gamma13(), -delta) * C64::new(m.gamma12(), -delta) + C64::new(0.25 * omega_c * omega_c, 0.0)
}

/// Normalized linear response `chi(delta)` for a resonant control of Rabi
/// frequency `omega_c`.
pub fn susceptibility(m: &MediumParams, omega_c: f64, delta: f64) -> C64 {
    if omega_c == 0.0 {
        // two-level limit; avoids 0/0 at gamma12 = delta = 0
        return C64::new(0.0, m.gamma13()) / C64::new(m.gamma13(), -delta);
    }
    numerator(m, delta) / denominator(m, omega_c, delta)
}

/// `d chi / d delta`, analytic.
pub fn susceptibility_slope(m: &MediumParams, omega_c: f64, delta: f64) -> C64 {
    let g13 = m.gamma13();
    if omega_c == 0.0 {
        let d = C64::new(g13, -delta);
        return C64::new(0.0, g13) * C64::new(0.0, 1.0) / (d * d);
    }
    let num = numerator(m, delta);
    let den = denominator(m, omega_c, delta);
    let dnum = C64::new(g13, 0.0);
    let dden = C64::new(0.0, -1.0) * C64::new(m.gamma12() + g13, -2.0 * delta);
    (dnum * den - num * dden) / (den * den)
}

/// Intensity transmission `exp(-OD Im chi)` at one detuning.
pub fn transmission(m: &MediumParams, omega_c: f64, delta: f64) -> f64 {
    (-m.od() * susceptibility(m, omega_c, delta).im).exp()
}

/// Complex field transfer function `exp(i (OD/2) chi)`.
pub fn field_transfer(m: &MediumParams, omega_c: f64, delta: f64) -> C64 {
    (C64::new(0.0, 0.5 * m.od()) * susceptibility(m, omega_c, delta)).exp()
}

pub fn transmission_spectrum(m: &MediumParams, omega_c: f64, detunings: &[f64]) -> TransmissionSpectrum {
    TransmissionSpectrum {
        detunings: detunings.to_vec(),
        transmission: detunings.iter().map(|&d| transmission(m, omega_c, d)).collect(),
    }
}

/// Evenly spaced detunings over `[-span, span]`.
pub fn detuning_range(span: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![0.0];
    }
    (0..points)
        .map(|i| -span + 2.0 * span * i as f64 / (points - 1) as f64)
        .collect()
}

/// Excess transit delay through the medium for a resonant probe, s.
pub fn group_delay(m: &MediumParams, omega_c: f64) -> Result<f64> {
    if !(omega_c > 0.0) {
        return Err(Error::param(
            "omega_c",
            "group delay needs a control field (omega_c > 0)",
        ));
    }
    Ok(0.5 * m.od() * susceptibility_slope(m, omega_c, 0.0).re)
}

/// `L / (delay + L/c)`, m/s.
pub fn group_velocity(m: &MediumParams, omega_c: f64) -> Result<f64> {
    let delay = group_delay(m, omega_c)?;
    Ok(m.length() / (delay + m.length() / SPEED_OF_LIGHT))
}

/// Full width of the transparency window, rad/s.
///
/// The edge is where `T` falls to the midpoint between line-center
/// transmission and the control-off background `exp(-OD)`; it is located
/// by bisection between line center and the Autler-Townes absorption peak.
pub fn transparency_fwhm(m: &MediumParams, omega_c: f64) -> Result<f64> {
    if !(omega_c > 0.0) {
        return Err(Error::param("omega_c", "no transparency window without control"));
    }
    let t0 = transmission(m, omega_c, 0.0);
    let level = 0.5 * (t0 + (-m.od()).exp());
    let f = |d: f64| transmission(m, omega_c, d) - level;

    // march outward to bracket the first crossing
    let mut hi = 1e-3 * m.gamma13().min(0.5 * omega_c);
    let limit = 0.5 * omega_c + 10.0 * m.gamma13();
    while f(hi) > 0.0 {
        hi *= 1.5;
        if hi > limit {
            return Err(Error::UndefinedEstimate("transparency window edge not found".into()));
        }
    }
    let mut lo = hi / 1.5;
    if f(lo) < 0.0 {
        lo = 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(lo + hi)
}
