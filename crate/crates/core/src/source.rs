//! Heralded single photons from a pumped source medium.
//!
//! The anti-Stokes photon heralded at `tau = 0` carries the envelope
//! `psi(tau) ~ f_p(L1/2 - Vg tau)`: the pump profile along the source,
//! read backwards at the slow-light group velocity. The carrier
//! `exp(-i w_as tau)` is never sampled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexWaveform, PolarizationState, QubitPhoton, TimeGrid, C64};

/// Fraction of the pump-mapped energy a grid must hold.
pub const MIN_CAPTURED: f64 = 0.999;

/// Pump intensity profile along the source, positions in m from the
/// source entrance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PumpProfile {
    /// `exp(-2 (x - center)^2 / waist^2)`; `waist` is the 1/e^2 radius.
    Gaussian { center: f64, waist: f64 },
    /// Uniform over `[center - width/2, center + width/2]`.
    Square { center: f64, width: f64 },
}

impl PumpProfile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            PumpProfile::Gaussian { center, waist } => (-2.0 * ((x - center) / waist).powi(2)).exp(),
            PumpProfile::Square { center, width } => {
                if (x - center).abs() <= 0.5 * width {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    pub pump: PumpProfile,
    /// L1, m.
    pub source_length: f64,
    /// Anti-Stokes group velocity in the source, m/s.
    pub group_velocity: f64,
    /// Anti-Stokes carrier, rad/s. Kept for bookkeeping only.
    pub carrier: f64,
}

impl SourceParams {
    /// 1.7 cm source, Vg = 2e4 m/s, Gaussian pump centered in the source.
    pub fn with_gaussian_pump(waist: f64) -> Result<Self> {
        let s = Self {
            pump: PumpProfile::Gaussian { center: 0.0085, waist },
            source_length: 0.017,
            group_velocity: 2.0e4,
            carrier: 0.0,
        };
        s.validate()?;
        Ok(s)
    }

    /// Pump waist that makes the photon's intensity FWHM equal `fwhm`.
    pub fn waist_for_fwhm(fwhm: f64, group_velocity: f64) -> f64 {
        fwhm * group_velocity / std::f64::consts::LN_2.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.group_velocity > 0.0) {
            return Err(Error::param("group_velocity", "must be positive"));
        }
        if !(self.source_length > 0.0) {
            return Err(Error::param("source_length", "must be positive"));
        }
        match self.pump {
            PumpProfile::Gaussian { waist, .. } if !(waist > 0.0) => Err(Error::param("waist", "must be positive")),
            PumpProfile::Square { width, .. } if !(width > 0.0) => Err(Error::param("width", "must be positive")),
            _ => Ok(()),
        }
    }

    /// Emission window `[tau_min, tau_max]`: the times at which the mapped
    /// position lies inside the source.
    pub fn emission_window(&self) -> (f64, f64) {
        let half = 0.5 * self.source_length / self.group_velocity;
        (-half, half)
    }

    /// Unnormalized envelope: the pump at the mapped position, zero
    /// outside the source.
    pub fn envelope(&self, tau: f64) -> f64 {
        let x = 0.5 * self.source_length - self.group_velocity * tau;
        if (0.0..=self.source_length).contains(&x) {
            self.pump.value(x)
        } else {
            0.0
        }
    }

    /// Envelope peak time, `(L1/2 - center) / Vg`.
    pub fn peak_time(&self) -> f64 {
        let center = match self.pump {
            PumpProfile::Gaussian { center, .. } | PumpProfile::Square { center, .. } => center,
        };
        (0.5 * self.source_length - center) / self.group_velocity
    }

    /// `integral f_p(L1/2 - Vg tau)^2 dtau` over the emission window by
    /// fine Simpson quadrature.
    fn mapped_energy(&self) -> f64 {
        let (a, b) = self.emission_window();
        let n = 20_000;
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * self.envelope(a + h * i as f64).powi(2);
        }
        acc * h / 3.0
    }
}

/// Unit-norm heralded photon envelope sampled on `grid`.
pub fn heralded_waveform(src: &SourceParams, grid: TimeGrid) -> Result<ComplexWaveform> {
    src.validate()?;
    let raw = ComplexWaveform::from_fn(grid, |t| C64::new(src.envelope(t), 0.0))?;
    let total = src.mapped_energy();
    if !(total > 0.0) {
        return Err(Error::param("pump", "pump profile does not overlap the source"));
    }
    let captured = raw.norm() / total;
    if captured < MIN_CAPTURED {
        let (a, b) = src.emission_window();
        return Err(Error::param(
            "grid",
            format!(
                "captures {:.4}% of the photon; emission spans [{a:.3e}, {b:.3e}] s",
                100.0 * captured
            ),
        ));
    }
    raw.normalized()
}

/// Product state `psi (x) |S>` for polarization angles `(theta, phi)`.
pub fn make_qubit_photon(waveform: ComplexWaveform, theta: f64, phi: f64) -> Result<QubitPhoton> {
    Ok(QubitPhoton {
        waveform,
        polarization: PolarizationState::new(theta, phi)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn grid() -> TimeGrid {
        TimeGrid::spanning(-600e-9, 600e-9, 0.25e-9).unwrap()
    }

    #[test]
    fn gaussian_pump_maps_to_gaussian_envelope() {
        let w = 3.0e-3;
        let src = SourceParams::with_gaussian_pump(w).unwrap();
        let psi = heralded_waveform(&src, grid()).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-9);
        // 1/e^2 half-width of the envelope is w / Vg
        let half = w / src.group_velocity;
        let ratio = psi.sample_at(half).re / psi.sample_at(0.0).re;
        assert!((ratio - (-2.0f64).exp()).abs() < 1e-9, "{ratio}");
        let fwhm = SourceParams::waist_for_fwhm(150e-9, 2e4);
        let src = SourceParams::with_gaussian_pump(fwhm).unwrap();
        let psi = heralded_waveform(&src, grid()).unwrap();
        let g = ComplexWaveform::gaussian(grid(), 0.0, 150e-9).unwrap();
        assert!((psi.overlap(&g).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn peak_follows_pump_center() {
        let mut src = SourceParams::with_gaussian_pump(2e-3).unwrap();
        src.pump = PumpProfile::Gaussian {
            center: 0.0085 - 2e-3,
            waist: 2e-3,
        };
        let psi = heralded_waveform(&src, grid()).unwrap();
        let expect = 2e-3 / src.group_velocity;
        assert!((src.peak_time() - expect).abs() < 1e-15);
        assert!((psi.peak_time() - expect).abs() < 0.05e-9);
    }

    #[test]
    fn translation_covariance() {
        let src = SourceParams::with_gaussian_pump(2e-3).unwrap();
        let mut moved = src;
        moved.pump = PumpProfile::Gaussian {
            center: 0.0085 + 1e-3,
            waist: 2e-3,
        };
        let dt = -1e-3 / src.group_velocity;
        for k in -20..=20 {
            let t = k as f64 * 10e-9;
            assert!((moved.envelope(t + dt) - src.envelope(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn short_grid_is_rejected() {
        let src = SourceParams::with_gaussian_pump(3e-3).unwrap();
        let g = TimeGrid::spanning(-100e-9, 100e-9, 1e-9).unwrap();
        assert!(heralded_waveform(&src, g).is_err());
    }

    #[test]
    fn full_cell_square_pump_spans_the_emission_window() {
        let mut src = SourceParams::with_gaussian_pump(1e-3).unwrap();
        src.pump = PumpProfile::Square {
            center: 0.0085,
            width: 0.017,
        };
        let (a, b) = src.emission_window();
        assert!((b - a - 850e-9).abs() < 1e-15);
        let g = TimeGrid::spanning(-500e-9, 500e-9, 0.5e-9).unwrap();
        let psi = heralded_waveform(&src, g).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qubit_photon_states() {
        let psi = heralded_waveform(&SourceParams::with_gaussian_pump(3e-3).unwrap(), grid()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = make_qubit_photon(psi.clone(), 0.0, 0.0).unwrap();
        assert_eq!(h.polarization.amplitudes()[1].norm(), 0.0);
        let l = make_qubit_photon(psi.clone(), FRAC_PI_2, FRAC_PI_2).unwrap();
        let [a, b] = l.polarization.amplitudes();
        assert!((a - C64::new(s, 0.0)).norm() < 1e-15 && (b - C64::new(0.0, s)).norm() < 1e-15);
        let d = make_qubit_photon(psi.clone(), FRAC_PI_2, 0.0).unwrap();
        let [a, b] = d.polarization.amplitudes();
        assert!((a - C64::new(s, 0.0)).norm() < 1e-15 && (b - C64::new(s, 0.0)).norm() < 1e-15);
        assert!(make_qubit_photon(psi, PI + 0.1, 0.0).is_err());
    }
}
