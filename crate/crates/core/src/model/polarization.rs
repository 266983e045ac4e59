use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::{ComplexWaveform, C64};
use crate::error::{Error, Result};

/// Polarization qubit `cos(theta/2)|H> + e^{i phi} sin(theta/2)|V>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationState {
    theta: f64,
    phi: f64,
}

impl PolarizationState {
    /// `theta` must lie in [0, pi]; `phi` is wrapped into [0, 2 pi).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::param("theta/phi", "must be finite"));
        }
        if !(-1e-12..=PI + 1e-12).contains(&theta) {
            return Err(Error::param("theta", format!("must lie in [0, pi], got {theta}")));
        }
        let theta = theta.clamp(0.0, PI);
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn h() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn v() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    /// (|H> + |V>)/sqrt 2
    pub fn d() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }

    /// (|H> - |V>)/sqrt 2
    pub fn a() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: PI,
        }
    }

    /// (|H> + i|V>)/sqrt 2
    pub fn l() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: FRAC_PI_2,
        }
    }

    /// (|H> - i|V>)/sqrt 2
    pub fn r() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 1.5 * PI,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Amplitudes on (|H>, |V>).
    pub fn amplitudes(&self) -> [C64; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        [C64::new(c, 0.0), C64::from_polar(s, self.phi)]
    }

    /// Recovers the Bloch angles from any nonzero amplitude pair, ignoring
    /// normalization and global phase.
    pub fn from_amplitudes(h: C64, v: C64) -> Result<Self> {
        let (nh, nv) = (h.norm(), v.norm());
        if !(nh > 0.0 || nv > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let theta = 2.0 * nv.atan2(nh);
        let phi = if nh == 0.0 || nv == 0.0 { 0.0 } else { v.arg() - h.arg() };
        Self::new(theta, phi)
    }
}

/// Heralded photon carrying a polarization qubit: `psi_in(tau) (x) |S>`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitPhoton {
    pub waveform: ComplexWaveform,
    pub polarization: PolarizationState,
}
