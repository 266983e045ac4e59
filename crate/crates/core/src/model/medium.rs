use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Optical dephasing rate of the |1> -> |3> transition used for cold 85Rb
/// on the D1 line: 2 pi x 3 MHz.
pub const GAMMA13_RB85: f64 = 2.0 * PI * 3.0e6;

/// Constants of the atomic ensemble.
///
/// Optical depth uses the intensity convention: with the control field off,
/// resonant intensity transmission through the medium is `exp(-od)`. The
/// photon-atom coupling `g` is derived so that
/// `g^2 N L / (gamma13 c) == od`. Only `g^2 N` enters the dynamics, so the
/// atom number is a free scale (default 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    od: f64,
    gamma13: f64,
    gamma12: f64,
    length: f64,
    atom_number: f64,
    coupling: f64,
}

/// Builds a medium whose coupling closes the optical-depth relation.
pub fn medium_from_od(od: f64, gamma13: f64, gamma12: f64, length: f64, atom_number: f64) -> Result<MediumParams> {
    MediumParams::from_od(od, gamma13, gamma12, length, atom_number)
}

impl MediumParams {
    pub fn from_od(od: f64, gamma13: f64, gamma12: f64, length: f64, atom_number: f64) -> Result<Self> {
        if !(od > 0.0 && od.is_finite()) {
            return Err(Error::param("od", format!("must be positive, got {od}")));
        }
        if !(gamma13 > 0.0 && gamma13.is_finite()) {
            return Err(Error::param("gamma13", format!("must be positive, got {gamma13}")));
        }
        if !(gamma12 >= 0.0 && gamma12.is_finite()) {
            return Err(Error::param("gamma12", format!("must be non-negative, got {gamma12}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::param("length", format!("must be positive, got {length}")));
        }
        if !(atom_number > 0.0 && atom_number.is_finite()) {
            return Err(Error::param(
                "atom_number",
                format!("must be positive, got {atom_number}"),
            ));
        }
        let coupling = (od * gamma13 * SPEED_OF_LIGHT / (atom_number * length)).sqrt();
        Ok(Self {
            od,
            gamma13,
            gamma12,
            length,
            atom_number,
            coupling,
        })
    }

    /// Cold 85Rb memory medium: gamma13 = 2 pi x 3 MHz,
    /// gamma12 = 0.0007 gamma13, L = 3 cm.
    pub fn cold_rb85(od: f64) -> Result<Self> {
        Self::from_od(od, GAMMA13_RB85, 0.0007 * GAMMA13_RB85, 0.03, 1.0)
    }

    pub fn od(&self) -> f64 {
        self.od
    }

    pub fn gamma13(&self) -> f64 {
        self.gamma13
    }

    pub fn gamma12(&self) -> f64 {
        self.gamma12
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn atom_number(&self) -> f64 {
        self.atom_number
    }

    /// Photon-atom coupling `g`, rad/s.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Collective coupling rate `g^2 N L / (2 c)`, rad/s (equal to
    /// `od * gamma13 / 2`). This is the only combination the solver needs.
    pub fn coupling_rate(&self) -> f64 {
        self.coupling * self.coupling * self.atom_number * self.length / (2.0 * SPEED_OF_LIGHT)
    }

    /// Relative residual of the optical-depth relation.
    pub fn od_relation_residual(&self) -> f64 {
        let od = self.coupling * self.coupling * self.atom_number * self.length / (self.gamma13 * SPEED_OF_LIGHT);
        (od - self.od).abs() / self.od
    }

    /// Same medium at a different optical depth.
    pub fn with_od(&self, od: f64) -> Result<Self> {
        Self::from_od(od, self.gamma13, self.gamma12, self.length, self.atom_number)
    }

    /// Same medium with a different ground-state dephasing rate.
    pub fn with_gamma12(&self, gamma12: f64) -> Result<Self> {
        Self::from_od(self.od, self.gamma13, gamma12, self.length, self.atom_number)
    }

    /// Same optical depth with a different atom-number scale; `g` absorbs
    /// the change.
    pub fn with_atom_number(&self, atom_number: f64) -> Result<Self> {
        Self::from_od(self.od, self.gamma13, self.gamma12, self.length, atom_number)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_closes_od_relation() {
        let g13 = GAMMA13_RB85;
        let m = medium_from_od(300.0, g13, 0.0007 * g13, 0.03, 1.0).unwrap();
        let expected = (300.0 * g13 * SPEED_OF_LIGHT / 0.03).sqrt();
        assert!((m.coupling() - expected).abs() / expected < 1e-14);
        assert!(m.od_relation_residual() < 1e-12);

        for n in [1.0, 7.5e6, 3.0e9] {
            let m = m.with_atom_number(n).unwrap();
            let expected = (300.0 * g13 * SPEED_OF_LIGHT / (n * 0.03)).sqrt();
            assert!((m.coupling() - expected).abs() / expected < 1e-14);
            assert!(m.od_relation_residual() < 1e-12);
        }
    }

    #[test]
    fn doubling_atoms_halves_coupling_squared() {
        let m = MediumParams::cold_rb85(300.0).unwrap();
        let m2 = m.with_atom_number(2.0).unwrap();
        let ratio = m2.coupling().powi(2) / m.coupling().powi(2);
        assert!((ratio - 0.5).abs() < 1e-14);
        assert_eq!(m2.od(), m.od());
        assert!((m2.coupling_rate() - m.coupling_rate()).abs() / m.coupling_rate() < 1e-14);
    }

    #[test]
    fn coupling_rate_is_half_od_gamma() {
        let m = MediumParams::cold_rb85(500.0).unwrap();
        let expected = 500.0 * GAMMA13_RB85 / 2.0;
        assert!((m.coupling_rate() - expected).abs() / expected < 1e-13);
    }

    #[test]
    fn rejects_degenerate_media() {
        assert!(medium_from_od(0.0, GAMMA13_RB85, 0.0, 0.03, 1.0).is_err());
        assert!(medium_from_od(-1.0, GAMMA13_RB85, 0.0, 0.03, 1.0).is_err());
        assert!(medium_from_od(100.0, 0.0, 0.0, 0.03, 1.0).is_err());
        assert!(medium_from_od(100.0, GAMMA13_RB85, -1.0, 0.03, 1.0).is_err());
        assert!(medium_from_od(100.0, GAMMA13_RB85, 0.0, 0.0, 1.0).is_err());
        assert!(medium_from_od(f64::NAN, GAMMA13_RB85, 0.0, 0.03, 1.0).is_err());
    }
}
