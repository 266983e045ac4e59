//! Dual-rail storage of polarization qubits.
//!
//! A beam displacer sends |H> and |V> into two spatially separate channels
//! of the cold-atom cloud. Each rail is an independent single-channel
//! memory; the qubit is reassembled from the two retrieved amplitudes.

mod density;

pub use density::{fidelity, tomography, BasisCounts, DensityMatrix2, DensityMatrixRepr};

use rayon::join;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexWaveform, ControlSchedule, MediumParams, PolarizationState, QubitPhoton, C64};
use crate::protocol::{score, store_with_hold_factor, DecayModel, StorageResult};
use crate::solver::SolverConfig;

/// One rail: its atoms and the control sequence that drives them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub medium: MediumParams,
    pub control: ControlSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPair {
    pub ch_h: Channel,
    pub ch_v: Channel,
    /// Interferometric phase of the V rail relative to H, rad.
    pub relative_phase: f64,
}

impl ChannelPair {
    /// Two identical rails.
    pub fn balanced(medium: MediumParams, control: ControlSchedule) -> Self {
        let ch = Channel { medium, control };
        Self {
            ch_h: ch.clone(),
            ch_v: ch,
            relative_phase: 0.0,
        }
    }
}

/// Unpolarized readout noise admixed to the retrieved qubit with weight
/// `noise_prob / (noise_prob + signal_prob)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutNoise {
    /// Probability of retrieving a noise photon per trial.
    pub noise_prob: f64,
    /// Probability of retrieving the signal photon per trial. `None` uses
    /// the simulated qubit efficiency.
    pub signal_prob: Option<f64>,
}

impl ReadoutNoise {
    pub fn weight(&self, eta_qubit: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&self.noise_prob) {
            return Err(Error::param(
                "noise_prob",
                format!("must lie in [0, 1), got {}", self.noise_prob),
            ));
        }
        let ps = self.signal_prob.unwrap_or(eta_qubit);
        if !(0.0..=1.0).contains(&ps) {
            return Err(Error::param("signal_prob", format!("must lie in [0, 1], got {ps}")));
        }
        if self.noise_prob == 0.0 {
            return Ok(0.0);
        }
        Ok(self.noise_prob / (self.noise_prob + ps))
    }
}

/// Per-rail storage of the same temporal mode; enough to produce the
/// output for any input polarization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualRailResponse {
    pub h: StorageResult,
    pub v: StorageResult,
    /// `<psi_v|psi_h>` of the retrieved envelopes, each normalized.
    pub mode_overlap: C64,
    pub relative_phase: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QubitStorage {
    pub state: PolarizationState,
    pub rho_in: DensityMatrix2,
    pub rho_out: DensityMatrix2,
    pub eta_qubit: f64,
    pub fidelity: f64,
    /// Weight of the white-noise admixture.
    pub noise_weight: f64,
}

/// Signal part of the retrieved polarization state.
///
/// The unnormalized output spinor is
/// `(alpha sqrt(eta_h) psi_h, beta e^{i dphi} sqrt(eta_v) psi_v)`; tracing
/// out time leaves the coherence weighted by `<psi_v|psi_h>`. Returns the
/// normalized density matrix and `|alpha|^2 eta_h + |beta|^2 eta_v`.
pub fn combine_rails(
    alpha: C64,
    beta: C64,
    eta_h: f64,
    eta_v: f64,
    mode_overlap: C64,
    relative_phase: f64,
) -> Result<(DensityMatrix2, f64)> {
    if !(eta_h >= 0.0 && eta_v >= 0.0) {
        return Err(Error::param("eta", "rail efficiencies must be non-negative"));
    }
    if mode_overlap.norm() > 1.0 + 1e-9 {
        return Err(Error::param("mode_overlap", "must have modulus <= 1"));
    }
    let n = alpha.norm_sqr() + beta.norm_sqr();
    if !(n > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let (a, b) = (alpha / n.sqrt(), beta / n.sqrt());
    let hh = a.norm_sqr() * eta_h;
    let vv = b.norm_sqr() * eta_v;
    let eta = hh + vv;
    if !(eta > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let hv = a * b.conj() * C64::from_polar((eta_h * eta_v).sqrt(), -relative_phase) * mode_overlap;
    let mut rho = DensityMatrix2::new([
        [C64::new(hh / eta, 0.0), hv / eta],
        [(hv / eta).conj(), C64::new(vv / eta, 0.0)],
    ])?;
    // the overlap bound keeps this physical; clear rounding at the edge
    if rho.eigenvalues()[0] < 0.0 {
        let [x, y, z] = rho.bloch();
        let len = (x * x + y * y + z * z).sqrt();
        rho = DensityMatrix2::from_bloch([x / len, y / len, z / len])?;
    }
    Ok((rho, eta))
}

fn run_rail(
    ch: &Channel,
    input: &ComplexWaveform,
    decay: Option<&DecayModel>,
    cfg: &SolverConfig,
    window: f64,
) -> Result<StorageResult> {
    let hold = ch
        .control
        .off_window()?
        .ok_or_else(|| Error::Schedule("rail control never switches off".into()))?
        .hold();
    let factor = decay.map_or(1.0, |d| d.inhomogeneous_factor(hold));
    let run = store_with_hold_factor((&ch.medium).into(), &ch.control, input, cfg, C64::new(factor, 0.0))?;
    score(run, input, window)
}

/// Stores the temporal mode `input` in both rails (concurrently).
///
/// The storage time of each rail is the off-window of its control
/// schedule. Each medium's own `gamma12` acts during the whole run; `decay`
/// adds its Gaussian factor for that storage time.
pub fn characterize(
    pair: &ChannelPair,
    input: &ComplexWaveform,
    decay: Option<&DecayModel>,
    cfg: &SolverConfig,
    window: f64,
) -> Result<DualRailResponse> {
    let (h, v) = join(
        || run_rail(&pair.ch_h, input, decay, cfg, window),
        || run_rail(&pair.ch_v, input, decay, cfg, window),
    );
    let (h, v) = (h?, v?);
    let (nh, nv) = (h.retrieved.norm(), v.retrieved.norm());
    let mode_overlap = if nh > 0.0 && nv > 0.0 {
        v.retrieved.overlap(&h.retrieved) / (nh * nv).sqrt()
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(DualRailResponse {
        h,
        v,
        mode_overlap,
        relative_phase: pair.relative_phase,
    })
}

impl DualRailResponse {
    /// Retrieved qubit for input polarization `state`.
    pub fn qubit(&self, state: &PolarizationState, noise: Option<&ReadoutNoise>) -> Result<QubitStorage> {
        let [a, b] = state.amplitudes();
        let (sig, eta_qubit) = combine_rails(
            a,
            b,
            self.h.efficiency,
            self.v.efficiency,
            self.mode_overlap,
            self.relative_phase,
        )?;
        let w = noise.map_or(Ok(0.0), |n| n.weight(eta_qubit))?;
        let rho_out = sig.depolarized(w)?;
        let rho_in = DensityMatrix2::pure(state);
        Ok(QubitStorage {
            state: *state,
            fidelity: fidelity(&rho_in, &rho_out)?,
            rho_in,
            rho_out,
            eta_qubit,
            noise_weight: w,
        })
    }
}

/// Stores one qubit photon: both rails, then recombination.
pub fn store_qubit(
    pair: &ChannelPair,
    photon: &QubitPhoton,
    decay: Option<&DecayModel>,
    noise: Option<&ReadoutNoise>,
    cfg: &SolverConfig,
    window: f64,
) -> Result<(QubitStorage, DualRailResponse)> {
    let resp = characterize(pair, &photon.waveform, decay, cfg, window)?;
    Ok((resp.qubit(&photon.polarization, noise)?, resp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn rail_extinction_leaves_h() {
        let [a, b] = PolarizationState::d().amplitudes();
        let (rho, eta) = combine_rails(a, b, 0.8, 0.0, one(), 0.0).unwrap();
        assert!((rho.get(0, 0).re - 1.0).abs() < 1e-15);
        assert_eq!(rho.get(0, 1).norm(), 0.0);
        assert!((eta - 0.4).abs() < 1e-15);
    }

    #[test]
    fn distinguishable_modes_kill_coherence() {
        let [a, b] = PolarizationState::d().amplitudes();
        let (rho, _) = combine_rails(a, b, 0.8, 0.8, C64::new(0.0, 0.0), 0.0).unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn relative_phase_rotates_about_z() {
        let [a, b] = PolarizationState::d().amplitudes();
        let (rho, _) = combine_rails(a, b, 0.5, 0.5, one(), FRAC_PI_2).unwrap();
        let l = DensityMatrix2::pure(&PolarizationState::l());
        assert!((fidelity(&rho, &l).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_weight() {
        let n = ReadoutNoise {
            noise_prob: 0.0015,
            signal_prob: Some(0.0331),
        };
        let w = n.weight(0.86).unwrap();
        assert!((w - 0.0015 / 0.0346).abs() < 1e-15);
        let rho = DensityMatrix2::pure(&PolarizationState::l()).depolarized(w).unwrap();
        let f = fidelity(&DensityMatrix2::pure(&PolarizationState::l()), &rho).unwrap();
        assert!((f - (1.0 - 0.5 * w)).abs() < 1e-12);
        assert!(ReadoutNoise {
            noise_prob: 1.0,
            signal_prob: None
        }
        .weight(0.5)
        .is_err());
    }

    proptest! {
        #[test]
        fn balanced_rails_preserve_any_qubit(theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU, eta in 0.01f64..1.0) {
            let s = PolarizationState::new(theta, phi).unwrap();
            let [a, b] = s.amplitudes();
            let (rho, e) = combine_rails(a, b, eta, eta, one(), 0.0).unwrap();
            prop_assert!((fidelity(&DensityMatrix2::pure(&s), &rho).unwrap() - 1.0).abs() < 1e-9);
            prop_assert!((e - eta).abs() < 1e-12);
        }

        #[test]
        fn global_phase_invariance(theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU, chi in -std::f64::consts::PI..std::f64::consts::PI) {
            let [a, b] = PolarizationState::new(theta, phi).unwrap().amplitudes();
            let g = C64::from_polar(1.0, chi);
            let ov = C64::from_polar(0.93, 0.4);
            let (r1, _) = combine_rails(a, b, 0.7, 0.6, ov, 0.3).unwrap();
            let (r2, _) = combine_rails(a * g, b * g, 0.7, 0.6, ov, 0.3).unwrap();
            for i in 0..2 { for j in 0..2 {
                prop_assert!((r1.get(i, j) - r2.get(i, j)).norm() < 1e-12);
            }}
        }

        #[test]
        fn imbalance_costs_second_order(eps in -0.3f64..0.3) {
            let [a, b] = PolarizationState::d().amplitudes();
            let eta_v = 0.6;
            let (rho, _) = combine_rails(a, b, eta_v * (1.0 + eps), eta_v, one(), 0.0).unwrap();
            let f = fidelity(&DensityMatrix2::pure(&PolarizationState::d()), &rho).unwrap();
            prop_assert!(f >= 1.0 - eps * eps / 4.0 - 1e-6);
        }
    }
}
