//! Dual-rail polarization-qubit storage: both rails are simulated, then
//! recombined for each input state, with and without readout noise.

use eitmem::model::{MediumParams, PolarizationState, TimeGrid, GAMMA13_RB85};
use eitmem::protocol::{storage_schedule, DecayModel, StorageOptions, ONE_PULSE_DELAY};
use eitmem::qubit::{characterize, Channel, ChannelPair, ReadoutNoise};
use eitmem::solver::SolverConfig;
use eitmem::source::{heralded_waveform, SourceParams};

fn main() -> eitmem::Result<()> {
    let dt = 0.25e-9;
    let cfg = SolverConfig::new(TimeGrid::new(0.0, dt, 2)?, 128);
    let src = SourceParams::with_gaussian_pump(SourceParams::waist_for_fwhm(150e-9, 2e4))?;
    let photon = heralded_waveform(&src, TimeGrid::spanning(-550e-9, 550e-9, dt)?)?;
    let opts = StorageOptions::default();
    let omega = 10.2 * GAMMA13_RB85;

    for (label, od_v, phase) in [
        ("balanced", 300.0, 0.0),
        ("V rail at OD 330, 0.1 rad phase", 330.0, 0.1),
    ] {
        let mh = MediumParams::cold_rb85(300.0)?;
        let mv = mh.with_od(od_v)?;
        let (ch, run_cfg) = storage_schedule(&mh, omega, omega, ONE_PULSE_DELAY, &photon, &opts, &cfg)?;
        let (cv, _) = storage_schedule(&mv, omega, omega, ONE_PULSE_DELAY, &photon, &opts, &cfg)?;
        let pair = ChannelPair {
            ch_h: Channel {
                medium: mh,
                control: ch,
            },
            ch_v: Channel {
                medium: mv,
                control: cv,
            },
            relative_phase: phase,
        };
        let resp = characterize(&pair, &photon, Some(&DecayModel::default_rb85()), &run_cfg, opts.window)?;
        println!(
            "{label}: eta_h {:.4}  eta_v {:.4}  |<v|h>| {:.4}",
            resp.h.efficiency,
            resp.v.efficiency,
            resp.mode_overlap.norm()
        );
        let noise = ReadoutNoise {
            noise_prob: 0.0015,
            signal_prob: Some(0.0331),
        };
        for (name, s) in [
            ("H", PolarizationState::h()),
            ("V", PolarizationState::v()),
            ("D", PolarizationState::d()),
            ("L", PolarizationState::l()),
        ] {
            let clean = resp.qubit(&s, None)?;
            let noisy = resp.qubit(&s, Some(&noise))?;
            println!(
                "  |{name}>  eta {:.4}  F {:.5}  F with noise {:.5}  Bloch out {:?}",
                clean.eta_qubit,
                clean.fidelity,
                noisy.fidelity,
                noisy.rho_out.bloch().map(|x| (x * 1e4).round() / 1e4)
            );
        }
    }
    Ok(())
}
