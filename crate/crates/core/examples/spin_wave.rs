//! Maxwell-Bloch propagation with snapshots: where the excitation sits
//! (field, optical coherence, spin wave) as the pulse is written, held and
//! read out.

use eitmem::eit;
use eitmem::model::{ComplexWaveform, MediumParams, TimeGrid, GAMMA13_RB85};
use eitmem::protocol::{storage_schedule, StorageOptions};
use eitmem::solver::{propagate, SolverConfig};

fn main() -> eitmem::Result<()> {
    let m = MediumParams::cold_rb85(300.0)?;
    let omega = 10.2 * GAMMA13_RB85;
    let grid = TimeGrid::spanning(-500e-9, 500e-9, 0.25e-9)?;
    let input = ComplexWaveform::gaussian(grid, 0.0, 150e-9)?;
    let base = SolverConfig::new(grid, 64);
    let (control, mut cfg) = storage_schedule(&m, omega, omega, 500e-9, &input, &StorageOptions::default(), &base)?;
    cfg.snapshot_every = 400; // every 100 ns
    let p = propagate(m, &control, &input, &cfg)?;
    println!("group delay {:.0} ns", eit::group_delay(&m, omega)? * 1e9);
    println!(
        "{:>8} {:>8} {:>10} {:>10} {:>10}  spin-wave profile",
        "t (ns)", "Omega", "|S|^2", "|P|^2", "out so far"
    );
    for s in p.history.iter().filter(|s| s.time <= 1.2e-6) {
        let left = p
            .output
            .energy_between(cfg.time_grid.start(), s.time.max(cfg.time_grid.start() + 1e-9))?;
        let n = s.cells();
        let profile: String = (0..16)
            .map(|k| {
                let v = s.spinwave[k * n / 16].norm_sqr() * n as f64 / 4.0;
                [' ', '.', ':', '-', '=', '+', '*', '#', '@'][((v * 8.0) as usize).min(8)]
            })
            .collect();
        println!(
            "{:>8.0} {:>8.2} {:>10.4} {:>10.4} {:>10.4}  |{profile}|",
            s.time * 1e9,
            control.evaluate(s.time) / GAMMA13_RB85,
            s.spinwave_population(),
            s.polarization_population(),
            left
        );
    }
    Ok(())
}
