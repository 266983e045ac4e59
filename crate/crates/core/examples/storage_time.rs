//! Retrieval efficiency against storage time with the default decay
//! model (gamma12 dephasing plus a Gaussian term halving the efficiency
//! at 15 us).

use eitmem::model::{MediumParams, TimeGrid};
use eitmem::protocol::{gaussian_input, storage_time_sweep, DecayModel, DutyWindowModel, StorageOptions};
use eitmem::solver::SolverConfig;

fn main() -> eitmem::Result<()> {
    let dt = 0.25e-9;
    let cfg = SolverConfig::new(TimeGrid::new(0.0, dt, 2)?, 128);
    let m = MediumParams::cold_rb85(300.0)?;
    let decay = DecayModel::default_rb85();
    println!("tau_b = {:.1} us", decay.tau_b.unwrap_or(f64::INFINITY) * 1e6);
    let times: Vec<f64> = [0.7, 1.5, 3.0, 4.5, 6.0, 9.0, 12.0, 15.0, 20.0]
        .iter()
        .map(|t| t * 1e-6)
        .collect();
    let input = gaussian_input(150e-9, dt, 700e-9)?;
    let res = storage_time_sweep(
        &m,
        &DutyWindowModel::dual_rail(),
        &decay,
        0.0,
        &times,
        &input,
        &StorageOptions::default(),
        &cfg,
    )?;
    let delay_slots = |t: f64| t / 150e-9;
    for (t, r) in times.iter().zip(&res) {
        println!(
            "t_s {:>5.1} us ({:>5.1} pulse widths)  eta {:.4}  likeness {:.4}",
            t * 1e6,
            delay_slots(*t),
            r.efficiency,
            r.likeness
        );
    }
    Ok(())
}
