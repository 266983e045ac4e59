//! OD drift during the duty window: scaling the control with sqrt(OD)
//! keeps the group delay fixed, while a constant control lets the write
//! timing drift off the pulse.

use eitmem::model::{MediumParams, TimeGrid, GAMMA13_RB85};
use eitmem::protocol::{
    compare_control_strategies, gaussian_input, DecayModel, DriftScenario, StorageOptions, ONE_PULSE_DELAY,
};
use eitmem::solver::SolverConfig;

fn main() -> eitmem::Result<()> {
    let dt = 0.25e-9;
    let cfg = SolverConfig::new(TimeGrid::new(0.0, dt, 2)?, 128);
    let scenario = DriftScenario {
        duration: 0.3e-3,
        od_ratio: 250.0 / 300.0,
        omega_ref: 10.2 * GAMMA13_RB85,
        od_ref: 300.0,
        storage_time: ONE_PULSE_DELAY,
        event_samples: 3,
        decay: DecayModel::default_rb85(),
    };
    println!(
        "control at the end of the reference window: {:.2} gamma13",
        scenario.omega_at(250.0) / GAMMA13_RB85
    );
    let ods = [250.0, 300.0, 350.0, 400.0, 450.0, 500.0];
    let c = compare_control_strategies(
        &MediumParams::cold_rb85(300.0)?,
        &scenario,
        &ods,
        &gaussian_input(150e-9, dt, 700e-9)?,
        &StorageOptions::default(),
        &cfg,
    )?;
    println!("{:>5} {:>12} {:>10} {:>8}", "OD", "compensated", "constant", "gain");
    for i in 0..ods.len() {
        println!(
            "{:>5.0} {:>12.4} {:>10.4} {:>+7.2}pp",
            c.od[i],
            c.compensated[i],
            c.constant[i],
            100.0 * (c.compensated[i] - c.constant[i])
        );
    }
    Ok(())
}
