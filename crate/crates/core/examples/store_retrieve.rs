//! One store-and-retrieve cycle at the dual-rail operating point: OD 300,
//! Omega = 10.2 gamma13, 150 ns photon, one-pulse delay. Pass a directory
//! to also write the input / retrieved / transmitted waveforms as CSV.

use std::path::PathBuf;

use eitmem::io::write_waveform_csv;
use eitmem::model::MediumParams;
use eitmem::model::TimeGrid;
use eitmem::protocol::{gaussian_input, run_storage, DecayModel, DutyWindowModel, StorageOptions, ONE_PULSE_DELAY};
use eitmem::solver::SolverConfig;

fn main() -> eitmem::Result<()> {
    let dt = 0.25e-9;
    let cfg = SolverConfig::new(TimeGrid::new(0.0, dt, 2)?, 128);
    let medium = MediumParams::cold_rb85(300.0)?;
    let input = gaussian_input(150e-9, dt, 700e-9)?;
    let r = run_storage(
        &medium,
        &DutyWindowModel::dual_rail(),
        &DecayModel::default_rb85(),
        0.0,
        ONE_PULSE_DELAY,
        &input,
        &StorageOptions::default(),
        &cfg,
    )?;
    println!("storage time      {:.0} ns", r.storage_time * 1e9);
    println!("control off at    {:.1} ns after the input peak", r.switch_off * 1e9);
    println!("stored fraction   {:.4}", r.stored_fraction);
    println!("leakage           {:.4}", r.leakage);
    println!("efficiency        {:.4}", r.efficiency);
    println!("likeness          {:.4}", r.likeness);

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        write_waveform_csv(&dir.join("input.csv"), &r.input)?;
        write_waveform_csv(&dir.join("retrieved.csv"), &r.retrieved)?;
        write_waveform_csv(&dir.join("transmitted.csv"), &r.transmitted)?;
        println!("waveforms written to {}", dir.display());
    }
    Ok(())
}
