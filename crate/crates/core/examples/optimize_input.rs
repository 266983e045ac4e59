//! Input optimization at OD 500: a Gaussian width / write-timing search,
//! then iterated time reversal starting from a square pulse.

use eitmem::model::{ComplexWaveform, MediumParams, TimeGrid, GAMMA13_RB85};
use eitmem::protocol::{
    fit_gaussian, gaussian_input, optimize_gaussian, optimize_input_waveform, storage_schedule, GaussianSearch,
    StorageOptions, ONE_PULSE_DELAY,
};
use eitmem::solver::SolverConfig;

fn main() -> eitmem::Result<()> {
    let dt = 0.25e-9;
    let cfg = SolverConfig::new(TimeGrid::new(0.0, dt, 2)?, 128);
    let m = MediumParams::cold_rb85(500.0)?;
    let omega = 10.2 * GAMMA13_RB85 * (500.0f64 / 300.0).sqrt();
    let opts = StorageOptions::default();

    let g = optimize_gaussian(&m, omega, ONE_PULSE_DELAY, &GaussianSearch::default(), &opts, &cfg)?;
    println!(
        "gaussian search: eta {:.4} at FWHM {:.1} ns, control off {:.1} ns after the peak ({} runs)",
        g.efficiency,
        g.fwhm * 1e9,
        g.switch_after_peak * 1e9,
        g.evaluations
    );

    let grid_src = gaussian_input(150e-9, dt, 700e-9)?;
    let square = ComplexWaveform::square(*grid_src.grid(), -200e-9, 400e-9)?;
    let (control, run_cfg) = storage_schedule(&m, omega, omega, ONE_PULSE_DELAY, &grid_src, &opts, &cfg)?;
    let tr = optimize_input_waveform(&m, &control, &square, &run_cfg, 20, 1e-4, opts.window)?;
    let hist: Vec<String> = tr.history.iter().map(|e| format!("{e:.4}")).collect();
    println!("time reversal from a 400 ns square: {}", hist.join(" -> "));
    let fit = fit_gaussian(&tr.waveform)?;
    println!(
        "optimum: eta {:.4} (converged {}), closest Gaussian FWHM {:.1} ns with likeness {:.4}",
        tr.efficiency,
        tr.converged,
        fit.fwhm * 1e9,
        fit.likeness
    );
    Ok(())
}
