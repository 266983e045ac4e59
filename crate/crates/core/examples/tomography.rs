//! Polarization tomography from finite projective counts: reconstruct the
//! retrieved states and compare against the truth.

use eitmem::counting::sample_projective_counts;
use eitmem::model::PolarizationState;
use eitmem::qubit::{fidelity, tomography, DensityMatrix2};

fn main() -> eitmem::Result<()> {
    let states = [
        ("H", PolarizationState::h()),
        ("V", PolarizationState::v()),
        ("D", PolarizationState::d()),
        ("L", PolarizationState::l()),
    ];
    for shots in [100u64, 1_000, 10_000] {
        println!("{shots} counts per basis");
        for (name, s) in &states {
            // a lightly depolarized retrieved state, as after readout noise
            let truth = DensityMatrix2::pure(s).depolarized(0.04)?;
            let fids: Vec<f64> = (0..200)
                .map(|k| {
                    let est = tomography(&sample_projective_counts(&truth, shots, k))?;
                    fidelity(&truth, &est)
                })
                .collect::<eitmem::Result<_>>()?;
            let mean = fids.iter().sum::<f64>() / fids.len() as f64;
            let worst = fids.iter().copied().fold(1.0, f64::min);
            println!("  |{name}>  mean F {mean:.5}  worst {worst:.5}");
        }
    }
    let est = tomography(&sample_projective_counts(
        &DensityMatrix2::pure(&PolarizationState::l()),
        10_000,
        7,
    ))?;
    println!("one |L> reconstruction at 10000 counts: Bloch vector {:?}", est.bloch());
    Ok(())
}
