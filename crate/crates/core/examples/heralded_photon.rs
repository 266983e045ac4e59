//! Heralded single-photon waveforms from a pumped source: the envelope is
//! the pump profile along the source read backwards at the group velocity.

use eitmem::model::TimeGrid;
use eitmem::protocol::fit_gaussian;
use eitmem::source::{heralded_waveform, make_qubit_photon, PumpProfile, SourceParams};

fn main() -> eitmem::Result<()> {
    let grid = TimeGrid::spanning(-600e-9, 600e-9, 0.5e-9)?;
    for fwhm in [100e-9, 150e-9, 250e-9] {
        let src = SourceParams::with_gaussian_pump(SourceParams::waist_for_fwhm(fwhm, 2e4))?;
        let psi = heralded_waveform(&src, grid)?;
        let fit = fit_gaussian(&psi)?;
        let (a, b) = src.emission_window();
        println!(
            "pump waist {:.2} mm -> photon FWHM {:.1} ns (fit likeness {:.6}), emission window {:.0}..{:.0} ns",
            SourceParams::waist_for_fwhm(fwhm, 2e4) * 1e3,
            fit.fwhm * 1e9,
            fit.likeness,
            a * 1e9,
            b * 1e9
        );
    }

    let mut src = SourceParams::with_gaussian_pump(3e-3)?;
    src.pump = PumpProfile::Square {
        center: 0.0085,
        width: 0.017,
    };
    let psi = heralded_waveform(&src, grid)?;
    println!(
        "uniform pump over the whole source: flat-top photon, {:.4} of the energy in the central 700 ns",
        psi.energy_between(-350e-9, 350e-9)?
    );

    let photon = make_qubit_photon(psi, std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)?;
    let [h, v] = photon.polarization.amplitudes();
    println!("qubit photon |L>: H amplitude {h:.4}, V amplitude {v:.4}");
    Ok(())
}
