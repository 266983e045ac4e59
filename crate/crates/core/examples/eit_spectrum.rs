//! Steady-state EIT transmission of the memory medium for a few control
//! strengths: resonant transmission, group delay and window width.

use std::f64::consts::PI;

use eitmem::eit;
use eitmem::model::{MediumParams, GAMMA13_RB85};

fn main() -> eitmem::Result<()> {
    let m = MediumParams::cold_rb85(300.0)?;
    println!("OD {}  gamma13 = 2pi x 3 MHz  gamma12 = 0.0007 gamma13\n", m.od());
    println!(
        "{:>8} {:>10} {:>12} {:>12} {:>12}",
        "Omega/g13", "T(0)", "delay (ns)", "FWHM (MHz)", "Vg (m/s)"
    );
    for w in [6.0, 8.0, 10.2, 12.0, 15.0] {
        let omega = w * GAMMA13_RB85;
        println!(
            "{:>8.1} {:>10.5} {:>12.1} {:>12.3} {:>12.1}",
            w,
            eit::transmission(&m, omega, 0.0),
            eit::group_delay(&m, omega)? * 1e9,
            eit::transparency_fwhm(&m, omega)? / (2.0 * PI) / 1e6,
            eit::group_velocity(&m, omega)?,
        );
    }

    // coarse ASCII profile at the operating point
    let omega = 10.2 * GAMMA13_RB85;
    let d = eit::detuning_range(2.0 * PI * 9e6, 19);
    let s = eit::transmission_spectrum(&m, omega, &d);
    println!();
    for (delta, t) in s.detunings.iter().zip(&s.transmission) {
        let bar = "#".repeat((t * 50.0).round() as usize);
        println!("{:>7.2} MHz |{bar}", delta / (2.0 * PI) / 1e6);
    }
    Ok(())
}
