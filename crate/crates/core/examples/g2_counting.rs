//! Heralded g2 of the retrieved photon: Monte Carlo tallies, the exact
//! large-sample value, and the storage time at which g2 reaches 0.5.

use eitmem::counting::{
    g2_analytic, g2_conditional, g2_vs_storage_time, simulate_counts, threshold_crossing, CountModel, NoiseSchedule,
    SignalKind,
};
use eitmem::protocol::DecayModel;

fn main() -> eitmem::Result<()> {
    let base = CountModel::default();
    let t = simulate_counts(&base, 4_000_000, 1)?;
    let e = g2_conditional(&t)?;
    println!(
        "0.7 us point: N_G {} N_GT {} N_GR {} N_GTR {} -> g2 {:.3} +/- {:.3} (exact {:.3})",
        t.n_g,
        t.n_gt,
        t.n_gr,
        t.n_gtr,
        e.g2,
        e.sigma,
        g2_analytic(&base)?
    );

    // the two-photon limit of 1/2 only shows at low detection efficiency
    for (name, kind, p, eta_d) in [
        ("coherent", SignalKind::Coherent, 0.2, 1.0),
        ("two-photon", SignalKind::TwoPhoton, 1.0, 0.02),
    ] {
        let m = CountModel {
            signal: kind,
            p_signal: p,
            p_noise: 0.0,
            dark_rate: 0.0,
            detector_efficiency: eta_d,
            ..base
        };
        let e = g2_conditional(&simulate_counts(&m, 2_000_000, 2)?)?;
        println!(
            "{name:>10} light: g2 {:.3} +/- {:.3} (exact {:.3})",
            e.g2,
            e.sigma,
            g2_analytic(&m)?
        );
    }

    let decay = DecayModel::default_rb85();
    let signal = |t: f64| 0.0331 * decay.efficiency_factor(t) / decay.efficiency_factor(0.7e-6);
    let noise = NoiseSchedule::measured();
    let times: Vec<f64> = [0.7, 1.5, 3.0, 4.5, 6.0, 7.5].iter().map(|t| t * 1e-6).collect();
    for p in g2_vs_storage_time(&base, &times, signal, &noise, 4_000_000, 10)? {
        println!(
            "t_s {:>4.1} us  p_s {:.4}  p_n {:.4}  g2 {:.3} +/- {:.3}  exact {:.3}",
            p.storage_time * 1e6,
            p.p_signal,
            p.p_noise,
            p.g2,
            p.sigma,
            p.g2_analytic
        );
    }
    if let Some(t) = threshold_crossing(&base, signal, &noise, 0.5, 0.0, 15e-6)? {
        println!("g2 reaches 0.5 after {:.2} us of storage", t * 1e6);
    }
    Ok(())
}
