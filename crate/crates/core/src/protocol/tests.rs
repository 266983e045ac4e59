use super::*;
use crate::model::{TimeGrid, GAMMA13_RB85};
use crate::solver::propagate;

const DT: f64 = 0.25e-9;

fn base_cfg() -> SolverConfig {
    SolverConfig::new(TimeGrid::new(0.0, DT, 2).unwrap(), 96)
}

fn pulse() -> ComplexWaveform {
    gaussian_input(150e-9, DT, EFFICIENCY_WINDOW).unwrap()
}

fn table1() -> MediumParams {
    MediumParams::cold_rb85(300.0).unwrap()
}

#[test]
fn efficiency_of_shifted_copy_is_one() {
    let p = pulse();
    let eta = efficiency(&p, &p.shifted(1.3e-6), EFFICIENCY_WINDOW).unwrap();
    assert!((eta - 1.0).abs() < 1e-9, "{eta}");
    let zero = ComplexWaveform::zeros(*p.grid());
    assert_eq!(efficiency(&p, &zero, EFFICIENCY_WINDOW).unwrap(), 0.0);
}

#[test]
fn efficiency_window_must_fit() {
    let p = pulse();
    assert!(matches!(efficiency(&p, &p, 10e-6), Err(Error::WindowOutOfGrid { .. })));
}

#[test]
fn likeness_limits() {
    let p = pulse();
    assert!((likeness(&p, &p.shifted(2e-6)).unwrap() - 1.0).abs() < 1e-9);
    assert!((likeness(&p, &p.scaled(C64::new(0.0, -0.3))).unwrap() - 1.0).abs() < 1e-9);
    // same intensity profile and peak, orthogonal amplitudes
    let grid = TimeGrid::spanning(-1e-6, 1e-6, 1e-9).unwrap();
    let a = ComplexWaveform::gaussian(grid, 0.0, 100e-9).unwrap();
    let b = ComplexWaveform::from_fn(grid, |t| a.sample_at(t) * t.signum()).unwrap();
    let l = likeness(&a, &b).unwrap();
    assert!(l < 1e-4, "{l}");
    let zero = ComplexWaveform::zeros(grid);
    assert!(matches!(likeness(&a, &zero), Err(Error::ZeroNorm)));
}

#[test]
fn zero_hold_is_plain_propagation() {
    let m = table1();
    let omega = 10.2 * GAMMA13_RB85;
    let p = pulse();
    let (control, cfg) = storage_schedule(&m, omega, omega, 0.0, &p, &StorageOptions::default(), &base_cfg()).unwrap();
    let run = store_and_retrieve(m, &control, &p, &cfg).unwrap();
    let direct = propagate(m, &control, &p, &cfg).unwrap().output;
    let diff: f64 = run
        .output
        .samples()
        .iter()
        .zip(direct.samples())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-9);
    assert_eq!(run.off_window.unwrap().hold(), 0.0);
    // the split is a partition of the output
    for ((o, t), r) in run
        .output
        .samples()
        .iter()
        .zip(run.transmitted.samples())
        .zip(run.retrieved.samples())
    {
        assert_eq!(*o, t + r);
    }
}

#[test]
fn control_left_on_retrieves_nothing() {
    let m = table1();
    let p = pulse();
    let cfg = base_cfg().with_span(-0.5e-6, 2e-6).unwrap();
    let control = ControlSchedule::constant(10.2 * GAMMA13_RB85, -0.5e-6, 2e-6).unwrap();
    let run = store_and_retrieve(m, &control, &p, &cfg).unwrap();
    assert!(run.off_window.is_none());
    assert_eq!(run.retrieved.norm(), 0.0);
    assert!(run.transmitted.norm() > 0.9);
}

#[test]
fn run_storage_at_zero_hold_matches_direct_call() {
    let m = table1();
    let omega = 10.2 * GAMMA13_RB85;
    let p = pulse();
    let opts = StorageOptions::default();
    let duty = DutyWindowModel::frozen(1e-3, 300.0, omega).unwrap();
    let decay = DecayModel::new(m.gamma12(), Some(20e-6)).unwrap();
    let r = run_storage(&m, &duty, &decay, 0.0, 0.0, &p, &opts, &base_cfg()).unwrap();
    let (control, cfg) = storage_schedule(&m, omega, omega, 0.0, &p, &opts, &base_cfg()).unwrap();
    let direct = store_and_retrieve(m, &control, &p, &cfg).unwrap();
    let eta = efficiency(&p, &direct.retrieved, EFFICIENCY_WINDOW).unwrap();
    assert!((r.efficiency - eta).abs() < 1e-12);
    assert!(r.efficiency + r.leakage <= 1.0 + 1e-6);
}

#[test]
fn frozen_spin_wave_makes_efficiency_independent_of_hold() {
    let m = table1();
    let duty = DutyWindowModel::frozen(1e-3, 300.0, 10.2 * GAMMA13_RB85).unwrap();
    let decay = DecayModel::disabled();
    let opts = StorageOptions::default();
    let p = pulse();
    let a = run_storage(&m, &duty, &decay, 0.0, 0.7e-6, &p, &opts, &base_cfg()).unwrap();
    let b = run_storage(&m, &duty, &decay, 0.0, 2.1e-6, &p, &opts, &base_cfg()).unwrap();
    assert!(
        (a.efficiency - b.efficiency).abs() < 1e-6,
        "{} vs {}",
        a.efficiency,
        b.efficiency
    );
}

#[test]
fn storage_decay_factorizes() {
    let m = table1();
    let duty = DutyWindowModel::frozen(1e-3, 300.0, 10.2 * GAMMA13_RB85).unwrap();
    let decay = DecayModel::default_rb85();
    let opts = StorageOptions::default();
    let p = pulse();
    let times = [0.7e-6, 3e-6, 6e-6];
    let r = storage_time_sweep(&m, &duty, &decay, 0.0, &times, &p, &opts, &base_cfg()).unwrap();
    for (ts, res) in times.iter().zip(&r).skip(1) {
        let expect = decay.efficiency_factor(*ts) / decay.efficiency_factor(times[0]);
        let got = res.efficiency / r[0].efficiency;
        assert!((got / expect - 1.0).abs() < 0.01, "t_s {ts}: {got} vs {expect}");
    }
    assert!(r.windows(2).all(|w| w[1].efficiency <= w[0].efficiency));
}

#[test]
fn efficiency_is_scale_invariant() {
    let m = table1();
    let duty = DutyWindowModel::dual_rail();
    let opts = StorageOptions::default();
    let p = pulse();
    let decay = DecayModel::default_rb85();
    let a = run_storage(&m, &duty, &decay, 0.0, 0.7e-6, &p, &opts, &base_cfg()).unwrap();
    let q = p.scaled(C64::new(0.2, 3.0));
    let b = run_storage(&m, &duty, &decay, 0.0, 0.7e-6, &q, &opts, &base_cfg()).unwrap();
    assert!((a.efficiency - b.efficiency).abs() < 1e-9);
    assert!((a.leakage - b.leakage).abs() < 1e-9);
}

#[test]
fn lossless_efficiency_grows_with_od() {
    let opts = StorageOptions::default();
    let p = pulse();
    let decay = DecayModel::disabled();
    let mut last = 0.0;
    for od in [50.0, 100.0, 200.0, 400.0] {
        let m = MediumParams::cold_rb85(od).unwrap().with_gamma12(0.0).unwrap();
        let omega = 10.2 * GAMMA13_RB85 * (od / 300.0f64).sqrt();
        let duty = DutyWindowModel::frozen(1e-3, od, omega).unwrap();
        let r = run_storage(&m, &duty, &decay, 0.0, 0.7e-6, &p, &opts, &base_cfg()).unwrap();
        assert!(r.efficiency > last, "OD {od}: {} after {last}", r.efficiency);
        last = r.efficiency;
    }
}

#[test]
fn strategies_coincide_without_drift() {
    let m = table1();
    let scenario = DriftScenario {
        duration: 0.3e-3,
        od_ratio: 1.0,
        omega_ref: 10.2 * GAMMA13_RB85,
        od_ref: 300.0,
        storage_time: 0.7e-6,
        event_samples: 2,
        decay: DecayModel::default_rb85(),
    };
    let c = compare_control_strategies(
        &m,
        &scenario,
        &[300.0],
        &pulse(),
        &StorageOptions::default(),
        &base_cfg(),
    )
    .unwrap();
    assert!((c.compensated[0] - c.constant[0]).abs() < 1e-9);
}

#[test]
fn run_storage_rejects_events_outside_duty_window() {
    let m = table1();
    let duty = DutyWindowModel::dual_rail();
    let decay = DecayModel::default_rb85();
    let opts = StorageOptions::default();
    let p = pulse();
    assert!(run_storage(&m, &duty, &decay, 0.31e-3, 0.7e-6, &p, &opts, &base_cfg()).is_err());
    assert!(run_storage(&m, &duty, &decay, 0.2999e-3, 0.7e-6, &p, &opts, &base_cfg()).is_err());
}

#[test]
fn time_reversal_fixed_point_and_square_start() {
    let m = MediumParams::cold_rb85(500.0).unwrap();
    let omega = 10.2 * GAMMA13_RB85 * (500.0f64 / 300.0).sqrt();
    let p = pulse();
    let (control, cfg) = storage_schedule(
        &m,
        omega,
        omega,
        ONE_PULSE_DELAY,
        &p,
        &StorageOptions::default(),
        &base_cfg(),
    )
    .unwrap();
    let square = ComplexWaveform::square(*p.grid(), -200e-9, 400e-9).unwrap();
    let opt = optimize_input_waveform(&m, &control, &square, &cfg, 30, 1e-4, EFFICIENCY_WINDOW).unwrap();
    assert!(opt.converged);
    assert!(opt.efficiency > opt.history[0] + 0.05, "{:?}", opt.history);
    let best = opt.history.iter().cloned().fold(0.0, f64::max);
    assert_eq!(best, opt.efficiency);
    assert!(fit_gaussian(&opt.waveform).unwrap().likeness >= 0.95);

    let again = optimize_input_waveform(&m, &control, &opt.waveform, &cfg, 30, 1e-3, EFFICIENCY_WINDOW).unwrap();
    assert!(again.converged && again.history.len() <= 2, "{:?}", again.history);
}

#[test]
fn gaussian_fit_recovers_gaussian() {
    let grid = TimeGrid::spanning(-1e-6, 1e-6, 1e-9).unwrap();
    let g = ComplexWaveform::gaussian(grid, 0.1e-6, 180e-9).unwrap();
    let fit = fit_gaussian(&g).unwrap();
    assert!((fit.fwhm - 180e-9).abs() < 1e-10);
    assert!((fit.center - 0.1e-6).abs() < 1e-10);
    assert!(fit.likeness > 1.0 - 1e-9);
}
