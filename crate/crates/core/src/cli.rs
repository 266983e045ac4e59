//! Command-line workflows. Each subcommand reads a [`RunConfig`], writes its
//! CSV / JSON artifacts plus `manifest.json` into the output directory and
//! returns the list of files it wrote.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{OptimizeMethod, RunConfig, StateSpec};
use crate::counting::{g2_conditional, g2_vs_storage_time, simulate_counts, threshold_crossing, CountModel};
use crate::eit;
use crate::error::{Error, Result};
use crate::io;
use crate::model::{ComplexWaveform, ControlSchedule, MediumParams, TimeGrid, C64};
use crate::protocol::{
    compare_control_strategies, control_sweep, optimize_gaussian, optimize_input_waveform, run_storage,
    storage_schedule, storage_time_sweep, DutyWindowModel,
};
use crate::qubit::{characterize, tomography, Channel, ChannelPair, DensityMatrix2, ReadoutNoise};
use crate::solver::{propagate, BlochCoefficients, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "eitmem", version, about = "EIT quantum-memory simulations")]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (default: the config's `out`, else `out/<scenario>`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps and Monte Carlo.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Run the fast invariant suite before any subcommand.
    #[arg(long, global = true)]
    pub check: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Od,
    StorageTime,
    OmegaC,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady-state EIT transmission spectrum.
    Transmission,
    /// One store-and-retrieve run.
    Store,
    /// Efficiency along one parameter axis.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
    },
    /// Input-waveform optimization.
    Optimize,
    /// Dual-rail qubit storage; `--state` takes a name (H V D A L R) or
    /// `theta,phi` in degrees and may repeat.
    Qubit {
        #[arg(long = "state")]
        states: Vec<String>,
    },
    /// Heralded g2 Monte Carlo versus storage time.
    G2,
    /// Density matrix from a `basis,outcome,count` CSV.
    Tomography {
        #[arg(long)]
        counts: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Transmission => "transmission",
            Command::Store => "store",
            Command::Sweep { .. } => "sweep",
            Command::Optimize => "optimize",
            Command::Qubit { .. } => "qubit",
            Command::G2 => "g2",
            Command::Tomography { .. } => "tomography",
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config_sha256: String,
    config: &'a RunConfig,
    outputs: Vec<String>,
}

/// Resolves the config, runs the checks and the subcommand.
pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.jobs {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    if cli.check {
        let outcomes = run_checks()?;
        for c in &outcomes {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        if let Some(bad) = outcomes.iter().find(|c| !c.passed) {
            return Err(Error::CheckFailed(bad.name.to_string()));
        }
    }
    let Some(cmd) = &cli.command else {
        if cli.check {
            return Ok(());
        }
        return Err(Error::Config {
            path: "<command line>".into(),
            message: "no subcommand given (see --help)".into(),
        });
    };
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.scenario));
    std::fs::create_dir_all(&out)?;
    let started = Instant::now();
    let files = dispatch(cmd, &cfg, &out)?;
    write_manifest(cmd.name(), &cfg, &out, files)?;
    eprintln!(
        "{} finished in {:.2?}, artifacts in {}",
        cmd.name(),
        started.elapsed(),
        out.display()
    );
    Ok(())
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig, out: &Path) -> Result<Vec<String>> {
    match cmd {
        Command::Transmission => cmd_transmission(cfg, out),
        Command::Store => cmd_store(cfg, out),
        Command::Sweep { axis } => cmd_sweep(cfg, *axis, out),
        Command::Optimize => cmd_optimize(cfg, out),
        Command::Qubit { states } => {
            let specs = states.iter().map(|s| parse_state(s)).collect::<Result<Vec<_>>>()?;
            cmd_qubit(cfg, &specs, out)
        }
        Command::G2 => cmd_g2(cfg, out),
        Command::Tomography { counts } => cmd_tomography(counts, out),
    }
}

fn write_manifest(command: &str, cfg: &RunConfig, out: &Path, outputs: Vec<String>) -> Result<()> {
    let m = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: cfg.content_hash(),
        config: cfg,
        outputs,
    };
    io::write_json(&out.join("manifest.json"), &m)
}

/// `H`, `d`, or `theta,phi` in degrees.
pub fn parse_state(s: &str) -> Result<StateSpec> {
    let spec = match s.split_once(',') {
        Some((t, p)) => {
            let num = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::param("state", format!("cannot parse angle in {s:?}")))
            };
            StateSpec::Angles([num(t)?, num(p)?])
        }
        None => StateSpec::Named(s.trim().to_string()),
    };
    spec.state()?;
    Ok(spec)
}

#[derive(Serialize)]
struct TransmissionSummary {
    od: f64,
    omega_over_gamma13: f64,
    transmission_at_resonance: f64,
    group_delay_ns: f64,
    transparency_fwhm_mhz: f64,
}

pub fn cmd_transmission(cfg: &RunConfig, out: &Path) -> Result<Vec<String>> {
    let m = cfg.medium()?;
    let omega = cfg.omega();
    let span = 2.0 * std::f64::consts::PI * cfg.transmission.span_mhz * 1e6;
    let spec = eit::transmission_spectrum(&m, omega, &eit::detuning_range(span, cfg.transmission.points));
    io::write_spectrum_csv(&out.join("spectrum.csv"), &spec)?;
    let summary = TransmissionSummary {
        od: m.od(),
        omega_over_gamma13: cfg.control.omega,
        transmission_at_resonance: eit::transmission(&m, omega, 0.0),
        group_delay_ns: eit::group_delay(&m, omega)? * 1e9,
        transparency_fwhm_mhz: eit::transparency_fwhm(&m, omega)? / (2.0 * std::f64::consts::PI) / 1e6,
    };
    io::write_json(&out.join("transmission.json"), &summary)?;
    Ok(vec!["spectrum.csv".into(), "transmission.json".into()])
}

#[derive(Serialize)]
struct StoreSummary {
    efficiency: f64,
    likeness: f64,
    leakage: f64,
    stored_fraction: f64,
    storage_time_us: f64,
    switch_off_ns: f64,
    group_delay_ns: f64,
    od: f64,
    omega_over_gamma13: f64,
}

fn frozen_duty(cfg: &RunConfig, storage_time: f64) -> Result<DutyWindowModel> {
    DutyWindowModel::frozen(storage_time.max(1e-6), cfg.medium.od, cfg.omega())
}

pub fn cmd_store(cfg: &RunConfig, out: &Path) -> Result<Vec<String>> {
    let m = cfg.medium()?;
    let input = cfg.input_waveform()?;
    let ts = cfg.storage_time();
    let r = run_storage(
        &m,
        &frozen_duty(cfg, ts)?,
        &cfg.decay()?,
        0.0,
        ts,
        &input,
        &cfg.storage_options()?,
        &cfg.solver(),
    )?;
    let summary = StoreSummary {
        efficiency: r.efficiency,
        likeness: r.likeness,
        leakage: r.leakage,
        stored_fraction: r.stored_fraction,
        storage_time_us: r.storage_time * 1e6,
        switch_off_ns: r.switch_off * 1e9,
        group_delay_ns: eit::group_delay(&m, cfg.omega())? * 1e9,
        od: m.od(),
        omega_over_gamma13: cfg.control.omega,
    };
    io::write_json(&out.join("store.json"), &summary)?;
    io::write_waveform_csv(&out.join("input.csv"), &r.input)?;
    io::write_waveform_csv(&out.join("retrieved.csv"), &r.retrieved)?;
    io::write_waveform_csv(&out.join("transmitted.csv"), &r.transmitted)?;
    Ok(vec![
        "store.json".into(),
        "input.csv".into(),
        "retrieved.csv".into(),
        "transmitted.csv".into(),
    ])
}

#[derive(Serialize)]
struct OdRow {
    od: f64,
    eta_compensated: f64,
    eta_constant: f64,
}

#[derive(Serialize)]
struct TimeRow {
    storage_time_us: f64,
    eta: f64,
    likeness: f64,
}

#[derive(Serialize)]
struct OmegaRow {
    omega_over_gamma13: f64,
    eta: f64,
    likeness: f64,
    leakage: f64,
}

pub fn cmd_sweep(cfg: &RunConfig, axis: Axis, out: &Path) -> Result<Vec<String>> {
    let m = cfg.medium()?;
    let input = cfg.input_waveform()?;
    let opts = cfg.storage_options()?;
    let solver = cfg.solver();
    let decay = cfg.decay()?;
    let name = match axis {
        Axis::Od => {
            let c = compare_control_strategies(&m, &cfg.drift_scenario()?, &cfg.sweep.od, &input, &opts, &solver)?;
            let rows: Vec<OdRow> = (0..c.od.len())
                .map(|i| OdRow {
                    od: c.od[i],
                    eta_compensated: c.compensated[i],
                    eta_constant: c.constant[i],
                })
                .collect();
            io::write_rows(&out.join("sweep_od.csv"), &rows)?;
            "sweep_od.csv"
        }
        Axis::StorageTime => {
            let times: Vec<f64> = cfg.sweep.storage_time_us.iter().map(|t| t * 1e-6).collect();
            let longest = times.iter().copied().fold(0.0, f64::max);
            let duty = frozen_duty(cfg, longest)?;
            let res = storage_time_sweep(&m, &duty, &decay, 0.0, &times, &input, &opts, &solver)?;
            let rows: Vec<TimeRow> = cfg
                .sweep
                .storage_time_us
                .iter()
                .zip(&res)
                .map(|(&t, r)| TimeRow {
                    storage_time_us: t,
                    eta: r.efficiency,
                    likeness: r.likeness,
                })
                .collect();
            io::write_rows(&out.join("sweep_storage_time.csv"), &rows)?;
            "sweep_storage_time.csv"
        }
        Axis::OmegaC => {
            let g = cfg.gamma13();
            let omegas: Vec<f64> = cfg.sweep.omega.iter().map(|w| w * g).collect();
            let res = control_sweep(&m, &omegas, cfg.storage_time(), &decay, &input, &opts, &solver)?;
            let rows: Vec<OmegaRow> = cfg
                .sweep
                .omega
                .iter()
                .zip(&res)
                .map(|(&w, r)| OmegaRow {
                    omega_over_gamma13: w,
                    eta: r.efficiency,
                    likeness: r.likeness,
                    leakage: r.leakage,
                })
                .collect();
            io::write_rows(&out.join("sweep_omega_c.csv"), &rows)?;
            "sweep_omega_c.csv"
        }
    };
    Ok(vec![name.into()])
}

#[derive(Serialize)]
struct OptimumSummary {
    method: OptimizeMethod,
    efficiency: f64,
    evaluations: usize,
    converged: bool,
    fwhm_ns: Option<f64>,
    switch_after_peak_ns: Option<f64>,
}

#[derive(Serialize)]
struct HistoryRow {
    iteration: usize,
    eta: f64,
}

pub fn cmd_optimize(cfg: &RunConfig, out: &Path) -> Result<Vec<String>> {
    let m = cfg.medium()?;
    let opts = cfg.storage_options()?;
    let solver = cfg.solver();
    let ts = cfg.storage_time();
    let mut files = vec!["optimum.json".to_string(), "optimal_input.csv".into()];
    match cfg.optimize.method {
        OptimizeMethod::Gaussian => {
            let o = optimize_gaussian(&m, cfg.omega(), ts, &cfg.gaussian_search(), &opts, &solver)?;
            io::write_waveform_csv(&out.join("optimal_input.csv"), &o.result.input)?;
            io::write_waveform_csv(&out.join("retrieved.csv"), &o.result.retrieved)?;
            files.push("retrieved.csv".into());
            io::write_json(
                &out.join("optimum.json"),
                &OptimumSummary {
                    method: OptimizeMethod::Gaussian,
                    efficiency: o.efficiency,
                    evaluations: o.evaluations,
                    converged: true,
                    fwhm_ns: Some(o.fwhm * 1e9),
                    switch_after_peak_ns: Some(o.switch_after_peak * 1e9),
                },
            )?;
        }
        OptimizeMethod::TimeReversal => {
            let input = cfg.input_waveform()?;
            let (control, run_cfg) = storage_schedule(&m, cfg.omega(), cfg.omega_read(), ts, &input, &opts, &solver)?;
            let o = optimize_input_waveform(
                &m,
                &control,
                &input,
                &run_cfg,
                cfg.optimize.max_iters,
                cfg.optimize.tol,
                opts.window,
            )?;
            io::write_waveform_csv(&out.join("optimal_input.csv"), &o.waveform)?;
            let rows: Vec<HistoryRow> = o
                .history
                .iter()
                .enumerate()
                .map(|(i, &eta)| HistoryRow { iteration: i, eta })
                .collect();
            io::write_rows(&out.join("history.csv"), &rows)?;
            files.push("history.csv".into());
            io::write_json(
                &out.join("optimum.json"),
                &OptimumSummary {
                    method: OptimizeMethod::TimeReversal,
                    efficiency: o.efficiency,
                    evaluations: o.history.len(),
                    converged: o.converged,
                    fwhm_ns: None,
                    switch_after_peak_ns: None,
                },
            )?;
        }
    }
    Ok(files)
}

#[derive(Serialize)]
struct QubitRow {
    state: String,
    theta_deg: f64,
    phi_deg: f64,
    eta: f64,
    fidelity: f64,
    noise_weight: f64,
    rho_out: DensityMatrix2,
}

#[derive(Serialize)]
struct QubitReport {
    eta_h: f64,
    eta_v: f64,
    likeness_h: f64,
    likeness_v: f64,
    mode_overlap: [f64; 2],
    states: Vec<QubitRow>,
}

/// Builds both rails for the configured storage event.
pub fn channel_pair(cfg: &RunConfig, input: &ComplexWaveform) -> Result<(ChannelPair, SolverConfig)> {
    let opts = cfg.storage_options()?;
    let solver = cfg.solver();
    let g = cfg.gamma13();
    let mh = cfg.medium()?;
    let mv = match cfg.qubit.od_v {
        Some(od) => mh.with_od(od)?,
        None => mh,
    };
    let (wh, wv) = (cfg.omega(), cfg.qubit.omega_v.map_or(cfg.omega(), |w| w * g));
    let ts = cfg.storage_time();
    let (ch, cfg_h) = storage_schedule(&mh, wh, wh, ts, input, &opts, &solver)?;
    let (cv, cfg_v) = storage_schedule(&mv, wv, wv, ts, input, &opts, &solver)?;
    let run_cfg = if cfg_h.time_grid.end() >= cfg_v.time_grid.end() {
        cfg_h
    } else {
        cfg_v
    };
    Ok((
        ChannelPair {
            ch_h: Channel {
                medium: mh,
                control: ch,
            },
            ch_v: Channel {
                medium: mv,
                control: cv,
            },
            relative_phase: cfg.qubit.relative_phase_deg.to_radians(),
        },
        run_cfg,
    ))
}

pub fn cmd_qubit(cfg: &RunConfig, extra: &[StateSpec], out: &Path) -> Result<Vec<String>> {
    let input = cfg.input_waveform()?;
    let (pair, run_cfg) = channel_pair(cfg, &input)?;
    let decay = cfg.decay()?;
    let resp = characterize(&pair, &input, Some(&decay), &run_cfg, cfg.storage.window_ns * 1e-9)?;
    let noise = ReadoutNoise {
        noise_prob: cfg.qubit.noise_prob,
        signal_prob: cfg.qubit.signal_prob,
    };
    let specs: Vec<StateSpec> = if extra.is_empty() {
        cfg.qubit.states.clone()
    } else {
        extra.to_vec()
    };
    let mut rows = Vec::new();
    for s in &specs {
        let state = s.state()?;
        let q = resp.qubit(&state, (noise.noise_prob > 0.0).then_some(&noise))?;
        rows.push(QubitRow {
            state: s.label(),
            theta_deg: state.theta().to_degrees(),
            phi_deg: state.phi().to_degrees(),
            eta: q.eta_qubit,
            fidelity: q.fidelity,
            noise_weight: q.noise_weight,
            rho_out: q.rho_out,
        });
    }
    let report = QubitReport {
        eta_h: resp.h.efficiency,
        eta_v: resp.v.efficiency,
        likeness_h: resp.h.likeness,
        likeness_v: resp.v.likeness,
        mode_overlap: [resp.mode_overlap.re, resp.mode_overlap.im],
        states: rows,
    };
    io::write_json(&out.join("qubit.json"), &report)?;
    Ok(vec!["qubit.json".into()])
}

#[derive(Serialize)]
struct G2Report {
    model: CountModel,
    heralds: u64,
    seed: u64,
    g2: f64,
    sigma: f64,
    threshold: f64,
    threshold_crossing_us: Option<f64>,
}

pub fn cmd_g2(cfg: &RunConfig, out: &Path) -> Result<Vec<String>> {
    let model = cfg.count_model()?;
    let heralds = cfg.counts.heralds;
    let tally = simulate_counts(&model, heralds, cfg.seed)?;
    let est = g2_conditional(&tally)?;
    io::write_tally_csv(&out.join("tally.csv"), &tally)?;
    let noise = cfg.noise_schedule()?;
    let times: Vec<f64> = cfg.counts.storage_time_us.iter().map(|t| t * 1e-6).collect();
    let signal = cfg.signal_schedule()?;
    let curve = g2_vs_storage_time(&model, &times, &signal, &noise, heralds, cfg.seed)?;
    io::write_g2_curve_csv(&out.join("g2_curve.csv"), &curve)?;
    let half = cfg.decay()?.tau_b.map_or(100e-6, |tb| 3.0 * tb);
    let crossing = threshold_crossing(&model, &signal, &noise, cfg.counts.threshold, 0.0, half)?;
    io::write_json(
        &out.join("g2.json"),
        &G2Report {
            model,
            heralds,
            seed: cfg.seed,
            g2: est.g2,
            sigma: est.sigma,
            threshold: cfg.counts.threshold,
            threshold_crossing_us: crossing.map(|t| t * 1e6),
        },
    )?;
    Ok(vec!["tally.csv".into(), "g2_curve.csv".into(), "g2.json".into()])
}

#[derive(Serialize)]
struct TomographyReport {
    rho: DensityMatrix2,
    bloch: [f64; 3],
    purity: f64,
}

pub fn cmd_tomography(counts: &Path, out: &Path) -> Result<Vec<String>> {
    let c = io::read_counts_csv(counts)?;
    let rho = tomography(&c)?;
    io::write_json(
        &out.join("tomography.json"),
        &TomographyReport {
            bloch: rho.bloch(),
            purity: rho.purity(),
            rho,
        },
    )?;
    Ok(vec!["tomography.json".into()])
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Conservation, vacuum identity and analytic transmission on small grids.
pub fn run_checks() -> Result<Vec<CheckOutcome>> {
    let g = crate::model::GAMMA13_RB85;
    let mut out = Vec::new();

    let grid = TimeGrid::spanning(-600e-9, 600e-9, 0.5e-9)?;
    let input = ComplexWaveform::gaussian(grid, 0.0, 150e-9)?;
    let off = ControlSchedule::constant(0.0, grid.start(), grid.end())?;
    let vac = propagate(
        MediumParams::cold_rb85(1e-9)?,
        &off,
        &input,
        &SolverConfig::new(grid, 32),
    )?;
    let diff: Vec<C64> = vac
        .output
        .samples()
        .iter()
        .zip(input.samples())
        .map(|(a, b)| a - b)
        .collect();
    let l2 = ComplexWaveform::new(grid, diff)?.norm().sqrt();
    out.push(CheckOutcome {
        name: "vacuum identity",
        passed: l2 < 1e-6,
        detail: format!("L2 distance {l2:.3e}"),
    });

    let m = MediumParams::cold_rb85(100.0)?;
    let lossless = BlochCoefficients {
        coupling_rate: m.coupling_rate(),
        gamma13: 0.0,
        gamma12: 0.0,
    };
    let span = TimeGrid::spanning(-600e-9, 3000e-9, 0.4e-9)?;
    let pulse = ComplexWaveform::gaussian(span, 0.0, 150e-9)?;
    let opts = crate::protocol::StorageOptions::default();
    let (control, run_cfg) = storage_schedule(
        &m,
        6.0 * g,
        6.0 * g,
        500e-9,
        &pulse,
        &opts,
        &SolverConfig::new(span, 64),
    )?;
    let pulse = pulse.resampled(run_cfg.time_grid);
    let p = propagate(lossless, &control, &pulse, &run_cfg)?;
    let total = p.output.norm() + p.final_state.stored_excitation();
    let rel = (total - pulse.norm()).abs() / pulse.norm();
    out.push(CheckOutcome {
        name: "lossless conservation",
        passed: rel < 1e-6,
        detail: format!("relative drift {rel:.3e}"),
    });

    let m = MediumParams::cold_rb85(10.0)?;
    let omega = 2.0 * g;
    let cw_grid = TimeGrid::spanning(0.0, 4e-6, 0.4e-9)?;
    let on = ControlSchedule::constant(omega, cw_grid.start(), cw_grid.end())?;
    let mut worst: f64 = 0.0;
    for delta in [0.0, 0.25 * g, 1.0 * g] {
        let probe = ComplexWaveform::from_fn(cw_grid, |t| {
            let env = if t < 1e-6 {
                0.5 * (1.0 - (std::f64::consts::PI * t / 1e-6).cos())
            } else {
                1.0
            };
            C64::from_polar(env, -delta * t)
        })?;
        let o = propagate(m, &on, &probe, &SolverConfig::new(cw_grid, 64))?.output;
        let tail = &o.samples()[o.samples().len() - 250..];
        let sim = tail.iter().map(|s| s.norm_sqr()).sum::<f64>() / tail.len() as f64;
        let exact = eit::transmission(&m, omega, delta);
        worst = worst.max((sim - exact).abs() / exact);
    }
    out.push(CheckOutcome {
        name: "analytic transmission",
        passed: worst < 0.01,
        detail: format!("worst relative error {worst:.3e}"),
    });
    Ok(out)
}
