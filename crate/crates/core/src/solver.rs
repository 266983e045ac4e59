//! Maxwell-Bloch integrator for a single spatial channel.
//!
//! The probe envelope `E`, the optical coherence `P` (|1>-|3>) and the spin
//! wave `S` (|1>-|2>) obey, in the frame co-moving with light (retardation
//! `L/c` neglected) and on the normalized coordinate `zeta = z/L`:
//!
//! ```text
//! dE/dzeta = i sqrt(a) P
//! dP/dt    = -gamma13 P + i sqrt(a) E + (i/2) Omega(t) S
//! dS/dt    = -gamma12 S + (i/2) Omega(t) P
//! ```
//!
//! with `a = g^2 N L / (2c) = OD gamma13 / 2`. `P` and `S` are scaled so
//! that `integral_0^1 (|P|^2 + |S|^2) dzeta` is the excitation probability
//! held by the atoms; without decay the sum of that quantity and the photon
//! probability that has left the medium is conserved.
//!
//! `P` and `S` live at cell centers, `E` at cell faces. The field is
//! integrated along `zeta` with the midpoint rule, which keeps the discrete
//! light-matter exchange exactly conservative. Time stepping is explicit
//! Runge-Kutta (order 4, or order 2 for quick runs).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexWaveform, ControlSchedule, MediumParams, TimeGrid, C64};

/// Largest allowed `dt * max(gamma13, Omega_max)`.
pub const MAX_RATE_STEP: f64 = 0.1;

/// Largest allowed `dt * a` (the collective absorption rate). Beyond this the
/// explicit scheme leaves its stability region for the resonant modes.
pub const MAX_COUPLING_STEP: f64 = 2.5;

pub const MIN_SPATIAL_POINTS: usize = 16;

/// Rates entering the equations of motion.
///
/// Built from [`MediumParams`] for physical media. Constructing it directly
/// allows the lossless limit `gamma13 = gamma12 = 0`, which a `MediumParams`
/// cannot represent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochCoefficients {
    /// `g^2 N L / (2c)`, rad/s.
    pub coupling_rate: f64,
    pub gamma13: f64,
    pub gamma12: f64,
}

impl From<&MediumParams> for BlochCoefficients {
    fn from(m: &MediumParams) -> Self {
        Self {
            coupling_rate: m.coupling_rate(),
            gamma13: m.gamma13(),
            gamma12: m.gamma12(),
        }
    }
}

impl From<MediumParams> for BlochCoefficients {
    fn from(m: MediumParams) -> Self {
        (&m).into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum IntegratorOrder {
    Second,
    #[default]
    Fourth,
}

impl IntegratorOrder {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            2 => Ok(Self::Second),
            4 => Ok(Self::Fourth),
            o => Err(Error::SolverConfig(format!("integrator order must be 2 or 4, got {o}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub time_grid: TimeGrid,
    /// Number of spatial cells across the medium.
    pub spatial_points: usize,
    pub order: IntegratorOrder,
    /// Record a snapshot every this many steps (0 disables history).
    pub snapshot_every: usize,
}

impl SolverConfig {
    pub fn new(time_grid: TimeGrid, spatial_points: usize) -> Self {
        Self {
            time_grid,
            spatial_points,
            order: IntegratorOrder::Fourth,
            snapshot_every: 0,
        }
    }

    /// Same resolution over a different time span.
    pub fn with_span(&self, start: f64, end: f64) -> Result<Self> {
        Ok(Self {
            time_grid: TimeGrid::spanning(start, end, self.time_grid.step())?,
            ..*self
        })
    }

    /// Halves both the time step and the cell size.
    pub fn refined(&self) -> Self {
        Self {
            time_grid: self.time_grid.refined(2),
            spatial_points: self.spatial_points * 2,
            snapshot_every: self.snapshot_every * 2,
            ..*self
        }
    }

    pub fn validate(&self, coeffs: &BlochCoefficients, control: &ControlSchedule) -> Result<()> {
        if self.spatial_points < MIN_SPATIAL_POINTS {
            return Err(Error::SolverConfig(format!(
                "spatial_points must be >= {MIN_SPATIAL_POINTS}, got {}",
                self.spatial_points
            )));
        }
        let dt = self.time_grid.step();
        let fastest = coeffs.gamma13.max(control.max_omega());
        if dt * fastest > MAX_RATE_STEP {
            return Err(Error::SolverConfig(format!(
                "time step {dt:.3e} s does not resolve the fastest rate {fastest:.3e} rad/s \
                 (dt * rate = {:.3} > {MAX_RATE_STEP})",
                dt * fastest
            )));
        }
        if dt * coeffs.coupling_rate > MAX_COUPLING_STEP {
            return Err(Error::SolverConfig(format!(
                "time step {dt:.3e} s too coarse for the optical depth \
                 (dt * g^2 N L / 2c = {:.3} > {MAX_COUPLING_STEP})",
                dt * coeffs.coupling_rate
            )));
        }
        if !(coeffs.coupling_rate >= 0.0 && coeffs.gamma13 >= 0.0 && coeffs.gamma12 >= 0.0) {
            return Err(Error::SolverConfig("rates must be non-negative".into()));
        }
        Ok(())
    }
}

/// Field, optical coherence and spin wave across the medium at one time.
///
/// All three arrays are sampled at the cell centers `zeta = (j + 1/2)/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub time: f64,
    pub field: Vec<C64>,
    pub polarization: Vec<C64>,
    pub spinwave: Vec<C64>,
}

impl FieldState {
    pub fn cells(&self) -> usize {
        self.spinwave.len()
    }

    /// `integral_0^1 |S|^2 dzeta`.
    pub fn spinwave_population(&self) -> f64 {
        self.spinwave.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.cells() as f64
    }

    /// `integral_0^1 |P|^2 dzeta`.
    pub fn polarization_population(&self) -> f64 {
        self.polarization.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.cells() as f64
    }

    /// Excitation probability held by the atoms.
    pub fn stored_excitation(&self) -> f64 {
        self.spinwave_population() + self.polarization_population()
    }
}

/// Output of [`propagate`].
#[derive(Debug, Clone)]
pub struct Propagation {
    /// Envelope leaving the medium at `z = L`, on the solver time grid.
    pub output: ComplexWaveform,
    pub final_state: FieldState,
    pub history: Vec<FieldState>,
    /// State just before each kick, in the order they were applied.
    pub kick_states: Vec<FieldState>,
}

/// One-off manipulation of the atomic state at a given step. A factor of
/// one leaves the dynamics untouched and only records the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinWaveKick {
    /// Applied right after the state at this grid index has been computed.
    pub at_step: usize,
    pub factor: C64,
}

/// Integrates the system over `cfg.time_grid` with the boundary condition
/// `E(t, 0) = input(t)`, starting from an empty medium.
pub fn propagate(
    medium: impl Into<BlochCoefficients>,
    control: &ControlSchedule,
    input: &ComplexWaveform,
    cfg: &SolverConfig,
) -> Result<Propagation> {
    propagate_with_kicks(medium, control, input, cfg, &[])
}

/// [`propagate`] with spin-wave multipliers applied at chosen steps.
pub fn propagate_with_kicks(
    medium: impl Into<BlochCoefficients>,
    control: &ControlSchedule,
    input: &ComplexWaveform,
    cfg: &SolverConfig,
    kicks: &[SpinWaveKick],
) -> Result<Propagation> {
    let coeffs = medium.into();
    cfg.validate(&coeffs, control)?;
    let grid = cfg.time_grid;
    let mut stepper = Stepper::new(coeffs, cfg.spatial_points);
    let mut out = Vec::with_capacity(grid.count());
    let mut history = Vec::new();
    let mut kick_states = Vec::new();

    let dt = grid.step();
    out.push(stepper.output(input.sample_at(grid.time(0))));
    if cfg.snapshot_every > 0 {
        history.push(stepper.snapshot(grid.time(0), input.sample_at(grid.time(0))));
    }
    for k in 1..grid.count() {
        let t0 = grid.time(k - 1);
        match cfg.order {
            IntegratorOrder::Fourth => stepper.rk4(t0, dt, control, input),
            IntegratorOrder::Second => stepper.rk2(t0, dt, control, input),
        }
        let t1 = grid.time(k);
        let e_in = input.sample_at(t1);
        for kick in kicks.iter().filter(|kk| kk.at_step == k) {
            kick_states.push(stepper.snapshot(t1, e_in));
            stepper.s.iter_mut().for_each(|s| *s *= kick.factor);
        }
        let e_out = stepper.output(e_in);
        if !(e_out.re.is_finite() && e_out.im.is_finite()) || !stepper.is_finite() {
            return Err(Error::NumericalFailure {
                step: k,
                time: t1,
                reason: "non-finite field or atomic coherence".into(),
            });
        }
        out.push(e_out);
        if cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0 {
            history.push(stepper.snapshot(t1, e_in));
        }
    }
    let t_end = grid.end();
    let final_state = stepper.snapshot(t_end, input.sample_at(t_end));
    Ok(Propagation {
        output: ComplexWaveform::new(grid, out)?,
        final_state,
        history,
        kick_states,
    })
}

struct Stepper {
    coeffs: BlochCoefficients,
    sqrt_a: f64,
    h: f64,
    p: Vec<C64>,
    s: Vec<C64>,
    // RK stage buffers
    kp: [Vec<C64>; 4],
    ks: [Vec<C64>; 4],
    tp: Vec<C64>,
    ts: Vec<C64>,
}

impl Stepper {
    fn new(coeffs: BlochCoefficients, n: usize) -> Self {
        let z = || vec![C64::new(0.0, 0.0); n];
        Self {
            coeffs,
            sqrt_a: coeffs.coupling_rate.sqrt(),
            h: 1.0 / n as f64,
            p: z(),
            s: z(),
            kp: [z(), z(), z(), z()],
            ks: [z(), z(), z(), z()],
            tp: z(),
            ts: z(),
        }
    }

    fn is_finite(&self) -> bool {
        let sum: f64 = self
            .p
            .iter()
            .chain(self.s.iter())
            .map(|c| c.re.abs() + c.im.abs())
            .sum();
        sum.is_finite()
    }

    /// Field at the exit face for the current atomic state.
    fn output(&self, e_in: C64) -> C64 {
        let sum: C64 = self.p.iter().sum();
        e_in + C64::new(0.0, self.sqrt_a * self.h) * sum
    }

    fn snapshot(&self, time: f64, e_in: C64) -> FieldState {
        let step = C64::new(0.0, self.sqrt_a * self.h);
        let mut face = e_in;
        let field = self
            .p
            .iter()
            .map(|p| {
                let center = face + step * 0.5 * p;
                face += step * p;
                center
            })
            .collect();
        FieldState {
            time,
            field,
            polarization: self.p.clone(),
            spinwave: self.s.clone(),
        }
    }

    /// Time derivatives of (P, S) for the given state, control and input.
    fn rhs(&self, omega: f64, e_in: C64, p: &[C64], s: &[C64], dp: &mut [C64], ds: &mut [C64]) {
        let ia = C64::new(0.0, self.sqrt_a);
        let step = ia * self.h;
        let half_omega = C64::new(0.0, 0.5 * omega);
        let g13 = self.coeffs.gamma13;
        let g12 = self.coeffs.gamma12;
        let mut face = e_in;
        for j in 0..p.len() {
            let pj = p[j];
            let sj = s[j];
            let center = face + step * 0.5 * pj;
            face += step * pj;
            dp[j] = -g13 * pj + ia * center + half_omega * sj;
            ds[j] = -g12 * sj + half_omega * pj;
        }
    }

    fn rk4(&mut self, t0: f64, dt: f64, control: &ControlSchedule, input: &ComplexWaveform) {
        let n = self.p.len();
        let tm = t0 + 0.5 * dt;
        let t1 = t0 + dt;
        let (om0, omm, om1) = (control.evaluate(t0), control.evaluate(tm), control.evaluate(t1));
        let (e0, em, e1) = (input.sample_at(t0), input.sample_at(tm), input.sample_at(t1));

        let mut kp = std::mem::take(&mut self.kp);
        let mut ks = std::mem::take(&mut self.ks);
        let mut tp = std::mem::take(&mut self.tp);
        let mut ts = std::mem::take(&mut self.ts);

        self.rhs(om0, e0, &self.p, &self.s, &mut kp[0], &mut ks[0]);
        for j in 0..n {
            tp[j] = self.p[j] + kp[0][j] * (0.5 * dt);
            ts[j] = self.s[j] + ks[0][j] * (0.5 * dt);
        }
        self.rhs(omm, em, &tp, &ts, &mut kp[1], &mut ks[1]);
        for j in 0..n {
            tp[j] = self.p[j] + kp[1][j] * (0.5 * dt);
            ts[j] = self.s[j] + ks[1][j] * (0.5 * dt);
        }
        self.rhs(omm, em, &tp, &ts, &mut kp[2], &mut ks[2]);
        for j in 0..n {
            tp[j] = self.p[j] + kp[2][j] * dt;
            ts[j] = self.s[j] + ks[2][j] * dt;
        }
        self.rhs(om1, e1, &tp, &ts, &mut kp[3], &mut ks[3]);
        let w = dt / 6.0;
        for j in 0..n {
            self.p[j] += (kp[0][j] + kp[1][j] * 2.0 + kp[2][j] * 2.0 + kp[3][j]) * w;
            self.s[j] += (ks[0][j] + ks[1][j] * 2.0 + ks[2][j] * 2.0 + ks[3][j]) * w;
        }

        self.kp = kp;
        self.ks = ks;
        self.tp = tp;
        self.ts = ts;
    }

    /// Heun's method.
    fn rk2(&mut self, t0: f64, dt: f64, control: &ControlSchedule, input: &ComplexWaveform) {
        let n = self.p.len();
        let t1 = t0 + dt;
        let mut kp = std::mem::take(&mut self.kp);
        let mut ks = std::mem::take(&mut self.ks);
        let mut tp = std::mem::take(&mut self.tp);
        let mut ts = std::mem::take(&mut self.ts);

        self.rhs(
            control.evaluate(t0),
            input.sample_at(t0),
            &self.p,
            &self.s,
            &mut kp[0],
            &mut ks[0],
        );
        for j in 0..n {
            tp[j] = self.p[j] + kp[0][j] * dt;
            ts[j] = self.s[j] + ks[0][j] * dt;
        }
        self.rhs(
            control.evaluate(t1),
            input.sample_at(t1),
            &tp,
            &ts,
            &mut kp[1],
            &mut ks[1],
        );
        for j in 0..n {
            self.p[j] += (kp[0][j] + kp[1][j]) * (0.5 * dt);
            self.s[j] += (ks[0][j] + ks[1][j]) * (0.5 * dt);
        }

        self.kp = kp;
        self.ks = ks;
        self.tp = tp;
        self.ts = ts;
    }
}
