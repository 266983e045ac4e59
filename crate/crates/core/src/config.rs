//! Run configuration files.
//!
//! A config is sectioned `key = value` text (TOML syntax). Every section and
//! key is optional and falls back to the Table-1 operating point; unknown
//! keys are rejected. Units are part of the key name; Rabi frequencies and
//! `gamma12` are in units of `gamma13`.
//!
//! ```toml
//! scenario = "table1"
//! seed = 7
//! resolution = "standard"
//!
//! [medium]
//! od = 300
//!
//! [control]
//! omega = 10.2
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::counting::{CountModel, NoiseSchedule, SignalKind};
use crate::error::{Error, Result};
use crate::model::{ComplexWaveform, MediumParams, PolarizationState, RampShape, TimeGrid};
use crate::protocol::{DecayModel, DriftScenario, GaussianSearch, StorageOptions, SwitchTiming};
use crate::solver::SolverConfig;
use crate::source::{heralded_waveform, SourceParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Resolution {
    /// dt = 0.4 ns, 64 cells.
    Fast,
    /// dt = 0.25 ns, 128 cells.
    #[default]
    Standard,
    /// dt = 0.125 ns, 256 cells.
    Convergence,
}

impl Resolution {
    pub fn step(self) -> f64 {
        match self {
            Resolution::Fast => 0.4e-9,
            Resolution::Standard => 0.25e-9,
            Resolution::Convergence => 0.125e-9,
        }
    }

    pub fn spatial_points(self) -> usize {
        match self {
            Resolution::Fast => 64,
            Resolution::Standard => 128,
            Resolution::Convergence => 256,
        }
    }

    /// Resolution template; runs set their own time span.
    pub fn solver(self) -> SolverConfig {
        SolverConfig::new(
            TimeGrid::new(0.0, self.step(), 2).expect("valid template grid"),
            self.spatial_points(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediumSection {
    pub od: f64,
    /// gamma13 / 2 pi, MHz.
    pub gamma13_mhz: f64,
    /// gamma12 / gamma13.
    pub gamma12: f64,
    pub length_cm: f64,
}

impl Default for MediumSection {
    fn default() -> Self {
        Self {
            od: 300.0,
            gamma13_mhz: 3.0,
            gamma12: 0.0007,
            length_cm: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlSection {
    /// Write Rabi frequency / gamma13.
    pub omega: f64,
    /// Read Rabi frequency / gamma13; defaults to `omega`.
    pub omega_read: Option<f64>,
    pub ramp_ns: f64,
    pub shape: RampShape,
    /// Fall midpoint after the input peak; unset means half the group delay.
    pub switch_after_peak_ns: Option<f64>,
}

impl Default for ControlSection {
    fn default() -> Self {
        Self {
            omega: 10.2,
            omega_read: None,
            ramp_ns: 70.0,
            shape: RampShape::RaisedCosine,
            switch_after_peak_ns: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    #[default]
    Gaussian,
    Square,
    /// Heralded photon from a Gaussian-pumped source.
    Source,
    /// Waveform CSV (`tau_ns,re,im`).
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    pub kind: InputKind,
    /// Intensity FWHM for `gaussian` and `source`.
    pub fwhm_ns: f64,
    /// Length of a `square` pulse.
    pub duration_ns: f64,
    /// Pump 1/e^2 radius for `source`; overrides `fwhm_ns`.
    pub waist_mm: Option<f64>,
    pub path: Option<PathBuf>,
}

impl Default for InputSection {
    fn default() -> Self {
        Self {
            kind: InputKind::Gaussian,
            fwhm_ns: 150.0,
            duration_ns: 400.0,
            waist_mm: None,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StorageSection {
    /// Fully-off hold between the ramps.
    pub storage_time_us: f64,
    pub window_ns: f64,
}

impl Default for StorageSection {
    fn default() -> Self {
        Self {
            storage_time_us: 0.7,
            window_ns: 700.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySection {
    /// Storage time at which the efficiency has halved.
    pub half_time_us: f64,
    /// Explicit Gaussian decay time; overrides `half_time_us`.
    pub tau_b_us: Option<f64>,
    /// Turn the Gaussian term off (keeps gamma12).
    pub inhomogeneous: bool,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self {
            half_time_us: 15.0,
            tau_b_us: None,
            inhomogeneous: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransmissionSection {
    /// Full detuning span, MHz.
    pub span_mhz: f64,
    pub points: usize,
}

impl Default for TransmissionSection {
    fn default() -> Self {
        Self {
            span_mhz: 20.0,
            points: 801,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub od: Vec<f64>,
    pub storage_time_us: Vec<f64>,
    pub omega: Vec<f64>,
    /// Duty window length for the OD-drift comparison, ms.
    pub duration_ms: f64,
    /// OD at the end of the duty window over OD at its start.
    pub od_ratio: f64,
    /// Reference OD for the drift comparison.
    pub od_ref: f64,
    /// Control / gamma13 at `od_ref`; defaults to `control.omega`.
    pub omega_ref: Option<f64>,
    pub event_samples: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            od: vec![250.0, 300.0, 350.0, 400.0, 450.0, 500.0],
            storage_time_us: vec![0.7, 1.5, 3.0, 4.5, 6.0, 9.0, 12.0, 15.0],
            omega: vec![6.0, 8.0, 10.2, 12.0, 14.0],
            duration_ms: 0.3,
            od_ratio: 250.0 / 300.0,
            od_ref: 300.0,
            omega_ref: None,
            event_samples: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizeMethod {
    /// Grid search over Gaussian width and write timing.
    #[default]
    Gaussian,
    /// Iterated time reversal starting from the configured input.
    TimeReversal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    pub method: OptimizeMethod,
    pub max_iters: usize,
    pub tol: f64,
    pub fwhm_min_ns: f64,
    pub fwhm_max_ns: f64,
    pub coarse: usize,
    pub refinements: usize,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        let g = GaussianSearch::default();
        Self {
            method: OptimizeMethod::Gaussian,
            max_iters: 20,
            tol: 1e-4,
            fwhm_min_ns: g.fwhm.0 * 1e9,
            fwhm_max_ns: g.fwhm.1 * 1e9,
            coarse: g.coarse,
            refinements: g.refinements,
        }
    }
}

/// A polarization by name (`H V D A L R`) or as `[theta_deg, phi_deg]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Angles([f64; 2]),
}

impl StateSpec {
    pub fn label(&self) -> String {
        match self {
            StateSpec::Named(s) => s.to_ascii_uppercase(),
            StateSpec::Angles([t, p]) => format!("theta{t}_phi{p}"),
        }
    }

    pub fn state(&self) -> Result<PolarizationState> {
        match self {
            StateSpec::Named(s) => match s.to_ascii_uppercase().as_str() {
                "H" => Ok(PolarizationState::h()),
                "V" => Ok(PolarizationState::v()),
                "D" => Ok(PolarizationState::d()),
                "A" => Ok(PolarizationState::a()),
                "L" => Ok(PolarizationState::l()),
                "R" => Ok(PolarizationState::r()),
                o => Err(Error::param("states", format!("unknown state {o:?}"))),
            },
            StateSpec::Angles([t, p]) => PolarizationState::new(t.to_radians(), p.to_radians()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QubitSection {
    pub states: Vec<StateSpec>,
    /// Noise photon probability per herald.
    pub noise_prob: f64,
    /// Signal probability weighing the noise; defaults to the qubit efficiency.
    pub signal_prob: Option<f64>,
    pub relative_phase_deg: f64,
    /// V-rail OD; defaults to the H rail.
    pub od_v: Option<f64>,
    /// V-rail Rabi frequency / gamma13; defaults to the H rail.
    pub omega_v: Option<f64>,
}

impl Default for QubitSection {
    fn default() -> Self {
        Self {
            states: ["H", "V", "D", "L"]
                .iter()
                .map(|s| StateSpec::Named(s.to_string()))
                .collect(),
            noise_prob: 0.0,
            signal_prob: None,
            relative_phase_deg: 0.0,
            od_v: None,
            omega_v: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountsSection {
    pub heralds: u64,
    /// Signal probability at the first noise point.
    pub p_signal: f64,
    pub dark_rate: f64,
    pub window_ns: f64,
    pub detector_efficiency: f64,
    pub signal: SignalKind,
    pub two_photon_admixture: f64,
    pub storage_time_us: Vec<f64>,
    /// Noise schedule, `(storage time us, probability)` knots.
    pub noise_time_us: Vec<f64>,
    pub noise_prob: Vec<f64>,
    /// g2 level whose crossing time is reported.
    pub threshold: f64,
}

impl Default for CountsSection {
    fn default() -> Self {
        Self {
            heralds: 4_000_000,
            p_signal: 0.0331,
            dark_rate: 25.0,
            window_ns: 700.0,
            detector_efficiency: 1.0,
            signal: SignalKind::SinglePhoton,
            two_photon_admixture: 0.0,
            storage_time_us: vec![0.7, 3.0, 6.0],
            noise_time_us: vec![0.7, 3.0, 6.0],
            noise_prob: vec![0.0015, 0.0031, 0.0084],
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub resolution: Resolution,
    pub medium: MediumSection,
    pub control: ControlSection,
    pub input: InputSection,
    pub storage: StorageSection,
    pub decay: DecaySection,
    pub transmission: TransmissionSection,
    pub sweep: SweepSection,
    pub optimize: OptimizeSection,
    pub qubit: QubitSection,
    pub counts: CountsSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "default".into(),
            seed: 1,
            out: None,
            resolution: Resolution::Standard,
            medium: Default::default(),
            control: Default::default(),
            input: Default::default(),
            storage: Default::default(),
            decay: Default::default(),
            transmission: Default::default(),
            sweep: Default::default(),
            optimize: Default::default(),
            qubit: Default::default(),
            counts: Default::default(),
        }
    }
}

fn config_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(origin, e.to_string()))?;
        cfg.validate().map_err(|e| match e {
            Error::Config { .. } => e,
            other => config_err(origin, other.to_string()),
        })?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| config_err(&origin, e.to_string()))?;
        Self::parse(&text, &origin)
    }

    /// Builds every derived parameter once so that bad values surface
    /// before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.medium()?;
        self.decay()?;
        self.storage_options()?;
        self.count_model()?;
        self.noise_schedule()?;
        for s in &self.qubit.states {
            s.state()?;
        }
        if self.storage.storage_time_us < 0.0 {
            return Err(Error::param("storage.storage_time_us", "must be non-negative"));
        }
        if self.transmission.points < 2 || !(self.transmission.span_mhz > 0.0) {
            return Err(Error::param("transmission", "needs span_mhz > 0 and points >= 2"));
        }
        if self.input.kind == InputKind::File && self.input.path.is_none() {
            return Err(Error::param("input.path", "required for kind = \"file\""));
        }
        Ok(())
    }

    pub fn gamma13(&self) -> f64 {
        2.0 * PI * self.medium.gamma13_mhz * 1e6
    }

    pub fn medium(&self) -> Result<MediumParams> {
        let g = self.gamma13();
        MediumParams::from_od(
            self.medium.od,
            g,
            self.medium.gamma12 * g,
            self.medium.length_cm * 1e-2,
            1.0,
        )
    }

    pub fn omega(&self) -> f64 {
        self.control.omega * self.gamma13()
    }

    pub fn omega_read(&self) -> f64 {
        self.control.omega_read.unwrap_or(self.control.omega) * self.gamma13()
    }

    pub fn storage_time(&self) -> f64 {
        self.storage.storage_time_us * 1e-6
    }

    pub fn decay(&self) -> Result<DecayModel> {
        let gamma12 = self.medium.gamma12 * self.gamma13();
        if !self.decay.inhomogeneous {
            return DecayModel::new(gamma12, None);
        }
        match self.decay.tau_b_us {
            Some(tb) => DecayModel::new(gamma12, Some(tb * 1e-6)),
            None => DecayModel::calibrated(gamma12, self.decay.half_time_us * 1e-6),
        }
    }

    pub fn storage_options(&self) -> Result<StorageOptions> {
        if !(self.control.ramp_ns > 0.0 && self.storage.window_ns > 0.0) {
            return Err(Error::param("control.ramp_ns", "ramp and window must be positive"));
        }
        Ok(StorageOptions {
            timing: match self.control.switch_after_peak_ns {
                Some(dt) => SwitchTiming::AfterPeak(dt * 1e-9),
                None => SwitchTiming::HalfDelay,
            },
            ramp: self.control.ramp_ns * 1e-9,
            shape: self.control.shape,
            window: self.storage.window_ns * 1e-9,
        })
    }

    pub fn solver(&self) -> SolverConfig {
        self.resolution.solver()
    }

    /// Unit-norm input waveform on a grid wide enough for the window.
    pub fn input_waveform(&self) -> Result<ComplexWaveform> {
        let step = self.resolution.step();
        let window = self.storage.window_ns * 1e-9;
        let i = &self.input;
        match i.kind {
            InputKind::Gaussian => crate::protocol::gaussian_input(i.fwhm_ns * 1e-9, step, window),
            InputKind::Square => {
                let d = i.duration_ns * 1e-9;
                let half = (0.5 * window).max(d) + 100e-9;
                let grid = TimeGrid::spanning(-half, half, step)?;
                ComplexWaveform::square(grid, -0.5 * d, d)
            }
            InputKind::Source => {
                let vg = 2.0e4;
                let waist = match i.waist_mm {
                    Some(w) => w * 1e-3,
                    None => SourceParams::waist_for_fwhm(i.fwhm_ns * 1e-9, vg),
                };
                let src = SourceParams::with_gaussian_pump(waist)?;
                let (a, b) = src.emission_window();
                let half = a.abs().max(b).max(0.5 * window) + 100e-9;
                heralded_waveform(&src, TimeGrid::spanning(-half, half, step)?)
            }
            InputKind::File => {
                let path = i.path.as_ref().ok_or_else(|| Error::param("input.path", "missing"))?;
                let w = crate::io::read_waveform_csv(path)?;
                let g = w.grid();
                w.resampled(TimeGrid::spanning(g.start(), g.end(), step)?).normalized()
            }
        }
    }

    pub fn drift_scenario(&self) -> Result<DriftScenario> {
        let s = &self.sweep;
        if !(s.duration_ms > 0.0 && s.od_ratio > 0.0 && s.od_ref > 0.0) {
            return Err(Error::param(
                "sweep",
                "duration_ms, od_ratio and od_ref must be positive",
            ));
        }
        Ok(DriftScenario {
            duration: s.duration_ms * 1e-3,
            od_ratio: s.od_ratio,
            omega_ref: s.omega_ref.map_or(self.omega(), |w| w * self.gamma13()),
            od_ref: s.od_ref,
            storage_time: self.storage_time(),
            event_samples: s.event_samples,
            decay: self.decay()?,
        })
    }

    pub fn gaussian_search(&self) -> GaussianSearch {
        let o = &self.optimize;
        GaussianSearch {
            fwhm: (o.fwhm_min_ns * 1e-9, o.fwhm_max_ns * 1e-9),
            coarse: o.coarse,
            refinements: o.refinements,
            ..GaussianSearch::default()
        }
    }

    pub fn count_model(&self) -> Result<CountModel> {
        let c = &self.counts;
        let m = CountModel {
            p_signal: c.p_signal,
            p_noise: self
                .noise_schedule()?
                .at(self.counts.storage_time_us.first().copied().unwrap_or(0.7) * 1e-6),
            dark_rate: c.dark_rate,
            window: c.window_ns * 1e-9,
            detector_efficiency: c.detector_efficiency,
            signal: c.signal,
            two_photon_admixture: c.two_photon_admixture,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn noise_schedule(&self) -> Result<NoiseSchedule> {
        let c = &self.counts;
        if c.noise_time_us.len() != c.noise_prob.len() {
            return Err(Error::param(
                "counts.noise_prob",
                "needs one probability per noise_time_us entry",
            ));
        }
        NoiseSchedule::new(
            c.noise_time_us
                .iter()
                .map(|t| t * 1e-6)
                .zip(c.noise_prob.iter().copied())
                .collect(),
        )
    }

    /// Signal probability at storage time `t`: `counts.p_signal` at the
    /// first noise knot, scaled by the decay model.
    pub fn signal_schedule(&self) -> Result<impl Fn(f64) -> f64> {
        let decay = self.decay()?;
        let t_ref = self.counts.noise_time_us.first().copied().unwrap_or(0.7) * 1e-6;
        let p_ref = self.counts.p_signal;
        let f_ref = decay.efficiency_factor(t_ref);
        Ok(move |t: f64| (p_ref * decay.efficiency_factor(t) / f_ref).min(1.0))
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_table1_point() {
        let c = RunConfig::parse("", "<mem>").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.medium().unwrap().od(), 300.0);
        assert!((c.omega() - 10.2 * crate::model::GAMMA13_RB85).abs() < 1e-6);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = RunConfig::parse("[medium]\nod = 300\nodd = 1\n", "x.cfg").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("x.cfg") && msg.contains("odd") && msg.contains("line 3"),
            "{msg}"
        );
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn invalid_values_name_the_field() {
        let err = RunConfig::parse("[medium]\nod = -1\n", "x.cfg").unwrap_err();
        assert!(err.to_string().contains("od"), "{err}");
        let err = RunConfig::parse("[counts]\nnoise_time_us = [1.0]\n", "x.cfg").unwrap_err();
        assert!(err.to_string().contains("noise_prob"), "{err}");
    }

    #[test]
    fn states_by_name_or_angle() {
        let c = RunConfig::parse("[qubit]\nstates = [\"d\", [90.0, 90.0]]\n", "x").unwrap();
        let l = c.qubit.states[1].state().unwrap();
        let [_, b] = l.amplitudes();
        assert!((b.im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.content_hash(), b.content_hash());
        b.seed = 2;
        assert_ne!(a.content_hash(), b.content_hash());
    }
}
