use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    efficiency, gaussian_input, likeness, run_storage, store_and_retrieve, DecayModel, DutyWindowModel, StorageOptions,
    StorageResult, SwitchTiming,
};
use crate::eit;
use crate::error::{Error, Result};
use crate::model::{ComplexWaveform, ControlSchedule, MediumParams};
use crate::solver::SolverConfig;

/// Grid search over Gaussian width and switch-off time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSearch {
    /// Intensity FWHM bounds, s.
    pub fwhm: (f64, f64),
    /// Fall midpoint after the input peak, in units of the group delay.
    pub switch_after_peak: (f64, f64),
    /// Points per axis of the first pass.
    pub coarse: usize,
    /// Zoom passes of 5 x 5 around the incumbent, each halving the spacing.
    pub refinements: usize,
}

impl Default for GaussianSearch {
    fn default() -> Self {
        Self {
            fwhm: (60e-9, 300e-9),
            switch_after_peak: (0.0, 1.0),
            coarse: 7,
            refinements: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianOptimum {
    pub fwhm: f64,
    /// Fall midpoint after the input peak, s.
    pub switch_after_peak: f64,
    pub efficiency: f64,
    pub evaluations: usize,
    pub result: StorageResult,
}

/// Best Gaussian input and write timing for a fixed medium, control level
/// and storage time.
pub fn optimize_gaussian(
    medium: &MediumParams,
    omega: f64,
    storage_time: f64,
    search: &GaussianSearch,
    opts: &StorageOptions,
    cfg: &SolverConfig,
) -> Result<GaussianOptimum> {
    if search.coarse < 2 || !(search.fwhm.0 > 0.0 && search.fwhm.1 > search.fwhm.0) {
        return Err(Error::param(
            "search",
            "needs a positive, non-empty width range and >= 2 points",
        ));
    }
    let delay = eit::group_delay(medium, omega)?;
    let duty = DutyWindowModel::frozen(storage_time.max(1e-6), medium.od(), omega)?;
    let decay = DecayModel::new(medium.gamma12(), None)?;
    let dt = cfg.time_grid.step();
    let eval = |fwhm: f64, after: f64| -> Result<StorageResult> {
        let input = gaussian_input(fwhm, dt, opts.window)?;
        let o = StorageOptions {
            timing: SwitchTiming::AfterPeak(after),
            ..*opts
        };
        run_storage(medium, &duty, &decay, 0.0, storage_time, &input, &o, cfg)
    };

    let (w_lo, w_hi) = search.fwhm;
    let (s_lo, s_hi) = (search.switch_after_peak.0 * delay, search.switch_after_peak.1 * delay);
    let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let mut widths = lin(w_lo, w_hi, search.coarse);
    let mut offsets = lin(s_lo, s_hi, search.coarse);
    let mut dw = (w_hi - w_lo) / (search.coarse - 1) as f64;
    let mut ds = (s_hi - s_lo) / (search.coarse - 1) as f64;
    let mut best: Option<(f64, f64, StorageResult)> = None;
    let mut evaluations = 0;

    for pass in 0..=search.refinements {
        if pass > 0 {
            let (bw, bs, _) = best.as_ref().expect("first pass sets an incumbent");
            dw *= 0.5;
            ds *= 0.5;
            widths = (-2..=2)
                .map(|k| bw + k as f64 * dw)
                .filter(|w| *w >= w_lo && *w <= w_hi)
                .collect();
            offsets = (-2..=2)
                .map(|k| bs + k as f64 * ds)
                .filter(|s| *s >= s_lo && *s <= s_hi)
                .collect();
        }
        let points: Vec<(f64, f64)> = widths
            .iter()
            .flat_map(|&w| offsets.iter().map(move |&s| (w, s)))
            .collect();
        evaluations += points.len();
        let results = points
            .par_iter()
            .map(|&(w, s)| eval(w, s).map(|r| (w, s, r)))
            .collect::<Result<Vec<_>>>()?;
        for (w, s, r) in results {
            if best.as_ref().is_none_or(|b| r.efficiency > b.2.efficiency) {
                best = Some((w, s, r));
            }
        }
    }
    let (fwhm, switch_after_peak, result) = best.expect("at least one evaluation");
    Ok(GaussianOptimum {
        fwhm,
        switch_after_peak,
        efficiency: result.efficiency,
        evaluations,
        result,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveformOptimum {
    /// Input achieving the best efficiency seen, unit norm, on the solver grid.
    pub waveform: ComplexWaveform,
    pub efficiency: f64,
    /// Efficiency of every input tried, in order.
    pub history: Vec<f64>,
    /// Two successive inputs scored within `tol` of each other.
    pub converged: bool,
}

/// Iterative time reversal: store the current input, read it out, and use
/// the time-reversed, conjugated, renormalized output as the next input.
///
/// Time is reversed about the middle of the off-window, which maps read-on
/// onto the end of the write. Stops when two successive efficiencies agree
/// within `tol`, or when an iteration loses more than `tol`; either way the
/// best input seen is returned.
pub fn optimize_input_waveform(
    medium: &MediumParams,
    control: &ControlSchedule,
    initial_guess: &ComplexWaveform,
    cfg: &SolverConfig,
    max_iters: usize,
    tol: f64,
    window: f64,
) -> Result<WaveformOptimum> {
    let w = control
        .off_window()?
        .ok_or_else(|| Error::Schedule("optimization needs a control schedule with an off-window".into()))?;
    let pivot = 0.5 * (w.off_start + w.read_on);
    let grid = cfg.time_grid;
    let mut current = initial_guess.resampled(grid).normalized()?;
    let mut history: Vec<f64> = Vec::new();
    let mut best: Option<(ComplexWaveform, f64)> = None;
    let mut converged = false;

    for _ in 0..max_iters.max(1) {
        let run = store_and_retrieve(medium, control, &current, cfg)?;
        let eta = efficiency(&current, &run.retrieved, window)?;
        let prev = history.last().copied();
        history.push(eta);
        if best.as_ref().is_none_or(|b| eta > b.1) {
            best = Some((current.clone(), eta));
        }
        if let Some(p) = prev {
            if (eta - p).abs() < tol {
                converged = true;
                break;
            }
            if eta < p - tol {
                break;
            }
        }
        if run.retrieved.norm() == 0.0 {
            break;
        }
        current = run.retrieved.time_reversed(pivot).resampled(grid).normalized()?;
    }
    let (waveform, efficiency) = best.expect("at least one iteration");
    Ok(WaveformOptimum {
        waveform,
        efficiency,
        history,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub center: f64,
    /// Intensity FWHM, s.
    pub fwhm: f64,
    pub likeness: f64,
}

/// Real Gaussian with the best likeness to `w`, starting from the moments
/// of `|w|^2` and polishing the width by golden-section search.
pub fn fit_gaussian(w: &ComplexWaveform) -> Result<GaussianFit> {
    let n = w.norm();
    if !(n > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let grid = *w.grid();
    let (mut m1, mut m2) = (0.0, 0.0);
    for (t, s) in grid.times().zip(w.samples()) {
        m1 += t * s.norm_sqr();
        m2 += t * t * s.norm_sqr();
    }
    let total: f64 = w.samples().iter().map(|s| s.norm_sqr()).sum();
    let center = m1 / total;
    let sigma = (m2 / total - center * center).max(0.0).sqrt();
    let fwhm0 = (sigma * 2.0 * (2.0 * std::f64::consts::LN_2).sqrt()).max(2.0 * grid.step());
    let score = |f: f64| -> f64 {
        ComplexWaveform::gaussian(grid, center, f)
            .and_then(|g| likeness(&g, w))
            .unwrap_or(0.0)
    };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.3 * fwhm0, 2.0 * fwhm0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (score(c), score(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = score(d);
        }
        if (b - a) < 1e-6 * fwhm0 {
            break;
        }
    }
    let fwhm = 0.5 * (a + b);
    Ok(GaussianFit {
        center,
        fwhm,
        likeness: score(fwhm),
    })
}
