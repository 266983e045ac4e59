//! Heralded coincidence counting behind a 50/50 beam splitter and the
//! conditional autocorrelation `g2 = N_GTR N_G / (N_GT N_GR)`.
//!
//! Monte Carlo runs in fixed blocks of heralds. Block `k` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `k`, so a tally
//! depends only on `(model, heralds, seed)`, never on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{BasisCounts, DensityMatrix2};

/// Heralds simulated per RNG stream.
pub const BLOCK: u64 = 1 << 16;

/// Photon-number statistics of the retrieved signal, per herald.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    /// One photon with probability `p_signal`.
    #[default]
    SinglePhoton,
    /// Poisson photon number with mean `p_signal` (coherent light).
    Coherent,
    /// Exactly two photons with probability `p_signal`.
    TwoPhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountModel {
    pub p_signal: f64,
    /// Mean number of (Poissonian, unpolarized) noise photons per herald.
    pub p_noise: f64,
    /// Dark counts per second per detector.
    pub dark_rate: f64,
    /// Coincidence window, s.
    pub window: f64,
    pub detector_efficiency: f64,
    pub signal: SignalKind,
    /// Share of single-photon signal events that carry a second photon.
    pub two_photon_admixture: f64,
}

impl Default for CountModel {
    fn default() -> Self {
        Self {
            p_signal: 0.0331,
            p_noise: 0.0015,
            dark_rate: 25.0,
            window: 700e-9,
            detector_efficiency: 1.0,
            signal: SignalKind::SinglePhoton,
            two_photon_admixture: 0.0,
        }
    }
}

impl CountModel {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &'static str, x: f64| -> Result<()> {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::param(name, format!("must lie in [0, 1], got {x}")))
            }
        };
        match self.signal {
            SignalKind::Coherent if !(self.p_signal >= 0.0 && self.p_signal.is_finite()) => {
                return Err(Error::param("p_signal", "mean photon number must be non-negative"))
            }
            SignalKind::Coherent => {}
            _ => unit("p_signal", self.p_signal)?,
        }
        if !(self.p_noise >= 0.0 && self.p_noise.is_finite()) {
            return Err(Error::param("p_noise", "must be non-negative"));
        }
        unit("detector_efficiency", self.detector_efficiency)?;
        unit("two_photon_admixture", self.two_photon_admixture)?;
        if !(self.window > 0.0) {
            return Err(Error::param("window", "must be positive"));
        }
        if !(self.dark_rate >= 0.0) {
            return Err(Error::param("dark_rate", "must be non-negative"));
        }
        Ok(())
    }

    /// Mean dark counts per detector per window.
    pub fn dark_mean(&self) -> f64 {
        self.dark_rate * self.window
    }

    /// `E[x^n]` over the signal photon number `n`.
    fn signal_generating(&self, x: f64) -> f64 {
        let p = self.p_signal;
        match self.signal {
            SignalKind::SinglePhoton => {
                let f = self.two_photon_admixture;
                1.0 - p + p * (1.0 - f) * x + p * f * x * x
            }
            SignalKind::Coherent => (-p * (1.0 - x)).exp(),
            SignalKind::TwoPhoton => 1.0 - p + p * x * x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoincidenceTally {
    pub n_g: u64,
    pub n_gt: u64,
    pub n_gr: u64,
    pub n_gtr: u64,
}

impl CoincidenceTally {
    pub fn merge(self, o: Self) -> Self {
        Self {
            n_g: self.n_g + o.n_g,
            n_gt: self.n_gt + o.n_gt,
            n_gr: self.n_gr + o.n_gr,
            n_gtr: self.n_gtr + o.n_gtr,
        }
    }

    pub fn is_ordered(&self) -> bool {
        self.n_gtr <= self.n_gt.min(self.n_gr) && self.n_gt.max(self.n_gr) <= self.n_g
    }
}

struct Samplers {
    noise: Option<Poisson<f64>>,
    dark: Option<Poisson<f64>>,
    coherent: Option<Poisson<f64>>,
}

fn poisson(mean: f64) -> Option<Poisson<f64>> {
    (mean > 0.0).then(|| Poisson::new(mean).expect("positive finite mean"))
}

fn simulate_block(m: &CountModel, s: &Samplers, seed: u64, block: u64, heralds: u64) -> CoincidenceTally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let draw = |d: &Option<Poisson<f64>>, rng: &mut ChaCha8Rng| d.as_ref().map_or(0, |d| d.sample(rng) as u64);
    let mut t = CoincidenceTally {
        n_g: heralds,
        ..Default::default()
    };
    for _ in 0..heralds {
        let signal = match m.signal {
            SignalKind::SinglePhoton => {
                if rng.gen::<f64>() < m.p_signal {
                    if m.two_photon_admixture > 0.0 && rng.gen::<f64>() < m.two_photon_admixture {
                        2
                    } else {
                        1
                    }
                } else {
                    0
                }
            }
            SignalKind::Coherent => draw(&s.coherent, &mut rng),
            SignalKind::TwoPhoton => {
                if rng.gen::<f64>() < m.p_signal {
                    2
                } else {
                    0
                }
            }
        };
        let photons = signal + draw(&s.noise, &mut rng);
        let (mut clicks_t, mut clicks_r) = (draw(&s.dark, &mut rng), draw(&s.dark, &mut rng));
        for _ in 0..photons {
            let to_t = rng.gen::<bool>();
            if rng.gen::<f64>() < m.detector_efficiency {
                if to_t {
                    clicks_t += 1;
                } else {
                    clicks_r += 1;
                }
            }
        }
        let (ct, cr) = (clicks_t > 0, clicks_r > 0);
        t.n_gt += ct as u64;
        t.n_gr += cr as u64;
        t.n_gtr += (ct && cr) as u64;
    }
    t
}

/// Seeded Monte Carlo of `heralds` heralded trials.
pub fn simulate_counts(model: &CountModel, heralds: u64, seed: u64) -> Result<CoincidenceTally> {
    model.validate()?;
    if heralds == 0 {
        return Err(Error::param("heralds", "must be positive"));
    }
    let samplers = Samplers {
        noise: poisson(model.p_noise),
        dark: poisson(model.dark_mean()),
        coherent: poisson(model.p_signal),
    };
    let blocks = heralds.div_ceil(BLOCK);
    Ok((0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK.min(heralds - b * BLOCK);
            simulate_block(model, &samplers, seed, b, n)
        })
        .reduce(CoincidenceTally::default, CoincidenceTally::merge))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G2Estimate {
    pub g2: f64,
    /// One standard error from Poisson propagation of the three counts.
    pub sigma: f64,
}

/// `N_GTR N_G / (N_GT N_GR)` with standard error
/// `g2 sqrt(1/N_GTR + 1/N_GT + 1/N_GR)`. With no threefold coincidences
/// the error is that of a single count.
pub fn g2_conditional(t: &CoincidenceTally) -> Result<G2Estimate> {
    if t.n_gt == 0 || t.n_gr == 0 {
        return Err(Error::UndefinedEstimate(format!(
            "g2 needs N_GT > 0 and N_GR > 0 (got {} and {})",
            t.n_gt, t.n_gr
        )));
    }
    let scale = t.n_g as f64 / (t.n_gt as f64 * t.n_gr as f64);
    let g2 = t.n_gtr as f64 * scale;
    let sigma = if t.n_gtr == 0 {
        scale
    } else {
        g2 * (1.0 / t.n_gtr as f64 + 1.0 / t.n_gt as f64 + 1.0 / t.n_gr as f64).sqrt()
    };
    Ok(G2Estimate { g2, sigma })
}

/// Per-herald click probabilities from exact enumeration of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickProbabilities {
    /// P(T clicks) = P(R clicks).
    pub single: f64,
    /// P(T and R click).
    pub coincidence: f64,
}

/// Each photon reaches a given detector and is registered with
/// probability `eta/2`; noise and dark counts are independent Poisson
/// processes per arm. With `q` the per-arm probability of no noise or dark
/// click and `G(x) = E[x^n]` over the signal photon number:
///
/// ```text
/// P(no T)        = q   G(1 - eta/2)
/// P(no T, no R)  = q^2 G(1 - eta)
/// ```
pub fn click_probabilities(m: &CountModel) -> Result<ClickProbabilities> {
    m.validate()?;
    let eta = m.detector_efficiency;
    let q = (-(0.5 * m.p_noise * eta + m.dark_mean())).exp();
    let none_t = q * m.signal_generating(1.0 - 0.5 * eta);
    let none_both = q * q * m.signal_generating(1.0 - eta);
    Ok(ClickProbabilities {
        single: 1.0 - none_t,
        coincidence: 1.0 - 2.0 * none_t + none_both,
    })
}

/// Large-sample limit of the estimator.
pub fn g2_analytic(m: &CountModel) -> Result<f64> {
    let p = click_probabilities(m)?;
    if !(p.single > 0.0) {
        return Err(Error::UndefinedEstimate("no clicks expected".into()));
    }
    Ok(p.coincidence / (p.single * p.single))
}

/// Piecewise-linear probability schedule against storage time, extended
/// linearly past both ends and clamped at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSchedule {
    /// `(storage time s, probability)`, strictly increasing in time.
    pub points: Vec<(f64, f64)>,
}

impl NoiseSchedule {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::param("points", "need at least two schedule points"));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::param("points", "times must increase strictly"));
        }
        Ok(Self { points })
    }

    /// Readout noise measured at 0.7, 3 and 6 us.
    pub fn measured() -> Self {
        Self::new(vec![(0.7e-6, 0.0015), (3e-6, 0.0031), (6e-6, 0.0084)]).expect("valid points")
    }

    pub fn at(&self, t: f64) -> f64 {
        let p = &self.points;
        let k = p.partition_point(|q| q.0 <= t).clamp(1, p.len() - 1);
        let (a, b) = (p[k - 1], p[k]);
        (a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G2Point {
    pub storage_time: f64,
    pub p_signal: f64,
    pub p_noise: f64,
    pub g2: f64,
    pub sigma: f64,
    pub g2_analytic: f64,
}

/// Monte Carlo g2 at each storage time with `p_signal(t)` and `p_noise(t)`
/// substituted into `base`. Point `i` uses seed `seed + i`.
pub fn g2_vs_storage_time(
    base: &CountModel,
    storage_times: &[f64],
    p_signal: impl Fn(f64) -> f64,
    noise: &NoiseSchedule,
    heralds: u64,
    seed: u64,
) -> Result<Vec<G2Point>> {
    storage_times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let m = CountModel {
                p_signal: p_signal(t),
                p_noise: noise.at(t),
                ..*base
            };
            let est = g2_conditional(&simulate_counts(&m, heralds, seed.wrapping_add(i as u64))?)?;
            Ok(G2Point {
                storage_time: t,
                p_signal: m.p_signal,
                p_noise: m.p_noise,
                g2: est.g2,
                sigma: est.sigma,
                g2_analytic: g2_analytic(&m)?,
            })
        })
        .collect()
}

/// First storage time in `[lo, hi]` at which the analytic g2 reaches
/// `level`, by bisection; `None` if it stays below.
pub fn threshold_crossing(
    base: &CountModel,
    p_signal: impl Fn(f64) -> f64,
    noise: &NoiseSchedule,
    level: f64,
    lo: f64,
    hi: f64,
) -> Result<Option<f64>> {
    let g = |t: f64| -> Result<f64> {
        g2_analytic(&CountModel {
            p_signal: p_signal(t),
            p_noise: noise.at(t),
            ..*base
        })
    };
    if g(lo)? >= level {
        return Ok(Some(lo));
    }
    // bracket the first crossing on a coarse scan, then bisect
    let steps = 200;
    let mut a = lo;
    for k in 1..=steps {
        let b = lo + (hi - lo) * k as f64 / steps as f64;
        if g(b)? >= level {
            let (mut x0, mut x1) = (a, b);
            for _ in 0..100 {
                let mid = 0.5 * (x0 + x1);
                if g(mid)? >= level {
                    x1 = mid;
                } else {
                    x0 = mid;
                }
            }
            return Ok(Some(0.5 * (x0 + x1)));
        }
        a = b;
    }
    Ok(None)
}

/// Binomial projective counts for `shots` trials in each basis.
pub fn sample_projective_counts(rho: &DensityMatrix2, shots: u64, seed: u64) -> BasisCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = rho.projection_probabilities();
    let mut draw = |q: f64| {
        let k = Binomial::new(shots, q.clamp(0.0, 1.0))
            .expect("probability in [0, 1]")
            .sample(&mut rng);
        (k as f64, (shots - k) as f64)
    };
    let (h, v) = draw(p[0]);
    let (d, a) = draw(p[2]);
    let (l, r) = draw(p[4]);
    BasisCounts { h, v, d, a, l, r }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal() -> CountModel {
        CountModel {
            p_signal: 1.0,
            p_noise: 0.0,
            dark_rate: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn single_photon_never_splits() {
        let t = simulate_counts(&ideal(), 100_000, 1).unwrap();
        assert_eq!(t.n_gtr, 0);
        assert_eq!(t.n_gt + t.n_gr, 100_000);
        assert_eq!(g2_conditional(&t).unwrap().g2, 0.0);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let m = CountModel::default();
        let a = simulate_counts(&m, 200_000, 42).unwrap();
        let b = simulate_counts(&m, 200_000, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.is_ordered());
        assert_ne!(a, simulate_counts(&m, 200_000, 43).unwrap());
    }

    #[test]
    fn estimator_example() {
        let t = CoincidenceTally {
            n_g: 1_000_000,
            n_gt: 10_000,
            n_gr: 10_000,
            n_gtr: 0,
        };
        assert_eq!(g2_conditional(&t).unwrap().g2, 0.0);
        let bad = CoincidenceTally { n_gt: 0, ..t };
        assert!(matches!(g2_conditional(&bad), Err(Error::UndefinedEstimate(_))));
    }

    #[test]
    fn coherent_light_is_exactly_one() {
        let m = CountModel {
            signal: SignalKind::Coherent,
            p_signal: 0.3,
            detector_efficiency: 0.6,
            ..Default::default()
        };
        assert!((g2_analytic(&m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_against_brute_force_sum() {
        // independent oracle: explicit sum over signal, noise and dark
        // photon numbers with binomial routing
        let m = CountModel {
            p_signal: 0.2,
            p_noise: 0.3,
            dark_rate: 2e5,
            window: 1e-6,
            detector_efficiency: 0.7,
            two_photon_admixture: 0.25,
            ..Default::default()
        };
        let pois = |mu: f64, k: u32| (-mu).exp() * mu.powi(k as i32) / (1..=k).map(f64::from).product::<f64>();
        let sig = [1.0 - m.p_signal, m.p_signal * 0.75, m.p_signal * 0.25];
        let eta = m.detector_efficiency;
        let (mut pt, mut ptr) = (0.0, 0.0);
        for (s, ps) in sig.iter().enumerate() {
            for k in 0..25u32 {
                let n = s as u32 + k;
                let pn = ps * pois(m.p_noise, k);
                // each photon: T-detected eta/2, R-detected eta/2, lost 1-eta
                let mut dist = vec![vec![0.0; n as usize + 1]; n as usize + 1];
                dist[0][0] = 1.0;
                for _ in 0..n {
                    let mut next = vec![vec![0.0; n as usize + 1]; n as usize + 1];
                    for a in 0..=n as usize {
                        for b in 0..=n as usize {
                            let p = dist[a][b];
                            if p == 0.0 {
                                continue;
                            }
                            next[a][b] += p * (1.0 - eta);
                            if a < n as usize {
                                next[a + 1][b] += p * eta / 2.0;
                            }
                            if b < n as usize {
                                next[a][b + 1] += p * eta / 2.0;
                            }
                        }
                    }
                    dist = next;
                }
                let dark0 = (-m.dark_mean()).exp();
                for a in 0..=n as usize {
                    for b in 0..=n as usize {
                        let p = pn * dist[a][b];
                        let t_click = if a > 0 { 1.0 } else { 1.0 - dark0 };
                        let r_click = if b > 0 { 1.0 } else { 1.0 - dark0 };
                        pt += p * t_click;
                        ptr += p * t_click * r_click;
                    }
                }
            }
        }
        let c = click_probabilities(&m).unwrap();
        assert!((c.single - pt).abs() < 1e-12, "{} vs {pt}", c.single);
        assert!((c.coincidence - ptr).abs() < 1e-12, "{} vs {ptr}", c.coincidence);
    }

    #[test]
    fn schedule_interpolates_and_extrapolates() {
        let s = NoiseSchedule::measured();
        assert!((s.at(3e-6) - 0.0031).abs() < 1e-15);
        assert!((s.at(4.5e-6) - 0.00575).abs() < 1e-12);
        let slope = (0.0084 - 0.0031) / 3e-6;
        assert!((s.at(7e-6) - (0.0084 + slope * 1e-6)).abs() < 1e-12);
        assert_eq!(s.at(0.0), 0.0015 - 0.7e-6 * (0.0016 / 2.3e-6));
        assert!(NoiseSchedule::new(vec![(1.0, 0.1)]).is_err());
    }

    #[test]
    fn projective_sampling_is_seeded() {
        let rho = DensityMatrix2::maximally_mixed();
        let a = sample_projective_counts(&rho, 10_000, 5);
        assert_eq!(a, sample_projective_counts(&rho, 10_000, 5));
        assert_eq!(a.h + a.v, 10_000.0);
    }
}
