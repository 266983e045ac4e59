use serde::{Deserialize, Serialize};

use super::{TimeGrid, C64};
use crate::error::{Error, Result};

/// Complex temporal envelope `psi(tau)` sampled on a uniform grid.
///
/// Samples are in s^(-1/2): `integral |psi|^2 dtau` is a photon probability.
/// Outside its grid a waveform evaluates to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexWaveform {
    grid: TimeGrid,
    samples: Vec<C64>,
}

/// Trapezoidal quadrature of `integral |psi|^2 dtau`.
pub fn waveform_norm(w: &ComplexWaveform) -> f64 {
    w.norm()
}

impl ComplexWaveform {
    pub fn new(grid: TimeGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.count() {
            return Err(Error::param(
                "samples",
                format!("length {} does not match grid count {}", samples.len(), grid.count()),
            ));
        }
        if let Some(i) = samples.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::param("samples", format!("non-finite sample at index {i}")));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            samples: vec![C64::new(0.0, 0.0); grid.count()],
        }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let samples = grid.times().map(f).collect();
        Self::new(grid, samples)
    }

    /// Unit-norm Gaussian whose intensity FWHM is `fwhm`, centered at `center`.
    pub fn gaussian(grid: TimeGrid, center: f64, fwhm: f64) -> Result<Self> {
        if !(fwhm > 0.0) {
            return Err(Error::param("fwhm", "must be positive"));
        }
        // |psi|^2 ~ exp(-4 ln2 (t - t0)^2 / fwhm^2)
        let a = 2.0 * std::f64::consts::LN_2 / (fwhm * fwhm);
        let w = Self::from_fn(grid, |t| C64::new((-a * (t - center).powi(2)).exp(), 0.0))?;
        w.normalized()
    }

    /// Unit-norm flat-top pulse on `[start, start + duration]`.
    pub fn square(grid: TimeGrid, start: f64, duration: f64) -> Result<Self> {
        let w = Self::from_fn(grid, |t| {
            if t >= start && t <= start + duration {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })?;
        w.normalized()
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn norm(&self) -> f64 {
        let n = self.samples.len();
        let inner: f64 = self.samples[1..n - 1].iter().map(|s| s.norm_sqr()).sum();
        let ends = 0.5 * (self.samples[0].norm_sqr() + self.samples[n - 1].norm_sqr());
        (inner + ends) * self.grid.step()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|s| s * c).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// Time of maximum intensity, refined by a parabola through the three
    /// samples around the discrete maximum.
    pub fn peak_time(&self) -> f64 {
        let (k, _) = self
            .samples
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| {
                let v = s.norm_sqr();
                if v > acc.1 {
                    (i, v)
                } else {
                    acc
                }
            });
        let t = self.grid.time(k);
        if k == 0 || k + 1 >= self.samples.len() {
            return t;
        }
        let (y0, y1, y2) = (
            self.samples[k - 1].norm_sqr(),
            self.samples[k].norm_sqr(),
            self.samples[k + 1].norm_sqr(),
        );
        let denom = y0 - 2.0 * y1 + y2;
        if denom.abs() < f64::MIN_POSITIVE {
            return t;
        }
        let offset = 0.5 * (y0 - y2) / denom;
        t + offset.clamp(-0.5, 0.5) * self.grid.step()
    }

    /// Cubic (four-point Lagrange) interpolation; zero outside the grid.
    pub fn sample_at(&self, t: f64) -> C64 {
        let zero = C64::new(0.0, 0.0);
        if !self.grid.contains(t) {
            return zero;
        }
        let n = self.samples.len();
        let x = ((t - self.grid.start()) / self.grid.step()).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        let f = x - i as f64;
        if f == 0.0 {
            return self.samples[i];
        }
        if i == 0 || i + 2 >= n {
            return self.samples[i] * (1.0 - f) + self.samples[i + 1] * f;
        }
        let (p0, p1, p2, p3) = (
            self.samples[i - 1],
            self.samples[i],
            self.samples[i + 1],
            self.samples[i + 2],
        );
        let w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
        let w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
        let w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
        let w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
        p0 * w0 + p1 * w1 + p2 * w2 + p3 * w3
    }

    /// Values on another grid by interpolation.
    pub fn resampled(&self, grid: TimeGrid) -> Self {
        Self {
            grid,
            samples: grid.times().map(|t| self.sample_at(t)).collect(),
        }
    }

    /// Same samples, grid moved by `dt`.
    pub fn shifted(&self, dt: f64) -> Self {
        let grid = TimeGrid::new(self.grid.start() + dt, self.grid.step(), self.grid.count())
            .expect("shifting keeps a valid grid");
        Self {
            grid,
            samples: self.samples.clone(),
        }
    }

    /// `integral |psi|^2` over `[a, b]` with |psi|^2 piecewise linear
    /// between samples (trapezoidal rule with exact partial cells).
    pub fn energy_between(&self, a: f64, b: f64) -> Result<f64> {
        if !(self.grid.contains(a) && self.grid.contains(b)) || b < a {
            return Err(Error::WindowOutOfGrid {
                start: a,
                end: b,
                grid_start: self.grid.start(),
                grid_end: self.grid.end(),
            });
        }
        let h = self.grid.step();
        let n = self.samples.len();
        let xa = ((a - self.grid.start()) / h).clamp(0.0, (n - 1) as f64);
        let xb = ((b - self.grid.start()) / h).clamp(0.0, (n - 1) as f64);
        let intensity = |x: f64| {
            let i = (x.floor() as usize).min(n - 2);
            let f = x - i as f64;
            self.samples[i].norm_sqr() * (1.0 - f) + self.samples[i + 1].norm_sqr() * f
        };
        let mut total = 0.0;
        let mut k = (xa.floor() as usize).min(n - 2);
        while (k as f64) < xb && k < n - 1 {
            let lo = xa.max(k as f64);
            let hi = xb.min((k + 1) as f64);
            if hi > lo {
                total += 0.5 * (intensity(lo) + intensity(hi)) * (hi - lo);
            }
            k += 1;
        }
        Ok(total * h)
    }

    /// `integral |psi|^2` over a window of `width` centered on the peak.
    pub fn energy_around_peak(&self, width: f64) -> Result<f64> {
        let c = self.peak_time();
        self.energy_between(c - 0.5 * width, c + 0.5 * width)
    }

    /// `integral conj(self) * other dtau`, evaluated on this waveform's grid.
    pub fn overlap(&self, other: &ComplexWaveform) -> C64 {
        let other = other.resampled(self.grid);
        let n = self.samples.len();
        let mut acc = C64::new(0.0, 0.0);
        for (i, (a, b)) in self.samples.iter().zip(other.samples.iter()).enumerate() {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += a.conj() * b * w;
        }
        acc * self.grid.step()
    }

    /// Time-reversed copy about `pivot`: `t -> 2 pivot - t`, conjugated.
    pub fn time_reversed(&self, pivot: f64) -> Self {
        let new_start = 2.0 * pivot - self.grid.end();
        let grid = TimeGrid::new(new_start, self.grid.step(), self.grid.count()).expect("reversal keeps a valid grid");
        Self {
            grid,
            samples: self.samples.iter().rev().map(|s| s.conj()).collect(),
        }
    }

    /// Restriction to the samples with times inside `[a, b]`.
    pub fn slice(&self, a: f64, b: f64) -> Result<Self> {
        let h = self.grid.step();
        let i0 = (((a - self.grid.start()) / h).ceil().max(0.0)) as usize;
        let i1 = ((((b - self.grid.start()) / h) + 1e-9).floor() as usize).min(self.samples.len() - 1);
        if i1 < i0 + 1 {
            return Err(Error::param(
                "slice",
                format!("window [{a}, {b}] holds fewer than 2 samples"),
            ));
        }
        let grid = TimeGrid::new(self.grid.time(i0), h, i1 - i0 + 1)?;
        Ok(Self {
            grid,
            samples: self.samples[i0..=i1].to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TimeGrid {
        TimeGrid::new(-2e-6, 1e-9, 4001).unwrap()
    }

    #[test]
    fn gaussian_is_unit_norm() {
        let w = ComplexWaveform::gaussian(grid(), 0.0, 300e-9).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-9);
        assert!((waveform_norm(&w) - 1.0).abs() < 1e-9);
        assert!(w.peak_time().abs() < 1e-12);
    }

    #[test]
    fn zero_waveform_has_zero_norm() {
        let w = ComplexWaveform::zeros(grid());
        assert_eq!(w.norm(), 0.0);
        assert!(matches!(w.normalized(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn norm_scales_quadratically() {
        let w = ComplexWaveform::gaussian(grid(), 1e-7, 250e-9).unwrap();
        let c = C64::new(0.3, -1.7);
        assert!((w.scaled(c).norm() - c.norm_sqr() * w.norm()).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_converges_at_second_order() {
        // A raised cosine is smooth inside but has a curvature jump at its
        // support edges, which exposes the O(h^2) term.
        let f = |t: f64| {
            let x = t / 1e-6;
            if x.abs() < 1.0 {
                C64::new((0.5 * (1.0 + (std::f64::consts::PI * x).cos())).sqrt() * (1.0 + x), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        };
        // exact: integral over [-1,1] us of (1+cos(pi x))/2 (1+x)^2 dx * 1e-6
        let exact = (4.0 / 3.0 - 2.0 / (std::f64::consts::PI * std::f64::consts::PI)) * 1e-6;
        let err = |n: usize| {
            let g = TimeGrid::new(-1.3e-6, 2.6e-6 / (n - 1) as f64, n).unwrap();
            (ComplexWaveform::from_fn(g, f).unwrap().norm() - exact).abs()
        };
        let (e1, e2, e3) = (err(41), err(81), err(161));
        let (r1, r2) = (e1 / e2, e2 / e3);
        assert!(r1 > 3.5 && r2 > 3.5, "ratios {r1} {r2}");
    }

    #[test]
    fn window_energy_matches_full_norm() {
        let w = ComplexWaveform::gaussian(grid(), 0.0, 200e-9).unwrap();
        let full = w.energy_between(w.grid().start(), w.grid().end()).unwrap();
        assert!((full - w.norm()).abs() < 1e-12);
        let inner = w.energy_around_peak(700e-9).unwrap();
        assert!(inner < 1.0 && inner > 0.999);
        let split = w.energy_between(-1e-6, 0.2345e-9).unwrap() + w.energy_between(0.2345e-9, 1e-6).unwrap();
        assert!((split - w.energy_between(-1e-6, 1e-6).unwrap()).abs() < 1e-12);
        assert!(w.energy_between(-3e-6, 0.0).is_err());
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let g = TimeGrid::new(0.0, 0.1, 50).unwrap();
        let f = |t: f64| C64::new(t * t * t - 2.0 * t, 0.5 * t * t);
        let w = ComplexWaveform::from_fn(g, f).unwrap();
        for t in [0.33, 1.234, 3.05, 4.5] {
            assert!((w.sample_at(t) - f(t)).norm() < 1e-12);
        }
        assert_eq!(w.sample_at(-0.5), C64::new(0.0, 0.0));
    }

    #[test]
    fn time_reversal_is_involutive() {
        let w = ComplexWaveform::gaussian(grid(), 3e-7, 200e-9)
            .unwrap()
            .scaled(C64::new(0.0, 1.0));
        let rr = w.time_reversed(1e-6).time_reversed(1e-6);
        assert!((rr.grid().start() - w.grid().start()).abs() < 1e-18);
        assert_eq!(rr.samples(), w.samples());
        let r = w.time_reversed(1e-6);
        assert!((r.peak_time() - (2e-6 - 3e-7)).abs() < 1e-12);
    }
}
