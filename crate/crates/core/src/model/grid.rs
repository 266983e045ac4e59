use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform time grid, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param("step", format!("must be positive, got {step}")));
        }
        if count < 2 {
            return Err(Error::param("count", format!("must be >= 2, got {count}")));
        }
        if !start.is_finite() {
            return Err(Error::param("start", "must be finite"));
        }
        Ok(Self { start, step, count })
    }

    /// Grid with the given step whose last point is the first one at or
    /// after `end`.
    pub fn spanning(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(end > start) {
            return Err(Error::param("end", format!("must exceed start ({start}), got {end}")));
        }
        let intervals = ((end - start) / step - 1e-9).ceil().max(1.0) as usize;
        Self::new(start, step, intervals + 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end(&self) -> f64 {
        self.time(self.count - 1)
    }

    pub fn duration(&self) -> f64 {
        self.step * (self.count - 1) as f64
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.time(i))
    }

    pub fn contains(&self, t: f64) -> bool {
        let tol = 1e-9 * self.step;
        t >= self.start - tol && t <= self.end() + tol
    }

    /// Index of the grid point closest to `t`, clamped to the grid.
    pub fn nearest_index(&self, t: f64) -> usize {
        let x = ((t - self.start) / self.step).round();
        (x.max(0.0) as usize).min(self.count - 1)
    }

    /// Same span, step divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        Self {
            start: self.start,
            step: self.step / factor as f64,
            count: (self.count - 1) * factor + 1,
        }
    }
}

/// Uniform spatial grid over `[0, length]` with the probe entrance at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    length: f64,
    count: usize,
}

impl SpatialGrid {
    pub fn new(length: f64, count: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::param("length", format!("must be positive, got {length}")));
        }
        if count < 2 {
            return Err(Error::param("count", format!("must be >= 2, got {count}")));
        }
        Ok(Self { length, count })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        self.length / (self.count - 1) as f64
    }

    pub fn position(&self, i: usize) -> f64 {
        self.step() * i as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(0.0, 0.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1e-9, 1).is_err());
        assert!(SpatialGrid::new(0.0, 10).is_err());
        assert!(SpatialGrid::new(0.03, 1).is_err());
    }

    #[test]
    fn spanning_covers_end() {
        let g = TimeGrid::spanning(0.0, 1e-6, 3e-9).unwrap();
        assert!(g.end() >= 1e-6 - 1e-18);
        assert!(g.end() - 1e-6 < 3e-9);
        let exact = TimeGrid::spanning(0.0, 1e-6, 1e-9).unwrap();
        assert_eq!(exact.count(), 1001);
    }

    #[test]
    fn refinement_keeps_span() {
        let g = TimeGrid::new(-1e-6, 1e-9, 2001).unwrap();
        let r = g.refined(2);
        assert_eq!(r.count(), 4001);
        assert!((r.end() - g.end()).abs() < 1e-18);
    }
}
