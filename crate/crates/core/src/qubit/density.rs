use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PolarizationState, C64};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;

/// Polarization density matrix on the basis (|H>, |V>).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityMatrixRepr", into = "DensityMatrixRepr")]
pub struct DensityMatrix2 {
    m: [[C64; 2]; 2],
}

/// JSON form: real and imaginary parts as 2 x 2 grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixRepr {
    pub re: [[f64; 2]; 2],
    pub im: [[f64; 2]; 2],
}

impl From<DensityMatrix2> for DensityMatrixRepr {
    fn from(d: DensityMatrix2) -> Self {
        let mut re = [[0.0; 2]; 2];
        let mut im = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                re[i][j] = d.m[i][j].re;
                im[i][j] = d.m[i][j].im;
            }
        }
        Self { re, im }
    }
}

impl TryFrom<DensityMatrixRepr> for DensityMatrix2 {
    type Error = Error;

    fn try_from(r: DensityMatrixRepr) -> Result<Self> {
        let c = |i: usize, j: usize| C64::new(r.re[i][j], r.im[i][j]);
        DensityMatrix2::new([[c(0, 0), c(0, 1)], [c(1, 0), c(1, 1)]])
    }
}

impl DensityMatrix2 {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(m: [[C64; 2]; 2]) -> Result<Self> {
        if m.iter().flatten().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        if m[0][0].im.abs() > HERMITIAN_TOL
            || m[1][1].im.abs() > HERMITIAN_TOL
            || (m[0][1] - m[1][0].conj()).norm() > HERMITIAN_TOL
        {
            return Err(Error::InvalidDensityMatrix("not Hermitian".into()));
        }
        let tr = m[0][0].re + m[1][1].re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let d = Self { m };
        let [lo, _] = d.eigenvalues();
        if lo < -EIGEN_TOL {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {lo}")));
        }
        Ok(d)
    }

    pub fn pure(state: &PolarizationState) -> Self {
        let [a, b] = state.amplitudes();
        Self::from_amplitudes(a, b).expect("unit-norm state")
    }

    /// `|psi><psi| / <psi|psi>` for an unnormalized spinor.
    pub fn from_amplitudes(a: C64, b: C64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            m: [
                [C64::new(a.norm_sqr() / n, 0.0), a * b.conj() / n],
                [b * a.conj() / n, C64::new(b.norm_sqr() / n, 0.0)],
            ],
        })
    }

    pub fn maximally_mixed() -> Self {
        Self::from_bloch([0.0; 3]).expect("origin is inside the Bloch ball")
    }

    /// `(I + x sx + y sy + z sz) / 2` with `z` the H/V, `x` the D/A and
    /// `y` the L/R component.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len > 1.0 + EIGEN_TOL {
            return Err(Error::InvalidDensityMatrix(format!("Bloch vector length {len} > 1")));
        }
        let [x, y, z] = r;
        Ok(Self {
            m: [
                [C64::new(0.5 * (1.0 + z), 0.0), C64::new(0.5 * x, -0.5 * y)],
                [C64::new(0.5 * x, 0.5 * y), C64::new(0.5 * (1.0 - z), 0.0)],
            ],
        })
    }

    pub fn bloch(&self) -> [f64; 3] {
        let c = self.m[0][1];
        [2.0 * c.re, -2.0 * c.im, self.m[0][0].re - self.m[1][1].re]
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0].re + self.m[1][1].re
    }

    pub fn det(&self) -> f64 {
        (self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]).re
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let t = self.trace();
        let disc = (0.25 * t * t - self.det()).max(0.0).sqrt();
        [0.5 * t - disc, 0.5 * t + disc]
    }

    pub fn purity(&self) -> f64 {
        let [x, y, z] = self.bloch();
        0.5 * (1.0 + x * x + y * y + z * z)
    }

    /// `(1 - w) rho + w I/2`.
    pub fn depolarized(&self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::param("noise weight", format!("must lie in [0, 1], got {w}")));
        }
        let [x, y, z] = self.bloch();
        Self::from_bloch([(1.0 - w) * x, (1.0 - w) * y, (1.0 - w) * z])
    }

    /// `U rho U^dagger`.
    pub fn rotated(&self, u: [[C64; 2]; 2]) -> Result<Self> {
        let mut ur = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    ur[i][j] += u[i][k] * self.m[k][j];
                }
            }
        }
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    out[i][j] += ur[i][k] * u[j][k].conj();
                }
            }
        }
        // restore exact Hermiticity lost to rounding
        out[0][0].im = 0.0;
        out[1][1].im = 0.0;
        out[1][0] = out[0][1].conj();
        Self::new(out)
    }

    /// Outcome probabilities in the order H, V, D, A, L, R.
    pub fn projection_probabilities(&self) -> [f64; 6] {
        let [x, y, z] = self.bloch();
        [
            0.5 * (1.0 + z),
            0.5 * (1.0 - z),
            0.5 * (1.0 + x),
            0.5 * (1.0 - x),
            0.5 * (1.0 + y),
            0.5 * (1.0 - y),
        ]
    }
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, using the
/// 2 x 2 identity `Tr(rho sigma) + 2 sqrt(det rho det sigma)`.
pub fn fidelity(rho: &DensityMatrix2, sigma: &DensityMatrix2) -> Result<f64> {
    for d in [rho, sigma] {
        DensityMatrix2::new(d.m)?;
    }
    let mut tr = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            tr += (rho.m[i][j] * sigma.m[j][i]).re;
        }
    }
    let dets = (rho.det().max(0.0) * sigma.det().max(0.0)).sqrt();
    Ok((tr + 2.0 * dets).clamp(0.0, 1.0))
}

/// Projective counts in the three polarization bases. Counts may be
/// fractional (expected values).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BasisCounts {
    pub h: f64,
    pub v: f64,
    pub d: f64,
    pub a: f64,
    pub l: f64,
    pub r: f64,
}

impl BasisCounts {
    /// Expected counts for `shots` trials per basis.
    pub fn expected(rho: &DensityMatrix2, shots: f64) -> Self {
        let p = rho.projection_probabilities();
        Self {
            h: p[0] * shots,
            v: p[1] * shots,
            d: p[2] * shots,
            a: p[3] * shots,
            l: p[4] * shots,
            r: p[5] * shots,
        }
    }

    /// Adds `count` to the named outcome (`H`, `V`, `D`, `A`, `L`, `R`,
    /// case-insensitive).
    pub fn add(&mut self, outcome: &str, count: f64) -> Result<()> {
        let slot = match outcome.trim().to_ascii_uppercase().as_str() {
            "H" => &mut self.h,
            "V" => &mut self.v,
            "D" => &mut self.d,
            "A" => &mut self.a,
            "L" => &mut self.l,
            "R" => &mut self.r,
            o => return Err(Error::param("outcome", format!("unknown outcome {o:?}"))),
        };
        if !(count >= 0.0 && count.is_finite()) {
            return Err(Error::param("count", format!("must be non-negative, got {count}")));
        }
        *slot += count;
        Ok(())
    }
}

/// Linear Stokes inversion, then projection onto the physical states.
///
/// A Bloch vector longer than one is scaled back to the sphere, which for
/// a qubit is the same as clipping the negative eigenvalue to zero and
/// renormalizing the trace.
pub fn tomography(c: &BasisCounts) -> Result<DensityMatrix2> {
    let stokes = |p: f64, m: f64, name: &str| -> Result<f64> {
        let n = p + m;
        if !(n > 0.0) {
            return Err(Error::UndefinedEstimate(format!("no counts in the {name} basis")));
        }
        Ok((p - m) / n)
    };
    let z = stokes(c.h, c.v, "H/V")?;
    let x = stokes(c.d, c.a, "D/A")?;
    let y = stokes(c.l, c.r, "L/R")?;
    let len = (x * x + y * y + z * z).sqrt();
    let s = if len > 1.0 { 1.0 / len } else { 1.0 };
    DensityMatrix2::from_bloch([x * s, y * s, z * s])
}
