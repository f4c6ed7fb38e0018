//! Discrete torus geometry and the unitary 2-D DFT.
//!
//! Samples live on an `N x N` grid over the unit torus `[0,1)^2`; sample
//! `(r, c)` sits at `x = (r/N, c/N)`. Spectra are stored in FFT order and
//! indexed by integer frequencies in `[-N/2, N/2)^2`, measured in cycles per
//! unit length, so a frequency of radius `2^j` matches scale `a_j = 2^-j`.

use std::ops::RangeInclusive;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft2;

/// Grid size and the range of frame scales carried on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridSpec {
    size: usize,
    j_min: i32,
    j_max: i32,
}

#[derive(Deserialize)]
struct RawGrid {
    size: usize,
    j_min: i32,
    j_max: i32,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        GridSpec::new(r.size, r.j_min, r.j_max)
    }
}

impl GridSpec {
    pub fn new(size: usize, j_min: i32, j_max: i32) -> Result<Self> {
        if !size.is_power_of_two() || size < 64 {
            return Err(Error::InvalidGrid(format!(
                "size {size} must be a power of two >= 64"
            )));
        }
        if j_min < 2 || j_min > j_max {
            return Err(Error::InvalidGrid(format!(
                "need 2 <= j_min <= j_max, got j_min={j_min}, j_max={j_max}"
            )));
        }
        if (1usize << (j_max + 1)) > size / 2 {
            return Err(Error::InvalidGrid(format!(
                "finest annulus 2^{} exceeds Nyquist {}",
                j_max + 1,
                size / 2
            )));
        }
        Ok(Self { size, j_min, j_max })
    }

    /// Largest scale range that fits the grid, starting at `j_min = 3`.
    pub fn with_default_scales(size: usize) -> Result<Self> {
        let j_max = (size / 4).trailing_zeros() as i32;
        Self::new(size, 3.min(j_max), j_max)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.size * self.size
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Subband scales `j_min..=j_max`.
    pub fn scales(&self) -> RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    /// Frame scales including the low-pass slot `j_min - 1` and the terminal
    /// slot `j_max + 1`.
    pub fn frame_scales(&self) -> RangeInclusive<i32> {
        (self.j_min - 1)..=(self.j_max + 1)
    }

    /// Scales away from both range edges; falls back to the full range when
    /// it has fewer than three scales.
    pub fn mid_band(&self) -> RangeInclusive<i32> {
        if self.j_max - self.j_min >= 2 {
            (self.j_min + 1)..=(self.j_max - 1)
        } else {
            self.scales()
        }
    }

    pub fn check_scale(&self, j: i32) -> Result<()> {
        if self.scales().contains(&j) {
            Ok(())
        } else {
            Err(Error::ScaleOutOfRange {
                scale: j,
                lo: self.j_min,
                hi: self.j_max,
            })
        }
    }

    pub fn check_frame_scale(&self, j: i32) -> Result<()> {
        if self.frame_scales().contains(&j) {
            Ok(())
        } else {
            Err(Error::ScaleOutOfRange {
                scale: j,
                lo: self.j_min - 1,
                hi: self.j_max + 1,
            })
        }
    }

    /// Signed frequency of FFT bin `i`.
    #[inline]
    pub fn centered(&self, i: usize) -> i64 {
        let n = self.size as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    #[inline]
    pub fn frequency(&self, flat: usize) -> (i64, i64) {
        (
            self.centered(flat / self.size),
            self.centered(flat % self.size),
        )
    }

    #[inline]
    pub fn radius(&self, flat: usize) -> f64 {
        let (a, b) = self.frequency(flat);
        ((a * a + b * b) as f64).sqrt()
    }

    /// Flat index of `-xi` (mod N).
    #[inline]
    pub fn mirror(&self, flat: usize) -> usize {
        let n = self.size;
        let (r, c) = (flat / n, flat % n);
        ((n - r) % n) * n + (n - c) % n
    }

    #[inline]
    pub fn is_self_conjugate(&self, flat: usize) -> bool {
        self.mirror(flat) == flat
    }

    /// Frequency coordinates with Nyquist bins resolved so that
    /// `representative(mirror(p)) == -representative(p)` whenever `p` is not
    /// self-conjugate. Angular windows are evaluated on these coordinates.
    pub fn representative(&self, flat: usize) -> (f64, f64) {
        let half = (self.size / 2) as i64;
        let (mut a, mut b) = self.frequency(flat);
        if a == -half && b != 0 && b != -half {
            a = half * b.signum();
        } else if b == -half && a != 0 && a != -half {
            b = half * a.signum();
        }
        (a as f64, b as f64)
    }

    /// Torus displacement `to - from` wrapped into `[-1/2, 1/2)^2`.
    pub fn torus_delta(from: [f64; 2], to: [f64; 2]) -> [f64; 2] {
        let w = |d: f64| d - (d + 0.5).floor();
        [w(to[0] - from[0]), w(to[1] - from[1])]
    }

    pub fn torus_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
        let d = Self::torus_delta(a, b);
        d[0].hypot(d[1])
    }
}

/// Real samples on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite sample at {i}"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = grid.size();
        let values = (0..grid.len()).map(|i| f(i / n, i % n)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.grid.size() + col]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dot(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, s: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// Complex spectrum in FFT order under the unitary normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} spectral samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at signed frequency `(k1, k2)`.
    pub fn at(&self, k1: i64, k2: i64) -> Complex64 {
        let n = self.grid.size() as i64;
        let r = k1.rem_euclid(n) as usize;
        let c = k2.rem_euclid(n) as usize;
        self.values[r * n as usize + c]
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `max |v(xi) - conj v(-xi)|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        (0..self.values.len())
            .map(|i| (self.values[i] - self.values[self.grid.mirror(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Projection onto Hermitian-symmetric spectra (real fields).
    pub fn hermitian_part(&self) -> Spectrum {
        let values = (0..self.values.len())
            .map(|i| 0.5 * (self.values[i] + self.values[self.grid.mirror(i)].conj()))
            .collect();
        Spectrum {
            grid: self.grid,
            values,
        }
    }

    /// Multiplies every bin by a radial weight `w(|xi|)`.
    pub fn filtered(&self, w: impl Fn(f64) -> f64) -> Spectrum {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * w(self.grid.radius(i)))
            .collect();
        Spectrum {
            grid: self.grid,
            values,
        }
    }

    pub fn scaled(&self, s: f64) -> Spectrum {
        Spectrum {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Spectrum) -> Spectrum {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Spectrum {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Unitary forward DFT: `f^(xi) = N^-1 sum_x f(x) exp(-2 pi i xi.x)`.
pub fn forward_dft(f: &Field) -> Spectrum {
    let grid = *f.grid();
    let n = grid.size();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Fft2::new(n, n).forward(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= s);
    Spectrum { grid, values: buf }
}

/// Inverse of [`forward_dft`]; rejects spectra that do not describe a real
/// field.
pub fn inverse_dft(s: &Spectrum) -> Result<Field> {
    let scale = s.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let asym = s.hermitian_asymmetry();
    if asym > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian(asym));
    }
    Ok(inverse_dft_real_part(s))
}

/// Inverse DFT keeping the real part, without the symmetry check.
pub(crate) fn inverse_dft_real_part(s: &Spectrum) -> Field {
    let grid = *s.grid();
    let n = grid.size();
    let mut buf = s.values.clone();
    Fft2::new(n, n).inverse(&mut buf);
    let k = 1.0 / n as f64;
    Field {
        grid,
        values: buf.iter().map(|v| v.re * k).collect(),
    }
}

/// Spectral energy over the shell `2^(j-1) < |xi| <= 2^(j+1)`.
pub fn annulus_energy(s: &Spectrum, j: i32) -> Result<f64> {
    s.grid().check_scale(j)?;
    let lo = 2f64.powi(j - 1);
    let hi = 2f64.powi(j + 1);
    Ok(s.values
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let r = s.grid().radius(*i);
            r > lo && r <= hi
        })
        .map(|(_, v)| v.norm_sqr())
        .sum())
}
