//! Wrapped frequency tiles: one windowed spectral region periodized onto a
//! power-of-two rectangle, whose inverse FFT gives the coefficients on a
//! regular spatial lattice.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fft::Fft2;
use crate::spectral_grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TileShape {
    Isotropic,
    /// One-sided wedge `orientation` of `count` covering directions near
    /// `pi * orientation / count`; its antipode is reached via conjugation.
    Wedge { orientation: u32, count: u32 },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry {
    pub point: u32,
    pub mirror: u32,
    pub cell: u32,
    pub weight: f64,
}

#[derive(Clone)]
pub(crate) struct Tile {
    pub scale: i32,
    pub shape: TileShape,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Entry>,
    /// Side of the full grid the entries index into.
    pub grid_side: usize,
    fft: Arc<Fft2>,
}

impl std::fmt::Debug for Tile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tile")
            .field("scale", &self.scale)
            .field("shape", &self.shape)
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("entries", &self.entries.len())
            .finish()
    }
}

impl Tile {
    pub fn block(&self) -> usize {
        self.rows * self.cols
    }

    pub fn coef_len(&self) -> usize {
        match self.shape {
            TileShape::Isotropic => self.block(),
            TileShape::Wedge { .. } => 2 * self.block(),
        }
    }

    fn norm(&self) -> f64 {
        1.0 / (self.block() as f64).sqrt()
    }

    /// Isotropic tile over all points with a radial weight.
    pub fn isotropic(grid: &GridSpec, scale: i32, side: usize, weight: impl Fn(f64) -> f64) -> Self {
        let side = side.min(grid.size());
        let mut entries = Vec::new();
        for p in 0..grid.len() {
            let w = weight(grid.radius(p));
            if w > 0.0 {
                let (a, b) = grid.frequency(p);
                entries.push(Entry {
                    point: p as u32,
                    mirror: grid.mirror(p) as u32,
                    cell: cell(a, b, side, side),
                    weight: w,
                });
            }
        }
        Self::with_entries(grid, scale, TileShape::Isotropic, side, side, entries)
    }

    /// One-sided wedges `0..count` at one scale, built from a radial weight
    /// and the angular bump.
    pub fn wedges(
        grid: &GridSpec,
        scale: i32,
        count: u32,
        radial: impl Fn(f64) -> f64,
        angular: impl Fn(f64) -> f64,
    ) -> Vec<Self> {
        let l = count as i64;
        let mut raw: Vec<Vec<(usize, f64, f64, f64)>> = vec![Vec::new(); count as usize];
        for p in 0..grid.len() {
            let wr = radial(grid.radius(p));
            if wr <= 0.0 {
                continue;
            }
            let (a, b) = grid.representative(p);
            let mut om = b.atan2(a);
            if om < 0.0 {
                om += 2.0 * PI;
            }
            let t = om * l as f64 / PI;
            let wrap = |d: f64| {
                let p2 = 2.0 * l as f64;
                let mut d = d % p2;
                if d >= l as f64 {
                    d -= p2;
                } else if d < -(l as f64) {
                    d += p2;
                }
                d
            };
            let base = t.floor() as i64;
            if grid.is_self_conjugate(p) {
                for o in 0..l {
                    let v0 = angular(wrap(t - o as f64));
                    let v1 = angular(wrap(t - (o + l) as f64));
                    let w = wr * ((v0 * v0 + v1 * v1) / 2.0).sqrt();
                    if w > 0.0 {
                        raw[o as usize].push((p, a, b, w));
                    }
                }
                continue;
            }
            for c in [base, base + 1] {
                let o = c.rem_euclid(2 * l);
                if o >= l {
                    continue;
                }
                let w = wr * angular(wrap(t - o as f64));
                if w > 0.0 {
                    raw[o as usize].push((p, a, b, w));
                }
            }
        }
        raw.into_iter()
            .enumerate()
            .map(|(o, pts)| {
                let build = |rows: usize, cols: usize| -> Vec<Entry> {
                    pts.iter()
                        .map(|&(p, a, b, w)| Entry {
                            point: p as u32,
                            mirror: grid.mirror(p) as u32,
                            cell: cell(a as i64, b as i64, rows, cols),
                            weight: w,
                        })
                        .collect()
                };
                let (mut rows, mut cols) = wedge_box(grid, &pts);
                let mut entries = build(rows, cols);
                if !injective(&entries, rows * cols) {
                    (rows, cols) = (grid.size(), grid.size());
                    entries = build(rows, cols);
                }
                Self::with_entries(
                    grid,
                    scale,
                    TileShape::Wedge {
                        orientation: o as u32,
                        count,
                    },
                    rows,
                    cols,
                    entries,
                )
            })
            .collect()
    }

    fn with_entries(
        grid: &GridSpec,
        scale: i32,
        shape: TileShape,
        rows: usize,
        cols: usize,
        entries: Vec<Entry>,
    ) -> Self {
        let t = Self {
            scale,
            grid_side: grid.size(),
            shape,
            rows,
            cols,
            entries,
            fft: Arc::new(Fft2::new(rows, cols)),
        };
        debug_assert!(t.is_injective());
        t
    }

    pub fn is_injective(&self) -> bool {
        injective(&self.entries, self.block())
    }

    /// Copy keeping only entries whose point passes `keep`.
    pub fn filtered(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut t = self.clone();
        t.entries.retain(|e| keep(e.point as usize));
        t
    }

    /// Coefficients of this tile for a Hermitian spectrum.
    pub fn analyze(&self, spec: &[Complex64], out: &mut [f64]) {
        let bl = self.block();
        let mut buf = vec![Complex64::default(); bl];
        for e in &self.entries {
            buf[e.cell as usize] += spec[e.point as usize] * e.weight;
        }
        self.fft.inverse(&mut buf);
        let s = self.norm();
        match self.shape {
            TileShape::Isotropic => {
                for (o, v) in out[..bl].iter_mut().zip(&buf) {
                    *o = v.re * s;
                }
            }
            TileShape::Wedge { .. } => {
                let s2 = s * SQRT_2;
                let (re, im) = out[..2 * bl].split_at_mut(bl);
                for ((r, i), v) in re.iter_mut().zip(im.iter_mut()).zip(&buf) {
                    *r = v.re * s2;
                    *i = v.im * s2;
                }
            }
        }
    }

    /// Adds the synthesis of `coef` into a Hermitian spectrum.
    pub fn synthesize_add(&self, coef: &[f64], spec: &mut [Complex64]) {
        let bl = self.block();
        let s = self.norm();
        match self.shape {
            TileShape::Isotropic => {
                let mut buf: Vec<Complex64> = coef[..bl].iter().map(|&c| Complex64::new(c, 0.0)).collect();
                self.fft.forward(&mut buf);
                for e in &self.entries {
                    spec[e.point as usize] += buf[e.cell as usize] * (e.weight * s);
                }
            }
            TileShape::Wedge { .. } => {
                let mut buf: Vec<Complex64> = coef[..bl]
                    .iter()
                    .zip(&coef[bl..2 * bl])
                    .map(|(&a, &b)| Complex64::new(a, b))
                    .collect();
                self.fft.forward(&mut buf);
                let k = s / SQRT_2;
                for e in &self.entries {
                    let h = buf[e.cell as usize] * (e.weight * k);
                    spec[e.point as usize] += h;
                    spec[e.mirror as usize] += h.conj();
                }
            }
        }
    }
}

fn injective(entries: &[Entry], block: usize) -> bool {
    let mut seen = vec![false; block];
    entries
        .iter()
        .all(|e| !std::mem::replace(&mut seen[e.cell as usize], true))
}

#[inline]
fn cell(a: i64, b: i64, rows: usize, cols: usize) -> u32 {
    (a.rem_euclid(rows as i64) as usize * cols + b.rem_euclid(cols as i64) as usize) as u32
}

/// Smallest power-of-two rectangle onto which the wedge support wraps
/// injectively, trying both axis orders.
fn wedge_box(grid: &GridSpec, pts: &[(usize, f64, f64, f64)]) -> (usize, usize) {
    if pts.is_empty() {
        return (1, 1);
    }
    let n = grid.size();
    let fit = |major: &dyn Fn(&(usize, f64, f64, f64)) -> i64,
               minor: &dyn Fn(&(usize, f64, f64, f64)) -> i64| {
        let lo = pts.iter().map(major).min().unwrap();
        let hi = pts.iter().map(major).max().unwrap();
        let span = (hi - lo) as usize + 1;
        let mut ranges = vec![(i64::MAX, i64::MIN); span];
        for q in pts {
            let r = &mut ranges[(major(q) - lo) as usize];
            let m = minor(q);
            r.0 = r.0.min(m);
            r.1 = r.1.max(m);
        }
        let width = ranges
            .iter()
            .filter(|r| r.0 <= r.1)
            .map(|r| (r.1 - r.0) as usize + 1)
            .max()
            .unwrap_or(1);
        (span.next_power_of_two().min(n), width.next_power_of_two().min(n))
    };
    let (xa, xb) = fit(&|q| q.1 as i64, &|q| q.2 as i64);
    let (yb, ya) = fit(&|q| q.2 as i64, &|q| q.1 as i64);
    if xa * xb <= ya * yb {
        (xa, xb)
    } else {
        (ya, yb)
    }
}
