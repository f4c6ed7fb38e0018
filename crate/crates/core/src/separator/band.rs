//! Frame pair restricted to one subband annulus, acting on a packed real
//! representation of Hermitian spectra supported there.
//!
//! Each conjugate pair `{xi, -xi}` is stored as `(sqrt2 Re v, sqrt2 Im v)` at
//! its lower flat index and a self-conjugate point as `Re v`, which makes
//! packing an isometry. Only tiles of scales `j-1 ..= j+1` meet the annulus;
//! their squared weights sum to one there, so both restricted analysis maps
//! are isometries.

use std::f64::consts::SQRT_2;

use rustfft::num_complex::Complex64;

use super::solver::SplitOperator;
use crate::frames::{Frame, FramePair, Tile};
use crate::spectral_grid::{GridSpec, Spectrum};
use crate::subband::filter_weight;

pub(crate) struct BandOperator {
    grid: GridSpec,
    /// Representative flat index of each stored pair.
    reps: Vec<u32>,
    mirrors: Vec<u32>,
    self_conj: Vec<bool>,
    dim: usize,
    sides: [Vec<Tile>; 2],
    /// Layout offset of each kept tile in its frame.
    offsets: [Vec<usize>; 2],
    lens: [usize; 2],
    scratch: Vec<Complex64>,
}

impl BandOperator {
    /// Band of scale `j`: every point where `W_j` is nonzero. `order` picks
    /// which frame is side 0.
    pub fn new(pair: &FramePair, j: i32, wavelet_first: bool) -> Self {
        let grid = *pair.grid();
        let mut reps = Vec::new();
        let mut mirrors = Vec::new();
        let mut self_conj = Vec::new();
        let mut in_band = vec![false; grid.len()];
        for p in 0..grid.len() {
            if filter_weight(&grid, j, grid.radius(p)) > 0.0 {
                in_band[p] = true;
                let m = grid.mirror(p);
                if p <= m {
                    reps.push(p as u32);
                    mirrors.push(m as u32);
                    self_conj.push(p == m);
                }
            }
        }
        let dim = self_conj.iter().map(|&s| if s { 1 } else { 2 }).sum();
        let restrict = |f: &Frame| -> (Vec<Tile>, Vec<usize>) {
            f.tiles()
                .iter()
                .zip(&f.layout().tiles)
                .filter(|(t, _)| (t.scale - j).abs() <= 1)
                .map(|(t, info)| (t.filtered(|p| in_band[p]), info.offset))
                .filter(|(t, _)| !t.entries.is_empty())
                .unzip()
        };
        let (a, b) = if wavelet_first {
            (pair.wavelet(), pair.curvelet())
        } else {
            (pair.curvelet(), pair.wavelet())
        };
        let (ta, oa) = restrict(a);
        let (tb, ob) = restrict(b);
        let sides = [ta, tb];
        let lens = [
            sides[0].iter().map(|t| t.coef_len()).sum(),
            sides[1].iter().map(|t| t.coef_len()).sum(),
        ];
        Self {
            grid,
            reps,
            mirrors,
            self_conj,
            dim,
            sides,
            offsets: [oa, ob],
            lens,
            scratch: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn pack(&self, s: &Spectrum) -> Vec<f64> {
        let v = s.values();
        let mut out = Vec::with_capacity(self.dim);
        for (i, &p) in self.reps.iter().enumerate() {
            let z = v[p as usize];
            if self.self_conj[i] {
                out.push(z.re);
            } else {
                out.push(SQRT_2 * z.re);
                out.push(SQRT_2 * z.im);
            }
        }
        out
    }

    pub fn unpack(&self, x: &[f64]) -> Spectrum {
        let mut v = vec![Complex64::default(); self.grid.len()];
        self.unpack_into(x, &mut v);
        Spectrum::new(self.grid, v).expect("grid-sized")
    }

    fn unpack_into(&self, x: &[f64], v: &mut [Complex64]) {
        let mut k = 0;
        for (i, &p) in self.reps.iter().enumerate() {
            if self.self_conj[i] {
                v[p as usize] = Complex64::new(x[k], 0.0);
                k += 1;
            } else {
                let z = Complex64::new(x[k], x[k + 1]) / SQRT_2;
                v[p as usize] = z;
                v[self.mirrors[i] as usize] = z.conj();
                k += 2;
            }
        }
    }

    /// Marks the band coefficients of `side` whose frame-layout index is in
    /// `members`; members outside the kept tiles are ignored.
    pub fn band_mask(&self, side: usize, members: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.lens[side]];
        let mut starts = Vec::with_capacity(self.sides[side].len());
        let mut off = 0;
        for t in &self.sides[side] {
            starts.push(off);
            off += t.coef_len();
        }
        for &m in members {
            for ((t, &lo), &start) in self.sides[side].iter().zip(&self.offsets[side]).zip(&starts) {
                if m >= lo && m < lo + t.coef_len() {
                    mask[start + m - lo] = true;
                }
            }
        }
        mask
    }

    fn clear_scratch(&mut self) {
        for (&p, &m) in self.reps.iter().zip(&self.mirrors) {
            self.scratch[p as usize] = Complex64::default();
            self.scratch[m as usize] = Complex64::default();
        }
    }
}

impl SplitOperator for BandOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn coeff_len(&self, side: usize) -> usize {
        self.lens[side]
    }

    fn analysis(&mut self, side: usize, x: &[f64], out: &mut [f64]) {
        let mut v = std::mem::take(&mut self.scratch);
        self.unpack_into(x, &mut v);
        let mut off = 0;
        for t in &self.sides[side] {
            let l = t.coef_len();
            t.analyze(&v, &mut out[off..off + l]);
            off += l;
        }
        self.scratch = v;
    }

    fn synthesis(&mut self, side: usize, c: &[f64], out: &mut [f64]) {
        self.clear_scratch();
        let mut v = std::mem::take(&mut self.scratch);
        let mut off = 0;
        for t in &self.sides[side] {
            let l = t.coef_len();
            t.synthesize_add(&c[off..off + l], &mut v);
            off += l;
        }
        let mut k = 0;
        for (i, &p) in self.reps.iter().enumerate() {
            let z = v[p as usize];
            if self.self_conj[i] {
                out[k] = z.re;
                k += 1;
            } else {
                out[k] = SQRT_2 * z.re;
                out[k + 1] = SQRT_2 * z.im;
                k += 2;
            }
        }
        self.scratch = v;
    }
}
