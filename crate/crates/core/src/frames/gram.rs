//! Closed-form inner products between atoms of two tiles.
//!
//! For a source tile `a` and an isotropic tile `b`, the complex atoms satisfy
//! `<u^a_k, u^b_m> = K(b_k - b_m)` with
//! `K(d) = s_a s_b sum_xi g_a(xi) g_b(xi) exp(-2 pi i xi.d)`. Both lattices have
//! power-of-two denominators, so every difference lands on the
//! `max(rows) x max(cols)` grid and one FFT tabulates `K` there.

use std::f64::consts::SQRT_2;

use rustfft::num_complex::Complex64;

use super::tile::{Tile, TileShape};
use crate::fft::Fft2;
use crate::spectral_grid::GridSpec;

#[derive(Debug, Clone)]
pub(crate) struct CrossKernel {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<Complex64>,
    pub wedge: bool,
}

impl CrossKernel {
    /// `None` when the spectral supports do not overlap.
    pub fn new(a: &Tile, b: &Tile) -> Option<Self> {
        debug_assert_eq!(b.shape, TileShape::Isotropic);
        let rows = a.rows.max(b.rows);
        let cols = a.cols.max(b.cols);
        let (grid_n, bw) = dense_weights(b);
        let mut g = vec![Complex64::default(); rows * cols];
        let mut any = false;
        for e in &a.entries {
            let wb = bw[e.point as usize];
            if wb == 0.0 {
                continue;
            }
            any = true;
            let p = e.point as usize;
            let (r, c) = (p / grid_n, p % grid_n);
            // the grid side is a multiple of rows and cols, so reducing the
            // FFT-order index is the same as reducing the signed frequency
            let cell = (r % rows) * cols + c % cols;
            g[cell] += e.weight * wb;
        }
        if !any {
            return None;
        }
        Fft2::new(rows, cols).forward(&mut g);
        let s = 1.0 / ((a.block() * b.block()) as f64).sqrt();
        g.iter_mut().for_each(|v| *v *= s);
        Some(Self {
            rows,
            cols,
            values: g,
            wedge: matches!(a.shape, TileShape::Wedge { .. }),
        })
    }

    /// `K(from - to)` for two torus points on the lattices.
    pub fn at(&self, from: [f64; 2], to: [f64; 2]) -> Complex64 {
        let d = GridSpec::torus_delta(to, from);
        let n1 = (d[0] * self.rows as f64).round().rem_euclid(self.rows as f64) as usize;
        let n2 = (d[1] * self.cols as f64).round().rem_euclid(self.cols as f64) as usize;
        self.values[n1 * self.cols + n2]
    }

    /// Inner product of the real source atom (even or odd phase) with the
    /// real isotropic target atom.
    #[inline]
    pub fn real_part(&self, k: Complex64, odd: bool) -> f64 {
        match (self.wedge, odd) {
            (false, _) => k.re,
            (true, false) => SQRT_2 * k.re,
            (true, true) => -SQRT_2 * k.im,
        }
    }

    /// `|real_part(K(n))|` over the whole kernel grid.
    pub fn abs_grid(&self, odd: bool) -> Vec<f64> {
        self.values.iter().map(|&k| self.real_part(k, odd).abs()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = self.abs_grid(false).into_iter().fold(0.0, f64::max);
        if self.wedge {
            m = self.abs_grid(true).into_iter().fold(m, f64::max);
        }
        m
    }
}

/// Weights of `t` on the full grid, with the grid side.
fn dense_weights(t: &Tile) -> (usize, Vec<f64>) {
    let n = t.grid_side;
    let mut w = vec![0.0; n * n];
    for e in &t.entries {
        w[e.point as usize] = e.weight;
    }
    (n, w)
}
