//! Thin 2-D wrapper over `rustfft` for row-major complex buffers.

use std::cell::RefCell;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

thread_local! {
    static WORK: RefCell<(Vec<Complex64>, Vec<Complex64>)> = const { RefCell::new((Vec::new(), Vec::new())) };
}

/// Planned 2-D transform of a `rows x cols` row-major buffer. Both directions
/// are unnormalized; `forward` uses `exp(-2 pi i ...)`.
pub(crate) struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.rows, self.cols)
    }
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut p = planner().lock().expect("fft planner poisoned");
        Self {
            rows,
            cols,
            row_fwd: p.plan_fft_forward(cols),
            row_inv: p.plan_fft_inverse(cols),
            col_fwd: p.plan_fft_forward(rows),
            col_inv: p.plan_fft_inverse(rows),
        }
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &*self.row_fwd, &*self.col_fwd);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &*self.row_inv, &*self.col_inv);
    }

    fn run(&self, data: &mut [Complex64], row: &dyn Fft<f64>, col: &dyn Fft<f64>) {
        assert_eq!(data.len(), self.len());
        WORK.with(|w| {
            let (ref mut tmp, ref mut scratch) = *w.borrow_mut();
            let need = row
                .get_inplace_scratch_len()
                .max(col.get_inplace_scratch_len());
            if scratch.len() < need {
                scratch.resize(need, Complex64::default());
            }
            if self.cols > 1 {
                row.process_with_scratch(data, &mut scratch[..row.get_inplace_scratch_len()]);
            }
            if self.rows > 1 {
                tmp.resize(data.len(), Complex64::default());
                transpose(data, tmp, self.rows, self.cols);
                col.process_with_scratch(tmp, &mut scratch[..col.get_inplace_scratch_len()]);
                transpose(tmp, data, self.cols, self.rows);
            }
        });
    }
}

/// `src` is `rows x cols`, `dst` becomes `cols x rows`.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangular_transform_matches_direct_sum() {
        let (rows, cols) = (4, 8);
        let data: Vec<Complex64> = (0..rows * cols)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut fast = data.clone();
        Fft2::new(rows, cols).forward(&mut fast);
        for k1 in 0..rows {
            for k2 in 0..cols {
                let mut acc = Complex64::default();
                for n1 in 0..rows {
                    for n2 in 0..cols {
                        let ph = -2.0
                            * std::f64::consts::PI
                            * ((k1 * n1) as f64 / rows as f64 + (k2 * n2) as f64 / cols as f64);
                        acc += data[n1 * cols + n2] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((acc - fast[k1 * cols + k2]).norm() < 1e-10);
            }
        }
    }
}
