//! Radial, angular and taper windows.
//!
//! Every window is built from the polynomial transition profile
//! `s(x) = x^4 (35 - 84x + 70x^2 - 20x^3)`, which satisfies `s(x) + s(1-x) = 1`.
//! Squared partitions of unity then follow from `sin^2 + cos^2 = 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::spectral_grid::GridSpec;

/// Transition profile on `[0, 1]`, clamped outside.
#[inline]
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let x2 = x * x;
        x2 * x2 * (35.0 - 84.0 * x + 70.0 * x2 - 20.0 * x2 * x)
    }
}

/// Dyadic radial window `W`, supported on `[1/2, 2]` with `W(1) = 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RadialWindow;

impl RadialWindow {
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.5 || r >= 2.0 {
            0.0
        } else if r <= 1.0 {
            (FRAC_PI_2 * smoothstep(2.0 * r - 1.0)).sin()
        } else {
            (FRAC_PI_2 * smoothstep(r - 1.0)).cos()
        }
    }

    /// `W(r / 2^j)`.
    #[inline]
    pub fn at_scale(&self, r: f64, j: i32) -> f64 {
        self.eval(r * 2f64.powi(-j))
    }
}

/// Angular bump `V`, supported on `(-1, 1)`, unit-spaced squared partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularWindow {
    gain: f64,
}

impl Default for AngularWindow {
    fn default() -> Self {
        Self { gain: 1.0 }
    }
}

impl AngularWindow {
    /// A scaled copy of `V`; anything other than 1 breaks the partition of
    /// unity and exists for exercising the residual report.
    pub fn with_gain(gain: f64) -> Self {
        Self { gain }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        if a >= 1.0 {
            0.0
        } else {
            self.gain * (FRAC_PI_2 * smoothstep(a)).cos()
        }
    }
}

/// Curve taper `w2(t) = 1 - s(|t|)` on `[-1, 1]`, optionally dilated by a
/// half-width `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveTaper {
    pub rho: f64,
}

impl Default for CurveTaper {
    fn default() -> Self {
        Self { rho: 1.0 }
    }
}

impl CurveTaper {
    pub fn new(rho: f64) -> Self {
        Self { rho }
    }

    /// Undilated profile `w2(t)`.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        if a >= 1.0 {
            0.0
        } else {
            1.0 - smoothstep(a)
        }
    }

    /// `w2(t / rho)`.
    #[inline]
    pub fn eval_dilated(&self, t: f64) -> f64 {
        self.eval(t / self.rho)
    }

    /// `w2^(omega) = int w2(t) exp(-2 pi i omega t) dt`, real since `w2` is even.
    pub fn fourier(&self, omega: f64) -> f64 {
        // composite 8-point Gauss-Legendre on [0, 1]; the integrand is a
        // polynomial times a cosine so this converges fast
        const SUB: usize = 512;
        let h = 1.0 / SUB as f64;
        let mut acc = 0.0;
        for k in 0..SUB {
            let mid = (k as f64 + 0.5) * h;
            for (x, w) in GL8 {
                let t = mid + 0.5 * h * x;
                acc += w * self.eval(t) * (2.0 * PI * omega * t).cos();
            }
        }
        // factor 2 for the even extension, h/2 for the interval map
        acc * h
    }
}

const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Low-pass closure `Phi0` below the coarsest subband `j_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowPass {
    pub j_min: i32,
}

impl LowPass {
    pub fn new(j_min: i32) -> Self {
        Self { j_min }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let lo = 2f64.powi(self.j_min - 1);
        if r <= lo {
            1.0
        } else {
            RadialWindow.eval(r / lo)
        }
    }
}

/// High-pass closure above the finest subband `j_max`: zero up to `2^j_max`,
/// one from `2^(j_max+1)` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighPass {
    pub j_max: i32,
}

impl HighPass {
    pub fn new(j_max: i32) -> Self {
        Self { j_max }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let top = 2f64.powi(self.j_max + 1);
        if r >= top {
            1.0
        } else {
            RadialWindow.eval(r / top)
        }
    }
}

/// Maximum absolute residuals of the partition identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionReport {
    pub samples: usize,
    pub radial: f64,
    pub angular: f64,
    pub taper: f64,
    pub lowpass: f64,
}

impl PartitionReport {
    pub fn max(&self) -> f64 {
        self.radial.max(self.angular).max(self.taper).max(self.lowpass)
    }
}

/// Checks the four identities on `samples` uniform points with the default
/// windows.
pub fn verify_partitions(grid: &GridSpec, samples: usize) -> PartitionReport {
    verify_partitions_with(grid, samples, AngularWindow::default())
}

pub fn verify_partitions_with(
    grid: &GridSpec,
    samples: usize,
    v: AngularWindow,
) -> PartitionReport {
    let w = RadialWindow;
    let taper = CurveTaper::default();
    let low = LowPass::new(grid.j_min());
    let high = HighPass::new(grid.j_max());
    let n = samples.max(1);
    let unit = |i: usize| if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };

    let mut rep = PartitionReport {
        samples: n,
        radial: 0.0,
        angular: 0.0,
        taper: 0.0,
        lowpass: 0.0,
    };
    for i in 0..n {
        let u = unit(i);

        // r over one dyadic octave is enough by scale invariance; sample two
        let r = 2f64.powf(2.0 * u - 1.0);
        let sr: f64 = (-4..=4).map(|j| w.at_scale(r, j).powi(2)).sum();
        rep.radial = rep.radial.max((sr - 1.0).abs());

        let t = 2.0 * u - 1.0;
        let sv: f64 = (-2..=2).map(|l| v.eval(t - l as f64).powi(2)).sum();
        rep.angular = rep.angular.max((sv - 1.0).abs());

        let s = u;
        let st = taper.eval(s) + taper.eval(s - 1.0);
        rep.taper = rep.taper.max((st - 1.0).abs());

        let rr = u * grid.size() as f64 * std::f64::consts::FRAC_1_SQRT_2;
        let mut sl = low.eval(rr).powi(2) + high.eval(rr).powi(2);
        for j in grid.scales() {
            sl += w.at_scale(rr, j).powi(2);
        }
        rep.lowpass = rep.lowpass.max((sl - 1.0).abs());
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_examples() {
        let w = RadialWindow;
        assert_eq!(w.eval(1.0), 1.0);
        assert_eq!(w.eval(0.5), 0.0);
        assert_eq!(w.eval(2.0), 0.0);
        let r = 2f64.sqrt();
        assert!((w.eval(r).powi(2) + w.eval(r / 2.0).powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn angular_examples() {
        let v = AngularWindow::default();
        assert_eq!(v.eval(0.0), 1.0);
        assert_eq!(v.eval(1.0), 0.0);
        assert!((v.eval(0.5).powi(2) + v.eval(-0.5).powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn taper_examples() {
        let w2 = CurveTaper::default();
        assert_eq!(w2.eval(0.0), 1.0);
        assert_eq!(w2.eval(1.5), 0.0);
        assert!((w2.eval(-0.5) + w2.eval(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn smoothstep_is_symmetric() {
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert!((smoothstep(x) + smoothstep(1.0 - x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn taper_fourier_at_zero_is_its_integral() {
        // int_{-1}^{1} (1 - s(|t|)) dt = 2 (1 - int_0^1 s) = 2 (1 - 1/2) = 1
        assert!((CurveTaper::default().fourier(0.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn taper_fourier_matches_trapezoid() {
        let w2 = CurveTaper::default();
        let m = 200_000;
        for &om in &[0.3, 1.7, 6.25] {
            let h = 2.0 / m as f64;
            let direct: f64 = (0..=m)
                .map(|i| {
                    let t = -1.0 + i as f64 * h;
                    let wt = if i == 0 || i == m { 0.5 } else { 1.0 };
                    wt * w2.eval(t) * (2.0 * PI * om * t).cos()
                })
                .sum::<f64>()
                * h;
            assert!((w2.fourier(om) - direct).abs() < 1e-9, "omega {om}");
        }
    }

    #[test]
    fn partitions_hold_densely() {
        let g = GridSpec::new(512, 3, 7).unwrap();
        let rep = verify_partitions(&g, 100_000);
        assert!(rep.max() <= 1e-10, "{rep:?}");
    }

    #[test]
    fn broken_angular_window_is_reported() {
        let g = GridSpec::new(256, 3, 6).unwrap();
        let rep = verify_partitions_with(&g, 10_000, AngularWindow::with_gain(0.9));
        assert!((rep.angular - 0.19).abs() < 1e-12, "{rep:?}");
        assert!(rep.radial <= 1e-10);
    }

    #[test]
    fn single_sample_report_is_valid() {
        let g = GridSpec::new(64, 2, 4).unwrap();
        let rep = verify_partitions(&g, 1);
        assert_eq!(rep.samples, 1);
        assert!(rep.max().is_finite());
    }

    #[test]
    fn radial_window_is_smooth() {
        // second differences stay bounded at a fine step
        let w = RadialWindow;
        let h = 1e-4;
        let mut worst: f64 = 0.0;
        let mut r = 0.4;
        while r < 2.1 {
            let d2 = (w.eval(r + h) - 2.0 * w.eval(r) + w.eval(r - h)) / (h * h);
            worst = worst.max(d2.abs());
            r += 1.3e-3;
        }
        assert!(worst < 100.0, "{worst}");
    }
}
