//! Analysis-side l1 separation of each subband into a wavelet-sparse and a
//! curvelet-sparse part, and aggregation over scales.

mod band;
pub mod solver;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FramePair;
use crate::spectral_grid::{forward_dft, inverse_dft_real_part, Field, Spectrum};
use crate::stats::ls_slope;
use crate::subband::{filter_spectrum, ResidualRouting, SubbandStack};

pub(crate) use band::BandOperator;
pub use solver::{solve_split, SolverConfig, SplitOperator, SplitSolution, StopReason};

/// One subband split `f_j = W_j + C_j`.
#[derive(Debug, Clone)]
pub struct SubbandSeparation {
    pub j: i32,
    pub w: Field,
    pub c: Field,
    pub objective: f64,
    /// Best dual bound found; `objective - dual` certifies optimality.
    pub dual: f64,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
    pub feasibility_residual: f64,
}

impl SubbandSeparation {
    pub fn converged(&self) -> bool {
        self.stop != StopReason::MaxIterations
    }

    pub fn relative_gap(&self) -> f64 {
        if self.objective > 0.0 {
            ((self.objective - self.dual) / self.objective).max(0.0)
        } else {
            0.0
        }
    }
}

/// Subbands `j_min..=j_max`, or `j_max + 1` for the high-pass closure.
fn check_split_slot(pair: &FramePair, j: i32) -> Result<()> {
    let g = pair.grid();
    if j == g.j_max() + 1 {
        Ok(())
    } else {
        g.check_scale(j)
    }
}

/// Splits the band-limited piece `f_j` (given by its spectrum). `j` may also
/// be `j_max + 1`, the high-pass closure.
pub fn separate_subband_spectrum(
    fj: &Spectrum,
    j: i32,
    pair: &FramePair,
    cfg: &SolverConfig,
) -> Result<SubbandSeparation> {
    check_split_slot(pair, j)?;
    if fj.grid() != pair.grid() {
        return Err(Error::GridMismatch);
    }
    let mut op = BandOperator::new(pair, j, true);
    let s = op.pack(fj);
    let sol = solve_split(&mut op, &s, cfg)?;
    let w = inverse_dft_real_part(&op.unpack(&sol.x));
    let f = inverse_dft_real_part(fj);
    let c = f.sub(&w);
    let feasibility_residual = w.add(&c).sub(&f).norm();
    if !sol.converged() {
        log::warn!("scale {j}: stopped at {} iterations, gap {:.3e}", sol.iterations, sol.relative_gap());
    }
    Ok(SubbandSeparation {
        j,
        w,
        c,
        objective: sol.objective,
        dual: sol.dual,
        objective_trace: sol.trace,
        iterations: sol.iterations,
        stop: sol.stop,
        feasibility_residual,
    })
}

pub fn separate_subband(fj: &Field, j: i32, pair: &FramePair, cfg: &SolverConfig) -> Result<SubbandSeparation> {
    // only the part inside the annulus is seen by the restricted frames
    let s = forward_dft(fj);
    separate_subband_spectrum(&s, j, pair, cfg)
}

#[derive(Debug, Clone)]
pub struct FullSeparation {
    /// `sum_j F_j * W_j`, plus the residual when routed there.
    pub point: Field,
    /// `sum_j F_j * C_j`, plus the residual when routed there.
    pub curve: Field,
    /// Low-pass content and any slots left unsplit.
    pub residual: Field,
    pub routing: ResidualRouting,
    pub subbands: Vec<SubbandSeparation>,
}

impl FullSeparation {
    pub fn degraded(&self) -> bool {
        self.subbands.iter().any(|s| !s.converged())
    }

    pub fn subband(&self, j: i32) -> Option<&SubbandSeparation> {
        self.subbands.iter().find(|s| s.j == j)
    }
}

/// Splits every subband and the high-pass closure; only the low-pass is left
/// unsplit.
pub fn separate_full(
    f: &Field,
    pair: &FramePair,
    cfg: &SolverConfig,
    routing: ResidualRouting,
) -> Result<FullSeparation> {
    let g = pair.grid();
    separate_scales(f, pair, cfg, routing, g.scales().chain([g.j_max() + 1]))
}

/// As [`separate_full`] but splitting only the listed slots (subbands, or
/// `j_max + 1` for the high-pass closure); the others join the residual.
pub fn separate_scales(
    f: &Field,
    pair: &FramePair,
    cfg: &SolverConfig,
    routing: ResidualRouting,
    scales: impl IntoIterator<Item = i32>,
) -> Result<FullSeparation> {
    let g = *pair.grid();
    if *f.grid() != g {
        return Err(Error::GridMismatch);
    }
    let fh = forward_dft(f);
    let mut subbands = Vec::new();
    let mut p_spec = Spectrum::zeros(g);
    let mut c_spec = Spectrum::zeros(g);
    let mut done = vec![false; (g.j_max() + 2) as usize];
    for j in scales {
        check_split_slot(pair, j)?;
        let fj = filter_spectrum(&fh, j);
        let sep = separate_subband_spectrum(&fj, j, pair, cfg)?;
        p_spec = p_spec.add(&filter_spectrum(&forward_dft(&sep.w), j));
        c_spec = c_spec.add(&filter_spectrum(&forward_dft(&sep.c), j));
        done[j as usize] = true;
        subbands.push(sep);
    }
    let mut r_spec = Spectrum::zeros(g);
    for slot in g.frame_scales() {
        if slot >= g.j_min() && done[slot as usize] {
            continue;
        }
        r_spec = r_spec.add(&filter_spectrum(&filter_spectrum(&fh, slot), slot));
    }
    let residual = inverse_dft_real_part(&r_spec);
    let mut point = inverse_dft_real_part(&p_spec);
    let mut curve = inverse_dft_real_part(&c_spec);
    match routing {
        ResidualRouting::Curve => curve = curve.add(&residual),
        ResidualRouting::Point => point = point.add(&residual),
        ResidualRouting::Separate => {}
    }
    Ok(FullSeparation {
        point,
        curve,
        residual,
        routing,
        subbands,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleMetric {
    pub j: i32,
    pub err_point: f64,
    pub err_curve: f64,
    pub norm_point: f64,
    pub norm_curve: f64,
    /// `(||W_j - P_j|| + ||C_j - C_j^0||) / (||P_j|| + ||C_j^0||)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationMetrics {
    pub scales: Vec<ScaleMetric>,
    /// Scales with zero ground-truth energy.
    pub skipped: Vec<i32>,
    /// Least-squares slope of `log2 r_j` against `j`.
    pub slope: Option<f64>,
}

impl SeparationMetrics {
    pub fn ratios(&self) -> Vec<(i32, f64)> {
        self.scales.iter().map(|s| (s.j, s.ratio)).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.scales.windows(2).all(|w| w[1].ratio < w[0].ratio)
    }
}

pub fn separation_metrics(
    result: &FullSeparation,
    truth_p: &SubbandStack,
    truth_c: &SubbandStack,
) -> Result<SeparationMetrics> {
    let mut scales = Vec::new();
    let mut skipped = Vec::new();
    for sep in &result.subbands {
        if sep.j > truth_p.grid().j_max() {
            // the closure is split but not scored
            continue;
        }
        let p = truth_p.piece(sep.j)?;
        let c = truth_c.piece(sep.j)?;
        if p.grid() != sep.w.grid() || c.grid() != sep.w.grid() {
            return Err(Error::GridMismatch);
        }
        let (np, nc) = (p.norm(), c.norm());
        if np + nc == 0.0 {
            skipped.push(sep.j);
            continue;
        }
        let ep = sep.w.sub(p).norm();
        let ec = sep.c.sub(c).norm();
        scales.push(ScaleMetric {
            j: sep.j,
            err_point: ep,
            err_curve: ec,
            norm_point: np,
            norm_curve: nc,
            ratio: (ep + ec) / (np + nc),
        });
    }
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .filter(|s| s.ratio > 0.0)
        .map(|s| (s.j as f64, s.ratio.log2()))
        .collect();
    Ok(SeparationMetrics {
        slope: ls_slope(&pts),
        scales,
        skipped,
    })
}
