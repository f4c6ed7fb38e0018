//! Primal-dual solver for `min_x ||T1 x||_1 + ||T2 (s - x)||_1`.
//!
//! Both `T1` and `T2` must be isometries (`Ti^T Ti = I`) on the primal space,
//! which is what restricting two Parseval frames to a band gives. With
//! `K = [T1; -T2]` the problem is `min g(K x)`, `g(z) = ||z1||_1 + ||z2 + T2 s||_1`,
//! and `||K||^2 = 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear operators of a two-frame split on a real primal space.
pub trait SplitOperator {
    fn dim(&self) -> usize;
    fn coeff_len(&self, side: usize) -> usize;
    /// `out = T_side x`.
    fn analysis(&mut self, side: usize, x: &[f64], out: &mut [f64]);
    /// `out = T_side^T c`.
    fn synthesis(&mut self, side: usize, c: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop once the duality gap falls below this fraction of the objective.
    pub relative_gap_tol: f64,
    /// Primal step; `None` picks `tau = gamma / sqrt(2)` with `gamma` from the data scale.
    pub tau: Option<f64>,
    /// Dual step; `None` picks `0.99 / (2 tau)`.
    pub sigma: Option<f64>,
    /// Over-relaxation in `[1, 2)`.
    pub relaxation: f64,
    /// Stall window: stop when the best objective improved by less than
    /// `stall_tol` (relative) over this many iterations.
    pub stall_window: usize,
    pub stall_tol: f64,
    /// Iterations between duality-gap evaluations.
    pub check_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            relative_gap_tol: 1e-3,
            tau: None,
            sigma: None,
            relaxation: 1.8,
            stall_window: 25,
            stall_tol: 1e-7,
            check_every: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive".into());
        }
        if !(self.relative_gap_tol > 0.0) {
            return bad(format!("relative_gap_tol {} must be > 0", self.relative_gap_tol));
        }
        if !(1.0..2.0).contains(&self.relaxation) {
            return bad(format!("relaxation {} outside [1, 2)", self.relaxation));
        }
        if let (Some(t), Some(s)) = (self.tau, self.sigma) {
            if !(t > 0.0 && s > 0.0) || t * s * 2.0 > 1.0 {
                return bad(format!("steps tau={t}, sigma={s} violate 2 tau sigma <= 1"));
            }
        }
        if self.check_every == 0 || self.stall_window == 0 {
            return bad("check_every and stall_window must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Gap,
    Stall,
    MaxIterations,
    Trivial,
}

#[derive(Debug, Clone)]
pub struct SplitSolution {
    /// Best primal iterate: the first component; `s - x` is the second.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Lower bound from the best dual certificate.
    pub dual: f64,
    /// Best objective after each iteration (non-increasing).
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
}

impl SplitSolution {
    pub fn gap(&self) -> f64 {
        (self.objective - self.dual).max(0.0)
    }

    pub fn relative_gap(&self) -> f64 {
        if self.objective > 0.0 {
            self.gap() / self.objective
        } else {
            0.0
        }
    }

    pub fn converged(&self) -> bool {
        self.stop != StopReason::MaxIterations
    }
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn objective<O: SplitOperator>(op: &mut O, s: &[f64], x: &[f64]) -> f64 {
    let mut c1 = vec![0.0; op.coeff_len(0)];
    let mut c2 = vec![0.0; op.coeff_len(1)];
    let r: Vec<f64> = s.iter().zip(x).map(|(a, b)| a - b).collect();
    op.analysis(0, x, &mut c1);
    op.analysis(1, &r, &mut c2);
    l1(&c1) + l1(&c2)
}

/// Solves the split problem from `x = s / 2`.
pub fn solve_split<O: SplitOperator>(op: &mut O, s: &[f64], cfg: &SolverConfig) -> Result<SplitSolution> {
    cfg.validate()?;
    let n = op.dim();
    let (m1, m2) = (op.coeff_len(0), op.coeff_len(1));
    if s.len() != n {
        return Err(Error::InvalidParameter(format!("signal length {} != {n}", s.len())));
    }
    let s_norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    if s_norm == 0.0 {
        return Ok(SplitSolution {
            x: vec![0.0; n],
            objective: 0.0,
            dual: 0.0,
            trace: vec![0.0],
            iterations: 0,
            stop: StopReason::Trivial,
        });
    }

    let mut b = vec![0.0; m2];
    op.analysis(1, s, &mut b);

    let tau = cfg.tau.unwrap_or_else(|| {
        // balance primal magnitude against the unit dual box
        let gamma = s_norm / ((m1 + m2) as f64).sqrt();
        gamma / 2f64.sqrt()
    });
    let sigma = cfg.sigma.unwrap_or(0.99 / (2.0 * tau));
    let rho = cfg.relaxation;

    let mut x: Vec<f64> = s.iter().map(|v| 0.5 * v).collect();
    // kx = [T1 x; T2 x]; the sign of the second block is applied inline
    let mut k1 = vec![0.0; m1];
    let mut k2 = vec![0.0; m2];
    op.analysis(0, &x, &mut k1);
    op.analysis(1, &x, &mut k2);
    let mut y1 = vec![0.0; m1];
    let mut y2 = vec![0.0; m2];

    let mut xt = vec![0.0; n];
    let mut kt1 = vec![0.0; m1];
    let mut kt2 = vec![0.0; m2];
    let mut ky = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut g1 = vec![0.0; m1];
    let mut g2 = vec![0.0; m2];

    let obj_of = |k1: &[f64], k2: &[f64]| l1(k1) + k2.iter().zip(&b).map(|(k, b)| (b - k).abs()).sum::<f64>();

    let mut best_x = x.clone();
    let mut best = obj_of(&k1, &k2);
    let mut dual = f64::NEG_INFINITY;
    let mut trace = Vec::with_capacity(cfg.max_iterations.min(100_000));
    let mut stop = StopReason::MaxIterations;
    let mut it = 0;

    while it < cfg.max_iterations {
        it += 1;
        // K^T y = T1^T y1 - T2^T y2
        op.synthesis(0, &y1, &mut ky);
        op.synthesis(1, &y2, &mut tmp);
        for (a, b) in ky.iter_mut().zip(&tmp) {
            *a -= b;
        }
        for ((xt, x), k) in xt.iter_mut().zip(&x).zip(&ky) {
            *xt = x - tau * k;
        }
        op.analysis(0, &xt, &mut kt1);
        op.analysis(1, &xt, &mut kt2);

        // y~ = clip(y + sigma K (2 x~ - x)), second block shifted by sigma T2 s
        for i in 0..m1 {
            let v = y1[i] + sigma * (2.0 * kt1[i] - k1[i]);
            let yt = v.clamp(-1.0, 1.0);
            y1[i] += rho * (yt - y1[i]);
        }
        for i in 0..m2 {
            let v = y2[i] - sigma * (2.0 * kt2[i] - k2[i]) + sigma * b[i];
            let yt = v.clamp(-1.0, 1.0);
            y2[i] += rho * (yt - y2[i]);
        }
        for i in 0..n {
            x[i] += rho * (xt[i] - x[i]);
        }
        for i in 0..m1 {
            k1[i] += rho * (kt1[i] - k1[i]);
        }
        for i in 0..m2 {
            k2[i] += rho * (kt2[i] - k2[i]);
        }

        let obj = obj_of(&k1, &k2);
        if obj < best {
            best = obj;
            best_x.copy_from_slice(&x);
        }
        trace.push(best);

        if it % cfg.check_every == 0 {
            dual = dual.max(certificate(op, &y1, &y2, &b, &mut ky, &mut tmp, &mut g1, &mut g2));
            if best - dual <= cfg.relative_gap_tol * best {
                stop = StopReason::Gap;
                break;
            }
        }
        if trace.len() > cfg.stall_window {
            let old = trace[trace.len() - 1 - cfg.stall_window];
            if old - best <= cfg.stall_tol * best {
                stop = StopReason::Stall;
                break;
            }
        }
    }
    if stop != StopReason::Gap {
        dual = dual.max(certificate(op, &y1, &y2, &b, &mut ky, &mut tmp, &mut g1, &mut g2));
    }
    Ok(SplitSolution {
        x: best_x,
        objective: best,
        dual: dual.min(best),
        trace,
        iterations: it,
        stop,
    })
}

/// Dual objective of `y` after projecting onto `K^T y = 0` and scaling into
/// the unit box. Any such point bounds the optimum from below.
#[allow(clippy::too_many_arguments)]
fn certificate<O: SplitOperator>(
    op: &mut O,
    y1: &[f64],
    y2: &[f64],
    b: &[f64],
    r: &mut [f64],
    tmp: &mut [f64],
    g1: &mut [f64],
    g2: &mut [f64],
) -> f64 {
    op.synthesis(0, y1, r);
    op.synthesis(1, y2, tmp);
    for (a, b) in r.iter_mut().zip(tmp.iter()) {
        *a -= b;
    }
    op.analysis(0, r, g1);
    op.analysis(1, r, g2);
    let mut inf: f64 = 1.0;
    for (g, y) in g1.iter_mut().zip(y1) {
        *g = y - 0.5 * *g;
        inf = inf.max(g.abs());
    }
    for (g, y) in g2.iter_mut().zip(y2) {
        *g = y + 0.5 * *g;
        inf = inf.max(g.abs());
    }
    dot(g2, b) / inf
}
