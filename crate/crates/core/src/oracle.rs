//! Exact separation on tiny instances by vertex enumeration, and exact
//! checks of the recovery bounds.
//!
//! The objective `x -> ||Phi1^T x||_1 + ||Phi2^T (s - x)||_1` is convex,
//! piecewise linear and coercive, so its minimum is attained at a vertex of
//! the hyperplane arrangement `{phi_i . x = 0} u {psi_k . x = psi_k . s}`.
//! Every vertex is pinned by `n` linearly independent rows.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::coherence::{noisy_recovery_bound, recovery_bound};
use crate::error::{Error, Result};
use crate::separator::{solve_split, SolverConfig, SplitOperator};

pub const MAX_DIM: usize = 8;
pub const MAX_ATOMS: usize = 24;

/// Two Parseval frames of `R^n` (columns are atoms), a signal and its
/// ground-truth split with one cluster per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinyInstance {
    pub n: usize,
    /// `n x m1`, row-major.
    pub phi1: Vec<Vec<f64>>,
    /// `n x m2`, row-major.
    pub phi2: Vec<Vec<f64>>,
    pub s: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub cluster1: Vec<usize>,
    pub cluster2: Vec<usize>,
}

fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, k| rows[i][k])
}

fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn l1(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Random Parseval frame of `m >= n` atoms in `R^n`, as an `n x m` matrix
/// with orthonormal rows.
pub fn random_parseval(n: usize, m: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    assert!(m >= n && n > 0);
    parseval_from(DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(rng)))
}

/// Parseval frame spanned by the columns of an `m x n` matrix of full rank.
fn parseval_from(g: DMatrix<f64>) -> DMatrix<f64> {
    g.qr().q().transpose()
}

impl TinyInstance {
    pub fn new(
        phi1: &DMatrix<f64>,
        phi2: &DMatrix<f64>,
        s1: Vec<f64>,
        s2: Vec<f64>,
        cluster1: Vec<usize>,
        cluster2: Vec<usize>,
    ) -> Result<Self> {
        let s = s1.iter().zip(&s2).map(|(a, b)| a + b).collect();
        let inst = Self {
            n: phi1.nrows(),
            phi1: from_matrix(phi1),
            phi2: from_matrix(phi2),
            s,
            s1,
            s2,
            cluster1,
            cluster2,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let n = self.n;
        if n == 0 || n > MAX_DIM {
            return bad(format!("dimension {n} outside 1..={MAX_DIM}"));
        }
        if self.phi1.len() != n || self.phi2.len() != n {
            return bad("frame matrices need n rows".into());
        }
        let (m1, m2) = (self.m1(), self.m2());
        if self.phi1.iter().any(|r| r.len() != m1) || self.phi2.iter().any(|r| r.len() != m2) {
            return bad("ragged frame matrix".into());
        }
        if m1 + m2 > MAX_ATOMS {
            return bad(format!("{} atoms exceed {MAX_ATOMS}", m1 + m2));
        }
        if [&self.s, &self.s1, &self.s2].iter().any(|v| v.len() != n) {
            return bad("signals need length n".into());
        }
        for (name, phi) in [("phi1", &self.phi1), ("phi2", &self.phi2)] {
            let p = to_matrix(phi);
            let err = (&p * p.transpose() - DMatrix::identity(n, n)).amax();
            if err > 1e-12 {
                return bad(format!("{name} is not Parseval (deviation {err:.2e})"));
            }
        }
        let split_err = self
            .s
            .iter()
            .zip(&self.s1)
            .zip(&self.s2)
            .map(|((s, a), b)| (s - a - b).abs())
            .fold(0.0, f64::max);
        if split_err > 1e-12 * norm2(&self.s).max(1.0) {
            return bad(format!("ground truth does not add up to the signal ({split_err:.2e})"));
        }
        if self.cluster1.iter().any(|&i| i >= m1) || self.cluster2.iter().any(|&i| i >= m2) {
            return bad("cluster index out of range".into());
        }
        Ok(())
    }

    pub fn m1(&self) -> usize {
        self.phi1.first().map_or(0, |r| r.len())
    }

    pub fn m2(&self) -> usize {
        self.phi2.first().map_or(0, |r| r.len())
    }

    pub fn frames(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        (to_matrix(&self.phi1), to_matrix(&self.phi2))
    }

    /// `||Phi1^T x||_1 + ||Phi2^T (s - x)||_1`.
    pub fn objective_at(&self, s: &[f64], x: &[f64]) -> f64 {
        let (p1, p2) = self.frames();
        let x = DVector::from_column_slice(x);
        let r = DVector::from_column_slice(s) - &x;
        l1(&(p1.transpose() * x)) + l1(&(p2.transpose() * r))
    }

    /// Relative sparsity defects `(delta_1, delta_2)` of the ground truth.
    pub fn deltas(&self) -> (f64, f64) {
        let (p1, p2) = self.frames();
        let a = p1.transpose() * DVector::from_column_slice(&self.s1);
        let b = p2.transpose() * DVector::from_column_slice(&self.s2);
        let off = |v: &DVector<f64>, keep: &[usize]| {
            v.iter()
                .enumerate()
                .filter(|(i, _)| !keep.contains(i))
                .map(|(_, x)| x.abs())
                .sum::<f64>()
        };
        (off(&a, &self.cluster1), off(&b, &self.cluster2))
    }

    /// Exact cluster coherences `(mu_c(S1, Phi1; Phi2), mu_c(S2, Phi2; Phi1))`.
    pub fn cluster_coherences(&self) -> (f64, f64) {
        let (p1, p2) = self.frames();
        let g = p1.transpose() * p2;
        let mu1 = (0..g.ncols())
            .map(|k| self.cluster1.iter().map(|&i| g[(i, k)].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mu2 = (0..g.nrows())
            .map(|i| self.cluster2.iter().map(|&k| g[(i, k)].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        (mu1, mu2)
    }

    pub fn kappa_upper(&self) -> f64 {
        let (a, b) = self.cluster_coherences();
        a.max(b)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(s)?;
        inst.validate()?;
        Ok(inst)
    }
}

/// Result of the exhaustive search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub objective: f64,
    /// First components of every vertex within `1e-12` of the optimum.
    pub optima: Vec<Vec<f64>>,
    /// Full-rank row subsets evaluated.
    pub candidates: usize,
}

/// Exact minimizer for the instance's own signal.
pub fn exact_separation(inst: &TinyInstance) -> Result<ExactSolution> {
    exact_separation_for(inst, &inst.s)
}

/// Exact minimizer of the split problem for signal `s` over the instance
/// frames.
pub fn exact_separation_for(inst: &TinyInstance, s: &[f64]) -> Result<ExactSolution> {
    inst.validate()?;
    let n = inst.n;
    if s.len() != n {
        return Err(Error::InvalidParameter(format!("signal length {} != {n}", s.len())));
    }
    if s.iter().all(|v| *v == 0.0) {
        return Ok(ExactSolution {
            s1: vec![0.0; n],
            s2: vec![0.0; n],
            objective: 0.0,
            optima: vec![vec![0.0; n]],
            candidates: 0,
        });
    }
    let (p1, p2) = inst.frames();
    let (m1, m2) = (p1.ncols(), p2.ncols());
    let sv = DVector::from_column_slice(s);
    // row r of the arrangement: a_r . x = c_r
    let rows = DMatrix::from_fn(m1 + m2, n, |r, i| if r < m1 { p1[(i, r)] } else { p2[(i, r - m1)] });
    let rhs: Vec<f64> = (0..m1 + m2)
        .map(|r| if r < m1 { 0.0 } else { p2.column(r - m1).dot(&sv) })
        .collect();
    let objective = |x: &DVector<f64>| {
        let a = &rows * x;
        (0..m1 + m2).map(|r| (a[r] - rhs[r]).abs()).sum::<f64>()
    };

    let mut best = f64::INFINITY;
    let mut vertices: Vec<(f64, DVector<f64>)> = Vec::new();
    let mut candidates = 0;
    for subset in (0..m1 + m2).combinations(n) {
        let a = DMatrix::from_fn(n, n, |i, k| rows[(subset[i], k)]);
        let lu = a.lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let b = DVector::from_iterator(n, subset.iter().map(|&r| rhs[r]));
        let Some(x) = lu.solve(&b) else {
            continue;
        };
        candidates += 1;
        let f = objective(&x);
        best = best.min(f);
        vertices.push((f, x));
    }
    if candidates == 0 {
        return Err(Error::Degenerate("no full-rank row subset".into()));
    }
    let tol = 1e-12 * best.max(1.0);
    let mut optima: Vec<DVector<f64>> = Vec::new();
    for (f, x) in vertices {
        if f <= best + tol && !optima.iter().any(|o| (o - &x).amax() <= 1e-10) {
            optima.push(x);
        }
    }
    let x = &optima[0];
    Ok(ExactSolution {
        s1: x.iter().copied().collect(),
        s2: (&sv - x).iter().copied().collect(),
        objective: best,
        optima: optima.iter().map(|o| o.iter().copied().collect()).collect(),
        candidates,
    })
}

/// Outcome of one bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `kappa_upper < 1/2`; otherwise nothing is asserted.
    pub applicable: bool,
    pub delta: f64,
    pub kappa_upper: f64,
    /// Largest `||S1* - S1^0|| + ||S2* - S2^0||` over all optimal vertices.
    pub error: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// False when the bound exceeds `||S1^0|| + ||S2^0|| + ||noise||`, so it
    /// says nothing a trivial estimate would not.
    pub informative: bool,
}

fn worst_error(inst: &TinyInstance, s: &[f64], sol: &ExactSolution) -> f64 {
    sol.optima
        .iter()
        .map(|x| {
            let e1: Vec<f64> = x.iter().zip(&inst.s1).map(|(a, b)| a - b).collect();
            let e2: Vec<f64> = s
                .iter()
                .zip(x)
                .zip(&inst.s2)
                .map(|((s, a), b)| s - a - b)
                .collect();
            norm2(&e1) + norm2(&e2)
        })
        .fold(0.0, f64::max)
}

fn check(inst: &TinyInstance, s: &[f64], bound: f64, delta: f64, kappa: f64, slack: f64) -> Result<BoundReport> {
    let applicable = kappa < 0.5;
    let sol = exact_separation_for(inst, s)?;
    let error = worst_error(inst, s, &sol);
    let noise: Vec<f64> = s.iter().zip(&inst.s).map(|(a, b)| a - b).collect();
    let scale = norm2(&inst.s1) + norm2(&inst.s2) + norm2(&noise);
    Ok(BoundReport {
        applicable,
        delta,
        kappa_upper: kappa,
        error,
        bound,
        satisfied: !applicable || error <= bound + slack,
        informative: applicable && bound < scale,
    })
}

/// Checks `||S1* - S1^0|| + ||S2* - S2^0|| <= 2 delta / (1 - 2 kappa)` for
/// every exact minimizer.
pub fn verify_recovery_bound(inst: &TinyInstance) -> Result<BoundReport> {
    verify_bound_scaled(inst, 1.0)
}

/// As [`verify_recovery_bound`] with the bound multiplied by `factor` (a harness
/// self-test uses `0.5`).
pub fn verify_bound_scaled(inst: &TinyInstance, factor: f64) -> Result<BoundReport> {
    let (d1, d2) = inst.deltas();
    let kappa = inst.kappa_upper();
    let bound = recovery_bound(d1 + d2, kappa) * factor;
    check(inst, &inst.s.clone(), bound, d1 + d2, kappa, 1e-9)
}

/// Checks the noisy bound `(2 delta + 5 eps) / (1 - 2 kappa)` for the signal
/// `s + noise`. Requires `||Phi_i^T noise||_1 < eps` for some `i`.
pub fn verify_noise_bound(inst: &TinyInstance, noise: &[f64], eps: f64) -> Result<BoundReport> {
    verify_noise_bound_scaled(inst, noise, eps, 1.0)
}

pub fn verify_noise_bound_scaled(inst: &TinyInstance, noise: &[f64], eps: f64, factor: f64) -> Result<BoundReport> {
    if noise.len() != inst.n {
        return Err(Error::InvalidParameter(format!("noise length {} != {}", noise.len(), inst.n)));
    }
    let (p1, p2) = inst.frames();
    let nv = DVector::from_column_slice(noise);
    let small = l1(&(p1.transpose() * &nv)).min(l1(&(p2.transpose() * &nv)));
    if !(small < eps) && noise.iter().any(|v| *v != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise analysis l1 norm {small:.3e} is not below eps {eps:.3e}"
        )));
    }
    let (d1, d2) = inst.deltas();
    let kappa = inst.kappa_upper();
    let bound = noisy_recovery_bound(d1 + d2, eps, kappa) * factor;
    let s: Vec<f64> = inst.s.iter().zip(noise).map(|(a, b)| a + b).collect();
    check(inst, &s, bound, d1 + d2, kappa, 1e-9)
}

/// Sizes and cluster shapes for random instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceShape {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub cluster1: usize,
    pub cluster2: usize,
    /// Standard deviation of the off-cluster synthesis coefficients (the
    /// on-cluster ones have unit deviation).
    pub off_cluster: f64,
}

/// Random instance: random Parseval frames, random clusters and components
/// synthesized from cluster-supported coefficients plus an off-cluster
/// perturbation.
pub fn random_instance(shape: InstanceShape, rng: &mut impl Rng) -> Result<TinyInstance> {
    let InstanceShape {
        n,
        m1,
        m2,
        cluster1,
        cluster2,
        off_cluster,
    } = shape;
    if m1 < n || m2 < n || cluster1 > m1 || cluster2 > m2 || !(off_cluster >= 0.0) {
        return Err(Error::InvalidParameter(format!("bad instance shape {shape:?}")));
    }
    let p1 = random_parseval(n, m1, rng);
    let p2 = random_parseval(n, m2, rng);
    let pick = |m: usize, k: usize, rng: &mut dyn rand::RngCore| {
        let mut idx = rand::seq::index::sample(rng, m, k).into_vec();
        idx.sort_unstable();
        idx
    };
    let c1 = pick(m1, cluster1, rng);
    let c2 = pick(m2, cluster2, rng);
    let component = |p: &DMatrix<f64>, c: &[usize], rng: &mut dyn rand::RngCore| {
        let mut coef = DVector::from_fn(p.ncols(), |_, _| {
            let z: f64 = StandardNormal.sample(&mut *rng);
            off_cluster * z
        });
        for &i in c {
            coef[i] = StandardNormal.sample(&mut *rng);
        }
        (p * coef).iter().copied().collect::<Vec<f64>>()
    };
    let s1 = component(&p1, &c1, rng);
    let s2 = component(&p2, &c2, rng);
    TinyInstance::new(&p1, &p2, s1, s2, c1, c2)
}

/// Random instance with `kappa_upper < 1/2`, by rejection over shapes.
pub fn random_applicable_instance(rng: &mut impl Rng) -> Result<TinyInstance> {
    for _ in 0..10_000 {
        let n = rng.random_range(2..=4);
        let m1 = rng.random_range(n..=n + 3);
        let m2 = rng.random_range(n..=n + 3);
        let shape = InstanceShape {
            n,
            m1,
            m2,
            cluster1: rng.random_range(1..=2),
            cluster2: rng.random_range(1..=2),
            // from nearly cluster-sparse to far from it, so the bound is also
            // exercised where it is tight
            off_cluster: 10f64.powf(rng.random_range(-2.0..0.5)),
        };
        let inst = random_instance(shape, rng)?;
        if inst.kappa_upper() < 0.5 {
            return Ok(inst);
        }
    }
    Err(Error::Degenerate("no applicable instance found".into()))
}

fn tightness(inst: &TinyInstance) -> Result<Option<f64>> {
    let r = verify_recovery_bound(inst)?;
    Ok((r.applicable && r.bound > 0.0).then(|| r.error / r.bound))
}

/// Searches for an applicable instance in `R^2` with a large
/// `error / bound` by random-restart hill climbing over the frame generators
/// and synthesis coefficients. Returns the best instance and its ratio.
pub fn adversarial_instance(rng: &mut impl Rng, restarts: usize, steps: usize) -> Result<(TinyInstance, f64)> {
    struct Draw {
        g1: DMatrix<f64>,
        g2: DMatrix<f64>,
        a1: DVector<f64>,
        a2: DVector<f64>,
    }
    let build = |d: &Draw| -> Result<Option<(TinyInstance, f64)>> {
        let (p1, p2) = (parseval_from(d.g1.clone()), parseval_from(d.g2.clone()));
        let Ok(inst) = TinyInstance::new(
            &p1,
            &p2,
            (&p1 * &d.a1).iter().copied().collect(),
            (&p2 * &d.a2).iter().copied().collect(),
            vec![0],
            vec![0],
        ) else {
            return Ok(None);
        };
        Ok(tightness(&inst)?.map(|r| (inst, r)))
    };
    let n = 2;
    let mut best: Option<(TinyInstance, f64)> = None;
    for _ in 0..restarts {
        let mut start = None;
        for _ in 0..10_000 {
            let (m1, m2) = (rng.random_range(3..=5), rng.random_range(3..=5));
            let mut gauss = |r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(&mut *rng));
            let d = Draw {
                g1: gauss(m1, n),
                g2: gauss(m2, n),
                a1: gauss(m1, 1).column(0).into(),
                a2: gauss(m2, 1).column(0).into(),
            };
            if let Some(found) = build(&d)? {
                start = Some((d, found));
                break;
            }
        }
        let Some((mut cur, mut cur_best)) = start else {
            return Err(Error::Degenerate("no applicable instance found".into()));
        };
        let (m1, m2) = (cur.a1.len(), cur.a2.len());
        for _ in 0..steps {
            let mut jitter = |m: &DMatrix<f64>| m + DMatrix::from_fn(m.nrows(), m.ncols(), |_, _| {
                let z: f64 = StandardNormal.sample(&mut *rng);
                0.3 * z
            });
            let cand = Draw {
                g1: jitter(&cur.g1),
                g2: jitter(&cur.g2),
                a1: jitter(&DMatrix::from_column_slice(m1, 1, cur.a1.as_slice())).column(0).into(),
                a2: jitter(&DMatrix::from_column_slice(m2, 1, cur.a2.as_slice())).column(0).into(),
            };
            if let Some(found) = build(&cand)? {
                if found.1 > cur_best.1 {
                    cur_best = found;
                    cur = cand;
                }
            }
        }
        if best.as_ref().is_none_or(|b| cur_best.1 > b.1) {
            best = Some(cur_best);
        }
    }
    best.ok_or_else(|| Error::Degenerate("no applicable instance found".into()))
}

/// Dense split operator `T1 = Phi1^T`, `T2 = Phi2^T` for the iterative solver.
pub struct DenseSplit {
    t: [DMatrix<f64>; 2],
}

impl DenseSplit {
    pub fn new(inst: &TinyInstance) -> Self {
        let (p1, p2) = inst.frames();
        Self {
            t: [p1.transpose(), p2.transpose()],
        }
    }
}

impl SplitOperator for DenseSplit {
    fn dim(&self) -> usize {
        self.t[0].ncols()
    }

    fn coeff_len(&self, side: usize) -> usize {
        self.t[side].nrows()
    }

    fn analysis(&mut self, side: usize, x: &[f64], out: &mut [f64]) {
        let t = &self.t[side];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..t.ncols()).map(|c| t[(r, c)] * x[c]).sum();
        }
    }

    fn synthesis(&mut self, side: usize, c: &[f64], out: &mut [f64]) {
        let t = &self.t[side];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (0..t.nrows()).map(|r| t[(r, k)] * c[r]).sum();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Clean,
    Noisy,
    /// Clean instances hill-climbed towards a large `error / bound`.
    Adversarial,
}

/// Summary of a seeded sweep of bound checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub kind: SweepKind,
    pub seed: u64,
    pub instances: usize,
    pub violations: usize,
    pub uninformative: usize,
    /// Largest `error / bound` seen.
    pub worst_ratio: f64,
    pub bound_factor: f64,
}

/// Runs `count` bound checks on seeded applicable instances. For the noisy
/// kind, `eps` is set just above the smaller of the two noise analysis norms.
pub fn sweep(kind: SweepKind, count: usize, seed: u64, bound_factor: f64) -> Result<SweepSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut uninformative = 0;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..count {
        let inst = random_applicable_instance(&mut rng)?;
        let report = match kind {
            SweepKind::Clean => verify_bound_scaled(&inst, bound_factor)?,
            SweepKind::Adversarial => {
                let (inst, _) = adversarial_instance(&mut rng, 8, 200)?;
                verify_bound_scaled(&inst, bound_factor)?
            }
            SweepKind::Noisy => {
                let level = 10f64.powf(rng.random_range(-3.0..-0.5)) * norm2(&inst.s);
                let mut noise: Vec<f64> = (0..inst.n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let nn = norm2(&noise);
                noise.iter_mut().for_each(|v| *v *= level / nn);
                let (p1, p2) = inst.frames();
                let nv = DVector::from_column_slice(&noise);
                let eps = l1(&(p1.transpose() * &nv)).min(l1(&(p2.transpose() * &nv))) * (1.0 + 1e-9) + 1e-300;
                verify_noise_bound_scaled(&inst, &noise, eps, bound_factor)?
            }
        };
        if !report.satisfied {
            violations += 1;
        }
        if !report.informative {
            uninformative += 1;
        }
        if report.bound > 0.0 {
            worst_ratio = worst_ratio.max(report.error / report.bound);
        }
    }
    Ok(SweepSummary {
        kind,
        seed,
        instances: count,
        violations,
        uninformative,
        worst_ratio,
        bound_factor,
    })
}

/// Solver settings for certification: tight gap, no stall exit.
pub fn certification_config() -> SolverConfig {
    SolverConfig {
        max_iterations: 200_000,
        relative_gap_tol: 1e-9,
        stall_window: 200_000,
        ..Default::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationSummary {
    pub seed: u64,
    pub instances: usize,
    /// Instances where the solver objective is off by more than `tol` (relative).
    pub mismatches: usize,
    pub worst_relative_error: f64,
    pub tol: f64,
}

/// Runs the iterative solver on seeded applicable instances and compares
/// its objective with the exact one.
pub fn certify_solver(count: usize, seed: u64, tol: f64) -> Result<CertificationSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = certification_config();
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let inst = random_applicable_instance(&mut rng)?;
        let exact = exact_separation(&inst)?;
        let sol = solve_split(&mut DenseSplit::new(&inst), &inst.s, &cfg)?;
        let rel = (sol.objective - exact.objective).abs() / exact.objective.max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if rel > tol {
            mismatches += 1;
        }
    }
    Ok(CertificationSummary {
        seed,
        instances: count,
        mismatches,
        worst_relative_error: worst,
        tol,
    })
}
