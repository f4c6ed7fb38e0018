//! Coherence measurements between the two frames: singleton and cluster
//! coherence, threshold and tube clusters, relative sparsity, bounds on the
//! joint concentration and the resulting error bound.
//!
//! All inner products between atoms come from [`CrossKernel`] tables, so
//! cluster sums over a tile reduce to one circular convolution of the member
//! indicator with the kernel magnitude.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::frames::{CoefficientSet, CrossKernel, FrameKind, FramePair, Layout, TileShape};
use crate::phantoms::{CurveConfig, PointConfig};
use crate::separator::{BandOperator, SplitOperator};
use crate::spectral_grid::GridSpec;
use crate::stats::ls_slope;

/// Default tube exponent.
pub const DEFAULT_EPSILON: f64 = 1.0 / 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClusterRecipe {
    Threshold { eps: f64 },
    PointTube { eps: f64 },
    CurveTube { eps: f64 },
    Explicit,
}

/// A set of atoms of one frame, all able to see subband `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub frame: FrameKind,
    pub j: i32,
    /// Sorted flat coefficient indices into the frame layout.
    pub indices: Vec<usize>,
    pub recipe: ClusterRecipe,
}

impl Cluster {
    pub fn empty(frame: FrameKind, j: i32) -> Self {
        Self {
            frame,
            j,
            indices: Vec::new(),
            recipe: ClusterRecipe::Explicit,
        }
    }

    /// Checks every index against the band `j-1 ..= j+1` of `layout`.
    pub fn new(layout: &Layout, j: i32, mut indices: Vec<usize>, recipe: ClusterRecipe) -> Result<Self> {
        layout.grid.check_scale(j)?;
        let band = layout.band_range(j);
        if let Some(&bad) = indices.iter().find(|i| !band.contains(i)) {
            return Err(Error::InvalidIndex(format!("flat index {bad} outside band of scale {j}")));
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(Self {
            frame: layout.kind,
            j,
            indices,
            recipe,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Member atom centers on the torus.
    pub fn centers(&self, layout: &Layout) -> Vec<[f64; 2]> {
        self.indices.iter().map(|&i| layout.center(i)).collect()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 / 32.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tube exponent {eps} outside (0, 1/32)")))
    }
}

/// Tube radius `a_j^(1-eps)` with `a_j = 2^-j`.
pub fn tube_radius(j: i32, eps: f64) -> f64 {
    (-(j as f64) * (1.0 - eps)).exp2()
}

/// Geodesic distance between two orientations modulo `pi`.
pub fn p1_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Band coefficients with magnitude above `eps` times the band maximum.
pub fn threshold_cluster(coeffs: &CoefficientSet, j: i32, eps: f64) -> Result<Cluster> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("threshold {eps} outside (0, 1)")));
    }
    let layout = coeffs.layout();
    layout.grid.check_scale(j)?;
    let band = layout.band_range(j);
    let vals = &coeffs.values()[band.clone()];
    let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let indices = if top == 0.0 {
        Vec::new()
    } else {
        vals.iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > eps * top)
            .map(|(i, _)| band.start + i)
            .collect()
    };
    Cluster::new(layout, j, indices, ClusterRecipe::Threshold { eps })
}

/// Wavelets of the band whose center lies within `a_j^(1-eps)` of a point.
pub fn point_tube_cluster(pair: &FramePair, cfg: &PointConfig, j: i32, eps: f64) -> Result<Cluster> {
    check_eps(eps)?;
    cfg.validate()?;
    let layout = pair.wavelet().layout();
    layout.grid.check_scale(j)?;
    let radius = tube_radius(j, eps);
    let indices = layout
        .band_range(j)
        .filter(|&i| {
            let c = layout.center(i);
            cfg.points.iter().any(|&x| GridSpec::torus_distance(c, x) <= radius)
        })
        .collect();
    Cluster::new(layout, j, indices, ClusterRecipe::PointTube { eps })
}

/// Bucketed curve nodes for nearest-node queries on the torus.
struct NodeIndex<'a> {
    cfg: &'a CurveConfig,
    cells: usize,
    buckets: Vec<Vec<usize>>,
}

impl<'a> NodeIndex<'a> {
    fn new(cfg: &'a CurveConfig, cell: f64) -> Self {
        let cells = ((1.0 / cell).floor() as usize).clamp(1, 1024);
        let mut buckets = vec![Vec::new(); cells * cells];
        for (i, n) in cfg.nodes.iter().enumerate() {
            buckets[Self::bucket(n.pos, cells)].push(i);
        }
        Self { cfg, cells, buckets }
    }

    fn bucket(p: [f64; 2], cells: usize) -> usize {
        let b = |v: f64| ((v.rem_euclid(1.0) * cells as f64) as usize).min(cells - 1);
        b(p[0]) * cells + b(p[1])
    }

    /// Nearest node among the 3x3 neighbouring buckets, if any.
    fn nearest(&self, p: [f64; 2]) -> Option<(usize, f64)> {
        let n = self.cells as i64;
        let b = Self::bucket(p, self.cells) as i64;
        let (r, c) = (b / n, b % n);
        let mut best: Option<(usize, f64)> = None;
        for dr in -1..=1 {
            for dc in -1..=1 {
                let q = (r + dr).rem_euclid(n) * n + (c + dc).rem_euclid(n);
                for &i in &self.buckets[q as usize] {
                    let d = GridSpec::torus_distance(p, self.cfg.nodes[i].pos);
                    if best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((i, d));
                    }
                }
            }
        }
        best
    }
}

/// Curvelets of the band whose center lies within `a_j^(1-eps)` of the curve
/// and whose orientation is within one angular window width of the normal
/// at the nearest curve node. Isotropic atoms are selected by position only.
pub fn curve_tube_cluster(pair: &FramePair, cfg: &CurveConfig, j: i32, eps: f64) -> Result<Cluster> {
    check_eps(eps)?;
    let layout = pair.curvelet().layout();
    layout.grid.check_scale(j)?;
    if cfg.nodes.is_empty() {
        return Cluster::new(layout, j, Vec::new(), ClusterRecipe::CurveTube { eps });
    }
    let radius = tube_radius(j, eps);
    let index = NodeIndex::new(cfg, radius);
    let mut indices = Vec::new();
    for ti in layout.tiles_at_scale(j - 1).start..layout.tiles_at_scale(j + 1).end {
        let t = layout.tiles[ti];
        for i in t.range() {
            let Some((node, d)) = index.nearest(layout.center(i)) else {
                continue;
            };
            if d > radius {
                continue;
            }
            let aligned = match t.shape {
                TileShape::Isotropic => true,
                TileShape::Wedge { orientation, count } => {
                    let theta = PI * orientation as f64 / count as f64;
                    p1_distance(theta, cfg.nodes[node].normal) <= PI / count as f64
                }
            };
            if aligned {
                indices.push(i);
            }
        }
    }
    Cluster::new(layout, j, indices, ClusterRecipe::CurveTube { eps })
}

/// l1 norm of the band coefficients outside the cluster.
pub fn relative_sparsity(coeffs: &CoefficientSet, s: &Cluster) -> Result<f64> {
    if coeffs.kind() != s.frame {
        return Err(Error::InvalidParameter("cluster and coefficients belong to different frames".into()));
    }
    let band = coeffs.layout().band_range(s.j);
    Ok(band
        .filter(|&i| !s.contains(i))
        .map(|i| coeffs.values()[i].abs())
        .sum())
}

/// Cluster coherence and the largest single inner product of a member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterCoherence {
    /// `max_psi sum_{i in S} |<phi_i, psi>|` over the opposite frame.
    pub mu_c: f64,
    /// `max_{i in S} max_psi |<phi_i, psi>|`.
    pub mu_singleton: f64,
}

pub fn cluster_coherence(s: &Cluster, pair: &FramePair) -> Result<f64> {
    Ok(cluster_coherence_full(s, pair)?.mu_c)
}

pub fn cluster_coherence_full(s: &Cluster, pair: &FramePair) -> Result<ClusterCoherence> {
    let src = pair.frame(s.frame);
    if let Some(&bad) = s.indices.iter().find(|&&i| i >= src.layout().total) {
        return Err(Error::InvalidIndex(format!("flat index {bad}")));
    }
    if s.is_empty() {
        return Ok(ClusterCoherence {
            mu_c: 0.0,
            mu_singleton: 0.0,
        });
    }
    let (wl, cl) = (pair.wavelet().layout(), pair.curvelet().layout());
    let (wt, ct) = (pair.wavelet().tiles(), pair.curvelet().tiles());
    let slay = src.layout();
    let dlay = pair.frame(s.frame.other()).layout();

    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in &s.indices {
        let t = slay.tile_of(i);
        members.entry(t).or_default().push(i - slay.tiles[t].offset);
    }
    // sums per target tile, over its coefficient range
    let mut acc: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut single: f64 = 0.0;

    for (&st, locals) in &members {
        for dt in 0..dlay.tiles.len() {
            let (ci, wi) = match s.frame {
                FrameKind::Curvelet => (st, dt),
                FrameKind::Wavelet => (dt, st),
            };
            let Some(k) = CrossKernel::new(&ct[ci], &wt[wi]) else {
                continue;
            };
            let (rows, cols) = (k.rows, k.cols);
            let ctile = cl.tiles[ci];
            let wtile = wl.tiles[wi];
            let phases: &[bool] = if k.wedge { &[false, true] } else { &[false] };
            let grids: Vec<Vec<f64>> = phases.iter().map(|&odd| k.abs_grid(odd)).collect();
            let fft = Fft2::new(rows, cols);
            let spectra: Vec<Vec<Complex64>> = grids
                .iter()
                .map(|g| {
                    let mut v: Vec<Complex64> = g.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                    fft.forward(&mut v);
                    v
                })
                .collect();
            let embed = |rows_t: usize, cols_t: usize, pos: usize| {
                let (p, q) = (pos / cols_t, pos % cols_t);
                (p * (rows / rows_t), q * (cols / cols_t))
            };
            let norm = 1.0 / (rows * cols) as f64;
            match s.frame {
                FrameKind::Wavelet => {
                    // targets are curvelets c: sum_i A(c - b_i), a convolution
                    let mut ind = vec![Complex64::default(); rows * cols];
                    for &pos in locals {
                        let (u, v) = embed(wtile.rows, wtile.cols, pos);
                        ind[u * cols + v] += 1.0;
                    }
                    fft.forward(&mut ind);
                    let out = acc.entry(ci).or_insert_with(|| vec![0.0; ctile.len()]);
                    let (sr, sc) = (rows / ctile.rows, cols / ctile.cols);
                    for (ph, spec) in spectra.iter().enumerate() {
                        let mut prod: Vec<Complex64> = spec.iter().zip(&ind).map(|(a, b)| a * b).collect();
                        fft.inverse(&mut prod);
                        for pos in 0..ctile.block() {
                            let (u, v) = (pos / ctile.cols * sr, pos % ctile.cols * sc);
                            out[ph * ctile.block() + pos] += prod[u * cols + v].re * norm;
                        }
                        let best = coset_max(&grids[ph], rows, cols, sr, sc);
                        for &pos in locals {
                            let (u, v) = embed(wtile.rows, wtile.cols, pos);
                            let a = (sr - u % sr) % sr;
                            let b = (sc - v % sc) % sc;
                            single = single.max(best[a * sc + b]);
                        }
                    }
                }
                FrameKind::Curvelet => {
                    // targets are wavelets b: sum_i A_phase(i)(c_i - b), a correlation
                    let mut sum = vec![Complex64::default(); rows * cols];
                    let (sr, sc) = (rows / wtile.rows, cols / wtile.cols);
                    for (ph, spec) in spectra.iter().enumerate() {
                        let mut ind = vec![Complex64::default(); rows * cols];
                        let best = coset_max(&grids[ph], rows, cols, sr, sc);
                        let mut any = false;
                        for &local in locals {
                            let is_odd = local >= ctile.block();
                            if is_odd != phases[ph] {
                                continue;
                            }
                            any = true;
                            let (u, v) = embed(ctile.rows, ctile.cols, local % ctile.block());
                            ind[u * cols + v] += 1.0;
                            single = single.max(best[(u % sr) * sc + v % sc]);
                        }
                        if !any {
                            continue;
                        }
                        fft.forward(&mut ind);
                        for ((o, a), b) in sum.iter_mut().zip(spec).zip(&ind) {
                            *o += a.conj() * b;
                        }
                    }
                    fft.inverse(&mut sum);
                    let out = acc.entry(wi).or_insert_with(|| vec![0.0; wtile.len()]);
                    for (pos, o) in out.iter_mut().enumerate() {
                        let (u, v) = (pos / wtile.cols * sr, pos % wtile.cols * sc);
                        *o += sum[u * cols + v].re * norm;
                    }
                }
            }
        }
    }
    let mu_c = acc.values().flatten().fold(0.0f64, |m, &v| m.max(v));
    Ok(ClusterCoherence {
        mu_c,
        mu_singleton: single,
    })
}

/// Maximum of `grid` over each residue class modulo `(sr, sc)`.
fn coset_max(grid: &[f64], rows: usize, cols: usize, sr: usize, sc: usize) -> Vec<f64> {
    let mut best = vec![0.0f64; sr * sc];
    for r in 0..rows {
        for c in 0..cols {
            let b = &mut best[(r % sr) * sc + c % sc];
            *b = b.max(grid[r * cols + c]);
        }
    }
    best
}

/// Largest `|<psi_lambda, gamma_eta>|` over wavelets and curvelets of the
/// band `j-1 ..= j+1`.
pub fn mutual_coherence(pair: &FramePair, j: i32) -> Result<f64> {
    pair.grid().check_scale(j)?;
    let (wl, cl) = (pair.wavelet().layout(), pair.curvelet().layout());
    let mut m: f64 = 0.0;
    for ci in cl.tiles_at_scale(j - 1).start..cl.tiles_at_scale(j + 1).end {
        for wi in wl.tiles_at_scale(j - 1).start..wl.tiles_at_scale(j + 1).end {
            if let Some(k) = CrossKernel::new(&pair.curvelet().tiles()[ci], &pair.wavelet().tiles()[wi]) {
                m = m.max(k.max_abs());
            }
        }
    }
    Ok(m)
}

/// `2 delta / (1 - 2 kappa)`, infinite once `kappa >= 1/2`.
pub fn recovery_bound(delta: f64, kappa: f64) -> f64 {
    if kappa < 0.5 {
        2.0 * delta / (1.0 - 2.0 * kappa)
    } else {
        f64::INFINITY
    }
}

/// The noisy variant `(2 delta + 5 eps) / (1 - 2 kappa)`.
pub fn noisy_recovery_bound(delta: f64, eps: f64, kappa: f64) -> f64 {
    if kappa < 0.5 {
        (2.0 * delta + 5.0 * eps) / (1.0 - 2.0 * kappa)
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaBounds {
    /// Largest concentration ratio found by sampling and local ascent.
    pub lower: f64,
    /// Larger of the two cluster coherences.
    pub upper: f64,
    pub mu_c_wavelet: f64,
    pub mu_c_curvelet: f64,
    /// Signals evaluated with a nonzero denominator.
    pub evaluated: usize,
}

/// Concentration ratio of band signals on the two clusters.
struct Concentration {
    op: BandOperator,
    masks: [Vec<bool>; 2],
    c: [Vec<f64>; 2],
}

impl Concentration {
    fn parts(c: &[Vec<f64>; 2], masks: &[Vec<bool>; 2]) -> (f64, f64) {
        let mut on = 0.0;
        let mut all = 0.0;
        for s in 0..2 {
            for (v, &m) in c[s].iter().zip(&masks[s]) {
                let a = v.abs();
                all += a;
                if m {
                    on += a;
                }
            }
        }
        (on, all)
    }

    fn analyze(&mut self, x: &[f64]) -> [Vec<f64>; 2] {
        let mut out = [vec![0.0; self.op.coeff_len(0)], vec![0.0; self.op.coeff_len(1)]];
        self.op.analysis(0, x, &mut out[0]);
        self.op.analysis(1, x, &mut out[1]);
        out
    }

    fn ratio(&mut self, x: &[f64]) -> Option<f64> {
        self.c = self.analyze(x);
        let (on, all) = Self::parts(&self.c, &self.masks);
        (all > 0.0).then(|| on / all)
    }
}

/// Bounds on the joint concentration of `s1` (wavelet) and `s2` (curvelet)
/// over signals of subband `s1.j`.
pub fn kappa_bounds(s1: &Cluster, s2: &Cluster, pair: &FramePair, samples: usize, seed: u64) -> Result<KappaBounds> {
    if s1.frame != FrameKind::Wavelet || s2.frame != FrameKind::Curvelet {
        return Err(Error::InvalidParameter("expected a wavelet and a curvelet cluster".into()));
    }
    if s1.j != s2.j {
        return Err(Error::InvalidParameter(format!("clusters at scales {} and {}", s1.j, s2.j)));
    }
    let mu1 = cluster_coherence(s1, pair)?;
    let mu2 = cluster_coherence(s2, pair)?;
    let upper = mu1.max(mu2);
    if s1.is_empty() && s2.is_empty() {
        return Ok(KappaBounds {
            lower: 0.0,
            upper,
            mu_c_wavelet: mu1,
            mu_c_curvelet: mu2,
            evaluated: 0,
        });
    }
    let op = BandOperator::new(pair, s1.j, true);
    let masks = [op.band_mask(0, &s1.indices), op.band_mask(1, &s2.indices)];
    let mut conc = Concentration {
        c: [Vec::new(), Vec::new()],
        op,
        masks,
    };
    let n = conc.op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members: [Vec<usize>; 2] = [0, 1].map(|s| {
        conc.masks[s]
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| i)
            .collect()
    });

    let mut best = 0.0f64;
    let mut best_x: Option<Vec<f64>> = None;
    let mut evaluated = 0;
    let mut consider = |x: Vec<f64>, conc: &mut Concentration| {
        if let Some(r) = conc.ratio(&x) {
            evaluated += 1;
            if r > best || best_x.is_none() {
                best = best.max(r);
                best_x = Some(x);
            }
        }
    };
    let atom = |conc: &mut Concentration, side: usize, i: usize| {
        let mut e = vec![0.0; conc.op.coeff_len(side)];
        e[i] = 1.0;
        let mut x = vec![0.0; n];
        conc.op.synthesis(side, &e, &mut x);
        x
    };

    // member atoms
    for side in 0..2 {
        let picks: Vec<usize> = members[side].choose_multiple(&mut rng, samples.max(1)).copied().collect();
        for i in picks {
            let x = atom(&mut conc, side, i);
            consider(x, &mut conc);
        }
    }
    // random band signals
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        consider(x, &mut conc);
    }
    // syntheses from cluster-supported coefficients
    for _ in 0..samples {
        let mut x = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        for side in 0..2 {
            let mut c = vec![0.0; conc.op.coeff_len(side)];
            for &i in &members[side] {
                c[i] = StandardNormal.sample(&mut rng);
            }
            conc.op.synthesis(side, &c, &mut tmp);
            x.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b);
        }
        consider(x, &mut conc);
    }

    // coordinate ascent along member atoms
    if let Some(mut x) = best_x.take() {
        let mut cur = conc.ratio(&x).unwrap_or(0.0);
        let mut cx = conc.c.clone();
        let all: Vec<(usize, usize)> = (0..2).flat_map(|s| members[s].iter().map(move |&i| (s, i))).collect();
        for _ in 0..100 {
            if all.is_empty() {
                break;
            }
            let (side, i) = all[rng.random_range(0..all.len())];
            let d = atom(&mut conc, side, i);
            let cd = conc.analyze(&d);
            let rms = (cx[side].iter().map(|v| v * v).sum::<f64>() / cx[side].len() as f64).sqrt();
            let scale = cx[side][i].abs().max(rms);
            let mut step = None;
            for t in [-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0] {
                let trial = [0, 1].map(|s| cx[s].iter().zip(&cd[s]).map(|(a, b)| a + t * scale * b).collect::<Vec<_>>());
                let (on, tot) = Concentration::parts(&trial, &conc.masks);
                if tot > 0.0 && on / tot > cur {
                    cur = on / tot;
                    step = Some((t * scale, trial));
                }
            }
            if let Some((t, trial)) = step {
                x.iter_mut().zip(&d).for_each(|(a, b)| *a += t * b);
                cx = trial;
            }
        }
        evaluated += 1;
        best = best.max(cur);
    }
    Ok(KappaBounds {
        lower: best,
        upper,
        mu_c_wavelet: mu1,
        mu_c_curvelet: mu2,
        evaluated,
    })
}

/// Largest coefficient magnitude of one frame scale against the distance of
/// the atom center to the nearest point, in units of `2^-j`, binned by
/// integer distance.
pub fn decay_profile(coeffs: &CoefficientSet, j: i32, points: &[[f64; 2]]) -> Result<Vec<(f64, f64)>> {
    let layout = coeffs.layout();
    layout.grid.check_frame_scale(j)?;
    if points.is_empty() {
        return Err(Error::InvalidParameter("no reference points".into()));
    }
    let unit = (j as f64).exp2();
    let mut bins: BTreeMap<usize, f64> = BTreeMap::new();
    for i in layout.scale_range(j) {
        let c = layout.center(i);
        let d = points
            .iter()
            .map(|&p| GridSpec::torus_distance(c, p))
            .fold(f64::INFINITY, f64::min)
            * unit;
        let b = bins.entry(d.round() as usize).or_insert(0.0);
        *b = b.max(coeffs.values()[i].abs());
    }
    Ok(bins.into_iter().map(|(d, v)| (d as f64, v)).collect())
}

/// Log-log slope of a decay profile over `d >= d_min` (zero entries skipped).
pub fn tail_exponent(profile: &[(f64, f64)], d_min: f64, d_max: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = profile
        .iter()
        .filter(|(d, v)| *d >= d_min && *d <= d_max && *v > 0.0)
        .map(|(d, v)| (d.ln(), v.ln()))
        .collect();
    ls_slope(&pts)
}

/// Measurements of one subband.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub j: i32,
    pub epsilon: f64,
    pub size_point_cluster: usize,
    pub size_curve_cluster: usize,
    /// Largest single inner product of a cluster member with the other frame.
    pub mu_singleton: f64,
    /// Cluster coherence of the point tube against the curvelets.
    pub mu_c_point: f64,
    /// Cluster coherence of the curve tube against the wavelets.
    pub mu_c_curve: f64,
    pub kappa_upper: f64,
    pub kappa_lower: f64,
    pub delta_point: f64,
    pub delta_curve: f64,
    pub delta_point_rel: f64,
    pub delta_curve_rel: f64,
    /// `2 (delta_point + delta_curve) / (1 - 2 kappa_upper)`; `None` when infinite.
    pub recovery_bound: Option<f64>,
    /// Band mutual coherence of the two frames.
    pub mu_band: f64,
}

/// Inputs describing the ground truth at one subband.
pub struct SubbandTruth<'a> {
    /// `None` when the phantom has no point part; its cluster is then empty.
    pub points: Option<&'a PointConfig>,
    pub curve: Option<&'a CurveConfig>,
    /// Wavelet coefficients of the point part of the subband.
    pub point_coeffs: &'a CoefficientSet,
    /// Curvelet coefficients of the curve part of the subband.
    pub curve_coeffs: &'a CoefficientSet,
    /// `||f_j||_2` used to normalize the sparsity defects.
    pub norm: f64,
}

pub struct ReportOptions {
    pub epsilon: f64,
    /// Sampled signals for the lower bound; zero skips it.
    pub kappa_samples: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            kappa_samples: 16,
            seed: 0,
        }
    }
}

pub fn coherence_report(
    pair: &FramePair,
    j: i32,
    truth: &SubbandTruth,
    opts: &ReportOptions,
) -> Result<(CoherenceReport, Cluster, Cluster)> {
    check_eps(opts.epsilon)?;
    let s1 = match truth.points {
        Some(p) => point_tube_cluster(pair, p, j, opts.epsilon)?,
        None => Cluster::empty(FrameKind::Wavelet, j),
    };
    let s2 = match truth.curve {
        Some(c) => curve_tube_cluster(pair, c, j, opts.epsilon)?,
        None => Cluster::empty(FrameKind::Curvelet, j),
    };
    let c1 = cluster_coherence_full(&s1, pair)?;
    let c2 = cluster_coherence_full(&s2, pair)?;
    let kappa_upper = c1.mu_c.max(c2.mu_c);
    let kappa_lower = if opts.kappa_samples > 0 {
        kappa_bounds(&s1, &s2, pair, opts.kappa_samples, opts.seed)?.lower
    } else {
        0.0
    };
    let d1 = relative_sparsity(truth.point_coeffs, &s1)?;
    let d2 = relative_sparsity(truth.curve_coeffs, &s2)?;
    let rel = |d: f64| if truth.norm > 0.0 { d / truth.norm } else { 0.0 };
    let bound = recovery_bound(d1 + d2, kappa_upper);
    let report = CoherenceReport {
        j,
        epsilon: opts.epsilon,
        size_point_cluster: s1.len(),
        size_curve_cluster: s2.len(),
        mu_singleton: c1.mu_singleton.max(c2.mu_singleton),
        mu_c_point: c1.mu_c,
        mu_c_curve: c2.mu_c,
        kappa_upper,
        kappa_lower,
        delta_point: d1,
        delta_curve: d2,
        delta_point_rel: rel(d1),
        delta_curve_rel: rel(d2),
        recovery_bound: bound.is_finite().then_some(bound),
        mu_band: mutual_coherence(pair, j)?,
    };
    Ok((report, s1, s2))
}

#[cfg(test)]
mod tests;
