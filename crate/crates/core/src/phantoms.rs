//! Ground-truth phantoms: point singularities, curve singularities, the
//! tapered line segment, energy matching and additive noise.
//!
//! Spectra are continuum Fourier transforms sampled at the integer
//! frequencies of the grid, so a field is the band-limited periodization of
//! the distribution divided by `N`.

use std::f64::consts::PI;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_grid::{annulus_energy, forward_dft, inverse_dft_real_part, Field, GridSpec, Spectrum};
use crate::windows::CurveTaper;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfig {
    pub points: Vec<[f64; 2]>,
    pub amplitudes: Vec<f64>,
}

impl PointConfig {
    pub fn new(points: Vec<[f64; 2]>, amplitudes: Vec<f64>) -> Result<Self> {
        let cfg = Self { points, amplitudes };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn unit(points: Vec<[f64; 2]>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0; n])
    }

    /// One point on the default circle and one away from it.
    pub fn reference() -> Self {
        Self {
            points: vec![[0.75, 0.5], [0.2, 0.2]],
            amplitudes: vec![1.0, 1.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() || self.points.len() > 64 {
            return Err(Error::InvalidParameter(format!(
                "need 1..=64 points, got {}",
                self.points.len()
            )));
        }
        if self.amplitudes.len() != self.points.len() {
            return Err(Error::InvalidParameter("one amplitude per point".into()));
        }
        for p in &self.points {
            if !(0.0..1.0).contains(&p[0]) || !(0.0..1.0).contains(&p[1]) {
                return Err(Error::InvalidParameter(format!("point {p:?} outside [0,1)^2")));
            }
        }
        if self.amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(())
    }
}

/// One quadrature node on a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveNode {
    pub t: f64,
    pub pos: [f64; 2],
    /// Normal direction in `[0, pi)`.
    pub normal: f64,
    /// Quadrature weight, taper included.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub nodes: Vec<CurveNode>,
    pub closed: bool,
    /// Half-width of the taper for open segments.
    pub rho: Option<f64>,
    /// Smallest radius of curvature along the curve (infinite for lines).
    pub min_radius: f64,
}

impl CurveConfig {
    /// Unit-speed circle with `m` nodes.
    pub fn circle(center: [f64; 2], radius: f64, m: usize) -> Self {
        let h = 2.0 * PI / m as f64;
        let nodes = (0..m)
            .map(|i| {
                let phi = i as f64 * h;
                CurveNode {
                    t: radius * phi,
                    pos: wrap2([center[0] + radius * phi.cos(), center[1] + radius * phi.sin()]),
                    normal: phi.rem_euclid(PI),
                    weight: radius * h,
                }
            })
            .collect();
        Self {
            nodes,
            closed: true,
            rho: None,
            min_radius: radius,
        }
    }

    /// Default test curve: radius 1/4 about the torus center.
    pub fn reference(m: usize) -> Self {
        Self::circle([0.5, 0.5], 0.25, m)
    }

    /// Segment `{c1} x [c2 - rho, c2 + rho]` tapered by `w2(t / rho)`; its
    /// normal points along the first axis.
    pub fn segment(center: [f64; 2], rho: f64, m: usize) -> Result<Self> {
        check_rho(rho)?;
        let taper = CurveTaper::new(rho);
        let h = 2.0 * rho / (m - 1) as f64;
        let nodes = (0..m)
            .map(|i| {
                let t = -rho + i as f64 * h;
                CurveNode {
                    t,
                    pos: wrap2([center[0], center[1] + t]),
                    normal: 0.0,
                    // endpoint weights vanish with the taper
                    weight: taper.eval_dilated(t) * h,
                }
            })
            .collect();
        Ok(Self {
            nodes,
            closed: false,
            rho: Some(rho),
            min_radius: f64::INFINITY,
        })
    }

    /// Reads `t,x,y` rows (header optional). A curve whose last node repeats
    /// the first is treated as closed.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
        let mut raw: Vec<[f64; 3]> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::InvalidParameter(e.to_string()))?;
            if rec.len() < 3 {
                return Err(Error::InvalidParameter(format!("expected t,x,y, got {rec:?}")));
            }
            let parsed: std::result::Result<Vec<f64>, _> = (0..3).map(|i| rec[i].parse::<f64>()).collect();
            match parsed {
                Ok(v) => raw.push([v[0], v[1], v[2]]),
                Err(_) if raw.is_empty() => continue, // header
                Err(e) => return Err(Error::InvalidParameter(format!("bad row {rec:?}: {e}"))),
            }
        }
        Self::from_samples(&raw)
    }

    /// Builds nodes, normals and trapezoid weights from `(t, x, y)` samples.
    pub fn from_samples(raw: &[[f64; 3]]) -> Result<Self> {
        if raw.len() < 3 {
            return Err(Error::InvalidParameter("curve needs at least 3 nodes".into()));
        }
        let first = raw[0];
        let last = raw[raw.len() - 1];
        let closed = (first[1] - last[1]).abs() < 1e-12 && (first[2] - last[2]).abs() < 1e-12;
        let pts: &[[f64; 3]] = if closed { &raw[..raw.len() - 1] } else { raw };
        let m = pts.len();
        let period = if closed { last[0] - first[0] } else { 0.0 };
        let at = |i: isize| -> [f64; 3] {
            if closed {
                let k = i.rem_euclid(m as isize) as usize;
                let shift = i.div_euclid(m as isize) as f64 * period;
                [pts[k][0] + shift, pts[k][1], pts[k][2]]
            } else {
                pts[i.clamp(0, m as isize - 1) as usize]
            }
        };
        let mut nodes = Vec::with_capacity(m);
        let mut min_radius = f64::INFINITY;
        for i in 0..m as isize {
            let (p, c, n) = (at(i - 1), at(i), at(i + 1));
            let tx = n[1] - p[1];
            let ty = n[2] - p[2];
            let weight = if closed {
                (n[0] - p[0]) / 2.0
            } else if i == 0 {
                (n[0] - c[0]) / 2.0
            } else if i == m as isize - 1 {
                (c[0] - p[0]) / 2.0
            } else {
                (n[0] - p[0]) / 2.0
            };
            if closed || (i > 0 && i < m as isize - 1) {
                min_radius = min_radius.min(circumradius(p, c, n));
            }
            nodes.push(CurveNode {
                t: c[0],
                pos: wrap2([c[1], c[2]]),
                normal: (ty.atan2(tx) + PI / 2.0).rem_euclid(PI),
                weight,
            });
        }
        Ok(Self {
            nodes,
            closed,
            rho: None,
            min_radius,
        })
    }
}

fn circumradius(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let d = |u: [f64; 3], v: [f64; 3]| (u[1] - v[1]).hypot(u[2] - v[2]);
    let (x, y, z) = (d(a, b), d(b, c), d(a, c));
    let cross = ((b[1] - a[1]) * (c[2] - a[2]) - (b[2] - a[2]) * (c[1] - a[1])).abs();
    if cross == 0.0 {
        f64::INFINITY
    } else {
        x * y * z / (2.0 * cross)
    }
}

fn wrap2(p: [f64; 2]) -> [f64; 2] {
    [p[0].rem_euclid(1.0), p[1].rem_euclid(1.0)]
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 0.25 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("segment half-width {rho} outside (0, 1/4)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhantomKind {
    Point,
    Curve,
    Segment,
    Mixture,
    Noise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    pub kind: PhantomKind,
    pub spectrum: Spectrum,
    pub field: Field,
}

impl Phantom {
    pub fn from_spectrum(kind: PhantomKind, spectrum: Spectrum) -> Self {
        let field = inverse_dft_real_part(&spectrum);
        Self { kind, spectrum, field }
    }

    pub fn grid(&self) -> &GridSpec {
        self.spectrum.grid()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            kind: self.kind,
            spectrum: self.spectrum.scaled(s),
            field: self.field.scaled(s),
        }
    }

    pub fn mixture(a: &Phantom, b: &Phantom) -> Self {
        Self {
            kind: PhantomKind::Mixture,
            spectrum: a.spectrum.add(&b.spectrum),
            field: a.field.add(&b.field),
        }
    }

    /// Annulus energies for every subband scale.
    pub fn energy_profile(&self) -> Vec<(i32, f64)> {
        self.grid()
            .scales()
            .map(|j| (j, annulus_energy(&self.spectrum, j).expect("scale in range")))
            .collect()
    }
}

/// `sum_i a_i |xi|^(-1/2) exp(-2 pi i x_i.xi)`, zero at the origin.
pub fn point_spectrum(cfg: &PointConfig, grid: &GridSpec) -> Result<Phantom> {
    cfg.validate()?;
    let n = grid.size();
    let mut vals = vec![Complex64::default(); grid.len()];
    for (x, &amp) in cfg.points.iter().zip(&cfg.amplitudes) {
        let e1 = phase_row(x[0], grid);
        let e2 = phase_row(x[1], grid);
        for r in 0..n {
            let a = e1[r] * amp;
            let row = &mut vals[r * n..(r + 1) * n];
            for (v, b) in row.iter_mut().zip(&e2) {
                *v += a * b;
            }
        }
    }
    for (i, v) in vals.iter_mut().enumerate() {
        let r = grid.radius(i);
        *v = if r == 0.0 { Complex64::default() } else { *v / r.sqrt() };
    }
    let s = Spectrum::new(*grid, vals)?.hermitian_part();
    Ok(Phantom::from_spectrum(PhantomKind::Point, s))
}

/// `exp(-2 pi i x k)` for the signed frequency of every FFT bin.
fn phase_row(x: f64, grid: &GridSpec) -> Vec<Complex64> {
    (0..grid.size())
        .map(|i| Complex64::from_polar(1.0, -2.0 * PI * x * grid.centered(i) as f64))
        .collect()
}

/// Trapezoid quadrature of `sum_m w_m exp(-2 pi i tau_m.xi)`.
pub fn curve_spectrum(cfg: &CurveConfig, grid: &GridSpec) -> Result<Phantom> {
    let need = 8usize << grid.j_max();
    if cfg.nodes.len() < need {
        return Err(Error::InvalidParameter(format!(
            "{} curve nodes is below the {need} needed at this grid",
            cfg.nodes.len()
        )));
    }
    let n = grid.size();
    let half = n / 2;
    // rows 0..=N/2 directly, the rest by conjugate symmetry
    let mut vals = vec![Complex64::default(); grid.len()];
    for node in &cfg.nodes {
        if node.weight == 0.0 {
            continue;
        }
        let e1 = phase_row(node.pos[0], grid);
        let e2 = phase_row(node.pos[1], grid);
        for r in 0..=half {
            let a = e1[r] * node.weight;
            let row = &mut vals[r * n..(r + 1) * n];
            for (v, b) in row.iter_mut().zip(&e2) {
                *v += a * b;
            }
        }
    }
    for r in half + 1..n {
        for c in 0..n {
            vals[r * n + c] = vals[(n - r) * n + (n - c) % n].conj();
        }
    }
    let s = Spectrum::new(*grid, vals)?.hermitian_part();
    Ok(Phantom::from_spectrum(PhantomKind::Curve, s))
}

/// Closed form of the tapered segment `{0} x [-rho, rho]`: `rho w2^(rho xi_2)`.
pub fn segment_spectrum(rho: f64, grid: &GridSpec) -> Result<Phantom> {
    check_rho(rho)?;
    let n = grid.size();
    let taper = CurveTaper::default();
    let col: Vec<f64> = (0..n).map(|c| rho * taper.fourier(rho * grid.centered(c) as f64)).collect();
    let vals = (0..grid.len()).map(|i| Complex64::new(col[i % n], 0.0)).collect();
    Ok(Phantom::from_spectrum(PhantomKind::Segment, Spectrum::new(*grid, vals)?))
}

/// Amplitude factor applied to the curve phantom by [`match_energies`].
pub fn energy_match_factor(p: &Phantom, c: &Phantom) -> Result<f64> {
    let g = *p.grid();
    if *c.grid() != g {
        return Err(Error::GridMismatch);
    }
    let mut log_sum = 0.0;
    let mut count = 0;
    for j in g.mid_band() {
        let ep = annulus_energy(&p.spectrum, j)?;
        let ec = annulus_energy(&c.spectrum, j)?;
        if ep <= 0.0 || ec <= 0.0 {
            return Err(Error::Degenerate(format!("zero energy at scale {j}")));
        }
        log_sum += (ep / ec).ln();
        count += 1;
    }
    Ok((0.5 * log_sum / count as f64).exp())
}

/// Rescales the curve phantom so the geometric mean over mid-band scales of
/// `E_P(j) / E_C(j)` is one. Returns the rescaled pair and the factor.
pub fn match_energies(p: &Phantom, c: &Phantom) -> Result<(Phantom, Phantom, f64)> {
    let k = energy_match_factor(p, c)?;
    Ok((p.clone(), c.scaled(k), k))
}

/// Adds white Gaussian noise with `l2` norm `level * ||p||_2`.
pub fn add_noise(p: &Phantom, level: f64, seed: u64) -> Result<Phantom> {
    if !(level >= 0.0) || !level.is_finite() {
        return Err(Error::InvalidParameter(format!("noise level {level}")));
    }
    if level == 0.0 {
        return Ok(p.clone());
    }
    let g = *p.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..g.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let k = level * p.field.norm() / norm;
    let noise = Field::new(g, raw.into_iter().map(|v| v * k).collect())?;
    let field = p.field.add(&noise);
    Ok(Phantom {
        kind: PhantomKind::Noise,
        spectrum: forward_dft(&field),
        field,
    })
}
