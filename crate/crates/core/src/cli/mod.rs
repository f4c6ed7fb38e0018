//! Command-line front end. Every command is deterministic given its
//! configuration and seed.

mod commands;
pub mod images;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coherence::DEFAULT_EPSILON;
use crate::error::{Error, Result};
use crate::phantoms::{
    add_noise, curve_spectrum, match_energies, point_spectrum, segment_spectrum, CurveConfig, Phantom,
    PhantomKind, PointConfig,
};
use crate::separator::SolverConfig;
use crate::spectral_grid::{GridSpec, Spectrum};
use crate::subband::ResidualRouting;

pub use commands::{cmd_coherence, cmd_decay_study, cmd_gen, cmd_oracle, cmd_separate};

pub const SCHEMA_VERSION: u32 = 1;

/// Exit status for a run that finished but with unconverged subbands.
pub const EXIT_DEGRADED: i32 = 2;
/// Exit status for an oracle sweep whose outcome contradicts expectations.
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "geosep", version, about = "Separate point and curve singularities in images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate phantom images and the per-annulus energy table.
    Gen(GenArgs),
    /// Split the phantom into point and curve components.
    Separate(SeparateArgs),
    /// Build clusters and report coherences and sparsity defects per scale.
    Coherence(RunArgs),
    /// Separation and coherence across scales with fitted log2 slopes.
    DecayStudy(RunArgs),
    /// Exact bound checks on seeded tiny instances.
    Oracle(OracleArgs),
}

/// Flags shared by the phantom commands. Each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Subband scale range `LO..HI` (or `LO:HI`).
    #[arg(long)]
    pub scales: Option<String>,
    /// `x,y[,amplitude];...` on the unit torus, or `none`.
    #[arg(long)]
    pub points: Option<String>,
    /// `circle`, `segment`, `csv:PATH` or `none`.
    #[arg(long)]
    pub curve: Option<String>,
    /// Segment half-length in `(0, 1/4)`.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Additive white noise, relative to the phantom `l2` norm.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tube exponent in `(0, 1/32)`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Relative duality-gap tolerance of the solver.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where the unsplit low-pass residual goes: `curve`, `point` or `separate`.
    #[arg(long)]
    pub routing: Option<String>,
    /// Sampled signals for the joint-concentration lower bound.
    #[arg(long = "kappa-samples")]
    pub kappa_samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Also write the point and curve parts as separate images.
    #[arg(long)]
    pub components: bool,
    /// Also write the nonzero frame coefficients of the phantom as CSV.
    #[arg(long)]
    pub coefficients: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SeparateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Also write per-scale `W_j` and `C_j` images.
    #[arg(long)]
    pub subbands: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    /// Noisy instances checked against the noise-robust bound.
    #[arg(long, default_value_t = 100)]
    pub noisy: usize,
    /// Hill-climbed instances where the bound is nearly tight.
    #[arg(long, default_value_t = 20)]
    pub adversarial: usize,
    /// Instances on which the iterative solver is compared with the oracle.
    #[arg(long, default_value_t = 0)]
    pub certify: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Halve every bound; the sweep is then expected to report violations.
    #[arg(long = "self-test")]
    pub self_test: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Run configuration as read from JSON; keys mirror the flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: usize,
    pub scales: Option<String>,
    pub points: String,
    pub curve: String,
    pub rho: f64,
    pub noise: f64,
    pub seed: u64,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub out: PathBuf,
    pub routing: String,
    pub kappa_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: 512,
            scales: None,
            points: "0.75,0.5;0.2,0.2".into(),
            curve: "circle".into(),
            rho: 0.125,
            noise: 0.0,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            tol: 1e-3,
            max_iter: 5000,
            out: PathBuf::from("out"),
            routing: "curve".into(),
            kappa_samples: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveChoice {
    Circle,
    Segment,
    Csv(PathBuf),
    None,
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub grid: GridSpec,
    pub points: Option<PointConfig>,
    pub curve: CurveChoice,
    pub solver: SolverConfig,
    pub routing: ResidualRouting,
}

impl RunConfig {
    /// Defaults, then the config file, then the flags.
    pub fn load(args: &RunArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($f:ident),*) => {$(
                if let Some(v) = &args.$f {
                    cfg.$f = v.clone();
                }
            )*};
        }
        take!(grid, points, curve, rho, noise, seed, epsilon, tol, max_iter, out, routing, kappa_samples);
        if args.scales.is_some() {
            cfg.scales = args.scales.clone();
        }
        Ok(cfg)
    }

    pub fn resolve(self) -> Result<Resolved> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let grid = match &self.scales {
            Some(s) => {
                let (lo, hi) = parse_scales(s)?;
                GridSpec::new(self.grid, lo, hi)?
            }
            None => GridSpec::with_default_scales(self.grid)?,
        };
        let points = parse_points(&self.points)?;
        let curve = parse_curve(&self.curve)?;
        if !(self.rho > 0.0 && self.rho < 0.25) {
            return bad(format!("rho {} outside (0, 1/4)", self.rho));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!("noise level {}", self.noise));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 / 32.0) {
            return bad(format!("epsilon {} outside (0, 1/32)", self.epsilon));
        }
        if points.is_none() && curve == CurveChoice::None {
            return bad("phantom has neither points nor a curve".into());
        }
        let routing = match self.routing.as_str() {
            "curve" => ResidualRouting::Curve,
            "point" => ResidualRouting::Point,
            "separate" => ResidualRouting::Separate,
            r => return bad(format!("unknown routing {r:?}")),
        };
        let solver = SolverConfig {
            max_iterations: self.max_iter,
            relative_gap_tol: self.tol,
            ..Default::default()
        };
        solver.validate()?;
        Ok(Resolved {
            config: self,
            grid,
            points,
            curve,
            solver,
            routing,
        })
    }
}

pub fn parse_scales(s: &str) -> Result<(i32, i32)> {
    let bad = || Error::InvalidParameter(format!("scale range {s:?}; expected LO..HI"));
    let (a, b) = s.split_once("..").or_else(|| s.split_once(':')).ok_or_else(bad)?;
    let lo = a.trim().parse().map_err(|_| bad())?;
    let hi = b.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

pub fn parse_points(s: &str) -> Result<Option<PointConfig>> {
    let s = s.trim();
    if s == "none" || s.is_empty() {
        return Ok(None);
    }
    let mut pts = Vec::new();
    let mut amps = Vec::new();
    for item in s.split(';') {
        let v: Vec<f64> = item
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidParameter(format!("point {item:?}")))?;
        match v[..] {
            [x, y] => {
                pts.push([x, y]);
                amps.push(1.0);
            }
            [x, y, a] => {
                pts.push([x, y]);
                amps.push(a);
            }
            _ => return Err(Error::InvalidParameter(format!("point {item:?}; expected x,y[,a]"))),
        }
    }
    PointConfig::new(pts, amps).map(Some)
}

pub fn parse_curve(s: &str) -> Result<CurveChoice> {
    match s {
        "circle" => Ok(CurveChoice::Circle),
        "segment" => Ok(CurveChoice::Segment),
        "none" => Ok(CurveChoice::None),
        _ => match s.strip_prefix("csv:") {
            Some(p) => Ok(CurveChoice::Csv(PathBuf::from(p))),
            None => Err(Error::InvalidParameter(format!("unknown curve {s:?}"))),
        },
    }
}

/// Independent seed for a named use of randomness.
pub fn substream_seed(seed: u64, name: &str) -> u64 {
    // FNV-1a of the name picks the ChaCha stream
    let stream = name
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Ground truth and observed image of one run.
pub struct Scene {
    pub grid: GridSpec,
    pub points: Option<PointConfig>,
    pub curve: Option<CurveConfig>,
    /// Point part after energy matching (zero when absent).
    pub point: Phantom,
    /// Curve part after energy matching (zero when absent).
    pub curve_part: Phantom,
    pub clean: Phantom,
    pub observed: Phantom,
    pub match_factor: Option<f64>,
}

fn zero_phantom(grid: GridSpec, kind: PhantomKind) -> Phantom {
    Phantom::from_spectrum(kind, Spectrum::zeros(grid))
}

pub fn build_scene(r: &Resolved) -> Result<Scene> {
    let g = r.grid;
    let nodes = 8 * g.size();
    let (curve, curve_ph) = match &r.curve {
        CurveChoice::Circle => {
            let c = CurveConfig::reference(nodes);
            let ph = curve_spectrum(&c, &g)?;
            (Some(c), Some(ph))
        }
        CurveChoice::Segment => {
            let c = CurveConfig::segment([0.0, 0.0], r.config.rho, nodes)?;
            (Some(c), Some(segment_spectrum(r.config.rho, &g)?))
        }
        CurveChoice::Csv(p) => {
            let c = CurveConfig::from_csv(p)?;
            let ph = curve_spectrum(&c, &g)?;
            (Some(c), Some(ph))
        }
        CurveChoice::None => (None, None),
    };
    let point_ph = r.points.as_ref().map(|p| point_spectrum(p, &g)).transpose()?;
    let (point, curve_part, match_factor) = match (point_ph, curve_ph) {
        (Some(p), Some(c)) => {
            let (p, c, k) = match_energies(&p, &c)?;
            (p, c, Some(k))
        }
        (Some(p), None) => (p, zero_phantom(g, PhantomKind::Curve), None),
        (None, Some(c)) => (zero_phantom(g, PhantomKind::Point), c, None),
        (None, None) => unreachable!("rejected by resolve"),
    };
    let clean = Phantom::mixture(&point, &curve_part);
    let observed = add_noise(&clean, r.config.noise, substream_seed(r.config.seed, "noise"))?;
    Ok(Scene {
        grid: g,
        points: r.points.clone(),
        curve,
        point,
        curve_part,
        clean,
        observed,
        match_factor,
    })
}

fn ensure_dir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p)?;
    Ok(())
}

/// Parses `args` and runs the command; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 64 } else { 0 };
        }
    };
    let res = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Separate(a) => cmd_separate(a),
        Command::Coherence(a) => cmd_coherence(a),
        Command::DecayStudy(a) => cmd_decay_study(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
