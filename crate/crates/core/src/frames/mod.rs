//! Discrete radial-wavelet and curvelet Parseval frames.
//!
//! Both frames are banks of wrapped frequency tiles. Every frame has the
//! scales `j_min-1 ..= j_max+1`: an isotropic low-pass tile, one tile (wavelet)
//! or `2^ceil(j/2)` one-sided wedges (curvelet) per subband scale, and a
//! high-pass closure at `j_max+1`. The squared tile weights sum to one at
//! every frequency, so analysis is an isometry and synthesis its adjoint.

mod gram;
mod tile;

use std::ops::Range;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_grid::{forward_dft, inverse_dft_real_part, Field, GridSpec, Spectrum};
use crate::windows::{AngularWindow, HighPass, LowPass, RadialWindow};

pub(crate) use gram::CrossKernel;
pub use tile::TileShape;
pub(crate) use tile::Tile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Wavelet,
    Curvelet,
}

impl FrameKind {
    pub fn other(self) -> Self {
        match self {
            FrameKind::Wavelet => FrameKind::Curvelet,
            FrameKind::Curvelet => FrameKind::Wavelet,
        }
    }
}

/// Radial wavelet index: scale and lattice position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WaveletIndex {
    pub j: i32,
    pub k: [u32; 2],
}

/// Real and imaginary parts of a complex wedge atom give two real atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Even,
    Odd,
}

/// Curvelet index: scale, orientation, lattice position and phase. The
/// isotropic low-pass tile of the curvelet frame uses `l = 0`, `Even`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveletIndex {
    pub j: i32,
    pub l: u32,
    pub k: [u32; 2],
    pub phase: Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "frame", rename_all = "snake_case")]
pub enum AtomIndex {
    Wavelet(WaveletIndex),
    Curvelet(CurveletIndex),
}

impl AtomIndex {
    pub fn scale(&self) -> i32 {
        match self {
            AtomIndex::Wavelet(w) => w.j,
            AtomIndex::Curvelet(c) => c.j,
        }
    }
}

/// Number of curvelet orientations in a half turn at scale `j`.
pub fn orientation_count(j: i32) -> u32 {
    1u32 << ((j + 1) / 2).max(0)
}

/// Geometry of one tile as seen by coefficient vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TileInfo {
    pub scale: i32,
    pub shape: TileShape,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl TileInfo {
    pub fn block(&self) -> usize {
        self.rows * self.cols
    }

    pub fn len(&self) -> usize {
        match self.shape {
            TileShape::Isotropic => self.block(),
            TileShape::Wedge { .. } => 2 * self.block(),
        }
    }

    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// Flat coefficient layout of a frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Layout {
    pub kind: FrameKind,
    pub grid: GridSpec,
    pub tiles: Vec<TileInfo>,
    pub total: usize,
}

impl Layout {
    /// Tile holding flat coefficient `i`.
    pub fn tile_of(&self, i: usize) -> usize {
        self.tiles.partition_point(|t| t.offset <= i) - 1
    }

    pub fn tiles_at_scale(&self, j: i32) -> Range<usize> {
        let lo = self.tiles.partition_point(|t| t.scale < j);
        let hi = self.tiles.partition_point(|t| t.scale <= j);
        lo..hi
    }

    /// Flat coefficient range of one frame scale.
    pub fn scale_range(&self, j: i32) -> Range<usize> {
        let r = self.tiles_at_scale(j);
        if r.is_empty() {
            return 0..0;
        }
        self.tiles[r.start].offset..self.tiles[r.end - 1].range().end
    }

    /// Coefficient range of `j-1 ..= j+1`, the atoms that can see subband `j`.
    pub fn band_range(&self, j: i32) -> Range<usize> {
        let lo = self.scale_range(j - 1);
        let mid = self.scale_range(j);
        let hi = self.scale_range(j + 1);
        let start = [&lo, &mid, &hi].iter().filter(|r| !r.is_empty()).map(|r| r.start).min();
        let end = [&lo, &mid, &hi].iter().filter(|r| !r.is_empty()).map(|r| r.end).max();
        match (start, end) {
            (Some(s), Some(e)) => s..e,
            _ => 0..0,
        }
    }

    pub fn scale_of(&self, i: usize) -> i32 {
        self.tiles[self.tile_of(i)].scale
    }

    pub fn decode(&self, i: usize) -> Result<AtomIndex> {
        if i >= self.total {
            return Err(Error::InvalidIndex(format!("flat index {i} >= {}", self.total)));
        }
        let t = &self.tiles[self.tile_of(i)];
        let local = i - t.offset;
        let bl = t.block();
        let pos = local % bl;
        let k = [(pos / t.cols) as u32, (pos % t.cols) as u32];
        Ok(match (self.kind, t.shape) {
            (FrameKind::Wavelet, _) => AtomIndex::Wavelet(WaveletIndex { j: t.scale, k }),
            (FrameKind::Curvelet, TileShape::Isotropic) => AtomIndex::Curvelet(CurveletIndex {
                j: t.scale,
                l: 0,
                k,
                phase: Phase::Even,
            }),
            (FrameKind::Curvelet, TileShape::Wedge { orientation, .. }) => {
                AtomIndex::Curvelet(CurveletIndex {
                    j: t.scale,
                    l: orientation,
                    k,
                    phase: if local < bl { Phase::Even } else { Phase::Odd },
                })
            }
        })
    }

    pub fn encode(&self, idx: &AtomIndex) -> Result<usize> {
        let bad = || Error::InvalidIndex(format!("{idx:?}"));
        let (j, l, k, phase) = match (self.kind, idx) {
            (FrameKind::Wavelet, AtomIndex::Wavelet(w)) => (w.j, 0, w.k, Phase::Even),
            (FrameKind::Curvelet, AtomIndex::Curvelet(c)) => (c.j, c.l, c.k, c.phase),
            _ => return Err(bad()),
        };
        let tiles = self.tiles_at_scale(j);
        let t = tiles
            .map(|ti| &self.tiles[ti])
            .find(|t| match t.shape {
                TileShape::Isotropic => l == 0,
                TileShape::Wedge { orientation, .. } => orientation == l,
            })
            .ok_or_else(bad)?;
        if k[0] as usize >= t.rows || k[1] as usize >= t.cols {
            return Err(bad());
        }
        let pos = k[0] as usize * t.cols + k[1] as usize;
        let extra = match (t.shape, phase) {
            (TileShape::Isotropic, Phase::Odd) => return Err(bad()),
            (_, Phase::Odd) => t.block(),
            _ => 0,
        };
        Ok(t.offset + extra + pos)
    }

    /// Atom center on the torus.
    pub fn center(&self, i: usize) -> [f64; 2] {
        let t = &self.tiles[self.tile_of(i)];
        let pos = (i - t.offset) % t.block();
        [
            (pos / t.cols) as f64 / t.rows as f64,
            (pos % t.cols) as f64 / t.cols as f64,
        ]
    }

    /// Wedge orientation `theta` in `[0, pi)`, `None` for isotropic atoms.
    pub fn orientation(&self, i: usize) -> Option<f64> {
        match self.tiles[self.tile_of(i)].shape {
            TileShape::Isotropic => None,
            TileShape::Wedge { orientation, count } => {
                Some(std::f64::consts::PI * orientation as f64 / count as f64)
            }
        }
    }
}

/// Dense coefficient vector over a frame layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    layout: Arc<Layout>,
    values: Vec<f64>,
}

impl CoefficientSet {
    pub fn zeros(layout: Arc<Layout>) -> Self {
        let values = vec![0.0; layout.total];
        Self { layout, values }
    }

    pub fn from_values(layout: Arc<Layout>, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.total {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                layout.total,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self { layout, values })
    }

    pub fn kind(&self) -> FrameKind {
        self.layout.kind
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: &AtomIndex) -> Result<f64> {
        Ok(self.values[self.layout.encode(idx)?])
    }

    pub fn set(&mut self, idx: &AtomIndex, v: f64) -> Result<()> {
        let i = self.layout.encode(idx)?;
        self.values[i] = v;
        Ok(())
    }

    pub fn scale_values(&self, j: i32) -> &[f64] {
        &self.values[self.layout.scale_range(j)]
    }

    pub fn norm_l1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn norm_linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm_p(&self, p: f64) -> f64 {
        self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }

    pub fn dot(&self, other: &CoefficientSet) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    /// Copy keeping only the listed flat indices.
    pub fn masked(&self, keep: &[usize]) -> Self {
        let mut out = Self::zeros(self.layout.clone());
        for &i in keep {
            out.values[i] = self.values[i];
        }
        out
    }

    /// Copy keeping only the frame scales in `scales`.
    pub fn restricted_to_scales(&self, scales: std::ops::RangeInclusive<i32>) -> Self {
        let mut out = Self::zeros(self.layout.clone());
        for j in scales {
            let r = self.layout.scale_range(j);
            out.values[r.clone()].copy_from_slice(&self.values[r]);
        }
        out
    }

    /// Nonzero entries with decoded indices.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (AtomIndex, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, &v)| (self.layout.decode(i).expect("in range"), v))
    }
}

/// One Parseval frame realized as a bank of wrapped tiles.
#[derive(Debug, Clone)]
pub struct Frame {
    layout: Arc<Layout>,
    tiles: Vec<Tile>,
}

impl Frame {
    pub fn wavelet(grid: GridSpec) -> Self {
        let n = grid.size();
        let w = RadialWindow;
        let mut tiles = vec![Tile::isotropic(&grid, grid.j_min() - 1, 1 << (grid.j_min() + 1), |r| {
            LowPass::new(grid.j_min()).eval(r)
        })];
        for j in grid.scales() {
            tiles.push(Tile::isotropic(&grid, j, (1usize << (j + 2)).min(n), |r| w.at_scale(r, j)));
        }
        tiles.push(Tile::isotropic(&grid, grid.j_max() + 1, n, |r| {
            HighPass::new(grid.j_max()).eval(r)
        }));
        Self::from_tiles(FrameKind::Wavelet, grid, tiles)
    }

    pub fn curvelet(grid: GridSpec) -> Self {
        let w = RadialWindow;
        let v = AngularWindow::default();
        let mut tiles = vec![Tile::isotropic(&grid, grid.j_min() - 1, 1 << (grid.j_min() + 1), |r| {
            LowPass::new(grid.j_min()).eval(r)
        })];
        for j in grid.scales() {
            tiles.extend(Tile::wedges(&grid, j, orientation_count(j), |r| w.at_scale(r, j), |t| v.eval(t)));
        }
        let jt = grid.j_max() + 1;
        tiles.extend(Tile::wedges(
            &grid,
            jt,
            orientation_count(jt),
            |r| HighPass::new(grid.j_max()).eval(r),
            |t| v.eval(t),
        ));
        Self::from_tiles(FrameKind::Curvelet, grid, tiles)
    }

    fn from_tiles(kind: FrameKind, grid: GridSpec, tiles: Vec<Tile>) -> Self {
        let mut offset = 0;
        let infos = tiles
            .iter()
            .map(|t| {
                let info = TileInfo {
                    scale: t.scale,
                    shape: t.shape,
                    rows: t.rows,
                    cols: t.cols,
                    offset,
                };
                offset += t.coef_len();
                info
            })
            .collect();
        Self {
            layout: Arc::new(Layout {
                kind,
                grid,
                tiles: infos,
                total: offset,
            }),
            tiles,
        }
    }

    pub fn kind(&self) -> FrameKind {
        self.layout.kind
    }

    pub fn grid(&self) -> &GridSpec {
        &self.layout.grid
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub(crate) fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    /// All atom indices of frame scale `j`, in coefficient order.
    pub fn enumerate(&self, j: i32) -> Result<Vec<AtomIndex>> {
        self.grid().check_frame_scale(j)?;
        self.layout
            .scale_range(j)
            .map(|i| self.layout.decode(i))
            .collect()
    }

    pub fn analysis(&self, f: &Field) -> CoefficientSet {
        self.analysis_spectrum(&forward_dft(f))
    }

    pub fn analysis_spectrum(&self, s: &Spectrum) -> CoefficientSet {
        let mut out = CoefficientSet::zeros(self.layout.clone());
        for (t, info) in self.tiles.iter().zip(&self.layout.tiles) {
            t.analyze(s.values(), &mut out.values[info.range()]);
        }
        out
    }

    pub fn synthesis(&self, c: &CoefficientSet) -> Result<Field> {
        Ok(inverse_dft_real_part(&self.synthesis_spectrum(c)?))
    }

    pub fn synthesis_spectrum(&self, c: &CoefficientSet) -> Result<Spectrum> {
        if c.layout.as_ref() != self.layout.as_ref() {
            return Err(Error::GridMismatch);
        }
        let mut spec = vec![Complex64::default(); self.grid().len()];
        for (t, info) in self.tiles.iter().zip(&self.layout.tiles) {
            let r = info.range();
            if c.values[r.clone()].iter().any(|v| *v != 0.0) {
                t.synthesize_add(&c.values[r], &mut spec);
            }
        }
        Spectrum::new(*self.grid(), spec)
    }

    /// The real atom with the given flat index.
    pub fn atom_spectrum(&self, i: usize) -> Result<Spectrum> {
        if i >= self.layout.total {
            return Err(Error::InvalidIndex(format!("flat index {i} >= {}", self.layout.total)));
        }
        let ti = self.layout.tile_of(i);
        let info = &self.layout.tiles[ti];
        let mut coef = vec![0.0; info.len()];
        coef[i - info.offset] = 1.0;
        let mut spec = vec![Complex64::default(); self.grid().len()];
        self.tiles[ti].synthesize_add(&coef, &mut spec);
        Spectrum::new(*self.grid(), spec)
    }

    pub fn atom_field(&self, idx: &AtomIndex) -> Result<Field> {
        let i = self.layout.encode(idx)?;
        Ok(inverse_dft_real_part(&self.atom_spectrum(i)?))
    }
}

/// The wavelet and curvelet frames over one grid.
#[derive(Debug, Clone)]
pub struct FramePair {
    grid: GridSpec,
    wavelet: Frame,
    curvelet: Frame,
}

impl FramePair {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            grid,
            wavelet: Frame::wavelet(grid),
            curvelet: Frame::curvelet(grid),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn wavelet(&self) -> &Frame {
        &self.wavelet
    }

    pub fn curvelet(&self) -> &Frame {
        &self.curvelet
    }

    pub fn frame(&self, kind: FrameKind) -> &Frame {
        match kind {
            FrameKind::Wavelet => &self.wavelet,
            FrameKind::Curvelet => &self.curvelet,
        }
    }

    pub fn enumerate_wavelets(&self, j: i32) -> Result<Vec<WaveletIndex>> {
        Ok(self
            .wavelet
            .enumerate(j)?
            .into_iter()
            .filter_map(|a| match a {
                AtomIndex::Wavelet(w) => Some(w),
                _ => None,
            })
            .collect())
    }

    pub fn enumerate_curvelets(&self, j: i32) -> Result<Vec<CurveletIndex>> {
        Ok(self
            .curvelet
            .enumerate(j)?
            .into_iter()
            .filter_map(|a| match a {
                AtomIndex::Curvelet(c) => Some(c),
                _ => None,
            })
            .collect())
    }

    pub fn wavelet_analysis(&self, f: &Field) -> CoefficientSet {
        self.wavelet.analysis(f)
    }

    pub fn wavelet_synthesis(&self, c: &CoefficientSet) -> Result<Field> {
        self.wavelet.synthesis(c)
    }

    pub fn curvelet_analysis(&self, f: &Field) -> CoefficientSet {
        self.curvelet.analysis(f)
    }

    pub fn curvelet_synthesis(&self, c: &CoefficientSet) -> Result<Field> {
        self.curvelet.synthesis(c)
    }

    pub fn atom_field(&self, idx: &AtomIndex) -> Result<Field> {
        match idx {
            AtomIndex::Wavelet(_) => self.wavelet.atom_field(idx),
            AtomIndex::Curvelet(_) => self.curvelet.atom_field(idx),
        }
    }

    /// Wavelet coefficients `<gamma_eta, psi_lambda>` of one curvelet atom,
    /// evaluated from the closed-form cross kernel. Only wavelet scales within
    /// one of the curvelet scale can be nonzero.
    pub fn cross_gram_column(&self, eta: &CurveletIndex) -> Result<CoefficientSet> {
        let ci = self.curvelet.layout.encode(&AtomIndex::Curvelet(*eta))?;
        let ct = self.curvelet.layout.tile_of(ci);
        let cinfo = self.curvelet.layout.tiles[ct];
        let center = self.curvelet.layout.center(ci);
        let odd = ci - cinfo.offset >= cinfo.block();
        let mut out = CoefficientSet::zeros(self.wavelet.layout.clone());
        for wt in self.wavelet.layout.tiles_at_scale(eta.j - 1).start..self.wavelet.layout.tiles_at_scale(eta.j + 1).end {
            let Some(kern) = CrossKernel::new(&self.curvelet.tiles[ct], &self.wavelet.tiles[wt]) else {
                continue;
            };
            let winfo = self.wavelet.layout.tiles[wt];
            for pos in 0..winfo.block() {
                let b = [
                    (pos / winfo.cols) as f64 / winfo.rows as f64,
                    (pos % winfo.cols) as f64 / winfo.cols as f64,
                ];
                out.values[winfo.offset + pos] = kern.real_part(kern.at(center, b), odd);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests;
