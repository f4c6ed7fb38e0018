//! Dyadic bandpass filter bank `F_j` with low-pass and high-pass closures.
//!
//! `decompose` multiplies the spectrum by `Phi0`, `W(|xi|/2^j)` for
//! `j_min..=j_max`, and the high-pass closure `T`; `reconstruct` applies the
//! same multipliers again and sums. Since the squares add to one, the pair is
//! an exact identity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_grid::{forward_dft, inverse_dft_real_part, Field, GridSpec, Spectrum};
use crate::windows::{HighPass, LowPass, RadialWindow};

/// Where the unsplit residual goes after separation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualRouting {
    /// Added to the curve component.
    #[default]
    Curve,
    /// Added to the point component.
    Point,
    /// Kept apart; neither component contains it.
    Separate,
}

/// Multiplier of one filter-bank slot: `j_min - 1` is the low-pass, `j_max + 1`
/// the high-pass closure.
pub fn filter_weight(grid: &GridSpec, slot: i32, r: f64) -> f64 {
    if slot < grid.j_min() {
        LowPass::new(grid.j_min()).eval(r)
    } else if slot > grid.j_max() {
        HighPass::new(grid.j_max()).eval(r)
    } else {
        RadialWindow.at_scale(r, slot)
    }
}

/// Spectrum multiplied by one filter-bank slot.
pub fn filter_spectrum(s: &Spectrum, slot: i32) -> Spectrum {
    let g = *s.grid();
    s.filtered(|r| filter_weight(&g, slot, r))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubbandStack {
    grid: GridSpec,
    pub lowpass: Field,
    pub pieces: BTreeMap<i32, Field>,
    pub highpass: Field,
}

impl SubbandStack {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            lowpass: Field::zeros(grid),
            pieces: grid.scales().map(|j| (j, Field::zeros(grid))).collect(),
            highpass: Field::zeros(grid),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn piece(&self, j: i32) -> Result<&Field> {
        self.grid.check_scale(j)?;
        self.pieces.get(&j).ok_or(Error::ScaleOutOfRange {
            scale: j,
            lo: self.grid.j_min(),
            hi: self.grid.j_max(),
        })
    }
}

pub fn decompose(f: &Field) -> SubbandStack {
    decompose_spectrum(&forward_dft(f))
}

pub fn decompose_spectrum(s: &Spectrum) -> SubbandStack {
    let g = *s.grid();
    let field = |slot: i32| inverse_dft_real_part(&filter_spectrum(s, slot));
    SubbandStack {
        grid: g,
        lowpass: field(g.j_min() - 1),
        pieces: g.scales().map(|j| (j, field(j))).collect(),
        highpass: field(g.j_max() + 1),
    }
}

/// `sum_j F_j * f_j` plus both closures.
pub fn reconstruct(s: &SubbandStack) -> Field {
    let g = s.grid;
    let mut acc = filter_spectrum(&forward_dft(&s.lowpass), g.j_min() - 1);
    for (&j, f) in &s.pieces {
        acc = acc.add(&filter_spectrum(&forward_dft(f), j));
    }
    acc = acc.add(&filter_spectrum(&forward_dft(&s.highpass), g.j_max() + 1));
    inverse_dft_real_part(&acc)
}

/// Max over grid frequencies of `|Phi0^2 + sum_j W_j^2 + T^2 - 1|`.
pub fn partition_residual(grid: &GridSpec) -> f64 {
    (0..grid.len())
        .map(|p| {
            let r = grid.radius(p);
            let s: f64 = grid.frame_scales().map(|j| filter_weight(grid, j, r).powi(2)).sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max)
}
