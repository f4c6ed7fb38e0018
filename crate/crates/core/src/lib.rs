//! Separation of point and curve singularities in images by analysis-side
//! l1 minimization over a radial-wavelet frame and a curvelet frame.

pub mod cli;
pub mod coherence;
pub mod error;
mod fft;
pub mod frames;
pub mod oracle;
pub mod phantoms;
pub mod separator;
pub mod spectral_grid;
pub mod stats;
pub mod subband;
pub mod windows;

pub use error::{Error, Result};
pub use frames::{AtomIndex, CoefficientSet, CurveletIndex, FrameKind, FramePair, Phase, WaveletIndex};
pub use spectral_grid::{annulus_energy, forward_dft, inverse_dft, Field, GridSpec, Spectrum};
