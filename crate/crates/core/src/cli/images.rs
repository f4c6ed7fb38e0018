//! 8-bit image output with a recorded linear stretch.

use std::fs;
use std::path::Path;

use image::{GrayImage, Luma, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral_grid::{Field, Spectrum};

use super::SCHEMA_VERSION;

/// `value = min + pixel * (max - min) / 255`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stretch {
    pub schema_version: u32,
    pub quantity: String,
    pub min: f64,
    pub max: f64,
}

impl Stretch {
    pub fn of(quantity: &str, values: &[f64]) -> Self {
        let (min, max) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let (min, max) = if min.is_finite() { (min, max) } else { (0.0, 0.0) };
        Self {
            schema_version: SCHEMA_VERSION,
            quantity: quantity.to_string(),
            min,
            max,
        }
    }

    pub fn pixel(&self, v: f64) -> u8 {
        if self.max > self.min {
            (255.0 * (v - self.min) / (self.max - self.min)).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }

    pub fn value(&self, p: u8) -> f64 {
        self.min + p as f64 * (self.max - self.min) / 255.0
    }
}

fn gray(values: &[f64], n: usize, stretch: &Stretch) -> GrayImage {
    GrayImage::from_fn(n as u32, n as u32, |x, y| {
        Luma([stretch.pixel(values[y as usize * n + x as usize])])
    })
}

/// Writes `<stem>.pgm`, `<stem>.png` and `<stem>.stretch.json`. Row 0 of
/// the field is the top image row.
pub fn write_field(dir: &Path, stem: &str, f: &Field, pgm: bool) -> Result<Stretch> {
    let n = f.grid().size();
    let stretch = Stretch::of("field", f.values());
    write_gray(dir, stem, f.values(), n, &stretch, pgm)?;
    Ok(stretch)
}

/// `log10(1 + |f^|)` with the zero frequency at the image center.
pub fn write_spectrum(dir: &Path, stem: &str, s: &Spectrum, pgm: bool) -> Result<Stretch> {
    let n = s.grid().size();
    let h = n / 2;
    let mut vals = vec![0.0; n * n];
    for (i, v) in s.values().iter().enumerate() {
        let (r, c) = (i / n, i % n);
        vals[((r + h) % n) * n + (c + h) % n] = v.norm().ln_1p() / std::f64::consts::LN_10;
    }
    let stretch = Stretch::of("log10(1+|spectrum|)", &vals);
    write_gray(dir, stem, &vals, n, &stretch, pgm)?;
    Ok(stretch)
}

fn write_gray(dir: &Path, stem: &str, vals: &[f64], n: usize, stretch: &Stretch, pgm: bool) -> Result<()> {
    let img = gray(vals, n, stretch);
    img.save(dir.join(format!("{stem}.png")))?;
    if pgm {
        img.save(dir.join(format!("{stem}.pgm")))?;
    }
    let mut json = serde_json::to_string_pretty(stretch)?;
    json.push('\n');
    fs::write(dir.join(format!("{stem}.stretch.json")), json)?;
    Ok(())
}

/// Phantom in gray with point-cluster centers in red and curve-cluster
/// centers in green.
pub fn write_overlay(path: &Path, background: &Field, point: &[[f64; 2]], curve: &[[f64; 2]]) -> Result<()> {
    let n = background.grid().size();
    let stretch = Stretch::of("field", background.values());
    let mut img = RgbImage::from_fn(n as u32, n as u32, |x, y| {
        let g = stretch.pixel(background.values()[y as usize * n + x as usize]) / 2;
        Rgb([g, g, g])
    });
    let mut mark = |c: &[f64; 2], color: Rgb<u8>| {
        let row = ((c[0] * n as f64).round() as usize) % n;
        let col = ((c[1] * n as f64).round() as usize) % n;
        img.put_pixel(col as u32, row as u32, color);
    };
    for c in curve {
        mark(c, Rgb([0, 255, 0]));
    }
    for c in point {
        mark(c, Rgb([255, 0, 0]));
    }
    img.save(path)?;
    Ok(())
}
