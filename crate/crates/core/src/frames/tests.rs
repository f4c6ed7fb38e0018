use super::*;
use crate::spectral_grid::inverse_dft;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn grid() -> GridSpec {
    GridSpec::new(128, 3, 5).unwrap()
}

fn random_field(g: GridSpec, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field::from_fn(g, |_, _| StandardNormal.sample(&mut rng)).unwrap()
}

fn random_coeffs(layout: &Arc<Layout>, seed: u64) -> CoefficientSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..layout.total).map(|_| StandardNormal.sample(&mut rng)).collect();
    CoefficientSet::from_values(layout.clone(), v).unwrap()
}

#[test]
fn tiles_wrap_injectively() {
    let pair = FramePair::new(grid());
    for f in [pair.wavelet(), pair.curvelet()] {
        for t in f.tiles() {
            assert!(t.is_injective(), "{t:?}");
        }
    }
}

#[test]
fn squared_weights_partition_unity() {
    let g = grid();
    let pair = FramePair::new(g);
    for f in [pair.wavelet(), pair.curvelet()] {
        let mut acc = vec![0.0; g.len()];
        for t in f.tiles() {
            let k = if matches!(t.shape, TileShape::Wedge { .. }) { 2.0 } else { 1.0 };
            for e in &t.entries {
                // a one-sided wedge covers its point and the mirror point
                if k == 2.0 && e.mirror != e.point {
                    acc[e.point as usize] += e.weight * e.weight;
                    acc[e.mirror as usize] += e.weight * e.weight;
                } else {
                    acc[e.point as usize] += k * e.weight * e.weight;
                }
            }
        }
        for (p, a) in acc.iter().enumerate().skip(1) {
            assert!((a - 1.0).abs() < 1e-12, "{:?} point {p}: {a}", f.kind());
        }
    }
}

#[test]
fn parseval_and_round_trip() {
    let g = grid();
    let pair = FramePair::new(g);
    for seed in 0..5 {
        // remove the mean, the only frequency no tile covers
        let f = random_field(g, seed);
        let mean = f.values().iter().sum::<f64>() / g.len() as f64;
        let f = Field::new(g, f.values().iter().map(|v| v - mean).collect()).unwrap();
        for frame in [pair.wavelet(), pair.curvelet()] {
            let c = frame.analysis(&f);
            let e = c.norm_l2().powi(2);
            let ef = f.norm().powi(2);
            assert!((e - ef).abs() <= 1e-10 * ef, "{:?}: {e} vs {ef}", frame.kind());
            let back = frame.synthesis(&c).unwrap();
            assert!(back.sub(&f).norm() <= 1e-10 * f.norm());
        }
    }
}

#[test]
fn synthesis_is_adjoint_of_analysis() {
    let g = grid();
    let pair = FramePair::new(g);
    for frame in [pair.wavelet(), pair.curvelet()] {
        let f = random_field(g, 11);
        let c = random_coeffs(frame.layout(), 12);
        let lhs = frame.analysis(&f).dot(&c);
        let rhs = f.dot(&frame.synthesis(&c).unwrap());
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{lhs} {rhs}");
        // synthesized spectra describe real fields
        let s = frame.synthesis_spectrum(&c).unwrap();
        assert!(inverse_dft(&s).is_ok());
    }
}

#[test]
fn zero_in_zero_out() {
    let g = grid();
    let pair = FramePair::new(g);
    let z = Field::zeros(g);
    assert_eq!(pair.wavelet_analysis(&z).norm_linf(), 0.0);
    assert_eq!(pair.curvelet_analysis(&z).norm_linf(), 0.0);
    let c = CoefficientSet::zeros(pair.curvelet().layout().clone());
    assert_eq!(pair.curvelet_synthesis(&c).unwrap().max_abs(), 0.0);
}

#[test]
fn lattice_counts() {
    let g = GridSpec::new(256, 3, 6).unwrap();
    let pair = FramePair::new(g);
    let w = pair.enumerate_wavelets(4).unwrap();
    assert_eq!(w.len(), 4096);
    assert_eq!(w, pair.enumerate_wavelets(4).unwrap());
    assert!(pair.enumerate_wavelets(8).is_err());
    assert!(pair.enumerate_curvelets(1).is_err());

    let orient = |j: i32| {
        let mut ls: Vec<u32> = pair.enumerate_curvelets(j).unwrap().iter().map(|c| c.l).collect();
        ls.dedup();
        ls
    };
    assert_eq!(orient(4), vec![0, 1, 2, 3]);
    assert_eq!(orient(5).len(), 8);
    assert_eq!(orient(6).len(), 2 * orient(4).len());
    let lay = pair.curvelet().layout();
    let thetas: Vec<f64> = lay
        .tiles_at_scale(4)
        .map(|t| {
            let i = lay.tiles[t].offset;
            lay.orientation(i).unwrap()
        })
        .collect();
    let pi = std::f64::consts::PI;
    assert_eq!(thetas, vec![0.0, pi / 4.0, pi / 2.0, 3.0 * pi / 4.0]);
}

#[test]
fn index_encode_decode_round_trip() {
    let pair = FramePair::new(grid());
    for frame in [pair.wavelet(), pair.curvelet()] {
        let lay = frame.layout();
        for i in (0..lay.total).step_by(97) {
            let idx = lay.decode(i).unwrap();
            assert_eq!(lay.encode(&idx).unwrap(), i);
        }
        assert!(lay.decode(lay.total).is_err());
    }
    let bad = AtomIndex::Wavelet(WaveletIndex { j: 4, k: [1000, 0] });
    assert!(pair.atom_field(&bad).is_err());
}

#[test]
fn wedge_supported_spectrum_hits_two_orientations() {
    let g = grid();
    let pair = FramePair::new(g);
    // a single frequency pair at angle 0.3 rad, radius 22 (scale 4 core)
    let (a, b) = (21i64, 7i64);
    let mut s = Spectrum::zeros(g);
    let n = g.size() as i64;
    let p = (a.rem_euclid(n) * n + b.rem_euclid(n)) as usize;
    s.values_mut()[p] = Complex64::new(1.0, 0.5);
    s.values_mut()[g.mirror(p)] = Complex64::new(1.0, -0.5);
    let c = pair.curvelet().analysis_spectrum(&s);
    let lay = pair.curvelet().layout();
    let mut hit = std::collections::BTreeSet::new();
    for (ti, info) in lay.tiles.iter().enumerate() {
        if c.values()[info.range()].iter().any(|v| v.abs() > 1e-12) {
            hit.insert(ti);
        }
    }
    let t = 0.3217505543966422_f64 * 4.0 / std::f64::consts::PI; // atan(7/21) in wedge units at j=4
    assert!(t > 0.0 && t < 1.0);
    let mut shapes: Vec<(i32, TileShape)> = hit.iter().map(|&i| (lay.tiles[i].scale, lay.tiles[i].shape)).collect();
    shapes.retain(|s| s.0 == 4);
    assert_eq!(
        shapes,
        vec![
            (4, TileShape::Wedge { orientation: 0, count: 4 }),
            (4, TileShape::Wedge { orientation: 1, count: 4 })
        ]
    );
}

#[test]
fn atoms_have_norm_at_most_one() {
    let pair = FramePair::new(grid());
    for frame in [pair.wavelet(), pair.curvelet()] {
        let lay = frame.layout();
        for info in &lay.tiles {
            let f = frame.atom_field(&lay.decode(info.offset).unwrap()).unwrap();
            assert!(f.norm() <= 1.0 + 1e-8, "{info:?} {}", f.norm());
            assert!(f.norm() > 0.0);
        }
    }
}

#[test]
fn wavelet_atom_is_radially_symmetric() {
    let g = grid();
    let pair = FramePair::new(g);
    let idx = AtomIndex::Wavelet(WaveletIndex { j: 4, k: [16, 40] });
    let f = pair.atom_field(&idx).unwrap();
    let c = pair.wavelet().layout().center(pair.wavelet().layout().encode(&idx).unwrap());
    let (r0, c0) = ((c[0] * 128.0) as i64, (c[1] * 128.0) as i64);
    let at = |dr: i64, dc: i64| f.get((r0 + dr).rem_euclid(128) as usize, (c0 + dc).rem_euclid(128) as usize);
    // the eight symmetric images of one offset
    let (u, v) = (3i64, 5i64);
    let base = at(u, v);
    for (a, b) in [(u, -v), (-u, v), (-u, -v), (v, u), (v, -u), (-v, u), (-v, -u)] {
        assert!((at(a, b) - base).abs() <= 1e-8, "{a},{b}");
    }
}

#[test]
fn lattice_shift_is_circular_shift() {
    let g = grid();
    let pair = FramePair::new(g);
    for (a, b) in [
        (
            AtomIndex::Curvelet(CurveletIndex { j: 5, l: 2, k: [0, 0], phase: Phase::Odd }),
            AtomIndex::Curvelet(CurveletIndex { j: 5, l: 2, k: [1, 2], phase: Phase::Odd }),
        ),
        (
            AtomIndex::Wavelet(WaveletIndex { j: 3, k: [0, 0] }),
            AtomIndex::Wavelet(WaveletIndex { j: 3, k: [5, 1] }),
        ),
    ] {
        let fa = pair.atom_field(&a).unwrap();
        let fb = pair.atom_field(&b).unwrap();
        let frame = pair.frame(match a {
            AtomIndex::Wavelet(_) => FrameKind::Wavelet,
            _ => FrameKind::Curvelet,
        });
        let cb = frame.layout().center(frame.layout().encode(&b).unwrap());
        let (dr, dc) = ((cb[0] * 128.0).round() as usize, (cb[1] * 128.0).round() as usize);
        for r in 0..128 {
            for c in 0..128 {
                let shifted = fa.get((r + 128 - dr) % 128, (c + 128 - dc) % 128);
                assert!((fb.get(r, c) - shifted).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn cross_gram_column_matches_analysis_of_atom() {
    let g = grid();
    let pair = FramePair::new(g);
    for eta in [
        CurveletIndex { j: 4, l: 1, k: [3, 5], phase: Phase::Even },
        CurveletIndex { j: 4, l: 3, k: [7, 1], phase: Phase::Odd },
        CurveletIndex { j: 5, l: 6, k: [0, 9], phase: Phase::Even },
        CurveletIndex { j: 2, l: 0, k: [2, 2], phase: Phase::Even },
    ] {
        let col = pair.cross_gram_column(&eta).unwrap();
        let ci = pair.curvelet().layout().encode(&AtomIndex::Curvelet(eta)).unwrap();
        let direct = pair.wavelet().analysis_spectrum(&pair.curvelet().atom_spectrum(ci).unwrap());
        let err = col
            .values()
            .iter()
            .zip(direct.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-10, "{eta:?}: {err}");
    }
}

#[test]
fn cross_gram_vanishes_beyond_neighbouring_scales() {
    let g = GridSpec::new(256, 3, 6).unwrap();
    let pair = FramePair::new(g);
    let eta = CurveletIndex { j: 4, l: 2, k: [1, 1], phase: Phase::Even };
    let ci = pair.curvelet().layout().encode(&AtomIndex::Curvelet(eta)).unwrap();
    let c = pair.wavelet().analysis_spectrum(&pair.curvelet().atom_spectrum(ci).unwrap());
    for j in g.frame_scales() {
        let m = c.scale_values(j).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if (j - 4).abs() >= 2 {
            assert_eq!(m, 0.0, "scale {j}");
        } else {
            assert!(m > 0.0, "scale {j}");
        }
    }
}
