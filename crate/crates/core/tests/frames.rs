use geosep::frames::{orientation_count, TileShape};
use geosep::{AtomIndex, CoefficientSet, Error, Field, FrameKind, FramePair, GridSpec, Phase, WaveletIndex};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn noise(g: GridSpec, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field::new(g, (0..g.len()).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
}

fn pair64() -> FramePair {
    FramePair::new(GridSpec::new(64, 2, 4).unwrap())
}

fn unit_atom(pair: &FramePair, kind: FrameKind, i: usize) -> Field {
    let f = pair.frame(kind);
    let mut c = CoefficientSet::zeros(f.layout().clone());
    c.values_mut()[i] = 1.0;
    f.synthesis(&c).unwrap()
}

#[test]
fn index_round_trip() {
    let pair = pair64();
    for kind in [FrameKind::Wavelet, FrameKind::Curvelet] {
        let layout = pair.frame(kind).layout();
        for i in 0..layout.total {
            let idx = layout.decode(i).unwrap();
            assert_eq!(layout.encode(&idx).unwrap(), i);
            assert_eq!(idx.scale(), layout.scale_of(i));
        }
        assert!(layout.decode(layout.total).is_err());
    }
    let w = pair.wavelet().layout();
    let bogus = AtomIndex::Wavelet(WaveletIndex { j: 3, k: [10_000, 0] });
    assert!(matches!(w.encode(&bogus), Err(Error::InvalidIndex(_))));
    let c = pair.curvelet().layout();
    assert!(c.encode(&bogus).is_err());
}

#[test]
fn curvelet_orientations_per_scale() {
    let pair = FramePair::new(GridSpec::new(256, 3, 6).unwrap());
    let layout = pair.curvelet().layout();
    for j in 3..=7 {
        let wedges: Vec<u32> = layout
            .tiles_at_scale(j)
            .filter_map(|t| match layout.tiles[t].shape {
                TileShape::Wedge { orientation, count } => {
                    assert_eq!(count, orientation_count(j));
                    Some(orientation)
                }
                TileShape::Isotropic => None,
            })
            .collect();
        assert_eq!(wedges, (0..orientation_count(j)).collect::<Vec<_>>(), "scale {j}");
    }
    assert_eq!(orientation_count(3), 4);
    assert_eq!(orientation_count(4), 4);
    assert_eq!(orientation_count(5), 8);
    // Low-pass tile is shared and isotropic.
    let lo = layout.tiles_at_scale(2);
    assert_eq!(lo.len(), 1);
    assert_eq!(layout.tiles[lo.start].shape, TileShape::Isotropic);
    let idx = layout.decode(layout.tiles[lo.start].offset).unwrap();
    assert!(matches!(idx, AtomIndex::Curvelet(c) if c.l == 0 && c.phase == Phase::Even));
}

#[test]
fn atoms_have_norm_at_most_one() {
    let pair = pair64();
    for kind in [FrameKind::Wavelet, FrameKind::Curvelet] {
        let layout = pair.frame(kind).layout();
        for t in &layout.tiles {
            let a = unit_atom(&pair, kind, t.offset);
            assert!(a.norm() <= 1.0 + 1e-12, "{kind:?} scale {} norm {}", t.scale, a.norm());
            assert!(a.norm() > 0.0);
        }
    }
}

#[test]
fn wavelet_atoms_are_translates() {
    let pair = pair64();
    let layout = pair.wavelet().layout();
    let t = layout.tiles[layout.tiles_at_scale(3).start];
    let base = unit_atom(&pair, FrameKind::Wavelet, t.offset);
    let step = 64 / t.rows;
    let (kr, kc) = (3usize, 5usize);
    let moved = unit_atom(&pair, FrameKind::Wavelet, t.offset + kr * t.cols + kc);
    for r in 0..64 {
        for c in 0..64 {
            let want = base.get((r + 64 - kr * step) % 64, (c + 64 - kc * step) % 64);
            assert!((moved.get(r, c) - want).abs() < 1e-12);
        }
    }
    let ctr = layout.center(t.offset + kr * t.cols + kc);
    assert_eq!(ctr, [kr as f64 / t.rows as f64, kc as f64 / t.cols as f64]);
}

#[test]
fn synthesis_rejects_foreign_layout() {
    let pair = pair64();
    let c = pair.wavelet().analysis(&noise(*pair.grid(), 1));
    assert!(matches!(pair.curvelet().synthesis(&c), Err(Error::GridMismatch)));
    assert!(CoefficientSet::from_values(pair.wavelet().layout().clone(), vec![0.0; 3]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parseval_and_perfect_reconstruction(seed in any::<u64>(), size_exp in 6u32..=7) {
        let pair = FramePair::new(GridSpec::with_default_scales(1 << size_exp).unwrap());
        let f = noise(*pair.grid(), seed);
        let e = f.norm().powi(2);
        for kind in [FrameKind::Wavelet, FrameKind::Curvelet] {
            let frame = pair.frame(kind);
            let c = frame.analysis(&f);
            prop_assert!((c.norm_l2().powi(2) - e).abs() < 1e-10 * e);
            let back = frame.synthesis(&c).unwrap();
            prop_assert!(back.sub(&f).norm() < 1e-10 * f.norm());
        }
    }

    #[test]
    fn analysis_is_adjoint_of_synthesis(seed in any::<u64>()) {
        let pair = pair64();
        let f = noise(*pair.grid(), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for kind in [FrameKind::Wavelet, FrameKind::Curvelet] {
            let frame = pair.frame(kind);
            let x: Vec<f64> = (0..frame.layout().total).map(|_| StandardNormal.sample(&mut rng)).collect();
            let x = CoefficientSet::from_values(frame.layout().clone(), x).unwrap();
            let lhs = frame.analysis(&f).dot(&x);
            let rhs = f.dot(&frame.synthesis(&x).unwrap());
            prop_assert!((lhs - rhs).abs() < 1e-9 * (lhs.abs() + 1.0));
        }
    }
}
