use super::*;
use crate::frames::AtomIndex;
use crate::phantoms::{point_spectrum, CurveConfig};
use crate::subband::filter_spectrum;

fn pair() -> FramePair {
    FramePair::new(GridSpec::new(64, 2, 4).unwrap())
}

/// Direct sums `sum_i |<phi_i, psi>|` from analysis of each member atom.
fn direct_mu_c(pair: &FramePair, s: &Cluster) -> (f64, f64) {
    let src = pair.frame(s.frame);
    let dst = pair.frame(s.frame.other());
    let mut sums = vec![0.0; dst.layout().total];
    let mut single: f64 = 0.0;
    for &i in &s.indices {
        let atom = src.synthesis_spectrum(&{
            let mut c = CoefficientSet::zeros(src.layout().clone());
            c.values_mut()[i] = 1.0;
            c
        })
        .unwrap();
        let col = dst.analysis_spectrum(&atom);
        for (a, v) in sums.iter_mut().zip(col.values()) {
            *a += v.abs();
            single = single.max(v.abs());
        }
    }
    (sums.into_iter().fold(0.0, f64::max), single)
}

fn every_kth(layout: &Layout, j: i32, k: usize, phase: usize) -> Vec<usize> {
    layout.band_range(j).filter(|i| (i + phase) % k == 0).collect()
}

#[test]
fn recovery_bound_values() {
    assert_eq!(recovery_bound(0.0, 0.3), 0.0);
    assert_eq!(recovery_bound(1.0, 0.5), f64::INFINITY);
    assert_eq!(recovery_bound(1.0, 0.25), 4.0);
    assert_eq!(noisy_recovery_bound(1.0, 0.0, 0.25), 4.0);
    assert_eq!(noisy_recovery_bound(0.0, 1.0, 0.25), 10.0);
}

#[test]
fn p1_distance_wraps() {
    assert!((p1_distance(0.1, PI - 0.1) - 0.2).abs() < 1e-12);
    assert!((p1_distance(0.0, PI / 2.0) - PI / 2.0).abs() < 1e-12);
    assert_eq!(p1_distance(1.0, 1.0 + PI), 0.0f64.max(p1_distance(1.0, 1.0 + PI)));
    assert!(p1_distance(1.0, 1.0 + PI) < 1e-12);
}

#[test]
fn empty_cluster_has_zero_coherence() {
    let p = pair();
    for kind in [FrameKind::Wavelet, FrameKind::Curvelet] {
        assert_eq!(cluster_coherence(&Cluster::empty(kind, 3), &p).unwrap(), 0.0);
    }
}

#[test]
fn cluster_coherence_matches_direct_sums() {
    let p = pair();
    for (kind, k) in [(FrameKind::Wavelet, 7), (FrameKind::Curvelet, 11)] {
        let layout = p.frame(kind).layout();
        let s = Cluster::new(layout, 3, every_kth(layout, 3, k, 1), ClusterRecipe::Explicit).unwrap();
        assert!(!s.is_empty());
        let fast = cluster_coherence_full(&s, &p).unwrap();
        let (mu, single) = direct_mu_c(&p, &s);
        assert!((fast.mu_c - mu).abs() <= 1e-10 * mu, "{kind:?} {} vs {mu}", fast.mu_c);
        assert!((fast.mu_singleton - single).abs() <= 1e-12 + 1e-10 * single);
        assert!(fast.mu_singleton <= fast.mu_c + 1e-12);
    }
}

#[test]
fn singleton_cluster_matches_cross_gram_column() {
    let p = pair();
    let cl = p.curvelet().layout();
    for i in [cl.band_range(3).start + 5, cl.band_range(3).end - 9] {
        let AtomIndex::Curvelet(eta) = cl.decode(i).unwrap() else { unreachable!() };
        let col = p.cross_gram_column(&eta).unwrap();
        let s = Cluster::new(cl, 3, vec![i], ClusterRecipe::Explicit).unwrap();
        let mu = cluster_coherence(&s, &p).unwrap();
        assert!((mu - col.norm_linf()).abs() <= 1e-12, "{mu} vs {}", col.norm_linf());
    }
}

#[test]
fn mutual_coherence_matches_cross_gram_columns() {
    let p = pair();
    let j = 3;
    let (cl, wl) = (p.curvelet().layout(), p.wavelet().layout());
    let wband = wl.band_range(j);
    let mut direct: f64 = 0.0;
    for i in cl.band_range(j) {
        let AtomIndex::Curvelet(eta) = cl.decode(i).unwrap() else { unreachable!() };
        let col = p.cross_gram_column(&eta).unwrap();
        direct = col.values()[wband.clone()].iter().fold(direct, |m, v| m.max(v.abs()));
    }
    let mu = mutual_coherence(&p, j).unwrap();
    assert!((mu - direct).abs() <= 1e-12, "{mu} vs {direct}");
    assert!(mu > 0.0 && mu < 1.0);
}

#[test]
fn enlarging_a_cluster_never_lowers_coherence_or_raises_sparsity_defect() {
    let p = pair();
    let g = *p.grid();
    let ph = point_spectrum(&PointConfig::reference(), &g).unwrap();
    let coeffs = p.wavelet().analysis_spectrum(&filter_spectrum(&ph.spectrum, 3));
    let layout = p.wavelet().layout();
    let band: Vec<usize> = layout.band_range(3).collect();
    let mut prev_mu = 0.0;
    let mut prev_delta = f64::INFINITY;
    for frac in [0, 1, 3, 6, 10] {
        let members = band[..band.len() * frac / 10].to_vec();
        let s = Cluster::new(layout, 3, members, ClusterRecipe::Explicit).unwrap();
        let mu = cluster_coherence(&s, &p).unwrap();
        let delta = relative_sparsity(&coeffs, &s).unwrap();
        assert!(mu >= prev_mu - 1e-12);
        assert!(delta <= prev_delta + 1e-12);
        prev_mu = mu;
        prev_delta = delta;
    }
    assert!(prev_delta.abs() < 1e-12);
}

#[test]
fn relative_sparsity_extremes() {
    let p = pair();
    let g = *p.grid();
    let ph = point_spectrum(&PointConfig::reference(), &g).unwrap();
    let coeffs = p.wavelet().analysis_spectrum(&filter_spectrum(&ph.spectrum, 3));
    let empty = Cluster::empty(FrameKind::Wavelet, 3);
    let l1 = coeffs.norm_l1();
    assert!((relative_sparsity(&coeffs, &empty).unwrap() - l1).abs() <= 1e-12 * l1);
    let wrong = Cluster::empty(FrameKind::Curvelet, 3);
    assert!(relative_sparsity(&coeffs, &wrong).is_err());
}

#[test]
fn threshold_cluster_limits() {
    let p = pair();
    let g = *p.grid();
    let ph = point_spectrum(&PointConfig::reference(), &g).unwrap();
    let coeffs = p.wavelet().analysis_spectrum(&filter_spectrum(&ph.spectrum, 3));
    let band = coeffs.layout().band_range(3);
    let top = coeffs.values()[band.clone()].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let hi = threshold_cluster(&coeffs, 3, 1.0 - 1e-12).unwrap();
    assert!(!hi.is_empty());
    assert!(hi.indices.iter().all(|&i| coeffs.values()[i].abs() >= top * (1.0 - 1e-12)));
    let lo = threshold_cluster(&coeffs, 3, 1e-300).unwrap();
    let support = band.filter(|&i| coeffs.values()[i] != 0.0).count();
    assert_eq!(lo.len(), support);
    let zero = CoefficientSet::zeros(coeffs.layout().clone());
    assert!(threshold_cluster(&zero, 3, 0.5).unwrap().is_empty());
    assert!(threshold_cluster(&coeffs, 3, 1.0).is_err());
}

#[test]
fn point_tube_radius_and_membership() {
    assert!((tube_radius(6, 1.0 / 64.0) - 0.016_674).abs() < 1e-6);
    let p = pair();
    let cfg = PointConfig::reference();
    assert!(point_tube_cluster(&p, &cfg, 3, 0.05).is_err());
    assert!(point_tube_cluster(&p, &cfg, 3, 0.0).is_err());
    let s = point_tube_cluster(&p, &cfg, 3, DEFAULT_EPSILON).unwrap();
    let layout = p.wavelet().layout();
    let r = tube_radius(3, DEFAULT_EPSILON);
    for c in s.centers(layout) {
        assert!(cfg.points.iter().any(|&x| GridSpec::torus_distance(c, x) <= r));
    }
    // every band atom inside the tube is a member
    let inside = layout
        .band_range(3)
        .filter(|&i| cfg.points.iter().any(|&x| GridSpec::torus_distance(layout.center(i), x) <= r))
        .count();
    assert_eq!(inside, s.len());
}

#[test]
fn curve_tube_orientations_follow_the_normal() {
    let p = pair();
    let circle = CurveConfig::reference(4096);
    let s = curve_tube_cluster(&p, &circle, 3, DEFAULT_EPSILON).unwrap();
    assert!(!s.is_empty());
    let layout = p.curvelet().layout();
    let r = tube_radius(3, DEFAULT_EPSILON);
    for &i in &s.indices {
        let c = layout.center(i);
        let (node, d) = circle
            .nodes
            .iter()
            .map(|n| (n, GridSpec::torus_distance(c, n.pos)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(d <= r);
        if let TileShape::Wedge { count, .. } = layout.tiles[layout.tile_of(i)].shape {
            let theta = layout.orientation(i).unwrap();
            assert!(p1_distance(theta, node.normal) <= PI / count as f64 + 1e-12);
        }
    }
}

#[test]
fn vertical_segment_tube_uses_the_zero_orientation() {
    let p = pair();
    let seg = CurveConfig::segment([0.5, 0.5], 0.125, 4096).unwrap();
    let s = curve_tube_cluster(&p, &seg, 3, DEFAULT_EPSILON).unwrap();
    let layout = p.curvelet().layout();
    for &i in &s.indices {
        if let (Some(theta), TileShape::Wedge { count, .. }) = (layout.orientation(i), layout.tiles[layout.tile_of(i)].shape) {
            assert!(p1_distance(theta, 0.0) <= PI / count as f64 + 1e-12);
        }
    }
    assert!(s.indices.iter().any(|&i| layout.orientation(i) == Some(0.0)));
}

#[test]
fn kappa_bounds_are_ordered() {
    let p = pair();
    let (wl, cl) = (p.wavelet().layout(), p.curvelet().layout());
    let e = kappa_bounds(&Cluster::empty(FrameKind::Wavelet, 3), &Cluster::empty(FrameKind::Curvelet, 3), &p, 4, 1).unwrap();
    assert_eq!((e.lower, e.upper), (0.0, 0.0));
    for (seed, k) in [(1u64, 13usize), (2, 29), (3, 61)] {
        let s1 = Cluster::new(wl, 3, every_kth(wl, 3, k, 0), ClusterRecipe::Explicit).unwrap();
        let s2 = Cluster::new(cl, 3, every_kth(cl, 3, k, 3), ClusterRecipe::Explicit).unwrap();
        let b = kappa_bounds(&s1, &s2, &p, 8, seed).unwrap();
        assert!(b.lower > 0.0);
        assert!(b.lower <= b.upper + 1e-12, "{b:?}");
        assert!(b.evaluated > 0);
    }
    assert!(kappa_bounds(&Cluster::empty(FrameKind::Curvelet, 3), &Cluster::empty(FrameKind::Wavelet, 3), &p, 1, 0).is_err());
}

#[test]
fn cluster_rejects_out_of_band_indices() {
    let p = pair();
    let wl = p.wavelet().layout();
    let outside = wl.total - 1;
    assert!(Cluster::new(wl, 2, vec![outside], ClusterRecipe::Explicit).is_err());
}
