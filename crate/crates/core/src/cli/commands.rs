use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::coherence::{coherence_report, Cluster, CoherenceReport, ReportOptions, SubbandTruth};
use crate::error::Result;
use crate::frames::{AtomIndex, CoefficientSet, FramePair, Phase};
use crate::oracle::{certify_solver, sweep, SweepKind};
use crate::separator::{separate_full, separation_metrics, FullSeparation, SeparationMetrics};
use crate::stats::log2_slope;
use crate::subband::{decompose_spectrum, filter_spectrum, ResidualRouting};

use super::images::{write_field, write_overlay, write_spectrum};
use super::{
    build_scene, ensure_dir, substream_seed, GenArgs, OracleArgs, Resolved, RunArgs, RunConfig, Scene,
    SeparateArgs, EXIT_CHECK_FAILED, EXIT_DEGRADED, SCHEMA_VERSION,
};

fn setup(args: &RunArgs) -> Result<(Resolved, Scene)> {
    let r = RunConfig::load(args)?.resolve()?;
    ensure_dir(&r.config.out)?;
    log::info!("grid {} scales {:?}", r.grid.size(), r.grid.scales());
    let scene = build_scene(&r)?;
    Ok((r, scene))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(std::io::Error::other)?)
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    std::io::Error::other(e).into()
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v}")
    }
}

pub fn cmd_gen(args: &GenArgs) -> Result<i32> {
    let (r, scene) = setup(&args.run)?;
    let out = &r.config.out;
    let phantom = write_field(out, "phantom", &scene.observed.field, true)?;
    let spectrum = write_spectrum(out, "spectrum", &scene.observed.spectrum, true)?;
    if args.components {
        write_field(out, "point", &scene.point.field, false)?;
        write_field(out, "curve", &scene.curve_part.field, false)?;
    }

    let mut w = csv_writer(&out.join("energy.csv"))?;
    w.write_record(["j", "E_P", "E_C", "ratio"]).map_err(csv_err)?;
    for ((j, ep), (_, ec)) in scene.point.energy_profile().into_iter().zip(scene.curve_part.energy_profile()) {
        let ratio = if ec > 0.0 { ep / ec } else { f64::INFINITY };
        w.write_record([j.to_string(), num(ep), num(ec), num(ratio)]).map_err(csv_err)?;
    }
    w.flush()?;

    if args.coefficients {
        let pair = FramePair::new(scene.grid);
        write_coefficients(&out.join("wavelet_coefficients.csv"), &pair.wavelet_analysis(&scene.observed.field))?;
        write_coefficients(&out.join("curvelet_coefficients.csv"), &pair.curvelet_analysis(&scene.observed.field))?;
    }
    write_json(
        &out.join("phantom.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "config": r.config,
            "match_factor": scene.match_factor,
            "norm_point": scene.point.field.norm(),
            "norm_curve": scene.curve_part.field.norm(),
            "stretch": { "phantom": phantom, "spectrum": spectrum },
        }),
    )?;
    println!("wrote phantom, spectrum and energy table to {}", out.display());
    Ok(0)
}

/// One row per nonzero coefficient:
/// `index,frame,j,l,k1,k2,phase,center_x,center_y,value`; `l` and `phase`
/// are empty for wavelets.
pub fn write_coefficients(path: &Path, c: &CoefficientSet) -> Result<()> {
    let layout = c.layout();
    let mut w = csv_writer(path)?;
    w.write_record(["index", "frame", "j", "l", "k1", "k2", "phase", "center_x", "center_y", "value"])
        .map_err(csv_err)?;
    for (i, &v) in c.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let ctr = layout.center(i);
        let (frame, j, l, k, phase) = match layout.decode(i)? {
            AtomIndex::Wavelet(a) => ("wavelet", a.j, String::new(), a.k, ""),
            AtomIndex::Curvelet(a) => (
                "curvelet",
                a.j,
                a.l.to_string(),
                a.k,
                match a.phase {
                    Phase::Even => "even",
                    Phase::Odd => "odd",
                },
            ),
        };
        w.write_record([
            i.to_string(),
            frame.to_string(),
            j.to_string(),
            l,
            k[0].to_string(),
            k[1].to_string(),
            phase.to_string(),
            num(ctr[0]),
            num(ctr[1]),
            num(v),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn separation(r: &Resolved, scene: &Scene, pair: &FramePair) -> Result<(FullSeparation, SeparationMetrics)> {
    let sep = separate_full(&scene.observed.field, pair, &r.solver, r.routing)?;
    let tp = decompose_spectrum(&scene.point.spectrum);
    let tc = decompose_spectrum(&scene.curve_part.spectrum);
    let metrics = separation_metrics(&sep, &tp, &tc)?;
    Ok((sep, metrics))
}

fn diagnostics(sep: &FullSeparation) -> Vec<String> {
    sep.subbands
        .iter()
        .filter(|s| !s.converged())
        .map(|s| {
            format!(
                "scale {}: no convergence after {} iterations (relative gap {:.3e})",
                s.j,
                s.iterations,
                s.relative_gap()
            )
        })
        .collect()
}

pub fn cmd_separate(args: &SeparateArgs) -> Result<i32> {
    let (r, scene) = setup(&args.run)?;
    let out = &r.config.out;
    let pair = FramePair::new(scene.grid);
    let (sep, metrics) = separation(&r, &scene, &pair)?;
    write_field(out, "point_part", &sep.point, true)?;
    write_field(out, "curve_part", &sep.curve, true)?;
    if r.routing == ResidualRouting::Separate {
        write_field(out, "residual", &sep.residual, true)?;
    }
    if args.subbands {
        for s in &sep.subbands {
            write_field(out, &format!("w_j{}", s.j), &s.w, false)?;
            write_field(out, &format!("c_j{}", s.j), &s.c, false)?;
        }
    }
    let diag = diagnostics(&sep);
    let scales: Vec<_> = sep
        .subbands
        .iter()
        .map(|s| {
            let m = metrics.scales.iter().find(|m| m.j == s.j);
            json!({
                "j": s.j,
                "closure": s.j > r.grid.j_max(),
                "ratio": m.map(|m| m.ratio),
                "err_point": m.map(|m| m.err_point),
                "err_curve": m.map(|m| m.err_curve),
                "norm_point": m.map(|m| m.norm_point),
                "norm_curve": m.map(|m| m.norm_curve),
                "objective": s.objective,
                "dual": s.dual,
                "relative_gap": s.relative_gap(),
                "iterations": s.iterations,
                "stop": s.stop,
                "converged": s.converged(),
            })
        })
        .collect();
    write_json(
        &out.join("metrics.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "config": r.config,
            "scales": scales,
            "skipped_scales": metrics.skipped,
            "slope": metrics.slope,
            "degraded": sep.degraded(),
            "diagnostics": diag,
        }),
    )?;
    for m in &metrics.scales {
        println!("j={} r_j={:.6}", m.j, m.ratio);
    }
    match metrics.slope {
        Some(s) => println!("log2 slope of r_j: {s:.4}"),
        None => println!("log2 slope of r_j: not available"),
    }
    if diag.is_empty() {
        Ok(0)
    } else {
        for d in &diag {
            eprintln!("degraded: {d}");
        }
        Ok(EXIT_DEGRADED)
    }
}

fn scale_coherence(
    r: &Resolved,
    scene: &Scene,
    pair: &FramePair,
    j: i32,
) -> Result<(CoherenceReport, Cluster, Cluster)> {
    let pc = pair.wavelet().analysis_spectrum(&filter_spectrum(&scene.point.spectrum, j));
    let cc = pair.curvelet().analysis_spectrum(&filter_spectrum(&scene.curve_part.spectrum, j));
    let norm = filter_spectrum(&scene.clean.spectrum, j).norm();
    let truth = SubbandTruth {
        points: scene.points.as_ref(),
        curve: scene.curve.as_ref(),
        point_coeffs: &pc,
        curve_coeffs: &cc,
        norm,
    };
    let opts = ReportOptions {
        epsilon: r.config.epsilon,
        kappa_samples: r.config.kappa_samples,
        seed: substream_seed(r.config.seed, &format!("kappa-{j}")),
    };
    coherence_report(pair, j, &truth, &opts)
}

fn write_cluster(path: &Path, c: &Cluster, pair: &FramePair) -> Result<()> {
    let layout = pair.frame(c.frame).layout();
    let mut w = csv_writer(path)?;
    w.write_record(["index", "tile_scale", "center_x", "center_y"]).map_err(csv_err)?;
    for &i in &c.indices {
        let ctr = layout.center(i);
        w.write_record([i.to_string(), layout.scale_of(i).to_string(), num(ctr[0]), num(ctr[1])])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn slopes(rows: &[(i32, [f64; 5])], names: [&str; 5]) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    for (k, name) in names.iter().enumerate() {
        let pts: Vec<(f64, f64)> = rows.iter().map(|(j, v)| (*j as f64, v[k])).filter(|p| p.1.is_finite()).collect();
        m.insert(
            name.to_string(),
            match log2_slope(&pts) {
                Some(s) => json!(s),
                None => json!("not available"),
            },
        );
    }
    serde_json::Value::Object(m)
}

pub fn cmd_coherence(args: &RunArgs) -> Result<i32> {
    let (r, scene) = setup(args)?;
    let out = &r.config.out;
    let pair = FramePair::new(scene.grid);
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for j in scene.grid.scales() {
        let (rep, s1, s2) = scale_coherence(&r, &scene, &pair, j)?;
        write_cluster(&out.join(format!("cluster_point_j{j}.csv")), &s1, &pair)?;
        write_cluster(&out.join(format!("cluster_curve_j{j}.csv")), &s2, &pair)?;
        write_overlay(
            &out.join(format!("overlay_j{j}.png")),
            &scene.clean.field,
            &s1.centers(pair.wavelet().layout()),
            &s2.centers(pair.curvelet().layout()),
        )?;
        println!(
            "j={j} |S1|={} |S2|={} mu_c1={:.4} mu_c2={:.4} kappa in [{:.4}, {:.4}] delta1/|f_j|={:.4} delta2/|f_j|={:.4}",
            rep.size_point_cluster,
            rep.size_curve_cluster,
            rep.mu_c_point,
            rep.mu_c_curve,
            rep.kappa_lower,
            rep.kappa_upper,
            rep.delta_point_rel,
            rep.delta_curve_rel
        );
        rows.push((j, [rep.mu_c_point, rep.mu_c_curve, rep.delta_point_rel, rep.delta_curve_rel, rep.kappa_upper]));
        reports.push(rep);
    }
    write_json(
        &out.join("coherence.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "config": r.config,
            "reports": reports,
            "slopes": slopes(&rows, ["mu_c_point", "mu_c_curve", "delta_point_rel", "delta_curve_rel", "kappa_upper"]),
        }),
    )?;
    Ok(0)
}

/// Columns of `decay.csv`: `j,r_j,mu_c1,mu_c2,delta1_rel,delta2_rel,bound`.
/// `bound` is `2 (delta1 + delta2) / (1 - 2 kappa_upper)` divided by
/// `||P_j|| + ||C_j||`, or `inf` when `kappa_upper >= 1/2`.
pub const DECAY_COLUMNS: [&str; 7] = ["j", "r_j", "mu_c1", "mu_c2", "delta1_rel", "delta2_rel", "bound"];

pub fn cmd_decay_study(args: &RunArgs) -> Result<i32> {
    let (r, scene) = setup(args)?;
    let out = &r.config.out;
    let pair = FramePair::new(scene.grid);
    let (sep, metrics) = separation(&r, &scene, &pair)?;
    let mut w = csv_writer(&out.join("decay.csv"))?;
    w.write_record(DECAY_COLUMNS).map_err(csv_err)?;
    let mut rows = Vec::new();
    for m in &metrics.scales {
        let (rep, _, _) = scale_coherence(&r, &scene, &pair, m.j)?;
        let scale = m.norm_point + m.norm_curve;
        let bound = rep.recovery_bound.map_or(f64::INFINITY, |b| b / scale);
        w.write_record([
            m.j.to_string(),
            num(m.ratio),
            num(rep.mu_c_point),
            num(rep.mu_c_curve),
            num(rep.delta_point_rel),
            num(rep.delta_curve_rel),
            num(bound),
        ])
        .map_err(csv_err)?;
        rows.push((m.j, [m.ratio, rep.mu_c_point, rep.mu_c_curve, rep.delta_point_rel, rep.delta_curve_rel]));
    }
    w.flush()?;
    let sl = slopes(&rows, ["r_j", "mu_c1", "mu_c2", "delta1_rel", "delta2_rel"]);
    for (k, v) in sl.as_object().expect("object") {
        match v.as_f64() {
            Some(s) => println!("log2 slope of {k}: {s:.4}"),
            None => println!("log2 slope of {k}: not available"),
        }
    }
    let diag = diagnostics(&sep);
    write_json(
        &out.join("decay_summary.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "config": r.config,
            "columns": DECAY_COLUMNS,
            "slopes": sl,
            "degraded": sep.degraded(),
            "diagnostics": diag,
        }),
    )?;
    Ok(if diag.is_empty() { 0 } else { EXIT_DEGRADED })
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<i32> {
    let factor = if args.self_test { 0.5 } else { 1.0 };
    let clean = sweep(SweepKind::Clean, args.instances, substream_seed(args.seed, "oracle-clean"), factor)?;
    let noisy = sweep(SweepKind::Noisy, args.noisy, substream_seed(args.seed, "oracle-noisy"), factor)?;
    let adv = sweep(
        SweepKind::Adversarial,
        args.adversarial,
        substream_seed(args.seed, "oracle-adversarial"),
        factor,
    )?;
    let cert = if args.certify > 0 {
        Some(certify_solver(args.certify, substream_seed(args.seed, "oracle-certify"), 1e-6)?)
    } else {
        None
    };
    println!(
        "clean: {} instances, {} violations (worst error/bound {:.4})",
        clean.instances, clean.violations, clean.worst_ratio
    );
    println!(
        "noisy: {} instances, {} violations, {} uninformative (worst error/bound {:.4})",
        noisy.instances, noisy.violations, noisy.uninformative, noisy.worst_ratio
    );
    println!(
        "adversarial: {} instances, {} violations (worst error/bound {:.4})",
        adv.instances, adv.violations, adv.worst_ratio
    );
    if let Some(c) = &cert {
        println!(
            "solver: {} instances, {} mismatches (worst relative error {:.3e})",
            c.instances, c.mismatches, c.worst_relative_error
        );
    }
    let violations = clean.violations + noisy.violations + adv.violations;
    let ok = if args.self_test {
        println!("self-test: bounds halved, {violations} violations detected");
        violations > 0
    } else {
        violations == 0 && cert.as_ref().is_none_or(|c| c.mismatches == 0)
    };
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_json(
            &out.join("oracle.json"),
            &json!({
                "schema_version": SCHEMA_VERSION,
                "seed": args.seed,
                "self_test": args.self_test,
                "clean": clean,
                "noisy": noisy,
                "adversarial": adv,
                "certification": cert,
                "passed": ok,
            }),
        )?;
    }
    Ok(if ok { 0 } else { EXIT_CHECK_FAILED })
}
