use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use geosep::cli::images::Stretch;
use serde_json::Value;

fn geosep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geosep")).args(args).output().unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    geosep(&all)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn files_with_ext(dir: &Path, ext: &str) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(ext) && !n.ends_with(".stretch.json"))
        .collect();
    v.sort();
    v
}

#[test]
fn gen_default_file_contract() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["gen"]);
    assert!(o.status.success(), "{o:?}");
    let images: Vec<String> = [files_with_ext(dir.path(), ".pgm"), files_with_ext(dir.path(), ".png")].concat();
    assert_eq!(images, ["phantom.pgm", "spectrum.pgm", "phantom.png", "spectrum.png"]);
    assert_eq!(files_with_ext(dir.path(), ".csv"), ["energy.csv"]);
    let csv = fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "j,E_P,E_C,ratio");
    assert_eq!(lines.len() - 1, 5, "default 512 grid has scales 3..7");
    for l in &lines[1..] {
        let ratio: f64 = l.split(',').nth(3).unwrap().parse().unwrap();
        assert!((0.5..=2.0).contains(&ratio), "{l}");
    }
    let img = image::open(dir.path().join("phantom.png")).unwrap();
    assert_eq!((img.width(), img.height()), (512, 512));
    let pgm = image::open(dir.path().join("phantom.pgm")).unwrap().to_luma8();
    assert_eq!(pgm, img.to_luma8());
    let s: Stretch = serde_json::from_str(&fs::read_to_string(dir.path().join("phantom.stretch.json")).unwrap()).unwrap();
    assert_eq!(s.schema_version, 1);
    assert!(s.max > s.min);
    assert_eq!(json(&dir.path().join("phantom.json"))["schema_version"], 1);
}

#[test]
fn gen_is_deterministic_with_noise() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let args = vec!["gen", "--grid", "64", "--scales", "2..4", "--noise", "0.01", "--seed", "5", "--coefficients"];
    for d in [&a, &b] {
        assert!(run_in(d.path(), &args).status.success());
    }
    let mut other = args.clone();
    let seed_at = other.iter().position(|a| *a == "5").unwrap();
    other[seed_at] = "6";
    assert!(run_in(c.path(), &other).status.success());
    for f in ["energy.csv", "wavelet_coefficients.csv", "curvelet_coefficients.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f}");
        assert!(!x.contains(&b'\r'), "{f} must use LF line endings");
    }
    assert_ne!(
        fs::read(a.path().join("wavelet_coefficients.csv")).unwrap(),
        fs::read(c.path().join("wavelet_coefficients.csv")).unwrap()
    );
    let coef = fs::read_to_string(a.path().join("curvelet_coefficients.csv")).unwrap();
    assert_eq!(
        coef.lines().next().unwrap(),
        "index,frame,j,l,k1,k2,phase,center_x,center_y,value"
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"grid": 64, "scales": "2..4", "points": "0.5,0.5", "curve": "none"}"#).unwrap();
    let out = dir.path().join("o");
    let o = geosep(&["gen", "--config", cfg.to_str().unwrap(), "--grid", "128", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let img = image::open(out.join("phantom.png")).unwrap();
    assert_eq!(img.width(), 128);
    let meta = json(&out.join("phantom.json"));
    assert_eq!(meta["config"]["grid"], 128);
    assert_eq!(meta["config"]["curve"], "none");

    fs::write(&cfg, r#"{"grid": 64, "bogus": 1}"#).unwrap();
    let o = geosep(&["gen", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_input_exit_codes() {
    assert_eq!(geosep(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(geosep(&["gen", "--grid", "lots"]).status.code(), Some(64));
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        &["gen", "--grid", "100"][..],
        &["gen", "--grid", "64", "--scales", "2..9"],
        &["gen", "--grid", "64", "--scales", "2..4", "--curve", "spiral"],
        &["gen", "--grid", "64", "--scales", "2..4", "--points", "1.5,0.2"],
        &["gen", "--grid", "64", "--scales", "2..4", "--curve", "segment", "--rho", "0.4"],
        &["gen", "--grid", "64", "--scales", "2..4", "--points", "none", "--curve", "none"],
    ] {
        let o = run_in(dir.path(), bad);
        assert_eq!(o.status.code(), Some(1), "{bad:?}");
    }
}

#[test]
fn separate_pure_point_leaves_curve_part_dark() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["separate", "--grid", "128", "--scales", "3..5", "--curve", "none"]);
    assert!(o.status.success(), "{o:?}");
    let stretch = |stem: &str| -> Stretch {
        serde_json::from_str(&fs::read_to_string(dir.path().join(format!("{stem}.stretch.json"))).unwrap()).unwrap()
    };
    let (p, c) = (stretch("point_part"), stretch("curve_part"));
    let peak = |s: &Stretch| s.min.abs().max(s.max.abs());
    assert!(peak(&c) <= 0.2 * peak(&p), "curve {} vs point {}", peak(&c), peak(&p));
}

#[test]
fn separate_metrics_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &["separate", "--grid", "64", "--scales", "2..4", "--routing", "separate", "--subbands"],
    );
    assert!(o.status.success(), "{o:?}");
    let m = json(&dir.path().join("metrics.json"));
    assert_eq!(m["schema_version"], 1);
    assert_eq!(m["degraded"], false);
    let scored: Vec<i64> = m["scales"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["closure"] == false)
        .map(|s| {
            assert!(s["ratio"].as_f64().unwrap() >= 0.0);
            s["j"].as_i64().unwrap()
        })
        .collect();
    assert_eq!(scored, [2, 3, 4]);
    assert!(m["slope"].is_number());
    for f in ["point_part.pgm", "curve_part.png", "residual.png", "w_j3.png", "c_j4.png"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert!(stdout(&o).contains("r_j="));
}

#[test]
fn separate_degraded_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["separate", "--grid", "64", "--scales", "2..4", "--max-iter", "1"]);
    assert_eq!(o.status.code(), Some(geosep::cli::EXIT_DEGRADED));
    let m = json(&dir.path().join("metrics.json"));
    assert_eq!(m["degraded"], true);
    assert!(!m["diagnostics"].as_array().unwrap().is_empty());
    assert!(m["scales"].as_array().unwrap().iter().all(|s| s["converged"] == false));
}

#[test]
fn coherence_reports_and_overlays() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["coherence", "--grid", "64", "--scales", "2..4", "--kappa-samples", "2"]);
    assert!(o.status.success(), "{o:?}");
    let c = json(&dir.path().join("coherence.json"));
    assert_eq!(c["schema_version"], 1);
    let reps = c["reports"].as_array().unwrap();
    assert_eq!(reps.len(), 3);
    for r in reps {
        assert!(r["kappa_lower"].as_f64().unwrap() <= r["kappa_upper"].as_f64().unwrap());
    }
    for j in 2..=4 {
        assert!(dir.path().join(format!("overlay_j{j}.png")).exists());
        let csv = fs::read_to_string(dir.path().join(format!("cluster_point_j{j}.csv"))).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "index,tile_scale,center_x,center_y");
        assert!(csv.lines().count() > 1);
    }
}

#[test]
fn coherence_with_empty_point_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &["coherence", "--grid", "64", "--scales", "3..3", "--points", "none", "--kappa-samples", "0"],
    );
    assert!(o.status.success(), "{o:?}");
    let csv = fs::read_to_string(dir.path().join("cluster_point_j3.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    let img = image::open(dir.path().join("overlay_j3.png")).unwrap().to_rgb8();
    assert!(img.pixels().all(|p| p.0 != [255, 0, 0]), "no point markers expected");
    let rep = &json(&dir.path().join("coherence.json"))["reports"][0];
    assert_eq!(rep["size_point_cluster"], 0);
}

#[test]
fn decay_study_single_scale() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &["decay-study", "--grid", "64", "--scales", "3..3", "--kappa-samples", "0"],
    );
    assert!(o.status.success(), "{o:?}");
    let csv = fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "j,r_j,mu_c1,mu_c2,delta1_rel,delta2_rel,bound");
    assert_eq!(lines.len(), 2);
    let s = json(&dir.path().join("decay_summary.json"));
    for (_, v) in s["slopes"].as_object().unwrap() {
        assert_eq!(v, "not available");
    }
    assert!(stdout(&o).contains("not available"));
}

#[test]
fn decay_study_multi_scale() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["decay-study", "--grid", "64", "--scales", "2..4", "--kappa-samples", "0"]);
    assert!(o.status.success(), "{o:?}");
    let s = json(&dir.path().join("decay_summary.json"));
    assert!(s["slopes"]["r_j"].is_number());
    let csv = fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    for l in csv.lines().skip(1) {
        let bound = l.rsplit(',').next().unwrap();
        assert!(bound == "inf" || bound.parse::<f64>().is_ok(), "{l}");
    }
}

#[test]
fn oracle_sweeps_and_self_test() {
    let small = ["oracle", "--instances", "30", "--noisy", "10", "--adversarial", "3", "--seed", "4"];
    let halved = ["oracle", "--instances", "30", "--noisy", "10", "--adversarial", "6", "--seed", "4", "--self-test"];
    let a = geosep(&small);
    assert!(a.status.success(), "{a:?}");
    let out = stdout(&a);
    assert!(out.contains("clean: 30 instances, 0 violations"), "{out}");
    assert!(out.contains("noisy: 10 instances, 0 violations"), "{out}");
    assert_eq!(stdout(&geosep(&small)), out);

    let dir = tempfile::tempdir().unwrap();
    let mut st = halved.to_vec();
    st.extend(["--out", dir.path().to_str().unwrap()]);
    let b = geosep(&st);
    assert!(b.status.success(), "{b:?}");
    let line = stdout(&b).lines().find(|l| l.starts_with("self-test")).unwrap().to_string();
    let n: usize = line.split(", ").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert!(n > 0, "{line}");
    assert_eq!(json(&dir.path().join("oracle.json"))["schema_version"], 1);
}
