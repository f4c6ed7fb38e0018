use std::path::Path;
use std::process::Command;

/// Runs python/smoke_test.py against the installed `geosep_py` module.
/// Skipped when no interpreter can import it (build it with maturin first).
#[test]
fn python_smoke_test() {
    let importable = Command::new("python3")
        .args(["-c", "import geosep_py"])
        .status()
        .map(|s| s.success())
        .unwrap_or(false);
    if !importable {
        eprintln!("skipping: geosep_py is not importable");
        return;
    }
    let script = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../python/smoke_test.py");
    let out = Command::new("python3").arg(&script).output().unwrap();
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("smoke test OK"));
}
