use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn nevlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nevlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) {
    let o = nevlab(args, out);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn code(args: &[&str]) -> i32 {
    let dir = tempfile::tempdir().unwrap();
    nevlab(args, dir.path()).status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_exponential() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["analyze", "--function", "exp(z)", "--rmax", "100"], dir.path());
    let g = json(&dir.path().join("growth.json"));
    let order = g["summary"]["order"].as_f64().unwrap();
    assert!((order - 1.0).abs() < 0.05, "{order}");
    let profile = json(&dir.path().join("profile.json"));
    let rows = profile.as_array().unwrap();
    assert!(!rows.is_empty() && rows.iter().all(|r| r["T"].is_f64()));
}

#[test]
fn analyze_fatou_min_modulus_ratio() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["analyze", "--corpus", "fatou"], dir.path());
    let g = json(&dir.path().join("growth.json"));
    // L(r) <= |f(r)| = r + 1 + e^-r on the positive axis
    let lr = g["l_over_r_last"].as_f64().unwrap();
    assert!(lr > 0.9 && lr < 1.0 + 2.0 / 900.0, "{lr}");
}

#[test]
fn check_canprod_main_holds() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["check", "--corpus", "canprod4", "--alpha", "0.3", "--d", "2", "--D", "1.5"], dir.path());
    let c = json(&dir.path().join("criteria.json"));
    assert_eq!(c["main"]["holds_on_grid"], Value::Bool(true));
    assert_eq!(c["boundedness"]["main"], Value::Bool(true));
    assert_eq!(c["order_deficiency"]["holds_on_grid"], Value::Bool(true));
}

#[test]
fn check_fatou_fails() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["check", "--corpus", "fatou", "--rmin", "10", "--rmax", "100"], dir.path());
    let c = json(&dir.path().join("criteria.json"));
    assert_eq!(c["main"]["holds_on_grid"], Value::Bool(false));
    assert!(c["main"]["first_failure"].is_object());
    // entire, but of order 1
    assert_eq!(c["entire"]["hypothesis"]["holds_on_grid"], Value::Bool(false));
    assert_eq!(c["boundedness"]["entire_growth"], Value::Bool(false));
}

#[test]
fn render_fatou_escapes() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["render", "--corpus", "fatou", "--window", "5,3", "--res", "256"], dir.path());
    let c = json(&dir.path().join("components.json"));
    assert_eq!(c["counts"]["escaping"].as_u64(), Some(256 * 256));
    let ppm = std::fs::read(dir.path().join("render.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n256 256\n255\n"));
    assert_eq!(ppm.len(), b"P6\n256 256\n255\n".len() + 3 * 256 * 256);
}

#[test]
fn render_probe() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["render", "--corpus", "zsq", "--res", "64", "--probe", "0,0", "--scales", "4,8"], dir.path());
    let p = json(&dir.path().join("probe.json"));
    assert_eq!(p["verdict"], "bounded-empirical");
}

#[test]
fn trace_exponential() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["trace", "--function", "exp(z)", "--r0", "1"], dir.path());
    let t = json(&dir.path().join("trace.json"));
    let radii: Vec<f64> = t["radii"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(radii.len(), 2);
    assert_eq!(radii[0], 1.0);
    // exp(24 T(3)) with T(3) = 3/pi
    assert!((radii[1] / (72.0 / std::f64::consts::PI).exp() - 1.0).abs() < 1e-6);
    assert_eq!(t["stopped"], "overflow");
}

#[test]
fn trace_constants_only() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["trace", "--alpha", "0.5", "--d", "2", "--D", "4", "--K", "24"], dir.path());
    let t = json(&dir.path().join("trace.json"));
    assert_eq!(t["derived"]["k"], 2);
    assert_eq!(t["derived"]["h"], 4.0);
    assert_eq!(t["derived"]["m"], 6);
    assert_eq!(t["derived"]["H"], 4096.0);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["analyze", "--function", "z +"]), 2);
    assert_eq!(code(&["analyze", "--corpus", "nosuch"]), 2);
    assert_eq!(code(&["analyze"]), 2);
    assert_eq!(code(&["analyze", "--function", "z", "--corpus", "zsq"]), 2);
    assert_eq!(code(&["analyze", "--corpus", "expz", "--rmin", "1", "--rmax", "3"]), 2);
    assert_eq!(code(&["analyze", "--corpus", "expz", "--rmin", "-1"]), 2);
    assert_eq!(code(&["render", "--corpus", "zsq", "--res", "100000"]), 2);
    assert_eq!(code(&["render", "--corpus", "zsq", "--window", "0,0"]), 2);
    assert_eq!(code(&["trace", "--d", "2", "--D", "2"]), 2);
    assert_eq!(code(&["check", "--corpus", "expz", "--alpha", "1.5"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    // the seed pixel never settles on the unit circle within 5 steps
    assert_eq!(
        code(&["render", "--corpus", "zsq", "--res", "16", "--budget", "5", "--probe", "1,0", "--scales", "0.01"]),
        3
    );
}

#[test]
fn usage_error_message() {
    let dir = tempfile::tempdir().unwrap();
    let o = nevlab(&["trace", "--d", "2", "--D", "2"], dir.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains("requires D > d"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"corpus": "zsq", "res": 32, "window": "0,2", "budget": 100}"#).unwrap();
    let out = dir.path().join("a");
    ok(&["render", "--config", cfg.to_str().unwrap(), "--res", "16"], &out);
    let c = json(&out.join("components.json"));
    assert_eq!(c["resolution"], 16);
    assert_eq!(c["budget"], 100);
    assert_eq!(c["function"], "zsq");

    let out = dir.path().join("b");
    ok(&["render", "--config", cfg.to_str().unwrap(), "--function", "z^3"], &out);
    let c = json(&out.join("components.json"));
    assert_eq!(c["function"], "z^3");
    assert_eq!(c["resolution"], 32);

    std::fs::write(&cfg, r#"{"corpus": "zsq", "resolution": 32}"#).unwrap();
    assert_eq!(code(&["render", "--config", cfg.to_str().unwrap()]), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&[&str], &[&str]); 4] = [
        (&["analyze", "--corpus", "tanz", "--rmax", "100"], &["profile.json", "growth.json"]),
        (&["check", "--corpus", "expz", "--rmin", "10", "--rmax", "40"], &["criteria.json"]),
        (
            &["render", "--corpus", "fatou", "--window", "0,0,4", "--res", "64", "--probe", "5,0"],
            &["render.ppm", "components.json", "probe.json"],
        ),
        (&["trace", "--corpus", "zsq", "--r0", "2", "--curve", "2,0;3,1"], &["trace.json"]),
    ];
    for (args, files) in runs {
        ok(args, dir.path());
        let first: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(dir.path().join(f)).unwrap()).collect();
        ok(args, dir.path());
        for (f, bytes) in files.iter().zip(first) {
            assert_eq!(std::fs::read(dir.path().join(f)).unwrap(), bytes, "{args:?} {f}");
        }
    }
}
