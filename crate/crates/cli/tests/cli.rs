use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cifc_core::channel::{canonical_channel, ChannelKind};
use cifc_core::polytope::Polytope2D;
use cifc_core::probability::JointDistribution;
use cifc_core::region::{builtin_schema, SchemaId};
use cifc_core::verification::{parse_frontier_csv, SuiteReport};
use tempfile::TempDir;

fn cifc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cifc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixtures {
    dir: TempDir,
    channel: PathBuf,
    square: PathBuf,
}

fn fixtures() -> Fixtures {
    let dir = TempDir::new().unwrap();
    let channel = dir.path().join("orthogonal.json");
    let c = canonical_channel(ChannelKind::OrthogonalNoiseless).unwrap();
    std::fs::write(&channel, c.to_json().unwrap()).unwrap();

    let rvs = builtin_schema(SchemaId::Rtd).unwrap().input_rvs();
    let names = rvs.names().to_vec();
    let at = |d: &[usize], n: &str| d[names.iter().position(|x| x == n).unwrap()];
    let d = JointDistribution::from_fn(rvs, |d| {
        let constant = ["U2c", "U1c", "U2pb"].iter().all(|n| at(d, n) == 0);
        if constant && at(d, "U1pb") == at(d, "X1") {
            0.25
        } else {
            0.0
        }
    })
    .unwrap();
    let square = dir.path().join("square.json");
    std::fs::write(&square, d.to_json().unwrap()).unwrap();
    Fixtures {
        dir,
        channel,
        square,
    }
}

#[test]
fn project_noiseless_square_reaches_corner() {
    let f = fixtures();
    let out = f.dir.path().join("region.json");
    let o = cifc(&[
        "project",
        "--schema",
        "RTD",
        "--channel",
        path_str(&f.channel),
        "--dist",
        path_str(&f.square),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let p = Polytope2D::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(p
        .vertices
        .iter()
        .any(|v| (v[0] - 1.0).abs() < 1e-9 && (v[1] - 1.0).abs() < 1e-9));

    let csv = f.dir.path().join("region.csv");
    let o = cifc(&[
        "project",
        "--schema",
        "RTD",
        "--channel",
        path_str(&f.channel),
        "--dist",
        path_str(&f.square),
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("R1,R2\n"));
    assert!(text.lines().any(|l| l == "1,1"), "{text}");
}

#[test]
fn validate_reports_exit_codes() {
    let f = fixtures();
    let o = cifc(&["validate", "--channel", path_str(&f.channel)]);
    assert_eq!(o.status.code(), Some(0));

    let bad = f.dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"x1":2,"x2":2,"y1":2,"y2":2,"p":[0.5,0.5]}"#).unwrap();
    let o = cifc(&["validate", "--channel", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));

    let missing = f.dir.path().join("missing.json");
    let o = cifc(&["validate", "--channel", path_str(&missing)]);
    assert_eq!(o.status.code(), Some(2));

    let o = cifc(&["verify", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn project_rejects_mismatched_distribution() {
    let f = fixtures();
    let maric = builtin_schema(SchemaId::Maric).unwrap();
    let d = JointDistribution::degenerate(maric.input_rvs());
    let path = f.dir.path().join("maric.json");
    std::fs::write(&path, d.to_json().unwrap()).unwrap();
    let o = cifc(&[
        "project",
        "--schema",
        "RTD",
        "--channel",
        path_str(&f.channel),
        "--dist",
        path_str(&path),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("maric.json"));
}

#[test]
fn verify_is_byte_identical_and_parseable() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = cifc(&[
            "verify",
            "--suite",
            "maric",
            "--samples",
            "40",
            "--seed",
            "3",
            "--out",
            path_str(p),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let reports: Vec<SuiteReport> = serde_json::from_slice(&ta).unwrap();
    assert_eq!(reports.len(), 1);
    assert!(reports[0].passed());
    assert!(reports[0].checks.iter().all(|c| c.seeds_run == 40));
}

#[test]
fn verify_exits_one_on_violation() {
    let o = cifc(&[
        "verify",
        "--suite",
        "devroye",
        "--samples",
        "50",
        "--region-samples",
        "2",
        "--tol-mi",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let reports: Vec<SuiteReport> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!reports[0].passed());
    assert!(String::from_utf8_lossy(&o.stderr).contains("devroye"));

    let o = cifc(&["verify", "--suite", "maric", "--tol-mi", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn frontier_is_reproducible_and_parseable() {
    let f = fixtures();
    let run = |name: &str| {
        let out = f.dir.path().join(name);
        let o = cifc(&[
            "frontier",
            "--schema",
            "MARIC",
            "--channel",
            path_str(&f.channel),
            "--budget",
            "40",
            "--grid",
            "5",
            "--seed",
            "9",
            "--out",
            path_str(&out),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let pts = parse_frontier_csv(&a).unwrap();
    assert!(!pts.is_empty());
}

#[test]
fn manifest_lists_unified_labels() {
    let o = cifc(&["manifest"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let text = v.to_string();
    for label in ["1a", "1k", "e29", "Jiang 11", "37p"] {
        assert!(text.contains(&format!("\"{label}\"")), "{label}");
    }
}
