use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SMALL: &str = r#"
seed = 5
[[specs]]
n = 1
q0 = 1
p0 = 1
case = 1
[invariance]
grid = 16
elements = 100
norm_grid = 64
[vanishing]
grid = 48
checkpoints = [32, 64, 128]
threshold = 0.2
reproduction_samples = 8
[actuality]
grid = 96
[regions]
orbit_points = 200
[induced]
lattice = 13
modes = 8
mc_samples = 20000
composition_tolerance = 0.2
norm_tolerance = 0.05
"#;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("campaign.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_uhbms"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn report(dir: &Path) -> Value {
    serde_json::from_slice(&fs::read(dir.join("out/report.json")).unwrap()).unwrap()
}

#[test]
fn invariance_passes_and_records_the_seed() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), SMALL, &["verify-invariance"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(tmp.path());
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["seed"], 5);
    assert_eq!(r["command"], "verify-invariance");
    let checks = r["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["pass"] == true && c["provenance"].as_str().is_some_and(|p| !p.is_empty())));
    assert!(tmp.path().join("out/tables/verify-invariance.csv").exists());
}

#[test]
fn empty_spec_list_passes_with_a_warning() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), "specs = []\n", &["verify-invariance"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(tmp.path());
    assert_eq!(r["checks"].as_array().unwrap().len(), 0);
    assert_eq!(r["warnings"].as_array().unwrap().len(), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn even_q0_is_rejected_with_a_parity_diagnostic() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), "[[specs]]\nn = 1\nq0 = 2\np0 = 3\ncase = 1\n", &["verify-invariance"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parity"));
}

#[test]
fn missing_config_is_an_io_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_uhbms")).args(["regions", "--config", "/nonexistent/c.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_threshold_exits_with_one() {
    let tmp = TempDir::new().unwrap();
    let cfg = SMALL.replace("threshold = 0.2", "threshold = 1e-9");
    let out = run(tmp.path(), &cfg, &["vanishing"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(tmp.path())["pass"], false);
}

#[test]
fn vanishing_writes_the_ratio_table() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), SMALL, &["vanishing"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let table = fs::read_to_string(tmp.path().join("out/tables/vanishing_ratios.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 4 * 3);
}

#[test]
fn actuality_recovers_the_diagonal() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), SMALL, &["actuality"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(tmp.path());
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["family-match", "components", "identity-recovered"]);
}

#[test]
fn regions_render_well_formed_svg() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), SMALL, &["regions"]);
    assert_eq!(out.status.code(), Some(0));
    for case in 1..=4 {
        let svg = fs::read_to_string(tmp.path().join(format!("out/regions/F{case}_q1_p1.svg"))).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
    let r = report(tmp.path());
    let area = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "area/case1").unwrap().clone();
    assert_eq!(area["measured"], 4.0);
}

#[test]
fn induced_checks_pass_on_a_small_lattice() {
    let tmp = TempDir::new().unwrap();
    let out = run(tmp.path(), SMALL, &["induced"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn reports_are_deterministic_and_json_flag_prints_the_report() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let oa = run(a.path(), SMALL, &["verify-invariance", "--json"]);
    run(b.path(), SMALL, &["verify-invariance", "--json"]);
    let printed: Value = serde_json::from_slice(&oa.stdout).unwrap();
    let (mut ra, mut rb) = (report(a.path()), report(b.path()));
    assert_eq!(printed, ra);
    // The output directory is echoed in the config.
    ra["config"]["out"] = Value::Null;
    rb["config"]["out"] = Value::Null;
    assert_eq!(ra, rb);
}

#[test]
fn seed_and_grid_flags_override_the_config() {
    let tmp = TempDir::new().unwrap();
    run(tmp.path(), SMALL, &["actuality", "--seed", "9", "--grid", "64"]);
    let r = report(tmp.path());
    assert_eq!(r["seed"], 9);
    assert_eq!(r["config"]["actuality"]["grid"], 64);
}
