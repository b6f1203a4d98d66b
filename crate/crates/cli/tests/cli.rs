//! End-to-end runs of bundled and ad hoc configs through the library and the binary.

use std::fs;
use std::path::Path;
use std::process::Command;

use helmscat_cli::config::ExperimentConfig;
use helmscat_cli::io::{read_far_field, write_far_field};
use helmscat_cli::{execute, load, LoadedConfig};
use helmscat_core::farfield::FarFieldTable;
use helmscat_core::geometry::Vec2;
use helmscat_core::oracles::CircleScatterer;
use tempfile::tempdir;

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

fn run_bundled(name: &str, out: &Path) -> helmscat_cli::io::Manifest {
    execute(&load(name).unwrap(), out).unwrap()
}

fn run_text(text: &str, dir: &Path, out: &Path) -> helmscat_cli::Result<helmscat_cli::io::Manifest> {
    let loaded = LoadedConfig {
        config: ExperimentConfig::parse(text, "inline")?,
        origin: "inline".into(),
        base_dir: dir.to_path_buf(),
    };
    execute(&loaded, out)
}

#[test]
fn table1_has_sixteen_rows_and_small_first_residual() {
    let dir = tempdir().unwrap();
    let m = run_bundled("table1", dir.path());
    let table = rows(&dir.path().join("residuals.csv"));
    assert_eq!(table.len(), 16);
    assert_eq!(table[0][0], "I");
    assert!(f(&table[0][4]) <= 6e-4, "{}", table[0][4]);
    assert_eq!(m.schema, 1);
    assert!(dir.path().join("manifest.json").is_file());
}

#[test]
fn table2_has_twelve_rows_and_small_first_residual() {
    let dir = tempdir().unwrap();
    run_bundled("table2", dir.path());
    let table = rows(&dir.path().join("residuals.csv"));
    assert_eq!(table.len(), 12);
    assert_eq!(table[0][0], "I");
    assert!((f(&table[0][1]) - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    assert!(f(&table[0][2]) <= 1.3e-3, "{}", table[0][2]);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("grating_I_0.json")).unwrap()).unwrap();
    assert_eq!(json["modes"].as_array().unwrap().len(), 241);
}

#[test]
fn table5_compares_twenty_boundary_points() {
    let dir = tempdir().unwrap();
    let m = run_bundled("table5", dir.path());
    let table = rows(&dir.path().join("near_field.csv"));
    assert_eq!(table.len(), 20);
    // Exact trace -e^{ik x.alpha} at theta = 0, fitted value far off.
    assert!((f(&table[0][1]) + 1f64.cos()).abs() < 1e-12);
    assert!((f(&table[0][2]) + 1f64.sin()).abs() < 1e-12);
    assert!(f(&table[0][3]).abs() > 100.0);
    assert!(m.residuals["r_min"].as_f64().unwrap() <= 2e-4);
    assert!(m.residuals["max_boundary_discrepancy"].as_f64().unwrap() >= 100.0);
}

#[test]
fn reruns_are_byte_identical() {
    for name in ["table3", "table4", "fig4"] {
        let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
        let m = run_bundled(name, a.path());
        run_bundled(name, b.path());
        for file in &m.outputs {
            let (x, y) = (fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap());
            assert!(x == y, "{name}/{file} differs between runs");
        }
    }
}

#[test]
fn far_field_file_round_trips() {
    let dir = tempdir().unwrap();
    let series = CircleScatterer::dirichlet(Vec2::new(1.0, -2.0), 0.7).unwrap().series(2.0).unwrap();
    let table = FarFieldTable::from_source(&series, 6, 10).unwrap();
    let path = dir.path().join("ff.csv");
    write_far_field(&path, &table).unwrap();
    let back = read_far_field(&path).unwrap();
    assert_eq!(back.incident.len(), 6);
    assert_eq!(back.observation.len(), 10);
    assert_eq!(back.k, 2.0);
    for (x, y) in back.values.iter().zip(&table.values) {
        assert!((x - y).norm() <= 1e-12 * y.norm().max(1e-3));
    }
    for (x, y) in back.incident.iter().zip(&table.incident) {
        assert!((x - y).abs() <= 1e-12);
    }
}

#[test]
fn malformed_far_field_files_are_rejected() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    let header = "# k = 1.0\n# n_in = 2\n# n_out = 2\nbeta,theta,re,im\n";
    fs::write(&path, format!("{header}0,0,1,0\n0,3.14,1,0\n3.14,0,1,0\n")).unwrap();
    assert!(read_far_field(&path).unwrap_err().to_string().contains("expected 4"));
    fs::write(&path, format!("{header}0,0,1,0\n0,7.0,1,0\n3.14,0,1,0\n3.14,7.0,1,0\n")).unwrap();
    assert!(read_far_field(&path).unwrap_err().to_string().contains("outside"));
    fs::write(&path, "# k = 1.0\n# n_in = 1\n# n_out = 1\nb,t,re,im\n0,0,1,0\n").unwrap();
    assert!(read_far_field(&path).unwrap_err().to_string().contains("columns"));
}

#[test]
fn analytic_and_biem_engines_agree_on_a_circle() {
    let dir = tempdir().unwrap();
    let text = r#"
kind = "synthesize-far-field"
name = "circle"
[far_field]
shape = { type = "circle", center = [6.0, 2.0], radius = 1.0 }
k = 1.0
incident = 12
observation = 24
engine = "analytic"
"#;
    let m = run_text(text, dir.path(), dir.path()).unwrap();
    assert!(m.residuals["cross_validation_max_relative_difference"].as_f64().unwrap() <= 1e-6);
    let t = read_far_field(&dir.path().join("far_field.csv")).unwrap();
    assert_eq!(t.values.len(), 12 * 24);
}

#[test]
fn synthesized_file_drives_support_and_sampling_pipelines() {
    let dir = tempdir().unwrap();
    let data = dir.path().join("data");
    let synth = r#"
kind = "synthesize-far-field"
name = "circle"
[far_field]
shape = { type = "circle", center = [6.0, 2.0], radius = 1.0 }
k = 5.0
incident = 120
observation = 120
engine = "analytic"
"#;
    run_text(synth, dir.path(), &data).unwrap();

    let sfm = r#"
kind = "inverse-sfm"
name = "from-file"
[method]
type = "dirichlet"
directions = 16
[method.source]
type = "file"
path = "data/far_field.csv"
[method.localize]
center = [6.0, 2.0]
side = 4.0
points = 41
"#;
    let out = dir.path().join("sfm");
    let m = run_text(sfm, dir.path(), &out).unwrap();
    assert_eq!(m.inputs.data_files.len(), 1);
    let support = rows(&out.join("support.csv"));
    assert_eq!(support.len(), 16);
    for row in &support {
        let l = Vec2::polar(f(&row[0]));
        let exact = Vec2::new(6.0, 2.0).dot(l) - 1.0;
        assert!((f(&row[1]) - exact).abs() < 0.1, "t = {}: {} vs {exact}", row[0], row[1]);
    }
    let mask = rows(&out.join("localization.csv"));
    let center = mask.iter().find(|r| f(&r[0]) == 6.0 && f(&r[1]) == 2.0).unwrap();
    assert_eq!(center[2], "1");

    let square = synth.replace("k = 5.0", "k = 1.0").replace("120", "64").replace("[6.0, 2.0]", "[10.0, 15.0]");
    run_text(&square, dir.path(), &data).unwrap();
    let lsm = r#"
kind = "inverse-lsm"
name = "from-file"
[source]
type = "file"
path = "data/far_field.csv"
[grid]
center = [10.0, 15.0]
side = 6.0
points = 31
"#;
    let m = run_text(lsm, dir.path(), &dir.path().join("lsm")).unwrap();
    let argmin: Vec<f64> = serde_json::from_value(m.residuals["argmin_ck"].clone()).unwrap();
    assert!(Vec2::new(argmin[0], argmin[1]).distance(Vec2::new(10.0, 15.0)) <= 1.5);
    assert_eq!(rows(&dir.path().join("lsm/scan.csv")).len(), 31 * 31);
}

#[test]
fn kite_far_field_from_mrc_feeds_support_recovery() {
    let dir = tempdir().unwrap();
    let m = run_bundled("fig3", dir.path());
    assert_eq!(rows(&dir.path().join("support.csv")).len(), 40);
    let far = m.residuals["max_boundary_distance_away_from_bitangents"].as_f64().unwrap();
    assert!(far < 0.35, "{far}");
}

#[test]
fn poles_outside_the_boundary_are_rejected() {
    let text = r#"
kind = "direct-mrc"
name = "outside"
[[experiment]]
label = "X"
shape = { type = "preset", name = "unit-circle" }
poles = { points = [[0.0, 0.0], [3.0, 0.0]] }
wavenumbers = [1.0]
incident = [0.0]
"#;
    let err = ExperimentConfig::parse(text, "inline").unwrap_err().to_string();
    assert!(err.contains("experiment[0].poles.points[1]") && err.contains("not inside"), "{err}");
}

#[test]
fn solver_failures_carry_context() {
    let dir = tempdir().unwrap();
    // Period 2pi at normal incidence puts mode j = -1 exactly on lambda^2 = k^2.
    let text = r#"
kind = "grating-mrc"
name = "degenerate"
k = 1.0
thetas = [1.5707963267948966]
[[profile]]
label = "flat"
profile = "flat"
period = 6.283185307179586
"#;
    let err = run_text(text, dir.path(), dir.path()).unwrap_err().to_string();
    assert!(err.contains("profile flat") && err.contains("degenerate"), "{err}");
}

fn helmscat(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_helmscat")).args(args).current_dir(cwd).output().unwrap()
}

#[test]
fn binary_lists_bundled_configs() {
    let dir = tempdir().unwrap();
    let out = helmscat(&["--list-bundled"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["table1", "table2", "table3", "table4", "table5", "fig2", "fig3", "fig4", "fig5"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from\n{text}");
    }
}

#[test]
fn binary_runs_a_config_and_reports_errors() {
    let dir = tempdir().unwrap();
    let out = helmscat(&["inverse-sfm", "--config", "table3", "--out", "t3"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows(&dir.path().join("t3/amplitude_ratio.csv")).len(), 26);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t3/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema"], 1);
    assert!(manifest["unix_timestamp"].as_u64().unwrap() > 0);

    let out = helmscat(&["direct-mrc", "--config", "table3"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("inverse-sfm"));

    fs::write(dir.path().join("bad.cfg"), "kind = \"illposed-demo\"\nname = \"bad\"\nk = 1.0\nradius = 0.0\npole = [0.8, 0.0]\nsamples = 120\nrows = 20\n").unwrap();
    let out = helmscat(&["illposed-demo", "--config", "bad.cfg"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`radius`"));
}
