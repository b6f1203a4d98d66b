//! Calls the extension module through an embedded interpreter.

use std::ffi::CString;

use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn run(code: &str, setup: impl FnOnce(&Bound<'_, PyDict>)) {
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals.set_item("hs", wrap_pymodule!(helmscat::helmscat)(py)).unwrap();
        setup(&globals);
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn biem_matches_circle_series() {
    run(
        r#"
obs = [0.0, 1.0, 2.0, 4.0]
a = hs.circle_far_field((0.0, 0.0), 1.0, 2.0, 0.5, obs)
b = hs.biem_far_field("unit-circle", 2.0, 0.5, obs)
assert all(isinstance(z, complex) for z in a)
assert max(abs(x - y) for x, y in zip(a, b)) < 1e-8
"#,
        |_| {},
    );
}

#[test]
fn mrc_solve_reports_residual_and_expansion() {
    run(
        r#"
m = hs.mrc_solve("experiment-ellipse", 1.0, 0.0, [0.0, 3.0], pole_count=8)
assert m["r_min"] < 1e-2, m["r_min"]
assert len(m["poles"]) == 8
assert len(m["coefficients"]) == 8 * 11
assert len(m["far_field"]) == 2
"#,
        |_| {},
    );
}

#[test]
fn errors_surface_as_value_error() {
    run(
        r#"
for call in (lambda: hs.grating_residual("zigzag", 3.14, 1.0, 0.5),
             lambda: hs.circle_far_field((0.0, 0.0), -1.0, 1.0, 0.0, [0.0]),
             lambda: hs.run_config("no-such-config", "unused")):
    try:
        call()
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
"#,
        |_| {},
    );
}

#[test]
fn run_config_writes_outputs_and_returns_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t4");
    run(
        r#"
import json, os
m = json.loads(hs.run_config("table4", out))
assert m["kind"] == "inverse-sfm"
for f in m["outputs"]:
    assert os.path.isfile(os.path.join(out, f)), f
"#,
        |g| g.set_item("out", out.to_str().unwrap()).unwrap(),
    );
}
