//! File formats: CSV tables, far-field files, expansion JSON and the run manifest.
//!
//! Data files carry no timestamps, so reruns are byte-identical. Numbers are
//! written in scientific notation with 13 significant digits.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use helmscat_core::farfield::FarFieldTable;
use helmscat_core::geometry::Vec2;
use helmscat_core::grating::ModeData;
use helmscat_core::mrc::RadiatingExpansion;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const MANIFEST_SCHEMA: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Fixed-format number used in every data file.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes a CSV file with a header row, after optional `#` comment lines.
pub fn write_csv<I>(path: &Path, comments: &[String], header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut file = File::create(path).map_err(io_err(path))?;
    for c in comments {
        writeln!(file, "# {c}").map_err(io_err(path))?;
    }
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Far-field file: a `#` header with `k` and the grid sizes, then rows
/// `beta, theta, re, im` ordered by incident angle, then observation angle.
pub fn write_far_field(path: &Path, table: &FarFieldTable) -> Result<()> {
    let comments = vec![
        "helmscat far-field file".to_string(),
        format!("k = {}", num(table.k)),
        format!("n_in = {}", table.incident.len()),
        format!("n_out = {}", table.observation.len()),
        "convention = A(theta, beta) for incident angle beta and observation angle theta, radians".to_string(),
    ];
    let rows = table.incident.iter().enumerate().flat_map(|(i, &b)| {
        table.observation.iter().enumerate().map(move |(j, &t)| {
            let a = table.get(i, j);
            vec![num(b), num(t), num(a.re), num(a.im)]
        })
    });
    write_csv(path, &comments, &["beta", "theta", "re", "im"], rows)
}

pub fn read_far_field(path: &Path) -> Result<FarFieldTable> {
    let bad = |message: String| CliError::FarFieldFormat {
        path: path.to_path_buf(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut header = BTreeMap::new();
    for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
        if let Some((key, value)) = line.split_once('=') {
            header.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    let get = |key: &str| header.get(key).ok_or_else(|| bad(format!("missing `# {key} = ...` header line")));
    let k: f64 = get("k")?.parse().map_err(|_| bad("header `k` is not a number".into()))?;
    let n_in: usize = get("n_in")?.parse().map_err(|_| bad("header `n_in` is not an integer".into()))?;
    let n_out: usize = get("n_out")?.parse().map_err(|_| bad("header `n_out` is not an integer".into()))?;

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns = reader.headers().map_err(csv_err(path))?.clone();
    if columns.iter().collect::<Vec<_>>() != ["beta", "theta", "re", "im"] {
        return Err(bad(format!("columns must be beta,theta,re,im, got {}", columns.iter().collect::<Vec<_>>().join(","))));
    }
    let mut incident = Vec::with_capacity(n_in);
    let mut observation = Vec::with_capacity(n_out);
    let mut values = Vec::with_capacity(n_in * n_out);
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let parse = |c: usize| -> Result<f64> {
            record
                .get(c)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad(format!("data row {}: column {} is not a number", row + 1, c + 1)))
        };
        let (beta, theta) = (parse(0)?, parse(1)?);
        for a in [beta, theta] {
            if !(0.0..std::f64::consts::TAU).contains(&a) {
                return Err(bad(format!("data row {}: angle {a} is outside [0, 2pi)", row + 1)));
            }
        }
        let (i, j) = (row / n_out.max(1), row % n_out.max(1));
        if j == 0 {
            incident.push(beta);
        } else if beta != incident[i] {
            return Err(bad(format!("data row {}: incident angle changes within a block", row + 1)));
        }
        if i == 0 {
            observation.push(theta);
        } else if observation.get(j) != Some(&theta) {
            return Err(bad(format!("data row {}: observation angles differ between blocks", row + 1)));
        }
        values.push(Complex64::new(parse(2)?, parse(3)?));
    }
    if values.len() != n_in * n_out {
        return Err(bad(format!("expected {} = {n_in} x {n_out} rows, found {}", n_in * n_out, values.len())));
    }
    FarFieldTable::new(k, incident, observation, values).map_err(|e| bad(e.to_string()))
}

fn interleaved(c: &[Complex64]) -> Vec<f64> {
    c.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn points(p: &[Vec2]) -> Vec<[f64; 2]> {
    p.iter().map(|v| [v.x, v.y]).collect()
}

/// `{k, order, poles, coefficients}` with coefficients as interleaved re/im,
/// pole-major and `l = -L..=L` within a pole.
pub fn expansion_json(e: &RadiatingExpansion) -> Value {
    json!({
        "k": e.k,
        "order": e.order,
        "poles": points(&e.poles),
        "coefficients": interleaved(&e.coefficients),
    })
}

pub fn mode_table_json(modes: &[ModeData]) -> Value {
    Value::Array(
        modes
            .iter()
            .map(|m| {
                json!({
                    "j": m.j,
                    "lambda": m.lambda,
                    "mu": [m.mu.re, m.mu.im],
                    "propagating": m.propagating,
                })
            })
            .collect(),
    )
}

pub fn grating_json(poles: &[Vec2], coefficients: &[Complex64], r_min: f64, modes: &[ModeData]) -> Value {
    json!({
        "poles": points(poles),
        "coefficients": interleaved(coefficients),
        "r_min": r_min,
        "modes": mode_table_json(modes),
    })
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

/// Run summary written next to the data files. Only this file carries
/// timing information.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema: u32,
    pub tool_version: String,
    pub name: String,
    pub kind: String,
    pub inputs: Inputs,
    /// The config with every default filled in.
    pub knobs: Value,
    pub residuals: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    pub wall_time_seconds: f64,
    pub unix_timestamp: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Inputs {
    pub config: String,
    pub data_files: Vec<PathBuf>,
}
