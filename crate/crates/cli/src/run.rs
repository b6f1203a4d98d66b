//! Experiment runners. Each writes its data files into the output directory
//! and returns the entries of the run manifest.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use helmscat_core::biem::BiemSolver;
use helmscat_core::farfield::{AmplitudeSource, FarFieldTable};
use helmscat_core::geometry::{support_function_exact, support_function_sampled, uniform_angles, Boundary, GratingProfile, Vec2};
use helmscat_core::grating::{solve_grating, GratingProblem};
use helmscat_core::lsm::{scan, FarFieldMatrix};
use helmscat_core::mrc::{fit_far_field, MrcSolver};
use helmscat_core::oracles::{exact_boundary_scattered_field, BoundaryCondition, CircleScatterer};
use helmscat_core::sfm::{
    approx_amplitude, away_from, bitangent_directions, localize_halfplanes, reconstruct_boundary, recover_support_curve_from_table,
    recover_support_robin, robin_pair_grid, AmplitudePairSet,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{
    ConditionSpec, DirectBiemConfig, DirectMrcConfig, Engine, ExperimentConfig, GratingMrcConfig, IllposedDemoConfig, InverseLsmConfig,
    InverseSfmConfig, LoadedConfig, SfmDirichlet, SfmMethod, SfmRatio, SfmRobin, SourceSpec, SynthesisSpec,
};
use crate::error::{CliError, Result, SolverContext};
use crate::io::{
    expansion_json, grating_json, num, read_far_field, write_csv, write_far_field, write_json, Inputs, Manifest, MANIFEST_FILE,
    MANIFEST_SCHEMA,
};

/// Agreement required between the analytic and boundary-integral engines on circles.
pub const CROSS_VALIDATION_TOLERANCE: f64 = 1e-6;

/// Directions in the dense sweep that locates bitangent lines.
const BITANGENT_SWEEP: usize = 720;
const BITANGENT_BOUNDARY_SAMPLES: usize = 4096;
/// Boundary samples for support values of shapes without a closed form.
const SUPPORT_SAMPLES: usize = 20_000;

struct Report<'a> {
    out_dir: &'a Path,
    base_dir: &'a Path,
    outputs: Vec<String>,
    data_files: Vec<PathBuf>,
    residuals: BTreeMap<String, Value>,
}

impl<'a> Report<'a> {
    fn file(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.out_dir.join(name)
    }

    fn residual(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.residuals.insert(key.into(), value.into());
    }
}

/// Runs one experiment, writing data files and `manifest.json` into `out_dir`.
pub fn execute(loaded: &LoadedConfig, out_dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let start = Instant::now();
    let mut r = Report {
        out_dir,
        base_dir: &loaded.base_dir,
        outputs: Vec::new(),
        data_files: Vec::new(),
        residuals: BTreeMap::new(),
    };
    match &loaded.config {
        ExperimentConfig::DirectMrc(c) => direct_mrc(c, &mut r)?,
        ExperimentConfig::DirectBiem(c) => direct_biem(c, &mut r)?,
        ExperimentConfig::GratingMrc(c) => grating_mrc(c, &mut r)?,
        ExperimentConfig::InverseSfm(c) => inverse_sfm(c, &mut r)?,
        ExperimentConfig::InverseLsm(c) => inverse_lsm(c, &mut r)?,
        ExperimentConfig::IllposedDemo(c) => illposed_demo(c, &mut r)?,
        ExperimentConfig::SynthesizeFarField(c) => {
            let table = synthesize(&c.far_field)?;
            write_far_field(&r.file("far_field.csv"), &table)?;
            cross_validate(&c.far_field, &table, &mut r)?;
        }
    }
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        name: loaded.config.name().to_string(),
        kind: loaded.config.kind().name().to_string(),
        inputs: Inputs {
            config: loaded.origin.clone(),
            data_files: r.data_files,
        },
        knobs: serde_json::to_value(&loaded.config)?,
        residuals: r.residuals,
        outputs: r.outputs,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        unix_timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    write_json(&out_dir.join(MANIFEST_FILE), &serde_json::to_value(&manifest)?)?;
    Ok(manifest)
}

struct MrcRow {
    label: String,
    shape: &'static str,
    k: f64,
    alpha: f64,
    r_min: f64,
    rank: usize,
    converged: bool,
    seconds: f64,
    expansion: Value,
}

fn direct_mrc(c: &DirectMrcConfig, r: &mut Report) -> Result<()> {
    let jobs: Vec<(usize, f64)> = c
        .experiments
        .iter()
        .enumerate()
        .flat_map(|(i, e)| e.wavenumbers.iter().map(move |&k| (i, k)))
        .collect();
    let s = c.solver;
    let rows: Vec<Vec<MrcRow>> = jobs
        .par_iter()
        .map(|&(i, k)| {
            let e = &c.experiments[i];
            let b = e.shape.build("shape")?;
            let poles = e.poles.build(&b, "poles")?;
            let start = Instant::now();
            let solver = MrcSolver::new(&b, k, s.order, &poles, s.knots, s.w_min)
                .context(|| format!("experiment {} at k = {k}: assembling the MRC system", e.label))?;
            let setup = start.elapsed().as_secs_f64();
            e.incident
                .iter()
                .map(|&a| {
                    let t0 = Instant::now();
                    let (exp, sol) = solver
                        .solve(Vec2::polar(a), s.epsilon)
                        .context(|| format!("experiment {} at k = {k}, alpha = {a}", e.label))?;
                    Ok(MrcRow {
                        label: e.label.clone(),
                        shape: b.kind_name(),
                        k,
                        alpha: a,
                        r_min: sol.r_min,
                        rank: sol.rank_used,
                        converged: sol.converged,
                        seconds: setup + t0.elapsed().as_secs_f64(),
                        expansion: expansion_json(&exp),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<MrcRow> = rows.into_iter().flatten().collect();

    let path = r.file("residuals.csv");
    write_csv(
        &path,
        &[],
        &["experiment", "shape", "k", "alpha", "r_min", "rank", "converged"],
        rows.iter().map(|row| {
            vec![
                row.label.clone(),
                row.shape.to_string(),
                num(row.k),
                num(row.alpha),
                num(row.r_min),
                row.rank.to_string(),
                row.converged.to_string(),
            ]
        }),
    )?;
    for (i, row) in rows.iter().enumerate() {
        r.residual(format!("r_min[{i}] {} k={} alpha={:.6}", row.label, row.k, row.alpha), row.r_min);
        if c.write_expansions {
            let p = r.file(&format!("expansion_{i:02}.json"));
            write_json(&p, &row.expansion)?;
        }
    }
    r.residual("max_row_seconds", rows.iter().map(|row| row.seconds).fold(0.0, f64::max));
    Ok(())
}

fn direct_biem(c: &DirectBiemConfig, r: &mut Report) -> Result<()> {
    let b = c.shape.build("shape")?;
    let solver = BiemSolver::new(&b, c.k, c.quadrature).context(|| "boundary integral solver".into())?;
    let table = FarFieldTable::from_source(&solver, c.incident, c.observation).context(|| "far-field table".into())?;
    write_far_field(&r.file("far_field.csv"), &table)?;
    if let Boundary::Circle { center, radius } = b {
        let series = CircleScatterer::dirichlet(center, radius)
            .and_then(|s| s.series(c.k))
            .context(|| "analytic circle series".into())?;
        let reference = FarFieldTable::from_source(&series, c.incident, c.observation).context(|| "analytic table".into())?;
        r.residual("max_relative_error_vs_analytic", max_relative_difference(&table, &reference));
    }
    Ok(())
}

fn max_relative_difference(a: &FarFieldTable, b: &FarFieldTable) -> f64 {
    let scale = b.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm() / scale).fold(0.0, f64::max)
}

struct GratingRow {
    profile: usize,
    theta: usize,
    r_min: f64,
    rank: usize,
    converged: bool,
    refinements: usize,
    seconds: f64,
    json: Value,
}

fn grating_mrc(c: &GratingMrcConfig, r: &mut Report) -> Result<()> {
    let s = c.solver;
    let jobs: Vec<(usize, usize)> = (0..c.profiles.len()).flat_map(|p| (0..c.thetas.len()).map(move |t| (p, t))).collect();
    let rows: Vec<GratingRow> = jobs
        .par_iter()
        .map(|&(p, t)| {
            let spec = &c.profiles[p];
            let theta = c.thetas[t];
            let what = || format!("profile {} at theta = {theta}", spec.label);
            let start = Instant::now();
            let profile = GratingProfile::new(spec.profile.to_core(), spec.period).context(what)?;
            let g = GratingProblem::new(profile, c.k, theta, s.b_depth, s.jmax).context(what)?;
            let sol = solve_grating(&g, s.nodes, s.poles, s.w_min, s.epsilon, s.refine).context(what)?;
            let json = grating_json(&sol.poles, &sol.coefficients, sol.r_min, g.modes());
            Ok(GratingRow {
                profile: p,
                theta: t,
                r_min: sol.r_min,
                rank: sol.lsq.rank_used,
                converged: sol.converged,
                refinements: sol.refinements,
                seconds: start.elapsed().as_secs_f64(),
                json,
            })
        })
        .collect::<Result<_>>()?;

    let path = r.file("residuals.csv");
    write_csv(
        &path,
        &[],
        &["profile", "theta", "r_min", "rank", "converged", "refinements"],
        rows.iter().map(|row| {
            vec![
                c.profiles[row.profile].label.clone(),
                num(c.thetas[row.theta]),
                num(row.r_min),
                row.rank.to_string(),
                row.converged.to_string(),
                row.refinements.to_string(),
            ]
        }),
    )?;
    for row in &rows {
        let label = &c.profiles[row.profile].label;
        r.residual(format!("r_min {label} theta={:.6}", c.thetas[row.theta]), row.r_min);
        let file = r.file(&format!("grating_{label}_{}.json", row.theta));
        write_json(&file, &row.json)?;
    }
    r.residual("max_row_seconds", rows.iter().map(|row| row.seconds).fold(0.0, f64::max));
    Ok(())
}

/// Far-field table of a known obstacle from the requested engine.
pub fn synthesize(s: &SynthesisSpec) -> Result<FarFieldTable> {
    let b = s.shape.build("shape")?;
    let what = || format!("synthesizing far-field data with the {:?} engine", s.engine).to_lowercase();
    match s.engine {
        Engine::Analytic => {
            let series = s.circle()?.series(s.k).context(what)?;
            FarFieldTable::from_source(&series, s.incident, s.observation).context(what)
        }
        Engine::Biem => {
            let solver = BiemSolver::new(&b, s.k, s.quadrature).context(what)?;
            FarFieldTable::from_source(&solver, s.incident, s.observation).context(what)
        }
        Engine::Mrc => {
            let poles = s.poles.build(&b, "poles")?;
            let m = s.solver;
            let solver = MrcSolver::new(&b, s.k, m.order, &poles, m.knots, m.w_min).context(what)?;
            solver
                .far_field_table(&uniform_angles(s.incident), &uniform_angles(s.observation))
                .context(what)
        }
    }
}

/// On Dirichlet circles, compares the analytic and boundary-integral engines.
fn cross_validate(s: &SynthesisSpec, table: &FarFieldTable, r: &mut Report) -> Result<()> {
    let circle = matches!(s.shape.build("shape")?, Boundary::Circle { .. });
    if !circle || s.condition != ConditionSpec::Dirichlet || s.engine == Engine::Mrc {
        return Ok(());
    }
    let other = SynthesisSpec {
        engine: if s.engine == Engine::Analytic { Engine::Biem } else { Engine::Analytic },
        ..s.clone()
    };
    let diff = max_relative_difference(table, &synthesize(&other)?);
    r.residual("cross_validation_max_relative_difference", diff);
    if diff > CROSS_VALIDATION_TOLERANCE {
        return Err(CliError::Unsupported(format!(
            "analytic and boundary-integral engines disagree by {diff:e} (limit {CROSS_VALIDATION_TOLERANCE:e})"
        )));
    }
    Ok(())
}

/// Loads or synthesizes far-field data; synthesized tables are also written out.
fn resolve_source(source: &SourceSpec, r: &mut Report) -> Result<(FarFieldTable, Option<Boundary>)> {
    match source {
        SourceSpec::File { path } => {
            let full = r.base_dir.join(path);
            let table = read_far_field(&full)?;
            r.data_files.push(full);
            Ok((table, None))
        }
        SourceSpec::Synthesize(s) => {
            let table = synthesize(s)?;
            write_far_field(&r.file("far_field.csv"), &table)?;
            Ok((table, Some(s.shape.build("shape")?)))
        }
    }
}

fn inverse_sfm(c: &InverseSfmConfig, r: &mut Report) -> Result<()> {
    match &c.method {
        SfmMethod::Dirichlet(m) => sfm_dirichlet(m, r),
        SfmMethod::Robin(m) => sfm_robin(m, r),
        SfmMethod::AmplitudeRatio(m) => sfm_ratio(m, r),
    }
}

fn sfm_dirichlet(m: &SfmDirichlet, r: &mut Report) -> Result<()> {
    let (table, shape) = resolve_source(&m.source, r)?;
    let samples = recover_support_curve_from_table(&table, m.directions, m.bracket).context(|| "support recovery".into())?;
    let points = reconstruct_boundary(&samples).context(|| "boundary reconstruction".into())?;
    write_csv(
        &r.file("support.csv"),
        &[],
        &["t", "d"],
        samples.angles.iter().zip(&samples.d_values).map(|(t, d)| vec![num(*t), num(*d)]),
    )?;
    write_csv(
        &r.file("boundary_points.csv"),
        &[],
        &["t", "x", "y"],
        samples.angles.iter().zip(&points).map(|(t, p)| vec![num(*t), num(p.x), num(p.y)]),
    )?;
    if let Some(g) = &m.localize {
        let grid = g.build();
        let mask = localize_halfplanes(&samples, &grid);
        write_csv(
            &r.file("localization.csv"),
            &[],
            &["x", "y", "inside"],
            grid.points().zip(&mask).map(|(p, &inside)| vec![num(p.x), num(p.y), u8::from(inside).to_string()]),
        )?;
        r.residual("localized_points", mask.iter().filter(|&&x| x).count());
    }
    if let Some(b) = shape {
        let mut support_error: f64 = 0.0;
        for (l, d) in samples.directions().zip(&samples.d_values) {
            let exact = support_function_exact(&b, l).unwrap_or_else(|_| support_function_sampled(&b, l, SUPPORT_SAMPLES));
            support_error = support_error.max((d - exact).abs());
        }
        r.residual("max_support_error", support_error);
        let bitangents = bitangent_directions(&b, BITANGENT_SWEEP, BITANGENT_BOUNDARY_SAMPLES);
        let convex: Vec<f64> = samples
            .angles
            .iter()
            .zip(&points)
            .filter(|(t, _)| away_from(**t, &bitangents, FRAC_PI_8))
            .map(|(_, p)| b.distance_to(*p))
            .collect();
        r.residual("bitangent_directions", bitangents);
        r.residual("max_boundary_distance_away_from_bitangents", convex.iter().cloned().fold(0.0, f64::max));
    }
    Ok(())
}

fn sfm_robin(m: &SfmRobin, r: &mut Report) -> Result<()> {
    let Boundary::Circle { center, radius } = m.shape.build("method.shape")? else {
        unreachable!("validated as a circle")
    };
    let l = Vec2::polar(m.direction);
    let grid = robin_pair_grid(l, m.points).context(|| "Robin pair grid".into())?;
    let d_exact = center.dot(l) - radius;
    let rows = m
        .h_values
        .iter()
        .map(|&h| {
            let what = || format!("Robin support recovery at h = {h}");
            let series = CircleScatterer::new(center, radius, BoundaryCondition::Robin { h })
                .and_then(|s| s.series(m.k))
                .context(what)?;
            let set = AmplitudePairSet::sample(&series, l, &grid).context(what)?;
            Ok((h, recover_support_robin(&set).context(what)?))
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &r.file("robin_support.csv"),
        &[],
        &["h", "d", "d_exact", "h_estimate", "slope", "intercept"],
        rows.iter()
            .map(|(h, e)| vec![num(*h), num(e.d), num(d_exact), num(e.h), num(e.slope), num(e.intercept)]),
    )?;
    for (h, e) in &rows {
        r.residual(format!("d h={h}"), e.d);
    }
    Ok(())
}

fn sfm_ratio(m: &SfmRatio, r: &mut Report) -> Result<()> {
    let b = m.shape.build("method.shape")?;
    let Boundary::Circle { center, radius } = b else {
        unreachable!("validated as a circle")
    };
    let l = Vec2::polar(m.direction);
    let d = support_function_exact(&b, l).context(|| "exact support function".into())?;
    let curvature = 1.0 / radius;
    let mut rows = Vec::new();
    for &k in &m.wavenumbers {
        let series = CircleScatterer::dirichlet(center, radius)
            .and_then(|s| s.series(k))
            .context(|| format!("circle series at k = {k}"))?;
        for i in 0..m.rows {
            let beta = i as f64 * FRAC_PI_2 / (m.rows - 1) as f64;
            let alpha = Vec2::polar(m.direction + beta);
            let alpha_prime = Vec2::polar(m.direction + PI - beta);
            let approx = approx_amplitude(d, curvature, alpha, alpha_prime, k);
            let ratio = if approx.norm() == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                approx / series.amplitude(alpha_prime, alpha).context(|| "circle amplitude".into())?
            };
            rows.push((k, beta, ratio));
        }
    }
    write_csv(
        &r.file("amplitude_ratio.csv"),
        &[],
        &["k", "beta", "re", "im"],
        rows.iter().map(|(k, b, z)| vec![num(*k), num(*b), num(z.re), num(z.im)]),
    )?;
    r.residual("support_value", d);
    Ok(())
}

fn inverse_lsm(c: &InverseLsmConfig, r: &mut Report) -> Result<()> {
    let (table, shape) = resolve_source(&c.source, r)?;
    let m = FarFieldMatrix::from_table(&table).context(|| "far-field matrix".into())?;
    let grid = c.grid.build();
    let s = scan(&m, &grid, c.cutoff_ratio).context(|| "linear sampling scan".into())?;
    write_csv(
        &r.file("scan.csv"),
        &[],
        &["x", "y", "log_ck", "log_k"],
        grid.points()
            .zip(s.values_ck.iter().zip(&s.values_k))
            .map(|(p, (a, b))| vec![num(p.x), num(p.y), num(*a), num(*b)]),
    )?;
    let (ck, ki) = (s.argmin_ck(), s.argmin_kirsch());
    r.residual("argmin_ck", vec![ck.x, ck.y]);
    r.residual("argmin_kirsch", vec![ki.x, ki.y]);
    r.residual("retained_singular_values", s.retained);
    if let Some(Boundary::Circle { center, .. }) = shape {
        r.residual("argmin_ck_distance_to_center", ck.distance(center));
        r.residual("argmin_kirsch_distance_to_center", ki.distance(center));
    }
    Ok(())
}

fn illposed_demo(c: &IllposedDemoConfig, r: &mut Report) -> Result<()> {
    let alpha = Vec2::polar(c.incident);
    let circle = CircleScatterer::dirichlet(Vec2::default(), c.radius).context(|| "circle".into())?;
    let series = circle.series(c.k).context(|| "circle series".into())?;
    let angles = uniform_angles(c.samples);
    let target: Vec<Complex64> = angles.iter().map(|&t| series.amplitude_at(Vec2::polar(t), alpha)).collect();
    let pole = Vec2::new(c.pole[0], c.pole[1]);
    let (expansion, sol) = fit_far_field(&angles, &target, pole, c.order, c.k, c.w_min).context(|| "far-field fit".into())?;
    let rows = uniform_angles(c.rows)
        .into_iter()
        .map(|t| {
            let v = exact_boundary_scattered_field(&circle, c.k, alpha, t);
            let vc = expansion.near_field(Vec2::polar(t) * c.radius).context(|| format!("near field at theta = {t}"))?;
            Ok((t, v, vc))
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &r.file("near_field.csv"),
        &[],
        &["theta", "v_re", "v_im", "vc_re", "vc_im"],
        rows.iter().map(|(t, v, vc)| vec![num(*t), num(v.re), num(v.im), num(vc.re), num(vc.im)]),
    )?;
    write_json(&r.file("expansion.json"), &expansion_json(&expansion))?;
    r.residual("r_min", sol.r_min);
    r.residual("max_boundary_discrepancy", rows.iter().map(|(_, v, vc)| (v - vc).norm()).fold(0.0, f64::max));
    Ok(())
}
