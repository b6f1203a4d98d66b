//! Experiment configs: one experiment per TOML file, tagged by `kind`.
//!
//! Every numeric knob has a default matching the core solver defaults, so a
//! config only needs to state what differs. Angles are in radians.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use helmscat_core::geometry::{interior_poles, Boundary, GratingProfile, ProfileKind, RectGrid, Vec2};
use helmscat_core::oracles::{BoundaryCondition, CircleScatterer};
use serde::{Deserialize, Serialize};

use crate::error::{field, CliError, Result, SolverContext};

/// Shipped configs, embedded at build time.
pub const BUNDLED: &[(&str, &str)] = &[
    ("table1", include_str!("../configs/table1.cfg")),
    ("table2", include_str!("../configs/table2.cfg")),
    ("table3", include_str!("../configs/table3.cfg")),
    ("table4", include_str!("../configs/table4.cfg")),
    ("table5", include_str!("../configs/table5.cfg")),
    ("fig2", include_str!("../configs/fig2.cfg")),
    ("fig3", include_str!("../configs/fig3.cfg")),
    ("fig4", include_str!("../configs/fig4.cfg")),
    ("fig5", include_str!("../configs/fig5.cfg")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DirectMrc,
    DirectBiem,
    GratingMrc,
    InverseSfm,
    InverseLsm,
    IllposedDemo,
    SynthesizeFarField,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::DirectMrc => "direct-mrc",
            ExperimentKind::DirectBiem => "direct-biem",
            ExperimentKind::GratingMrc => "grating-mrc",
            ExperimentKind::InverseSfm => "inverse-sfm",
            ExperimentKind::InverseLsm => "inverse-lsm",
            ExperimentKind::IllposedDemo => "illposed-demo",
            ExperimentKind::SynthesizeFarField => "synthesize-far-field",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    DirectMrc(DirectMrcConfig),
    DirectBiem(DirectBiemConfig),
    GratingMrc(GratingMrcConfig),
    InverseSfm(InverseSfmConfig),
    InverseLsm(InverseLsmConfig),
    IllposedDemo(IllposedDemoConfig),
    SynthesizeFarField(SynthesizeFarFieldConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            ExperimentConfig::DirectMrc(_) => ExperimentKind::DirectMrc,
            ExperimentConfig::DirectBiem(_) => ExperimentKind::DirectBiem,
            ExperimentConfig::GratingMrc(_) => ExperimentKind::GratingMrc,
            ExperimentConfig::InverseSfm(_) => ExperimentKind::InverseSfm,
            ExperimentConfig::InverseLsm(_) => ExperimentKind::InverseLsm,
            ExperimentConfig::IllposedDemo(_) => ExperimentKind::IllposedDemo,
            ExperimentConfig::SynthesizeFarField(_) => ExperimentKind::SynthesizeFarField,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ExperimentConfig::DirectMrc(c) => &c.name,
            ExperimentConfig::DirectBiem(c) => &c.name,
            ExperimentConfig::GratingMrc(c) => &c.name,
            ExperimentConfig::InverseSfm(c) => &c.name,
            ExperimentConfig::InverseLsm(c) => &c.name,
            ExperimentConfig::IllposedDemo(c) => &c.name,
            ExperimentConfig::SynthesizeFarField(c) => &c.name,
        }
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_string(),
            message: e.to_string().trim_end().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name().is_empty() || !self.name().chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(field("name", "must be non-empty and use only letters, digits, '-' and '_'"));
        }
        match self {
            ExperimentConfig::DirectMrc(c) => c.validate(),
            ExperimentConfig::DirectBiem(c) => c.validate(),
            ExperimentConfig::GratingMrc(c) => c.validate(),
            ExperimentConfig::InverseSfm(c) => c.validate(),
            ExperimentConfig::InverseLsm(c) => c.validate(),
            ExperimentConfig::IllposedDemo(c) => c.validate(),
            ExperimentConfig::SynthesizeFarField(c) => c.far_field.validate("far_field"),
        }
    }
}

/// Where a config came from; relative data paths resolve against `base_dir`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub origin: String,
    pub base_dir: PathBuf,
}

/// Reads `spec` as a file path, falling back to a bundled name such as
/// `table1`, `table1.cfg` or `bundled:table1`.
pub fn load(spec: &str) -> Result<LoadedConfig> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        return Ok(LoadedConfig {
            config: ExperimentConfig::parse(&text, spec)?,
            origin: spec.to_string(),
            base_dir,
        });
    }
    let name = spec.strip_prefix("bundled:").unwrap_or(spec);
    let name = name.strip_suffix(".cfg").unwrap_or(name);
    let text = bundled(name).ok_or_else(|| CliError::ConfigNotFound(spec.to_string()))?;
    let origin = format!("bundled:{name}");
    Ok(LoadedConfig {
        config: ExperimentConfig::parse(text, &origin)?,
        origin,
        base_dir: PathBuf::from("."),
    })
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// First comment line of a bundled config.
pub fn bundled_summary(text: &str) -> &str {
    text.lines()
        .find_map(|l| l.strip_prefix('#'))
        .map(str::trim)
        .unwrap_or("")
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("must be positive and finite, got {value}")))
    }
}

fn nonnegative(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("must be nonnegative and finite, got {value}")))
    }
}

fn at_least(name: &str, value: usize, min: usize) -> Result<()> {
    if value >= min {
        Ok(())
    } else {
        Err(field(name, format!("must be at least {min}, got {value}")))
    }
}

fn non_empty<T>(name: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        Err(field(name, "must list at least one value"))
    } else {
        Ok(())
    }
}

fn vec2(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeSpec {
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], a: f64, b: f64 },
    /// `offset + (cos t + 0.65 cos 2t, 1.5 sin t)`.
    Kite { offset: [f64; 2] },
    Triangle { vertices: [[f64; 2]; 3] },
    Preset { name: String },
}

/// Named shapes of the reference experiments.
pub const SHAPE_PRESETS: &[&str] = &[
    "unit-circle",
    "experiment-ellipse",
    "experiment-kite",
    "experiment-triangle",
    "experiment-thin-ellipse",
    "sfm-circle",
    "sfm-kite",
];

impl ShapeSpec {
    pub fn build(&self, name: &str) -> Result<Boundary> {
        let wrap = |e: helmscat_core::Error| field(name, e.to_string());
        match self {
            ShapeSpec::Circle { center, radius } => Boundary::circle(vec2(*center), *radius).map_err(wrap),
            ShapeSpec::Ellipse { center, a, b } => Boundary::ellipse(vec2(*center), *a, *b).map_err(wrap),
            ShapeSpec::Kite { offset } => Ok(Boundary::kite(vec2(*offset))),
            ShapeSpec::Triangle { vertices } => {
                Boundary::triangle(vec2(vertices[0]), vec2(vertices[1]), vec2(vertices[2])).map_err(wrap)
            }
            ShapeSpec::Preset { name: preset } => match preset.as_str() {
                "unit-circle" => Ok(Boundary::unit_circle()),
                "experiment-ellipse" => Ok(Boundary::experiment_ellipse()),
                "experiment-kite" => Ok(Boundary::experiment_kite()),
                "experiment-triangle" => Ok(Boundary::experiment_triangle()),
                "experiment-thin-ellipse" => Ok(Boundary::experiment_thin_ellipse()),
                "sfm-circle" => Ok(Boundary::sfm_circle()),
                "sfm-kite" => Ok(Boundary::sfm_kite()),
                other => Err(field(
                    format!("{name}.name"),
                    format!("unknown preset `{other}`; known presets: {}", SHAPE_PRESETS.join(", ")),
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConditionSpec {
    #[default]
    Dirichlet,
    /// `du/dN + h u = 0`.
    Robin { h: f64 },
}

impl ConditionSpec {
    pub fn to_core(self) -> BoundaryCondition {
        match self {
            ConditionSpec::Dirichlet => BoundaryCondition::Dirichlet,
            ConditionSpec::Robin { h } => BoundaryCondition::Robin { h },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PoleSpec {
    /// `count` points of the boundary curve scaled by `scale` toward its anchor.
    Interior { count: usize, scale: f64 },
    Points { points: Vec<[f64; 2]> },
}

impl Default for PoleSpec {
    fn default() -> Self {
        PoleSpec::Interior { count: 16, scale: 0.9 }
    }
}

impl PoleSpec {
    pub fn build(&self, boundary: &Boundary, name: &str) -> Result<Vec<Vec2>> {
        match self {
            PoleSpec::Interior { count, scale } => {
                at_least(&format!("{name}.count"), *count, 1)?;
                if !(*scale > 0.0 && *scale < 1.0) {
                    return Err(field(format!("{name}.scale"), format!("must lie in (0, 1), got {scale}")));
                }
                interior_poles(boundary, *count, *scale).map_err(|e| field(name, e.to_string()))
            }
            PoleSpec::Points { points } => {
                non_empty(&format!("{name}.points"), points)?;
                let poles: Vec<Vec2> = points.iter().map(|p| vec2(*p)).collect();
                if let Some(i) = poles.iter().position(|p| boundary.winding_number(*p) == 0) {
                    return Err(field(
                        format!("{name}.points[{i}]"),
                        format!("({}, {}) is not inside the boundary", poles[i].x, poles[i].y),
                    ));
                }
                Ok(poles)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MrcKnobs {
    /// Multipole order `L`; each pole carries `2L + 1` terms.
    pub order: usize,
    /// Collocation knots `M` on the boundary.
    pub knots: usize,
    pub w_min: f64,
    pub epsilon: f64,
}

impl Default for MrcKnobs {
    fn default() -> Self {
        Self {
            order: helmscat_core::mrc::DEFAULT_ORDER,
            knots: helmscat_core::mrc::DEFAULT_KNOTS,
            w_min: helmscat_core::mrc::DEFAULT_W_MIN,
            epsilon: 0.0,
        }
    }
}

impl MrcKnobs {
    fn validate(&self, prefix: &str) -> Result<()> {
        at_least(&format!("{prefix}.knots"), self.knots, 1)?;
        nonnegative(&format!("{prefix}.w_min"), self.w_min)?;
        nonnegative(&format!("{prefix}.epsilon"), self.epsilon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectMrcConfig {
    pub name: String,
    #[serde(default)]
    pub solver: MrcKnobs,
    /// Also write each fitted expansion as JSON.
    #[serde(default)]
    pub write_expansions: bool,
    #[serde(rename = "experiment")]
    pub experiments: Vec<MrcExperiment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MrcExperiment {
    pub label: String,
    pub shape: ShapeSpec,
    #[serde(default)]
    pub poles: PoleSpec,
    pub wavenumbers: Vec<f64>,
    /// Incident direction angles.
    pub incident: Vec<f64>,
}

impl DirectMrcConfig {
    fn validate(&self) -> Result<()> {
        self.solver.validate("solver")?;
        non_empty("experiment", &self.experiments)?;
        for (i, e) in self.experiments.iter().enumerate() {
            let p = format!("experiment[{i}]");
            let b = e.shape.build(&format!("{p}.shape"))?;
            let poles = e.poles.build(&b, &format!("{p}.poles"))?;
            if self.solver.knots < poles.len() * (2 * self.solver.order + 1) {
                return Err(field(
                    format!("{p}.poles"),
                    format!(
                        "{} poles of order {} need at least {} knots, solver.knots is {}",
                        poles.len(),
                        self.solver.order,
                        poles.len() * (2 * self.solver.order + 1),
                        self.solver.knots
                    ),
                ));
            }
            non_empty(&format!("{p}.wavenumbers"), &e.wavenumbers)?;
            non_empty(&format!("{p}.incident"), &e.incident)?;
            for k in &e.wavenumbers {
                positive(&format!("{p}.wavenumbers"), *k)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectBiemConfig {
    pub name: String,
    pub shape: ShapeSpec,
    pub k: f64,
    /// Quadrature parameter `n`; the rule uses `2n` nodes.
    #[serde(default = "default_quadrature")]
    pub quadrature: usize,
    pub incident: usize,
    pub observation: usize,
}

fn default_quadrature() -> usize {
    helmscat_core::biem::DEFAULT_QUADRATURE
}

impl DirectBiemConfig {
    fn validate(&self) -> Result<()> {
        let b = self.shape.build("shape")?;
        if !b.is_smooth() {
            return Err(field("shape", "the boundary integral solver needs a smooth boundary"));
        }
        positive("k", self.k)?;
        at_least("quadrature", self.quadrature, 2)?;
        at_least("incident", self.incident, 1)?;
        at_least("observation", self.observation, 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GratingKnobs {
    /// Collocation nodes `N` per period.
    pub nodes: usize,
    /// Poles `M` below the profile.
    pub poles: usize,
    pub w_min: f64,
    pub epsilon: f64,
    pub jmax: usize,
    pub b_depth: f64,
    /// Rerun once with doubled `N` and `M` when `epsilon` is not met.
    pub refine: bool,
}

impl Default for GratingKnobs {
    fn default() -> Self {
        Self {
            nodes: helmscat_core::grating::DEFAULT_NODES,
            poles: helmscat_core::grating::DEFAULT_POLES,
            w_min: helmscat_core::mrc::DEFAULT_W_MIN,
            epsilon: 0.0,
            jmax: helmscat_core::grating::DEFAULT_JMAX,
            b_depth: helmscat_core::grating::DEFAULT_DEPTH,
            refine: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileName {
    Sine2x,
    SineSlow,
    Tent,
    Sawtooth,
    Flat,
}

impl ProfileName {
    pub fn to_core(self) -> ProfileKind {
        match self {
            ProfileName::Sine2x => ProfileKind::Sine2x,
            ProfileName::SineSlow => ProfileKind::SineSlow,
            ProfileName::Tent => ProfileKind::Tent,
            ProfileName::Sawtooth => ProfileKind::Sawtooth,
            ProfileName::Flat => ProfileKind::Flat,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub label: String,
    pub profile: ProfileName,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GratingMrcConfig {
    pub name: String,
    pub k: f64,
    /// Incidence angles in `(0, pi/2]`.
    pub thetas: Vec<f64>,
    #[serde(default)]
    pub solver: GratingKnobs,
    #[serde(rename = "profile")]
    pub profiles: Vec<ProfileSpec>,
}

impl GratingMrcConfig {
    fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        non_empty("thetas", &self.thetas)?;
        for t in &self.thetas {
            if !(*t > 0.0 && *t <= FRAC_PI_2 + 1e-12) {
                return Err(field("thetas", format!("angles must lie in (0, pi/2], got {t}")));
            }
        }
        let s = &self.solver;
        at_least("solver.poles", s.poles, 1)?;
        if 4 * s.poles > s.nodes {
            return Err(field("solver.nodes", format!("must be at least 4 * solver.poles = {}", 4 * s.poles)));
        }
        nonnegative("solver.w_min", s.w_min)?;
        nonnegative("solver.epsilon", s.epsilon)?;
        at_least("solver.jmax", s.jmax, 1)?;
        positive("solver.b_depth", s.b_depth)?;
        non_empty("profile", &self.profiles)?;
        for (i, p) in self.profiles.iter().enumerate() {
            GratingProfile::new(p.profile.to_core(), p.period).map_err(|e| field(format!("profile[{i}].period"), e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Closed-form circle series.
    Analytic,
    /// Boundary integral equation, smooth Dirichlet obstacles.
    Biem,
    /// Multipole least squares, Dirichlet obstacles.
    Mrc,
}

/// Far-field data generated from a known obstacle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisSpec {
    pub shape: ShapeSpec,
    #[serde(default)]
    pub condition: ConditionSpec,
    pub k: f64,
    pub incident: usize,
    pub observation: usize,
    pub engine: Engine,
    #[serde(default = "default_quadrature")]
    pub quadrature: usize,
    #[serde(default)]
    pub poles: PoleSpec,
    #[serde(default)]
    pub solver: MrcKnobs,
}

impl SynthesisSpec {
    fn validate(&self, prefix: &str) -> Result<()> {
        let b = self.shape.build(&format!("{prefix}.shape"))?;
        positive(&format!("{prefix}.k"), self.k)?;
        at_least(&format!("{prefix}.incident"), self.incident, 1)?;
        at_least(&format!("{prefix}.observation"), self.observation, 1)?;
        if let ConditionSpec::Robin { h } = self.condition {
            nonnegative(&format!("{prefix}.condition.h"), h)?;
        }
        let dirichlet = self.condition == ConditionSpec::Dirichlet;
        match self.engine {
            Engine::Analytic => {
                if !matches!(b, Boundary::Circle { .. }) {
                    return Err(CliError::Unsupported(format!(
                        "{prefix}: the analytic engine only handles circles, got a {}",
                        b.kind_name()
                    )));
                }
            }
            Engine::Biem => {
                if !b.is_smooth() || !dirichlet {
                    return Err(CliError::Unsupported(format!(
                        "{prefix}: the biem engine only handles smooth Dirichlet obstacles"
                    )));
                }
                at_least(&format!("{prefix}.quadrature"), self.quadrature, 2)?;
            }
            Engine::Mrc => {
                if !dirichlet {
                    return Err(CliError::Unsupported(format!("{prefix}: the mrc engine only handles Dirichlet obstacles")));
                }
                self.solver.validate(&format!("{prefix}.solver"))?;
                self.poles.build(&b, &format!("{prefix}.poles"))?;
            }
        }
        Ok(())
    }

    pub fn circle(&self) -> Result<CircleScatterer> {
        match self.shape.build("shape")? {
            Boundary::Circle { center, radius } => {
                CircleScatterer::new(center, radius, self.condition.to_core()).context(|| "circle scatterer".into())
            }
            other => Err(CliError::Unsupported(format!("analytic engine needs a circle, got a {}", other.kind_name()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SourceSpec {
    /// A far-field CSV file; relative paths resolve against the config's directory.
    File { path: PathBuf },
    Synthesize(SynthesisSpec),
}

impl SourceSpec {
    fn validate(&self, prefix: &str) -> Result<()> {
        match self {
            SourceSpec::File { path } => {
                if path.as_os_str().is_empty() {
                    Err(field(format!("{prefix}.path"), "must not be empty"))
                } else {
                    Ok(())
                }
            }
            SourceSpec::Synthesize(s) => s.validate(prefix),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub center: [f64; 2],
    pub side: f64,
    /// Points per axis.
    pub points: usize,
}

impl GridSpec {
    fn validate(&self, prefix: &str) -> Result<()> {
        positive(&format!("{prefix}.side"), self.side)?;
        at_least(&format!("{prefix}.points"), self.points, 2)
    }

    pub fn build(&self) -> RectGrid {
        RectGrid::square(vec2(self.center), self.side, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseSfmConfig {
    pub name: String,
    pub method: SfmMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SfmMethod {
    /// Support values from far-field data, then boundary points and localization.
    Dirichlet(SfmDirichlet),
    /// Support values of Robin circles from the phase line fit.
    Robin(SfmRobin),
    /// Ratio of the high-frequency amplitude approximation to the exact circle amplitude.
    AmplitudeRatio(SfmRatio),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfmDirichlet {
    pub source: SourceSpec,
    #[serde(default = "default_sfm_directions")]
    pub directions: usize,
    #[serde(default = "default_bracket")]
    pub bracket: f64,
    /// Optional half-plane localization grid.
    pub localize: Option<GridSpec>,
}

fn default_sfm_directions() -> usize {
    40
}

fn default_bracket() -> f64 {
    helmscat_core::sfm::DEFAULT_BRACKET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfmRobin {
    pub shape: ShapeSpec,
    pub k: f64,
    pub h_values: Vec<f64>,
    /// Angle of the support direction `l`.
    #[serde(default)]
    pub direction: f64,
    #[serde(default = "default_robin_points")]
    pub points: usize,
}

fn default_robin_points() -> usize {
    helmscat_core::sfm::DEFAULT_ROBIN_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfmRatio {
    pub shape: ShapeSpec,
    pub wavenumbers: Vec<f64>,
    /// Row `i` uses the incidence offset `beta = i pi / (2 (rows - 1))`.
    #[serde(default = "default_ratio_rows")]
    pub rows: usize,
    /// Angle of the support direction `l`.
    #[serde(default)]
    pub direction: f64,
}

fn default_ratio_rows() -> usize {
    13
}

fn require_circle(shape: &ShapeSpec, name: &str) -> Result<()> {
    match shape.build(name)? {
        Boundary::Circle { .. } => Ok(()),
        other => Err(field(name, format!("must be a circle, got a {}", other.kind_name()))),
    }
}

impl InverseSfmConfig {
    fn validate(&self) -> Result<()> {
        match &self.method {
            SfmMethod::Dirichlet(m) => {
                m.source.validate("method.source")?;
                at_least("method.directions", m.directions, 8)?;
                positive("method.bracket", m.bracket)?;
                if let Some(g) = &m.localize {
                    g.validate("method.localize")?;
                }
                Ok(())
            }
            SfmMethod::Robin(m) => {
                require_circle(&m.shape, "method.shape")?;
                positive("method.k", m.k)?;
                non_empty("method.h_values", &m.h_values)?;
                for h in &m.h_values {
                    nonnegative("method.h_values", *h)?;
                }
                at_least("method.points", m.points, 3)
            }
            SfmMethod::AmplitudeRatio(m) => {
                require_circle(&m.shape, "method.shape")?;
                non_empty("method.wavenumbers", &m.wavenumbers)?;
                for k in &m.wavenumbers {
                    positive("method.wavenumbers", *k)?;
                }
                at_least("method.rows", m.rows, 2)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseLsmConfig {
    pub name: String,
    pub source: SourceSpec,
    pub grid: GridSpec,
    #[serde(default = "default_cutoff_ratio")]
    pub cutoff_ratio: f64,
}

fn default_cutoff_ratio() -> f64 {
    helmscat_core::lsm::DEFAULT_CUTOFF_RATIO
}

impl InverseLsmConfig {
    fn validate(&self) -> Result<()> {
        self.source.validate("source")?;
        if let SourceSpec::Synthesize(s) = &self.source {
            if s.incident != s.observation {
                return Err(field("source.observation", "the far-field matrix needs as many observation as incident directions"));
            }
        }
        self.grid.validate("grid")?;
        nonnegative("cutoff_ratio", self.cutoff_ratio)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IllposedDemoConfig {
    pub name: String,
    pub k: f64,
    /// Radius of the Dirichlet circle centered at the origin.
    pub radius: f64,
    /// Incident direction angle.
    #[serde(default)]
    pub incident: f64,
    pub pole: [f64; 2],
    #[serde(default = "default_order")]
    pub order: usize,
    /// Far-field samples fitted.
    pub samples: usize,
    #[serde(default = "default_w_min")]
    pub w_min: f64,
    /// Boundary comparison points `theta_j = 2 pi j / rows`.
    pub rows: usize,
}

fn default_order() -> usize {
    helmscat_core::mrc::DEFAULT_ORDER
}

fn default_w_min() -> f64 {
    helmscat_core::mrc::DEFAULT_W_MIN
}

impl IllposedDemoConfig {
    fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        positive("radius", self.radius)?;
        at_least("samples", self.samples, 2 * self.order + 1)?;
        nonnegative("w_min", self.w_min)?;
        at_least("rows", self.rows, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesizeFarFieldConfig {
    pub name: String,
    pub far_field: SynthesisSpec,
}
