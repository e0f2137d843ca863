//! TOML run configuration: raw schema, parsing with path diagnostics, and
//! validation into a ready-to-run [`Job`].

use std::fmt;
use std::path::{Path, PathBuf};

use cornercut::nets::{GridT, NetOfFunctions, NetRunOptions, DEFAULT_BMSDD_SAMPLES, DEFAULT_CACHE_BUDGET, DEFAULT_MAX_DEPTH};
use cornercut::points::PolylineLevel;
use cornercut::transfinite::UFunction;
use cornercut::weights::{WeightPair, WeightSchedule, DEFAULT_MARGIN};
use serde::Deserialize;

use crate::registry;

pub const DEFAULT_SAMPLES: usize = 64;
pub const DEFAULT_RESAMPLE: usize = 16;
pub const DEFAULT_CHECK_ABS: f64 = 1e-12;

/// A config problem, located by its dotted path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Points,
    Net,
    Certify,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Points => "points",
            Mode::Net => "net",
            Mode::Certify => "certify",
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    #[serde(default)]
    pub levels: usize,
    #[serde(default)]
    pub force: bool,
    pub output_dir: Option<PathBuf>,
    pub weights: Option<WeightSpec>,
    pub weights_s: Option<WeightSpec>,
    pub weights_t: Option<WeightSpec>,
    pub points: Option<PointsSpec>,
    pub net: Option<NetSpec>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub checks: Checks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Chaikin,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub preset: Option<Preset>,
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub levels: Option<Vec<PairSpec>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologySpec {
    #[default]
    Open,
    Closed,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsSpec {
    #[serde(default)]
    pub topology: TopologySpec,
    pub data: Option<Vec<Vec<f64>>>,
    pub params: Option<Vec<f64>>,
    pub period: Option<f64>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    pub function: Option<String>,
    pub coefficients: Option<Vec<Vec<f64>>>,
    pub file: Option<PathBuf>,
    pub s_window: Option<[i64; 2]>,
    pub t_window: Option<[i64; 2]>,
    pub s_knots: Option<Vec<f64>>,
    pub t_knots: Option<Vec<f64>>,
    pub bmsdd: Option<f64>,
    #[serde(default)]
    pub analytic_bmsdd: bool,
    pub resample: Option<ResampleSpec>,
    pub max_depth: Option<usize>,
    pub cache_budget: Option<usize>,
}

/// `resample = true` uses the default density, an integer sets it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum ResampleSpec {
    Enabled(bool),
    PerCell(usize),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_bmsdd_samples")]
    pub bmsdd_samples: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            bmsdd_samples: DEFAULT_BMSDD_SAMPLES,
        }
    }
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_bmsdd_samples() -> usize {
    DEFAULT_BMSDD_SAMPLES
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Absolute slack added to every bound check.
    #[serde(default = "default_check_abs")]
    pub check_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            margin: DEFAULT_MARGIN,
            check_abs: DEFAULT_CHECK_ABS,
        }
    }
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

fn default_check_abs() -> f64 {
    DEFAULT_CHECK_ABS
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    /// Every bound is multiplied by this before comparison. Values below 1
    /// tighten the checks, which is how the violation exit path is tested.
    #[serde(default = "default_bound_scale")]
    pub bound_scale: f64,
}

impl Default for Checks {
    fn default() -> Self {
        Self { bound_scale: 1.0 }
    }
}

fn default_bound_scale() -> f64 {
    1.0
}

/// Parses TOML text into a [`RunConfig`]. Errors carry the path of the
/// offending field.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::at("", e.to_string()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::at(path, inner.message().to_string())
    })
}

/// Command line overrides, applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub levels: Option<usize>,
    pub force: bool,
    pub samples: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub cache_budget: Option<usize>,
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = o.levels {
            self.levels = k;
        }
        if o.force {
            self.force = true;
        }
        if let Some(n) = o.samples {
            self.sampling.samples = n;
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = Some(d.clone());
        }
        if let Some(b) = o.cache_budget {
            self.net.get_or_insert_with(Default::default).cache_budget = Some(b);
        }
    }
}

/// Settings shared by every run.
#[derive(Debug, Clone)]
pub struct Common {
    pub levels: usize,
    pub force: bool,
    pub samples: usize,
    pub check_abs: f64,
    pub bound_scale: f64,
}

pub enum Job {
    Certify {
        points: Option<WeightSchedule>,
        nets: Option<(WeightSchedule, WeightSchedule)>,
    },
    Points {
        common: Common,
        initial: PolylineLevel,
        schedule: WeightSchedule,
    },
    Net {
        common: Common,
        net: NetOfFunctions<f64>,
        source: String,
        s_schedule: WeightSchedule,
        t_schedule: WeightSchedule,
        options: NetRunOptions,
    },
}

/// Validates `cfg` for `mode`. Relative data file paths resolve against
/// `base`.
pub fn resolve(cfg: &RunConfig, mode: Mode, base: &Path) -> Result<Job, ConfigError> {
    if let Some(m) = cfg.mode {
        if m != mode && mode != Mode::Certify {
            return Err(ConfigError::at("mode", format!("config is for {m} but the {mode} command was used")));
        }
    }
    let margin = cfg.tolerances.margin;
    if !(margin > 0.0 && margin < 0.5) {
        return Err(ConfigError::at("tolerances.margin", "must lie in (0, 0.5)"));
    }
    if !(cfg.tolerances.check_abs >= 0.0) {
        return Err(ConfigError::at("tolerances.check_abs", "must be non-negative"));
    }
    if !(cfg.checks.bound_scale > 0.0) {
        return Err(ConfigError::at("checks.bound_scale", "must be positive"));
    }
    let common = Common {
        levels: cfg.levels,
        force: cfg.force,
        samples: cfg.sampling.samples,
        check_abs: cfg.tolerances.check_abs,
        bound_scale: cfg.checks.bound_scale,
    };
    let net_like = cfg.mode == Some(Mode::Net) || cfg.weights_s.is_some() || cfg.weights_t.is_some();
    match mode {
        Mode::Certify => {
            if net_like {
                Ok(Job::Certify {
                    points: None,
                    nets: Some(net_schedules(cfg, margin)?),
                })
            } else {
                let w = cfg.weights.as_ref().ok_or_else(|| ConfigError::at("weights", "missing"))?;
                Ok(Job::Certify {
                    points: Some(schedule(w, "weights", margin)?),
                    nets: None,
                })
            }
        }
        Mode::Points => {
            if common.samples < 1 {
                return Err(ConfigError::at("sampling.samples", "must be at least 1"));
            }
            let w = cfg.weights.as_ref().ok_or_else(|| ConfigError::at("weights", "missing"))?;
            let schedule = schedule(w, "weights", margin)?;
            check_length(&schedule, cfg.levels, "weights.levels")?;
            let spec = cfg.points.as_ref().ok_or_else(|| ConfigError::at("points", "missing"))?;
            let initial = polyline(spec, base)?;
            Ok(Job::Points {
                common,
                initial,
                schedule,
            })
        }
        Mode::Net => {
            if common.samples < 2 {
                return Err(ConfigError::at("sampling.samples", "must be at least 2 in net mode"));
            }
            let (s_schedule, t_schedule) = net_schedules(cfg, margin)?;
            let spec = cfg.net.as_ref().ok_or_else(|| ConfigError::at("net", "missing"))?;
            let grid = grid(spec)?;
            let (net, source, analytic) = initial_net(spec, grid, base)?;
            let bmsdd = match (spec.bmsdd, spec.analytic_bmsdd) {
                (Some(_), true) => {
                    return Err(ConfigError::at("net.analytic_bmsdd", "cannot be combined with net.bmsdd"))
                }
                (Some(l), false) if !(l >= 0.0) => return Err(ConfigError::at("net.bmsdd", "must be non-negative")),
                (Some(l), false) => Some(l),
                (None, true) => Some(analytic.ok_or_else(|| {
                    ConfigError::at("net.analytic_bmsdd", "only available for built-in functions")
                })?),
                (None, false) => None,
            };
            if cfg.sampling.bmsdd_samples < 2 {
                return Err(ConfigError::at("sampling.bmsdd_samples", "must be at least 2"));
            }
            let resample = match spec.resample {
                None | Some(ResampleSpec::Enabled(false)) => None,
                Some(ResampleSpec::Enabled(true)) => Some(DEFAULT_RESAMPLE),
                Some(ResampleSpec::PerCell(0)) => return Err(ConfigError::at("net.resample", "must be at least 1")),
                Some(ResampleSpec::PerCell(m)) => Some(m),
            };
            let options = NetRunOptions {
                force: cfg.force,
                bmsdd,
                bmsdd_samples: cfg.sampling.bmsdd_samples,
                cache_budget: spec.cache_budget.unwrap_or(DEFAULT_CACHE_BUDGET),
                max_depth: spec.max_depth.unwrap_or(DEFAULT_MAX_DEPTH),
                resample,
            };
            Ok(Job::Net {
                common,
                net,
                source,
                s_schedule,
                t_schedule,
                options,
            })
        }
    }
}

fn net_schedules(cfg: &RunConfig, margin: f64) -> Result<(WeightSchedule, WeightSchedule), ConfigError> {
    let pick = |dir: &Option<WeightSpec>, name: &str| -> Result<WeightSchedule, ConfigError> {
        match (dir, &cfg.weights) {
            (Some(w), _) => schedule(w, name, margin),
            (None, Some(w)) => schedule(w, "weights", margin),
            (None, None) => Err(ConfigError::at(name, "missing (and no shared [weights] table)")),
        }
    };
    let s = pick(&cfg.weights_s, "weights_s")?;
    let t = pick(&cfg.weights_t, "weights_t")?;
    check_length(&s, cfg.levels, "weights_s.levels")?;
    check_length(&t, cfg.levels, "weights_t.levels")?;
    Ok((s, t))
}

fn check_length(s: &WeightSchedule, levels: usize, path: &str) -> Result<(), ConfigError> {
    match s.len() {
        Some(n) if n < levels => Err(ConfigError::at(path, format!("has {n} entries but levels = {levels}"))),
        _ => Ok(()),
    }
}

fn schedule(w: &WeightSpec, path: &str, margin: f64) -> Result<WeightSchedule, ConfigError> {
    let given = [w.preset.is_some(), w.alpha.is_some() || w.beta.is_some(), w.levels.is_some()];
    match given.iter().filter(|&&g| g).count() {
        0 => return Err(ConfigError::at(path, "needs one of `preset`, `alpha`/`beta`, or `levels`")),
        1 => {}
        _ => return Err(ConfigError::at(path, "`preset`, `alpha`/`beta` and `levels` are mutually exclusive")),
    }
    if w.preset == Some(Preset::Chaikin) {
        return Ok(WeightSchedule::chaikin());
    }
    if let Some(levels) = &w.levels {
        if levels.is_empty() {
            return Err(ConfigError::at(format!("{path}.levels"), "is empty"));
        }
        let pairs = levels
            .iter()
            .enumerate()
            .map(|(k, p)| pair(p.alpha.clone(), p.beta.clone(), &format!("{path}.levels[{k}]"), margin))
            .collect::<Result<_, _>>()?;
        return Ok(WeightSchedule::PerLevel(pairs));
    }
    let alpha = w.alpha.clone().ok_or_else(|| ConfigError::at(format!("{path}.alpha"), "missing field `alpha`"))?;
    let beta = w.beta.clone().ok_or_else(|| ConfigError::at(format!("{path}.beta"), "missing field `beta`"))?;
    Ok(WeightSchedule::Constant(pair(alpha, beta, path, margin)?))
}

fn pair(alpha: Vec<f64>, beta: Vec<f64>, path: &str, margin: f64) -> Result<WeightPair, ConfigError> {
    WeightPair::new(alpha, beta, margin).map_err(|e| ConfigError::at(path, e.to_string()))
}

fn polyline(spec: &PointsSpec, base: &Path) -> Result<PolylineLevel, ConfigError> {
    let (points, file_params) = match (&spec.data, &spec.file) {
        (Some(d), None) => (d.clone(), None),
        (None, Some(f)) => {
            let path = base.join(f);
            crate::export::read_points_csv(&path).map_err(|e| ConfigError::at("points.file", e.to_string()))?
        }
        (None, None) => return Err(ConfigError::at("points", "needs `data` or `file`")),
        (Some(_), Some(_)) => return Err(ConfigError::at("points", "`data` and `file` are mutually exclusive")),
    };
    let params = match (&spec.params, file_params) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::at("points.params", "the points file already has a `u` column"))
        }
        (p, f) => p.clone().or(f),
    };
    let err = |e: cornercut::points::PointsError| {
        let path = if matches!(e, cornercut::points::PointsError::ParamCountMismatch { .. } | cornercut::points::PointsError::NonIncreasingParams(_)) {
            "points.params"
        } else if matches!(e, cornercut::points::PointsError::BadPeriod { .. }) {
            "points.period"
        } else {
            "points.data"
        };
        ConfigError::at(path, e.to_string())
    };
    match spec.topology {
        TopologySpec::Open => {
            if spec.period.is_some() {
                return Err(ConfigError::at("points.period", "only valid for closed polylines"));
            }
            match params {
                Some(u) => PolylineLevel::open_with_params(&points, u),
                None => PolylineLevel::open(&points),
            }
            .map_err(err)
        }
        TopologySpec::Closed => match (params, spec.period) {
            (Some(u), Some(p)) => PolylineLevel::closed_with_params(&points, u, p).map_err(err),
            (Some(_), None) => Err(ConfigError::at("points.period", "required with explicit params on a closed polyline")),
            (None, Some(p)) => {
                let u = (0..points.len()).map(|i| i as f64).collect();
                PolylineLevel::closed_with_params(&points, u, p).map_err(err)
            }
            (None, None) => PolylineLevel::closed(&points).map_err(err),
        },
    }
}

fn grid(spec: &NetSpec) -> Result<GridT, ConfigError> {
    let axis = |window: Option<[i64; 2]>, knots: &Option<Vec<f64>>, name: char| -> Result<Vec<f64>, ConfigError> {
        match (window, knots) {
            (Some([a, b]), None) => {
                if b <= a {
                    return Err(ConfigError::at(format!("net.{name}_window"), "needs start < end"));
                }
                Ok((a..=b).map(|i| i as f64).collect())
            }
            (None, Some(k)) => Ok(k.clone()),
            (None, None) => Err(ConfigError::at(format!("net.{name}_window"), format!("give `{name}_window` or `{name}_knots`"))),
            (Some(_), Some(_)) => Err(ConfigError::at(
                format!("net.{name}_knots"),
                format!("`{name}_window` and `{name}_knots` are mutually exclusive"),
            )),
        }
    };
    let s = axis(spec.s_window, &spec.s_knots, 's')?;
    let t = axis(spec.t_window, &spec.t_knots, 't')?;
    GridT::new(s, t).map_err(|e| {
        let path = if e.to_string().starts_with('s') { "net.s_knots" } else { "net.t_knots" };
        ConfigError::at(path, e.to_string())
    })
}

type InitialNet = (NetOfFunctions<f64>, String, Option<f64>);

fn initial_net(spec: &NetSpec, grid: GridT, base: &Path) -> Result<InitialNet, ConfigError> {
    match (&spec.function, &spec.file) {
        (Some(name), None) => {
            if spec.coefficients.is_some() && name != "polynomial" {
                return Err(ConfigError::at("net.coefficients", "only used by the `polynomial` function"));
            }
            let entry = registry::lookup(name, &grid, spec.coefficients.as_deref()).ok_or_else(|| {
                if name == "polynomial" {
                    ConfigError::at("net.coefficients", "required by the `polynomial` function")
                } else {
                    ConfigError::at("net.function", format!("unknown function `{name}`; known: {}", registry::NAMES.join(", ")))
                }
            })?;
            let f = entry.f.clone();
            let net = NetOfFunctions::from_function(grid, move |s, t| f(s, t))
                .map_err(|e| ConfigError::at("net", e.to_string()))?;
            Ok((net, entry.name.to_string(), Some(entry.bmsdd)))
        }
        (None, Some(file)) => {
            let path = base.join(file);
            let lines = crate::export::read_net_csv(&path).map_err(|e| ConfigError::at("net.file", e.to_string()))?;
            let build = |family: &str, count: usize| -> Result<Vec<UFunction<f64>>, ConfigError> {
                (0..count)
                    .map(|i| {
                        let (xs, vs) = lines.get(&(family.to_string(), i)).cloned().ok_or_else(|| {
                            ConfigError::at("net.file", format!("no samples for {family} line {i}"))
                        })?;
                        UFunction::piecewise_linear(xs, vs)
                            .map_err(|e| ConfigError::at("net.file", format!("{family} line {i}: {e}")))
                    })
                    .collect()
            };
            let phi = build("phi", grid.t_knots().len())?;
            let psi = build("psi", grid.s_knots().len())?;
            let net = NetOfFunctions::new(grid, phi, psi, 0).map_err(|e| ConfigError::at("net.file", e.to_string()))?;
            Ok((net, path.display().to_string(), None))
        }
        (None, None) => Err(ConfigError::at("net", "needs `function` or `file`")),
        (Some(_), Some(_)) => Err(ConfigError::at("net", "`function` and `file` are mutually exclusive")),
    }
}
