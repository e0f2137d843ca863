//! The JSON run report.

use cornercut::weights::{Certificate, NET_THRESHOLD};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: String,
    pub certificate: CertificateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunReport>,
    /// `true` when every check passed (vacuously so when there are none).
    pub all_pass: bool,
    pub runtime: Runtime,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    /// `mu` per schedule level (one entry for a constant schedule). For
    /// nets this is the larger of the two directions.
    pub mu_per_level: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_s_per_level: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_t_per_level: Option<Vec<f64>>,
    pub mu_sup: f64,
    pub threshold_points: f64,
    pub threshold_nets: f64,
    pub points_convergent: bool,
    pub nets_convergent: bool,
    /// Smallest of all `alpha_i`, `1 - beta_i`, `beta_i - alpha_i`.
    pub smallest_class_quantity: f64,
}

impl CertificateReport {
    pub fn new(c: &Certificate) -> Self {
        Self {
            mu_per_level: c.mu_per_level.clone(),
            mu_s_per_level: None,
            mu_t_per_level: None,
            mu_sup: c.mu_sup,
            threshold_points: 1.0,
            threshold_nets: NET_THRESHOLD,
            points_convergent: c.points_convergent,
            nets_convergent: c.nets_convergent,
            smallest_class_quantity: c.margin,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub levels: usize,
    pub source: String,
    pub forced: bool,
    /// Set for forced runs past the certificate: no bound applies, so only
    /// measurements are reported.
    pub bounds_omitted: bool,
    pub mesh_sizes: MeshSizes,
    pub constant: Constant,
    pub measured: Vec<Measured>,
    pub checks: Vec<Check>,
    /// Semantic approximations made by the run, if any.
    pub approximations: Vec<String>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum MeshSizes {
    /// `d^(k)` per level.
    Points(Vec<f64>),
    /// `[h_s^(k), h_t^(k)]` per level.
    Net(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantKind {
    Exact,
    Estimated,
}

#[derive(Debug, Clone, Serialize)]
pub struct Constant {
    /// `lipschitz` or `bmsdd`.
    pub name: &'static str,
    pub value: f64,
    pub kind: ConstantKind,
}

/// Sampled sup distance between the interpolants of two levels.
#[derive(Debug, Clone, Serialize)]
pub struct Measured {
    pub from: usize,
    pub to: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    /// `successive`: levels `k` and `k + 1` against the one-step bound.
    /// `tail`: levels `k` and `K` (points) or `k` and `k + 1` (nets)
    /// against the geometric tail bound.
    pub name: &'static str,
    pub level: usize,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Runtime {
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cached_points: Option<usize>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
