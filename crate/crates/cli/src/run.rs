//! Runs a resolved [`Job`], writes its files and decides the exit code.

use std::path::{Path, PathBuf};
use std::time::Instant;

use cornercut::nets::{run_nets, NetError};
use cornercut::points::{run_points, sup_distance, PointsError, RunOptions};
use cornercut::weights::{certify, certify_nets, Certificate, WeightError, WeightSchedule};
use thiserror::Error;

use crate::config::{Common, ConfigError, Job, Mode};
use crate::export::{self, ExportError};
use crate::report::{
    CertificateReport, Check, Constant, ConstantKind, Measured, MeshSizes, Report, RunReport, Runtime,
};

/// Exit codes of the command line tool.
pub mod exit {
    /// Every bound check passed.
    pub const PASS: i32 = 0;
    /// At least one measured distance exceeded its bound.
    pub const VIOLATION: i32 = 1;
    /// The schedule is not certified and `force` was not given.
    pub const NOT_CERTIFIED: i32 = 2;
    /// Unreadable or invalid config, or an I/O failure.
    pub const CONFIG: i32 = 3;
    /// Bad command line usage.
    pub const USAGE: i32 = 64;
}

pub const DEFAULT_OUTPUT_DIR: &str = "cornercut-out";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error(transparent)]
    Points(#[from] PointsError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

/// Executes `job`. Geometry and `report.json` go to `out_dir` (certify
/// writes only the report, and only when a directory is given).
pub fn execute(job: Job, mode: Mode, out_dir: Option<&Path>) -> Result<Outcome, RunError> {
    let start = Instant::now();
    let mut outcome = match job {
        Job::Certify { points, nets } => certify_only(points, nets)?,
        Job::Points {
            common,
            initial,
            schedule,
        } => {
            let dir = prepare(out_dir)?;
            points_run(&common, initial, &schedule, &dir)?
        }
        Job::Net {
            common,
            net,
            source,
            s_schedule,
            t_schedule,
            options,
        } => {
            let dir = prepare(out_dir)?;
            let certificate = certify_nets(&s_schedule, &t_schedule)?;
            let mut cert = CertificateReport::new(&certificate);
            cert.mu_s_per_level = Some(certify(&s_schedule)?.mu_per_level);
            cert.mu_t_per_level = Some(certify(&t_schedule)?.mu_per_level);
            if !certificate.nets_convergent && !common.force {
                refused(cert)
            } else {
                net_run(&common, net, source, &s_schedule, &t_schedule, &options, cert, &dir)?
            }
        }
    };
    outcome.report.mode = mode.to_string();
    outcome.report.runtime.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let dir = match (mode, out_dir) {
        (Mode::Certify, None) => None,
        (_, d) => Some(d.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))),
    };
    if let Some(dir) = dir {
        let path = dir.join("report.json");
        std::fs::write(&path, outcome.report.to_json() + "\n").map_err(|source| RunError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(outcome)
}

fn prepare(out_dir: Option<&Path>) -> Result<PathBuf, RunError> {
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    std::fs::create_dir_all(&dir).map_err(|source| RunError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    Ok(dir)
}

fn report(certificate: CertificateReport, run: Option<RunReport>, all_pass: bool) -> Report {
    Report {
        tool: "cornercut",
        version: env!("CARGO_PKG_VERSION"),
        mode: String::new(),
        certificate,
        run,
        all_pass,
        runtime: Runtime {
            elapsed_ms: 0.0,
            cached_points: None,
        },
    }
}

fn refused(cert: CertificateReport) -> Outcome {
    Outcome {
        report: report(cert, None, false),
        exit_code: exit::NOT_CERTIFIED,
    }
}

fn certify_only(
    points: Option<WeightSchedule>,
    nets: Option<(WeightSchedule, WeightSchedule)>,
) -> Result<Outcome, RunError> {
    let (cert, ok) = match (points, nets) {
        (Some(s), _) => {
            let c = certify(&s)?;
            (CertificateReport::new(&c), c.points_convergent)
        }
        (None, Some((s, t))) => {
            let c = certify_nets(&s, &t)?;
            let mut r = CertificateReport::new(&c);
            r.mu_s_per_level = Some(certify(&s)?.mu_per_level);
            r.mu_t_per_level = Some(certify(&t)?.mu_per_level);
            (r, c.nets_convergent)
        }
        (None, None) => unreachable!("resolve always yields a schedule"),
    };
    Ok(Outcome {
        report: report(cert, None, ok),
        exit_code: if ok { exit::PASS } else { exit::NOT_CERTIFIED },
    })
}

fn check(name: &'static str, level: usize, measured: f64, bound: f64, common: &Common) -> Check {
    let bound = bound * common.bound_scale;
    Check {
        name,
        level,
        measured,
        bound,
        pass: measured <= bound + common.check_abs,
    }
}

fn finish(cert: CertificateReport, run: RunReport, cached_points: Option<usize>) -> Outcome {
    let all_pass = run.checks.iter().all(|c| c.pass);
    let mut r = report(cert, Some(run), all_pass);
    r.runtime.cached_points = cached_points;
    Outcome {
        report: r,
        exit_code: if all_pass { exit::PASS } else { exit::VIOLATION },
    }
}

fn points_run(
    common: &Common,
    initial: cornercut::points::PolylineLevel,
    schedule: &WeightSchedule,
    dir: &Path,
) -> Result<Outcome, RunError> {
    let certificate: Certificate = certify(schedule)?;
    let cert = CertificateReport::new(&certificate);
    if !certificate.points_convergent && !common.force {
        return Ok(refused(cert));
    }
    let k_max = common.levels;
    let run = run_points(initial, schedule, k_max, RunOptions { force: common.force })?;
    let bounds_omitted = !certificate.points_convergent;

    let mut measured = Vec::with_capacity(k_max);
    let mut checks = Vec::new();
    for k in 0..k_max {
        let d = run.successive_sup_distance(k, common.samples)?;
        measured.push(Measured {
            from: k,
            to: k + 1,
            distance: d,
        });
        if !bounds_omitted {
            checks.push(check("successive", k, d, run.successive_bound(k)?, common));
        }
    }
    if !bounds_omitted {
        for k in 0..k_max {
            let d = sup_distance(&run.levels[k], &run.levels[k_max], common.samples)?;
            checks.push(check("tail", k, d, run.tail_bounds[k], common));
        }
    }

    let mut files = Vec::new();
    for level in &run.levels {
        let name = format!("points_level_{}.csv", level.level());
        export::write_polyline(&dir.join(&name), level)?;
        files.push(name);
    }
    export::write_polyline(&dir.join("points_final.csv"), &run.levels[k_max])?;
    files.push("points_final.csv".into());

    let run_report = RunReport {
        levels: k_max,
        source: "points".into(),
        forced: common.force,
        bounds_omitted,
        mesh_sizes: MeshSizes::Points(run.mesh_sizes()),
        constant: Constant {
            name: "lipschitz",
            value: run.lipschitz_l,
            kind: ConstantKind::Exact,
        },
        measured,
        checks,
        approximations: Vec::new(),
        files,
    };
    Ok(finish(cert, run_report, None))
}

#[allow(clippy::too_many_arguments)]
fn net_run(
    common: &Common,
    net: cornercut::nets::NetOfFunctions<f64>,
    source: String,
    s_schedule: &WeightSchedule,
    t_schedule: &WeightSchedule,
    options: &cornercut::nets::NetRunOptions,
    cert: CertificateReport,
    dir: &Path,
) -> Result<Outcome, RunError> {
    let k_max = common.levels;
    let run = run_nets(net, s_schedule, t_schedule, k_max, options)?;
    let bounds_omitted = !run.certificate.nets_convergent;

    let mut measured = Vec::with_capacity(k_max);
    let mut checks = Vec::new();
    for k in 0..k_max {
        let d = run.successive_distance(k, common.samples)?;
        measured.push(Measured {
            from: k,
            to: k + 1,
            distance: d,
        });
        if !bounds_omitted {
            checks.push(check("successive", k, d, run.successive_bound(k)?, common));
            checks.push(check("tail", k, d, run.tail_bounds[k], common));
        }
    }

    export::write_surface(&dir.join("surface_first.csv"), &run.surfaces[0], common.samples)?;
    export::write_surface(&dir.join("surface_last.csv"), &run.surfaces[k_max], common.samples)?;

    let mut approximations = Vec::new();
    if let Some(m) = options.resample {
        approximations.push(format!(
            "resample: u-functions of levels 1..{k_max} replaced by piecewise-linear interpolants with {m} pieces per cell"
        ));
    }
    let cached = run.surfaces.iter().map(|s| s.cached_points()).sum();
    let run_report = RunReport {
        levels: k_max,
        source,
        forced: common.force,
        bounds_omitted,
        mesh_sizes: MeshSizes::Net(run.mesh_sizes().into_iter().map(|(a, b)| [a, b]).collect()),
        constant: Constant {
            name: "bmsdd",
            value: run.bmsdd_l,
            kind: if run.bmsdd_exact {
                ConstantKind::Exact
            } else {
                ConstantKind::Estimated
            },
        },
        measured,
        checks,
        approximations,
        files: vec!["surface_first.csv".into(), "surface_last.csv".into()],
    };
    Ok(finish(cert, run_report, Some(cached)))
}
