//! Delimited-text geometry files.
//!
//! Floats are written with `{:.16e}` (17 significant digits), which
//! round-trips every finite `f64`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cornercut::nets::{sample_grid, NetError, PiecewiseCoonsSurface};
use cornercut::points::PolylineLevel;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}, row {row}: {message}")]
    Format { path: String, row: usize, message: String },
    #[error(transparent)]
    Net(#[from] NetError),
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ExportError + '_ {
    move |source| ExportError::Csv {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &Path, row: usize, message: impl Into<String>) -> ExportError {
    ExportError::Format {
        path: path.display().to_string(),
        row,
        message: message.into(),
    }
}

fn parse_field(path: &Path, row: usize, field: &str) -> Result<f64, ExportError> {
    field
        .trim()
        .parse()
        .map_err(|_| format_err(path, row, format!("`{field}` is not a number")))
}

/// Reads a points file: a header row, then one point per row. A column
/// named `u` holds the parameters; every other column is a coordinate.
pub fn read_points_csv(path: &Path) -> Result<(Vec<Vec<f64>>, Option<Vec<f64>>), ExportError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err(path))?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let u_col = headers.iter().position(|h| h == "u");
    if headers.len() - usize::from(u_col.is_some()) == 0 {
        return Err(format_err(path, 1, "no coordinate columns"));
    }
    let mut points = Vec::new();
    let mut params = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let row = r + 2;
        let mut p = Vec::with_capacity(rec.len());
        for (c, field) in rec.iter().enumerate() {
            let v = parse_field(path, row, field)?;
            if Some(c) == u_col {
                params.push(v);
            } else {
                p.push(v);
            }
        }
        points.push(p);
    }
    Ok((points, u_col.map(|_| params)))
}

/// Lines of a net file keyed by `(family, index)`, samples sorted by `x`.
pub type NetLines = BTreeMap<(String, usize), (Vec<f64>, Vec<f64>)>;

/// Reads a net file with header `family,index,x,value`. `family` is `phi`
/// (line `t = t_index`, sampled in `s`) or `psi` (line `s = s_index`,
/// sampled in `t`).
pub fn read_net_csv(path: &Path) -> Result<NetLines, ExportError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err(path))?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["family", "index", "x", "value"] {
        return Err(format_err(path, 1, "header must be `family,index,x,value`"));
    }
    let mut raw: BTreeMap<(String, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let row = r + 2;
        let family = rec[0].to_string();
        if family != "phi" && family != "psi" {
            return Err(format_err(path, row, format!("family `{family}` is not `phi` or `psi`")));
        }
        let index: usize = rec[1]
            .parse()
            .map_err(|_| format_err(path, row, format!("index `{}` is not a non-negative integer", &rec[1])))?;
        let x = parse_field(path, row, &rec[2])?;
        let v = parse_field(path, row, &rec[3])?;
        raw.entry((family, index)).or_default().push((x, v));
    }
    Ok(raw
        .into_iter()
        .map(|(k, mut s)| {
            s.sort_by(|a, b| a.0.total_cmp(&b.0));
            (k, s.into_iter().unzip())
        })
        .collect())
}

fn create(path: &Path) -> Result<BufWriter<File>, ExportError> {
    let f = File::create(path).map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(BufWriter::new(f))
}

/// Writes `level,u,x1..xn`, one row per point.
pub fn write_polyline(path: &Path, level: &PolylineLevel) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["level".to_string(), "u".to_string()];
    header.extend((1..=level.dim()).map(|i| format!("x{i}")));
    w.write_record(&header).map_err(csv_err(path))?;
    for (p, &u) in level.points().zip(level.params()) {
        let mut row = vec![level.level().to_string(), fmt_f64(u)];
        row.extend(p.iter().map(|&x| fmt_f64(x)));
        w.write_record(&row).map_err(csv_err(path))?;
    }
    finish(path, w)
}

/// Writes `s,t,value` on a `samples x samples` lattice over the surface's
/// domain, `t` varying fastest.
pub fn write_surface(path: &Path, surface: &PiecewiseCoonsSurface<f64>, samples: usize) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["s", "t", "value"]).map_err(csv_err(path))?;
    let rect = surface.domain();
    for (s, t) in sample_grid(&rect, samples) {
        let v = surface.eval(s, t)?;
        w.write_record([fmt_f64(s), fmt_f64(t), fmt_f64(v)]).map_err(csv_err(path))?;
    }
    finish(path, w)
}

fn finish(path: &Path, w: csv::Writer<BufWriter<File>>) -> Result<(), ExportError> {
    let mut inner = w.into_inner().map_err(|e| ExportError::Io {
        path: path.display().to_string(),
        source: e.into_error(),
    })?;
    inner.flush().map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn points_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pts.csv");
        std::fs::write(&p, "x, y, u\n0, 0, 0\n1, 0.5, 2\n2, 1, 3\n").unwrap();
        let (pts, u) = read_points_csv(&p).unwrap();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![2.0, 1.0]]);
        assert_eq!(u, Some(vec![0.0, 2.0, 3.0]));

        std::fs::write(&p, "x\n1\nfoo\n").unwrap();
        let err = read_points_csv(&p).unwrap_err().to_string();
        assert!(err.contains("row 3"), "{err}");
    }

    #[test]
    fn net_file_lines_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("net.csv");
        std::fs::write(&p, "family,index,x,value\nphi,0,1,2\nphi,0,0,1\npsi,1,0,5\n").unwrap();
        let lines = read_net_csv(&p).unwrap();
        assert_eq!(lines[&("phi".to_string(), 0)], (vec![0.0, 1.0], vec![1.0, 2.0]));
        std::fs::write(&p, "family,index,x,value\nrho,0,1,2\n").unwrap();
        assert!(read_net_csv(&p).is_err());
    }
}
