//! CSV time series and legacy VTK particle snapshots.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces the values bitwise.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::{ConservationReport, ProbeSeries, Snapshot};
use crate::{Error, Result, Vec3};

/// A named-column time series.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSeries {
    /// Column names after `time`.
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvSeries {
    pub fn from_probe(probe: &ProbeSeries) -> Self {
        Self {
            columns: vec!["x".into(), "y".into(), "z".into()],
            times: probe.times.clone(),
            rows: probe.values.iter().map(|v| vec![v.x, v.y, v.z]).collect(),
        }
    }

    pub fn from_conservation(samples: &[(f64, ConservationReport)]) -> Self {
        let columns = ["mass", "momentum_x", "momentum_y", "momentum_z", "kinetic", "strain", "mechanical"];
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            times: samples.iter().map(|s| s.0).collect(),
            rows: samples
                .iter()
                .map(|(_, r)| {
                    vec![
                        r.mass,
                        r.momentum.x,
                        r.momentum.y,
                        r.momentum.z,
                        r.kinetic_energy,
                        r.strain_energy,
                        r.mechanical_energy(),
                    ]
                })
                .collect(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{other:?}"))),
    }
}

pub fn write_csv_series(series: &CsvSeries, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["time".to_string()];
    header.extend(series.columns.iter().cloned());
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for (t, row) in series.times.iter().zip(&series.rows) {
        let record = std::iter::once(t).chain(row).map(|v| v.to_string());
        w.write_record(record).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv_series(path: &Path) -> Result<CsvSeries> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    let bad = |msg: String| Error::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg));
    if header.get(0) != Some("time") {
        return Err(bad("first column must be `time`".into()));
    }
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut series = CsvSeries {
        columns,
        times: Vec::new(),
        rows: Vec::new(),
    };
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let values = record
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", line + 2)))?;
        series.times.push(values[0]);
        series.rows.push(values[1..].to_vec());
    }
    Ok(series)
}

pub fn write_probe_csv(probe: &ProbeSeries, path: &Path) -> Result<()> {
    write_csv_series(&CsvSeries::from_probe(probe), path)
}

pub fn write_conservation_csv(samples: &[(f64, ConservationReport)], path: &Path) -> Result<()> {
    write_csv_series(&CsvSeries::from_conservation(samples), path)
}

fn push_vectors(out: &mut String, name: &str, values: &[Vec3]) {
    let _ = writeln!(out, "VECTORS {name} double");
    for v in values {
        let _ = writeln!(out, "{} {} {}", v.x, v.y, v.z);
    }
}

fn push_scalars(out: &mut String, name: &str, values: &[f64]) {
    let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
    for v in values {
        let _ = writeln!(out, "{v}");
    }
}

/// Legacy VTK text for a snapshot: POLYDATA with one vertex cell per particle.
pub fn vtk_snapshot_string(snapshot: &Snapshot) -> String {
    let n = snapshot.len();
    let mut out = String::with_capacity(n * 160 + 256);
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "tlsph particles t={}", snapshot.time);
    let _ = writeln!(out, "ASCII\nDATASET POLYDATA");
    let _ = writeln!(out, "POINTS {n} double");
    for p in &snapshot.positions {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    let _ = writeln!(out, "VERTICES {n} {}", 2 * n);
    for i in 0..n {
        let _ = writeln!(out, "1 {i}");
    }
    let _ = writeln!(out, "POINT_DATA {n}");
    push_vectors(&mut out, "velocity", &snapshot.velocities);
    push_vectors(&mut out, "displacement", &snapshot.displacements);
    push_scalars(&mut out, "von_mises", &snapshot.von_mises);
    push_scalars(&mut out, "det_f", &snapshot.det_f);
    out
}

pub fn write_vtk_snapshot(snapshot: &Snapshot, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(vtk_snapshot_string(snapshot).as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
