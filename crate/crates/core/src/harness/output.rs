//! Result records and the files a run writes.
//!
//! Every CSV starts with a `# spec_hash=<hex>` comment line followed by a
//! header row. Numbers use Rust's shortest round-trip formatting, so the same
//! run always produces the same bytes.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use super::{ExperimentKind, ExperimentSpec, HarnessError};
use crate::correction::ImiMatrix;

/// One Monte Carlo trial. Estimate-dependent fields are empty when the
/// estimator failed; `error` then holds the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub kind: ExperimentKind,
    /// Pose index for pose sweeps, sweep-value index for P and Q sweeps.
    pub point: usize,
    pub pose: usize,
    pub trial: usize,
    pub seed: u64,
    pub p: usize,
    pub q: usize,
    pub u: usize,
    pub theta_true_deg: f64,
    pub phi_true_deg: f64,
    pub theta_est_deg: Option<f64>,
    pub phi_est_deg: Option<f64>,
    pub theta_err_deg: Option<f64>,
    pub phi_err_deg: Option<f64>,
    pub sir_before_db: f64,
    pub sir_after_db: Option<f64>,
    pub sir_after_true_db: f64,
    pub sir_gain_db: Option<f64>,
    pub capacity_before: f64,
    pub capacity_after: Option<f64>,
    pub capacity_after_true: f64,
    pub capacity_ratio: Option<f64>,
    pub residual_loss: Option<f64>,
    pub error: Option<String>,
}

impl ResultRow {
    pub const HEADER: [&'static str; 25] = [
        "kind",
        "point",
        "pose",
        "trial",
        "seed",
        "p",
        "q",
        "u",
        "theta_true_deg",
        "phi_true_deg",
        "theta_est_deg",
        "phi_est_deg",
        "theta_err_deg",
        "phi_err_deg",
        "sir_before_db",
        "sir_after_db",
        "sir_after_true_db",
        "sir_gain_db",
        "capacity_before",
        "capacity_after",
        "capacity_after_true",
        "capacity_ratio",
        "residual_loss",
        "error",
        "ok",
    ];

    fn record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        vec![
            self.kind.name().to_string(),
            self.point.to_string(),
            self.pose.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
            self.p.to_string(),
            self.q.to_string(),
            self.u.to_string(),
            num(self.theta_true_deg),
            num(self.phi_true_deg),
            opt(self.theta_est_deg),
            opt(self.phi_est_deg),
            opt(self.theta_err_deg),
            opt(self.phi_err_deg),
            num(self.sir_before_db),
            opt(self.sir_after_db),
            num(self.sir_after_true_db),
            opt(self.sir_gain_db),
            num(self.capacity_before),
            opt(self.capacity_after),
            num(self.capacity_after_true),
            opt(self.capacity_ratio),
            opt(self.residual_loss),
            self.error.clone().unwrap_or_default(),
            self.error.is_none().to_string(),
        ]
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Plot data: one (x, y) series written as a two-column CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(name: &str, x_label: &str, y_label: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            points,
        }
    }
}

/// A small named table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| num(*v)).collect());
    }
}

/// Everything a run produces, before it touches the file system.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub kind: ExperimentKind,
    pub spec_hash: String,
    pub rows: Vec<ResultRow>,
    /// Extra summary fields; the writer adds kind, hash, seed and counts.
    pub summary: Map<String, Value>,
    pub curves: Vec<Curve>,
    pub tables: Vec<Table>,
    pub imi: Vec<(String, ImiMatrix)>,
}

impl ExperimentOutput {
    pub fn new(spec: &ExperimentSpec) -> Self {
        Self {
            kind: spec.kind,
            spec_hash: spec_hash(spec),
            rows: Vec::new(),
            summary: Map::new(),
            curves: Vec::new(),
            tables: Vec::new(),
            imi: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.summary.insert(key.to_string(), v);
    }

    /// Summary number by key, if present.
    pub fn summary_f64(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    pub fn curve(&self, name: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn imi_matrix(&self, name: &str) -> Option<&ImiMatrix> {
        self.imi.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    /// The full summary document as written to `summary.json`.
    pub fn summary_json(&self, spec: &ExperimentSpec) -> Value {
        let mut doc = self.summary.clone();
        doc.insert("kind".into(), Value::from(self.kind.name()));
        doc.insert("spec_hash".into(), Value::from(self.spec_hash.clone()));
        doc.insert("seed".into(), Value::from(spec.seed));
        doc.insert("trials".into(), Value::from(spec.trials));
        doc.insert("model".into(), serde_json::to_value(spec.model).unwrap_or(Value::Null));
        doc.insert("snr_db".into(), spec.snr_db.map(Value::from).unwrap_or(Value::Null));
        doc.insert("rows".into(), Value::from(self.rows.len()));
        let failures = self.rows.iter().filter(|r| r.error.is_some()).count();
        doc.insert("failures".into(), Value::from(failures));
        Value::Object(doc)
    }

    /// Writes `results.csv`, `summary.json` and one CSV per curve, table and
    /// IMI matrix into `dir`, creating it if needed.
    pub fn write(&self, spec: &ExperimentSpec, dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;

        let mut rows = Table::new("results", &ResultRow::HEADER);
        rows.rows = self.rows.iter().map(ResultRow::record).collect();
        self.write_table(dir, &rows)?;

        let mut summary = serde_json::to_string_pretty(&self.summary_json(spec))
            .map_err(|e| HarnessError::Runtime(crate::Error::InvalidArgument(e.to_string())))?;
        summary.push('\n');
        write_file(&dir.join("summary.json"), summary.as_bytes())?;

        for curve in &self.curves {
            let mut t = Table::new(&curve.name, &[&curve.x_label, &curve.y_label]);
            for &(x, y) in &curve.points {
                t.push_numbers(&[x, y]);
            }
            self.write_table(dir, &t)?;
        }
        for table in &self.tables {
            self.write_table(dir, table)?;
        }
        for (name, m) in &self.imi {
            let text = format!("# spec_hash={}\n{}", self.spec_hash, m.to_csv());
            write_file(&dir.join(format!("{name}.csv")), text.as_bytes())?;
        }
        Ok(())
    }

    fn write_table(&self, dir: &Path, table: &Table) -> Result<(), HarnessError> {
        let mut buf = format!("# spec_hash={}\n", self.spec_hash).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let map = |e: csv::Error| HarnessError::Io(format!("{}: {e}", table.name));
            w.write_record(&table.header).map_err(map)?;
            for row in &table.rows {
                w.write_record(row).map_err(map)?;
            }
            w.flush().map_err(|e| HarnessError::Io(e.to_string()))?;
        }
        write_file(&dir.join(format!("{}.csv", table.name)), &buf)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

/// Hex SHA-256 of the resolved spec's JSON form.
pub fn spec_hash(spec: &ExperimentSpec) -> String {
    let json = serde_json::to_vec(spec).expect("spec is plain data");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}
