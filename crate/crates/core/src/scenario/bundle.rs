//! Run results and their on-disk form.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::{ParamEcho, ScenarioKind};
use crate::error::{Error, Result};
use crate::network::Trajectory;
use crate::quantum::WignerGrid;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown output format `{other}` (expected csv or json)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WignerSnapshot {
    pub subsystem: String,
    /// Requested time, used in the file name.
    pub requested: f64,
    /// Grid time the state was taken at.
    pub time: f64,
    pub grid: WignerGrid,
}

/// A plain numeric table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct ResultBundle {
    pub scenario: ScenarioKind,
    pub trajectory: Option<Trajectory>,
    pub summary: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    pub echo: ParamEcho,
    pub wigners: Vec<WignerSnapshot>,
    /// Extra tables, written as `<name>.csv`.
    pub tables: Vec<(String, Table)>,
    /// Nested runs, written to subdirectories.
    pub children: Vec<(String, ResultBundle)>,
}

impl ResultBundle {
    pub fn new(scenario: ScenarioKind, echo: ParamEcho) -> Self {
        Self {
            scenario,
            trajectory: None,
            summary: BTreeMap::new(),
            warnings: Vec::new(),
            echo,
            wigners: Vec::new(),
            tables: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn scalar(&self, key: &str) -> Option<f64> {
        self.summary.get(key).and_then(Value::as_f64)
    }

    pub fn summary_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("scenario".into(), json!(self.scenario.name()));
        map.insert("warnings".into(), json!(self.warnings));
        for (k, v) in &self.summary {
            map.insert(k.clone(), v.clone());
        }
        if !self.wigners.is_empty() {
            let w: Vec<Value> = self
                .wigners
                .iter()
                .map(|s| json!({ "subsystem": s.subsystem, "requested": s.requested, "time": s.time, "integral": s.grid.integral() }))
                .collect();
            map.insert("wigner".into(), Value::Array(w));
        }
        Value::Object(map)
    }

    /// Writes every output file into `dir` (created if needed) and returns
    /// the paths written.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if let Some(traj) = &self.trajectory {
            let path = match format {
                OutputFormat::Csv => dir.join("trajectory.csv"),
                OutputFormat::Json => dir.join("trajectory.json"),
            };
            let text = match format {
                OutputFormat::Csv => trajectory_csv(traj),
                OutputFormat::Json => trajectory_json(traj)?,
            };
            fs::write(&path, text)?;
            written.push(path);
        }
        let summary = dir.join("summary.json");
        fs::write(&summary, pretty(&self.summary_json())?)?;
        written.push(summary);
        let echo = dir.join("params_echo.json");
        fs::write(&echo, pretty(&serde_json::to_value(&self.echo)?)?)?;
        written.push(echo);
        for w in &self.wigners {
            let path = dir.join(format!("wigner_{}_{}.csv", w.subsystem, time_label(w.requested)));
            fs::write(&path, wigner_csv(&w.grid))?;
            written.push(path);
        }
        for (name, table) in &self.tables {
            let path = dir.join(format!("{name}.csv"));
            fs::write(&path, table_csv(table))?;
            written.push(path);
        }
        for (name, child) in &self.children {
            written.extend(child.write(&dir.join(name), format)?);
        }
        Ok(written)
    }
}

/// 17 significant digits: enough to round-trip every `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Shortest decimal form of a time for file names (`0.39`, `1`).
pub fn time_label(t: f64) -> String {
    let s = format!("{t}");
    s.replace('-', "m")
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn join_row(cells: impl Iterator<Item = String>) -> String {
    let mut line = cells.collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = join_row(std::iter::once("t".to_string()).chain(traj.names().map(str::to_string)));
    for (i, t) in traj.times.iter().enumerate() {
        let cells = std::iter::once(format_float(*t)).chain(traj.columns.iter().map(|(_, c)| format_float(c[i])));
        out.push_str(&join_row(cells));
    }
    out
}

fn trajectory_json(traj: &Trajectory) -> Result<String> {
    let mut map = serde_json::Map::new();
    map.insert("t".into(), json!(traj.times));
    for (name, col) in &traj.columns {
        map.insert(name.clone(), json!(col));
    }
    pretty(&Value::Object(map))
}

/// Parses a CSV written by [`trajectory_csv`].
pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| Error::Config("empty trajectory file".into()))?.split(',').collect();
    if header.first() != Some(&"t") {
        return Err(Error::Config("trajectory header must start with `t`".into()));
    }
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for line in lines {
        for (c, cell) in cols.iter_mut().zip(line.split(',')) {
            c.push(cell.parse::<f64>().map_err(|e| Error::Config(format!("bad number `{cell}`: {e}")))?);
        }
    }
    let mut traj = Trajectory { times: cols.remove(0), ..Default::default() };
    for (name, col) in header[1..].iter().zip(cols) {
        traj.push_column(*name, col)?;
    }
    Ok(traj)
}

pub fn wigner_csv(grid: &WignerGrid) -> String {
    let head = std::iter::once("p\\x".to_string()).chain(grid.x_values.iter().map(|&x| format_float(x)));
    let mut out = join_row(head);
    for (ip, &p) in grid.p_values.iter().enumerate() {
        let cells = std::iter::once(format_float(p)).chain((0..grid.x_values.len()).map(|ix| format_float(grid.at(ix, ip))));
        out.push_str(&join_row(cells));
    }
    out
}

pub fn table_csv(table: &Table) -> String {
    let mut out = join_row(table.headers.iter().cloned());
    for row in &table.rows {
        out.push_str(&join_row(row.iter().map(|&v| format_float(v))));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Trajectory {
        let mut t = Trajectory { times: vec![0.0, 0.5, 1.0], ..Default::default() };
        t.push_column("pop_e", vec![1.0, 0.1 + 0.2, std::f64::consts::PI]).unwrap();
        t.push_column("n_a", vec![0.0, 1e-300, -2.5e-17]).unwrap();
        t
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        let text = trajectory_csv(&t);
        assert!(text.starts_with("t,pop_e,n_a\n"));
        let back = parse_trajectory_csv(&text).unwrap();
        assert_eq!(back.times, t.times);
        assert_eq!(back.columns, t.columns);
    }

    #[test]
    fn labels_and_formats() {
        assert_eq!(time_label(0.39), "0.39");
        assert_eq!(time_label(1.0), "1");
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("xml".parse::<OutputFormat>().is_err());
    }

    #[test]
    fn writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = ResultBundle::new(ScenarioKind::SingleNodeSwap, ParamEcho::default());
        b.trajectory = Some(sample());
        b.set("F1", 0.5);
        b.tables.push(("rows".into(), Table { headers: vec!["a".into()], rows: vec![vec![1.0]] }));
        let mut child = ResultBundle::new(ScenarioKind::TwoNodeTransfer, ParamEcho::default());
        child.set("x", 1.0);
        b.children.push(("point_0".into(), child));
        let files = b.write(dir.path(), OutputFormat::Csv).unwrap();
        assert_eq!(files.len(), 6);
        let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["F1"], 0.5);
        assert_eq!(summary["scenario"], "single_node_swap");
        assert!(dir.path().join("point_0/summary.json").exists());

        let json_dir = tempfile::tempdir().unwrap();
        b.write(json_dir.path(), OutputFormat::Json).unwrap();
        let traj: Value = serde_json::from_str(&fs::read_to_string(json_dir.path().join("trajectory.json")).unwrap()).unwrap();
        assert_eq!(traj["pop_e"][2], std::f64::consts::PI);
    }

    proptest! {
        #[test]
        fn float_format_round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }
}
