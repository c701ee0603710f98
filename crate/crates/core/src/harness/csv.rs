//! Trajectory CSV: `t, j, mode, <value columns>`, floats in `{:.16e}`.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: f64,
    pub j: usize,
    pub mode: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    /// Names of the value columns after `t, j, mode`.
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl TrajectoryTable {
    pub fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, j: usize, mode: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.columns.len() {
            return Err(Error::Dimension(format!(
                "row has {} values for {} columns",
                values.len(),
                self.columns.len()
            )));
        }
        self.rows.push(Row {
            t,
            j,
            mode: mode.into(),
            values,
        });
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,j,mode");
        for c in &self.columns {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{},{}", format_float(r.t), r.j, r.mode);
            for v in &r.values {
                s.push(',');
                s.push_str(&format_float(*v));
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::InvalidArgument("empty CSV".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 3 || cols[..3] != ["t", "j", "mode"] {
            return Err(Error::InvalidArgument(format!("unexpected CSV header `{header}`")));
        }
        let mut table = Self::new(cols[3..].iter().copied());
        for (n, line) in lines.enumerate() {
            let bad = |what: &str| Error::InvalidArgument(format!("CSV line {}: {what}", n + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != cols.len() {
                return Err(bad("wrong number of fields"));
            }
            let t = f[0].parse().map_err(|_| bad("bad time"))?;
            let j = f[1].parse().map_err(|_| bad("bad jump count"))?;
            let values = f[3..]
                .iter()
                .map(|v| v.parse::<f64>().map_err(|_| bad("bad value")))
                .collect::<Result<Vec<_>>>()?;
            table.push(t, j, f[2], values)?;
        }
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text)
    }
}
