//! Report assembly and writers.

use std::io::Write;

use duron_core::format::{fmt17, to_json17};
use serde_json::{json, Map, Value};

use crate::check::Check;
use crate::config::RunConfig;
use crate::suites::SuiteOutput;

/// Plot-ready numeric table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => fmt17(*x),
            Cell::Num(_) => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render))?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: Value,
    pub outputs: Vec<SuiteOutput>,
    pub runtime_ms: Option<u128>,
}

impl Report {
    pub fn new(cfg: &RunConfig, outputs: Vec<SuiteOutput>, runtime_ms: Option<u128>) -> Self {
        Self {
            config: cfg.to_json(),
            outputs,
            runtime_ms,
        }
    }

    pub fn checks(&self) -> impl Iterator<Item = (&'static str, &Check)> {
        self.outputs
            .iter()
            .flat_map(|o| o.checks.iter().map(move |c| (o.suite.name(), c)))
    }

    pub fn passed(&self) -> usize {
        self.checks().filter(|(_, c)| c.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.checks().filter(|(_, c)| !c.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }

    /// `suite/name` of every failing check.
    pub fn failures(&self) -> Vec<String> {
        self.checks()
            .filter(|(_, c)| !c.pass)
            .map(|(s, c)| format!("{s}/{}", c.name))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks()
            .map(|(suite, c)| {
                let mut row = Map::new();
                row.insert("suite".into(), json!(suite));
                if let Value::Object(fields) = c.to_json() {
                    row.extend(fields);
                }
                Value::Object(row)
            })
            .collect();
        let details: Map<String, Value> = self
            .outputs
            .iter()
            .map(|o| (o.suite.name().to_string(), Value::Object(o.details.clone())))
            .collect();
        json!({
            "config": self.config,
            "checks": checks,
            "details": details,
            "summary": {
                "passed": self.passed(),
                "failed": self.failed(),
                "runtime_ms": self.runtime_ms.map(|ms| ms as u64),
            },
        })
    }

    pub fn to_json_text(&self) -> String {
        to_json17(&self.to_json())
    }

    /// The check rows as a table, for `--format csv` runs without a data table of their own.
    pub fn checks_table(&self) -> Table {
        let mut t = Table::new(&[
            "suite",
            "name",
            "anchor",
            "value",
            "tolerance",
            "pass",
            "note",
        ]);
        for (suite, c) in self.checks() {
            let tol = match c.tolerance_json() {
                Value::Array(b) => b
                    .iter()
                    .map(|v| fmt17(v.as_f64().unwrap_or(f64::NAN)))
                    .collect::<Vec<_>>()
                    .join(":"),
                v => v.as_f64().map(fmt17).unwrap_or_default(),
            };
            t.push(vec![
                Cell::Text(suite.to_string()),
                Cell::Text(c.name.clone()),
                Cell::Text(c.anchor.to_string()),
                Cell::Num(c.value.unwrap_or(f64::NAN)),
                Cell::Text(tol),
                Cell::Text(c.pass.to_string()),
                Cell::Text(c.note.clone().unwrap_or_default()),
            ]);
        }
        t
    }

    /// Data tables produced by the suites, concatenated when their headers agree.
    pub fn data_table(&self) -> Option<Table> {
        let mut tables = self.outputs.iter().filter_map(|o| o.table.as_ref());
        let mut out = tables.next()?.clone();
        for t in tables {
            if t.header == out.header {
                out.rows.extend(t.rows.iter().cloned());
            }
        }
        Some(out)
    }
}
