//! Scenario files: the JSON schema and a flat CSV form.
//!
//! ```json
//! {
//!   "firms": [
//!     [{ "kappa": 1.0, "target": 3.0 }, { "kappa": 3.0, "target": 5.0 }],
//!     [{ "kappa": 2.0, "target": 7.0, "nonstrategic_size": 5.0 }]
//!   ],
//!   "prior": [[0.6], [0.4]],
//!   "labels": ["a", "b", "c"]
//! }
//! ```

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bayes_exec_core::scenario::Violation;
use bayes_exec_core::{Error, FirmTypeSpec, Matrix, Scenario};
use serde::{Deserialize, Serialize};

use crate::output::fmt_f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    /// Type lists of firm 1 and firm 2.
    pub firms: Vec<Vec<FirmTypeSpec>>,
    /// Joint prior, one row per firm-1 type.
    pub prior: Vec<Vec<f64>>,
    /// Optional names for the stacked types (firm 1 first).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

fn invalid(field: &str, rule: String) -> Error {
    Error::InvalidScenario(vec![Violation {
        field: field.into(),
        rule,
    }])
}

impl ScenarioFile {
    pub fn to_scenario(&self) -> Result<Scenario, Error> {
        if self.firms.len() != 2 {
            return Err(invalid(
                "firms",
                format!("exactly two firms required, got {}", self.firms.len()),
            ));
        }
        let cols = self.prior.first().map_or(0, |r| r.len());
        if let Some(r) = self.prior.iter().position(|r| r.len() != cols) {
            return Err(invalid(
                &format!("prior[{r}]"),
                "rows must have equal length".into(),
            ));
        }
        let prior = if self.prior.is_empty() {
            Matrix::zeros(0, 0)
        } else {
            Matrix::from_rows(&self.prior)?
        };
        let scenario = Scenario::new(self.firms[0].clone(), self.firms[1].clone(), prior)?;
        if let Some(labels) = &self.labels {
            if labels.len() != scenario.dim() {
                return Err(invalid(
                    "labels",
                    format!("expected {} labels, got {}", scenario.dim(), labels.len()),
                ));
            }
        }
        Ok(scenario)
    }

    pub fn from_scenario(scenario: &Scenario, labels: Option<Vec<String>>) -> Self {
        ScenarioFile {
            firms: vec![scenario.firm1_types.clone(), scenario.firm2_types.clone()],
            prior: scenario.prior.to_rows(),
            labels,
        }
    }
}

/// Reads a scenario from a `.json` or `.csv` file.
pub fn load_scenario(path: &Path) -> Result<(Scenario, Option<Vec<String>>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let s = scenario_from_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
        return Ok((s, None));
    }
    let file: ScenarioFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let scenario = file
        .to_scenario()
        .with_context(|| format!("validating {}", path.display()))?;
    Ok((scenario, file.labels))
}

const CSV_HEADER: [&str; 9] = [
    "record",
    "firm",
    "index",
    "kappa",
    "target",
    "nonstrategic_size",
    "row",
    "col",
    "probability",
];

/// One line per type and one per prior entry, floats at 17 significant
/// digits so that parsing the text back gives the same scenario bit for bit.
pub fn scenario_to_csv(scenario: &Scenario) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for (firm, types) in [(1, &scenario.firm1_types), (2, &scenario.firm2_types)] {
        for (i, t) in types.iter().enumerate() {
            w.write_record([
                "type".to_string(),
                firm.to_string(),
                i.to_string(),
                fmt_f64(t.kappa),
                fmt_f64(t.target),
                fmt_f64(t.nonstrategic_size),
                String::new(),
                String::new(),
                String::new(),
            ])?;
        }
    }
    for r in 0..scenario.k() {
        for c in 0..scenario.m() {
            w.write_record([
                "prior".to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                r.to_string(),
                c.to_string(),
                fmt_f64(scenario.prior[(r, c)]),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn scenario_from_csv(text: &str) -> Result<Scenario> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    if rdr.headers()?.iter().ne(CSV_HEADER) {
        bail!("unexpected header, expected {}", CSV_HEADER.join(","));
    }
    let mut types: [Vec<(usize, FirmTypeSpec)>; 2] = [Vec::new(), Vec::new()];
    let mut entries = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| -> Result<&str> {
            rec.get(i)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| anyhow!("line {}: missing {}", line + 2, CSV_HEADER[i]))
        };
        let num = |i: usize| -> Result<f64> {
            field(i)?
                .parse()
                .with_context(|| format!("line {}: bad {}", line + 2, CSV_HEADER[i]))
        };
        let idx = |i: usize| -> Result<usize> {
            field(i)?
                .parse()
                .with_context(|| format!("line {}: bad {}", line + 2, CSV_HEADER[i]))
        };
        match field(0)? {
            "type" => {
                let firm = idx(1)?;
                if !(1..=2).contains(&firm) {
                    bail!("line {}: firm must be 1 or 2", line + 2);
                }
                let t = FirmTypeSpec::with_nonstrategic(num(3)?, num(4)?, num(5)?);
                types[firm - 1].push((idx(2)?, t));
            }
            "prior" => entries.push((idx(6)?, idx(7)?, num(8)?)),
            other => bail!("line {}: unknown record {other:?}", line + 2),
        }
    }
    let mut lists = Vec::new();
    for (f, list) in types.iter_mut().enumerate() {
        list.sort_by_key(|(i, _)| *i);
        if list.iter().enumerate().any(|(pos, (i, _))| pos != *i) {
            bail!("firm {} type indices must be 0..n without gaps", f + 1);
        }
        lists.push(list.iter().map(|(_, t)| *t).collect::<Vec<_>>());
    }
    let (k, m) = (lists[0].len(), lists[1].len());
    let mut prior = Matrix::zeros(k, m);
    let mut seen = vec![false; k * m];
    for (r, c, p) in entries {
        if r >= k || c >= m {
            bail!("prior entry ({r}, {c}) outside {k}x{m}");
        }
        if std::mem::replace(&mut seen[r * m + c], true) {
            bail!("prior entry ({r}, {c}) given twice");
        }
        prior[(r, c)] = p;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        bail!("prior entry ({}, {}) missing", i / m, i % m);
    }
    let f2 = lists.pop().unwrap_or_default();
    let f1 = lists.pop().unwrap_or_default();
    Ok(Scenario::new(f1, f2, prior)?)
}
