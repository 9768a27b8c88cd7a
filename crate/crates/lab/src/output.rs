//! Artifact writing: atomic files, CSV tables and report serialization.

use std::fs;
use std::io::Write;
use std::path::Path;

use nonexp_core::bounds::BoundReport;
use serde_json::{json, Map, Value};

use crate::error::{LabError, Result};

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| LabError::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        })
        .and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(LabError::io(path, e));
    }
    Ok(())
}

/// Shortest decimal that parses back to the same `f64`; scientific notation
/// outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// In-memory CSV table with a fixed header.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: impl IntoIterator<Item = f64>) {
        self.push(row.into_iter().map(fmt_f64).collect());
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory write")
    }

    /// One JSON object per row; numeric cells are emitted as numbers.
    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for r in &self.rows {
            let obj: Map<String, Value> = self
                .header
                .iter()
                .zip(r)
                .map(|(k, v)| {
                    let v = v
                        .parse::<f64>()
                        .ok()
                        .and_then(serde_json::Number::from_f64)
                        .map_or_else(|| Value::String(v.clone()), Value::Number);
                    (k.clone(), v)
                })
                .collect();
            serde_json::to_writer(&mut out, &obj).expect("in-memory write");
            out.push(b'\n');
        }
        out
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(fmt_f64(x)), Value::Number)
}

pub fn context_json(r: &BoundReport) -> Value {
    let c = &r.context;
    let params: Map<String, Value> = c.params.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    json!({
        "scenario": c.scenario,
        "operator": c.operator,
        "norm": c.norm.name(),
        "label": c.label,
        "params": params,
        "note": c.note,
    })
}

pub fn report_json(r: &BoundReport) -> Value {
    json!({
        "check": r.check.name(),
        "lhs": num(r.lhs),
        "rhs": num(r.rhs),
        "slack": num(r.slack),
        "tol_budget": num(r.tol_budget),
        "verdict": r.verdict.name(),
        "context": context_json(r),
    })
}

pub fn reports_jsonl(reports: &[BoundReport]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in reports {
        serde_json::to_writer(&mut out, &report_json(r)).expect("in-memory write");
        out.push(b'\n');
    }
    out
}

pub fn reports_table(reports: &[BoundReport]) -> Table {
    let mut t = Table::new(["check", "lhs", "rhs", "slack", "tol_budget", "verdict", "context"]);
    for r in reports {
        t.push(vec![
            r.check.name().into(),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.slack),
            fmt_f64(r.tol_budget),
            r.verdict.name().into(),
            context_json(r).to_string(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_roundtrip() {
        for x in [
            0.0,
            1.0,
            -0.1,
            1.0 / 3.0,
            1e-300,
            6.02e23,
            123456.789,
            f64::MIN_POSITIVE,
            2e-5,
        ] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x, "{}", fmt_f64(x));
        }
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(1e-9), "1e-9");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn csv_quotes_context() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "{\"x\":1,\"y\":2}".into()]);
        let text = String::from_utf8(t.to_csv()).unwrap();
        assert_eq!(text, "a,b\n1,\"{\"\"x\"\":1,\"\"y\"\":2}\"\n");
    }
}
