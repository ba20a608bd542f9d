//! Deterministic emission of result tables. CSV carries a versioned schema
//! comment line; floats are printed with 17 significant digits so identical
//! configs yield byte-identical files.

use serde::Serialize;

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A plain numeric table with named columns.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            schema: format!("mechanical-bloch v1 {command}"),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {}\n", self.schema));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialization cannot fail");
        s.push('\n');
        s
    }
}

/// Cross-layer comparison report (JSON only).
#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub schema: String,
    pub amplitude_ratios: Vec<f64>,
    pub max_population_discrepancy: Vec<f64>,
    pub monotonic_increasing: bool,
}

impl CompareReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}
