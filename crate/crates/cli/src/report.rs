//! Row types and the three output encodings.

use std::fmt::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// One state's line in an `analyze` or `approx` report. The totals line has
/// no index.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    pub state: String,
    pub weight: f64,
    pub weight_normalised: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_normalised: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_influence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss_integral: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jagcom: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub be_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval_hi: Option<f64>,
}

impl ReportRow {
    fn fields(&self) -> [(&'static str, Option<f64>); 11] {
        [
            ("weight", Some(self.weight)),
            ("weight_normalised", Some(self.weight_normalised)),
            ("beta", self.beta),
            ("beta_normalised", self.beta_normalised),
            ("ratio", self.ratio),
            ("total_influence", self.total_influence),
            ("gauss_integral", self.gauss_integral),
            ("jagcom", self.jagcom),
            ("be_bound", self.be_bound),
            ("interval_lo", self.interval_lo),
            ("interval_hi", self.interval_hi),
        ]
    }

    fn field(&self, name: &str) -> Option<f64> {
        self.fields().into_iter().find(|f| f.0 == name).and_then(|f| f.1)
    }
}

/// Full-precision decimal: 17 significant digits, enough to recover the `f64`.
pub fn lossless(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with the columns present in the first row; absent values are empty.
pub fn csv_rows(rows: &[ReportRow]) -> String {
    let mut out = String::new();
    let Some(first) = rows.first() else {
        return out;
    };
    let headers: Vec<&str> = first.fields().iter().filter(|f| f.1.is_some()).map(|f| f.0).collect();
    writeln!(out, "j,state,{}", headers.join(",")).unwrap();
    for row in rows {
        let values: Vec<String> = headers.iter().map(|h| row.field(h).map(lossless).unwrap_or_default()).collect();
        let j = row.j.map(|j| j.to_string()).unwrap_or_default();
        writeln!(out, "{j},{},{}", csv_text(&row.state), values.join(",")).unwrap();
    }
    out
}

/// Quotes a CSV field when needed.
pub fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Fixed-width table; one text column is left-aligned, the rest right-aligned.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
    left: usize,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new(), left: 1 }
    }

    pub fn left_align(mut self, column: usize) -> Self {
        self.left = column;
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, &w))| if i == self.left { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
        };
        line(&mut out, &self.headers);
        let rule: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
        writeln!(out, "{}", "-".repeat(rule)).unwrap();
        for row in &self.rows {
            line(&mut out, row);
        }
        out
    }
}

pub fn fixed(x: f64) -> String {
    format!("{x:.3}")
}

pub fn fixed_opt(x: Option<f64>) -> String {
    x.map(fixed).unwrap_or_default()
}

pub fn scientific_opt(x: Option<f64>) -> String {
    x.map(|x| format!("{x:.3e}")).unwrap_or_default()
}
