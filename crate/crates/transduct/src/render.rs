//! Deterministic text output: significant-digit rounding and the CSV,
//! markdown and JSON renderings of result tables. Proportions are held in
//! linear scale internally and become percentages only here.

use crate::error::{Error, Result};

/// Output format for tables and scenario reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::ScenarioField {
                path: "output.format".into(),
                message: format!("unknown format {other:?}; expected csv, markdown or json"),
            }),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "markdown",
            OutputFormat::Json => "json",
        })
    }
}

/// Round to `sig` significant digits, half to even, and print without an
/// exponent. The double rounding a percent conversion would cause is
/// avoided by formatting exactly once, here.
pub fn format_sig(value: f64, sig: u32) -> String {
    let sig = sig.max(1);
    if value == 0.0 {
        return format!("{:.*}", sig as usize - 1, 0.0);
    }
    let exponent = value.abs().log10().floor() as i32;
    let formatted = format_with_decimals(value, sig as i32 - 1 - exponent);
    // rounding can carry into the next decade (9.9996 -> 10.00)
    let reparsed: f64 = formatted.parse().unwrap_or(value);
    if reparsed != 0.0 {
        let new_exponent = reparsed.abs().log10().floor() as i32;
        if new_exponent != exponent {
            return format_with_decimals(value, sig as i32 - 1 - new_exponent);
        }
    }
    formatted
}

fn format_with_decimals(value: f64, decimals: i32) -> String {
    if decimals >= 0 {
        // {:.prec} rounds half to even on the exact binary value
        format!("{:.*}", decimals as usize, value)
    } else {
        let scale = 10f64.powi(-decimals);
        let rounded: f64 = format!("{:.0}", value / scale).parse().unwrap_or(0.0);
        format!("{:.0}", rounded * scale)
    }
}

/// One row of the rejected-boxes table. Mean, standard deviation and tail
/// are proportions; `additional_rejected` is the tail excess over the
/// known-model baseline as a fraction of that baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    /// `None` marks the known-model baseline (infinite prior sample).
    pub prior_sample_size: Option<u64>,
    pub mean: f64,
    pub sd: f64,
    pub rejected: f64,
    /// `None` when the baseline tail is zero and the ratio is undefined.
    pub additional_rejected: Option<f64>,
}

const CSV_HEADER: &str = "prior_sample_size,mean_pct,sd_pct,rejected_pct,additional_rejected_pct";

const MARKDOWN_HEADER: &str = "| Prior Sample Size | Mean of Defects (%) | Standard Deviation of Defects (%) | Boxes Rejected (%) | Additional Boxes Rejected (%) |";

fn size_token(row: &TableRow) -> String {
    match row.prior_sample_size {
        Some(n0) => n0.to_string(),
        None => "inf".to_string(),
    }
}

fn percent_cells(row: &TableRow, precision: u32) -> [String; 4] {
    [
        format_sig(row.mean * 100.0, precision),
        format_sig(row.sd * 100.0, precision),
        format_sig(row.rejected * 100.0, precision),
        match row.additional_rejected {
            Some(ratio) => format_sig(ratio * 100.0, precision),
            None => "undefined".to_string(),
        },
    ]
}

/// Render the table in the requested format. Output is byte-identical
/// across runs and ends with a single trailing newline.
pub fn render_table(rows: &[TableRow], format: OutputFormat, precision: u32) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in rows {
                let cells = percent_cells(row, precision);
                out.push_str(&size_token(row));
                for cell in &cells {
                    out.push(',');
                    out.push_str(cell);
                }
                out.push('\n');
            }
            out
        }
        OutputFormat::Markdown => {
            let mut out = String::from(MARKDOWN_HEADER);
            out.push_str("\n|---|---|---|---|---|\n");
            for row in rows {
                let cells = percent_cells(row, precision);
                out.push_str("| ");
                out.push_str(&size_token(row));
                for cell in &cells {
                    out.push_str(" | ");
                    out.push_str(cell);
                }
                out.push_str(" |\n");
            }
            out
        }
        OutputFormat::Json => {
            let mut out = String::from("[");
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let cells = percent_cells(row, precision);
                out.push_str("{\"prior_sample_size\":");
                match row.prior_sample_size {
                    Some(n0) => out.push_str(&n0.to_string()),
                    None => out.push_str("\"inf\""),
                }
                out.push_str(&format!(
                    ",\"mean_pct\":{},\"sd_pct\":{},\"rejected_pct\":{}",
                    cells[0], cells[1], cells[2]
                ));
                out.push_str(",\"additional_rejected_pct\":");
                match row.additional_rejected {
                    Some(_) => out.push_str(&cells[3]),
                    None => out.push_str("null"),
                }
                out.push('}');
            }
            out.push_str("]\n");
            out
        }
    }
}

/// Section/label/value records rendered as CSV, a markdown table set, or a
/// JSON object — the report shape used by the scenario runner.
#[derive(Debug, Clone)]
pub struct Report {
    pub title: String,
    pub sections: Vec<ReportSection>,
    /// Free-form trailing notes (markdown only).
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ReportSection {
    pub name: String,
    /// Column headers; the first column holds labels.
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<String>)>,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Markdown => {
                let mut out = format!("# {}\n", self.title);
                for section in &self.sections {
                    out.push_str(&format!("\n## {}\n\n", section.name));
                    out.push('|');
                    for col in &section.columns {
                        out.push_str(&format!(" {col} |"));
                    }
                    out.push('\n');
                    out.push('|');
                    for _ in &section.columns {
                        out.push_str("---|");
                    }
                    out.push('\n');
                    for (label, values) in &section.rows {
                        out.push_str(&format!("| {label} |"));
                        for v in values {
                            out.push_str(&format!(" {v} |"));
                        }
                        out.push('\n');
                    }
                }
                if !self.notes.is_empty() {
                    out.push('\n');
                    for note in &self.notes {
                        out.push_str(note);
                        out.push('\n');
                    }
                }
                out
            }
            OutputFormat::Csv => {
                let mut out = String::from("section,label,column,value\n");
                for section in &self.sections {
                    for (label, values) in &section.rows {
                        for (col, v) in section.columns.iter().skip(1).zip(values) {
                            out.push_str(&format!("{},{label},{col},{v}\n", section.name));
                        }
                    }
                }
                out
            }
            OutputFormat::Json => {
                let mut root = serde_json::Map::new();
                root.insert("name".into(), serde_json::Value::String(self.title.clone()));
                for section in &self.sections {
                    let rows: Vec<serde_json::Value> = section
                        .rows
                        .iter()
                        .map(|(label, values)| {
                            let mut obj = serde_json::Map::new();
                            obj.insert(
                                section.columns[0].clone(),
                                serde_json::Value::String(label.clone()),
                            );
                            for (col, v) in section.columns.iter().skip(1).zip(values) {
                                let value = v
                                    .parse::<f64>()
                                    .ok()
                                    .and_then(serde_json::Number::from_f64)
                                    .map(serde_json::Value::Number)
                                    .unwrap_or_else(|| serde_json::Value::String(v.clone()));
                                obj.insert(col.clone(), value);
                            }
                            serde_json::Value::Object(obj)
                        })
                        .collect();
                    root.insert(
                        section.name.replace(' ', "_"),
                        serde_json::Value::Array(rows),
                    );
                }
                let mut out = serde_json::to_string(&serde_json::Value::Object(root))
                    .expect("report serializes");
                out.push('\n');
                out
            }
        }
    }
}
