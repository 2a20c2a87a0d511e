//! Data files: CSV with a commented metadata header, or JSON with a `meta`
//! object and one object per row.
//!
//! Files carry the tool version, the resolved configuration, the seed and a
//! SHA-256 of the data rows. Nothing time-dependent is written, so a rerun
//! with the same configuration reproduces the file byte for byte.

use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Column names plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>, rows: Vec<Vec<String>>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows }
    }

    fn csv_body(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Hex SHA-256 of the header and data rows in CSV form.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.csv_body().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// What produced a table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: Value,
}

impl Meta {
    pub fn new(command: &str, seed: u64, config: Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config,
        }
    }
}

// Numbers where the cell parses as one, null for empty cells, strings otherwise.
fn cell_value(cell: &str) -> Value {
    if cell.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = cell.parse::<i64>() {
        return json!(i);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => json!(v),
        _ => json!(cell),
    }
}

pub fn render(meta: &Meta, table: &Table, format: Format) -> String {
    let hash = table.content_hash();
    match format {
        Format::Csv => {
            let config = serde_json::to_string(&meta.config).expect("config serializes");
            format!(
                "# {} {}\n# command: {}\n# seed: {}\n# config: {}\n# content-sha256: {}\n{}",
                meta.tool,
                meta.version,
                meta.command,
                meta.seed,
                config,
                hash,
                table.csv_body()
            )
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        table.header.iter().zip(row).map(|(k, v)| (k.clone(), cell_value(v))).collect();
                    Value::Object(obj)
                })
                .collect();
            let mut meta_value = serde_json::to_value(meta).expect("meta serializes");
            meta_value["content_sha256"] = json!(hash);
            let mut text = serde_json::to_string_pretty(&json!({ "meta": meta_value, "rows": rows }))
                .expect("report serializes");
            text.push('\n');
            text
        }
    }
}

/// Data rows of a CSV file written by [`render`], without comments or header.
pub fn parse_csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().map(|h| h.split(',').map(str::to_string).collect()).unwrap_or_default();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}
