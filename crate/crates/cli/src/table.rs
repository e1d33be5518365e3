//! Result tables and their CSV form: `,` separators, LF line endings and
//! numbers printed as `{:.16e}` (17 significant digits).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| Cell::Num(*v)).collect());
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of column `name`; text and unparsable cells become NaN.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[c] {
                    Cell::Num(v) => *v,
                    Cell::Text(s) => s.parse().unwrap_or(f64::NAN),
                })
                .collect(),
        )
    }

    pub fn texts(&self, name: &str) -> Option<Vec<String>> {
        let c = self.column(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[c] {
                    Cell::Num(v) => format_num(*v),
                    Cell::Text(s) => s.clone(),
                })
                .collect(),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(v) => out.push_str(&format_num(*v)),
                    Cell::Text(s) => {
                        let _ = write!(out, "{s}");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Reads CSV written by [`Table::to_csv`]. Cells that parse as numbers
    /// become [`Cell::Num`].
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .ok_or("empty CSV")?
            .split(',')
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let row: Vec<Cell> = line
                .split(',')
                .map(|s| match s.parse::<f64>() {
                    Ok(v) => Cell::Num(v),
                    Err(_) => Cell::Text(s.to_string()),
                })
                .collect();
            if row.len() != header.len() {
                return Err(format!(
                    "line {} has {} fields, header has {}",
                    i + 2,
                    row.len(),
                    header.len()
                ));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, &self.to_csv())
    }
}

pub fn format_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
