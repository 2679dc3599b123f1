//! Typed columnar tables, the value that flows between cards.

mod csv;
mod fetch;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use self::csv::{infer_dtype, infer_schema, parse_csv, serialize_csv, CsvError, CsvOptions};
pub(crate) use self::fetch::is_http_url;
pub use self::fetch::{fetch_csv_url, FetchError, FetchLimits};

/// Column data type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DType {
    Text,
    Integer,
    Real,
}

impl DType {
    pub fn is_numeric(self) -> bool {
        matches!(self, DType::Integer | DType::Real)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DType::Text => "TEXT",
            DType::Integer => "INTEGER",
            DType::Real => "REAL",
        }
    }
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single cell. `Real` is always finite; use [`CellValue::real`] to build one.
#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Text(String),
    Integer(i64),
    Real(f64),
    Missing,
}

impl CellValue {
    /// Returns `None` for NaN and infinities.
    pub fn real(value: f64) -> Option<CellValue> {
        value.is_finite().then_some(CellValue::Real(value))
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, CellValue::Missing)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            CellValue::Integer(i) => Some(*i as f64),
            CellValue::Real(r) => Some(*r),
            _ => None,
        }
    }

    pub fn dtype(&self) -> Option<DType> {
        match self {
            CellValue::Text(_) => Some(DType::Text),
            CellValue::Integer(_) => Some(DType::Integer),
            CellValue::Real(_) => Some(DType::Real),
            CellValue::Missing => None,
        }
    }

    /// Total order used for sorting and grouping: numbers, then text, then `Missing`.
    pub fn total_cmp(&self, other: &CellValue) -> Ordering {
        fn rank(c: &CellValue) -> u8 {
            match c {
                CellValue::Integer(_) | CellValue::Real(_) => 0,
                CellValue::Text(_) => 1,
                CellValue::Missing => 2,
            }
        }
        match (self, other) {
            (CellValue::Integer(a), CellValue::Integer(b)) => a.cmp(b),
            (CellValue::Text(a), CellValue::Text(b)) => a.cmp(b),
            (a, b) if rank(a) == 0 && rank(b) == 0 => {
                let (x, y) = (
                    a.as_f64().unwrap_or_default(),
                    b.as_f64().unwrap_or_default(),
                );
                x.total_cmp(&y)
            }
            (a, b) => rank(a).cmp(&rank(b)),
        }
    }
}

impl From<&str> for CellValue {
    fn from(s: &str) -> Self {
        CellValue::Text(s.to_string())
    }
}

impl From<i64> for CellValue {
    fn from(i: i64) -> Self {
        CellValue::Integer(i)
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellValue::Text(s) => f.write_str(s),
            CellValue::Integer(i) => write!(f, "{i}"),
            CellValue::Real(r) => write!(f, "{r}"),
            CellValue::Missing => Ok(()),
        }
    }
}

impl Serialize for CellValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CellValue::Text(s) => serializer.serialize_str(s),
            CellValue::Integer(i) => serializer.serialize_i64(*i),
            CellValue::Real(r) => serializer.serialize_f64(*r),
            CellValue::Missing => serializer.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for CellValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        cell_from_json(&value, None).map_err(D::Error::custom)
    }
}

/// Decodes one JSON cell, optionally forcing it into `dtype`.
fn cell_from_json(value: &serde_json::Value, dtype: Option<DType>) -> Result<CellValue, String> {
    use serde_json::Value;
    let cell = match (value, dtype) {
        (Value::Null, _) => CellValue::Missing,
        (Value::String(s), None | Some(DType::Text)) => CellValue::Text(s.clone()),
        (Value::Number(n), Some(DType::Real)) => n
            .as_f64()
            .and_then(CellValue::real)
            .ok_or_else(|| format!("{n} is not a finite real"))?,
        (Value::Number(n), None | Some(DType::Integer)) => match n.as_i64() {
            Some(i) => CellValue::Integer(i),
            None if dtype.is_none() => n
                .as_f64()
                .and_then(CellValue::real)
                .ok_or_else(|| format!("{n} is not a finite real"))?,
            None => return Err(format!("{n} is not a 64-bit integer")),
        },
        (other, Some(dt)) => return Err(format!("{other} does not match column type {dt}")),
        (other, None) => return Err(format!("{other} is not a cell value")),
    };
    Ok(cell)
}

/// Where a table came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "source", rename_all = "snake_case")]
pub enum Provenance {
    File(String),
    Url(String),
    Derived(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::File(p) => write!(f, "file {p}"),
            Provenance::Url(u) => write!(f, "url {u}"),
            Provenance::Derived(note) => f.write_str(note),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("column name must not be empty")]
    EmptyColumnName,
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("column `{column}` has {found} cells, expected {expected}")]
    RaggedColumns {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("column `{column}` row {row}: cell does not match type {dtype}")]
    CellTypeMismatch {
        column: String,
        row: usize,
        dtype: DType,
    },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    dtype: DType,
    cells: Vec<CellValue>,
}

impl Column {
    pub fn new(
        name: impl Into<String>,
        dtype: DType,
        cells: Vec<CellValue>,
    ) -> Result<Column, TableError> {
        let name = name.into();
        if name.is_empty() {
            return Err(TableError::EmptyColumnName);
        }
        for (row, cell) in cells.iter().enumerate() {
            if let Some(dt) = cell.dtype() {
                if dt != dtype {
                    return Err(TableError::CellTypeMismatch {
                        column: name,
                        row,
                        dtype,
                    });
                }
            }
        }
        Ok(Column { name, dtype, cells })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dtype(&self) -> DType {
        self.dtype
    }

    pub fn cells(&self) -> &[CellValue] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn take(&self, rows: &[usize]) -> Column {
        Column {
            name: self.name.clone(),
            dtype: self.dtype,
            cells: rows.iter().map(|&r| self.cells[r].clone()).collect(),
        }
    }
}

/// An ordered list of equal-length, uniquely named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<Column>,
    provenance: Provenance,
}

impl Table {
    pub fn new(columns: Vec<Column>, provenance: Provenance) -> Result<Table, TableError> {
        let mut seen = HashSet::new();
        for column in &columns {
            if !seen.insert(column.name.as_str()) {
                return Err(TableError::DuplicateColumn(column.name.clone()));
            }
        }
        if let Some(first) = columns.first() {
            let expected = first.len();
            if let Some(bad) = columns.iter().find(|c| c.len() != expected) {
                return Err(TableError::RaggedColumns {
                    column: bad.name.clone(),
                    expected,
                    found: bad.len(),
                });
            }
        }
        Ok(Table {
            columns,
            provenance,
        })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Table {
        self.provenance = provenance;
        self
    }

    pub fn row_count(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn schema(&self) -> Vec<(String, DType)> {
        self.columns
            .iter()
            .map(|c| (c.name.clone(), c.dtype))
            .collect()
    }

    pub fn row(&self, index: usize) -> Vec<&CellValue> {
        self.columns.iter().map(|c| &c.cells[index]).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<&CellValue>> + '_ {
        (0..self.row_count()).map(|r| self.row(r))
    }

    /// Keeps the given rows, in the given order.
    pub fn take_rows(&self, rows: &[usize]) -> Table {
        Table {
            columns: self.columns.iter().map(|c| c.take(rows)).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn head(&self, n: usize) -> Table {
        let rows: Vec<usize> = (0..self.row_count().min(n)).collect();
        self.take_rows(&rows)
    }

    /// Projects onto `names` in the requested order.
    pub fn select(&self, names: &[&str]) -> Result<Table, TableError> {
        let mut columns = Vec::with_capacity(names.len());
        for name in names {
            let column = self
                .column(name)
                .ok_or_else(|| TableError::UnknownColumn(name.to_string()))?;
            columns.push(column.clone());
        }
        Table::new(columns, self.provenance.clone())
    }
}

#[derive(Serialize, Deserialize)]
struct ColumnDoc {
    name: String,
    dtype: DType,
    cells: Vec<serde_json::Value>,
}

#[derive(Serialize)]
struct ColumnRef<'a> {
    name: &'a str,
    dtype: DType,
    cells: &'a [CellValue],
}

#[derive(Serialize)]
struct TableRef<'a> {
    provenance: &'a Provenance,
    total_rows: usize,
    columns: Vec<ColumnRef<'a>>,
}

#[derive(Deserialize)]
struct TableDoc {
    provenance: Provenance,
    total_rows: usize,
    columns: Vec<ColumnDoc>,
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TableRef {
            provenance: &self.provenance,
            total_rows: self.row_count(),
            columns: self
                .columns
                .iter()
                .map(|c| ColumnRef {
                    name: &c.name,
                    dtype: c.dtype,
                    cells: &c.cells,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Table {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = TableDoc::deserialize(deserializer)?;
        let mut columns = Vec::with_capacity(doc.columns.len());
        for col in doc.columns {
            if col.cells.len() != doc.total_rows {
                return Err(D::Error::custom(format!(
                    "column `{}` has {} cells but total_rows is {}",
                    col.name,
                    col.cells.len(),
                    doc.total_rows
                )));
            }
            let cells = col
                .cells
                .iter()
                .map(|v| cell_from_json(v, Some(col.dtype)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(D::Error::custom)?;
            columns.push(Column::new(col.name, col.dtype, cells).map_err(D::Error::custom)?);
        }
        Table::new(columns, doc.provenance).map_err(D::Error::custom)
    }
}
