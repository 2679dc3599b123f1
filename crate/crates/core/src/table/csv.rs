//! RFC 4180 ingestion with three-way schema inference.

use std::collections::HashSet;

use thiserror::Error;

use super::{CellValue, Column, DType, Provenance, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            has_header: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsvError {
    #[error("no header row")]
    NoHeaderRow,
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate header `{0}`")]
    DuplicateHeader(String),
    #[error("header {index} is empty")]
    EmptyHeader { index: usize },
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
}

/// Parses CSV bytes into a typed table. Row numbers in errors are 1-based
/// physical records, counting the header.
pub fn parse_csv(
    bytes: &[u8],
    options: CsvOptions,
    provenance: Provenance,
) -> Result<Table, CsvError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let mut reader = ::csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);

    let mut records = Vec::new();
    for (index, result) in reader.records().enumerate() {
        let record = result.map_err(|e| CsvError::Malformed {
            row: e.position().map_or(index + 1, |p| p.record() as usize + 1),
            message: e.to_string(),
        })?;
        records.push(record);
    }

    let mut rows = records.iter();
    let header: Vec<String> = if options.has_header {
        let first = rows.next().ok_or(CsvError::NoHeaderRow)?;
        first.iter().map(str::to_string).collect()
    } else {
        let width = records.first().ok_or(CsvError::NoHeaderRow)?.len();
        (1..=width).map(|i| format!("column_{i}")).collect()
    };

    let mut seen = HashSet::new();
    for (index, name) in header.iter().enumerate() {
        if name.is_empty() {
            return Err(CsvError::EmptyHeader { index });
        }
        if !seen.insert(name.as_str()) {
            return Err(CsvError::DuplicateHeader(name.clone()));
        }
    }

    let offset = usize::from(options.has_header);
    let mut raw: Vec<Vec<&str>> = vec![Vec::new(); header.len()];
    for (i, record) in rows.enumerate() {
        if record.len() != header.len() {
            return Err(CsvError::RaggedRow {
                row: i + offset + 1,
                expected: header.len(),
                found: record.len(),
            });
        }
        for (col, field) in record.iter().enumerate() {
            raw[col].push(field);
        }
    }

    let columns = header
        .into_iter()
        .zip(&raw)
        .map(|(name, fields)| {
            let dtype = infer_dtype(fields);
            let cells = fields.iter().map(|f| to_cell(f, dtype)).collect();
            Column::new(name, dtype, cells).expect("cells converted to the inferred dtype")
        })
        .collect();
    Ok(Table::new(columns, provenance).expect("headers are unique and rows rectangular"))
}

/// Infers one dtype per column of raw text fields.
pub fn infer_schema<S: AsRef<str>>(raw_columns: &[Vec<S>]) -> Vec<DType> {
    raw_columns.iter().map(|c| infer_dtype(c)).collect()
}

/// INTEGER if every non-empty field is an integer, else REAL if every non-empty
/// field is a decimal number, else TEXT. A column with no non-empty fields is TEXT.
/// Integer-looking fields that overflow `i64`, and decimals that overflow `f64`,
/// force TEXT.
pub fn infer_dtype<S: AsRef<str>>(fields: &[S]) -> DType {
    let mut dtype: Option<DType> = None;
    for field in fields.iter().map(AsRef::as_ref).filter(|f| !f.is_empty()) {
        let here = match classify(field) {
            Some(dt) => dt,
            None => return DType::Text,
        };
        dtype = Some(match (dtype, here) {
            (None, dt) => dt,
            (Some(DType::Integer), DType::Integer) => DType::Integer,
            _ => DType::Real,
        });
    }
    dtype.unwrap_or(DType::Text)
}

/// `Some(Integer | Real)` for numeric fields, `None` for text or overflow.
fn classify(field: &str) -> Option<DType> {
    if looks_integer(field) {
        return field.parse::<i64>().ok().map(|_| DType::Integer);
    }
    if looks_decimal(field) {
        return field
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(|_| DType::Real);
    }
    None
}

fn looks_integer(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn looks_decimal(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    let mantissa_ok = !(int_part.is_empty() && frac_part.is_empty())
        && all_digits(int_part)
        && all_digits(frac_part);
    let exponent_ok = exponent.is_none_or(looks_integer);
    mantissa_ok && exponent_ok
}

fn to_cell(field: &str, dtype: DType) -> CellValue {
    if field.is_empty() {
        return CellValue::Missing;
    }
    match dtype {
        DType::Text => CellValue::Text(field.to_string()),
        DType::Integer => CellValue::Integer(field.parse().expect("inferred integer")),
        DType::Real => CellValue::Real(field.parse().expect("inferred real")),
    }
}

/// Writes a header row plus one record per row, quoting only where needed.
/// Reals use `{:?}` so whole values keep their `.0` and re-infer as REAL.
pub fn serialize_csv(table: &Table, options: CsvOptions) -> Vec<u8> {
    let mut writer = ::csv::WriterBuilder::new()
        .delimiter(options.delimiter)
        .quote_style(::csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    if options.has_header {
        writer
            .write_record(table.column_names())
            .expect("write to Vec");
    }
    for row in table.rows() {
        let fields: Vec<String> = row
            .into_iter()
            .map(|cell| match cell {
                CellValue::Real(r) => format!("{r:?}"),
                other => other.to_string(),
            })
            .collect();
        writer.write_record(&fields).expect("write to Vec");
    }
    writer.into_inner().expect("flush to Vec")
}
