//! The data operations behind transform, variable and aggregate cards.
//!
//! Missing cells never satisfy a filter predicate, are skipped by aggregates
//! and form their own group in `group_count`.

use std::cmp::Ordering;

use super::{AggregateKind, Comparator, FieldValue, VariableStore};
use crate::error::{ErrorCode, OpError};
use crate::table::{CellValue, Column, DType, Provenance, Table};

pub const COUNT_COLUMN: &str = "count";

fn column<'t>(t: &'t Table, name: &str) -> Result<&'t Column, OpError> {
    t.column(name).ok_or_else(|| {
        OpError::new(
            ErrorCode::UnknownColumn,
            format!("no column named `{name}`"),
        )
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Literal {
    Text(String),
    Integer(i64),
    Real(f64),
}

fn coerce(value: &FieldValue, dtype: DType) -> Result<Literal, OpError> {
    let fail = || {
        OpError::new(
            ErrorCode::UncoercibleLiteral,
            format!("`{value}` cannot be compared with a {dtype} column"),
        )
    };
    match (value, dtype) {
        (FieldValue::List(_), _) => Err(fail()),
        (v, DType::Text) => Ok(Literal::Text(v.to_string())),
        (FieldValue::Integer(i), _) => Ok(Literal::Integer(*i)),
        (FieldValue::Real(r), _) if r.is_finite() => Ok(Literal::Real(*r)),
        (FieldValue::Real(_), _) => Err(fail()),
        (FieldValue::Text(s), _) => {
            let s = s.trim();
            if let Ok(i) = s.parse::<i64>() {
                Ok(Literal::Integer(i))
            } else if crate::table::infer_dtype(&[s]) == DType::Real {
                Ok(Literal::Real(s.parse().map_err(|_| fail())?))
            } else {
                Err(fail())
            }
        }
    }
}

fn compare_numbers(cell: &CellValue, lit: &Literal) -> Option<Ordering> {
    match (cell, lit) {
        (CellValue::Integer(a), Literal::Integer(b)) => Some(a.cmp(b)),
        (c, Literal::Integer(b)) => c.as_f64()?.partial_cmp(&(*b as f64)),
        (c, Literal::Real(b)) => c.as_f64()?.partial_cmp(b),
        _ => None,
    }
}

fn matches(cell: &CellValue, cmp: Comparator, lit: &Literal) -> bool {
    if cell.is_missing() {
        return false;
    }
    match (cell, lit) {
        (CellValue::Text(s), Literal::Text(l)) => match cmp {
            Comparator::Eq => s == l,
            Comparator::Ne => s != l,
            Comparator::Contains => s.to_lowercase().contains(&l.to_lowercase()),
            _ => false,
        },
        _ => match compare_numbers(cell, lit) {
            Some(ord) => match cmp {
                Comparator::Eq => ord == Ordering::Equal,
                Comparator::Ne => ord != Ordering::Equal,
                Comparator::Gt => ord == Ordering::Greater,
                Comparator::Lt => ord == Ordering::Less,
                Comparator::Ge => ord != Ordering::Less,
                Comparator::Le => ord != Ordering::Greater,
                Comparator::Contains => false,
            },
            None => false,
        },
    }
}

/// Rows whose `column` satisfies `cmp value`, in their original order.
pub fn op_filter(
    t: &Table,
    column_name: &str,
    cmp: Comparator,
    value: &FieldValue,
) -> Result<Table, OpError> {
    let col = column(t, column_name)?;
    if !cmp.applies_to(col.dtype()) {
        return Err(OpError::new(
            ErrorCode::BadComparator,
            format!(
                "`{cmp}` cannot be used on {} column `{column_name}`",
                col.dtype()
            ),
        ));
    }
    let lit = coerce(value, col.dtype())?;
    let rows: Vec<usize> = col
        .cells()
        .iter()
        .enumerate()
        .filter(|(_, cell)| matches(cell, cmp, &lit))
        .map(|(i, _)| i)
        .collect();
    Ok(t.take_rows(&rows))
}

pub fn op_select_columns(t: &Table, names: &[String]) -> Result<Table, OpError> {
    if names.is_empty() {
        return Err(OpError::new(
            ErrorCode::BadInput,
            "choose at least one column",
        ));
    }
    for (i, name) in names.iter().enumerate() {
        column(t, name)?;
        if names[..i].contains(name) {
            return Err(OpError::new(
                ErrorCode::DuplicateColumn,
                format!("column `{name}` is listed twice"),
            ));
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(t.select(&refs).expect("columns checked above"))
}

/// Binds `name` to `t` and passes `t` through.
pub fn op_save_variable(
    t: &Table,
    name: &str,
    store: &mut VariableStore,
) -> Result<Table, OpError> {
    if name.trim().is_empty() {
        return Err(OpError::new(ErrorCode::EmptyName, "variable name is empty"));
    }
    store.bind(name, t.clone());
    Ok(t.clone())
}

pub fn op_load_variable(name: &str, store: &VariableStore) -> Result<Table, OpError> {
    store.get(name).cloned().ok_or_else(|| {
        OpError::new(
            ErrorCode::UnboundVariable,
            format!("no variable named `{name}` was saved"),
        )
    })
}

/// AVERAGE is REAL; MIN and MAX keep the column's dtype (first occurrence wins on
/// ties); COUNT is the INTEGER row count.
pub fn op_aggregate(
    t: &Table,
    kind: AggregateKind,
    column_name: Option<&str>,
) -> Result<CellValue, OpError> {
    if kind == AggregateKind::Count {
        return Ok(CellValue::Integer(t.row_count() as i64));
    }
    let name = column_name
        .ok_or_else(|| OpError::new(ErrorCode::MissingInput, "choose a column to aggregate"))?;
    let col = column(t, name)?;
    if !col.dtype().is_numeric() {
        return Err(OpError::new(
            ErrorCode::NonNumericColumn,
            format!("column `{name}` holds {}, not numbers", col.dtype()),
        ));
    }
    let present: Vec<&CellValue> = col.cells().iter().filter(|c| !c.is_missing()).collect();
    let empty = || {
        OpError::new(
            ErrorCode::EmptyAggregate,
            format!("column `{name}` has no values to aggregate"),
        )
    };
    let first = *present.first().ok_or_else(empty)?;
    let extreme = |want: Ordering| {
        present.iter().skip(1).fold(
            first,
            |best, c| {
                if c.total_cmp(best) == want {
                    c
                } else {
                    best
                }
            },
        )
    };
    Ok(match kind {
        AggregateKind::Min => extreme(Ordering::Less).clone(),
        AggregateKind::Max => extreme(Ordering::Greater).clone(),
        AggregateKind::Average => {
            let values: Vec<f64> = present.iter().filter_map(|c| c.as_f64()).collect();
            let n = values.len() as f64;
            let mut mean = values.iter().sum::<f64>() / n;
            if !mean.is_finite() {
                mean = values
                    .iter()
                    .enumerate()
                    .fold(0.0, |m, (k, v)| m + (v - m) / (k as f64 + 1.0));
            }
            let lo = extreme(Ordering::Less).as_f64().unwrap_or(mean);
            let hi = extreme(Ordering::Greater).as_f64().unwrap_or(mean);
            CellValue::Real(mean.clamp(lo, hi))
        }
        AggregateKind::Count => unreachable!(),
    })
}

/// One row per distinct value of `column` (Missing included), sorted ascending with
/// Missing last, plus an INTEGER `count` column.
pub fn op_group_count(t: &Table, column_name: &str) -> Result<Table, OpError> {
    let col = column(t, column_name)?;
    if column_name == COUNT_COLUMN {
        return Err(OpError::new(
            ErrorCode::DuplicateColumn,
            "cannot group a column that is itself named `count`",
        ));
    }
    let mut values: Vec<&CellValue> = col.cells().iter().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    let mut keys: Vec<CellValue> = Vec::new();
    let mut counts: Vec<CellValue> = Vec::new();
    for value in values {
        match keys.last() {
            Some(last) if last.total_cmp(value) == Ordering::Equal => {
                if let Some(CellValue::Integer(n)) = counts.last_mut() {
                    *n += 1;
                }
            }
            _ => {
                keys.push(value.clone());
                counts.push(CellValue::Integer(1));
            }
        }
    }
    let columns = vec![
        Column::new(column_name, col.dtype(), keys).expect("keys come from the column"),
        Column::new(COUNT_COLUMN, DType::Integer, counts).expect("counts are integers"),
    ];
    let note = format!("group_count({column_name}) of {}", t.provenance());
    Ok(Table::new(columns, Provenance::Derived(note)).expect("two distinct columns"))
}
