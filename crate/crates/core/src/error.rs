use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Machine-readable failure codes shared by validation, execution, charts and the API.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    EmptyPipeline,
    UnknownCard,
    TypeMismatch,
    MissingInput,
    BadInput,
    UnknownColumn,
    DuplicateColumn,
    BadComparator,
    UncoercibleLiteral,
    MultipleCharts,
    ElementBeforeChart,
    EmptyName,
    UnboundVariable,
    EmptyAggregate,
    NonNumericColumn,
    NonNumericValue,
    NonTextCategory,
    BadRegionCode,
    BadPieValues,
    EmptyValue,
    ZeroSize,
    UnknownDataset,
    LoadFailed,
    FetchFailed,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::EmptyPipeline => "EMPTY_PIPELINE",
            ErrorCode::UnknownCard => "UNKNOWN_CARD",
            ErrorCode::TypeMismatch => "TYPE_MISMATCH",
            ErrorCode::MissingInput => "MISSING_INPUT",
            ErrorCode::BadInput => "BAD_INPUT",
            ErrorCode::UnknownColumn => "UNKNOWN_COLUMN",
            ErrorCode::DuplicateColumn => "DUPLICATE_COLUMN",
            ErrorCode::BadComparator => "BAD_COMPARATOR",
            ErrorCode::UncoercibleLiteral => "UNCOERCIBLE_LITERAL",
            ErrorCode::MultipleCharts => "MULTIPLE_CHARTS",
            ErrorCode::ElementBeforeChart => "ELEMENT_BEFORE_CHART",
            ErrorCode::EmptyName => "EMPTY_NAME",
            ErrorCode::UnboundVariable => "UNBOUND_VARIABLE",
            ErrorCode::EmptyAggregate => "EMPTY_AGGREGATE",
            ErrorCode::NonNumericColumn => "NON_NUMERIC_COLUMN",
            ErrorCode::NonNumericValue => "NON_NUMERIC_VALUE",
            ErrorCode::NonTextCategory => "NON_TEXT_CATEGORY",
            ErrorCode::BadRegionCode => "BAD_REGION_CODE",
            ErrorCode::BadPieValues => "BAD_PIE_VALUES",
            ErrorCode::EmptyValue => "EMPTY_VALUE",
            ErrorCode::ZeroSize => "ZERO_SIZE",
            ErrorCode::UnknownDataset => "UNKNOWN_DATASET",
            ErrorCode::LoadFailed => "LOAD_FAILED",
            ErrorCode::FetchFailed => "FETCH_FAILED",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A coded failure from a data operation or chart builder.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{code}: {message}")]
pub struct OpError {
    pub code: ErrorCode,
    pub message: String,
}

impl OpError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> OpError {
        OpError {
            code,
            message: message.into(),
        }
    }
}
