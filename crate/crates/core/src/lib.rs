//! Card-based data programming: a card catalog, CSV tables, type-checked card
//! pipelines with step-wise execution, chart specs with SVG output, and a scored
//! question-and-hint activity engine.

pub mod activity;
pub mod catalog;
pub mod chart;
pub mod datasets;
pub mod error;
pub mod pipeline;
pub mod table;

pub use activity::{
    AnswerPayload, GradeResult, Question, QuestionBank, Session, SessionStore, Verdict,
};
pub use catalog::{load_catalog, CardCategory, CardSpec, Catalog, FallacyCard, IoSignature};
pub use chart::{
    apply_element, build_chart, check_completeness, render_svg, ChartElement, ChartKind, ChartSpec,
    CompletenessReport,
};
pub use datasets::{DatasetManifest, DatasetRegistry};
pub use error::{ErrorCode, OpError};
pub use pipeline::{
    CardInstance, Engine, ExecutionTrace, FieldValue, Pipeline, StepValue, ValidationReport,
    VariableStore,
};
pub use table::{
    parse_csv, serialize_csv, CellValue, Column, CsvOptions, DType, Provenance, Table,
};
