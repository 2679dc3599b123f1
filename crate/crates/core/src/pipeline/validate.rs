//! Static checking: card lookup, input shapes, category composition and schema propagation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CardInstance, Comparator, FieldValue, Pipeline, VariableStore};
use crate::catalog::{CardSpec, FieldKind, IoSignature, ValueKind};
use crate::error::ErrorCode;
use crate::pipeline::ops::COUNT_COLUMN;
use crate::pipeline::Engine;
use crate::table::{is_http_url, DType};

type Schema = Vec<(String, DType)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub step_index: usize,
    pub code: ErrorCode,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub steps: usize,
    pub errors: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn codes(&self) -> Vec<ErrorCode> {
        self.errors.iter().map(|e| e.code).collect()
    }

    pub fn first(&self) -> Option<&ValidationIssue> {
        self.errors.first()
    }
}

/// What the checker knows about the value between two cards.
#[derive(Debug, Clone)]
enum Flow {
    Nothing,
    Table(Option<Schema>),
    Scalar,
    Chart,
    Unknown,
}

impl Flow {
    fn kind(&self) -> Option<ValueKind> {
        match self {
            Flow::Nothing => Some(ValueKind::Nothing),
            Flow::Table(_) => Some(ValueKind::Table),
            Flow::Scalar => Some(ValueKind::Scalar),
            Flow::Chart => Some(ValueKind::Chart),
            Flow::Unknown => None,
        }
    }
}

fn kind_name(kind: ValueKind) -> &'static str {
    match kind {
        ValueKind::Nothing => "nothing",
        ValueKind::Table => "a table",
        ValueKind::Scalar => "a single value",
        ValueKind::Chart => "a chart",
    }
}

/// Card ids the engine knows how to run.
pub(crate) const ENGINE_CARDS: &[&str] = &[
    "open_csv_file",
    "open_csv_url",
    "filter",
    "select_columns",
    "group_count",
    "save_variable",
    "load_variable",
    "average",
    "minimum",
    "maximum",
    "count",
    "show_table",
    "line_chart",
    "bar_chart",
    "pie_chart",
    "map_chart",
    "set_title",
    "set_x_label",
    "set_y_label",
    "set_legend",
];

struct Checker<'a> {
    engine: &'a Engine,
    store: Option<&'a VariableStore>,
    step: usize,
    issues: Vec<ValidationIssue>,
    variables: BTreeMap<String, Option<Schema>>,
}

impl Checker<'_> {
    fn push(&mut self, code: ErrorCode, message: impl Into<String>) {
        self.issues.push(ValidationIssue {
            step_index: self.step,
            code,
            message: message.into(),
        });
    }

    /// Returns false when any field is unusable; semantic checks are then skipped.
    fn check_inputs(&mut self, spec: &CardSpec, card: &CardInstance) -> bool {
        let mut ok = true;
        for name in card.inputs.keys() {
            if spec.field(name).is_none() {
                self.push(
                    ErrorCode::BadInput,
                    format!("{} has no input named `{name}`", spec.title),
                );
                ok = false;
            }
        }
        for field in &spec.input_fields {
            let Some(value) = card.input(&field.name) else {
                if field.required {
                    self.push(
                        ErrorCode::MissingInput,
                        format!("{} needs a value for `{}`", spec.title, field.name),
                    );
                    ok = false;
                }
                continue;
            };
            if let Err((code, message)) = check_field(field.kind, &field.name, value) {
                self.push(code, message);
                ok = false;
            }
        }
        ok
    }

    fn need_column(&mut self, schema: &Schema, name: &str) -> Option<DType> {
        let found = schema.iter().find(|(n, _)| n == name).map(|(_, d)| *d);
        if found.is_none() {
            let known: Vec<&str> = schema.iter().map(|(n, _)| n.as_str()).collect();
            self.push(
                ErrorCode::UnknownColumn,
                format!("no column named `{name}` (columns: {})", known.join(", ")),
            );
        }
        found
    }

    fn need_numeric(&mut self, schema: &Schema, name: &str, code: ErrorCode) {
        if let Some(dtype) = self.need_column(schema, name) {
            if !dtype.is_numeric() {
                self.push(code, format!("column `{name}` holds {dtype}, not numbers"));
            }
        }
    }

    fn need_text(&mut self, schema: &Schema, name: &str) {
        if let Some(dtype) = self.need_column(schema, name) {
            if dtype != DType::Text {
                self.push(
                    ErrorCode::NonTextCategory,
                    format!("column `{name}` holds {dtype}; labels must come from a TEXT column"),
                );
            }
        }
    }

    /// Card-specific checks against the upstream schema; returns the output flow.
    fn semantics(&mut self, card: &CardInstance, input: Option<&Schema>) -> Flow {
        let text = |f: &str| card.text(f).to_string();
        match card.card.as_str() {
            "open_csv_file" => {
                let datasets = &self.engine.datasets;
                Flow::Table(
                    datasets
                        .resolve_file(card.text("file"))
                        .and_then(|id| datasets.manifest(id).ok())
                        .map(|m| m.schema_pairs()),
                )
            }
            "open_csv_url" => {
                let datasets = &self.engine.datasets;
                Flow::Table(
                    datasets
                        .resolve_url(card.text("url"))
                        .and_then(|id| datasets.manifest(id).ok())
                        .map(|m| m.schema_pairs()),
                )
            }
            "filter" => {
                if let Some(schema) = input {
                    if let Some(dtype) = self.need_column(schema, card.text("column")) {
                        if let Some(cmp) = Comparator::parse(card.text("comparator")) {
                            if !cmp.applies_to(dtype) {
                                self.push(
                                    ErrorCode::BadComparator,
                                    format!(
                                        "`{cmp}` cannot be used on {dtype} column `{}`",
                                        text("column")
                                    ),
                                );
                            }
                        }
                    }
                }
                Flow::Table(input.cloned())
            }
            "select_columns" => {
                let names = card
                    .input("columns")
                    .and_then(FieldValue::as_list)
                    .unwrap_or_default();
                for (i, name) in names.iter().enumerate() {
                    if names[..i].contains(name) {
                        self.push(
                            ErrorCode::DuplicateColumn,
                            format!("column `{name}` is listed twice"),
                        );
                    }
                }
                Flow::Table(input.map(|schema| {
                    names
                        .iter()
                        .filter_map(|n| {
                            let dtype = self.need_column(schema, n)?;
                            Some((n.clone(), dtype))
                        })
                        .collect()
                }))
            }
            "group_count" => {
                let name = text("column");
                if name == COUNT_COLUMN {
                    self.push(
                        ErrorCode::DuplicateColumn,
                        "cannot group a column that is itself named `count`",
                    );
                }
                Flow::Table(input.and_then(|schema| {
                    let dtype = self.need_column(schema, &name)?;
                    Some(vec![
                        (name, dtype),
                        (COUNT_COLUMN.to_string(), DType::Integer),
                    ])
                }))
            }
            "save_variable" => {
                self.variables.insert(text("name"), input.cloned());
                Flow::Table(input.cloned())
            }
            "load_variable" => {
                let name = text("name");
                if let Some(schema) = self.variables.get(&name) {
                    Flow::Table(schema.clone())
                } else if let Some(table) = self.store.and_then(|s| s.get(&name)) {
                    Flow::Table(Some(table.schema()))
                } else {
                    self.push(
                        ErrorCode::UnboundVariable,
                        format!("no variable named `{name}` is saved before this card"),
                    );
                    Flow::Table(None)
                }
            }
            "average" | "minimum" | "maximum" => {
                if let Some(schema) = input {
                    self.need_numeric(schema, card.text("column"), ErrorCode::NonNumericColumn);
                }
                Flow::Scalar
            }
            "count" => Flow::Scalar,
            "line_chart" | "bar_chart" => {
                if let Some(schema) = input {
                    self.need_column(schema, card.text("x"));
                    self.need_numeric(schema, card.text("y"), ErrorCode::NonNumericValue);
                }
                Flow::Chart
            }
            "pie_chart" => {
                if let Some(schema) = input {
                    self.need_text(schema, card.text("category"));
                    self.need_numeric(schema, card.text("value"), ErrorCode::NonNumericValue);
                }
                Flow::Chart
            }
            "map_chart" => {
                if let Some(schema) = input {
                    self.need_text(schema, card.text("region"));
                    self.need_numeric(schema, card.text("value"), ErrorCode::NonNumericValue);
                }
                Flow::Chart
            }
            _ => Flow::Chart,
        }
    }
}

fn check_field(kind: FieldKind, name: &str, value: &FieldValue) -> Result<(), (ErrorCode, String)> {
    let bad = |what: &str| (ErrorCode::BadInput, format!("`{name}` must be {what}"));
    match kind {
        FieldKind::Literal => match value {
            FieldValue::List(_) => Err(bad("a single value")),
            _ => Ok(()),
        },
        FieldKind::ColumnList => match value.as_list() {
            Some(list) if !list.is_empty() && list.iter().all(|c| !c.is_empty()) => Ok(()),
            _ => Err(bad("a non-empty list of column names")),
        },
        FieldKind::Comparator => match value.as_text().and_then(Comparator::parse) {
            Some(_) => Ok(()),
            None => Err((
                ErrorCode::BadComparator,
                format!(
                    "`{value}` is not a comparison; use one of {}",
                    Comparator::ALL.map(Comparator::symbol).join(" ")
                ),
            )),
        },
        FieldKind::VariableName => match value.as_text() {
            Some(s) if !s.trim().is_empty() => Ok(()),
            Some(_) => Err((ErrorCode::EmptyName, "variable name is empty".to_string())),
            None => Err(bad("text")),
        },
        FieldKind::Text => match value.as_text() {
            Some(s) if !s.trim().is_empty() => Ok(()),
            Some(_) => Err((ErrorCode::EmptyValue, format!("`{name}` is empty"))),
            None => Err(bad("text")),
        },
        FieldKind::Url => match value.as_text() {
            Some(s) if is_http_url(s) => Ok(()),
            _ => Err(bad("an http(s) link")),
        },
        FieldKind::ColumnName | FieldKind::File => match value.as_text() {
            Some(s) if !s.is_empty() => Ok(()),
            _ => Err(bad("non-empty text")),
        },
    }
}

pub(crate) fn validate(
    engine: &Engine,
    pipeline: &Pipeline,
    store: Option<&VariableStore>,
) -> ValidationReport {
    let mut checker = Checker {
        engine,
        store,
        step: 0,
        issues: Vec::new(),
        variables: BTreeMap::new(),
    };
    if pipeline.is_empty() {
        checker.push(
            ErrorCode::EmptyPipeline,
            "a pipeline needs at least one card",
        );
    }

    let mut flow = Flow::Nothing;
    let mut seen_chart = false;
    for (index, card) in pipeline.cards.iter().enumerate() {
        checker.step = index;
        let spec = match engine.catalog.get_card(&card.card) {
            Ok(spec) if ENGINE_CARDS.contains(&spec.id.as_str()) => spec,
            _ => {
                checker.push(
                    ErrorCode::UnknownCard,
                    format!("there is no `{}` card", card.card),
                );
                flow = Flow::Unknown;
                continue;
            }
        };
        let signature = engine.catalog.signature_of(spec);
        let inputs_ok = checker.check_inputs(spec, card);

        let expected = if index == 0 && card.card == "load_variable" {
            ValueKind::Nothing
        } else {
            signature.input()
        };
        let composed = if signature == IoSignature::ChartElement && !seen_chart {
            checker.push(
                ErrorCode::ElementBeforeChart,
                format!("{} can only follow a chart card", spec.title),
            );
            false
        } else if signature == IoSignature::Visualization && seen_chart {
            checker.push(
                ErrorCode::MultipleCharts,
                "a pipeline can draw only one chart",
            );
            false
        } else {
            match flow.kind() {
                Some(actual) if actual != expected => {
                    let wants = if expected == ValueKind::Nothing {
                        "to come first".to_string()
                    } else {
                        format!("{} as input", kind_name(expected))
                    };
                    checker.push(
                        ErrorCode::TypeMismatch,
                        format!(
                            "{} needs {wants} but receives {}",
                            spec.title,
                            kind_name(actual)
                        ),
                    );
                    false
                }
                _ => true,
            }
        };
        if signature == IoSignature::Visualization {
            seen_chart = true;
        }

        let schema = match (&flow, composed, inputs_ok) {
            (Flow::Table(Some(schema)), true, true) => Some(schema.clone()),
            _ => None,
        };
        flow = if inputs_ok {
            checker.semantics(card, schema.as_ref())
        } else {
            match signature.output() {
                ValueKind::Table => Flow::Table(None),
                ValueKind::Scalar => Flow::Scalar,
                ValueKind::Chart => Flow::Chart,
                ValueKind::Nothing => Flow::Unknown,
            }
        };
        // a mis-composed source still yields a table, but nothing downstream can trust it
        if !composed && matches!(flow, Flow::Table(_)) && signature != IoSignature::Source {
            flow = Flow::Table(None);
        }
    }
    ValidationReport {
        steps: pipeline.len(),
        errors: checker.issues,
    }
}
