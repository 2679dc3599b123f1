use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::ops::{
    op_aggregate, op_filter, op_group_count, op_load_variable, op_save_variable, op_select_columns,
};
use super::validate::{validate, ValidationReport, ENGINE_CARDS};
use super::{chart_summary, scalar_summary, AggregateKind, CardInstance, Comparator, FieldValue};
use super::{Pipeline, VariableStore};
use crate::catalog::{Catalog, IoSignature, ValueKind};
use crate::chart::{apply_element, build_chart, ChartElement, ChartKind, ChartMapping, ChartSpec};
use crate::datasets::DatasetRegistry;
use crate::error::{ErrorCode, OpError};
use crate::table::{
    fetch_csv_url, parse_csv, CellValue, CsvOptions, FetchLimits, Provenance, Table,
};

/// The output of one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum StepValue {
    Table(Table),
    Scalar(CellValue),
    Chart(ChartSpec),
}

impl StepValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            StepValue::Table(_) => ValueKind::Table,
            StepValue::Scalar(_) => ValueKind::Scalar,
            StepValue::Chart(_) => ValueKind::Chart,
        }
    }

    pub fn summary(&self) -> String {
        match self {
            StepValue::Table(t) => {
                format!(
                    "table: {} rows × {} columns",
                    t.row_count(),
                    t.columns().len()
                )
            }
            StepValue::Scalar(v) => scalar_summary(v),
            StepValue::Chart(c) => chart_summary(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutput {
    pub step_index: usize,
    pub card: String,
    pub value: StepValue,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepError {
    pub step_index: usize,
    pub card: String,
    pub code: ErrorCode,
    pub message: String,
}

/// Per-step outputs of one run. On a runtime failure the steps stop before the
/// failing card and `error` names it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub steps: Vec<StepOutput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<StepError>,
    pub variables_after: Vec<String>,
}

impl ExecutionTrace {
    pub fn final_output(&self) -> Option<&StepOutput> {
        self.steps.last()
    }

    pub fn is_success(&self) -> bool {
        self.error.is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Catalog, datasets and fetch policy. Shareable across sessions; each run gets
/// its own [`VariableStore`].
#[derive(Debug, Clone)]
pub struct Engine {
    pub(crate) catalog: Catalog,
    pub(crate) datasets: DatasetRegistry,
    limits: FetchLimits,
    file_root: Option<PathBuf>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(Catalog::builtin().clone(), DatasetRegistry::bundled())
    }
}

impl Engine {
    pub fn new(catalog: Catalog, datasets: DatasetRegistry) -> Engine {
        Engine {
            catalog,
            datasets,
            limits: FetchLimits::default(),
            file_root: None,
        }
    }

    pub fn with_fetch_limits(mut self, limits: FetchLimits) -> Engine {
        self.limits = limits;
        self
    }

    /// Directory that relative `open_csv_file` paths are read from.
    pub fn with_file_root(mut self, root: impl Into<PathBuf>) -> Engine {
        self.file_root = Some(root.into());
        self
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn datasets(&self) -> &DatasetRegistry {
        &self.datasets
    }

    pub fn fetch_limits(&self) -> FetchLimits {
        self.limits
    }

    /// Static check. `store` supplies variables bound by earlier runs.
    pub fn validate(&self, pipeline: &Pipeline, store: Option<&VariableStore>) -> ValidationReport {
        validate(self, pipeline, store)
    }

    /// Validates, then runs. Runtime failures are reported inside the trace.
    pub fn execute(
        &self,
        pipeline: &Pipeline,
        store: &mut VariableStore,
    ) -> Result<ExecutionTrace, ValidationReport> {
        let report = self.validate(pipeline, Some(store));
        if !report.is_valid() {
            return Err(report);
        }
        Ok(self.run_unchecked(pipeline, store))
    }

    /// Runs without the static check; every mismatch is caught dynamically.
    pub fn run_unchecked(&self, pipeline: &Pipeline, store: &mut VariableStore) -> ExecutionTrace {
        let mut steps: Vec<StepOutput> = Vec::with_capacity(pipeline.len());
        let mut error = None;
        for (index, card) in pipeline.cards.iter().enumerate() {
            let current = steps.last().map(|s| &s.value);
            match self.run_step(index, card, current, store) {
                Ok(value) => {
                    let summary = value.summary();
                    steps.push(StepOutput {
                        step_index: index,
                        card: card.card.clone(),
                        value,
                        summary,
                    });
                }
                Err(e) => {
                    error = Some(StepError {
                        step_index: index,
                        card: card.card.clone(),
                        code: e.code,
                        message: e.message,
                    });
                    break;
                }
            }
        }
        ExecutionTrace {
            steps,
            error,
            variables_after: store.names(),
        }
    }

    fn run_step(
        &self,
        index: usize,
        card: &CardInstance,
        current: Option<&StepValue>,
        store: &mut VariableStore,
    ) -> Result<StepValue, OpError> {
        let spec = self
            .catalog
            .get_card(&card.card)
            .ok()
            .filter(|s| ENGINE_CARDS.contains(&s.id.as_str()))
            .ok_or_else(|| {
                OpError::new(
                    ErrorCode::UnknownCard,
                    format!("there is no `{}` card", card.card),
                )
            })?;
        let signature = self.catalog.signature_of(spec);
        let as_source =
            signature == IoSignature::Source || (index == 0 && card.card == "load_variable");
        let expected = if as_source {
            ValueKind::Nothing
        } else {
            signature.input()
        };
        let actual = current.map_or(ValueKind::Nothing, StepValue::kind);
        if actual != expected {
            return Err(OpError::new(
                ErrorCode::TypeMismatch,
                format!("{} cannot take {actual:?} as input", spec.title),
            ));
        }

        let text = |field: &str| -> Result<&str, OpError> {
            card.input(field)
                .and_then(FieldValue::as_text)
                .ok_or_else(|| {
                    OpError::new(
                        ErrorCode::MissingInput,
                        format!("{} needs `{field}`", spec.title),
                    )
                })
        };
        let table = || match current {
            Some(StepValue::Table(t)) => t,
            _ => unreachable!("input kind checked above"),
        };

        Ok(match card.card.as_str() {
            "open_csv_file" => StepValue::Table(self.open_file(text("file")?)?),
            "open_csv_url" => StepValue::Table(self.open_url(text("url")?)?),
            "filter" => {
                let cmp = Comparator::parse(text("comparator")?)
                    .ok_or_else(|| OpError::new(ErrorCode::BadComparator, "unknown comparison"))?;
                let value = card
                    .input("value")
                    .ok_or_else(|| OpError::new(ErrorCode::MissingInput, "filter needs a value"))?;
                StepValue::Table(op_filter(table(), text("column")?, cmp, value)?)
            }
            "select_columns" => {
                let names = card
                    .input("columns")
                    .and_then(FieldValue::as_list)
                    .ok_or_else(|| OpError::new(ErrorCode::MissingInput, "choose columns"))?;
                StepValue::Table(op_select_columns(table(), names)?)
            }
            "group_count" => StepValue::Table(op_group_count(table(), text("column")?)?),
            "save_variable" => StepValue::Table(op_save_variable(table(), text("name")?, store)?),
            "load_variable" => StepValue::Table(op_load_variable(text("name")?, store)?),
            "average" | "minimum" | "maximum" | "count" => {
                let kind = AggregateKind::for_card(&card.card).expect("aggregate card");
                let column = card.input("column").and_then(FieldValue::as_text);
                StepValue::Scalar(op_aggregate(table(), kind, column)?)
            }
            "show_table" | "line_chart" | "bar_chart" | "pie_chart" | "map_chart" => {
                let kind = ChartKind::for_card(&card.card).expect("chart card");
                let role = |f: &str| {
                    card.input(f)
                        .and_then(FieldValue::as_text)
                        .map(str::to_string)
                };
                let mapping = ChartMapping {
                    x: role("x"),
                    y: role("y"),
                    category: role("category"),
                    value: role("value"),
                    region: role("region"),
                };
                StepValue::Chart(build_chart(table(), kind, &mapping)?)
            }
            "set_title" | "set_x_label" | "set_y_label" | "set_legend" => {
                let element = ChartElement::for_card(&card.card).expect("element card");
                let Some(StepValue::Chart(spec)) = current else {
                    unreachable!("input kind checked above")
                };
                StepValue::Chart(apply_element(spec, element, text("text")?)?)
            }
            other => unreachable!("`{other}` is listed as runnable"),
        })
    }

    fn open_file(&self, file: &str) -> Result<Table, OpError> {
        let load_failed = |e: String| OpError::new(ErrorCode::LoadFailed, e);
        if let Some(id) = self.datasets.resolve_file(file) {
            return self
                .datasets
                .load_dataset(id, self.limits)
                .map_err(|e| load_failed(e.to_string()));
        }
        let path = match &self.file_root {
            Some(root) => root.join(file),
            None => PathBuf::from(file),
        };
        let bytes =
            std::fs::read(&path).map_err(|e| load_failed(format!("{}: {e}", path.display())))?;
        parse_csv(
            &bytes,
            CsvOptions::default(),
            Provenance::File(file.to_string()),
        )
        .map_err(|e| load_failed(format!("{file}: {e}")))
    }

    fn open_url(&self, url: &str) -> Result<Table, OpError> {
        if let Some(id) = self.datasets.resolve_url(url) {
            return self
                .datasets
                .load_dataset(id, self.limits)
                .map(|t| t.with_provenance(Provenance::Url(url.to_string())))
                .map_err(|e| OpError::new(ErrorCode::FetchFailed, e.to_string()));
        }
        let bytes = fetch_csv_url(url, self.limits)
            .map_err(|e| OpError::new(ErrorCode::FetchFailed, e.to_string()))?;
        parse_csv(
            &bytes,
            CsvOptions::default(),
            Provenance::Url(url.to_string()),
        )
        .map_err(|e| OpError::new(ErrorCode::LoadFailed, format!("{url}: {e}")))
    }
}
