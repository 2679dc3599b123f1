//! Straight-line card pipelines: documents, static checking and step-wise execution.

mod exec;
pub mod ops;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chart::ChartSpec;
use crate::table::{CellValue, DType, Table};

pub use self::exec::{Engine, ExecutionTrace, StepError, StepOutput, StepValue};
pub use self::validate::{ValidationIssue, ValidationReport};

/// A value typed into a card's input field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldValue {
    Integer(i64),
    Real(f64),
    Text(String),
    List(Vec<String>),
}

impl FieldValue {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            FieldValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[String]> {
        match self {
            FieldValue::List(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Integer(i) => write!(f, "{i}"),
            FieldValue::Real(r) => write!(f, "{r}"),
            FieldValue::Text(s) => f.write_str(s),
            FieldValue::List(l) => f.write_str(&l.join(", ")),
        }
    }
}

impl From<&str> for FieldValue {
    fn from(s: &str) -> Self {
        FieldValue::Text(s.to_string())
    }
}

impl From<String> for FieldValue {
    fn from(s: String) -> Self {
        FieldValue::Text(s)
    }
}

impl From<i64> for FieldValue {
    fn from(i: i64) -> Self {
        FieldValue::Integer(i)
    }
}

impl From<f64> for FieldValue {
    fn from(r: f64) -> Self {
        FieldValue::Real(r)
    }
}

impl From<Vec<&str>> for FieldValue {
    fn from(l: Vec<&str>) -> Self {
        FieldValue::List(l.into_iter().map(str::to_string).collect())
    }
}

/// One placed card with its filled inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardInstance {
    pub card: String,
    #[serde(default)]
    pub inputs: BTreeMap<String, FieldValue>,
}

impl CardInstance {
    pub fn new(card: impl Into<String>) -> CardInstance {
        CardInstance {
            card: card.into(),
            inputs: BTreeMap::new(),
        }
    }

    pub fn with(mut self, field: &str, value: impl Into<FieldValue>) -> CardInstance {
        self.inputs.insert(field.to_string(), value.into());
        self
    }

    pub fn input(&self, field: &str) -> Option<&FieldValue> {
        self.inputs.get(field)
    }

    pub(crate) fn text(&self, field: &str) -> &str {
        self.inputs
            .get(field)
            .and_then(FieldValue::as_text)
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Pipeline {
    pub cards: Vec<CardInstance>,
}

impl Pipeline {
    pub fn new(cards: Vec<CardInstance>) -> Pipeline {
        Pipeline { cards }
    }

    pub fn from_json(text: &str) -> Result<Pipeline, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pipeline serializes")
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "contains")]
    Contains,
}

impl Comparator {
    pub const ALL: [Comparator; 7] = [
        Comparator::Eq,
        Comparator::Ne,
        Comparator::Gt,
        Comparator::Lt,
        Comparator::Ge,
        Comparator::Le,
        Comparator::Contains,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "==",
            Comparator::Ne => "!=",
            Comparator::Gt => ">",
            Comparator::Lt => "<",
            Comparator::Ge => ">=",
            Comparator::Le => "<=",
            Comparator::Contains => "contains",
        }
    }

    pub fn parse(symbol: &str) -> Option<Comparator> {
        Comparator::ALL.into_iter().find(|c| c.symbol() == symbol)
    }

    /// Ordering comparisons need numbers; `contains` needs text.
    pub fn applies_to(self, dtype: DType) -> bool {
        match self {
            Comparator::Eq | Comparator::Ne => true,
            Comparator::Gt | Comparator::Lt | Comparator::Ge | Comparator::Le => dtype.is_numeric(),
            Comparator::Contains => dtype == DType::Text,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Named tables saved by `save_variable`. One store per session.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VariableStore {
    bindings: BTreeMap<String, Table>,
}

impl VariableStore {
    pub fn new() -> VariableStore {
        VariableStore::default()
    }

    pub fn get(&self, name: &str) -> Option<&Table> {
        self.bindings.get(name)
    }

    pub(crate) fn bind(&mut self, name: &str, table: Table) {
        self.bindings.insert(name.to_string(), table);
    }

    pub fn names(&self) -> Vec<String> {
        self.bindings.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

/// Aggregate functions offered by the aggregate cards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AggregateKind {
    Average,
    Min,
    Max,
    Count,
}

impl AggregateKind {
    pub(crate) fn for_card(card: &str) -> Option<AggregateKind> {
        Some(match card {
            "average" => AggregateKind::Average,
            "minimum" => AggregateKind::Min,
            "maximum" => AggregateKind::Max,
            "count" => AggregateKind::Count,
            _ => return None,
        })
    }
}

pub(crate) fn scalar_summary(value: &CellValue) -> String {
    match value {
        CellValue::Missing => "scalar: (missing)".to_string(),
        v => format!("scalar: {v}"),
    }
}

pub(crate) fn chart_summary(chart: &ChartSpec) -> String {
    let report = chart.completeness();
    let mut s = format!("{}: {} points", chart.kind.label(), chart.data.len());
    if !report.complete {
        let missing: Vec<&str> = report.missing.iter().map(|e| e.label()).collect();
        s.push_str(&format!(" (missing: {})", missing.join(", ")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pipeline_document_shape() {
        let text = r#"{"cards":[
            {"card":"open_csv_file","inputs":{"file":"players.csv"}},
            {"card":"filter","inputs":{"column":"age","comparator":">","value":29}},
            {"card":"select_columns","inputs":{"columns":["name","age"]}},
            {"card":"count"}]}"#;
        let p = Pipeline::from_json(text).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.cards[1].input("value"), Some(&FieldValue::Integer(29)));
        assert_eq!(
            p.cards[2].input("columns"),
            Some(&FieldValue::from(vec!["name", "age"]))
        );
        assert!(p.cards[3].inputs.is_empty());
        assert_eq!(Pipeline::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn comparator_symbols() {
        for c in Comparator::ALL {
            assert_eq!(Comparator::parse(c.symbol()), Some(c));
        }
        assert_eq!(Comparator::parse("="), None);
        assert!(!Comparator::Gt.applies_to(DType::Text));
        assert!(!Comparator::Contains.applies_to(DType::Integer));
        assert!(Comparator::Eq.applies_to(DType::Real));
    }
}
