use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{ChartKind, ChartSpec};
use crate::pipeline::{Engine, Pipeline, StepValue, VariableStore};

static BUILTIN: &str = include_str!("../../assets/questions.json");

/// How a question is answered: open-ended text, multiple choice, canvas drawing or a pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuestionKind {
    #[serde(rename = "OE")]
    OpenEnded,
    #[serde(rename = "MC")]
    MultipleChoice,
    #[serde(rename = "CNV")]
    Canvas,
    #[serde(rename = "M")]
    Pipeline,
}

impl QuestionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QuestionKind::OpenEnded => "OE",
            QuestionKind::MultipleChoice => "MC",
            QuestionKind::Canvas => "CNV",
            QuestionKind::Pipeline => "M",
        }
    }

    /// Answers that a person has to read.
    pub fn is_free_form(self) -> bool {
        matches!(self, QuestionKind::OpenEnded | QuestionKind::Canvas)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub day: u8,
    pub kind: QuestionKind,
    pub prompt: String,
    pub base_points: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<String>,
    /// Absent for opinion polls, where every option is accepted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_key: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_pipeline: Option<Pipeline>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_chart_kind: Option<ChartKind>,
}

impl Question {
    pub fn is_poll(&self) -> bool {
        self.kind == QuestionKind::MultipleChoice && self.answer_key.is_none()
    }

    /// Public view: no answer key, no canonical pipeline.
    pub fn redacted(&self) -> Question {
        Question {
            answer_key: None,
            canonical_pipeline: None,
            ..self.clone()
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BankError {
    #[error("question bank is not valid JSON: {0}")]
    Parse(String),
    #[error("question `{id}`: {reason}")]
    Invalid { id: String, reason: String },
    #[error("question id `{0}` appears twice")]
    DuplicateId(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionBank {
    pub version: u32,
    pub questions: Vec<Question>,
}

impl QuestionBank {
    pub fn builtin() -> &'static QuestionBank {
        static BANK: OnceLock<QuestionBank> = OnceLock::new();
        BANK.get_or_init(|| {
            QuestionBank::from_json(BUILTIN).expect("bundled question bank is valid")
        })
    }

    pub fn from_json(text: &str) -> Result<QuestionBank, BankError> {
        let bank: QuestionBank =
            serde_json::from_str(text).map_err(|e| BankError::Parse(e.to_string()))?;
        bank.check()?;
        Ok(bank)
    }

    fn check(&self) -> Result<(), BankError> {
        let mut seen = BTreeSet::new();
        for q in &self.questions {
            let invalid = |reason: &str| BankError::Invalid {
                id: q.id.clone(),
                reason: reason.to_string(),
            };
            if !seen.insert(q.id.as_str()) {
                return Err(BankError::DuplicateId(q.id.clone()));
            }
            if !(1..=3).contains(&q.day) {
                return Err(invalid("day must be 1, 2 or 3"));
            }
            if q.prompt.trim().is_empty() {
                return Err(invalid("prompt is empty"));
            }
            if q.base_points < 0 {
                return Err(invalid("base points are negative"));
            }
            match q.kind {
                QuestionKind::MultipleChoice => {
                    if !(2..=6).contains(&q.options.len()) {
                        return Err(invalid("multiple choice needs 2 to 6 options"));
                    }
                    if q.answer_key.is_some_and(|k| k >= q.options.len()) {
                        return Err(invalid("answer key is out of range"));
                    }
                }
                _ if !q.options.is_empty() || q.answer_key.is_some() => {
                    return Err(invalid("only multiple choice has options"));
                }
                _ => {}
            }
            match (q.kind, &q.canonical_pipeline) {
                (QuestionKind::Pipeline, None) => {
                    return Err(invalid("missing canonical pipeline"))
                }
                (QuestionKind::Pipeline, Some(p)) if p.is_empty() => {
                    return Err(invalid("canonical pipeline is empty"))
                }
                (QuestionKind::Pipeline, _) => {}
                (_, Some(_)) => return Err(invalid("only pipeline questions carry a pipeline")),
                (_, None) => {}
            }
            if q.expected_chart_kind.is_some() && q.kind != QuestionKind::Pipeline {
                return Err(invalid("only pipeline questions expect a chart"));
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }

    pub fn day(&self, day: u8) -> Vec<&Question> {
        self.questions.iter().filter(|q| q.day == day).collect()
    }

    /// Runs every canonical pipeline. Returns one message per broken question.
    pub fn self_check(&self, engine: &Engine) -> Result<(), Vec<String>> {
        let mut problems = Vec::new();
        for q in &self.questions {
            let Some(pipeline) = &q.canonical_pipeline else {
                continue;
            };
            let trace = match engine.execute(pipeline, &mut VariableStore::new()) {
                Ok(trace) => trace,
                Err(report) => {
                    problems.push(format!("{}: does not validate: {:?}", q.id, report.codes()));
                    continue;
                }
            };
            if let Some(e) = &trace.error {
                problems.push(format!(
                    "{}: step {} failed: {}",
                    q.id, e.step_index, e.message
                ));
                continue;
            }
            let chart: Option<&ChartSpec> = match trace.final_output().map(|s| &s.value) {
                Some(StepValue::Chart(c)) => Some(c),
                _ => None,
            };
            match (q.expected_chart_kind, chart) {
                (Some(kind), Some(c)) if c.kind != kind => problems.push(format!(
                    "{}: draws {} instead of {}",
                    q.id,
                    c.kind.as_str(),
                    kind.as_str()
                )),
                (Some(_), Some(c)) if !c.completeness().complete => {
                    problems.push(format!("{}: canonical chart is incomplete", q.id))
                }
                (Some(_), None) => problems.push(format!("{}: does not end in a chart", q.id)),
                _ => {}
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }
}
