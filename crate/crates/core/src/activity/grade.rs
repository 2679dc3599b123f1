use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Question, QuestionKind};
use crate::chart::{ChartData, ChartElement, ChartKind, ChartSpec};
use crate::pipeline::{Engine, Pipeline, StepValue, ValidationReport, VariableStore};
use crate::table::{CellValue, Table};

/// Relative tolerance for comparing real numbers.
pub const REAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Correct,
    Incorrect,
    NeedsReview,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Correct => "CORRECT",
            Verdict::Incorrect => "INCORRECT",
            Verdict::NeedsReview => "NEEDS_REVIEW",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeResult {
    pub verdict: Verdict,
    pub points_awarded: i64,
    pub explanation: String,
    /// Required chart elements absent from the submitted chart, when it drew one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing: Option<Vec<ChartElement>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
}

impl GradeResult {
    fn new(verdict: Verdict, points: i64, explanation: impl Into<String>) -> GradeResult {
        GradeResult {
            verdict,
            points_awarded: points,
            explanation: explanation.into(),
            missing: None,
            validation: None,
        }
    }
}

/// The answer a participant hands in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerPayload {
    Choice(usize),
    Pipeline(Pipeline),
    /// Open-ended text or an encoded canvas drawing, kept for a moderator.
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradeError {
    #[error("choice {choice} is out of range; the question has {options} options")]
    ChoiceOutOfRange { choice: usize, options: usize },
    #[error("{question} is a {kind} question and cannot take this kind of answer")]
    WrongPayload {
        question: String,
        kind: &'static str,
    },
}

pub fn grade_mc_answer(q: &Question, choice: usize) -> Result<GradeResult, GradeError> {
    if q.kind != QuestionKind::MultipleChoice {
        return Err(GradeError::WrongPayload {
            question: q.id.clone(),
            kind: q.kind.as_str(),
        });
    }
    if choice >= q.options.len() {
        return Err(GradeError::ChoiceOutOfRange {
            choice,
            options: q.options.len(),
        });
    }
    Ok(match q.answer_key {
        None => GradeResult::new(Verdict::Correct, 0, "poll answer recorded"),
        Some(key) if key == choice => GradeResult::new(Verdict::Correct, q.base_points, "correct"),
        Some(_) => GradeResult::new(Verdict::Incorrect, 0, "not the right option"),
    })
}

/// Runs the submission and compares its final output with the canonical one.
pub fn grade_m_answer(
    q: &Question,
    submitted: &Pipeline,
    engine: &Engine,
) -> Result<GradeResult, GradeError> {
    let canonical = match (&q.kind, &q.canonical_pipeline) {
        (QuestionKind::Pipeline, Some(p)) => p,
        _ => {
            return Err(GradeError::WrongPayload {
                question: q.id.clone(),
                kind: q.kind.as_str(),
            })
        }
    };
    let incorrect = |why: String| GradeResult::new(Verdict::Incorrect, 0, why);

    let trace = match engine.execute(submitted, &mut VariableStore::new()) {
        Ok(trace) => trace,
        Err(report) => {
            let why = match report.first() {
                Some(e) => format!("step {}: {} ({})", e.step_index + 1, e.message, e.code),
                None => "pipeline does not validate".to_string(),
            };
            let mut r = incorrect(why);
            r.validation = Some(report);
            return Ok(r);
        }
    };
    let missing = match trace.final_output().map(|s| &s.value) {
        Some(StepValue::Chart(c)) => Some(c.completeness().missing),
        _ => None,
    };
    if let Some(e) = &trace.error {
        let mut r = incorrect(format!(
            "step {} failed: {} ({})",
            e.step_index + 1,
            e.message,
            e.code
        ));
        r.missing = missing;
        return Ok(r);
    }
    let expected = engine
        .execute(canonical, &mut VariableStore::new())
        .ok()
        .filter(|t| t.is_success())
        .and_then(|t| t.steps.last().map(|s| s.value.clone()))
        .expect("canonical pipelines run cleanly");
    let got = &trace
        .final_output()
        .expect("validated pipelines have steps")
        .value;

    let mut result = match equivalent(&expected, got) {
        Ok(()) => GradeResult::new(Verdict::Correct, q.base_points, "result matches"),
        Err(why) => incorrect(why),
    };
    result.missing = missing;
    Ok(result)
}

/// Dispatches on the question kind.
pub fn grade_answer(
    q: &Question,
    answer: &AnswerPayload,
    engine: &Engine,
) -> Result<GradeResult, GradeError> {
    match (q.kind, answer) {
        (QuestionKind::MultipleChoice, AnswerPayload::Choice(c)) => grade_mc_answer(q, *c),
        (QuestionKind::Pipeline, AnswerPayload::Pipeline(p)) => grade_m_answer(q, p, engine),
        (QuestionKind::OpenEnded | QuestionKind::Canvas, AnswerPayload::Text(_)) => Ok(
            GradeResult::new(Verdict::NeedsReview, 0, "kept for the moderator"),
        ),
        _ => Err(GradeError::WrongPayload {
            question: q.id.clone(),
            kind: q.kind.as_str(),
        }),
    }
}

fn as_table(v: &StepValue) -> Option<&Table> {
    match v {
        StepValue::Table(t) => Some(t),
        StepValue::Chart(ChartSpec {
            kind: ChartKind::TableView,
            data: ChartData::Table { table },
            ..
        }) => Some(table),
        _ => None,
    }
}

/// Result equivalence between a canonical output and a submitted one.
pub fn equivalent(expected: &StepValue, got: &StepValue) -> Result<(), String> {
    if let Some(want) = as_table(expected) {
        let have = as_table(got).ok_or("expected a table")?;
        return tables_equivalent(want, have);
    }
    match (expected, got) {
        (StepValue::Scalar(a), StepValue::Scalar(b)) => {
            if scalars_equal(a, b) {
                Ok(())
            } else {
                Err(format!("expected {a}, got {b}"))
            }
        }
        (StepValue::Scalar(_), _) => Err("expected a single value".to_string()),
        (StepValue::Chart(a), StepValue::Chart(b)) => charts_equivalent(a, b),
        (StepValue::Chart(_), _) => Err("expected a chart".to_string()),
        (StepValue::Table(_), _) => unreachable!("tables handled above"),
    }
}

pub fn reals_close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= REAL_TOLERANCE * a.abs().max(b.abs())
}

/// Integers compare exactly; anything involving a real uses the relative tolerance.
pub fn scalars_equal(a: &CellValue, b: &CellValue) -> bool {
    match (a, b) {
        (CellValue::Integer(x), CellValue::Integer(y)) => x == y,
        (CellValue::Text(x), CellValue::Text(y)) => x == y,
        (CellValue::Missing, CellValue::Missing) => true,
        _ => match (a.as_f64(), b.as_f64()) {
            (Some(x), Some(y)) => reals_close(x, y),
            _ => false,
        },
    }
}

fn row_cmp(a: &[CellValue], b: &[CellValue]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Equal multisets of rows over the expected table's columns.
fn tables_equivalent(want: &Table, have: &Table) -> Result<(), String> {
    let names = want.column_names();
    let picked = have.select(&names).map_err(|_| {
        let absent: Vec<&str> = names
            .iter()
            .copied()
            .filter(|n| have.column(n).is_none())
            .collect();
        format!("missing column(s): {}", absent.join(", "))
    })?;
    if picked.row_count() != want.row_count() {
        return Err(format!(
            "expected {} rows, got {}",
            want.row_count(),
            picked.row_count()
        ));
    }
    let sorted = |t: &Table| {
        let mut rows: Vec<Vec<CellValue>> =
            t.rows().map(|r| r.into_iter().cloned().collect()).collect();
        rows.sort_by(|a, b| row_cmp(a, b));
        rows
    };
    let (a, b) = (sorted(want), sorted(&picked));
    for (x, y) in a.iter().zip(&b) {
        if !x.iter().zip(y).all(|(p, q)| scalars_equal(p, q)) {
            return Err("rows differ".to_string());
        }
    }
    Ok(())
}

fn charts_equivalent(want: &ChartSpec, have: &ChartSpec) -> Result<(), String> {
    if want.kind != have.kind {
        return Err(format!(
            "expected a {}, got a {}",
            want.kind.label(),
            have.kind.label()
        ));
    }
    let same = match (&want.data, &have.data) {
        (ChartData::Series { x: ax, y: ay, .. }, ChartData::Series { x: bx, y: by, .. }) => {
            let norm = |x: &[CellValue], y: &[f64]| {
                let mut pts: Vec<(CellValue, f64)> =
                    x.iter().cloned().zip(y.iter().copied()).collect();
                pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
                pts
            };
            let (a, b) = (norm(ax, ay), norm(bx, by));
            a.len() == b.len()
                && a.iter()
                    .zip(&b)
                    .all(|(p, q)| scalars_equal(&p.0, &q.0) && reals_close(p.1, q.1))
        }
        (
            ChartData::Slices {
                labels: al,
                values: av,
                ..
            },
            ChartData::Slices {
                labels: bl,
                values: bv,
                ..
            },
        ) => keyed_equal(al, av, bl, bv),
        (
            ChartData::Regions {
                codes: ac,
                values: av,
                ..
            },
            ChartData::Regions {
                codes: bc,
                values: bv,
                ..
            },
        ) => keyed_equal(ac, av, bc, bv),
        (ChartData::Table { table: a }, ChartData::Table { table: b }) => {
            tables_equivalent(a, b).is_ok()
        }
        _ => false,
    };
    if !same {
        return Err("chart data differs".to_string());
    }
    let report = have.completeness();
    if !report.complete {
        let names: Vec<&str> = report.missing.iter().map(|e| e.label()).collect();
        return Err(format!("chart is missing: {}", names.join(", ")));
    }
    Ok(())
}

fn keyed_equal(ak: &[String], av: &[f64], bk: &[String], bv: &[f64]) -> bool {
    let norm = |k: &[String], v: &[f64]| {
        let mut pairs: Vec<(String, f64)> = k.iter().cloned().zip(v.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        pairs
    };
    let (a, b) = (norm(ak, av), norm(bk, bv));
    a.len() == b.len()
        && a.iter()
            .zip(&b)
            .all(|(p, q)| p.0 == q.0 && reals_close(p.1, q.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activity::QuestionBank;
    use crate::pipeline::CardInstance;

    fn bank() -> &'static QuestionBank {
        QuestionBank::builtin()
    }

    fn spain(country: &str) -> Pipeline {
        Pipeline::new(vec![
            CardInstance::new("open_csv_file").with("file", "players"),
            CardInstance::new("filter")
                .with("column", "country")
                .with("comparator", "==")
                .with("value", country),
            CardInstance::new("average").with("column", "age"),
        ])
    }

    #[test]
    fn average_age_of_spanish_players() {
        let q = bank().get("d3q6").unwrap();
        let r = grade_m_answer(q, &spain("Spain"), &Engine::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Correct);
        assert_eq!(r.points_awarded, 10);
        let r = grade_m_answer(q, &spain("spain"), &Engine::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Incorrect);
        assert!(r.explanation.contains("EMPTY_AGGREGATE"));
    }

    #[test]
    fn canonical_is_correct() {
        for q in bank()
            .questions
            .iter()
            .filter(|q| q.kind == QuestionKind::Pipeline)
        {
            let r = grade_m_answer(
                q,
                q.canonical_pipeline.as_ref().unwrap(),
                &Engine::default(),
            )
            .unwrap();
            assert_eq!(r.verdict, Verdict::Correct, "{}", q.id);
        }
    }

    #[test]
    fn extra_columns_and_reordering_are_fine() {
        let q = bank().get("d1q5").unwrap();
        let p = Pipeline::new(vec![
            CardInstance::new("open_csv_file").with("file", "players.csv"),
            CardInstance::new("select_columns").with("columns", vec!["country", "age", "name"]),
            CardInstance::new("filter")
                .with("column", "country")
                .with("comparator", "==")
                .with("value", "Argentina"),
        ]);
        assert_eq!(
            grade_m_answer(q, &p, &Engine::default()).unwrap().verdict,
            Verdict::Correct
        );
    }

    #[test]
    fn invalid_submission_reports() {
        let q = bank().get("d1q5").unwrap();
        let p = Pipeline::new(vec![CardInstance::new("filter")]);
        let r = grade_m_answer(q, &p, &Engine::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Incorrect);
        assert!(r.validation.is_some());
    }

    #[test]
    fn incomplete_chart_is_incorrect() {
        let q = bank().get("d3q2").unwrap();
        let mut p = q.canonical_pipeline.clone().unwrap();
        p.cards.truncate(5);
        let r = grade_m_answer(q, &p, &Engine::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Incorrect);
        assert_eq!(
            r.missing,
            Some(vec![ChartElement::XLabel, ChartElement::YLabel])
        );
    }

    #[test]
    fn multiple_choice() {
        let q = bank().get("d2q1").unwrap();
        assert_eq!(grade_mc_answer(q, 2).unwrap().verdict, Verdict::Correct);
        assert_eq!(grade_mc_answer(q, 2).unwrap().points_awarded, 10);
        let wrong = grade_mc_answer(q, 0).unwrap();
        assert_eq!(
            (wrong.verdict, wrong.points_awarded),
            (Verdict::Incorrect, 0)
        );
        assert_eq!(
            grade_mc_answer(q, 4),
            Err(GradeError::ChoiceOutOfRange {
                choice: 4,
                options: 4
            })
        );
        let poll = bank().get("d1q1").unwrap();
        assert_eq!(grade_mc_answer(poll, 1).unwrap().points_awarded, 0);
    }

    #[test]
    fn free_form_needs_review() {
        let q = bank().get("d3q1").unwrap();
        let r = grade_answer(
            q,
            &AnswerPayload::Text("numbers".into()),
            &Engine::default(),
        )
        .unwrap();
        assert_eq!((r.verdict, r.points_awarded), (Verdict::NeedsReview, 0));
        assert!(grade_answer(q, &AnswerPayload::Choice(0), &Engine::default()).is_err());
    }

    #[test]
    fn scalar_tolerance() {
        assert!(scalars_equal(
            &CellValue::Real(28.5),
            &CellValue::Real(28.5 + 1e-12)
        ));
        assert!(!scalars_equal(
            &CellValue::Real(28.5),
            &CellValue::Real(28.6)
        ));
        assert!(scalars_equal(&CellValue::Integer(3), &CellValue::Real(3.0)));
        assert!(!scalars_equal(
            &CellValue::Integer(3),
            &CellValue::Integer(4)
        ));
    }
}
