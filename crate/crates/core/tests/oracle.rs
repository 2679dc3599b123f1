mod common;

use std::sync::Arc;

use cardpipe_core::activity::{
    grade_answer, grade_m_answer, AnswerPayload, QuestionBank, QuestionKind, ScoringPolicy,
    SessionStore, Verdict,
};
use cardpipe_core::chart::{ChartData, ChartElement};
use cardpipe_core::pipeline::{CardInstance, Engine, Pipeline, StepValue, VariableStore};
use cardpipe_core::table::CellValue;
use common::{close, oracle, table_matches, Expected, PLAYERS_URL};

fn m_questions() -> Vec<&'static cardpipe_core::activity::Question> {
    QuestionBank::builtin()
        .questions
        .iter()
        .filter(|q| q.kind == QuestionKind::Pipeline)
        .collect()
}

fn check(expected: &Expected, value: &StepValue) -> Result<(), String> {
    match (expected, value) {
        (Expected::Rows { .. }, StepValue::Table(t)) => table_matches(expected, t),
        (Expected::Integer(i), StepValue::Scalar(CellValue::Integer(j))) if i == j => Ok(()),
        (Expected::Real(r), StepValue::Scalar(c)) if c.as_f64().is_some_and(|v| close(*r, v)) => {
            Ok(())
        }
        (Expected::Series { x, y }, StepValue::Chart(c)) => {
            let ChartData::Series { x: cx, y: cy, .. } = &c.data else {
                return Err("not a series".into());
            };
            let xs: Vec<String> = cx.iter().map(|c| c.to_string()).collect();
            if &xs != x || cy.len() != y.len() || !cy.iter().zip(y).all(|(a, b)| close(*a, *b)) {
                return Err(format!("series differs: {xs:?}"));
            }
            Ok(())
        }
        _ => Err(format!("expected {expected:?}, got {value:?}")),
    }
}

#[test]
fn canonical_answers_match_the_raw_data() {
    let engine = Engine::default();
    let qs = m_questions();
    assert_eq!(qs.len(), 9);
    for q in qs {
        let p = q.canonical_pipeline.as_ref().unwrap();
        let trace = engine.execute(p, &mut VariableStore::new()).unwrap();
        let out = trace.final_output().unwrap();
        check(&oracle(&q.id), &out.value).unwrap_or_else(|e| panic!("{}: {e}", q.id));
    }
}

#[test]
fn oracle_values_are_what_the_data_says() {
    assert_eq!(oracle("d3q6"), Expected::Real(28.5));
    let Expected::Rows { rows, .. } = oracle("d1q5") else {
        panic!()
    };
    assert_eq!(rows, [["L. Messi"], ["P. Dybala"]]);
    let Expected::Series { x, .. } = oracle("d3q2") else {
        panic!()
    };
    assert_eq!(x.len(), 26);
}

#[test]
fn canonical_pipelines_grade_as_correct() {
    let engine = Engine::default();
    for q in m_questions() {
        let g = grade_m_answer(q, q.canonical_pipeline.as_ref().unwrap(), &engine).unwrap();
        assert_eq!(g.verdict, Verdict::Correct, "{}: {}", q.id, g.explanation);
        assert_eq!(g.points_awarded, q.base_points);
    }
}

#[test]
fn another_route_to_the_same_rows_is_accepted() {
    let engine = Engine::default();
    let q = QuestionBank::builtin().get("d1q5").unwrap();
    // url source, extra columns and a reordered select all still name the same players
    let alt = Pipeline::new(vec![
        CardInstance::new("open_csv_url").with("url", PLAYERS_URL),
        CardInstance::new("select_columns").with("columns", vec!["country", "name", "age"]),
        CardInstance::new("filter")
            .with("column", "country")
            .with("comparator", "==")
            .with("value", "Argentina"),
    ]);
    let g = grade_m_answer(q, &alt, &engine).unwrap();
    assert_eq!(g.verdict, Verdict::Correct, "{}", g.explanation);

    let wrong = Pipeline::new(vec![
        CardInstance::new("open_csv_file").with("file", "players.csv"),
        CardInstance::new("filter")
            .with("column", "country")
            .with("comparator", "==")
            .with("value", "Spain"),
    ]);
    assert_eq!(
        grade_m_answer(q, &wrong, &engine).unwrap().verdict,
        Verdict::Incorrect
    );
}

#[test]
fn scalar_answers_tolerate_other_routes() {
    let engine = Engine::default();
    let q = QuestionBank::builtin().get("d3q7").unwrap();
    let alt = Pipeline::new(vec![
        CardInstance::new("open_csv_url").with("url", PLAYERS_URL),
        CardInstance::new("filter")
            .with("column", "age")
            .with("comparator", ">=")
            .with("value", 18),
        CardInstance::new("maximum").with("column", "age"),
    ]);
    assert_eq!(
        grade_m_answer(q, &alt, &engine).unwrap().verdict,
        Verdict::Correct
    );
}

#[test]
fn charts_without_labels_are_not_accepted() {
    let engine = Engine::default();
    let q = QuestionBank::builtin().get("d3q2").unwrap();
    let mut p = q.canonical_pipeline.clone().unwrap();
    p.cards.truncate(4);
    let g = grade_m_answer(q, &p, &engine).unwrap();
    assert_eq!(g.verdict, Verdict::Incorrect);
    assert_eq!(g.missing.unwrap(), ChartElement::ALL[..3]);
}

#[test]
fn invalid_answers_carry_the_validation_report() {
    let engine = Engine::default();
    let q = QuestionBank::builtin().get("d3q6").unwrap();
    let p = Pipeline::new(vec![CardInstance::new("average").with("column", "age")]);
    let g = grade_answer(q, &AnswerPayload::Pipeline(p), &engine).unwrap();
    assert_eq!(g.verdict, Verdict::Incorrect);
    assert!(!g.validation.unwrap().is_valid());
}

#[test]
fn bank_checks_itself() {
    QuestionBank::builtin()
        .self_check(&Engine::default())
        .unwrap();
}

#[test]
fn session_logs_replay_to_the_same_state() {
    let dir = std::env::temp_dir().join(format!("cardpipe-sessions-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let engine = Arc::new(Engine::default());
    let bank = Arc::new(QuestionBank::builtin().clone());
    let policy = ScoringPolicy::default();
    let store = SessionStore::new(engine.clone(), bank.clone(), policy)
        .with_log_dir(&dir)
        .unwrap();
    let s = store.create().unwrap();
    store.join(&s.id, "ada").unwrap();
    store.join(&s.id, "ada").unwrap();
    let canonical = bank
        .get("d3q6")
        .unwrap()
        .canonical_pipeline
        .clone()
        .unwrap();
    let (g, delta, score) = store
        .submit(
            &s.id,
            "ada",
            "d3q6",
            AnswerPayload::Pipeline(canonical.clone()),
        )
        .unwrap();
    assert_eq!(g.verdict, Verdict::Correct);
    assert_eq!(delta, score);
    assert!(store
        .submit(&s.id, "ada", "d3q6", AnswerPayload::Pipeline(canonical))
        .is_err());
    let (_, after_hint) = store.request_hint(&s.id, "ada", "d3q7").unwrap().unwrap();
    assert_eq!(after_hint, score - 1);
    let before = store.get(&s.id).unwrap();

    let reopened = SessionStore::new(engine, bank, policy)
        .with_log_dir(&dir)
        .unwrap();
    let after = reopened.get(&s.id).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(after, before);
    assert_eq!(after.roster, ["ada"]);
}
