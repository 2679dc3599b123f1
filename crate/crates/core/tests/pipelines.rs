mod common;

use cardpipe_core::chart::{ChartData, ChartKind};
use cardpipe_core::error::ErrorCode;
use cardpipe_core::pipeline::{CardInstance, Engine, Pipeline, StepValue, VariableStore};
use cardpipe_core::table::{CellValue, Provenance};
use common::{raw_rows, FOREST_CSV, FOREST_URL, PLAYERS_URL};

fn open(file: &str) -> CardInstance {
    CardInstance::new("open_csv_file").with("file", file)
}

fn filter(
    column: &str,
    cmp: &str,
    value: impl Into<cardpipe_core::pipeline::FieldValue>,
) -> CardInstance {
    CardInstance::new("filter")
        .with("column", column)
        .with("comparator", cmp)
        .with("value", value)
}

fn brazil_line() -> Pipeline {
    Pipeline::new(vec![
        CardInstance::new("open_csv_url").with("url", FOREST_URL),
        filter("country", "==", "Brazil"),
        CardInstance::new("select_columns").with("columns", vec!["year", "forest_area"]),
        CardInstance::new("line_chart")
            .with("x", "year")
            .with("y", "forest_area"),
    ])
}

fn run(p: &Pipeline) -> cardpipe_core::pipeline::ExecutionTrace {
    Engine::default()
        .execute(p, &mut VariableStore::new())
        .expect("validates")
}

#[test]
fn brazil_line_has_one_point_per_year() {
    let engine = Engine::default();
    let report = engine.validate(&brazil_line(), None);
    assert!(report.is_valid(), "{report:?}");
    assert_eq!(report.steps, 4);

    let trace = run(&brazil_line());
    assert!(trace.is_success());
    assert_eq!(trace.steps.len(), 4);
    let kinds: Vec<&str> = trace
        .steps
        .iter()
        .map(|s| match s.value {
            StepValue::Table(_) => "table",
            StepValue::Scalar(_) => "scalar",
            StepValue::Chart(_) => "chart",
        })
        .collect();
    assert_eq!(kinds, ["table", "table", "table", "chart"]);

    let (h, rows) = raw_rows(FOREST_CSV);
    let years: Vec<i64> = rows
        .iter()
        .filter(|r| common::field(&h, r, "country") == "Brazil")
        .map(|r| common::field(&h, r, "year").parse().unwrap())
        .collect();
    assert_eq!(years.len(), 26);
    assert_eq!((years[0], years[25]), (1990, 2015));

    let StepValue::Chart(chart) = &trace.final_output().unwrap().value else {
        panic!()
    };
    assert_eq!(chart.kind, ChartKind::Line);
    let ChartData::Series { x, y, .. } = &chart.data else {
        panic!()
    };
    assert_eq!(x.len(), years.len());
    assert_eq!(y.len(), years.len());
    assert_eq!(
        x,
        &years
            .iter()
            .map(|y| CellValue::Integer(*y))
            .collect::<Vec<_>>()
    );
}

#[test]
fn url_source_keeps_the_link_as_provenance() {
    let trace = run(&Pipeline::new(vec![
        CardInstance::new("open_csv_url").with("url", FOREST_URL)
    ]));
    let StepValue::Table(t) = &trace.steps[0].value else {
        panic!()
    };
    assert_eq!(t.provenance(), &Provenance::Url(FOREST_URL.to_string()));
}

#[test]
fn players_from_argentina() {
    let trace = run(&Pipeline::new(vec![
        open("players"),
        filter("country", "==", "Argentina"),
        CardInstance::new("show_table"),
    ]));
    let StepValue::Chart(chart) = &trace.final_output().unwrap().value else {
        panic!()
    };
    let ChartData::Table { table } = &chart.data else {
        panic!()
    };
    let names: Vec<String> = table
        .column("name")
        .unwrap()
        .cells()
        .iter()
        .map(|c| c.to_string())
        .collect();
    assert_eq!(names, ["L. Messi", "P. Dybala"]);
}

#[test]
fn average_age_of_spain() {
    let trace = run(&Pipeline::new(vec![
        open("players.csv"),
        filter("country", "==", "Spain"),
        CardInstance::new("average").with("column", "age"),
    ]));
    assert_eq!(
        trace.final_output().unwrap().value,
        StepValue::Scalar(CellValue::Real(28.5))
    );
}

#[test]
fn lowercase_spain_fails_at_runtime() {
    let trace = run(&Pipeline::new(vec![
        open("players"),
        filter("country", "==", "spain"),
        CardInstance::new("average").with("column", "age"),
    ]));
    let e = trace.error.unwrap();
    assert_eq!((e.step_index, e.code), (2, ErrorCode::EmptyAggregate));
    assert_eq!(trace.steps.len(), 2);
}

fn codes(p: &Pipeline) -> Vec<(usize, ErrorCode)> {
    Engine::default()
        .validate(p, None)
        .errors
        .iter()
        .map(|e| (e.step_index, e.code))
        .collect()
}

#[test]
fn composition_errors() {
    assert_eq!(
        codes(&Pipeline::new(vec![filter("age", ">", 3)])),
        [(0, ErrorCode::TypeMismatch)]
    );
    let p = Pipeline::new(vec![
        CardInstance::new("open_csv_url").with("url", PLAYERS_URL),
        CardInstance::new("average").with("column", "age"),
        filter("age", ">", 3),
    ]);
    assert_eq!(codes(&p), [(2, ErrorCode::TypeMismatch)]);
    assert_eq!(codes(&Pipeline::default()), [(0, ErrorCode::EmptyPipeline)]);

    let p = Pipeline::new(vec![
        open("players"),
        CardInstance::new("set_title").with("text", "x"),
    ]);
    assert_eq!(codes(&p), [(1, ErrorCode::ElementBeforeChart)]);

    let p = Pipeline::new(vec![
        open("players"),
        CardInstance::new("show_table"),
        CardInstance::new("show_table"),
    ]);
    assert_eq!(codes(&p), [(2, ErrorCode::MultipleCharts)]);
}

#[test]
fn input_errors() {
    assert_eq!(
        codes(&Pipeline::new(vec![CardInstance::new("teleport")])),
        [(0, ErrorCode::UnknownCard)]
    );
    assert_eq!(
        codes(&Pipeline::new(vec![
            open("players"),
            CardInstance::new("filter").with("column", "age")
        ])),
        [(1, ErrorCode::MissingInput), (1, ErrorCode::MissingInput)]
    );
    assert_eq!(
        codes(&Pipeline::new(vec![
            open("players"),
            filter("height", ">", 3)
        ])),
        [(1, ErrorCode::UnknownColumn)]
    );
    assert_eq!(
        codes(&Pipeline::new(vec![
            open("players"),
            filter("name", ">", 3)
        ])),
        [(1, ErrorCode::BadComparator)]
    );
    assert_eq!(
        codes(&Pipeline::new(vec![
            open("players"),
            filter("name", "=", 3)
        ])),
        [(1, ErrorCode::BadComparator)]
    );
    assert_eq!(
        codes(&Pipeline::new(vec![
            CardInstance::new("load_variable").with("name", "x")
        ])),
        [(0, ErrorCode::UnboundVariable)]
    );
    assert_eq!(
        codes(&Pipeline::new(vec![
            open("players"),
            CardInstance::new("select_columns").with("columns", vec!["name", "name"]),
        ])),
        [(1, ErrorCode::DuplicateColumn)]
    );
}

#[test]
fn schema_flows_through_transforms() {
    // `club` is dropped by the select, so the later filter cannot see it
    let p = Pipeline::new(vec![
        open("players"),
        CardInstance::new("select_columns").with("columns", vec!["name", "age"]),
        filter("club", "==", "Juventus"),
    ]);
    assert_eq!(codes(&p), [(2, ErrorCode::UnknownColumn)]);

    let p = Pipeline::new(vec![
        open("players"),
        CardInstance::new("group_count").with("column", "country"),
        CardInstance::new("pie_chart")
            .with("category", "country")
            .with("value", "count"),
        CardInstance::new("set_title").with("text", "Players by country"),
        CardInstance::new("set_legend").with("text", "Argentina, Portugal, Spain"),
    ]);
    assert!(codes(&p).is_empty());
    let trace = run(&p);
    let StepValue::Chart(c) = &trace.final_output().unwrap().value else {
        panic!()
    };
    assert_eq!(c.data.len(), 3);
    assert!(c.completeness().complete);
}

#[test]
fn variables_within_and_across_runs() {
    let engine = Engine::default();
    let mut store = VariableStore::new();
    let save = Pipeline::new(vec![
        open("players"),
        filter("country", "==", "Spain"),
        CardInstance::new("save_variable").with("name", "spain"),
    ]);
    let saved = engine.execute(&save, &mut store).unwrap();
    assert_eq!(saved.variables_after, ["spain"]);
    assert_eq!(store.len(), 1);

    let load = Pipeline::new(vec![
        CardInstance::new("load_variable").with("name", "spain"),
        CardInstance::new("count"),
    ]);
    assert!(!engine.validate(&load, None).is_valid());
    let trace = engine.execute(&load, &mut store).unwrap();
    assert_eq!(
        trace.final_output().unwrap().value,
        StepValue::Scalar(CellValue::Integer(2))
    );
    let StepValue::Table(t) = &trace.steps[0].value else {
        panic!()
    };
    assert_eq!(Some(t), store.get("spain"));
}

#[test]
fn literals_that_do_not_fit_fail_at_runtime() {
    let trace = run(&Pipeline::new(vec![
        open("players"),
        filter("age", "==", "thirty"),
    ]));
    assert_eq!(trace.error.unwrap().code, ErrorCode::UncoercibleLiteral);
}

#[test]
fn traces_are_deterministic() {
    let a = run(&brazil_line()).to_json();
    let b = run(&brazil_line()).to_json();
    assert_eq!(a, b);
    assert!(a.contains("\"kind\": \"chart\""));
}

#[test]
fn missing_local_file_is_a_load_error() {
    let dir = std::env::temp_dir();
    let engine = Engine::default().with_file_root(&dir);
    let trace = engine
        .execute(
            &Pipeline::new(vec![open("definitely-not-here.csv")]),
            &mut VariableStore::new(),
        )
        .unwrap();
    assert_eq!(trace.error.unwrap().code, ErrorCode::LoadFailed);

    let path = dir.join(format!("cardpipe-{}.csv", std::process::id()));
    std::fs::write(&path, "a,b\n1,x\n2,y\n").unwrap();
    let trace = engine
        .execute(
            &Pipeline::new(vec![
                open(path.file_name().unwrap().to_str().unwrap()),
                CardInstance::new("count"),
            ]),
            &mut VariableStore::new(),
        )
        .unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(
        trace.final_output().unwrap().value,
        StepValue::Scalar(CellValue::Integer(2))
    );
}
