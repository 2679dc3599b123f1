//! Helpers shared by integration tests: raw-CSV oracles, table strategies and
//! random card sequences.
#![allow(dead_code)]

use cardpipe_core::pipeline::{CardInstance, FieldValue, Pipeline};
use cardpipe_core::table::{CellValue, Column, DType, Provenance, Table};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::Rng;

pub const PLAYERS_CSV: &str = include_str!("../../assets/datasets/players/players.csv");
pub const FOREST_CSV: &str = include_str!("../../assets/datasets/forest_area/forest_area.csv");

pub const FOREST_URL: &str = "http://localhost:8080/datasets/forest_area.csv";
pub const PLAYERS_URL: &str = "http://localhost:8080/datasets/players.csv";

/// Header plus rows, split on commas. The bundled fixtures never quote.
pub fn raw_rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.is_empty());
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

pub fn field<'r>(header: &[String], row: &'r [String], name: &str) -> &'r str {
    let i = header.iter().position(|h| h == name).unwrap();
    &row[i]
}

/// An expected final output computed straight from the raw rows.
#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    Rows {
        columns: Vec<String>,
        rows: Vec<Vec<String>>,
    },
    Integer(i64),
    Real(f64),
    Series {
        x: Vec<String>,
        y: Vec<f64>,
    },
}

fn filtered(csv: &str, keep: impl Fn(&[String], &[String]) -> bool, cols: &[&str]) -> Expected {
    let (header, rows) = raw_rows(csv);
    let columns: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
    let rows = rows
        .iter()
        .filter(|r| keep(&header, r))
        .map(|r| {
            cols.iter()
                .map(|c| field(&header, r, c).to_string())
                .collect()
        })
        .collect();
    Expected::Rows { columns, rows }
}

fn num(header: &[String], row: &[String], name: &str) -> f64 {
    field(header, row, name).parse().unwrap()
}

/// Brute-force answers for the executable questions, by question id.
pub fn oracle(question: &str) -> Expected {
    let players =
        |keep: &dyn Fn(&[String], &[String]) -> bool| filtered(PLAYERS_CSV, keep, &["name"]);
    match question {
        "d1q5" => players(&|h, r| field(h, r, "country") == "Argentina"),
        "d1q6" => players(&|h, r| field(h, r, "club") == "Real Madrid"),
        "d2q3" => filtered(
            FOREST_CSV,
            |h, r| field(h, r, "country") == "Brazil",
            &["country", "year", "forest_area"],
        ),
        "d3q2" => {
            let (h, rows) = raw_rows(FOREST_CSV);
            let brazil: Vec<&Vec<String>> = rows
                .iter()
                .filter(|r| field(&h, r, "country") == "Brazil")
                .collect();
            Expected::Series {
                x: brazil
                    .iter()
                    .map(|r| field(&h, r, "year").to_string())
                    .collect(),
                y: brazil.iter().map(|r| num(&h, r, "forest_area")).collect(),
            }
        }
        "d3q4" => players(&|h, r| num(h, r, "age") > 29.0),
        "d3q5" => players(&|h, r| num(h, r, "potential") > 90.0),
        "d3q6" => {
            let (h, rows) = raw_rows(PLAYERS_CSV);
            let ages: Vec<f64> = rows
                .iter()
                .filter(|r| field(&h, r, "country") == "Spain")
                .map(|r| num(&h, r, "age"))
                .collect();
            Expected::Real(ages.iter().sum::<f64>() / ages.len() as f64)
        }
        "d3q7" => {
            let (h, rows) = raw_rows(PLAYERS_CSV);
            Expected::Integer(
                rows.iter()
                    .map(|r| field(&h, r, "age").parse::<i64>().unwrap())
                    .max()
                    .unwrap(),
            )
        }
        "d3q8" => {
            let (h, rows) = raw_rows(PLAYERS_CSV);
            Expected::Integer(
                rows.iter()
                    .map(|r| field(&h, r, "potential").parse::<i64>().unwrap())
                    .min()
                    .unwrap(),
            )
        }
        other => panic!("no oracle for {other}"),
    }
}

pub fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Raw text against a typed cell: numbers within tolerance, text exactly.
pub fn cell_matches(raw: &str, cell: &CellValue) -> bool {
    match cell {
        CellValue::Integer(i) => raw.parse::<i64>().ok() == Some(*i),
        CellValue::Real(r) => raw.parse::<f64>().is_ok_and(|v| close(v, *r)),
        CellValue::Text(s) => raw == s,
        CellValue::Missing => raw.is_empty(),
    }
}

/// Compares a table with expected rows as multisets (order-free).
pub fn table_matches(expected: &Expected, table: &Table) -> Result<(), String> {
    let Expected::Rows { columns, rows } = expected else {
        return Err("expected rows".into());
    };
    let mut have: Vec<Vec<&CellValue>> = Vec::new();
    for row in 0..table.row_count() {
        let mut cells = Vec::new();
        for c in columns {
            let col = table.column(c).ok_or(format!("missing column {c}"))?;
            cells.push(&col.cells()[row]);
        }
        have.push(cells);
    }
    if have.len() != rows.len() {
        return Err(format!("expected {} rows, got {}", rows.len(), have.len()));
    }
    let mut used = vec![false; have.len()];
    for want in rows {
        let hit = (0..have.len())
            .find(|&i| !used[i] && want.iter().zip(&have[i]).all(|(w, h)| cell_matches(w, h)));
        match hit {
            Some(i) => used[i] = true,
            None => return Err(format!("row {want:?} not produced")),
        }
    }
    Ok(())
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

fn arb_cells(dtype: DType, rows: usize) -> BoxedStrategy<Vec<CellValue>> {
    let cell: BoxedStrategy<CellValue> = match dtype {
        DType::Integer => prop_oneof![
            8 => (-50i64..50).prop_map(CellValue::Integer),
            1 => Just(CellValue::Missing),
        ]
        .boxed(),
        DType::Real => prop_oneof![
            8 => (-1.0e6f64..1.0e6).prop_map(CellValue::Real),
            1 => Just(CellValue::Missing),
        ]
        .boxed(),
        DType::Text => prop_oneof![
            8 => "[a-e]{1,3}".prop_map(CellValue::Text),
            1 => Just(CellValue::Missing),
        ]
        .boxed(),
    };
    proptest::collection::vec(cell, rows).boxed()
}

pub fn arb_dtype() -> impl Strategy<Value = DType> {
    prop_oneof![Just(DType::Integer), Just(DType::Real), Just(DType::Text)]
}

/// Tables with 1 to 4 columns named `c0..`, 0 to 30 rows, some cells missing.
pub fn arb_table() -> impl Strategy<Value = Table> {
    (proptest::collection::vec(arb_dtype(), 1..5), 0usize..31).prop_flat_map(|(dtypes, rows)| {
        let cols: Vec<BoxedStrategy<Vec<CellValue>>> =
            dtypes.iter().map(|d| arb_cells(*d, rows)).collect();
        (Just(dtypes), cols).prop_map(|(dtypes, cells)| {
            let columns = names(dtypes.len())
                .into_iter()
                .zip(dtypes)
                .zip(cells)
                .map(|((n, d), c)| Column::new(n, d, c).unwrap())
                .collect();
            Table::new(columns, Provenance::Derived("generated".into())).unwrap()
        })
    })
}

/// Numeric column names of a generated table.
pub fn numeric_columns(t: &Table) -> Vec<String> {
    t.columns()
        .iter()
        .filter(|c| c.dtype().is_numeric())
        .map(|c| c.name().to_string())
        .collect()
}

const COLUMNS: &[&str] = &[
    "name",
    "club",
    "country",
    "age",
    "potential",
    "overall",
    "year",
    "forest_area",
    "count",
    "city",
    "station",
    "nope",
];
const COMPARATORS: &[&str] = &["==", "!=", ">", "<", ">=", "<=", "contains", "=~"];
const CARDS: &[&str] = &[
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
    "teleport",
];

fn column(rng: &mut impl Rng) -> String {
    COLUMNS.choose(rng).unwrap().to_string()
}

fn literal(rng: &mut impl Rng) -> FieldValue {
    match rng.random_range(0..6) {
        0 => FieldValue::Integer(rng.random_range(20..100)),
        1 => FieldValue::Real(rng.random_range(0.0..6000.0)),
        2 => FieldValue::from(
            *["Spain", "Brazil", "Argentina", "Real Madrid", "Istanbul"]
                .choose(rng)
                .unwrap(),
        ),
        3 => FieldValue::from(*["30", "1995", "x"].choose(rng).unwrap()),
        4 => FieldValue::from("a"),
        _ => FieldValue::from(vec!["age"]),
    }
}

fn random_card(rng: &mut impl Rng, first: bool) -> CardInstance {
    // bias the first card towards sources so that many sequences get past step 0
    let id = if first && rng.random_bool(0.8) {
        *["open_csv_file", "open_csv_url", "load_variable"]
            .choose(rng)
            .unwrap()
    } else {
        *CARDS.choose(rng).unwrap()
    };
    let fields: Vec<(&str, FieldValue)> = match id {
        "open_csv_file" => {
            let f = [
                "players",
                "players.csv",
                "forest_area",
                "city_bikes.csv",
                "nowhere.csv",
            ];
            vec![("file", (*f.choose(rng).unwrap()).into())]
        }
        "open_csv_url" => {
            let u = [
                FOREST_URL,
                PLAYERS_URL,
                "ftp://example.org/x.csv",
                "http://localhost:8080/datasets/research_budgets.csv",
            ];
            vec![("url", (*u.choose(rng).unwrap()).into())]
        }
        "filter" => vec![
            ("column", column(rng).into()),
            ("comparator", (*COMPARATORS.choose(rng).unwrap()).into()),
            ("value", literal(rng)),
        ],
        "select_columns" => {
            let n = rng.random_range(0..4);
            vec![(
                "columns",
                FieldValue::List((0..n).map(|_| column(rng)).collect()),
            )]
        }
        "group_count" | "average" | "minimum" | "maximum" => vec![("column", column(rng).into())],
        "save_variable" | "load_variable" => {
            vec![("name", (*["v", "w", ""].choose(rng).unwrap()).into())]
        }
        "line_chart" | "bar_chart" => vec![("x", column(rng).into()), ("y", column(rng).into())],
        "pie_chart" => vec![
            ("category", column(rng).into()),
            ("value", column(rng).into()),
        ],
        "map_chart" => vec![
            ("region", column(rng).into()),
            ("value", column(rng).into()),
        ],
        "set_title" | "set_x_label" | "set_y_label" | "set_legend" => {
            vec![(
                "text",
                (*["Forest", "Year", "", "a, b"].choose(rng).unwrap()).into(),
            )]
        }
        _ => vec![],
    };
    let mut card = CardInstance::new(id);
    for (name, value) in fields {
        if rng.random_bool(0.95) {
            card = card.with(name, value);
        }
    }
    if rng.random_bool(0.03) {
        card = card.with("bogus", FieldValue::Integer(1));
    }
    card
}

/// A random sequence of 1 to 7 cards with plausible and implausible inputs.
pub fn random_pipeline(rng: &mut impl Rng) -> Pipeline {
    let n = rng.random_range(1..8);
    Pipeline::new((0..n).map(|i| random_card(rng, i == 0)).collect())
}
