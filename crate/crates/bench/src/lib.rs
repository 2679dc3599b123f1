//! Shared inputs for the benchmarks.

use std::fmt::Write as _;

use cardpipe_core::pipeline::{CardInstance, Pipeline};

pub const FOREST_URL: &str = "http://localhost:8080/datasets/forest_area.csv";

/// Source, filter, select, line chart over the bundled forest data.
pub fn brazil_line() -> Pipeline {
    Pipeline::new(vec![
        CardInstance::new("open_csv_url").with("url", FOREST_URL),
        CardInstance::new("filter")
            .with("column", "country")
            .with("comparator", "==")
            .with("value", "Brazil"),
        CardInstance::new("select_columns").with("columns", vec!["year", "forest_area"]),
        CardInstance::new("line_chart")
            .with("x", "year")
            .with("y", "forest_area"),
    ])
}

/// A players-shaped CSV with `rows` rows.
pub fn synthetic_csv(rows: usize) -> String {
    const COUNTRIES: [&str; 6] = ["Spain", "Brazil", "Argentina", "France", "Turkey", "Japan"];
    let mut out = String::from("name,country,age,potential\n");
    for i in 0..rows {
        let _ = writeln!(
            out,
            "player {i},{},{},{}.5",
            COUNTRIES[i % 6],
            17 + i % 20,
            60 + i % 35
        );
    }
    out
}
