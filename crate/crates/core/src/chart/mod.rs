//! Chart specs built from tables, element cards and completeness checks.

mod regions;
mod svg;

use serde::{Deserialize, Serialize};

use crate::catalog::Catalog;
use crate::error::{ErrorCode, OpError};
use crate::table::{CellValue, DType, Table};

pub use self::regions::{is_alpha3, region_code, region_name};
pub use self::svg::render_svg;

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChartKind {
    TableView,
    Line,
    Bar,
    Pie,
    Map,
}

impl ChartKind {
    pub const ALL: [ChartKind; 5] = [
        ChartKind::TableView,
        ChartKind::Line,
        ChartKind::Bar,
        ChartKind::Pie,
        ChartKind::Map,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChartKind::TableView => "TABLE_VIEW",
            ChartKind::Line => "LINE",
            ChartKind::Bar => "BAR",
            ChartKind::Pie => "PIE",
            ChartKind::Map => "MAP",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ChartKind::TableView => "table",
            ChartKind::Line => "line chart",
            ChartKind::Bar => "bar chart",
            ChartKind::Pie => "pie chart",
            ChartKind::Map => "map chart",
        }
    }

    pub fn card_id(self) -> &'static str {
        match self {
            ChartKind::TableView => "show_table",
            ChartKind::Line => "line_chart",
            ChartKind::Bar => "bar_chart",
            ChartKind::Pie => "pie_chart",
            ChartKind::Map => "map_chart",
        }
    }

    pub fn for_card(card: &str) -> Option<ChartKind> {
        ChartKind::ALL.into_iter().find(|k| k.card_id() == card)
    }

    /// Elements a chart of this kind needs before it counts as finished.
    pub fn required_elements(self) -> &'static [ChartElement] {
        match self {
            ChartKind::Line | ChartKind::Bar => &[
                ChartElement::Title,
                ChartElement::XLabel,
                ChartElement::YLabel,
            ],
            ChartKind::Pie | ChartKind::Map => &[ChartElement::Title, ChartElement::Legend],
            ChartKind::TableView => &[ChartElement::Title],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChartElement {
    Title,
    XLabel,
    YLabel,
    Legend,
}

impl ChartElement {
    pub const ALL: [ChartElement; 4] = [
        ChartElement::Title,
        ChartElement::XLabel,
        ChartElement::YLabel,
        ChartElement::Legend,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChartElement::Title => "TITLE",
            ChartElement::XLabel => "X_LABEL",
            ChartElement::YLabel => "Y_LABEL",
            ChartElement::Legend => "LEGEND",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ChartElement::Title => "title",
            ChartElement::XLabel => "x-axis label",
            ChartElement::YLabel => "y-axis label",
            ChartElement::Legend => "legend",
        }
    }

    pub fn card_id(self) -> &'static str {
        match self {
            ChartElement::Title => "set_title",
            ChartElement::XLabel => "set_x_label",
            ChartElement::YLabel => "set_y_label",
            ChartElement::Legend => "set_legend",
        }
    }

    pub fn for_card(card: &str) -> Option<ChartElement> {
        ChartElement::ALL.into_iter().find(|e| e.card_id() == card)
    }
}

/// A chart element card as handed out during a game, tip included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartElementCard {
    pub card_id: String,
    pub element: ChartElement,
    pub title: String,
    pub tip: String,
}

impl ChartElementCard {
    pub fn from_catalog(catalog: &Catalog, element: ChartElement) -> Option<ChartElementCard> {
        let spec = catalog.get_card(element.card_id()).ok()?;
        let tip = spec.tips.clone().filter(|t| !t.trim().is_empty())?;
        Some(ChartElementCard {
            card_id: spec.id.clone(),
            element,
            title: spec.title.clone(),
            tip,
        })
    }
}

/// Encoded chart data. Series and slices keep the row order of the source table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChartData {
    Table {
        table: Table,
    },
    Series {
        x_column: String,
        y_column: String,
        x: Vec<CellValue>,
        y: Vec<f64>,
    },
    Slices {
        category_column: String,
        value_column: String,
        labels: Vec<String>,
        values: Vec<f64>,
    },
    Regions {
        region_column: String,
        value_column: String,
        codes: Vec<String>,
        labels: Vec<String>,
        values: Vec<f64>,
    },
}

impl ChartData {
    /// Number of data points: rows, x/y pairs, slices or regions.
    pub fn len(&self) -> usize {
        match self {
            ChartData::Table { table } => table.row_count(),
            ChartData::Series { y, .. } => y.len(),
            ChartData::Slices { values, .. } => values.len(),
            ChartData::Regions { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub spec_version: u32,
    pub kind: ChartKind,
    pub data: ChartData,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub x_label: Option<String>,
    #[serde(default)]
    pub y_label: Option<String>,
    #[serde(default)]
    pub legend: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub missing: Vec<ChartElement>,
    pub complete: bool,
}

impl ChartSpec {
    pub fn is_set(&self, element: ChartElement) -> bool {
        match element {
            ChartElement::Title => self.title.is_some(),
            ChartElement::XLabel => self.x_label.is_some(),
            ChartElement::YLabel => self.y_label.is_some(),
            ChartElement::Legend => self.legend.is_some(),
        }
    }

    pub fn completeness(&self) -> CompletenessReport {
        check_completeness(self)
    }

    /// Per-kind data invariants. Specs decoded from JSON are not trusted.
    pub fn check_invariants(&self) -> Result<(), OpError> {
        let bad = |code, msg: &str| Err(OpError::new(code, msg));
        match (&self.kind, &self.data) {
            (ChartKind::TableView, ChartData::Table { .. }) => Ok(()),
            (ChartKind::Line | ChartKind::Bar, ChartData::Series { x, y, .. }) => {
                if x.len() != y.len() {
                    return bad(ErrorCode::BadInput, "x and y series differ in length");
                }
                if y.iter().any(|v| !v.is_finite()) {
                    return bad(
                        ErrorCode::NonNumericValue,
                        "y values must be finite numbers",
                    );
                }
                Ok(())
            }
            (ChartKind::Pie, ChartData::Slices { labels, values, .. }) => {
                if labels.len() != values.len() {
                    return bad(ErrorCode::BadInput, "labels and values differ in length");
                }
                check_pie_values(values)
            }
            (
                ChartKind::Map,
                ChartData::Regions {
                    codes,
                    labels,
                    values,
                    ..
                },
            ) => {
                if codes.len() != values.len() || labels.len() != values.len() {
                    return bad(ErrorCode::BadInput, "regions and values differ in length");
                }
                if let Some(code) = codes.iter().find(|c| !is_alpha3(c)) {
                    return Err(OpError::new(
                        ErrorCode::BadRegionCode,
                        format!("`{code}` is not an ISO 3166-1 alpha-3 code"),
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad(
                        ErrorCode::NonNumericValue,
                        "map values must be finite numbers",
                    );
                }
                Ok(())
            }
            (kind, _) => Err(OpError::new(
                ErrorCode::BadInput,
                format!("data does not match chart kind {}", kind.as_str()),
            )),
        }
    }
}

/// Column roles for [`build_chart`]. Unused roles are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartMapping {
    #[serde(default)]
    pub x: Option<String>,
    #[serde(default)]
    pub y: Option<String>,
    #[serde(default)]
    pub category: Option<String>,
    #[serde(default)]
    pub value: Option<String>,
    #[serde(default)]
    pub region: Option<String>,
}

fn role<'a>(name: &'a Option<String>, role: &str) -> Result<&'a str, OpError> {
    name.as_deref().ok_or_else(|| {
        OpError::new(
            ErrorCode::MissingInput,
            format!("choose a column for `{role}`"),
        )
    })
}

fn column<'t>(table: &'t Table, name: &str) -> Result<&'t crate::table::Column, OpError> {
    table.column(name).ok_or_else(|| {
        OpError::new(
            ErrorCode::UnknownColumn,
            format!("there is no column `{name}`"),
        )
    })
}

fn numeric<'t>(table: &'t Table, name: &str) -> Result<&'t crate::table::Column, OpError> {
    let col = column(table, name)?;
    if !col.dtype().is_numeric() {
        return Err(OpError::new(
            ErrorCode::NonNumericValue,
            format!("column `{name}` holds {} values, not numbers", col.dtype()),
        ));
    }
    Ok(col)
}

fn text_column<'t>(table: &'t Table, name: &str) -> Result<&'t crate::table::Column, OpError> {
    let col = column(table, name)?;
    if col.dtype() != DType::Text {
        return Err(OpError::new(
            ErrorCode::NonTextCategory,
            format!(
                "column `{name}` holds {} values; labels need text",
                col.dtype()
            ),
        ));
    }
    Ok(col)
}

fn check_pie_values(values: &[f64]) -> Result<(), OpError> {
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(OpError::new(
            ErrorCode::BadPieValues,
            "pie values must be zero or more",
        ));
    }
    if !values.iter().any(|v| *v > 0.0) {
        return Err(OpError::new(
            ErrorCode::BadPieValues,
            "a pie needs at least one value above zero",
        ));
    }
    Ok(())
}

/// Builds an element-free chart. Rows with a missing mapped cell are skipped.
pub fn build_chart(
    table: &Table,
    kind: ChartKind,
    mapping: &ChartMapping,
) -> Result<ChartSpec, OpError> {
    let data = match kind {
        ChartKind::TableView => ChartData::Table {
            table: table.clone(),
        },
        ChartKind::Line | ChartKind::Bar => {
            let (xn, yn) = (role(&mapping.x, "x")?, role(&mapping.y, "y")?);
            let xc = column(table, xn)?;
            let yc = numeric(table, yn)?;
            let (mut x, mut y) = (Vec::new(), Vec::new());
            for (xv, yv) in xc.cells().iter().zip(yc.cells()) {
                if let (false, Some(v)) = (xv.is_missing(), yv.as_f64()) {
                    x.push(xv.clone());
                    y.push(v);
                }
            }
            ChartData::Series {
                x_column: xn.to_string(),
                y_column: yn.to_string(),
                x,
                y,
            }
        }
        ChartKind::Pie => {
            let (cn, vn) = (
                role(&mapping.category, "category")?,
                role(&mapping.value, "value")?,
            );
            let cc = text_column(table, cn)?;
            let vc = numeric(table, vn)?;
            let (mut labels, mut values) = (Vec::new(), Vec::new());
            for (c, v) in cc.cells().iter().zip(vc.cells()) {
                if let (CellValue::Text(c), Some(v)) = (c, v.as_f64()) {
                    labels.push(c.clone());
                    values.push(v);
                }
            }
            check_pie_values(&values)?;
            ChartData::Slices {
                category_column: cn.to_string(),
                value_column: vn.to_string(),
                labels,
                values,
            }
        }
        ChartKind::Map => {
            let (rn, vn) = (
                role(&mapping.region, "region")?,
                role(&mapping.value, "value")?,
            );
            let rc = text_column(table, rn)?;
            let vc = numeric(table, vn)?;
            let (mut codes, mut labels, mut values) = (Vec::new(), Vec::new(), Vec::new());
            for (r, v) in rc.cells().iter().zip(vc.cells()) {
                if let (CellValue::Text(r), Some(v)) = (r, v.as_f64()) {
                    let code = region_code(r).ok_or_else(|| {
                        OpError::new(
                            ErrorCode::BadRegionCode,
                            format!("`{r}` is not a known country or code"),
                        )
                    })?;
                    codes.push(code.to_string());
                    labels.push(r.clone());
                    values.push(v);
                }
            }
            ChartData::Regions {
                region_column: rn.to_string(),
                value_column: vn.to_string(),
                codes,
                labels,
                values,
            }
        }
    };
    Ok(ChartSpec {
        spec_version: SPEC_VERSION,
        kind,
        data,
        title: None,
        x_label: None,
        y_label: None,
        legend: None,
    })
}

/// Sets one element, replacing any earlier value. A legend is a comma-separated list.
pub fn apply_element(
    spec: &ChartSpec,
    element: ChartElement,
    value: &str,
) -> Result<ChartSpec, OpError> {
    let empty = || {
        OpError::new(
            ErrorCode::EmptyValue,
            format!("the {} is empty", element.label()),
        )
    };
    let value = value.trim();
    if value.is_empty() {
        return Err(empty());
    }
    let mut out = spec.clone();
    match element {
        ChartElement::Title => out.title = Some(value.to_string()),
        ChartElement::XLabel => out.x_label = Some(value.to_string()),
        ChartElement::YLabel => out.y_label = Some(value.to_string()),
        ChartElement::Legend => {
            let names: Vec<String> = value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            if names.is_empty() {
                return Err(empty());
            }
            out.legend = Some(names);
        }
    }
    Ok(out)
}

pub fn check_completeness(spec: &ChartSpec) -> CompletenessReport {
    let missing: Vec<ChartElement> = spec
        .kind
        .required_elements()
        .iter()
        .copied()
        .filter(|e| !spec.is_set(*e))
        .collect();
    CompletenessReport {
        complete: missing.is_empty(),
        missing,
    }
}

/// Slice angles in degrees, proportional to each value's share of the total.
pub fn pie_angles(values: &[f64]) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| 360.0 * v / total).collect()
}
