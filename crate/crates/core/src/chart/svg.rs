//! Deterministic SVG 1.1 output. Every data point is one element with class `point`.

use std::fmt::Write;

use super::{check_completeness, pie_angles, ChartData, ChartKind, ChartSpec};
use crate::error::{ErrorCode, OpError};
use crate::table::CellValue;

const PALETTE: [&str; 8] = [
    "#2F6FD6", "#F28C28", "#2E9E44", "#D63A3A", "#8E44AD", "#8A8F98", "#17A2B8", "#B8860B",
];
const SERIES: &str = "#D63A3A";
const FONT: &str = "font-family=\"sans-serif\"";

const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(width: f64, height: f64) -> Frame {
        let x1 = (width - RIGHT).max(LEFT + 1.0);
        let y1 = (height - BOTTOM).max(TOP + 1.0);
        Frame {
            x0: LEFT,
            x1,
            y0: TOP,
            y1,
        }
    }

    fn w(&self) -> f64 {
        self.x1 - self.x0
    }

    fn h(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Linear axis over a padded domain.
#[derive(Debug, Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    step: f64,
    integers: bool,
}

impl Scale {
    fn fit(values: impl Iterator<Item = f64>, include_zero: bool) -> Scale {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut integers = true;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
            integers &= v.fract() == 0.0;
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if include_zero {
            lo = lo.min(0.0);
            hi = hi.max(0.0);
        }
        let mut span = hi - lo;
        if span == 0.0 {
            span = if lo == 0.0 { 1.0 } else { lo.abs() };
        }
        let pad = span * 0.05;
        let lo = if include_zero && lo == 0.0 {
            0.0
        } else {
            lo - pad
        };
        let hi = if include_zero && hi == 0.0 {
            0.0
        } else {
            hi + pad
        };
        let mut step = nice_step((hi - lo) / 5.0);
        if integers && step < 1.0 {
            step = 1.0;
        }
        Scale {
            lo,
            hi,
            step,
            integers,
        }
    }

    fn ticks(&self) -> Vec<f64> {
        let first = (self.lo / self.step).ceil() as i64;
        let last = (self.hi / self.step).floor() as i64;
        (first..=last).map(|i| i as f64 * self.step).collect()
    }

    fn label(&self, v: f64) -> String {
        let v = if v.abs() < self.step * 1e-9 { 0.0 } else { v };
        if self.integers || self.step >= 1.0 {
            format!("{v:.0}")
        } else {
            let places = (-self.step.log10()).ceil().max(0.0) as usize;
            format!("{v:.places$}")
        }
    }

    fn frac(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

fn nice_step(raw: f64) -> f64 {
    if !(raw > 0.0 && raw.is_finite()) {
        return 1.0;
    }
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

struct Doc {
    out: String,
}

impl Doc {
    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn text(&mut self, class: &str, x: f64, y: f64, anchor: &str, extra: &str, body: &str) {
        let _ = writeln!(
            self.out,
            "<text class=\"{class}\" x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" {FONT}{extra}>{}</text>",
            num(x),
            num(y),
            escape(body)
        );
    }
}

/// Renders a chart. Identical spec and size always give identical bytes.
pub fn render_svg(spec: &ChartSpec, width: u32, height: u32) -> Result<String, OpError> {
    if width == 0 || height == 0 {
        return Err(OpError::new(
            ErrorCode::ZeroSize,
            "width and height must be above zero",
        ));
    }
    spec.check_invariants()?;
    let (w, h) = (width as f64, height as f64);
    let frame = Frame::new(w, h);
    let mut doc = Doc { out: String::new() };
    doc.line("<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    doc.line(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" data-kind=\"{}\" data-points=\"{}\">",
        spec.kind.as_str(),
        spec.data.len()
    ));
    doc.line(format!("<rect class=\"background\" x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#FFFFFF\"/>"));
    if let Some(title) = &spec.title {
        doc.text(
            "title",
            w / 2.0,
            26.0,
            "middle",
            " font-size=\"16\" font-weight=\"bold\"",
            title,
        );
    }

    match &spec.data {
        ChartData::Series { x, y, .. } => {
            draw_series(&mut doc, spec, frame, x, y);
        }
        ChartData::Slices { labels, values, .. } => draw_pie(&mut doc, frame, labels, values),
        ChartData::Regions {
            codes,
            labels,
            values,
            ..
        } => draw_map(&mut doc, frame, codes, labels, values),
        ChartData::Table { table } => {
            doc.line("<g class=\"table\">");
            let names = table.column_names();
            let cols = names.len().max(1) as f64;
            let row_h = (frame.h() / (table.row_count() as f64 + 1.0)).clamp(1.0, 20.0);
            let cell_w = frame.w() / cols;
            for (i, name) in names.iter().enumerate() {
                let x = frame.x0 + cell_w * i as f64;
                doc.text(
                    "header",
                    x,
                    frame.y0 + row_h * 0.75,
                    "start",
                    " font-weight=\"bold\" font-size=\"12\"",
                    name,
                );
            }
            for (r, row) in table.rows().enumerate() {
                let y = frame.y0 + row_h * (r as f64 + 1.75);
                let _ = writeln!(doc.out, "<g class=\"point\" data-index=\"{r}\">");
                for (i, cell) in row.iter().enumerate() {
                    let x = frame.x0 + cell_w * i as f64;
                    doc.text(
                        "cell",
                        x,
                        y,
                        "start",
                        " font-size=\"12\"",
                        &cell.to_string(),
                    );
                }
                doc.line("</g>");
            }
            doc.line("</g>");
        }
    }

    if let Some(legend) = &spec.legend {
        doc.line("<g class=\"legend\">");
        for (i, name) in legend.iter().enumerate() {
            let y = frame.y0 + 14.0 * i as f64;
            let x = frame.x1 - 110.0;
            let _ = writeln!(
                doc.out,
                "<rect class=\"swatch\" x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>",
                num(x),
                num(y),
                legend_color(spec.kind, i)
            );
            doc.text(
                "legend-item",
                x + 14.0,
                y + 9.0,
                "start",
                " font-size=\"11\"",
                name,
            );
        }
        doc.line("</g>");
    }

    let report = check_completeness(spec);
    if !report.complete {
        let names: Vec<&str> = report.missing.iter().map(|e| e.label()).collect();
        doc.text(
            "missing",
            8.0,
            h - 8.0,
            "start",
            " font-size=\"12\" fill=\"#B00020\"",
            &format!("⚠ missing: {}", names.join(", ")),
        );
    }
    doc.line("</svg>");
    Ok(doc.out)
}

fn legend_color(kind: ChartKind, i: usize) -> &'static str {
    match kind {
        ChartKind::Line | ChartKind::Bar => SERIES,
        _ => PALETTE[i % PALETTE.len()],
    }
}

fn draw_series(doc: &mut Doc, spec: &ChartSpec, f: Frame, x: &[CellValue], y: &[f64]) {
    let bar = spec.kind == ChartKind::Bar;
    let ys = Scale::fit(y.iter().copied(), bar);
    let numeric_x = !bar && x.iter().all(|v| v.as_f64().is_some());
    let xs = numeric_x.then(|| Scale::fit(x.iter().filter_map(CellValue::as_f64), false));
    let n = x.len().max(1) as f64;
    let band = f.w() / n;
    let px = |i: usize, v: &CellValue| match (xs, v.as_f64()) {
        (Some(s), Some(v)) => f.x0 + s.frac(v) * f.w(),
        _ => f.x0 + band * (i as f64 + 0.5),
    };
    let py = |v: f64| f.y1 - ys.frac(v) * f.h();

    // axes
    doc.line(format!(
        "<line class=\"axis x-axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\"/>",
        num(f.x0),
        num(f.y1),
        num(f.x1),
        num(f.y1)
    ));
    doc.line(format!(
        "<line class=\"axis y-axis\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\"/>",
        num(f.x0),
        num(f.y0),
        num(f.x0),
        num(f.y1)
    ));
    for t in ys.ticks() {
        let ty = py(t);
        doc.line(format!(
            "<line class=\"grid\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#E5E5E5\"/>",
            num(f.x0),
            num(ty),
            num(f.x1),
            num(ty)
        ));
        doc.text(
            "tick y-tick",
            f.x0 - 6.0,
            ty + 4.0,
            "end",
            " font-size=\"11\"",
            &ys.label(t),
        );
    }
    match xs {
        Some(s) => {
            for t in s.ticks() {
                let tx = f.x0 + s.frac(t) * f.w();
                doc.text(
                    "tick x-tick",
                    tx,
                    f.y1 + 16.0,
                    "middle",
                    " font-size=\"11\"",
                    &s.label(t),
                );
            }
        }
        None => {
            let every = x.len().div_ceil(12).max(1);
            for (i, v) in x.iter().enumerate().filter(|(i, _)| i % every == 0) {
                doc.text(
                    "tick x-tick",
                    px(i, v),
                    f.y1 + 16.0,
                    "middle",
                    " font-size=\"11\"",
                    &v.to_string(),
                );
            }
        }
    }
    if let Some(label) = &spec.x_label {
        doc.text(
            "x-label",
            (f.x0 + f.x1) / 2.0,
            f.y1 + 38.0,
            "middle",
            " font-size=\"13\"",
            label,
        );
    }
    if let Some(label) = &spec.y_label {
        let (lx, ly) = (16.0, (f.y0 + f.y1) / 2.0);
        let rot = format!(
            " font-size=\"13\" transform=\"rotate(-90 {} {})\"",
            num(lx),
            num(ly)
        );
        doc.text("y-label", lx, ly, "middle", &rot, label);
    }

    doc.line("<g class=\"series\">");
    if bar {
        let zero = py(0.0_f64.clamp(ys.lo, ys.hi));
        let bw = band * 0.7;
        for (i, (xv, yv)) in x.iter().zip(y).enumerate() {
            let cx = px(i, xv);
            let top = py(*yv);
            let (ry, rh) = if top < zero {
                (top, zero - top)
            } else {
                (zero, top - zero)
            };
            doc.line(format!(
                "<rect class=\"point\" data-index=\"{i}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{SERIES}\"/>",
                num(cx - bw / 2.0), num(ry), num(bw), num(rh)
            ));
        }
    } else {
        let pts: Vec<String> = x
            .iter()
            .zip(y)
            .enumerate()
            .map(|(i, (xv, yv))| format!("{},{}", num(px(i, xv)), num(py(*yv))))
            .collect();
        doc.line(format!(
            "<polyline class=\"line\" points=\"{}\" fill=\"none\" stroke=\"{SERIES}\" stroke-width=\"2\"/>",
            pts.join(" ")
        ));
        for (i, (xv, yv)) in x.iter().zip(y).enumerate() {
            doc.line(format!(
                "<circle class=\"point\" data-index=\"{i}\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{SERIES}\"/>",
                num(px(i, xv)), num(py(*yv))
            ));
        }
    }
    doc.line("</g>");
}

fn draw_pie(doc: &mut Doc, f: Frame, labels: &[String], values: &[f64]) {
    let angles = pie_angles(values);
    let r = (f.w().min(f.h()) / 2.0 - 4.0).max(1.0);
    let (cx, cy) = ((f.x0 + f.x1) / 2.0, (f.y0 + f.y1) / 2.0);
    let at = |deg: f64, rad: f64| {
        let t = (deg - 90.0).to_radians();
        (cx + rad * t.cos(), cy + rad * t.sin())
    };
    doc.line("<g class=\"pie\">");
    let mut start = 0.0;
    for (i, (label, angle)) in labels.iter().zip(&angles).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if *angle >= 360.0 - 1e-9 {
            doc.line(format!(
                "<circle class=\"point\" data-index=\"{i}\" data-angle=\"{angle:.6}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\"><title>{}</title></circle>",
                num(cx), num(cy), num(r), escape(label)
            ));
        } else {
            let (sx, sy) = at(start, r);
            let (ex, ey) = at(start + angle, r);
            let large = u8::from(*angle > 180.0);
            doc.line(format!(
                "<path class=\"point\" data-index=\"{i}\" data-angle=\"{angle:.6}\" d=\"M {} {} L {} {} A {} {} 0 {large} 1 {} {} Z\" fill=\"{color}\" stroke=\"#FFFFFF\"><title>{}</title></path>",
                num(cx), num(cy), num(sx), num(sy), num(r), num(r), num(ex), num(ey), escape(label)
            ));
        }
        if *angle > 0.0 {
            let (lx, ly) = at(start + angle / 2.0, r * 0.65);
            doc.text(
                "slice-label",
                lx,
                ly,
                "middle",
                " font-size=\"11\" fill=\"#FFFFFF\"",
                label,
            );
        }
        start += angle;
    }
    doc.line("</g>");
}

fn draw_map(doc: &mut Doc, f: Frame, codes: &[String], labels: &[String], values: &[f64]) {
    let n = codes.len();
    let cols = (n as f64).sqrt().ceil().max(1.0) as usize;
    let rows = n.div_ceil(cols).max(1);
    let tile = (f.w() / cols as f64).min(f.h() / rows as f64);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    doc.line("<g class=\"map\">");
    for (i, ((code, label), v)) in codes.iter().zip(labels).zip(values).enumerate() {
        let share = if hi > lo { (v - lo) / (hi - lo) } else { 1.0 };
        let x = f.x0 + tile * (i % cols) as f64;
        let y = f.y0 + tile * (i / cols) as f64;
        let _ = writeln!(
            doc.out,
            "<g class=\"point\" data-index=\"{i}\" data-region=\"{}\"><title>{}: {}</title>",
            escape(code),
            escape(label),
            v
        );
        doc.line(format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#FFFFFF\"/>",
            num(x),
            num(y),
            num(tile),
            num(tile),
            shade(share)
        ));
        doc.text(
            "region",
            x + tile / 2.0,
            y + tile / 2.0 + 4.0,
            "middle",
            " font-size=\"11\"",
            code,
        );
        doc.line("</g>");
    }
    doc.line("</g>");
}

/// Light blue to strong blue.
fn shade(t: f64) -> String {
    let (a, b) = ([0xE8, 0xF1, 0xFB], [0x2F, 0x6F, 0xD6]);
    let mix =
        |i: usize| (a[i] as f64 + (b[i] as f64 - a[i] as f64) * t.clamp(0.0, 1.0)).round() as u8;
    format!("#{:02X}{:02X}{:02X}", mix(0), mix(1), mix(2))
}
