//! Minimal deterministic SVG line charts.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{CliError, CliResult};
use crate::output::CsvTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_Y: f64 = 40.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn numeric(table: &CsvTable, col: usize, row: usize) -> CliResult<f64> {
    let cell = &table.rows[row][col];
    cell.parse()
        .map_err(|_| CliError::Validation(format!("`{}` in column {} is not a number", cell, table.header[col])))
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// One polyline per distinct value of `group_col` (in order of first
/// appearance), with axes, ticks and a legend. Rows within a group are
/// drawn in table order.
pub fn emit_svg_lines(table: &CsvTable, x_col: &str, y_col: &str, group_col: &str) -> CliResult<String> {
    if table.rows.is_empty() {
        return Err(CliError::Validation("cannot plot an empty table".into()));
    }
    let col = |name: &str| {
        table
            .column(name)
            .ok_or_else(|| CliError::Validation(format!("column `{name}` not in table")))
    };
    let (xc, yc, gc) = (col(x_col)?, col(y_col)?, col(group_col)?);
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in 0..table.rows.len() {
        let key = table.rows[row][gc].clone();
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups
            .entry(key)
            .or_default()
            .push((numeric(table, xc, row)?, numeric(table, yc, row)?));
    }
    let all = || groups.values().flatten();
    let (x0, x1) = span(all().map(|p| p.0));
    let (y0, y1) = span(all().map(|p| p.1));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN_Y - (y - y0) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let w = &mut svg;
    // Writing into a String cannot fail.
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (left, right, top, bottom) = (MARGIN_LEFT, MARGIN_LEFT + plot_w, MARGIN_Y, HEIGHT - MARGIN_Y);
    let _ = writeln!(
        w,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            w,
            r#"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left}" y2="{py:.2}" stroke="black"/>"#,
            left - 5.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        left + plot_w / 2.0,
        HEIGHT - 6.0,
        escape(x_col)
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        escape(y_col)
    );
    for (i, key) in order.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = groups[key]
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#,
            right + 12.0,
            right + 32.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}">{}={}</text>"#,
            right + 38.0,
            ly + 4.0,
            escape(group_col),
            escape(key)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&str, f64, f64)]) -> CsvTable {
        let mut t = CsvTable::new("g,x,y");
        for (g, x, y) in rows {
            t.push(vec![g.to_string(), x.to_string(), y.to_string()]);
        }
        t
    }

    #[test]
    fn one_polyline_per_group() {
        let t = table(&[("a", 0.0, 1.0), ("a", 1.0, 2.0), ("b", 0.0, 0.5), ("c", 2.0, 0.0)]);
        let svg = emit_svg_lines(&t, "x", "y", "g").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("g=b"));
        assert_eq!(svg, emit_svg_lines(&t, "x", "y", "g").unwrap());
    }

    #[test]
    fn single_row_is_still_valid() {
        let svg = emit_svg_lines(&table(&[("a", 1.0, 1.0)]), "x", "y", "g").unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn missing_group_or_empty_table() {
        let t = table(&[("a", 1.0, 1.0)]);
        assert_eq!(emit_svg_lines(&t, "x", "y", "sigma").unwrap_err().exit_code(), 2);
        assert_eq!(emit_svg_lines(&table(&[]), "x", "y", "g").unwrap_err().exit_code(), 2);
    }
}
