//! Line plots rendered from a report's CSV, and nothing else.

use std::fmt::Write;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Plots every column against the first. Axes switch to log scale when all
/// values on them are positive. Returns `None` for tables with fewer than two
/// rows or columns.
pub fn plot_csv(csv_bytes: &[u8], title: &str) -> Result<Option<String>> {
    let mut reader = csv::Reader::from_reader(csv_bytes);
    let fail = |e: csv::Error| Error::Format(e.to_string());
    let header: Vec<String> = reader.headers().map_err(fail)?.iter().map(str::to_owned).collect();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(fail)?;
        rows.push(rec.iter().map(|s| s.parse::<f64>().unwrap_or(f64::NAN)).collect());
    }
    if header.len() < 2 || rows.len() < 2 {
        return Ok(None);
    }
    let finite = |v: f64| v.is_finite();
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let ys: Vec<f64> = rows.iter().flat_map(|r| r[1..].iter().copied()).filter(|v| finite(*v)).collect();
    let log_x = xs.iter().all(|v| *v > 0.0);
    let log_y = !ys.is_empty() && ys.iter().all(|v| *v > 0.0);
    let tx = |v: f64| if log_x { v.ln() } else { v };
    let ty = |v: f64| if log_y { v.ln() } else { v };
    let range = |vals: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        if lo < hi { (lo, hi) } else { (lo - 1.0, hi + 1.0) }
    };
    let (x0, x1) = range(&mut xs.iter().map(|v| tx(*v)));
    let (y0, y1) = range(&mut ys.iter().map(|v| ty(*v)));
    if !(x0.is_finite() && y0.is_finite()) {
        return Ok(None);
    }
    let px = |v: f64| MARGIN + (tx(v) - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (ty(v) - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    let w = |e: std::fmt::Error| Error::Format(e.to_string());
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#).map_err(w)?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).map_err(w)?;
    writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .map_err(w)?;
    writeln!(out, r#"<text x="{}" y="24" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title)).map_err(w)?;
    let label = |name: &str, log: bool| if log { format!("log {name}") } else { name.to_owned() };
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(&label(&header[0], log_x))
    )
    .map_err(w)?;
    for (c, name) in header.iter().enumerate().skip(1) {
        let color = COLORS[(c - 1) % COLORS.len()];
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| r.len() > c && finite(r[0]) && finite(r[c]) && (!log_y || r[c] > 0.0))
            .map(|r| format!("{:.2},{:.2}", px(r[0]), py(r[c])))
            .collect();
        if pts.len() >= 2 {
            writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "))
                .map_err(w)?;
        }
        writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 4.0,
            MARGIN + 14.0 * c as f64,
            escape(&label(name, log_y))
        )
        .map_err(w)?;
    }
    for (v, anchor, x, y) in [
        (x0, "start", MARGIN, HEIGHT - MARGIN + 16.0),
        (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0),
    ] {
        writeln!(out, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{}</text>"#, tick(v, log_x)).map_err(w)?;
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN + 10.0)] {
        writeln!(out, r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#, MARGIN - 4.0, tick(v, log_y)).map_err(w)?;
    }
    out.push_str("</svg>\n");
    Ok(Some(out))
}

fn tick(v: f64, log: bool) -> String {
    format!("{:.3e}", if log { v.exp() } else { v })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
