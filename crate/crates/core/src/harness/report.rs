//! CSV, JSON and SVG output.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::theorem::RatioReport;

/// One CSV row per sweep instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub instance: usize,
    pub translation: f64,
    pub dilation: f64,
    pub amplitude: f64,
    pub ratio: Option<f64>,
    pub ratio_strong: Option<f64>,
    pub ratio_weak: Option<f64>,
    pub left_strong: Option<f64>,
    pub left_weak: Option<f64>,
    /// Input norms joined by `;`.
    pub right_norms: String,
    pub ratio_half_delta: Option<f64>,
    pub status: String,
}

pub fn csv_rows(report: &RatioReport) -> Vec<CsvRow> {
    report
        .rows
        .iter()
        .map(|r| {
            let o = r.outcome.as_ref();
            CsvRow {
                instance: r.instance.id,
                translation: r.instance.translation,
                dilation: r.instance.dilation,
                amplitude: r.instance.amplitude,
                ratio: r.ratio(report.theorem),
                ratio_strong: o.map(|o| o.ratio_strong),
                ratio_weak: o.map(|o| o.ratio_weak),
                left_strong: o.map(|o| o.left_strong),
                left_weak: o.map(|o| o.left_weak),
                right_norms: o
                    .map(|o| o.right.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(";"))
                    .unwrap_or_default(),
                ratio_half_delta: o.and_then(|o| o.ratio_half_delta),
                status: match &r.rejected {
                    Some(reason) => format!("rejected: {reason}"),
                    None => "ok".to_string(),
                },
            }
        })
        .collect()
}

pub fn write_csv<W: io::Write>(report: &RatioReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in csv_rows(report) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: io::Write>(report: &RatioReport, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, report)?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Ratio against dilation on a log-x axis, one marker per instance.
pub fn render_ratio_svg(rows: &[CsvRow], title: &str) -> Result<String> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.dilation, r.ratio?)))
        .filter(|(d, v)| *d > 0.0 && v.is_finite())
        .collect();
    if points.is_empty() {
        return Err(Error::Config("no finite ratios to plot".into()));
    }
    let (w, h, margin) = (640.0, 400.0, 60.0);
    let lx: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let (x0, x1) = bounds(&lx);
    let (y0, y1) = bounds(&points.iter().map(|p| p.1).collect::<Vec<_>>());
    let y0 = y0.min(0.0);
    let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title)).unwrap();
    // axes
    writeln!(
        svg,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        m = margin,
        t = margin,
        b = h - margin,
        r = w - margin
    )
    .unwrap();
    for k in x0.floor() as i32..=x1.ceil() as i32 {
        let x = k as f64;
        if x < x0 - 1e-9 || x > x1 + 1e-9 {
            continue;
        }
        writeln!(
            svg,
            r#"<line x1="{px}" y1="{b}" x2="{px}" y2="{b2}" stroke="black"/><text x="{px}" y="{ty}" text-anchor="middle">1e{k}</text>"#,
            px = sx(x),
            b = h - margin,
            b2 = h - margin + 5.0,
            ty = h - margin + 20.0
        )
        .unwrap();
    }
    for k in 0..=4 {
        let y = y0 + (y1 - y0) * k as f64 / 4.0;
        writeln!(
            svg,
            r#"<line x1="{l}" y1="{py}" x2="{m}" y2="{py}" stroke="black"/><text x="{tx}" y="{ty}" text-anchor="end">{y:.3}</text>"#,
            l = margin - 5.0,
            m = margin,
            py = sy(y),
            tx = margin - 8.0,
            ty = sy(y) + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">dilation (log scale)</text>"#,
        w / 2.0,
        h - 15.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">ratio</text>"#,
        h / 2.0,
        h / 2.0
    )
    .unwrap();
    let mut sorted: Vec<(f64, f64)> = lx.iter().zip(&points).map(|(x, p)| (*x, p.1)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (x, y) in &sorted {
        writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(*x), sy(*y)).unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
