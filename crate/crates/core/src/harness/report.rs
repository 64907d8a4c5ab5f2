//! Report serialization: CSV, JSON and a log-log SVG plot.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bloch_rows::{bloch_csv, BlochRow};
use super::sweep::{ConvergenceReport, SweepKind, GERM_VARIATION_LIMIT};

pub const CSV_HEADER: &str = "eps,gap,iterations,converged,wall_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl ReportFormat {
    pub fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(ReportFormat::Csv),
            "json" => Some(ReportFormat::Json),
            "svg" => Some(ReportFormat::Svg),
            _ => None,
        }
    }
}

/// Rate sweeps use the columns `eps,gap,iterations,converged,wall_ms`;
/// germ-resolvent sweeps use the fiber-check schema with `value = ε·gap`.
pub fn report_csv(report: &ConvergenceReport) -> String {
    if report.kind == SweepKind::GermResolvent {
        return bloch_csv(&germ_rows(report));
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let gap = r.gap.map(|g| format!("{g:.12e}")).unwrap_or_default();
        writeln!(out, "{},{},{},{},{:.3}", r.eps, gap, r.iterations, r.converged, r.wall_ms).unwrap();
    }
    out
}

/// One row per `(k, ε)` cell with `value = ε·gap`, then one `germ_resolvent_sup`
/// row per `ε` with `value = sup_k ε·gap` and `bound = 2·min_ε sup_k ε·gap`.
fn germ_rows(report: &ConvergenceReport) -> Vec<BlochRow> {
    let sups = report.scaled_gap_sups();
    let lo = sups.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let bound = GERM_VARIATION_LIMIT * lo;
    let mut rows: Vec<BlochRow> = report
        .rows
        .iter()
        .map(|r| BlochRow {
            check: "germ_resolvent".into(),
            k: r.k,
            eps: Some(r.eps),
            x2: None,
            value: r.gap.map_or(f64::NAN, |g| r.eps * g),
            bound: f64::NAN,
            pass: r.converged,
        })
        .collect();
    for (eps, sup) in sups {
        rows.push(BlochRow {
            check: "germ_resolvent_sup".into(),
            k: None,
            eps: Some(eps),
            x2: None,
            value: sup,
            bound,
            pass: sup < bound,
        });
    }
    rows
}

pub fn report_json(report: &ConvergenceReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_report_json(text: &str) -> Result<ConvergenceReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 50.0;

/// Log-log scatter of the converged rows with the fitted line. Markers carry
/// `class="marker"` and the line `class="fit"`.
pub fn report_svg(report: &ConvergenceReport) -> String {
    let pts: Vec<(f64, f64)> = report
        .converged_rows()
        .filter(|r| r.gap.unwrap() > 0.0)
        .map(|r| (r.eps.log10(), r.gap.unwrap().log10()))
        .collect();
    let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let fit_ends = report.fit.map(|f| {
        let (a, b) = bounds(&xs);
        // the fit lives in natural logs; convert to base 10
        let y = |x: f64| (f.slope * x * std::f64::consts::LN_10 + f.intercept) / std::f64::consts::LN_10;
        ((a, y(a)), (b, y(b)))
    });
    if let Some(((_, y0), (_, y1))) = fit_ends {
        ys.extend([y0, y1]);
    }
    if xs.is_empty() {
        xs.push(0.0);
        ys.push(0.0);
    }
    let (x0, x1) = padded(bounds(&xs));
    let (y0, y1) = padded(bounds(&ys));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(s, r#"<title>{} ({})</title>"#, escape(&report.scenario), report.kind.label()).unwrap();
    writeln!(
        s,
        r#"<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">log10 eps</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="15" y="{}" font-size="12" transform="rotate(-90 15 {})" text-anchor="middle">log10 gap</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    )
    .unwrap();
    if let Some(((a, ya), (b, yb))) = fit_ends {
        let slope = report.fit.unwrap().slope;
        writeln!(
            s,
            r#"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="1.5"><title>slope {slope:.4}</title></line>"#,
            sx(a),
            sy(ya),
            sx(b),
            sy(yb)
        )
        .unwrap();
    }
    for (x, y) in &pts {
        writeln!(
            s,
            r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="4" fill="firebrick"/>"#,
            sx(*x),
            sy(*y)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

fn padded((a, b): (f64, f64)) -> (f64, f64) {
    let pad = ((b - a) * 0.1).max(0.05);
    (a - pad, b + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_report(report: &ConvergenceReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => Ok(report_csv(report)),
        ReportFormat::Json => report_json(report),
        ReportFormat::Svg => Ok(report_svg(report)),
    }
}

pub fn emit_report(report: &ConvergenceReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    write_text(path.as_ref(), &render_report(report, format)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
