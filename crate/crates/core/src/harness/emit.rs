//! CSV, JSON and SVG output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::sweep::{ConvergenceRun, SweepRow};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str = "snr_db,n,algorithm,wsmse_analytic,wsmse_empirical,stderr,trials,sweeps";
pub const CONVERGENCE_HEADER: &str = "init,update_index,objective";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::Config(format!("unknown format {other:?} (expected csv, json or svg)"))),
        }
    }
}

fn csv_error(source: csv::Error) -> Error {
    Error::Csv {
        path: PathBuf::from("<csv>"),
        source,
    }
}

/// Sweep rows as CSV. The header is written even when `rows` is empty.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut out = Vec::new();
    writeln!(out, "{SWEEP_HEADER}").expect("write to Vec");
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut out);
        for r in rows {
            w.serialize(r).map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
    }
    Ok(String::from_utf8(out).expect("csv output is UTF-8"))
}

pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?.iter().collect::<Vec<_>>().join(",");
    if header != SWEEP_HEADER {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

/// One line per objective value; `update_index` 0 is the initial point.
pub fn convergence_csv(runs: &[ConvergenceRun]) -> String {
    let mut s = format!("{CONVERGENCE_HEADER}\n");
    for run in runs {
        let values = std::iter::once(run.trace.initial_objective).chain(run.trace.objective_per_update.iter().copied());
        for (i, v) in values.enumerate() {
            writeln!(s, "{},{i},{v}", run.init).unwrap();
        }
    }
    s
}

/// A named polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Single-panel line chart, one `<polyline>` per series.
///
/// With `log_y` non-positive values are dropped from the plot.
pub fn svg_line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 170.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;

    let ty = |y: f64| if log_y { y.log10() } else { y };
    let usable = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!log_y || y > 0.0);

    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().filter(|p| usable(p)).map(|&(x, y)| (x, ty(y))))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if log_y {
        y0 = y0.floor();
        y1 = y1.ceil();
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>
<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        (LEFT + W - RIGHT) / 2.0,
        escape(title),
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    )
    .unwrap();

    // y ticks: decades on a log axis, five steps otherwise
    let y_ticks: Vec<f64> = if log_y {
        (y0 as i64..=y1 as i64).map(|e| e as f64).collect()
    } else {
        (0..=5).map(|i| y0 + (y1 - y0) * i as f64 / 5.0).collect()
    };
    for t in y_ticks {
        let label = if log_y { format!("1e{t}") } else { format!("{t:.3}") };
        writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">{label}</text>"##,
            W - RIGHT,
            LEFT - 6.0,
            py(t) + 4.0,
            y = py(t)
        )
        .unwrap();
    }
    for i in 0..=5 {
        let t = x0 + (x1 - x0) * i as f64 / 5.0;
        writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            px(t),
            H - BOTTOM + 16.0,
            format!("{t:.4}").trim_end_matches('0').trim_end_matches('.')
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 12.0,
        escape(x_label),
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0,
        escape(y_label)
    )
    .unwrap();

    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = ser
            .points
            .iter()
            .filter(|p| usable(p))
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(ty(y))))
            .collect();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
        let ly = TOP + 14.0 + 18.0 * i as f64;
        writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            W - RIGHT + 10.0,
            W - RIGHT + 30.0,
            W - RIGHT + 36.0,
            ly + 4.0,
            escape(&ser.label)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}


/// SNR on the x axis, one series per algorithm (analytic values).
pub fn snr_series(rows: &[SweepRow]) -> Vec<Series> {
    group_series(rows, |r| r.algorithm.clone(), |r| r.snr_db)
}

/// Pilot length on the x axis, one series per (algorithm, SNR).
pub fn pilot_length_series(rows: &[SweepRow]) -> Vec<Series> {
    group_series(rows, |r| format!("{} @ {} dB", r.algorithm, r.snr_db), |r| r.n as f64)
}

fn group_series(rows: &[SweepRow], key: impl Fn(&SweepRow) -> String, x: impl Fn(&SweepRow) -> f64) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let label = key(r);
        let point = (x(r), r.wsmse_analytic);
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(point),
            None => out.push(Series {
                label,
                points: vec![point],
            }),
        }
    }
    out
}

/// Update index on the x axis, one series per run.
pub fn convergence_series(runs: &[ConvergenceRun]) -> Vec<Series> {
    runs.iter()
        .map(|run| Series {
            label: format!("{} @ {} dB", run.init, run.snr_db),
            points: std::iter::once(run.trace.initial_objective)
                .chain(run.trace.objective_per_update.iter().copied())
                .enumerate()
                .map(|(i, v)| (i as f64, v))
                .collect(),
        })
        .collect()
}

/// Writes `content` to `path`, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}
