use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::online::RoundLog;
use super::run::{RunOutput, SweepRow};
use crate::error::Result;

/// One line of `rounds.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRow {
    pub repeat: usize,
    pub t: usize,
    pub p_plus: f64,
    pub loss: f64,
    pub cum_loss: f64,
    pub avg_loss: f64,
    pub acceptance: Option<f64>,
    pub h: Option<f64>,
    pub transitions: u64,
}

impl RoundRow {
    pub fn new(repeat: usize, l: &RoundLog) -> Self {
        Self {
            repeat,
            t: l.t,
            p_plus: l.p_plus,
            loss: l.loss,
            cum_loss: l.cum_loss,
            avg_loss: l.avg_loss,
            acceptance: l.acceptance,
            h: l.h,
            transitions: l.transitions,
        }
    }
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    repeat: usize,
    seed: u64,
    learner_loss: f64,
    comparator_loss: f64,
    regret: f64,
    comparator_converged: bool,
    total_transitions: u64,
}

#[derive(Debug, Serialize)]
struct SweepCsvRow {
    #[serde(rename = "B")]
    b: f64,
    median: f64,
    q25: f64,
    q75: f64,
    values: String,
}

// Writes the header explicitly so that an empty table still has one.
fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rounds_csv(path: &Path, out: &RunOutput) -> Result<()> {
    write_csv(
        path,
        &["repeat", "t", "p_plus", "loss", "cum_loss", "avg_loss", "acceptance", "h", "transitions"],
        out.repeats
            .iter()
            .flat_map(|r| r.logs.iter().map(move |l| RoundRow::new(r.repeat, l))),
    )
}

pub fn read_rounds_csv(path: &Path) -> Result<Vec<RoundRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<RoundRow>, _>>()?)
}

/// Writes `rounds.csv`, `summary.csv`, `curve.csv`, `config.json` and,
/// when enabled, `curve.svg` into `dir`.
pub fn write_run(dir: &Path, out: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_rounds_csv(&dir.join("rounds.csv"), out)?;
    write_csv(
        &dir.join("summary.csv"),
        &[
            "repeat",
            "seed",
            "learner_loss",
            "comparator_loss",
            "regret",
            "comparator_converged",
            "total_transitions",
        ],
        out.repeats.iter().map(|r| SummaryRow {
            repeat: r.repeat,
            seed: r.seed,
            learner_loss: r.regret.learner_loss,
            comparator_loss: r.regret.comparator_loss,
            regret: r.regret.regret,
            comparator_converged: r.regret.comparator_converged,
            total_transitions: r.total_transitions,
        }),
    )?;
    write_csv(&dir.join("curve.csv"), &["t", "median", "q25", "q75"], &out.curve)?;
    std::fs::write(dir.join("config.json"), serde_json::to_string_pretty(&out.config)?)?;
    if out.config.svg {
        let pts = |f: fn(&super::run::CurvePoint) -> f64| -> Vec<(f64, f64)> {
            out.curve.iter().map(|c| (c.t as f64, f(c))).collect()
        };
        let svg = line_plot(
            &format!("{} average loss, B = {}", out.config.predictor, out.config.b),
            "t",
            "average loss",
            &[
                Series::new("median", pts(|c| c.median)),
                Series::new("q25", pts(|c| c.q25)),
                Series::new("q75", pts(|c| c.q75)),
            ],
            false,
        );
        std::fs::write(dir.join("curve.svg"), svg)?;
    }
    Ok(())
}

/// Writes `sweep.csv` and `sweep.svg` (log-scaled `B` axis).
pub fn write_sweep(dir: &Path, rows: &[SweepRow], svg: bool) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(
        &dir.join("sweep.csv"),
        &["B", "median", "q25", "q75", "values"],
        rows.iter().map(|r| SweepCsvRow {
            b: r.b,
            median: r.median,
            q25: r.q25,
            q75: r.q75,
            values: r.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";"),
        }),
    )?;
    if svg {
        let pts = |f: fn(&SweepRow) -> f64| rows.iter().map(|r| (r.b, f(r))).collect();
        let plot = line_plot(
            "final average loss against B",
            "B",
            "average loss",
            &[
                Series::new("median", pts(|r| r.median)),
                Series::new("q25", pts(|r| r.q25)),
                Series::new("q75", pts(|r| r.q75)),
            ],
            true,
        );
        std::fs::write(dir.join("sweep.svg"), plot)?;
    }
    Ok(())
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.to_owned(),
            points,
        }
    }
}

const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// A small self-contained SVG line chart. Output depends only on the input.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log_x: bool) -> String {
    let (w, h, m) = (640.0, 400.0, 60.0);
    let tx = |x: f64| if log_x { x.max(f64::MIN_POSITIVE).log10() } else { x };
    let finite = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(x, y)| tx(*x).is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(tx(x));
        x1 = x1.max(tx(x));
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| m + (tx(x) - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"#,
        h - m,
        w - m
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 15.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(ylabel)
    );
    for (v, anchor, x, y) in [
        (y0, "end", m - 5.0, h - m),
        (y1, "end", m - 5.0, m + 4.0),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{}</text>"#, tick(v));
    }
    let (xl, xr) = if log_x { (10f64.powf(x0), 10f64.powf(x1)) } else { (x0, x1) };
    let _ = writeln!(s, r#"<text x="{m}" y="{}" text-anchor="middle">{}</text>"#, h - m + 16.0, tick(xl));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w - m, h - m + 16.0, tick(xr));

    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let d: Vec<String> = ser
            .points
            .iter()
            .filter(|(x, y)| tx(*x).is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if !d.is_empty() {
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, d.join(" "));
        }
        let ly = m + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}" text-anchor="end">{}</text>"#,
            w - m,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
