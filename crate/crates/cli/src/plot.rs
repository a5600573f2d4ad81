//! Static SVG step plots of the lower bound against wall-clock time.

use std::fmt::Write as _;
use std::fs::File;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use stochcuts::trace::{read_rows, EventKind, TraceRow};

use crate::EXIT_OK;

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// Trace CSV files written by `solve` or `compare`.
    #[arg(long, num_args = 1.., required = true)]
    pub traces: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "lower bound over time")]
    pub title: String,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    /// `(seconds, lower bound)` at each event with a finite bound.
    pub points: Vec<(f64, f64)>,
    pub refinements: Vec<f64>,
}

/// One series per run id, in order of first appearance.
pub fn series(rows: &[TraceRow]) -> Vec<Series> {
    let instances: std::collections::BTreeSet<&str> = rows.iter().map(|r| r.instance.as_str()).collect();
    let mut out: Vec<(String, Series)> = Vec::new();
    for r in rows {
        let idx = match out.iter().position(|(id, _)| *id == r.run_id) {
            Some(i) => i,
            None => {
                let label = if instances.len() > 1 {
                    format!("{} ({})", r.algorithm, r.instance)
                } else {
                    r.algorithm.clone()
                };
                out.push((
                    r.run_id.clone(),
                    Series {
                        label,
                        points: Vec::new(),
                        refinements: Vec::new(),
                    },
                ));
                out.len() - 1
            }
        };
        let s = &mut out[idx].1;
        if r.lower_bound.is_finite() && r.wall_seconds.is_finite() {
            s.points.push((r.wall_seconds, r.lower_bound));
        }
        if r.event == EventKind::Refinement.name() {
            s.refinements.push(r.wall_seconds);
        }
    }
    out.into_iter().map(|(_, s)| s).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

pub fn render(title: &str, series: &[Series]) -> String {
    let (x0, x1) = {
        let (_, hi) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
        (0.0, hi.max(1e-3))
    };
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + (t - x0) / (x1 - x0) * pw;
    let sy = |v: f64| TOP + (y1 - v) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" style="font-family:sans-serif;font-size:12px">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" style="fill:#ffffff"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" style="font-size:15px;text-anchor:middle">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" style="fill:none;stroke:#333333"/>"#
    );
    for k in 0..=5 {
        let f = k as f64 / 5.0;
        let t = x0 + f * (x1 - x0);
        let v = y0 + f * (y1 - y0);
        let (x, y) = (sx(t), sy(v));
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" style="stroke:#e0e0e0"/><text x="{x:.2}" y="{}" style="text-anchor:middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 16.0,
            fmt_tick(t)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" style="stroke:#e0e0e0"/><text x="{}" y="{:.2}" style="text-anchor:end">{}</text>"#,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" style="text-anchor:middle">wall time (s)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0}" transform="rotate(-90 18 {0})" style="text-anchor:middle">lower bound</text>"#,
        TOP + ph / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        for &t in &s.refinements {
            let _ = writeln!(
                svg,
                r#"<line x1="{0:.2}" y1="{TOP}" x2="{0:.2}" y2="{1}" style="stroke:{color};stroke-dasharray:4 3;stroke-opacity:0.6"/>"#,
                sx(t),
                TOP + ph
            );
        }
        match s.points.as_slice() {
            [] => {}
            [(t, v)] => {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" style="fill:{color}"/>"#,
                    sx(*t),
                    sy(*v)
                );
            }
            pts => {
                let mut d = format!("M{:.2},{:.2}", sx(pts[0].0), sy(pts[0].1));
                for &(t, v) in &pts[1..] {
                    let _ = write!(d, " H{:.2} V{:.2}", sx(t), sy(v));
                }
                let _ = writeln!(
                    svg,
                    r#"<path d="{d}" style="fill:none;stroke:{color};stroke-width:2"/>"#
                );
            }
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" style="stroke:{color};stroke-width:2"/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 1e5) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

pub fn run(a: &PlotArgs) -> Result<u8> {
    let mut rows = Vec::new();
    for path in &a.traces {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        rows.extend(read_rows(file).with_context(|| format!("malformed trace {}", path.display()))?);
    }
    if rows.is_empty() {
        bail!("no events");
    }
    let series = series(&rows);
    std::fs::write(&a.out, render(&a.title, &series))
        .with_context(|| format!("cannot write {}", a.out.display()))?;
    println!("wrote {} ({} series, {} events)", a.out.display(), series.len(), rows.len());
    Ok(EXIT_OK)
}
