use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::report::{Aggregate, Quartiles, ReportError, SummaryPoint};
use crate::cefr::CefrLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Level,
    CumulativeReward,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Level => "level",
            Metric::CumulativeReward => "cumulative_reward",
        }
    }

    fn axis_label(self) -> &'static str {
        match self {
            Metric::Level => "CEFR level",
            Metric::CumulativeReward => "Cumulative reward",
        }
    }

    fn pick(self, p: &SummaryPoint) -> Quartiles {
        match self {
            Metric::Level => p.level,
            Metric::CumulativeReward => p.cumulative_reward,
        }
    }
}

impl FromStr for Metric {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "level" => Ok(Metric::Level),
            "cumulative_reward" => Ok(Metric::CumulativeReward),
            other => Err(ReportError::UnsupportedMetric(other.to_string())),
        }
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

struct Frame {
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, interaction: f64) -> f64 {
        let span = (self.x_max - 1.0).max(1.0);
        LEFT + (interaction - 1.0) / span * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, value: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-9);
        HEIGHT - BOTTOM - (value - self.y_min) / span * (HEIGHT - TOP - BOTTOM)
    }
}

fn y_ticks(metric: Metric, agg: &Aggregate) -> (f64, f64, Vec<(f64, String)>) {
    match metric {
        Metric::Level => {
            let ticks = CefrLevel::ALL.iter().map(|l| (l.index() as f64, l.label().to_string())).collect();
            (0.0, 5.0, ticks)
        }
        Metric::CumulativeReward => {
            let values = agg.series.iter().flat_map(|s| s.points.iter()).map(|p| metric.pick(p));
            let (lo, hi) = values.fold((0.0f64, 0.0f64), |(lo, hi), q| (lo.min(q.q1), hi.max(q.q3)));
            let step = nice_step((hi - lo).max(1.0));
            let lo = (lo / step).floor() * step;
            let hi = ((hi / step).ceil() * step).max(lo + step);
            let n = ((hi - lo) / step).round() as i64;
            let ticks = (0..=n).map(|i| lo + i as f64 * step).map(|v| (v, format!("{v}"))).collect();
            (lo, hi, ticks)
        }
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Self-contained SVG line chart: one median line and interquartile band per student.
pub fn render_svg(agg: &Aggregate, metric: Metric) -> Result<String, ReportError> {
    let x_max = agg.series.iter().map(|s| s.points.len()).max().unwrap_or(0);
    if x_max == 0 {
        return Err(ReportError::EmptyAggregate);
    }
    let (y_min, y_max, ticks) = y_ticks(metric, agg);
    let f = Frame { x_max: x_max as f64, y_min, y_max };
    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{} over {} interactions</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        metric.axis_label(),
        x_max
    );

    let (x0, x1) = (f.x(1.0), f.x(x_max as f64));
    let (yb, yt) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(w, r#"<g class="axes" stroke="black" fill="none">"#);
    let _ = writeln!(w, r#"<line x1="{LEFT}" y1="{yb}" x2="{x1:.2}" y2="{yb}"/>"#);
    let _ = writeln!(w, r#"<line x1="{LEFT}" y1="{yb}" x2="{LEFT}" y2="{yt}"/>"#);
    let _ = writeln!(w, "</g>");

    let _ = writeln!(w, r#"<g class="y-ticks">"#);
    for (v, label) in &ticks {
        let y = f.y(*v);
        let _ = writeln!(w, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#dddddd"/>"##);
        let _ = writeln!(w, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, escape(label));
    }
    let _ = writeln!(w, "</g>");

    let x_step = nice_step(x_max as f64).max(1.0);
    let _ = writeln!(w, r#"<g class="x-ticks">"#);
    let mut tick = 1.0;
    while tick <= x_max as f64 {
        let x = f.x(tick);
        let _ = writeln!(w, r#"<line x1="{x:.2}" y1="{yb}" x2="{x:.2}" y2="{}" stroke="black"/>"#, yb + 4.0);
        let _ = writeln!(w, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{tick}</text>"#, yb + 18.0);
        tick = if tick == 1.0 && x_step > 1.0 { x_step } else { tick + x_step };
    }
    let _ = writeln!(w, "</g>");

    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">Interaction</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (yb + yt) / 2.0,
        (yb + yt) / 2.0,
        metric.axis_label()
    );

    for (i, s) in agg.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let name = escape(s.student.as_str());
        let upper: Vec<String> = s
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", f.x(p.interaction as f64), f.y(metric.pick(p).q3)))
            .collect();
        let lower: Vec<String> = s
            .points
            .iter()
            .rev()
            .map(|p| format!("{:.2},{:.2}", f.x(p.interaction as f64), f.y(metric.pick(p).q1)))
            .collect();
        let median: Vec<String> = s
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", f.x(p.interaction as f64), f.y(metric.pick(p).median)))
            .collect();
        let _ = writeln!(w, r#"<g class="series" data-student="{name}">"#);
        let _ = writeln!(
            w,
            r#"<polygon class="iqr" points="{} {}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let _ = writeln!(
            w,
            r#"<polyline class="median" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            median.join(" ")
        );
        let ly = TOP + 10.0 + i as f64 * 20.0;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            w,
            r#"<line class="legend" x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/>"#,
            lx + 20.0
        );
        let _ = writeln!(w, r#"<text x="{}" y="{}">{name}</text>"#, lx + 26.0, ly + 4.0);
        let _ = writeln!(w, "</g>");
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

pub fn render_chart(agg: &Aggregate, metric: Metric, path: &Path) -> Result<(), ReportError> {
    let svg = render_svg(agg, metric)?;
    std::fs::write(path, svg).map_err(|source| ReportError::Io { path: path.into(), source })
}
