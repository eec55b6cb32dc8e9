use std::fs::{self, File};
use std::path::{Path, PathBuf};

use super::chart::{render_chart, Metric};
use super::harness::{SimulationResult, Trajectory, TrajectoryPoint};
use crate::student::StudentLabel;

pub const TRAJECTORY_HEADER: [&str; 7] =
    ["interaction", "level", "level_index", "reward", "cumulative_reward", "word", "correct"];

const AGGREGATE_HEADER: [&str; 9] = [
    "student",
    "interaction",
    "runs",
    "level_q1",
    "level_median",
    "level_q3",
    "cumulative_reward_q1",
    "cumulative_reward_median",
    "cumulative_reward_q3",
];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("aggregate has no data to chart")]
    EmptyAggregate,
    #[error("unsupported metric {0:?} (expected level or cumulative_reward)")]
    UnsupportedMetric(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryPoint {
    pub interaction: u32,
    pub runs: usize,
    pub level: Quartiles,
    pub cumulative_reward: Quartiles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    pub student: StudentLabel,
    pub points: Vec<SummaryPoint>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Aggregate {
    pub series: Vec<SeriesSummary>,
}

/// Linearly interpolated quantile of sorted data (position `p * (n - 1)`).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn quartiles(mut values: Vec<f64>) -> Quartiles {
    values.sort_by(f64::total_cmp);
    Quartiles { q1: quantile(&values, 0.25), median: quantile(&values, 0.5), q3: quantile(&values, 0.75) }
}

/// Per-interaction quartiles of level index and cumulative reward, one
/// series per student in first-seen order.
pub fn aggregate<'a>(trajectories: impl IntoIterator<Item = &'a Trajectory>) -> Aggregate {
    let mut groups: Vec<(StudentLabel, Vec<&Trajectory>)> = Vec::new();
    for t in trajectories {
        match groups.iter_mut().find(|(l, _)| *l == t.student) {
            Some((_, g)) => g.push(t),
            None => groups.push((t.student, vec![t])),
        }
    }
    let series = groups
        .into_iter()
        .map(|(student, runs)| {
            let longest = runs.iter().map(|t| t.points.len()).max().unwrap_or(0);
            let points = (0..longest)
                .map(|i| {
                    let at: Vec<&TrajectoryPoint> = runs.iter().filter_map(|t| t.points.get(i)).collect();
                    SummaryPoint {
                        interaction: i as u32 + 1,
                        runs: at.len(),
                        level: quartiles(at.iter().map(|p| p.level.index() as f64).collect()),
                        cumulative_reward: quartiles(at.iter().map(|p| p.cumulative_reward as f64).collect()),
                    }
                })
                .collect();
            SeriesSummary { student, points }
        })
        .collect();
    Aggregate { series }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, ReportError> {
    let file = File::create(path).map_err(|source| ReportError::Io { path: path.into(), source })?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_trajectory_csv(points: &[TrajectoryPoint], path: &Path) -> Result<(), ReportError> {
    let csv_err = |source| ReportError::Csv { path: path.into(), source };
    let mut w = csv_writer(path)?;
    w.write_record(TRAJECTORY_HEADER).map_err(csv_err)?;
    for p in points {
        w.write_record([
            p.interaction.to_string(),
            p.level.label().to_string(),
            p.level.index().to_string(),
            p.reward.value().to_string(),
            p.cumulative_reward.to_string(),
            p.word.clone(),
            p.correct.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| ReportError::Io { path: path.into(), source })
}

pub fn write_aggregate_csv(agg: &Aggregate, path: &Path) -> Result<(), ReportError> {
    let csv_err = |source| ReportError::Csv { path: path.into(), source };
    let mut w = csv_writer(path)?;
    w.write_record(AGGREGATE_HEADER).map_err(csv_err)?;
    for s in &agg.series {
        for p in &s.points {
            let l = p.level;
            let r = p.cumulative_reward;
            w.write_record([
                s.student.to_string(),
                p.interaction.to_string(),
                p.runs.to_string(),
                l.q1.to_string(),
                l.median.to_string(),
                l.q3.to_string(),
                r.q1.to_string(),
                r.median.to_string(),
                r.q3.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|source| ReportError::Io { path: path.into(), source })
}

/// Write `<student>_run<NNN>.csv` per run, `aggregate.csv`, and the two
/// charts `level.svg` and `cumulative_reward.svg` into `dir`.
pub fn write_outputs(result: &SimulationResult, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io { path: dir.into(), source })?;
    let mut written = Vec::new();
    for t in result.trajectories() {
        let path = dir.join(format!("{}_run{:03}.csv", t.student, t.run));
        write_trajectory_csv(&t.points, &path)?;
        written.push(path);
    }
    let agg = aggregate(result.trajectories());
    let path = dir.join("aggregate.csv");
    write_aggregate_csv(&agg, &path)?;
    written.push(path);
    if agg.series.iter().any(|s| !s.points.is_empty()) {
        for metric in [Metric::Level, Metric::CumulativeReward] {
            let path = dir.join(format!("{}.svg", metric.name()));
            render_chart(&agg, metric, &path)?;
            written.push(path);
        }
    }
    Ok(written)
}
