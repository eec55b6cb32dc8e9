//! The three-student experiment: seeded runs, CSV output and SVG charts.

mod chart;
mod config;
mod harness;
mod report;

pub use chart::{render_chart, render_svg, Metric};
pub use config::{ConfigError, SimulationConfig};
pub use harness::{prepare_lexicon, run_simulation, run_single, SimError, SimulationResult, Trajectory, TrajectoryPoint};
pub use report::{
    aggregate, quantile, write_aggregate_csv, write_outputs, write_trajectory_csv, Aggregate, Quartiles, ReportError, SeriesSummary,
    SummaryPoint, TRAJECTORY_HEADER,
};
