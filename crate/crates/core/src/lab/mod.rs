//! Experiment orchestration: configuration, orbit caching, the ratio and gap
//! series, hypothesis reports and CSV/SVG/JSON emission.

mod cache;
mod closure;
pub mod config;
pub mod emit;
mod experiments;
pub mod report;

pub use cache::{obtain_orbit, CacheOutcome, OrbitCache};
pub use closure::{closure_proxy, ClosureProxy, Containment};
pub use config::{ExperimentConfig, SCHEMA};
pub use experiments::{
    gap_series, ratio_series, ratio_verdict, run_gap_experiment, run_ratio_experiment, sample_points,
    thm14_hypothesis_report, thm17_from_series, thm17_set_membership, Clause, GapRow, GapSeries, RatioRow, RatioSeries,
    RatioVerdict, RunOptions, SampleReport, SampleRow, Setup, Sign, Thm14Report, Thm17Report, Thm17Row, Value,
    MIN_LIMINF_ROWS, ZERO_THRESHOLD,
};
