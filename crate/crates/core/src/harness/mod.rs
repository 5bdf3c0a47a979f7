//! Experiment harness: the online protocol, regret against the best
//! bounded comparator, repeated and swept runs, numerical property checks,
//! and CSV/SVG output.

mod comparator;
mod config;
mod experiments;
mod lemmas;
mod online;
mod output;
mod run;
mod stats;

pub use comparator::{
    cache_key, comparator_cached, comparator_loss, empirical_loss, ComparatorSolution, RegretReport,
};
pub use config::{PredictorKind, RunConfig};
#[cfg(feature = "exact")]
pub use experiments::{plateau_check, regret_slope_check};
pub use experiments::{plateau_instance, worst_of_chi, PlateauCheck, SlopeCheck, WorstOfChi, WorstOfChiRow};
pub use lemmas::{verify_lemmas, Check, LemmaReport};
pub use online::{run_online, RoundLog};
pub use output::{line_plot, read_rounds_csv, write_rounds_csv, write_run, write_sweep, RoundRow, Series};
pub use run::{run_experiment, sweep_b, CurvePoint, RepeatResult, RunOutput, SweepRow};
pub use stats::{linear_fit, quantile_sorted, Summary};
