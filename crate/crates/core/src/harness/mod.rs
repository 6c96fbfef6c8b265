//! Instance generation, noise injection and seeded Monte Carlo curves.

mod curve;
mod instance;
mod noise;
mod report;
mod trial;

pub use curve::{aggregate, half_point, run_curve, run_curve_in_pool, CurveRow, CurveTable, HalfPoint};
pub use instance::{gen_instance, InstanceConfig, SupportModel, ValueDist};
pub use noise::{inject_noise, NoiseConfig, NoiseMode, NoisyMeasurement};
pub use report::{emit_report, format_curve_csv, parse_curve_csv, plot_script, Manifest, ReportFiles, CURVE_HEADER};
pub use trial::{
    mid_gap_tau, run_trial, sub_seed, trial_seed, Algorithm, BenchConfig, TrialResult, RESIDUAL_TOL, SUCCESS_TOL,
};
