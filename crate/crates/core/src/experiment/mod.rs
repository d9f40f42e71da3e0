//! Experiment driver: sweeps, scaling fits and walk statistics.

pub mod fit;
pub mod sweep;
pub mod walks;

pub use fit::{fit, FitMode, FitReport, Quantity};
pub use sweep::{
    read_csv, run_analytic_sweep, run_sweep, write_csv, ModelKind, SweepRow, SweepSpec, ThetaGrid,
};
pub use walks::{run_explore, ExploreReport, ExploreSpec};
