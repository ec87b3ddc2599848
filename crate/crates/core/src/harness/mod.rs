//! Persistence, calibration and the experiment runners behind the CLI.

pub mod amplify;
pub mod calibrate;
pub mod config;
pub mod experiment;
pub mod persist;
pub mod records;

pub use amplify::{amplified_decode, run_amplify_experiment, AmplifiedOutcome, AmplifySummary};
pub use calibrate::{calibrate_decoder, Calibration};
pub use config::{BaselineConfig, DecoderChoice, ExperimentConfig, GainChoice};
pub use experiment::{
    run_baseline_experiment, run_capacity_sweep, run_fn_experiment, run_fp_experiment,
    CapacityRow, ExperimentOutput, FnSummary, FpSummary, PreparedIndex, Summary, Workload,
};
pub use persist::{load_memory, save_memory};
