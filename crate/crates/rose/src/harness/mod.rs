//! The user-facing surface: sequence-file parsing, the named-scenario
//! registry, parameter sweeps, and CSV/summary artifacts.

mod artifacts;
mod scenario;
mod seq;
mod sweep;

pub use artifacts::{
    write_depth_csv, write_profile_csv, write_summary, write_sweep_csv, write_trace_csv,
};
pub use scenario::{
    list_scenarios, run_scenario, run_scenario_spec, scenario_source, GridOverrides, Regression,
    ScenarioReport,
};
pub use seq::{
    parse_quantity, parse_sequence, serialize_sequence, Check, DetectKind, DetectSpec,
    Expectation, ScenarioSpec,
};
pub use sweep::{parse_sweep, run_sweep, SweepRow, SweepSpec};
