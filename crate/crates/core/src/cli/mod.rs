//! Configuration-driven scenarios: INI parsing, single-point evaluation,
//! sweeps, method comparison and CSV output.

mod run;
mod scenario;

pub use run::{
    format_table, run_compare, run_method, run_oracle, run_outage, run_sweep, write_csv, OutageResult, Row, CSV_HEADER,
};
pub use scenario::{load_scenarios, parse_config, Method, Model, Scale, Scenario, Sweep, KEYS, SWEEPABLE};
