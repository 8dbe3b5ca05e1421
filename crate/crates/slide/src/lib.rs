//! File formats and command-line driver for `planar_slide_core`.
//!
//! - [`config`]: TOML scenario files.
//! - [`trajectory`]: trajectory CSV output and its reader.
//! - [`run`]: timed simulation and the solver/oracle comparison.
//! - [`cli`]: the `planar-slide` command.

pub mod cli;
pub mod config;
pub mod run;
pub mod trajectory;

pub use config::{load_scenario, parse_scenario, save_scenario, scenario_to_toml, LoadError};
pub use run::{compare, run_simulation, CompareReport, Summary};
pub use trajectory::{load_csv, observed_steps, read_csv, save_csv, write_csv, COLUMNS};
