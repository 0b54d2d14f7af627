//! Config-driven runner behind the `hypotest` binary.
//!
//! A run writes `<out>/<command>.csv` (a versioned header comment, then
//! RFC-4180 rows with 12 significant digits) and `<out>/<command>.meta.json`
//! (config hash, seed, versions, runtime and command details).

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

pub use commands::{execute, exit_code, Outcome};
pub use config::{
    parse_config, Command, GaussianSpec, RunConfig, SimulateSpec, SteinSpec, VerifyCheck,
    VerifySpec, COMMANDS,
};
pub use output::{format_number, nested_rows, Cell, Table, CSV_VERSION};

use crate::error::Result;
use crate::rng::RNG_ID;
use crate::sim::config_hash;

/// Files written by [`run`].
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub summary: String,
}

/// Executes `config` and writes its artifacts into `out_dir` (falling back
/// to the config's `output`, then the current directory).
pub fn run(config: &RunConfig, out_dir: Option<&Path>) -> Result<Artifacts> {
    let start = Instant::now();
    let outcome = execute(config)?;
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let name = config.command.name();
    let csv = dir.join(format!("{name}.csv"));
    let meta = dir.join(format!("{name}.meta.json"));
    output::write_text(&csv, &outcome.table.to_csv()?)?;
    let record = json!({
        "command": name,
        "config_hash": config_hash(config)?,
        "seed": config.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "csv_version": CSV_VERSION,
        "rng": RNG_ID,
        "threads": rayon::current_num_threads(),
        "runtime_secs": start.elapsed().as_secs_f64(),
        "details": outcome.details,
    });
    output::write_text(&meta, &output::to_json(&record)?)?;
    Ok(Artifacts {
        csv,
        meta,
        summary: outcome.summary,
    })
}
