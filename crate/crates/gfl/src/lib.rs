//! Command-line companion to `gfl-core`: model descriptors, table and
//! potential files, experiment configs, parallel fixture checks and
//! JSON/CSV reports.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod formats;
pub mod model;
pub mod parallel;
pub mod report;

pub use commands::{diagnose, energy, reconstruct, reproduce, validate, Context, Example};
pub use config::ExperimentConfig;
pub use report::Output;

/// Exit code for errors (bad arguments, unreadable files, null conditions).
pub const EXIT_ERROR: i32 = 4;

/// Writes each output file into `dir`, creating it if needed.
pub fn write_output(out: &Output, dir: &std::path::Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in &out.files {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}
