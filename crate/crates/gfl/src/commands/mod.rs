mod diagnose;
mod reproduce;
mod tables;
mod validate;

use rayon::ThreadPool;

use gfl_core::{Result, Volume};

use crate::config::ExperimentConfig;
use crate::model::{Mode, Model};
use crate::parallel;

pub use diagnose::diagnose;
pub use reproduce::{reproduce, Example};
pub use tables::{energy, reconstruct};
pub use validate::{validate, AXIOMS};

pub struct Context {
    pub config: ExperimentConfig,
    pub pool: ThreadPool,
}

impl Context {
    pub fn new(config: ExperimentConfig, threads: Option<usize>) -> Result<Context> {
        Ok(Context {
            config,
            pool: parallel::pool(threads)?,
        })
    }
}

pub(crate) struct Setup {
    pub model: Model,
    pub mode: Mode,
}

impl Setup {
    pub fn from_config(config: &ExperimentConfig) -> Result<Setup> {
        let model = Model::parse(config.get("model"))?;
        let mode = model.resolve_mode(config.get("mode"))?;
        Ok(Setup { model, mode })
    }
}

/// `""` means `default`.
pub(crate) fn volume_or(text: &str, default: Volume) -> Result<Volume> {
    if text.trim().is_empty() {
        Ok(default)
    } else {
        Volume::parse(text)
    }
}
