use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Two configurations were concatenated over overlapping domains.
    #[error("domain conflict: site {site} is assigned by both configurations")]
    DomainConflict { site: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("enumeration needs {required} configurations, cap is {cap}")]
    Capacity { required: u128, cap: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("null condition{}: {detail}", stage.map(|s| alloc::format!(" at stage {s}")).unwrap_or_default())]
    NullCondition { stage: Option<usize>, detail: String },
    #[error("positivity violated: {0}")]
    Positivity(String),
    #[error("inconsistent energy: {0}")]
    InconsistentEnergy(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("parse error: {0}")]
    Parse(String),
}
