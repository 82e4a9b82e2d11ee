//! Scoring and instance generation for comparing planning methods.

mod artifact;
mod families;
mod metrics;

pub use artifact::StoredPlanner;
pub use families::{generate_instances, Family, Instance, DELIVERY_DOMAIN, FERRY_DOMAIN, STACKING_DOMAIN};
pub use metrics::{breakeven_instances, evaluate_methods, sat_score, Breakeven, MethodRun, SatRow, SatTable, TaskRecord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("task sets differ: {0}")]
    TaskSetMismatch(String),
    #[error("unknown instance family '{0}'")]
    UnknownFamily(String),
    #[error("instance size must be positive, got {0}")]
    InvalidSize(usize),
    #[error("could not generate a solvable {family} instance in {attempts} attempts")]
    UnsolvableGenerated { family: String, attempts: usize },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed file: {0}")]
    Format(String),
}
