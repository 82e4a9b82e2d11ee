use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BenchError;

/// A synthesized planner saved for reuse on new instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredPlanner {
    pub source: String,
    pub domain_name: String,
    /// Whatever configuration produced the planner, echoed verbatim.
    pub config_echo: serde_json::Value,
    pub fitness: Option<f64>,
    /// RFC 3339 timestamp.
    pub created_at: String,
}

impl StoredPlanner {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| BenchError::Format(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), BenchError> {
        let text = serde_json::to_string_pretty(self).expect("planner serializes");
        std::fs::write(path, text).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))
    }
}
