//! Resumable brute-search state.
//!
//! A checkpoint is a single JSON document:
//!
//! ```text
//! {
//!   "format": "ricciflat-checkpoint",
//!   "version": 1,
//!   "constraint_hash": "<sha256 hex of the constraints>",
//!   "constraints": { ... },
//!   "pending": ["<graph6 task root>", ...],
//!   "found": ["<canonical form>", ...],
//!   "counters": { ... },
//!   "completed_tasks": 17
//! }
//! ```
//!
//! `pending` lists the subtree roots not yet explored, in task order. An
//! empty `pending` list means the run is complete. Files are replaced
//! atomically through a temporary sibling.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Counters, SearchConstraints, SearchError};
use crate::canon::CanonicalForm;

pub const FORMAT: &str = "ricciflat-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub constraint_hash: String,
    pub constraints: SearchConstraints,
    pub pending: Vec<String>,
    pub found: Vec<CanonicalForm>,
    pub counters: Counters,
    pub completed_tasks: u64,
}

impl Checkpoint {
    pub fn new(c: &SearchConstraints, pending: Vec<String>, found: Vec<CanonicalForm>, counters: Counters) -> Self {
        let mut cp = Checkpoint {
            format: FORMAT.into(),
            version: VERSION,
            constraint_hash: c.hash(),
            constraints: c.clone(),
            pending,
            found: Vec::new(),
            counters: Counters::default(),
            completed_tasks: 0,
        };
        cp.record(found, &counters, 0);
        cp
    }

    /// Folds in the results of finished tasks.
    pub fn record(&mut self, found: Vec<CanonicalForm>, counters: &Counters, tasks: u64) {
        self.found.extend(found);
        self.found.sort();
        self.found.dedup();
        self.counters += counters;
        self.completed_tasks += tasks;
    }

    pub fn is_complete(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn check_constraints(&self, c: &SearchConstraints) -> Result<(), SearchError> {
        let expected = c.hash();
        if self.constraint_hash != expected {
            return Err(SearchError::HashMismatch { expected, found: self.constraint_hash.clone() });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SearchError> {
        let cp: Checkpoint = serde_json::from_str(text).map_err(|e| SearchError::CorruptCheckpoint(e.to_string()))?;
        if cp.format != FORMAT {
            return Err(SearchError::CorruptCheckpoint(format!("unexpected format tag {:?}", cp.format)));
        }
        if cp.version != VERSION {
            return Err(SearchError::CorruptCheckpoint(format!("unsupported version {}", cp.version)));
        }
        if cp.constraint_hash != cp.constraints.hash() {
            return Err(SearchError::CorruptCheckpoint("stored constraints do not match the stored hash".into()));
        }
        Ok(cp)
    }

    pub fn save(&self, path: &Path) -> Result<(), SearchError> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_json()).map_err(|e| SearchError::Io(e.to_string()))?;
        fs::rename(&tmp, path).map_err(|e| SearchError::Io(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, SearchError> {
        let text = fs::read_to_string(path).map_err(|e| SearchError::Io(e.to_string()))?;
        Self::from_json(&text)
    }
}
