use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a factor is a genuine quantum system or a classical variable
/// carrying a preferred basis indexed `0..dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Quantum,
    Classical,
}

/// A named tensor factor: an elementary system or classical variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    pub dim: usize,
    pub kind: RegionKind,
}

impl Region {
    pub fn quantum(id: impl Into<String>, dim: usize) -> Self {
        Self {
            id: id.into(),
            dim,
            kind: RegionKind::Quantum,
        }
    }

    pub fn classical(id: impl Into<String>, dim: usize) -> Self {
        Self {
            id: id.into(),
            dim,
            kind: RegionKind::Classical,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Invalid(format!(
                "region `{}` must have dim >= 1",
                self.id
            )));
        }
        Ok(())
    }

    /// Two uses of the same id must agree on dimension and kind.
    pub fn check_same(&self, other: &Region) -> Result<()> {
        if self.id != other.id {
            return Err(Error::Mismatch {
                context: "region id".into(),
                expected: self.id.clone(),
                found: other.id.clone(),
            });
        }
        if self.dim != other.dim {
            return Err(Error::RegionDimMismatch {
                id: self.id.clone(),
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.kind != other.kind {
            return Err(Error::RegionKindMismatch(self.id.clone()));
        }
        Ok(())
    }
}
