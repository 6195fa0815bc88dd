use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the number of Steiner points is kept finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStrategy {
    /// Every Steiner point has degree at least `φ`, with `φ ≥ 3`.
    DegreeBound(usize),
    /// At most `k` Steiner points.
    ExplicitBound(usize),
    /// Every Steiner point costs `c > 0`; the objective is `L + c·|S|`.
    NodeWeighted(f64),
}

impl BoundStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BoundStrategy::DegreeBound(phi) if phi < 3 => {
                Err(Error::Domain(format!("degree bound must be at least 3, got {phi}")))
            }
            BoundStrategy::NodeWeighted(c) if !(c > 0.0 && c.is_finite()) => {
                Err(Error::Domain(format!("Steiner point cost must be positive, got {c}")))
            }
            _ => Ok(()),
        }
    }

    /// Smallest Steiner degree that is structurally admissible.
    pub fn min_steiner_degree(&self) -> usize {
        match *self {
            BoundStrategy::DegreeBound(phi) => phi,
            _ => 2,
        }
    }

    /// Objective for a tree of length cost `cost` with `steiner` Steiner points.
    pub fn objective(&self, cost: f64, steiner: usize) -> f64 {
        match *self {
            BoundStrategy::NodeWeighted(c) => cost + c * steiner as f64,
            _ => cost,
        }
    }

    pub fn is_degree_bounded(&self) -> bool {
        matches!(self, BoundStrategy::DegreeBound(_))
    }
}

impl std::fmt::Display for BoundStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundStrategy::DegreeBound(phi) => write!(f, "degree bound φ={phi}"),
            BoundStrategy::ExplicitBound(k) => write!(f, "explicit bound k={k}"),
            BoundStrategy::NodeWeighted(c) => write!(f, "node weighted c={c}"),
        }
    }
}
