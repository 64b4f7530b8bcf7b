//! Pareto-frontier analysis over multi-objective reward estimates.
//!
//! Dominance is maximize-all-objectives: a point dominates another when it
//! is at least as good everywhere and strictly better somewhere. Objectives
//! to minimize must be negated before ingestion.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One reward vector plus the policy/configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub label: String,
    pub objectives: Vec<f64>,
}

impl ParetoPoint {
    pub fn new(label: impl Into<String>, objectives: Vec<f64>) -> Self {
        ParetoPoint {
            label: label.into(),
            objectives,
        }
    }
}

/// `a` dominates `b`: >= everywhere, > somewhere. Equal vectors do not
/// dominate each other.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly_better = true;
        }
    }
    strictly_better
}

fn validate(points: &[ParetoPoint]) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::EmptyInput("pareto points"));
    }
    let dim = points[0].objectives.len();
    if dim == 0 {
        return Err(Error::EmptyInput("pareto objectives"));
    }
    for p in points {
        if p.objectives.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.objectives.len(),
            });
        }
        if p.objectives.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinitePoint);
        }
    }
    Ok(dim)
}

fn lex_desc(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.partial_cmp(x).expect("validated finite") {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// The maximal non-dominated subset, one representative per distinct
/// vector, sorted lexicographically descending.
///
/// Points are sorted so that no later point can dominate an earlier kept
/// one; a single pass against the kept set then suffices.
pub fn pareto_frontier(points: &[ParetoPoint]) -> Result<Vec<ParetoPoint>> {
    validate(points)?;

    // One representative per distinct vector, keeping first occurrences.
    let mut distinct: Vec<&ParetoPoint> = Vec::new();
    for p in points {
        if !distinct.iter().any(|q| q.objectives == p.objectives) {
            distinct.push(p);
        }
    }
    distinct.sort_by(|a, b| lex_desc(&a.objectives, &b.objectives));

    let mut frontier: Vec<ParetoPoint> = Vec::new();
    for p in distinct {
        if !frontier
            .iter()
            .any(|kept| dominates(&kept.objectives, &p.objectives))
        {
            frontier.push(p.clone());
        }
    }
    Ok(frontier)
}

/// Per-input flags: true when the point is non-dominated (duplicates of a
/// frontier vector all flag true).
pub fn non_dominated_flags(points: &[ParetoPoint]) -> Result<Vec<bool>> {
    validate(points)?;
    let frontier = pareto_frontier(points)?;
    Ok(points
        .iter()
        .map(|p| frontier.iter().any(|f| f.objectives == p.objectives))
        .collect())
}
