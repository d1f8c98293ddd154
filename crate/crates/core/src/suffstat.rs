//! Sufficient statistics for a classical variable with respect to a quantum
//! region.
//!
//! A statistic `t(X)` is sufficient when conditioning on `t(X) = t(x)` yields
//! the same state as conditioning on `X = x`; the minimal one partitions the
//! values of `X` by equality of their conditional states. Classical variables
//! are covered by the same machinery via diagonal states.

use crate::conditional::JointState;
use crate::error::{Error, Result};
use crate::hybrid::{value_tuples, HybridState};
use crate::operator::LabeledOperator;
use crate::tolerance::Tolerance;

/// One cell of the partition: the classical value tuples whose conditional
/// states coincide, with that common state as representative.
#[derive(Debug, Clone)]
pub struct StatisticCell {
    pub values: Vec<Vec<usize>>,
    pub probability: f64,
    pub representative: LabeledOperator,
}

/// The minimal sufficient statistic: a partition of the classical value tuples
/// of a hybrid state. Zero-probability tuples have no conditional state and go
/// to the separate `undefined` cell.
#[derive(Debug, Clone)]
pub struct StatisticMap {
    pub cells: Vec<StatisticCell>,
    pub undefined: Vec<Vec<usize>>,
}

impl StatisticMap {
    /// Index of the cell containing the given value tuple, if any.
    pub fn cell_of(&self, values: &[usize]) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| c.values.iter().any(|v| v == values))
    }
}

/// Partition the classical values of `h` by equality (within `eq_tol`) of the
/// conditional states they induce on the quantum region.
pub fn minimal_sufficient_statistic(h: &HybridState, tol: &Tolerance) -> Result<StatisticMap> {
    let cdims: Vec<usize> = h.classical_regions().iter().map(|f| f.dim).collect();
    let mut cells: Vec<StatisticCell> = Vec::new();
    let mut undefined = Vec::new();
    for t in value_tuples(&cdims) {
        let p = h.prob(&t)?;
        if p <= Tolerance::ABS_FLOOR {
            undefined.push(t);
            continue;
        }
        let cond = h.component_operator(&t)?.scale(1.0 / p);
        match cells
            .iter_mut()
            .find(|c| c.representative.distance(&cond).map(|d| d <= tol.eq_tol).unwrap_or(false))
        {
            Some(cell) => {
                cell.values.push(t);
                cell.probability += p;
            }
            None => cells.push(StatisticCell {
                values: vec![t],
                probability: p,
                representative: cond,
            }),
        }
    }
    Ok(StatisticMap { cells, undefined })
}

/// Condition on the *statistic* taking the value of the given cell: the
/// probability-weighted mixture over the cell, which must (and is verified to)
/// coincide with the cell's representative.
pub fn condition_on_statistic(
    h: &HybridState,
    t: &StatisticMap,
    cell: usize,
    tol: &Tolerance,
) -> Result<JointState> {
    let cell = t.cells.get(cell).ok_or(Error::OutcomeOutOfRange {
        index: cell,
        size: t.cells.len(),
    })?;
    if cell.probability <= Tolerance::ABS_FLOOR {
        return Err(Error::ZeroProbabilityEvent {
            prob: cell.probability,
        });
    }
    let mut acc: Option<LabeledOperator> = None;
    for v in &cell.values {
        let comp = h.component_operator(v)?;
        acc = Some(match acc {
            None => comp,
            Some(a) => a.add(&comp)?,
        });
    }
    let mixture = acc
        .ok_or_else(|| Error::Invalid("statistic cell is empty".into()))?
        .scale(1.0 / cell.probability);
    // The defining property of a sufficient statistic, checked on every call:
    // mixing within a cell reproduces the cell's conditional state.
    let dev = mixture.distance(&cell.representative)?;
    if dev > f64::max(tol.eq_tol, 1e-8) {
        return Err(Error::Invalid(format!(
            "statistic cell mixture deviates from its representative by {dev:.3e}"
        )));
    }
    JointState::acausal(mixture.hermitize(), tol)
}
