//! Improving a state assignment from another agent's announcement.
//!
//! An agent who hears a report `R` with a known likelihood model updates by
//! the ordinary Bayesian rule. When the reporting agent shares the listener's
//! prior and announces their *posterior state* itself, the announcement acts
//! as a sufficient statistic and the listener's improved state is exactly the
//! announced one.

use crate::compat::posterior_given_likelihood;
use crate::conditional::JointState;
use crate::error::{Error, Result};
use crate::hybrid::{HybridState, LikelihoodOperator};
use crate::suffstat::{condition_on_statistic, minimal_sufficient_statistic};
use crate::tolerance::Tolerance;

/// Update `prior` on hearing report `announced` under the given report
/// likelihood model.
pub fn improve_supra(
    prior: &JointState,
    report_likelihood: &LikelihoodOperator,
    announced: usize,
    tol: &Tolerance,
) -> Result<JointState> {
    posterior_given_likelihood(prior, report_likelihood, announced, tol)
}

/// Shared-prior improvement: the reporting agent measured the scenario's
/// classical variable and announces the state they now assign. Conditioning on
/// the value of the *state-valued statistic* returns the announced state
/// itself — independent of which underlying value produced it.
pub fn improve_shared_prior(
    scenario: &HybridState,
    announced_state: &JointState,
    tol: &Tolerance,
) -> Result<JointState> {
    if announced_state.factors() != scenario.quantum_regions() {
        return Err(Error::Mismatch {
            context: "improve_shared_prior announced state factors".into(),
            expected: format!(
                "{:?}",
                scenario.quantum_regions().iter().map(|f| &f.id).collect::<Vec<_>>()
            ),
            found: format!("{:?}", announced_state.op().factor_ids()),
        });
    }
    let map = minimal_sufficient_statistic(scenario, tol)?;
    let cell = map
        .cells
        .iter()
        .position(|c| {
            c.representative
                .distance(announced_state.op())
                .map(|d| d <= f64::max(tol.eq_tol, 1e-8))
                .unwrap_or(false)
        })
        .ok_or(Error::NoMatchingBranch)?;
    condition_on_statistic(scenario, &map, cell, tol)
}
