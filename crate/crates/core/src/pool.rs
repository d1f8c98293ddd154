//! Opinion pooling: combining the state assignments of several agents who
//! share a prior but hold different data.
//!
//! The linear pool is a plain convex mixture. The multiplicative pool
//! `σ^{(supra)} ∝ σ^{(1)} ρ⁻¹ σ^{(2)}` is the exact supra-Bayesian answer
//! whenever the agents' minimal sufficient statistics are conditionally
//! uncorrelated given the prior — a condition [`check_pool_condition`] tests
//! directly. `pool_supra` computes the exact answer with no such assumption by
//! conditioning on both agents' statistic values in the underlying scenario.

use crate::compat::bfm_compatible;
use crate::conditional::JointState;
use crate::error::{Error, Result};
use crate::hybrid::HybridState;
use crate::linalg::{self, CMat};
use crate::operator::LabeledOperator;
use crate::suffstat::{minimal_sufficient_statistic, StatisticMap};
use crate::tolerance::Tolerance;

/// Weights of a linear pool: strictly inside the simplex.
#[derive(Debug, Clone)]
pub struct PoolWeights {
    w: Vec<f64>,
}

impl PoolWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        let sum: f64 = w.iter().sum();
        if w.len() < 2 || w.iter().any(|&x| x <= 0.0 || x >= 1.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::BadWeights);
        }
        Ok(Self { w })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// `σ^{(lin)} = Σ_j w_j σ^{(j)}`. The result is compatible with every input:
/// each appears in an ensemble decomposition of the pool.
pub fn pool_linear(states: &[JointState], w: &PoolWeights, tol: &Tolerance) -> Result<JointState> {
    if states.len() != w.weights().len() {
        return Err(Error::Mismatch {
            context: "pool_linear state count".into(),
            expected: w.weights().len().to_string(),
            found: states.len().to_string(),
        });
    }
    let mut acc: Option<LabeledOperator> = None;
    for (s, &wj) in states.iter().zip(w.weights()) {
        if s.factors() != states[0].factors() {
            return Err(Error::Mismatch {
                context: "pool_linear factors".into(),
                expected: format!("{:?}", states[0].op().factor_ids()),
                found: format!("{:?}", s.op().factor_ids()),
            });
        }
        let term = s.op().scale(wj);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    JointState::acausal(acc.ok_or(Error::BadWeights)?, tol)
}

fn support_leak(s: &JointState, prior_supp: &LabeledOperator) -> f64 {
    let d = prior_supp.dim();
    let outside = linalg::identity(d) - prior_supp.matrix();
    linalg::op_norm(&(&outside * s.op().matrix() * &outside))
}

/// `σ^{(supra)} = c σ^{(1)} ρ⁻¹ σ^{(2)}`, defined in the regime where the
/// product is Hermitian (the commuting case in which it equals the exact
/// supra-Bayesian pool). Refuses with a diagnostic otherwise.
pub fn pool_multiplicative(
    s1: &JointState,
    s2: &JointState,
    prior: &JointState,
    tol: &Tolerance,
) -> Result<JointState> {
    if s1.factors() != s2.factors() || s1.factors() != prior.factors() {
        return Err(Error::Mismatch {
            context: "pool_multiplicative factors".into(),
            expected: format!("{:?}", prior.op().factor_ids()),
            found: format!("{:?} vs {:?}", s1.op().factor_ids(), s2.op().factor_ids()),
        });
    }
    let prior_supp = prior.op().support(tol)?.projector;
    let check = f64::max(tol.eq_tol, 1e-8);
    for (name, s) in [("first", s1), ("second", s2)] {
        if support_leak(s, &prior_supp) > check {
            return Err(Error::PoolingUndefined(format!(
                "{name} input has support outside the prior's support"
            )));
        }
    }
    let pinv = prior.op().pseudo_inverse(tol)?;
    let product: CMat = s1.op().matrix() * pinv.matrix() * s2.op().matrix();
    let dev = linalg::hermitian_deviation(&product);
    let scale = linalg::op_norm(&product).max(1.0);
    if dev > check * scale {
        return Err(Error::PoolingUndefined(format!(
            "σ₁ρ⁻¹σ₂ is not Hermitian (deviation {dev:.3e}); the agents' data \
             are correlated beyond the multiplicative pool's regime"
        )));
    }
    let herm = linalg::hermitize(&product);
    let norm = herm.trace().re;
    if norm <= Tolerance::ABS_FLOOR {
        return Err(Error::PoolingUndefined(
            "vanishing normalization: the inputs are jointly incompatible".into(),
        ));
    }
    let pooled = JointState::acausal(
        LabeledOperator::new(s1.factors().to_vec(), herm.scale(1.0 / norm))?,
        tol,
    )?;
    // The pool must remain a coherent opinion: compatible with both inputs.
    for s in [s1, s2] {
        if !bfm_compatible(&pooled, s, tol)?.compatible {
            return Err(Error::PoolingUndefined(
                "pooled state lost compatibility with an input".into(),
            ));
        }
    }
    Ok(pooled)
}

fn statistic_for(scenario: &HybridState, var: &str, tol: &Tolerance) -> Result<StatisticMap> {
    let marg = scenario.marginal_hybrid(&[var], tol)?;
    minimal_sufficient_statistic(&marg, tol)
}

/// Exact supra-Bayesian pooling: condition the scenario on the *values of the
/// minimal sufficient statistics* that the two agents announce, i.e. on the
/// events `t₁(X₁) = t₁(x₁)` and `t₂(X₂) = t₂(x₂)` jointly.
pub fn pool_supra(
    scenario: &HybridState,
    var1: &str,
    x1: usize,
    var2: &str,
    x2: usize,
    tol: &Tolerance,
) -> Result<JointState> {
    let t1 = statistic_for(scenario, var1, tol)?;
    let t2 = statistic_for(scenario, var2, tol)?;
    let c1 = t1.cell_of(&[x1]).ok_or(Error::ZeroProbabilityEvent { prob: 0.0 })?;
    let c2 = t2.cell_of(&[x2]).ok_or(Error::ZeroProbabilityEvent { prob: 0.0 })?;
    let k1 = scenario
        .classical_regions()
        .iter()
        .position(|f| f.id == var1)
        .ok_or_else(|| Error::UnknownRegion(var1.into()))?;
    let k2 = scenario
        .classical_regions()
        .iter()
        .position(|f| f.id == var2)
        .ok_or_else(|| Error::UnknownRegion(var2.into()))?;
    let in_cell = |t: &StatisticMap, c: usize, v: usize| t.cells[c].values.iter().any(|w| w == &[v]);
    let qdim: usize = scenario.quantum_regions().iter().map(|f| f.dim).product();
    let mut acc = CMat::zeros(qdim, qdim);
    let mut p = 0.0f64;
    for (t, m) in scenario.components() {
        if in_cell(&t1, c1, t[k1]) && in_cell(&t2, c2, t[k2]) {
            acc += m;
            p += m.trace().re;
        }
    }
    if p <= Tolerance::ABS_FLOOR {
        return Err(Error::ZeroProbabilityEvent { prob: p });
    }
    JointState::acausal(
        LabeledOperator::new(
            scenario.quantum_regions().to_vec(),
            linalg::hermitize(&acc).scale(1.0 / p),
        )?,
        tol,
    )
}

/// Tests the factorization `ρ_{t₁(X₁) t₂(X₂) | B} = ρ_{t₁(X₁)|B} ρ_{t₂(X₂)|B}`
/// after coarse-graining both variables to their minimal sufficient
/// statistics. When it holds, [`pool_multiplicative`] on the two agents'
/// posteriors equals [`pool_supra`].
pub fn check_pool_condition(
    scenario: &HybridState,
    var1: &str,
    var2: &str,
    tol: &Tolerance,
) -> Result<bool> {
    let t1 = statistic_for(scenario, var1, tol)?;
    let t2 = statistic_for(scenario, var2, tol)?;
    let k1 = scenario
        .classical_regions()
        .iter()
        .position(|f| f.id == var1)
        .ok_or_else(|| Error::UnknownRegion(var1.into()))?;
    let k2 = scenario
        .classical_regions()
        .iter()
        .position(|f| f.id == var2)
        .ok_or_else(|| Error::UnknownRegion(var2.into()))?;
    let prior = scenario.quantum_marginal(tol)?;
    let isqrt = prior.op().pseudo_inverse_sqrt(tol)?;
    let qdim: usize = scenario.quantum_regions().iter().map(|f| f.dim).product();
    // Coarse-grained conditional components F_{c1 c2} = ρ_B^{-1/2} ρ_{B,c1,c2} ρ_B^{-1/2}
    let n1 = t1.cells.len();
    let n2 = t2.cells.len();
    let mut f = vec![vec![CMat::zeros(qdim, qdim); n2]; n1];
    for (t, m) in scenario.components() {
        let c1 = t1.cell_of(&[t[k1]]);
        let c2 = t2.cell_of(&[t[k2]]);
        if let (Some(c1), Some(c2)) = (c1, c2) {
            f[c1][c2] += isqrt.matrix() * m * isqrt.matrix();
        }
    }
    let f1: Vec<CMat> = (0..n1)
        .map(|c1| {
            let mut acc = CMat::zeros(qdim, qdim);
            for c2 in 0..n2 {
                acc += &f[c1][c2];
            }
            acc
        })
        .collect();
    let f2: Vec<CMat> = (0..n2)
        .map(|c2| {
            let mut acc = CMat::zeros(qdim, qdim);
            for row in f.iter() {
                acc += &row[c2];
            }
            acc
        })
        .collect();
    let check = f64::max(tol.eq_tol, 1e-8);
    for c1 in 0..n1 {
        for c2 in 0..n2 {
            let dev = linalg::op_norm(&(&f[c1][c2] - &f1[c1] * &f2[c2]));
            if dev > check {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
