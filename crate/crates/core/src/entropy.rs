//! Entropic measures and conditional independence.
//!
//! Conditional independence of regions A and B given C is diagnosed by the
//! conditional mutual information and cross-checked against two operator
//! identities: the conditional form `ρ_{A|BC} = ρ_{A|C}` and the product form
//! `ρ_{AB|C} = ρ_{A|C} ρ_{B|C}`. Vanishing CMI implies both identities; the
//! product form alone does *not* imply independence and is never used as the
//! verdict.

use std::collections::BTreeSet;

use crate::conditional::{conditional_from_joint, JointState};
use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

fn entropy_of_marginal(rho: &JointState, keep: &[&str], tol: &Tolerance) -> Result<f64> {
    if keep.is_empty() {
        return Ok(0.0);
    }
    rho.op().marginal(keep)?.von_neumann_entropy(tol)
}

fn check_partition(rho: &JointState, groups: &[&[&str]]) -> Result<()> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for g in groups {
        for id in *g {
            rho.op()
                .factor(id)
                .ok_or_else(|| Error::UnknownRegion((*id).into()))?;
            if !seen.insert(id) {
                return Err(Error::DuplicateRegion((*id).into()));
            }
        }
    }
    if seen.len() != rho.factors().len() {
        return Err(Error::Invalid(
            "region groups must cover every factor of the state exactly once".into(),
        ));
    }
    Ok(())
}

/// `I(A:B|C) = S(AC) + S(BC) − S(C) − S(ABC)` in bits. With `c` empty this is
/// the ordinary mutual information. Nonnegative up to numerical error.
pub fn conditional_mutual_information(
    rho: &JointState,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    tol: &Tolerance,
) -> Result<f64> {
    check_partition(rho, &[a, b, c])?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::Invalid("mutual information needs nonempty groups A and B".into()));
    }
    let mut ac: Vec<&str> = a.to_vec();
    ac.extend_from_slice(c);
    let mut bc: Vec<&str> = b.to_vec();
    bc.extend_from_slice(c);
    let s_ac = entropy_of_marginal(rho, &ac, tol)?;
    let s_bc = entropy_of_marginal(rho, &bc, tol)?;
    let s_c = entropy_of_marginal(rho, c, tol)?;
    let s_abc = rho.op().von_neumann_entropy(tol)?;
    Ok(s_ac + s_bc - s_c - s_abc)
}

/// CMI threshold below which two regions count as conditionally independent.
pub const CMI_TOL: f64 = 1e-8;

/// True iff `I(A:B|C)` vanishes within [`CMI_TOL`].
pub fn is_conditionally_independent(
    rho: &JointState,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    tol: &Tolerance,
) -> Result<bool> {
    let cmi = conditional_mutual_information(rho, a, b, c, tol)?;
    Ok(cmi.abs() <= CMI_TOL)
}

/// Operator identity `ρ_{A|BC} = ρ_{A|C}`: conditioning on B adds nothing once
/// C is known. Implied by vanishing CMI; checked as a spectral-norm distance.
pub fn check_ci_conditional_form(
    rho: &JointState,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    tol: &Tolerance,
) -> Result<bool> {
    check_partition(rho, &[a, b, c])?;
    let mut bc: Vec<&str> = b.to_vec();
    bc.extend_from_slice(c);
    let cond_abc = conditional_from_joint(rho, &bc, tol)?;
    let mut ac: Vec<&str> = a.to_vec();
    ac.extend_from_slice(c);
    let marg_ac = rho.marginal(&ac, tol)?;
    let cond_ac = conditional_from_joint(&marg_ac, c, tol)?;
    let padded = cond_ac.op().pad_to(rho.factors())?;
    // ρ_{A|BC} is confined to the support of ρ_{BC}; compare there, since the
    // padded ρ_{A|C} carries the identity on the rest of the BC space.
    let supp_bc = rho.op().marginal(&bc)?.support(tol)?;
    let proj = supp_bc.projector.pad_to(rho.factors())?;
    let projected = proj.mul(&padded)?.mul(&proj)?;
    let dist = cond_abc.op().distance(&projected)?;
    Ok(dist <= f64::max(tol.eq_tol, 1e-7) * rho.op().dim() as f64)
}

/// Operator identity `ρ_{AB|C} = ρ_{A|C} ρ_{B|C}`: the two conditionals
/// commute and multiply to the joint conditional. A one-directional signature:
/// vanishing CMI implies it, but it can hold for dependent regions too.
pub fn check_ci_product_form(
    rho: &JointState,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    tol: &Tolerance,
) -> Result<bool> {
    check_partition(rho, &[a, b, c])?;
    let cond_ab = conditional_from_joint(rho, c, tol)?;
    let mut ac: Vec<&str> = a.to_vec();
    ac.extend_from_slice(c);
    let mut bc: Vec<&str> = b.to_vec();
    bc.extend_from_slice(c);
    let cond_a = conditional_from_joint(&rho.marginal(&ac, tol)?, c, tol)?;
    let cond_b = conditional_from_joint(&rho.marginal(&bc, tol)?, c, tol)?;
    let product = cond_a
        .op()
        .pad_to(rho.factors())?
        .mul(&cond_b.op().pad_to(rho.factors())?)?;
    let dist = cond_ab.op().distance(&product)?;
    Ok(dist <= f64::max(tol.eq_tol, 1e-7) * rho.op().dim() as f64)
}
