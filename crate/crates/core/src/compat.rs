//! State compatibility with constructive witnesses.
//!
//! Two agents assigning states `σ^{(1)}`, `σ^{(2)}` to the same region hold
//! compatible beliefs exactly when the supports of their states intersect.
//! Beyond the yes/no verdict, this module *constructs* the evidence: an
//! objective witness (a hybrid joint from which both states arise by
//! conditioning on different classical variables) and a subjective witness (a
//! single binary measurement after which both agents hold the same posterior).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::conditional::JointState;
use crate::error::{Error, Result};
use crate::hybrid::{ClassicalDistribution, HybridState, LikelihoodOperator};
use crate::linalg::{self, CMat};
use crate::operator::{subspace_intersection, LabeledOperator, SupportSubspace};
use crate::region::Region;
use crate::tolerance::Tolerance;

/// Outcome of a compatibility test, carrying the support intersection.
#[derive(Debug, Clone)]
pub struct CompatibilityVerdict {
    pub compatible: bool,
    pub intersection: SupportSubspace,
}

/// Compatibility of two classical distributions: some value must be assigned
/// positive probability by both.
pub fn classical_compatible(
    q1: &ClassicalDistribution,
    q2: &ClassicalDistribution,
) -> Result<CompatibilityVerdict> {
    if q1.region() != q2.region() {
        return Err(Error::Mismatch {
            context: "classical_compatible region".into(),
            expected: q1.region().id.clone(),
            found: q2.region().id.clone(),
        });
    }
    let n = q1.region().dim;
    let common: Vec<usize> = (0..n)
        .filter(|&y| q1.probs()[y] > Tolerance::ABS_FLOOR && q2.probs()[y] > Tolerance::ABS_FLOOR)
        .collect();
    let basis = CMat::from_fn(n, common.len(), |i, j| {
        if i == common[j] {
            linalg::cr(1.0)
        } else {
            linalg::cr(0.0)
        }
    });
    let projector = &basis * basis.adjoint();
    let intersection = SupportSubspace {
        projector: LabeledOperator::new(vec![q1.region().clone()], projector)?,
        rank: common.len(),
        basis,
    };
    Ok(CompatibilityVerdict {
        compatible: intersection.rank >= 1,
        intersection,
    })
}

/// Compatibility of two density operators on the same region: their supports
/// must share a common subspace.
pub fn bfm_compatible(s1: &JointState, s2: &JointState, tol: &Tolerance) -> Result<CompatibilityVerdict> {
    if s1.factors() != s2.factors() {
        return Err(Error::Mismatch {
            context: "bfm_compatible factors".into(),
            expected: format!("{:?}", s1.op().factor_ids()),
            found: format!("{:?}", s2.op().factor_ids()),
        });
    }
    let p1 = s1.op().support(tol)?;
    let p2 = s2.op().support(tol)?;
    let intersection = subspace_intersection(&p1, &p2, tol)?;
    Ok(CompatibilityVerdict {
        compatible: intersection.rank >= 1,
        intersection,
    })
}

/// Witness that two compatible states can both arise from one shared joint by
/// conditioning on different classical bits.
///
/// The joint over `(X₁, X₂, B)` has four branches built from a common pure
/// component `μ` in the support intersection and per-agent remainders `η`:
/// conditioning on `X₁ = 0` yields `σ^{(1)}` and on `X₂ = 0` yields `σ^{(2)}`.
#[derive(Debug, Clone)]
pub struct ObjectiveWitness {
    pub joint: HybridState,
    pub outcomes: (usize, usize),
    pub mu: CMat,
    pub eta1: CMat,
    pub eta2: CMat,
    pub nu: CMat,
    pub p1: f64,
    pub p2: f64,
}

fn fresh_bit(base: &str, taken: &[&Region]) -> Region {
    let mut id = base.to_string();
    while taken.iter().any(|f| f.id == id) {
        id.insert(0, '_');
    }
    Region::classical(&id, 2)
}

/// Largest weight `p` such that `σ − p|ψ⟩⟨ψ|` stays positive, for a unit `ψ`
/// in the support of `σ`: `p = 1/⟨ψ|σ⁺|ψ⟩`.
fn max_pure_weight(sigma: &LabeledOperator, psi: &CMat, tol: &Tolerance) -> Result<f64> {
    let pinv = sigma.pseudo_inverse(tol)?;
    let q = (psi.adjoint() * pinv.matrix() * psi)[(0, 0)].re;
    if q <= 0.0 {
        return Err(Error::Invalid(
            "witness vector fell outside the support of an input state".into(),
        ));
    }
    Ok(1.0 / q)
}

pub fn objective_witness(s1: &JointState, s2: &JointState, tol: &Tolerance) -> Result<ObjectiveWitness> {
    let verdict = bfm_compatible(s1, s2, tol)?;
    if !verdict.compatible {
        return Err(Error::Incompatible);
    }
    let d = s1.op().dim();
    // Pick the dominant direction of the intersection-restricted mass so the
    // witness is deterministic and well-conditioned.
    let pi = verdict.intersection.projector.matrix();
    let avg = pi * (s1.op().matrix() + s2.op().matrix()) * pi;
    let (vals, vecs) = linalg::herm_eig(&linalg::hermitize(&avg));
    let top = vals.len() - 1;
    let psi = CMat::from_fn(d, 1, |i, _| vecs[(i, top)]);
    let mu = &psi * psi.adjoint();

    let p1 = max_pure_weight(s1.op(), &psi, tol)?.min(1.0);
    let p2 = max_pure_weight(s2.op(), &psi, tol)?.min(1.0);
    let eta = |sigma: &CMat, p: f64| -> CMat {
        if 1.0 - p <= 1e-12 {
            mu.clone()
        } else {
            (sigma - mu.scale(p)).scale(1.0 / (1.0 - p))
        }
    };
    let eta1 = eta(s1.op().matrix(), p1);
    let eta2 = eta(s2.op().matrix(), p2);
    let nu = linalg::identity(d).scale(1.0 / d as f64);

    let quantum = s1.factors().to_vec();
    let refs: Vec<&Region> = quantum.iter().collect();
    let x1 = fresh_bit("X1", &refs);
    let x2 = fresh_bit("X2", &refs);
    let mut components = std::collections::BTreeMap::new();
    components.insert(vec![0, 0], mu.scale(p1 * p2));
    components.insert(vec![0, 1], eta1.scale((1.0 - p1) * p2));
    components.insert(vec![1, 0], eta2.scale(p1 * (1.0 - p2)));
    components.insert(vec![1, 1], nu.scale((1.0 - p1) * (1.0 - p2)));
    let joint = HybridState::new(vec![x1.clone(), x2.clone()], quantum, components, tol)?;

    // The construction is only returned once it demonstrably reproduces both
    // inputs by conditioning.
    let c1 = joint.condition(&[(&x1.id, 0)], tol)?;
    let c2 = joint.condition(&[(&x2.id, 0)], tol)?;
    let check_tol = f64::max(tol.eq_tol, 1e-8);
    if c1.op().distance(s1.op())? > check_tol || c2.op().distance(s2.op())? > check_tol {
        return Err(Error::Invalid(
            "objective witness failed its conditioning self-check".into(),
        ));
    }
    Ok(ObjectiveWitness {
        joint,
        outcomes: (0, 0),
        mu,
        eta1,
        eta2,
        nu,
        p1,
        p2,
    })
}

/// Witness that two compatible agents can be brought into agreement by data:
/// a binary measurement and an outcome after which both posteriors coincide.
#[derive(Debug, Clone)]
pub struct SubjectiveWitness {
    pub likelihood: LikelihoodOperator,
    pub outcome: usize,
    pub posterior: JointState,
}

pub fn subjective_witness(s1: &JointState, s2: &JointState, tol: &Tolerance) -> Result<SubjectiveWitness> {
    let verdict = bfm_compatible(s1, s2, tol)?;
    if !verdict.compatible {
        return Err(Error::Incompatible);
    }
    let d = s1.op().dim();
    // Work on W = supp(σ₁ + σ₂); everything below is expressed in a basis U
    // of W, where both square roots act invariantly.
    let total = s1.op().add(s2.op())?.scale(0.5);
    let w = total.support(tol)?;
    let u = w.basis.clone(); // d × r, orthonormal columns
    let a1 = u.adjoint() * s1.op().sqrt_psd(tol)?.matrix() * &u;
    let a2 = u.adjoint() * s2.op().sqrt_psd(tol)?.matrix() * &u;
    // S = A₁ + A₂ is positive definite on W, so the pencil
    // B₁ = S^{-1/2} A₁ S^{-1/2}, B₂ = I − B₁ is a commuting pair. Any common
    // eigenvector with eigenvalue strictly inside (0,1) maps, through S^{±1/2},
    // to an effect vector whose posterior is the same rank-one state for both
    // agents; an eigenvalue in the open interval exists precisely when the
    // supports intersect.
    let s = linalg::hermitize(&(&a1 + &a2));
    let (s_vals, s_vecs) = linalg::herm_eig(&s);
    let r = s_vals.len();
    let map = |f: &dyn Fn(f64) -> f64| -> CMat {
        let diag = DMatrix::from_fn(r, r, |i, j| {
            if i == j {
                Complex64::new(f(s_vals[i]), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &s_vecs * diag * s_vecs.adjoint()
    };
    let s_isqrt = map(&|v: f64| if v > Tolerance::ABS_FLOOR { 1.0 / v.sqrt() } else { 0.0 });
    let s_sqrt = map(&|v: f64| if v > 0.0 { v.sqrt() } else { 0.0 });
    let b1 = linalg::hermitize(&(&s_isqrt * &a1 * &s_isqrt));
    let (nus, gs) = linalg::herm_eig(&b1);
    // Deterministic pick: the eigenvalue nearest 1/2, i.e. the direction on
    // which the two agents weigh in most evenly.
    let margin = 1e-7;
    let mut best: Option<usize> = None;
    for k in 0..nus.len() {
        if nus[k] > margin && nus[k] < 1.0 - margin {
            let better = match best {
                None => true,
                Some(b) => (nus[k] - 0.5).abs() < (nus[b] - 0.5).abs(),
            };
            if better {
                best = Some(k);
            }
        }
    }
    let k = best.ok_or(Error::Incompatible)?;
    let g = CMat::from_fn(r, 1, |i, _| gs[(i, k)]);
    // Effect direction e and agreed posterior direction v, lifted back to the
    // ambient space.
    let e_w = &s_isqrt * &g;
    let v_w = &s_sqrt * &g;
    let e_full = &u * e_w;
    let v_full = &u * v_w;
    let e_norm = (e_full.adjoint() * &e_full)[(0, 0)].re.sqrt();
    let v_norm = (v_full.adjoint() * &v_full)[(0, 0)].re.sqrt();
    if e_norm <= Tolerance::ABS_FLOOR || v_norm <= Tolerance::ABS_FLOOR {
        return Err(Error::Incompatible);
    }
    let e_unit = e_full.scale(1.0 / e_norm);
    let v_unit = v_full.scale(1.0 / v_norm);
    let effect0 = &e_unit * e_unit.adjoint();
    let effect1 = linalg::identity(d) - &effect0;

    let quantum = s1.factors().to_vec();
    let refs: Vec<&Region> = quantum.iter().collect();
    let x = fresh_bit("X", &refs);
    let likelihood = LikelihoodOperator::new(x, quantum.clone(), vec![effect0, effect1], tol)?;
    let posterior = JointState::acausal(
        LabeledOperator::new(quantum, linalg::hermitize(&(&v_unit * v_unit.adjoint())))?,
        tol,
    )?;

    // Self-check before returning: both agents actually land on `posterior`.
    let check_tol = f64::max(tol.eq_tol, 1e-8);
    for s in [s1, s2] {
        let post = posterior_given_likelihood(s, &likelihood, 0, tol)?;
        if post.op().distance(posterior.op())? > check_tol {
            return Err(Error::Invalid(
                "subjective witness failed its posterior self-check".into(),
            ));
        }
    }
    Ok(SubjectiveWitness {
        likelihood,
        outcome: 0,
        posterior,
    })
}

/// Bayesian update of `σ` on outcome `x` of a measurement:
/// `σ ↦ (E_x ⋆ σ) / Tr[E_x σ]`.
pub fn posterior_given_likelihood(
    sigma: &JointState,
    l: &LikelihoodOperator,
    x: usize,
    tol: &Tolerance,
) -> Result<JointState> {
    if sigma.factors() != l.quantum_regions() {
        return Err(Error::Mismatch {
            context: "posterior_given_likelihood factors".into(),
            expected: format!("{:?}", l.quantum_regions().iter().map(|f| &f.id).collect::<Vec<_>>()),
            found: format!("{:?}", sigma.op().factor_ids()),
        });
    }
    let effect = l.effect_operator(x)?;
    let prob = effect.mul(sigma.op())?.trace().re;
    if prob <= Tolerance::ABS_FLOOR {
        return Err(Error::ZeroProbabilityEvent { prob });
    }
    let updated = effect.star(sigma.op(), tol)?.scale(1.0 / prob);
    JointState::acausal(updated.hermitize(), tol)
}

/// Conditioning can never create support the prior lacks: checks that the
/// component of `h` at the given classical values has no weight outside the
/// support of the quantum marginal.
pub fn support_lemma_check(h: &HybridState, values: &[usize], tol: &Tolerance) -> Result<bool> {
    let prior = h.quantum_marginal(tol)?;
    support_lemma_check_with_prior(h, values, &prior, tol)
}

/// Same check against an externally supplied prior, e.g. the state an agent
/// assigned before a component was tampered with.
pub fn support_lemma_check_with_prior(
    h: &HybridState,
    values: &[usize],
    prior: &JointState,
    tol: &Tolerance,
) -> Result<bool> {
    let p = h.prob(values)?;
    if p <= Tolerance::ABS_FLOOR {
        return Err(Error::ZeroProbabilityEvent { prob: p });
    }
    let supp = prior.op().support(tol)?;
    let comp = h.component(values)?;
    let d = comp.nrows();
    let outside = linalg::identity(d) - supp.projector.matrix();
    let leak = linalg::op_norm(&(&outside * comp * &outside));
    Ok(leak <= f64::max(tol.eq_tol, 1e-8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cr;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    const TOL: Tolerance = Tolerance::new(1e-10, 1e-9);

    fn qubit_state(rows: &[&[f64]]) -> JointState {
        let n = rows.len();
        JointState::acausal(
            LabeledOperator::new(
                vec![Region::quantum("B", n)],
                CMat::from_fn(n, n, |i, j| cr(rows[i][j])),
            )
            .unwrap(),
            &TOL,
        )
        .unwrap()
    }

    fn ket_density(v: &[f64]) -> CMat {
        let n = v.len();
        CMat::from_fn(n, n, |i, j| cr(v[i] * v[j]))
    }

    #[test]
    fn classical_compatibility_examples() {
        let r = Region::classical("Y", 2);
        let q1 = ClassicalDistribution::new(r.clone(), vec![1.0, 0.0]).unwrap();
        let q2 = ClassicalDistribution::new(r.clone(), vec![0.0, 1.0]).unwrap();
        let v = classical_compatible(&q1, &q2).unwrap();
        assert!(!v.compatible);
        assert_eq!(v.intersection.rank, 0);

        let u = ClassicalDistribution::uniform(r).unwrap();
        let v = classical_compatible(&u, &q1).unwrap();
        assert!(v.compatible);
        assert_eq!(v.intersection.rank, 1);
        assert_abs_diff_eq!(v.intersection.projector.matrix()[(0, 0)].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn classical_agrees_with_quantum_on_embeddings() {
        let r = Region::classical("Y", 4);
        let q1 = ClassicalDistribution::new(r.clone(), vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let q2 = ClassicalDistribution::new(r.clone(), vec![0.0, 0.25, 0.25, 0.5]).unwrap();
        let cv = classical_compatible(&q1, &q2).unwrap();
        let qv = bfm_compatible(&q1.embed(&TOL).unwrap(), &q2.embed(&TOL).unwrap(), &TOL).unwrap();
        assert_eq!(cv.compatible, qv.compatible);
        assert_eq!(cv.intersection.rank, qv.intersection.rank);
    }

    #[test]
    fn bfm_examples() {
        let zero = qubit_state(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let one = qubit_state(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let mixed = qubit_state(&[&[0.5, 0.0], &[0.0, 0.5]]);
        let v = bfm_compatible(&zero, &one, &TOL).unwrap();
        assert!(!v.compatible);
        let v = bfm_compatible(&zero, &zero, &TOL).unwrap();
        assert!(v.compatible);
        assert_eq!(v.intersection.rank, 1);
        let v = bfm_compatible(&mixed, &zero, &TOL).unwrap();
        assert!(v.compatible);
        assert_eq!(v.intersection.rank, 1);
        assert_abs_diff_eq!(
            linalg::op_norm(&(v.intersection.projector.matrix() - ket_density(&[1.0, 0.0]))),
            0.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn objective_witness_pure_degenerate() {
        let psi = qubit_state(&[&[0.64, 0.48], &[0.48, 0.36]]);
        let w = objective_witness(&psi, &psi, &TOL).unwrap();
        assert_abs_diff_eq!(w.p1, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(w.p2, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(linalg::op_norm(&(&w.mu - psi.op().matrix())), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn objective_witness_mixed_vs_pure() {
        let mixed = qubit_state(&[&[0.5, 0.0], &[0.0, 0.5]]);
        let zero = qubit_state(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let w = objective_witness(&mixed, &zero, &TOL).unwrap();
        assert_abs_diff_eq!(w.p1, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(w.p2, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(linalg::op_norm(&(&w.mu - ket_density(&[1.0, 0.0]))), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(linalg::op_norm(&(&w.eta1 - ket_density(&[0.0, 1.0]))), 0.0, epsilon = 1e-9);
        // joint conditionals reproduce inputs (also asserted internally)
        let ids: Vec<String> = w.joint.classical_regions().iter().map(|f| f.id.clone()).collect();
        let c1 = w.joint.condition(&[(&ids[0], 0)], &TOL).unwrap();
        assert!(c1.op().approx_eq(mixed.op(), 1e-9));
    }

    #[test]
    fn objective_witness_rejects_incompatible() {
        let zero = qubit_state(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let one = qubit_state(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(objective_witness(&zero, &one, &TOL), Err(Error::Incompatible)));
        assert!(matches!(subjective_witness(&zero, &one, &TOL), Err(Error::Incompatible)));
    }

    #[test]
    fn subjective_witness_examples() {
        // identical pure states agree trivially
        let zero = qubit_state(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let w = subjective_witness(&zero, &zero, &TOL).unwrap();
        assert!(w.posterior.op().approx_eq(zero.op(), 1e-9));

        // full-rank pair: the agreed posterior is rank one and both updates land on it
        let mixed = qubit_state(&[&[0.5, 0.0], &[0.0, 0.5]]);
        let tilted = qubit_state(&[&[0.75, 0.0], &[0.0, 0.25]]);
        let w = subjective_witness(&mixed, &tilted, &TOL).unwrap();
        for s in [&mixed, &tilted] {
            let post = posterior_given_likelihood(s, &w.likelihood, w.outcome, &TOL).unwrap();
            assert!(post.op().approx_eq(w.posterior.op(), 1e-9));
        }
        let evals = w.posterior.op().eigenvalues();
        assert_abs_diff_eq!(evals[evals.len() - 1], 1.0, epsilon = 1e-9);

        // off-diagonal pair with partial overlap
        let a = qubit_state(&[&[0.9, 0.1], &[0.1, 0.1]]);
        let b = qubit_state(&[&[0.3, -0.2], &[-0.2, 0.7]]);
        let w = subjective_witness(&a, &b, &TOL).unwrap();
        let pa = posterior_given_likelihood(&a, &w.likelihood, 0, &TOL).unwrap();
        let pb = posterior_given_likelihood(&b, &w.likelihood, 0, &TOL).unwrap();
        assert!(pa.op().approx_eq(pb.op(), 1e-9));
    }

    #[test]
    fn subjective_witness_classical_pair_is_point_mass() {
        // diagonal states overlapping on exactly one basis value: the common
        // posterior must be the point mass on that value
        let q1 = qubit_state(&[&[0.5, 0.0], &[0.0, 0.5]]);
        let q2 = qubit_state(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let w = subjective_witness(&q1, &q2, &TOL).unwrap();
        assert!(w.posterior.op().approx_eq(&LabeledOperator::new(
            vec![Region::quantum("B", 2)],
            ket_density(&[1.0, 0.0])
        ).unwrap(), 1e-9));
    }

    #[test]
    fn posterior_examples() {
        let mixed = qubit_state(&[&[0.5, 0.0], &[0.0, 0.5]]);
        let x = Region::classical("X", 2);
        let b = Region::quantum("B", 2);
        // projective case
        let l = LikelihoodOperator::new(
            x.clone(),
            vec![b.clone()],
            vec![ket_density(&[1.0, 0.0]), ket_density(&[0.0, 1.0])],
            &TOL,
        )
        .unwrap();
        let p = posterior_given_likelihood(&mixed, &l, 0, &TOL).unwrap();
        assert!(p.op().approx_eq(
            &LabeledOperator::new(vec![b.clone()], ket_density(&[1.0, 0.0])).unwrap(),
            1e-12
        ));
        // weighted diagonal case
        let e0 = CMat::from_fn(2, 2, |i, j| if i == j { cr([0.5, 0.25][i]) } else { cr(0.0) });
        let e1 = linalg::identity(2) - &e0;
        let l = LikelihoodOperator::new(x.clone(), vec![b.clone()], vec![e0, e1], &TOL).unwrap();
        let p = posterior_given_likelihood(&mixed, &l, 0, &TOL).unwrap();
        assert_abs_diff_eq!(p.op().matrix()[(0, 0)].re, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.op().matrix()[(1, 1)].re, 1.0 / 3.0, epsilon = 1e-12);
        // uninformative outcome leaves the state alone
        let l = LikelihoodOperator::new(
            x,
            vec![b],
            vec![linalg::identity(2).scale(0.5), linalg::identity(2).scale(0.5)],
            &TOL,
        )
        .unwrap();
        let sigma = qubit_state(&[&[0.7, 0.2], &[0.2, 0.3]]);
        let p = posterior_given_likelihood(&sigma, &l, 0, &TOL).unwrap();
        assert!(p.op().approx_eq(sigma.op(), 1e-12));
        // zero-probability outcome errors
        let one = qubit_state(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let l = LikelihoodOperator::new(
            Region::classical("X", 2),
            vec![Region::quantum("B", 2)],
            vec![ket_density(&[1.0, 0.0]), ket_density(&[0.0, 1.0])],
            &TOL,
        )
        .unwrap();
        assert!(matches!(
            posterior_given_likelihood(&one, &l, 0, &TOL),
            Err(Error::ZeroProbabilityEvent { .. })
        ));
    }

    #[test]
    fn support_lemma_holds_and_detects_corruption() {
        let x = Region::classical("X", 2);
        let b = Region::quantum("B", 2);
        let mut comps = BTreeMap::new();
        comps.insert(vec![0], ket_density(&[1.0, 0.0]).scale(0.6));
        comps.insert(vec![1], ket_density(&[1.0, 0.0]).scale(0.4));
        let h = HybridState::new(vec![x.clone()], vec![b.clone()], comps, &TOL).unwrap();
        assert!(support_lemma_check(&h, &[0], &TOL).unwrap());
        assert!(support_lemma_check(&h, &[1], &TOL).unwrap());

        // corrupting a component to leak outside a rank-deficient prior is
        // detected when checking against that prior
        let rank_one_prior = JointState::acausal(
            LabeledOperator::new(vec![b.clone()], ket_density(&[1.0, 0.0])).unwrap(),
            &TOL,
        )
        .unwrap();
        let mut comps = BTreeMap::new();
        comps.insert(vec![0], ket_density(&[1.0, 0.0]).scale(0.999));
        comps.insert(vec![1], ket_density(&[0.0, 1.0]).scale(0.001));
        let corrupted = HybridState::new(vec![x], vec![b], comps, &TOL).unwrap();
        assert!(support_lemma_check_with_prior(&corrupted, &[0], &rank_one_prior, &TOL).unwrap());
        assert!(!support_lemma_check_with_prior(&corrupted, &[1], &rank_one_prior, &TOL).unwrap());
        // against its own marginal the hybrid is always consistent
        assert!(support_lemma_check(&corrupted, &[1], &TOL).unwrap());
    }
}
