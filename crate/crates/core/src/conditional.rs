//! Joint and conditional states, Bayesian inversion, belief propagation, and
//! the correspondence between channels and conditional operators.
//!
//! A joint operator's positivity condition depends on how its regions are
//! causally related: acausal joints are positive semidefinite, causally
//! related joints are positive under partial transpose of the earlier
//! factors, and hybrid (classical/quantum) joints are block diagonal over the
//! classical values, where the two conditions coincide. The class is carried
//! as explicit metadata — it is never inferred from the matrix, because the
//! same matrix can be valid in one class and invalid in another.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::operator::LabeledOperator;
use crate::region::{Region, RegionKind};
use crate::tolerance::Tolerance;

/// Trace deviation allowed when accepting a state as normalized.
pub const TRACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "class")]
pub enum CausalClass {
    /// No causal connection between the factors: the operator itself is PSD.
    Acausal,
    /// Causally connected factors: PSD after transposing `transposed`.
    Causal { transposed: BTreeSet<String> },
    /// Block diagonal over classical factors; PSD and PSD-under-partial-
    /// transpose coincide.
    Hybrid,
}

/// Frobenius mass of the entries that couple different values of classical
/// factors. Zero for a well-formed hybrid/classical operator.
pub fn off_block_mass(op: &LabeledOperator) -> f64 {
    let dims = op.dims();
    let classical: Vec<usize> = op
        .factors()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.kind == RegionKind::Classical)
        .map(|(k, _)| k)
        .collect();
    if classical.is_empty() {
        return 0.0;
    }
    let st = linalg::strides(&dims);
    let digit = |i: usize, k: usize| (i / st[k]) % dims[k];
    let m = op.matrix();
    let mut mass = 0.0f64;
    for i in 0..op.dim() {
        for j in 0..op.dim() {
            if classical.iter().any(|&k| digit(i, k) != digit(j, k)) {
                mass += m[(i, j)].norm_sqr();
            }
        }
    }
    mass.sqrt()
}

/// Diagnostic produced by [`validate`]: every check result, plus the overall
/// verdict for the declared class.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub trace: f64,
    pub hermitian_deviation: f64,
    /// Minimum eigenvalue of the operator (acausal/hybrid) or of its partial
    /// transpose (causal).
    pub positivity_min_eig: f64,
    /// Off-block mass over classical factors; checked only for hybrids.
    pub block_diagonal_mass: Option<f64>,
    pub passed: bool,
}

fn class_min_eig(op: &LabeledOperator, class: &CausalClass) -> Result<f64> {
    let checked = match class {
        CausalClass::Causal { transposed } => {
            let ids: Vec<&str> = transposed.iter().map(|s| s.as_str()).collect();
            op.partial_transpose(&ids)?
        }
        _ => op.clone(),
    };
    Ok(checked.min_eigenvalue())
}

/// Check trace, Hermiticity, and the positivity condition appropriate to the
/// declared causal class, without constructing a state.
pub fn validate(op: &LabeledOperator, class: &CausalClass, tol: &Tolerance) -> Result<ValidationReport> {
    let trace = op.trace().re;
    let hermitian_deviation = op.hermitian_deviation();
    let min_eig = class_min_eig(op, class)?;
    let scale = op.norm().max(1.0);
    let mut passed = (trace - 1.0).abs() <= TRACE_TOL
        && hermitian_deviation <= tol.eq_tol
        && min_eig >= -tol.eig_cut * scale;
    let block_diagonal_mass = if *class == CausalClass::Hybrid {
        let mass = off_block_mass(op);
        passed = passed && mass <= tol.eq_tol;
        Some(mass)
    } else {
        None
    };
    Ok(ValidationReport {
        trace,
        hermitian_deviation,
        positivity_min_eig: min_eig,
        block_diagonal_mass,
        passed,
    })
}

/// A normalized state over one or more regions, with its causal class.
#[derive(Debug, Clone)]
pub struct JointState {
    op: LabeledOperator,
    class: CausalClass,
}

impl JointState {
    pub fn new(op: LabeledOperator, class: CausalClass, tol: &Tolerance) -> Result<Self> {
        let report = validate(&op, &class, tol)?;
        if (report.trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne {
                what: "joint state".into(),
                trace: report.trace,
            });
        }
        if report.hermitian_deviation > tol.eq_tol {
            return Err(Error::NotHermitian {
                deviation: report.hermitian_deviation,
            });
        }
        if let Some(mass) = report.block_diagonal_mass {
            if mass > tol.eq_tol {
                return Err(Error::NotBlockDiagonal { mass });
            }
        }
        if !report.passed {
            return Err(Error::NotPositive {
                what: "joint state (under its declared causal class)".into(),
                min_eig: report.positivity_min_eig,
            });
        }
        Ok(Self { op, class })
    }

    pub fn acausal(op: LabeledOperator, tol: &Tolerance) -> Result<Self> {
        Self::new(op, CausalClass::Acausal, tol)
    }

    pub fn hybrid(op: LabeledOperator, tol: &Tolerance) -> Result<Self> {
        Self::new(op, CausalClass::Hybrid, tol)
    }

    pub fn causal(op: LabeledOperator, transposed: BTreeSet<String>, tol: &Tolerance) -> Result<Self> {
        Self::new(op, CausalClass::Causal { transposed }, tol)
    }

    pub fn op(&self) -> &LabeledOperator {
        &self.op
    }

    pub fn class(&self) -> &CausalClass {
        &self.class
    }

    pub fn factors(&self) -> &[Region] {
        self.op.factors()
    }

    pub fn validate(&self, tol: &Tolerance) -> Result<ValidationReport> {
        validate(&self.op, &self.class, tol)
    }

    /// Marginal state on `keep`, with the causal class restricted accordingly.
    pub fn marginal(&self, keep: &[&str], tol: &Tolerance) -> Result<Self> {
        let op = self.op.marginal(keep)?;
        let class = marginal_class(&self.class, op.factors());
        Self::new(op, class, tol)
    }
}

fn marginal_class(class: &CausalClass, remaining: &[Region]) -> CausalClass {
    match class {
        CausalClass::Acausal => CausalClass::Acausal,
        CausalClass::Hybrid => {
            if remaining.iter().any(|f| f.kind == RegionKind::Classical) {
                CausalClass::Hybrid
            } else {
                CausalClass::Acausal
            }
        }
        CausalClass::Causal { transposed } => {
            let kept: BTreeSet<String> = transposed
                .iter()
                .filter(|id| remaining.iter().any(|f| &f.id == *id))
                .cloned()
                .collect();
            if kept.is_empty() {
                CausalClass::Acausal
            } else {
                CausalClass::Causal { transposed: kept }
            }
        }
    }
}

/// An operator relating beliefs about the `conditioned` factors to beliefs
/// about the `conditioning` factors; its trace over the conditioned factors
/// is the identity — or, when built from a rank-deficient marginal, the
/// support projector of that marginal.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    op: LabeledOperator,
    conditioned: BTreeSet<String>,
    conditioning: BTreeSet<String>,
    class: CausalClass,
}

impl ConditionalState {
    pub fn new(
        op: LabeledOperator,
        conditioned: BTreeSet<String>,
        conditioning: BTreeSet<String>,
        class: CausalClass,
        tol: &Tolerance,
    ) -> Result<Self> {
        let all: BTreeSet<String> = op.factor_ids().into_iter().collect();
        let declared: BTreeSet<String> = conditioned.union(&conditioning).cloned().collect();
        if declared != all || !conditioned.is_disjoint(&conditioning) {
            return Err(Error::Invalid(
                "conditioned/conditioning ids must partition the operator's factors".into(),
            ));
        }
        let conditioned_ids: Vec<&str> = conditioned.iter().map(|s| s.as_str()).collect();
        let reduced = op.partial_trace(&conditioned_ids)?;
        // Must be a projector (identity on the full-rank case).
        let dev = reduced.mul(&reduced)?.distance(&reduced)?;
        if dev > f64::max(tol.eq_tol, 1e-8) {
            return Err(Error::NotNormalizedConditional { deviation: dev });
        }
        Ok(Self {
            op,
            conditioned,
            conditioning,
            class,
        })
    }

    pub fn op(&self) -> &LabeledOperator {
        &self.op
    }

    pub fn conditioned(&self) -> &BTreeSet<String> {
        &self.conditioned
    }

    pub fn conditioning(&self) -> &BTreeSet<String> {
        &self.conditioning
    }

    pub fn class(&self) -> &CausalClass {
        &self.class
    }

    fn conditioning_ids(&self) -> Vec<&str> {
        self.conditioning.iter().map(|s| s.as_str()).collect()
    }
}

/// `τ_{B|A} = τ_AB ⋆ τ_A⁻¹` with `A = given`; the marginal on `given` is
/// computed internally and inverted on its support.
pub fn conditional_from_joint(j: &JointState, given: &[&str], tol: &Tolerance) -> Result<ConditionalState> {
    let marg = j.op().marginal(given)?;
    let inv = marg.pseudo_inverse(tol)?;
    let op = j.op().star(&inv, tol)?;
    let conditioning: BTreeSet<String> = given.iter().map(|s| (*s).to_string()).collect();
    let conditioned: BTreeSet<String> = j
        .op()
        .factor_ids()
        .into_iter()
        .filter(|id| !conditioning.contains(id))
        .collect();
    ConditionalState::new(op, conditioned, conditioning, j.class().clone(), tol)
}

/// `τ_AB = τ_{B|A} ⋆ τ_A`.
pub fn joint_from_conditional(c: &ConditionalState, marginal: &JointState, tol: &Tolerance) -> Result<JointState> {
    let marg_ids: BTreeSet<String> = marginal.op().factor_ids().into_iter().collect();
    if marg_ids != *c.conditioning() {
        return Err(Error::Mismatch {
            context: "joint_from_conditional marginal factors".into(),
            expected: format!("{:?}", c.conditioning()),
            found: format!("{marg_ids:?}"),
        });
    }
    let op = c.op().star(marginal.op(), tol)?;
    JointState::new(op, c.class().clone(), tol)
}

/// `τ_B = Tr_A[τ_{B|A} τ_A]`: propagate beliefs about the conditioning
/// factors through the conditional. For causal conditionals this is exactly
/// the action of the corresponding channel.
pub fn belief_propagate(c: &ConditionalState, state_a: &JointState, tol: &Tolerance) -> Result<JointState> {
    let marg_ids: BTreeSet<String> = state_a.op().factor_ids().into_iter().collect();
    if marg_ids != *c.conditioning() {
        return Err(Error::Mismatch {
            context: "belief_propagate state factors".into(),
            expected: format!("{:?}", c.conditioning()),
            found: format!("{marg_ids:?}"),
        });
    }
    let ids: Vec<&str> = c.conditioning_ids();
    let op = c.op().mul(state_a.op())?.partial_trace(&ids)?.hermitize();
    let class = if op.factors().iter().any(|f| f.kind == RegionKind::Classical) {
        CausalClass::Hybrid
    } else {
        CausalClass::Acausal
    };
    JointState::new(op, class, tol)
}

/// `τ_{A|B} = τ_{B|A} ⋆ (τ_A τ_B⁻¹)` with `τ_B` obtained by belief
/// propagation: inverts the direction of conditioning.
pub fn bayes_invert(c: &ConditionalState, marg_a: &JointState, tol: &Tolerance) -> Result<ConditionalState> {
    let tau_b = belief_propagate(c, marg_a, tol)?;
    // τ_A and τ_B⁻¹ live on disjoint factors, so their aligned product is the
    // PSD operator τ_A ⊗ τ_B⁻¹.
    let n = marg_a.op().mul(&tau_b.op().pseudo_inverse(tol)?)?;
    let op = c.op().star(&n, tol)?;
    let class = match c.class() {
        CausalClass::Causal { .. } => CausalClass::Causal {
            transposed: c.conditioned().clone(),
        },
        other => other.clone(),
    };
    ConditionalState::new(op, c.conditioning().clone(), c.conditioned().clone(), class, tol)
}

/// A completely positive trace-preserving map between single regions, in
/// Kraus form.
#[derive(Debug, Clone)]
pub struct Channel {
    input: Region,
    output: Region,
    kraus: Vec<CMat>,
}

impl Channel {
    pub fn new(input: Region, output: Region, kraus: Vec<CMat>, tol: &Tolerance) -> Result<Self> {
        Self::new_inner(input, output, kraus, tol, true)
    }

    /// Trace-nonincreasing variant used for instrument branches.
    pub fn new_subnormalized(input: Region, output: Region, kraus: Vec<CMat>, tol: &Tolerance) -> Result<Self> {
        Self::new_inner(input, output, kraus, tol, false)
    }

    fn new_inner(
        input: Region,
        output: Region,
        kraus: Vec<CMat>,
        tol: &Tolerance,
        trace_preserving: bool,
    ) -> Result<Self> {
        input.validate()?;
        output.validate()?;
        if input.id == output.id {
            return Err(Error::DuplicateRegion(input.id));
        }
        for k in &kraus {
            if k.nrows() != output.dim || k.ncols() != input.dim {
                return Err(Error::MatrixShape {
                    rows: k.nrows(),
                    cols: k.ncols(),
                    expected: output.dim,
                });
            }
        }
        let ch = Self {
            input,
            output,
            kraus,
        };
        let sum = ch.kraus_gram();
        let dev = if trace_preserving {
            linalg::op_norm(&(sum - linalg::identity(ch.input.dim)))
        } else {
            // 0 ≤ Σ K†K ≤ I
            let vals = linalg::herm_eig(&sum).0;
            let below = vals.first().map(|&v| (-v).max(0.0)).unwrap_or(0.0);
            let above = vals.last().map(|&v| (v - 1.0).max(0.0)).unwrap_or(0.0);
            below.max(above)
        };
        if dev > f64::max(tol.eq_tol, 1e-8) {
            return Err(Error::NotTracePreserving { deviation: dev });
        }
        Ok(ch)
    }

    /// `Σ K†K`.
    pub fn kraus_gram(&self) -> CMat {
        let mut sum = CMat::zeros(self.input.dim, self.input.dim);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        sum
    }

    pub fn input(&self) -> &Region {
        &self.input
    }

    pub fn output(&self) -> &Region {
        &self.output
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn apply_matrix(&self, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(self.output.dim, self.output.dim);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    pub fn apply(&self, rho: &JointState, tol: &Tolerance) -> Result<JointState> {
        if rho.factors() != [self.input.clone()] {
            return Err(Error::Mismatch {
                context: "channel input".into(),
                expected: self.input.id.clone(),
                found: format!("{:?}", rho.op().factor_ids()),
            });
        }
        let out = self.apply_matrix(rho.op().matrix());
        JointState::acausal(
            LabeledOperator::new(vec![self.output.clone()], linalg::hermitize(&out))?,
            tol,
        )
    }

    pub fn compose(&self, earlier: &Channel, tol: &Tolerance) -> Result<Channel> {
        if earlier.output.dim != self.input.dim {
            return Err(Error::Mismatch {
                context: "channel composition".into(),
                expected: format!("input dim {}", self.input.dim),
                found: format!("output dim {}", earlier.output.dim),
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * earlier.kraus.len());
        for k2 in &self.kraus {
            for k1 in &earlier.kraus {
                kraus.push(k2 * k1);
            }
        }
        Channel::new_inner(earlier.input.clone(), self.output.clone(), kraus, tol, true)
    }
}

/// The conditional operator of a channel in the computational basis of the
/// input region: `ϱ_{B|A} = Σ_{j,k} |j⟩⟨k|_A ⊗ E(|k⟩⟨j|)`.
pub fn channel_to_conditional(ch: &Channel, tol: &Tolerance) -> Result<ConditionalState> {
    let din = ch.input().dim;
    let dout = ch.output().dim;
    let n = din * dout;
    // matrix in [input, output] order
    let mut m = CMat::zeros(n, n);
    for j in 0..din {
        for k in 0..din {
            let mut basis = CMat::zeros(din, din);
            basis[(k, j)] = linalg::cr(1.0);
            let block = ch.apply_matrix(&basis);
            for b in 0..dout {
                for b2 in 0..dout {
                    m[(j * dout + b, k * dout + b2)] = block[(b, b2)];
                }
            }
        }
    }
    let op = LabeledOperator::new(vec![ch.input().clone(), ch.output().clone()], m)?;
    ConditionalState::new(
        op,
        BTreeSet::from([ch.output().id.clone()]),
        BTreeSet::from([ch.input().id.clone()]),
        CausalClass::Causal {
            transposed: BTreeSet::from([ch.input().id.clone()]),
        },
        tol,
    )
}

/// Recover the channel from a causal conditional between two single regions.
/// Fails with a complete-positivity error when the partial transpose over the
/// conditioning factor is not PSD.
pub fn conditional_to_channel(c: &ConditionalState, tol: &Tolerance) -> Result<Channel> {
    if c.conditioning().len() != 1 || c.conditioned().len() != 1 {
        return Err(Error::Invalid(
            "channel extraction requires a single conditioning and a single conditioned factor".into(),
        ));
    }
    let in_id = c.conditioning().iter().next().expect("one conditioning id").clone();
    let out_id = c.conditioned().iter().next().expect("one conditioned id").clone();
    let input = c.op().factor(&in_id).expect("factor present").clone();
    let output = c.op().factor(&out_id).expect("factor present").clone();
    let choi = c.op().partial_transpose(&[&in_id])?;
    let (vals, vecs) = linalg::herm_eig(&choi.matrix_in_order(&[&in_id, &out_id])?);
    let scale = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let cut = tol.eig_threshold(scale);
    if let Some(&min) = vals.first() {
        if min < -cut {
            return Err(Error::NotCompletelyPositive { min_eig: min });
        }
    }
    let (din, dout) = (input.dim, output.dim);
    let mut kraus = Vec::new();
    for (m, &v) in vals.iter().enumerate() {
        if v > cut {
            let col = vecs.column(m);
            let k = CMat::from_fn(dout, din, |b, a| col[a * dout + b] * linalg::cr(v.sqrt()));
            kraus.push(k);
        }
    }
    Channel::new(input, output, kraus, tol)
}

/// `ϱ_{C|A} = Tr_B[ϱ_{C|B} ϱ_{B|A}]`: chain two conditionals through their
/// shared factors.
pub fn compose_conditionals(c2: &ConditionalState, c1: &ConditionalState, tol: &Tolerance) -> Result<ConditionalState> {
    if c1.conditioned() != c2.conditioning() {
        return Err(Error::Mismatch {
            context: "compose_conditionals chain".into(),
            expected: format!("{:?}", c1.conditioned()),
            found: format!("{:?}", c2.conditioning()),
        });
    }
    let mid: Vec<&str> = c1.conditioned().iter().map(|s| s.as_str()).collect();
    let op = c2.op().mul(c1.op())?.partial_trace(&mid)?.hermitize();
    ConditionalState::new(
        op,
        c2.conditioned().clone(),
        c1.conditioning().clone(),
        CausalClass::Causal {
            transposed: c1.conditioning().clone(),
        },
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cr;
    use approx::assert_abs_diff_eq;

    const TOL: Tolerance = Tolerance::new(1e-10, 1e-9);

    fn qubit(id: &str) -> Region {
        Region::quantum(id, 2)
    }

    fn diag(id: &str, kind: RegionKind, vals: &[f64]) -> LabeledOperator {
        let region = Region {
            id: id.into(),
            dim: vals.len(),
            kind,
        };
        LabeledOperator::new(
            vec![region],
            CMat::from_fn(vals.len(), vals.len(), |i, j| {
                if i == j {
                    cr(vals[i])
                } else {
                    cr(0.0)
                }
            }),
        )
        .unwrap()
    }

    fn bell(a: &str, b: &str) -> JointState {
        let mut m = CMat::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                m[(i, j)] = cr(0.5);
            }
        }
        JointState::acausal(
            LabeledOperator::new(vec![qubit(a), qubit(b)], m).unwrap(),
            &TOL,
        )
        .unwrap()
    }

    #[test]
    fn conditional_of_product_state_is_identity_tensor_state() {
        let ra = diag("A", RegionKind::Quantum, &[0.7, 0.3]);
        let rb = diag("B", RegionKind::Quantum, &[0.6, 0.4]);
        let j = JointState::acausal(ra.tensor(&rb).unwrap(), &TOL).unwrap();
        let c = conditional_from_joint(&j, &["A"], &TOL).unwrap();
        let expected = LabeledOperator::identity_on(&[qubit("A")])
            .unwrap()
            .tensor(&rb)
            .unwrap();
        assert!(c.op().approx_eq(&expected, 1e-12));
    }

    #[test]
    fn classical_joint_conditional_matches_scalar_conditional() {
        // P(R,S) on classical R (2) x S (2): rows 0.1 0.3 / 0.2 0.4
        let r = Region::classical("R", 2);
        let s = Region::classical("S", 2);
        let p = [[0.1, 0.3], [0.2, 0.4]];
        let m = CMat::from_fn(4, 4, |i, j| {
            if i == j {
                cr(p[i / 2][i % 2])
            } else {
                cr(0.0)
            }
        });
        let j = JointState::hybrid(LabeledOperator::new(vec![r, s], m).unwrap(), &TOL).unwrap();
        let c = conditional_from_joint(&j, &["R"], &TOL).unwrap();
        let pr = [0.4, 0.6];
        for ri in 0..2 {
            for si in 0..2 {
                let idx = ri * 2 + si;
                assert_abs_diff_eq!(
                    c.op().matrix()[(idx, idx)].re,
                    p[ri][si] / pr[ri],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn bell_conditional_is_twice_bell() {
        let j = bell("A", "B");
        let c = conditional_from_joint(&j, &["A"], &TOL).unwrap();
        assert!(c.op().approx_eq(&j.op().scale(2.0), 1e-10));
    }

    #[test]
    fn joint_from_conditional_roundtrip() {
        let j = bell("A", "B");
        let c = conditional_from_joint(&j, &["A"], &TOL).unwrap();
        let marg = j.marginal(&["A"], &TOL).unwrap();
        let back = joint_from_conditional(&c, &marg, &TOL).unwrap();
        assert!(back.op().approx_eq(j.op(), 1e-10));
    }

    #[test]
    fn bayes_invert_matches_classical_bayes_rule() {
        // P(S|R) as a diagonal conditional, P(R) = (0.4, 0.6)
        let r = Region::classical("R", 2);
        let s = Region::classical("S", 2);
        let psr = [[0.25, 0.75], [1.0 / 3.0, 2.0 / 3.0]];
        let m = CMat::from_fn(4, 4, |i, j| {
            if i == j {
                cr(psr[i / 2][i % 2])
            } else {
                cr(0.0)
            }
        });
        let c = ConditionalState::new(
            LabeledOperator::new(vec![r.clone(), s.clone()], m).unwrap(),
            BTreeSet::from(["S".to_string()]),
            BTreeSet::from(["R".to_string()]),
            CausalClass::Hybrid,
            &TOL,
        )
        .unwrap();
        let pr = JointState::hybrid(diag("R", RegionKind::Classical, &[0.4, 0.6]), &TOL).unwrap();
        let inv = bayes_invert(&c, &pr, &TOL).unwrap();
        // joint P(r,s) = psr[r][s] * pr[r]; P(s); P(r|s) = joint/P(s)
        let joint = [[0.1, 0.3], [0.2, 0.4]];
        let ps = [0.3, 0.7];
        for ri in 0..2 {
            for si in 0..2 {
                let idx = ri * 2 + si;
                assert_abs_diff_eq!(
                    inv.op().matrix()[(idx, idx)].re,
                    joint[ri][si] / ps[si],
                    epsilon = 1e-12
                );
            }
        }
        // double inversion returns the original conditional
        let ps_state =
            JointState::hybrid(diag("S", RegionKind::Classical, &[0.3, 0.7]), &TOL).unwrap();
        let back = bayes_invert(&inv, &ps_state, &TOL).unwrap();
        assert!(back.op().approx_eq(c.op(), 1e-10));
    }

    #[test]
    fn bayes_invert_preserves_independence() {
        let rb = diag("B", RegionKind::Quantum, &[0.6, 0.4]);
        let c = ConditionalState::new(
            LabeledOperator::identity_on(&[qubit("A")])
                .unwrap()
                .tensor(&rb)
                .unwrap(),
            BTreeSet::from(["B".to_string()]),
            BTreeSet::from(["A".to_string()]),
            CausalClass::Acausal,
            &TOL,
        )
        .unwrap();
        let ra = JointState::acausal(diag("A", RegionKind::Quantum, &[0.2, 0.8]), &TOL).unwrap();
        let inv = bayes_invert(&c, &ra, &TOL).unwrap();
        let expected = diag("A", RegionKind::Quantum, &[0.2, 0.8])
            .tensor(&LabeledOperator::identity_on(&[qubit("B")]).unwrap())
            .unwrap();
        assert!(inv.op().approx_eq(&expected, 1e-10));
    }

    #[test]
    fn identity_channel_conditional_is_swap_and_propagates_identically() {
        let ch = Channel::new(
            qubit("A"),
            qubit("B"),
            vec![linalg::identity(2)],
            &TOL,
        )
        .unwrap();
        let c = channel_to_conditional(&ch, &TOL).unwrap();
        let mut swap = CMat::zeros(4, 4);
        swap[(0, 0)] = cr(1.0);
        swap[(3, 3)] = cr(1.0);
        swap[(1, 2)] = cr(1.0);
        swap[(2, 1)] = cr(1.0);
        assert_abs_diff_eq!(
            linalg::op_norm(&(c.op().matrix_in_order(&["A", "B"]).unwrap() - swap)),
            0.0,
            epsilon = 1e-13
        );
        let rho = JointState::acausal(
            LabeledOperator::new(
                vec![qubit("A")],
                CMat::from_fn(2, 2, |i, j| if i == j { cr(0.5) } else { cr(0.25) }),
            )
            .unwrap(),
            &TOL,
        )
        .unwrap();
        let out = belief_propagate(&c, &rho, &TOL).unwrap();
        assert_abs_diff_eq!(
            linalg::op_norm(&(out.op().matrix() - rho.op().matrix())),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn depolarizing_channel_conditional() {
        // fully depolarizing: E(rho) = Tr(rho) I/2, Kraus {|i><j|/sqrt(2)}
        let mut ks = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut m = CMat::zeros(2, 2);
                m[(i, j)] = cr(1.0 / 2.0f64.sqrt());
                ks.push(m);
            }
        }
        let ch = Channel::new(qubit("A"), qubit("B"), ks, &TOL).unwrap();
        let c = channel_to_conditional(&ch, &TOL).unwrap();
        let expected = LabeledOperator::identity_on(&[qubit("A")])
            .unwrap()
            .tensor(&diag("B", RegionKind::Quantum, &[0.5, 0.5]))
            .unwrap();
        assert!(c.op().approx_eq(&expected, 1e-12));
        // |0><0| propagates to I/2
        let zero = JointState::acausal(diag("A", RegionKind::Quantum, &[1.0, 0.0]), &TOL).unwrap();
        let out = belief_propagate(&c, &zero, &TOL).unwrap();
        assert!(out.op().approx_eq(&diag("B", RegionKind::Quantum, &[0.5, 0.5]), 1e-12));
    }

    #[test]
    fn measure_and_reprepare_conditional() {
        // E(rho) = sum_j <j|rho|j> sigma_j with sigma_0 = |0><0|, sigma_1 = |+><+|
        let plus = CMat::from_fn(2, 2, |_, _| cr(0.5));
        let mut ks = Vec::new();
        // Kraus: sqrt(sigma_j) eigvec outer <j| — use spectral form
        for (j, sigma) in [
            (
                0usize,
                CMat::from_fn(2, 2, |i, k| if i == 0 && k == 0 { cr(1.0) } else { cr(0.0) }),
            ),
            (1usize, plus.clone()),
        ] {
            let (vals, vecs) = linalg::herm_eig(&sigma);
            for (m, &v) in vals.iter().enumerate() {
                if v > 1e-12 {
                    let col = vecs.column(m);
                    let k = CMat::from_fn(2, 2, |b, a| {
                        if a == j {
                            col[b] * cr(v.sqrt())
                        } else {
                            cr(0.0)
                        }
                    });
                    ks.push(k);
                }
            }
        }
        let ch = Channel::new(qubit("A"), qubit("B"), ks, &TOL).unwrap();
        let c = channel_to_conditional(&ch, &TOL).unwrap();
        // expected: sum_j |j><j|_A ⊗ sigma_j
        let p0 = diag("A", RegionKind::Quantum, &[1.0, 0.0]);
        let p1 = diag("A", RegionKind::Quantum, &[0.0, 1.0]);
        let s0 = LabeledOperator::new(
            vec![qubit("B")],
            CMat::from_fn(2, 2, |i, k| if i == 0 && k == 0 { cr(1.0) } else { cr(0.0) }),
        )
        .unwrap();
        let s1 = LabeledOperator::new(vec![qubit("B")], plus).unwrap();
        let expected = p0
            .tensor(&s0)
            .unwrap()
            .add(&p1.tensor(&s1).unwrap())
            .unwrap();
        assert!(c.op().approx_eq(&expected, 1e-12));
    }

    #[test]
    fn channel_roundtrip_amplitude_damping() {
        let gamma: f64 = 0.37;
        let k0 = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => cr(1.0),
            (1, 1) => cr((1.0 - gamma).sqrt()),
            _ => cr(0.0),
        });
        let k1 = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => cr(gamma.sqrt()),
            _ => cr(0.0),
        });
        let ch = Channel::new(qubit("A"), qubit("B"), vec![k0, k1], &TOL).unwrap();
        let c = channel_to_conditional(&ch, &TOL).unwrap();
        // PPT over the input factor (complete positivity)
        assert!(c
            .op()
            .partial_transpose(&["A"])
            .unwrap()
            .is_psd(&TOL)
            .unwrap());
        let ch2 = conditional_to_channel(&c, &TOL).unwrap();
        // channels equal iff their conditionals are
        let c2 = channel_to_conditional(&ch2, &TOL).unwrap();
        assert!(c.op().approx_eq(c2.op(), 1e-10));
        // action agrees on a test state
        let rho = CMat::from_fn(2, 2, |i, j| if i == j { cr(0.5) } else { linalg::c(0.1, 0.2 * ((i as f64) - (j as f64))) });
        let rho = linalg::hermitize(&rho);
        assert_abs_diff_eq!(
            linalg::op_norm(&(ch.apply_matrix(&rho) - ch2.apply_matrix(&rho))),
            0.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn swap_conditional_extracts_identity_channel() {
        let mut swap = CMat::zeros(4, 4);
        swap[(0, 0)] = cr(1.0);
        swap[(3, 3)] = cr(1.0);
        swap[(1, 2)] = cr(1.0);
        swap[(2, 1)] = cr(1.0);
        let c = ConditionalState::new(
            LabeledOperator::new(vec![qubit("A"), qubit("B")], swap).unwrap(),
            BTreeSet::from(["B".to_string()]),
            BTreeSet::from(["A".to_string()]),
            CausalClass::Causal {
                transposed: BTreeSet::from(["A".to_string()]),
            },
            &TOL,
        )
        .unwrap();
        let ch = conditional_to_channel(&c, &TOL).unwrap();
        let rho = linalg::hermitize(&CMat::from_fn(2, 2, |i, j| linalg::c((i + j) as f64 * 0.2, 0.1)));
        assert_abs_diff_eq!(linalg::op_norm(&(ch.apply_matrix(&rho) - rho)), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn bell_declared_causal_fails_ppt() {
        let j = bell("A", "B");
        let report = validate(
            j.op(),
            &CausalClass::Causal {
                transposed: BTreeSet::from(["A".to_string()]),
            },
            &TOL,
        )
        .unwrap();
        assert!(!report.passed);
        assert!(report.positivity_min_eig < -0.4);
        // and as acausal it passes
        assert!(j.validate(&TOL).unwrap().passed);
    }

    #[test]
    fn hybrid_with_off_diagonal_blocks_fails() {
        let x = Region::classical("X", 2);
        let m = CMat::from_fn(2, 2, |_, _| cr(0.5));
        let report = validate(
            &LabeledOperator::new(vec![x], m).unwrap(),
            &CausalClass::Hybrid,
            &TOL,
        )
        .unwrap();
        assert!(!report.passed);
        assert!(report.block_diagonal_mass.unwrap() > 0.4);
    }

    #[test]
    fn compose_conditionals_matches_kraus_composition() {
        let gamma: f64 = 0.2;
        let k0 = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => cr(1.0),
            (1, 1) => cr((1.0 - gamma).sqrt()),
            _ => cr(0.0),
        });
        let k1 = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => cr(gamma.sqrt()),
            _ => cr(0.0),
        });
        let ch1 = Channel::new(qubit("A"), qubit("B"), vec![k0.clone(), k1.clone()], &TOL).unwrap();
        // a unitary rotation as the second channel
        let theta: f64 = 0.83;
        let u = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => cr(theta.cos()),
            (0, 1) => cr(-theta.sin()),
            (1, 0) => cr(theta.sin()),
            (1, 1) => cr(theta.cos()),
            _ => unreachable!(),
        });
        let ch2 = Channel::new(qubit("B"), qubit("C"), vec![u], &TOL).unwrap();
        let c1 = channel_to_conditional(&ch1, &TOL).unwrap();
        let c2 = channel_to_conditional(&ch2, &TOL).unwrap();
        let composed = compose_conditionals(&c2, &c1, &TOL).unwrap();
        let direct = channel_to_conditional(&ch2.compose(&ch1, &TOL).unwrap(), &TOL).unwrap();
        assert!(composed.op().approx_eq(direct.op(), 1e-10));
    }
}
