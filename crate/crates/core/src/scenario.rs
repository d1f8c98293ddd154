//! Builders for causal scenarios: physical processes (preparations,
//! measurements, post-processing chains) that give rise to joint hybrid
//! states over classical records and quantum regions — plus detection of the
//! obstruction that arises when two single-variable hybrids admit *no* common
//! joint state.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::conditional::JointState;
use crate::error::{Error, Result};
use crate::hybrid::{
    value_tuples, ClassicalDistribution, EnsemblePreparation, HybridState, Instrument,
    LikelihoodOperator,
};
use crate::linalg::{self, CMat};
use crate::operator::{subspace_intersection, LabeledOperator};
use crate::region::{Region, RegionKind};
use crate::tolerance::Tolerance;

/// Where a scenario came from: the builder that produced it and a digest of
/// its ingredients, so CLI reports are reproducible.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub builder: String,
    pub digest: String,
}

/// A joint hybrid state together with its provenance.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub joint: HybridState,
    pub provenance: Provenance,
}

/// Canonical ingredient digest: region metadata and matrix entries hashed in
/// a fixed order.
struct DigestBuilder {
    hasher: Sha256,
}

impl DigestBuilder {
    fn new(builder: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(builder.as_bytes());
        Self { hasher }
    }

    fn region(&mut self, r: &Region) -> &mut Self {
        self.hasher.update(r.id.as_bytes());
        self.hasher.update((r.dim as u64).to_le_bytes());
        self.hasher.update([matches!(r.kind, RegionKind::Classical) as u8]);
        self
    }

    fn matrix(&mut self, m: &CMat) -> &mut Self {
        for v in m.iter() {
            self.hasher.update(v.re.to_le_bytes());
            self.hasher.update(v.im.to_le_bytes());
        }
        self
    }

    fn reals(&mut self, xs: &[f64]) -> &mut Self {
        for x in xs {
            self.hasher.update(x.to_le_bytes());
        }
        self
    }

    fn finish(self, builder: &str) -> Provenance {
        Provenance {
            builder: builder.into(),
            digest: format!("{:x}", self.hasher.finalize()),
        }
    }
}

/// A classical post-processing map `P(out | in)`: one row per input value,
/// each row a distribution over the output alphabet.
#[derive(Debug, Clone)]
pub struct StochasticMap {
    pub output: Region,
    pub rows: Vec<Vec<f64>>,
}

impl StochasticMap {
    pub fn new(output: Region, rows: Vec<Vec<f64>>) -> Result<Self> {
        if output.kind != RegionKind::Classical {
            return Err(Error::Invalid("stochastic map output region must be classical".into()));
        }
        for row in &rows {
            if row.len() != output.dim {
                return Err(Error::Mismatch {
                    context: "stochastic map row length".into(),
                    expected: output.dim.to_string(),
                    found: row.len().to_string(),
                });
            }
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-8 {
                return Err(Error::NotADistribution { sum });
            }
        }
        Ok(Self { output, rows })
    }

    /// Deterministic copy of an `n`-value input.
    pub fn copy_of(output: Region) -> Result<Self> {
        let n = output.dim;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(output, rows)
    }

    pub fn prob(&self, input: usize, out: usize) -> Result<f64> {
        let row = self.rows.get(input).ok_or(Error::OutcomeOutOfRange {
            index: input,
            size: self.rows.len(),
        })?;
        Ok(row[out])
    }
}

/// `ρ_{ZB}` from preparing `ρ_{B|Z=z}` with probability `P(z)`.
pub fn preparation_scenario(
    pz: &ClassicalDistribution,
    prep: &EnsemblePreparation,
    tol: &Tolerance,
) -> Result<Scenario> {
    if pz.region() != prep.label_region() {
        return Err(Error::Mismatch {
            context: "preparation label region".into(),
            expected: prep.label_region().id.clone(),
            found: pz.region().id.clone(),
        });
    }
    let mut components = BTreeMap::new();
    for (z, &p) in pz.probs().iter().enumerate() {
        components.insert(vec![z], prep.states()[z].scale(p.max(0.0)));
    }
    let joint = HybridState::new(
        vec![pz.region().clone()],
        prep.quantum_regions().to_vec(),
        components,
        tol,
    )?;
    let mut d = DigestBuilder::new("preparation");
    d.region(pz.region()).reals(pz.probs());
    for s in prep.states() {
        d.matrix(s);
    }
    Ok(Scenario {
        joint,
        provenance: d.finish("preparation"),
    })
}

/// Trace the measured factors out of `(E_x ⊗ I) ρ`, yielding a PSD component
/// on the rest.
fn measured_component(
    rho: &LabeledOperator,
    effect: &LabeledOperator,
    keep: &[&str],
) -> Result<CMat> {
    let padded = effect.pad_to(rho.factors())?;
    let weighted = padded.mul(rho)?;
    let comp = weighted.marginal(keep)?;
    Ok(linalg::hermitize(comp.matrix()))
}

/// `ρ_{XB} = Tr_A[ρ_{X|A} ρ_{AB}]`: measure one side of a bipartite state and
/// keep the record next to the unmeasured side (steering / remote collapse).
pub fn remote_measurement_scenario(
    rho_ab: &JointState,
    l: &LikelihoodOperator,
    tol: &Tolerance,
) -> Result<Scenario> {
    let measured: Vec<String> = l.quantum_regions().iter().map(|f| f.id.clone()).collect();
    for id in &measured {
        if rho_ab.op().factor(id).is_none() {
            return Err(Error::UnknownRegion(id.clone()));
        }
    }
    let keep: Vec<&str> = rho_ab
        .factors()
        .iter()
        .filter(|f| !measured.contains(&f.id))
        .map(|f| f.id.as_str())
        .collect();
    if keep.is_empty() {
        return Err(Error::Invalid(
            "remote measurement must leave an unmeasured region".into(),
        ));
    }
    let b_regions: Vec<Region> = rho_ab
        .factors()
        .iter()
        .filter(|f| !measured.contains(&f.id))
        .cloned()
        .collect();
    let mut components = BTreeMap::new();
    for x in 0..l.outcome_region().dim {
        let comp = measured_component(rho_ab.op(), &l.effect_operator(x)?, &keep)?;
        components.insert(vec![x], comp);
    }
    let joint = HybridState::new(vec![l.outcome_region().clone()], b_regions, components, tol)?;
    let mut d = DigestBuilder::new("remote_measurement");
    d.matrix(rho_ab.op().matrix());
    for e in l.effects() {
        d.matrix(e);
    }
    Ok(Scenario {
        joint,
        provenance: d.finish("remote_measurement"),
    })
}

/// `ρ_{XB}` for measuring `ρ_B` itself: the components are the retrodictive
/// updates `ρ_B^{1/2} E_x ρ_B^{1/2}`, so conditioning on the outcome gives the
/// Bayesian posterior about the pre-measurement state.
pub fn retrodiction_scenario(
    rho_b: &JointState,
    l: &LikelihoodOperator,
    tol: &Tolerance,
) -> Result<Scenario> {
    if rho_b.factors() != l.quantum_regions() {
        return Err(Error::Mismatch {
            context: "retrodiction region".into(),
            expected: format!("{:?}", l.quantum_regions().iter().map(|f| &f.id).collect::<Vec<_>>()),
            found: format!("{:?}", rho_b.op().factor_ids()),
        });
    }
    let sqrt = rho_b.op().sqrt_psd(tol)?;
    let mut components = BTreeMap::new();
    for x in 0..l.outcome_region().dim {
        let m = sqrt.matrix() * &l.effects()[x] * sqrt.matrix();
        components.insert(vec![x], linalg::hermitize(&m));
    }
    let joint = HybridState::new(
        vec![l.outcome_region().clone()],
        rho_b.factors().to_vec(),
        components,
        tol,
    )?;
    let mut d = DigestBuilder::new("retrodiction");
    d.matrix(rho_b.op().matrix());
    for e in l.effects() {
        d.matrix(e);
    }
    Ok(Scenario {
        joint,
        provenance: d.finish("retrodiction"),
    })
}

/// `ρ_{XB} = Tr_A[ϱ_{XB|A} ρ_A]`: the record and post-measurement output of an
/// instrument.
pub fn instrument_scenario(rho_a: &JointState, inst: &Instrument, tol: &Tolerance) -> Result<Scenario> {
    let joint = crate::hybrid::apply_instrument(inst, rho_a, tol)?;
    let mut d = DigestBuilder::new("instrument");
    d.matrix(rho_a.op().matrix());
    for branch in inst.branches() {
        for k in branch {
            d.matrix(k);
        }
    }
    Ok(Scenario {
        joint,
        provenance: d.finish("instrument"),
    })
}

/// `ρ_{BX₁X₂} = ρ_{X₂|X₁} ρ_{BX₁}`: classically post-process the record of an
/// existing scenario, giving an X₂ — X₁ — B chain.
pub fn postprocess_scenario(
    base: &HybridState,
    proc: &StochasticMap,
    tol: &Tolerance,
) -> Result<Scenario> {
    if base.classical_regions().len() != 1 {
        return Err(Error::Invalid(
            "post-processing expects a scenario with a single classical variable".into(),
        ));
    }
    let x1 = base.classical_regions()[0].clone();
    if proc.rows.len() != x1.dim {
        return Err(Error::Mismatch {
            context: "post-processing input alphabet".into(),
            expected: x1.dim.to_string(),
            found: proc.rows.len().to_string(),
        });
    }
    let x2 = proc.output.clone();
    // Components keyed in id-sorted order of (x1, x2).
    let swap = x2.id < x1.id;
    let mut components = BTreeMap::new();
    for v1 in 0..x1.dim {
        let comp1 = base.component(&[v1])?;
        for v2 in 0..x2.dim {
            let key = if swap { vec![v2, v1] } else { vec![v1, v2] };
            components.insert(key, comp1.scale(proc.prob(v1, v2)?));
        }
    }
    let joint = HybridState::new(
        vec![x1.clone(), x2],
        base.quantum_regions().to_vec(),
        components,
        tol,
    )?;
    let mut d = DigestBuilder::new("postprocess");
    for (_, m) in base.components() {
        d.matrix(m);
    }
    for row in &proc.rows {
        d.reals(row);
    }
    Ok(Scenario {
        joint,
        provenance: d.finish("postprocess"),
    })
}

/// `ρ_{X₁X₂B} = Tr_Z[ρ_{X₁|Z} ρ_{X₂|Z} ρ_{B|Z} ρ_Z]`: one hidden preparation
/// variable Z read out twice through classical noise.
pub fn two_preparation_scenario(
    pz: &ClassicalDistribution,
    prep: &EnsemblePreparation,
    l1: &StochasticMap,
    l2: &StochasticMap,
    tol: &Tolerance,
) -> Result<Scenario> {
    if pz.region() != prep.label_region() {
        return Err(Error::Mismatch {
            context: "two-preparation label region".into(),
            expected: prep.label_region().id.clone(),
            found: pz.region().id.clone(),
        });
    }
    let nz = pz.region().dim;
    if l1.rows.len() != nz || l2.rows.len() != nz {
        return Err(Error::Mismatch {
            context: "two-preparation readout alphabet".into(),
            expected: nz.to_string(),
            found: format!("{} / {}", l1.rows.len(), l2.rows.len()),
        });
    }
    let x1 = l1.output.clone();
    let x2 = l2.output.clone();
    let qdim: usize = prep.quantum_regions().iter().map(|f| f.dim).product();
    let swap = x2.id < x1.id;
    let mut components = BTreeMap::new();
    for v1 in 0..x1.dim {
        for v2 in 0..x2.dim {
            let mut acc = CMat::zeros(qdim, qdim);
            for z in 0..nz {
                let w = pz.probs()[z] * l1.prob(z, v1)? * l2.prob(z, v2)?;
                if w > 0.0 {
                    acc += prep.states()[z].scale(w);
                }
            }
            let key = if swap { vec![v2, v1] } else { vec![v1, v2] };
            components.insert(key, acc);
        }
    }
    let joint = HybridState::new(
        vec![x1, x2],
        prep.quantum_regions().to_vec(),
        components,
        tol,
    )?;
    let mut d = DigestBuilder::new("two_preparation");
    d.reals(pz.probs());
    for s in prep.states() {
        d.matrix(s);
    }
    for row in l1.rows.iter().chain(&l2.rows) {
        d.reals(row);
    }
    Ok(Scenario {
        joint,
        provenance: d.finish("two_preparation"),
    })
}

/// `ρ_{X₁X₂B} = Tr_{A₁A₂}[ρ_{X₁|A₁} ρ_{X₂|A₂} ρ_{A₁A₂B}]`: two parties measure
/// their shares of a tripartite state.
pub fn two_remote_scenario(
    rho: &JointState,
    l1: &LikelihoodOperator,
    l2: &LikelihoodOperator,
    tol: &Tolerance,
) -> Result<Scenario> {
    let mut measured: Vec<String> = l1.quantum_regions().iter().map(|f| f.id.clone()).collect();
    measured.extend(l2.quantum_regions().iter().map(|f| f.id.clone()));
    for id in &measured {
        if rho.op().factor(id).is_none() {
            return Err(Error::UnknownRegion(id.clone()));
        }
    }
    if l1
        .quantum_regions()
        .iter()
        .any(|f| l2.quantum_regions().iter().any(|g| g.id == f.id))
    {
        return Err(Error::Invalid("the two measured regions must be disjoint".into()));
    }
    let keep: Vec<&str> = rho
        .factors()
        .iter()
        .filter(|f| !measured.contains(&f.id))
        .map(|f| f.id.as_str())
        .collect();
    if keep.is_empty() {
        return Err(Error::Invalid(
            "two-remote measurement must leave an unmeasured region".into(),
        ));
    }
    let b_regions: Vec<Region> = rho
        .factors()
        .iter()
        .filter(|f| !measured.contains(&f.id))
        .cloned()
        .collect();
    let x1 = l1.outcome_region().clone();
    let x2 = l2.outcome_region().clone();
    let swap = x2.id < x1.id;
    let mut components = BTreeMap::new();
    for v1 in 0..x1.dim {
        let e1 = l1.effect_operator(v1)?;
        for v2 in 0..x2.dim {
            let e2 = l2.effect_operator(v2)?;
            let joint_effect = e1.tensor(&e2)?;
            let comp = measured_component(rho.op(), &joint_effect, &keep)?;
            let key = if swap { vec![v2, v1] } else { vec![v1, v2] };
            components.insert(key, comp);
        }
    }
    let joint = HybridState::new(vec![x1, x2], b_regions, components, tol)?;
    let mut d = DigestBuilder::new("two_remote");
    d.matrix(rho.op().matrix());
    for e in l1.effects().iter().chain(l2.effects()) {
        d.matrix(e);
    }
    Ok(Scenario {
        joint,
        provenance: d.finish("two_remote"),
    })
}

/// `ρ_{X₁X₂B} = Tr_Z[ρ_{X₁|Z} ρ_{X₂|Z} (ρ_{Z|B} ⋆ ρ_B)]`: measure B directly,
/// then fan the outcome Z out through two classical noise channels.
pub fn two_direct_scenario(
    rho_b: &JointState,
    lz: &LikelihoodOperator,
    l1: &StochasticMap,
    l2: &StochasticMap,
    tol: &Tolerance,
) -> Result<Scenario> {
    let base = retrodiction_scenario(rho_b, lz, tol)?;
    let nz = lz.outcome_region().dim;
    if l1.rows.len() != nz || l2.rows.len() != nz {
        return Err(Error::Mismatch {
            context: "two-direct readout alphabet".into(),
            expected: nz.to_string(),
            found: format!("{} / {}", l1.rows.len(), l2.rows.len()),
        });
    }
    let x1 = l1.output.clone();
    let x2 = l2.output.clone();
    let qdim = rho_b.op().dim();
    let swap = x2.id < x1.id;
    let mut components = BTreeMap::new();
    for v1 in 0..x1.dim {
        for v2 in 0..x2.dim {
            let mut acc = CMat::zeros(qdim, qdim);
            for z in 0..nz {
                let w = l1.prob(z, v1)? * l2.prob(z, v2)?;
                if w > 0.0 {
                    acc += base.joint.component(&[z])?.scale(w);
                }
            }
            let key = if swap { vec![v2, v1] } else { vec![v1, v2] };
            components.insert(key, acc);
        }
    }
    let joint = HybridState::new(vec![x1, x2], rho_b.factors().to_vec(), components, tol)?;
    let mut d = DigestBuilder::new("two_direct");
    d.matrix(rho_b.op().matrix());
    for e in lz.effects() {
        d.matrix(e);
    }
    for row in l1.rows.iter().chain(&l2.rows) {
        d.reals(row);
    }
    Ok(Scenario {
        joint,
        provenance: d.finish("two_direct"),
    })
}

/// `ρ_{X₁X₂B} = Tr_{A₁A₂}[ϱ_{X₂B|A₂} ϱ_{X₁A₂|A₁} ρ_{A₁}]`: two measurements in
/// sequence, the second acting on the first's output.
pub fn sequential_measurement_scenario(
    rho_a1: &JointState,
    inst1: &Instrument,
    inst2: &Instrument,
    tol: &Tolerance,
) -> Result<Scenario> {
    if rho_a1.factors() != [inst1.input_region().clone()] {
        return Err(Error::Mismatch {
            context: "sequential scenario input".into(),
            expected: inst1.input_region().id.clone(),
            found: format!("{:?}", rho_a1.op().factor_ids()),
        });
    }
    if inst1.output_region() != inst2.input_region() {
        return Err(Error::Mismatch {
            context: "sequential scenario chain".into(),
            expected: inst1.output_region().id.clone(),
            found: inst2.input_region().id.clone(),
        });
    }
    let x1 = inst1.outcome_region().clone();
    let x2 = inst2.outcome_region().clone();
    let b = inst2.output_region().clone();
    let swap = x2.id < x1.id;
    let mut components = BTreeMap::new();
    for v1 in 0..x1.dim {
        let ch1 = inst1.branch_channel(v1, tol)?;
        let mid = ch1.apply_matrix(rho_a1.op().matrix());
        for v2 in 0..x2.dim {
            let ch2 = inst2.branch_channel(v2, tol)?;
            let out = ch2.apply_matrix(&mid);
            let key = if swap { vec![v2, v1] } else { vec![v1, v2] };
            components.insert(key, linalg::hermitize(&out));
        }
    }
    let joint = HybridState::new(vec![x1, x2], vec![b], components, tol)?;
    let mut d = DigestBuilder::new("sequential_measurement");
    d.matrix(rho_a1.op().matrix());
    for branch in inst1.branches().iter().chain(inst2.branches()) {
        for k in branch {
            d.matrix(k);
        }
    }
    Ok(Scenario {
        joint,
        provenance: d.finish("sequential_measurement"),
    })
}

/// Inverse problem: components of a sequential-measurement scenario that
/// reproduce an arbitrary target `ρ_{BX₁X₂}`.
///
/// A classical register carrying the joint distribution `P(x₁, x₂)` is read
/// out projectively twice; the second instrument additionally reprepares the
/// target's conditional state for the observed cell. Zero-probability cells
/// reprepare the maximally mixed state.
pub fn realize_arbitrary_joint(
    target: &HybridState,
    tol: &Tolerance,
) -> Result<(JointState, Instrument, Instrument)> {
    if target.classical_regions().len() != 2 {
        return Err(Error::Invalid(
            "realization expects exactly two classical variables".into(),
        ));
    }
    if target.quantum_regions().len() != 1 {
        return Err(Error::Invalid(
            "realization expects a single quantum region".into(),
        ));
    }
    let x1 = target.classical_regions()[0].clone();
    let x2 = target.classical_regions()[1].clone();
    let b = target.quantum_regions()[0].clone();
    let n1 = x1.dim;
    let n2 = x2.dim;
    let reg_dim = n1 * n2;
    let taken: Vec<&Region> = vec![&x1, &x2, &b];
    let fresh = |base: &str| -> Region {
        let mut id = base.to_string();
        while taken.iter().any(|f| f.id == id) {
            id.insert(0, '_');
        }
        Region::quantum(&id, reg_dim)
    };
    let a1 = fresh("A1");
    let a2 = fresh("A2");

    // Register state: the classical joint distribution on |x1 x2⟩.
    let mut reg = CMat::zeros(reg_dim, reg_dim);
    for t in value_tuples(&[n1, n2]) {
        let k = t[0] * n2 + t[1];
        reg[(k, k)] = linalg::cr(target.prob(&t)?.max(0.0));
    }
    let rho_a1 = JointState::acausal(LabeledOperator::new(vec![a1.clone()], reg)?, tol)?;

    // First instrument: project onto the x1 block, forward the register.
    let branches1: Vec<Vec<CMat>> = (0..n1)
        .map(|v1| {
            let proj = CMat::from_fn(reg_dim, reg_dim, |i, j| {
                if i == j && i / n2 == v1 {
                    linalg::cr(1.0)
                } else {
                    linalg::cr(0.0)
                }
            });
            vec![proj]
        })
        .collect();
    let inst1 = Instrument::new(x1.clone(), a1, a2.clone(), branches1, tol)?;

    // Second instrument: read x2 off the register and reprepare the target's
    // conditional state of the observed cell.
    let bdim = b.dim;
    let mut branches2: Vec<Vec<CMat>> = vec![Vec::new(); n2];
    for t in value_tuples(&[n1, n2]) {
        let k = t[0] * n2 + t[1];
        let p = target.prob(&t)?;
        let cond = if p > Tolerance::ABS_FLOOR {
            target.component(&t)?.scale(1.0 / p)
        } else {
            linalg::identity(bdim).scale(1.0 / bdim as f64)
        };
        let (vals, vecs) = linalg::herm_eig(&cond);
        for (m, &lam) in vals.iter().enumerate() {
            if lam <= Tolerance::ABS_FLOOR {
                continue;
            }
            let col = vecs.column(m);
            // K = sqrt(λ) |v_m⟩⟨x1 x2|
            let kraus = CMat::from_fn(bdim, reg_dim, |i, j| {
                if j == k {
                    col[i] * linalg::cr(lam.sqrt())
                } else {
                    linalg::cr(0.0)
                }
            });
            branches2[t[1]].push(kraus);
        }
    }
    let inst2 = Instrument::new(x2, a2, b, branches2, tol)?;
    Ok((rho_a1, inst1, inst2))
}

/// One outcome pair that rules out a joint state: both marginally possible,
/// yet the conditional states' supports cannot intersect.
#[derive(Debug, Clone)]
pub struct ObstructedPair {
    pub x1: usize,
    pub x2: usize,
    pub p1: f64,
    pub p2: f64,
}

/// Certificate that no joint state over `(B, X₁, X₂)` reproduces both
/// single-variable hybrids. Empty when no pairwise obstruction exists.
#[derive(Debug, Clone, Default)]
pub struct Obstruction {
    pub pairs: Vec<ObstructedPair>,
}

impl Obstruction {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Look for outcome pairs `(x₁, x₂)` with positive marginal probabilities but
/// empty support intersection of the two conditionals. Any such pair would
/// have to carry zero joint probability, contradicting the scenarios in which
/// the outcomes are obtained independently.
pub fn joint_state_obstruction(
    h1: &HybridState,
    h2: &HybridState,
    tol: &Tolerance,
) -> Result<Obstruction> {
    if h1.quantum_regions() != h2.quantum_regions() {
        return Err(Error::Mismatch {
            context: "obstruction quantum region".into(),
            expected: format!("{:?}", h1.quantum_regions().iter().map(|f| &f.id).collect::<Vec<_>>()),
            found: format!("{:?}", h2.quantum_regions().iter().map(|f| &f.id).collect::<Vec<_>>()),
        });
    }
    if h1.classical_regions().len() != 1 || h2.classical_regions().len() != 1 {
        return Err(Error::Invalid(
            "obstruction check expects single-variable hybrids".into(),
        ));
    }
    let m1 = h1.quantum_marginal(tol)?;
    let m2 = h2.quantum_marginal(tol)?;
    if m1.op().distance(m2.op())? > f64::max(tol.eq_tol, 1e-8) {
        return Err(Error::Mismatch {
            context: "obstruction prior marginal".into(),
            expected: "both hybrids sharing one quantum marginal".into(),
            found: "differing marginals".into(),
        });
    }
    let id1 = h1.classical_regions()[0].id.clone();
    let id2 = h2.classical_regions()[0].id.clone();
    let mut pairs = Vec::new();
    for x1 in 0..h1.classical_regions()[0].dim {
        let p1 = h1.prob(&[x1])?;
        if p1 <= Tolerance::ABS_FLOOR {
            continue;
        }
        let c1 = h1.condition(&[(&id1, x1)], tol)?;
        let s1 = c1.op().support(tol)?;
        for x2 in 0..h2.classical_regions()[0].dim {
            let p2 = h2.prob(&[x2])?;
            if p2 <= Tolerance::ABS_FLOOR {
                continue;
            }
            let c2 = h2.condition(&[(&id2, x2)], tol)?;
            let s2 = c2.op().support(tol)?;
            if subspace_intersection(&s1, &s2, tol)?.rank == 0 {
                pairs.push(ObstructedPair { x1, x2, p1, p2 });
            }
        }
    }
    Ok(Obstruction { pairs })
}
