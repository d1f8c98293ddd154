//! Classical distributions, hybrid classical/quantum states, likelihood
//! operators (POVMs), ensembles, and instruments.
//!
//! A hybrid state over classical variables X… and quantum factors A… is block
//! diagonal over the classical values; it is stored sparsely as a map from
//! value tuples to (subnormalized) operators on the quantum factors, and the
//! dense block-diagonal operator is materialized only for validation, I/O,
//! and entropic quantities. Zero-probability components are kept as explicit
//! zero blocks so that support arguments over all branches stay well-posed.

use std::collections::BTreeMap;

use crate::conditional::{CausalClass, Channel, ConditionalState, JointState, TRACE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::operator::LabeledOperator;
use crate::region::{Region, RegionKind};
use crate::tolerance::Tolerance;

/// A probability distribution over the preferred basis of a classical region.
#[derive(Debug, Clone)]
pub struct ClassicalDistribution {
    region: Region,
    probs: Vec<f64>,
}

impl ClassicalDistribution {
    pub fn new(region: Region, probs: Vec<f64>) -> Result<Self> {
        if region.kind != RegionKind::Classical {
            return Err(Error::Invalid(format!(
                "region `{}` must be classical to carry a distribution",
                region.id
            )));
        }
        region.validate()?;
        if probs.len() != region.dim {
            return Err(Error::Mismatch {
                context: "distribution length".into(),
                expected: region.dim.to_string(),
                found: probs.len().to_string(),
            });
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < -TRACE_TOL) || (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotADistribution { sum });
        }
        Ok(Self { region, probs })
    }

    pub fn uniform(region: Region) -> Result<Self> {
        let p = 1.0 / region.dim as f64;
        let probs = vec![p; region.dim];
        Self::new(region, probs)
    }

    pub fn point_mass(region: Region, at: usize) -> Result<Self> {
        if at >= region.dim {
            return Err(Error::OutcomeOutOfRange {
                index: at,
                size: region.dim,
            });
        }
        let mut probs = vec![0.0; region.dim];
        probs[at] = 1.0;
        Self::new(region, probs)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// The diagonal density operator `Σ_r P(r)|r⟩⟨r|`.
    pub fn embed(&self, tol: &Tolerance) -> Result<JointState> {
        let n = self.region.dim;
        let m = CMat::from_fn(n, n, |i, j| {
            if i == j {
                linalg::cr(self.probs[i].max(0.0))
            } else {
                linalg::cr(0.0)
            }
        });
        JointState::hybrid(LabeledOperator::new(vec![self.region.clone()], m)?, tol)
    }

    /// Inverse of [`embed`]: errors if the state carries off-diagonal weight.
    pub fn extract(j: &JointState, tol: &Tolerance) -> Result<Self> {
        if j.factors().len() != 1 || j.factors()[0].kind != RegionKind::Classical {
            return Err(Error::Invalid(
                "extraction requires a state on a single classical region".into(),
            ));
        }
        let region = j.factors()[0].clone();
        let m = j.op().matrix();
        let mut off = 0.0f64;
        for i in 0..region.dim {
            for k in 0..region.dim {
                if i != k {
                    off += m[(i, k)].norm_sqr();
                }
            }
        }
        if off.sqrt() > tol.eq_tol {
            return Err(Error::NotBlockDiagonal { mass: off.sqrt() });
        }
        let probs = (0..region.dim).map(|i| m[(i, i)].re).collect();
        Self::new(region, probs)
    }
}

/// Value tuples in row-major order over the given classical dims.
pub fn value_tuples(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        let mut next = Vec::with_capacity(out.len() * d);
        for t in &out {
            for v in 0..d {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Block-diagonal joint state over classical variables and quantum factors,
/// stored by component.
#[derive(Debug, Clone)]
pub struct HybridState {
    classical: Vec<Region>,
    quantum: Vec<Region>,
    /// Keyed by classical value tuple in the (id-sorted) order of
    /// `classical`; each component is over the (id-sorted) quantum factors
    /// and carries its own probability as its trace.
    components: BTreeMap<Vec<usize>, CMat>,
}

impl HybridState {
    pub fn new(
        classical: Vec<Region>,
        quantum: Vec<Region>,
        mut components: BTreeMap<Vec<usize>, CMat>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if classical.is_empty() {
            return Err(Error::Invalid("hybrid state needs a classical variable".into()));
        }
        if quantum.is_empty() {
            return Err(Error::Invalid("hybrid state needs a quantum factor".into()));
        }
        let mut classical = classical;
        classical.sort_by(|a, b| a.id.cmp(&b.id));
        let mut quantum = quantum;
        quantum.sort_by(|a, b| a.id.cmp(&b.id));
        for f in classical.iter().chain(&quantum) {
            f.validate()?;
        }
        let mut ids: Vec<&String> = classical.iter().chain(&quantum).map(|f| &f.id).collect();
        ids.sort();
        ids.dedup();
        if ids.len() != classical.len() + quantum.len() {
            return Err(Error::Invalid("duplicate region id in hybrid state".into()));
        }
        if classical.iter().any(|f| f.kind != RegionKind::Classical)
            || quantum.iter().any(|f| f.kind != RegionKind::Quantum)
        {
            return Err(Error::Invalid(
                "hybrid factors mis-kinded: classical list must be classical, quantum list quantum".into(),
            ));
        }
        let cdims: Vec<usize> = classical.iter().map(|f| f.dim).collect();
        let qdim: usize = quantum.iter().map(|f| f.dim).product();
        let tuples = value_tuples(&cdims);
        let mut total = 0.0f64;
        for t in &tuples {
            let entry = components.entry(t.clone()).or_insert_with(|| CMat::zeros(qdim, qdim));
            if entry.nrows() != qdim || entry.ncols() != qdim {
                return Err(Error::MatrixShape {
                    rows: entry.nrows(),
                    cols: entry.ncols(),
                    expected: qdim,
                });
            }
            let dev = linalg::hermitian_deviation(entry);
            if dev > tol.eq_tol {
                return Err(Error::NotHermitian { deviation: dev });
            }
            let vals = linalg::herm_eig(entry).0;
            let scale = vals.iter().fold(1.0f64, |m, &v| m.max(v.abs()));
            if let Some(&min) = vals.first() {
                if min < -tol.eig_cut * scale {
                    return Err(Error::NotPositive {
                        what: format!("hybrid component at {t:?}"),
                        min_eig: min,
                    });
                }
            }
            total += entry.trace().re;
        }
        if components.len() != tuples.len() {
            return Err(Error::Invalid(
                "hybrid component keyed by out-of-range value tuple".into(),
            ));
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne {
                what: "hybrid state".into(),
                trace: total,
            });
        }
        Ok(Self {
            classical,
            quantum,
            components,
        })
    }

    pub fn classical_regions(&self) -> &[Region] {
        &self.classical
    }

    pub fn quantum_regions(&self) -> &[Region] {
        &self.quantum
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, CMat> {
        &self.components
    }

    pub fn component(&self, values: &[usize]) -> Result<&CMat> {
        self.components.get(values).ok_or_else(|| Error::Invalid(format!(
            "no component at classical values {values:?}"
        )))
    }

    pub fn component_operator(&self, values: &[usize]) -> Result<LabeledOperator> {
        LabeledOperator::new(self.quantum.clone(), self.component(values)?.clone())
    }

    pub fn prob(&self, values: &[usize]) -> Result<f64> {
        Ok(self.component(values)?.trace().re)
    }

    fn classical_index(&self, id: &str) -> Result<usize> {
        self.classical
            .iter()
            .position(|f| f.id == id)
            .ok_or_else(|| Error::UnknownRegion(id.into()))
    }

    /// Dense block-diagonal joint state.
    pub fn assemble(&self, tol: &Tolerance) -> Result<JointState> {
        let mut all = self.classical.clone();
        all.extend(self.quantum.iter().cloned());
        let mut acc = LabeledOperator::zeros_on(&all)?;
        for (t, m) in &self.components {
            let mut point = LabeledOperator::scalar(linalg::cr(1.0));
            for (k, region) in self.classical.iter().enumerate() {
                let n = region.dim;
                let proj = CMat::from_fn(n, n, |i, j| {
                    if i == t[k] && j == t[k] {
                        linalg::cr(1.0)
                    } else {
                        linalg::cr(0.0)
                    }
                });
                point = point.tensor(&LabeledOperator::new(vec![region.clone()], proj)?)?;
            }
            let block = point.tensor(&LabeledOperator::new(self.quantum.clone(), m.clone())?)?;
            acc = acc.add(&block)?;
        }
        JointState::hybrid(acc, tol)
    }

    /// Disassemble a block-diagonal joint state into components.
    pub fn from_joint(j: &JointState, tol: &Tolerance) -> Result<Self> {
        let classical: Vec<Region> = j
            .factors()
            .iter()
            .filter(|f| f.kind == RegionKind::Classical)
            .cloned()
            .collect();
        let quantum: Vec<Region> = j
            .factors()
            .iter()
            .filter(|f| f.kind == RegionKind::Quantum)
            .cloned()
            .collect();
        if classical.is_empty() || quantum.is_empty() {
            return Err(Error::Invalid(
                "joint state must mix classical and quantum factors to disassemble".into(),
            ));
        }
        let mass = crate::conditional::off_block_mass(j.op());
        if mass > tol.eq_tol {
            return Err(Error::NotBlockDiagonal { mass });
        }
        // Read blocks out of the matrix with classical factors leading.
        let mut order: Vec<&str> = classical.iter().map(|f| f.id.as_str()).collect();
        order.extend(quantum.iter().map(|f| f.id.as_str()));
        let m = j.op().matrix_in_order(&order)?;
        let cdims: Vec<usize> = classical.iter().map(|f| f.dim).collect();
        let qdim: usize = quantum.iter().map(|f| f.dim).product();
        let cstrides = linalg::strides(&cdims);
        let mut components = BTreeMap::new();
        for t in value_tuples(&cdims) {
            let base: usize = t.iter().zip(&cstrides).map(|(&v, &s)| v * s).sum::<usize>() * qdim;
            let block = CMat::from_fn(qdim, qdim, |i, k| m[(base + i, base + k)]);
            components.insert(t, block);
        }
        Self::new(classical, quantum, components, tol)
    }

    /// Joint distribution over all classical variables (marginalizing the
    /// quantum factors).
    pub fn classical_probs(&self) -> BTreeMap<Vec<usize>, f64> {
        self.components
            .iter()
            .map(|(t, m)| (t.clone(), m.trace().re))
            .collect()
    }

    /// Marginal distribution of one classical variable.
    pub fn marginal_distribution(&self, id: &str) -> Result<ClassicalDistribution> {
        let k = self.classical_index(id)?;
        let region = self.classical[k].clone();
        let mut probs = vec![0.0f64; region.dim];
        for (t, m) in &self.components {
            probs[t[k]] += m.trace().re;
        }
        ClassicalDistribution::new(region, probs)
    }

    /// `ρ_A = Σ_x ρ_{X=x,A}`: the quantum marginal.
    pub fn quantum_marginal(&self, tol: &Tolerance) -> Result<JointState> {
        let qdim: usize = self.quantum.iter().map(|f| f.dim).product();
        let mut acc = CMat::zeros(qdim, qdim);
        for m in self.components.values() {
            acc += m;
        }
        JointState::acausal(LabeledOperator::new(self.quantum.clone(), linalg::hermitize(&acc))?, tol)
    }

    /// Sum of the components selected by a (possibly partial) assignment of
    /// classical values, i.e. the unnormalized event operator.
    pub fn event_operator(&self, assignment: &[(&str, usize)]) -> Result<LabeledOperator> {
        let mut fixed: Vec<(usize, usize)> = Vec::new();
        for (id, v) in assignment {
            let k = self.classical_index(id)?;
            if *v >= self.classical[k].dim {
                return Err(Error::OutcomeOutOfRange {
                    index: *v,
                    size: self.classical[k].dim,
                });
            }
            fixed.push((k, *v));
        }
        let qdim: usize = self.quantum.iter().map(|f| f.dim).product();
        let mut acc = CMat::zeros(qdim, qdim);
        for (t, m) in &self.components {
            if fixed.iter().all(|&(k, v)| t[k] == v) {
                acc += m;
            }
        }
        LabeledOperator::new(self.quantum.clone(), linalg::hermitize(&acc))
    }

    /// Quantum Bayesian conditioning on classical values: normalize the event
    /// operator. Partial assignments marginalize the remaining classical
    /// variables first. Zero-probability events are an explicit error, not a
    /// default state.
    pub fn condition(&self, assignment: &[(&str, usize)], tol: &Tolerance) -> Result<JointState> {
        let ev = self.event_operator(assignment)?;
        let p = ev.trace().re;
        if p <= Tolerance::ABS_FLOOR {
            return Err(Error::ZeroProbabilityEvent { prob: p });
        }
        JointState::acausal(ev.scale(1.0 / p), tol)
    }

    /// Restrict to the classical variables in `keep` (marginalizing the
    /// others), preserving the quantum factors.
    pub fn marginal_hybrid(&self, keep: &[&str], tol: &Tolerance) -> Result<HybridState> {
        let kept: Vec<usize> = keep
            .iter()
            .map(|id| self.classical_index(id))
            .collect::<Result<_>>()?;
        if kept.is_empty() {
            return Err(Error::Invalid("marginal hybrid needs a classical variable".into()));
        }
        let regions: Vec<Region> = kept.iter().map(|&k| self.classical[k].clone()).collect();
        let qdim: usize = self.quantum.iter().map(|f| f.dim).product();
        let mut components: BTreeMap<Vec<usize>, CMat> = BTreeMap::new();
        for (t, m) in &self.components {
            let key: Vec<usize> = kept.iter().map(|&k| t[k]).collect();
            let entry = components
                .entry(key)
                .or_insert_with(|| CMat::zeros(qdim, qdim));
            *entry += m;
        }
        HybridState::new(regions, self.quantum.clone(), components, tol)
    }
}

/// `ρ_{X|A}`: a conditional whose components form a POVM on the quantum
/// factors. The statistical model for acquiring data about them.
#[derive(Debug, Clone)]
pub struct LikelihoodOperator {
    outcome: Region,
    quantum: Vec<Region>,
    effects: Vec<CMat>,
}

impl LikelihoodOperator {
    pub fn new(outcome: Region, quantum: Vec<Region>, effects: Vec<CMat>, tol: &Tolerance) -> Result<Self> {
        if outcome.kind != RegionKind::Classical {
            return Err(Error::Invalid("likelihood outcome region must be classical".into()));
        }
        if effects.len() != outcome.dim {
            return Err(Error::Mismatch {
                context: "likelihood effect count".into(),
                expected: outcome.dim.to_string(),
                found: effects.len().to_string(),
            });
        }
        let mut quantum = quantum;
        quantum.sort_by(|a, b| a.id.cmp(&b.id));
        let qdim: usize = quantum.iter().map(|f| f.dim).product();
        let mut sum = CMat::zeros(qdim, qdim);
        for e in &effects {
            if e.nrows() != qdim || e.ncols() != qdim {
                return Err(Error::MatrixShape {
                    rows: e.nrows(),
                    cols: e.ncols(),
                    expected: qdim,
                });
            }
            let dev = linalg::hermitian_deviation(e);
            if dev > tol.eq_tol {
                return Err(Error::NotHermitian { deviation: dev });
            }
            let min = linalg::herm_eig(e).0.first().copied().unwrap_or(0.0);
            if min < -tol.eig_cut {
                return Err(Error::NotPositive {
                    what: "POVM effect".into(),
                    min_eig: min,
                });
            }
            sum += e;
        }
        let dev = linalg::op_norm(&(sum - linalg::identity(qdim)));
        if dev > f64::max(tol.eq_tol, 1e-8) {
            return Err(Error::Invalid(format!(
                "POVM effects must sum to the identity (deviation {dev:.3e})"
            )));
        }
        Ok(Self {
            outcome,
            quantum,
            effects,
        })
    }

    pub fn outcome_region(&self) -> &Region {
        &self.outcome
    }

    pub fn quantum_regions(&self) -> &[Region] {
        &self.quantum
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }

    pub fn effect_operator(&self, x: usize) -> Result<LabeledOperator> {
        let e = self.effects.get(x).ok_or(Error::OutcomeOutOfRange {
            index: x,
            size: self.effects.len(),
        })?;
        LabeledOperator::new(self.quantum.clone(), e.clone())
    }

    /// `Σ_x |x⟩⟨x|_X ⊗ E_x` as a hybrid conditional.
    pub fn as_conditional(&self, tol: &Tolerance) -> Result<ConditionalState> {
        let mut acc: Option<LabeledOperator> = None;
        for (x, e) in self.effects.iter().enumerate() {
            let n = self.outcome.dim;
            let proj = CMat::from_fn(n, n, |i, j| {
                if i == x && j == x {
                    linalg::cr(1.0)
                } else {
                    linalg::cr(0.0)
                }
            });
            let block = LabeledOperator::new(vec![self.outcome.clone()], proj)?
                .tensor(&LabeledOperator::new(self.quantum.clone(), e.clone())?)?;
            acc = Some(match acc {
                None => block,
                Some(a) => a.add(&block)?,
            });
        }
        ConditionalState::new(
            acc.expect("at least one effect"),
            [self.outcome.id.clone()].into(),
            self.quantum.iter().map(|f| f.id.clone()).collect(),
            CausalClass::Hybrid,
            tol,
        )
    }
}

/// `ρ_{A|X}`: one normalized state of the quantum factors per classical value.
#[derive(Debug, Clone)]
pub struct EnsemblePreparation {
    label: Region,
    quantum: Vec<Region>,
    states: Vec<CMat>,
}

impl EnsemblePreparation {
    pub fn new(label: Region, quantum: Vec<Region>, states: Vec<CMat>, tol: &Tolerance) -> Result<Self> {
        if label.kind != RegionKind::Classical {
            return Err(Error::Invalid("ensemble label region must be classical".into()));
        }
        if states.len() != label.dim {
            return Err(Error::Mismatch {
                context: "ensemble state count".into(),
                expected: label.dim.to_string(),
                found: states.len().to_string(),
            });
        }
        let mut quantum = quantum;
        quantum.sort_by(|a, b| a.id.cmp(&b.id));
        let qdim: usize = quantum.iter().map(|f| f.dim).product();
        for s in &states {
            if s.nrows() != qdim || s.ncols() != qdim {
                return Err(Error::MatrixShape {
                    rows: s.nrows(),
                    cols: s.ncols(),
                    expected: qdim,
                });
            }
            let tr = s.trace().re;
            if (tr - 1.0).abs() > TRACE_TOL {
                return Err(Error::TraceNotOne {
                    what: "ensemble member".into(),
                    trace: tr,
                });
            }
            let min = linalg::herm_eig(s).0.first().copied().unwrap_or(0.0);
            if linalg::hermitian_deviation(s) > tol.eq_tol || min < -tol.eig_cut {
                return Err(Error::NotPositive {
                    what: "ensemble member".into(),
                    min_eig: min,
                });
            }
        }
        Ok(Self {
            label,
            quantum,
            states,
        })
    }

    pub fn label_region(&self) -> &Region {
        &self.label
    }

    pub fn quantum_regions(&self) -> &[Region] {
        &self.quantum
    }

    pub fn states(&self) -> &[CMat] {
        &self.states
    }

    pub fn state_operator(&self, x: usize) -> Result<LabeledOperator> {
        let s = self.states.get(x).ok_or(Error::OutcomeOutOfRange {
            index: x,
            size: self.states.len(),
        })?;
        LabeledOperator::new(self.quantum.clone(), s.clone())
    }
}

/// A measurement with classical outcome `X` and quantum output: one trace-
/// nonincreasing CP branch per outcome, summing to a trace-preserving map.
#[derive(Debug, Clone)]
pub struct Instrument {
    outcome: Region,
    input: Region,
    output: Region,
    branches: Vec<Vec<CMat>>,
}

impl Instrument {
    pub fn new(
        outcome: Region,
        input: Region,
        output: Region,
        branches: Vec<Vec<CMat>>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if outcome.kind != RegionKind::Classical {
            return Err(Error::Invalid("instrument outcome region must be classical".into()));
        }
        if branches.len() != outcome.dim {
            return Err(Error::Mismatch {
                context: "instrument branch count".into(),
                expected: outcome.dim.to_string(),
                found: branches.len().to_string(),
            });
        }
        let inst = Self {
            outcome,
            input,
            output,
            branches,
        };
        // Each branch is trace-nonincreasing and the total is trace-preserving.
        let mut total = CMat::zeros(inst.input.dim, inst.input.dim);
        for x in 0..inst.branches.len() {
            let ch = inst.branch_channel(x, tol)?;
            total += ch.kraus_gram();
        }
        let dev = linalg::op_norm(&(total - linalg::identity(inst.input.dim)));
        if dev > f64::max(tol.eq_tol, 1e-8) {
            return Err(Error::NotTracePreserving { deviation: dev });
        }
        Ok(inst)
    }

    pub fn outcome_region(&self) -> &Region {
        &self.outcome
    }

    pub fn input_region(&self) -> &Region {
        &self.input
    }

    pub fn output_region(&self) -> &Region {
        &self.output
    }

    pub fn branches(&self) -> &[Vec<CMat>] {
        &self.branches
    }

    pub fn branch_channel(&self, x: usize, tol: &Tolerance) -> Result<Channel> {
        let kraus = self
            .branches
            .get(x)
            .ok_or(Error::OutcomeOutOfRange {
                index: x,
                size: self.branches.len(),
            })?
            .clone();
        Channel::new_subnormalized(self.input.clone(), self.output.clone(), kraus, tol)
    }

    /// The POVM measured by the instrument: `E_x = Σ_m K†_{x,m} K_{x,m}`.
    pub fn induced_povm(&self, tol: &Tolerance) -> Result<LikelihoodOperator> {
        let effects: Vec<CMat> = (0..self.branches.len())
            .map(|x| self.branch_channel(x, tol).map(|ch| ch.kraus_gram()))
            .collect::<Result<_>>()?;
        LikelihoodOperator::new(
            self.outcome.clone(),
            vec![self.input.clone()],
            effects,
            tol,
        )
    }

    /// The causal conditional `ϱ_{XB|A} = Σ_x |x⟩⟨x|_X ⊗ ϱ^{(x)}_{B|A}` with
    /// each branch in the channel-conditional correspondence.
    pub fn to_conditional(&self, tol: &Tolerance) -> Result<ConditionalState> {
        let din = self.input.dim;
        let dout = self.output.dim;
        let n = din * dout;
        let mut acc: Option<LabeledOperator> = None;
        for x in 0..self.branches.len() {
            let ch = self.branch_channel(x, tol)?;
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
            let branch_op = LabeledOperator::new(vec![self.input.clone(), self.output.clone()], m)?;
            let nn = self.outcome.dim;
            let proj = CMat::from_fn(nn, nn, |i, j| {
                if i == x && j == x {
                    linalg::cr(1.0)
                } else {
                    linalg::cr(0.0)
                }
            });
            let block = LabeledOperator::new(vec![self.outcome.clone()], proj)?.tensor(&branch_op)?;
            acc = Some(match acc {
                None => block,
                Some(a) => a.add(&block)?,
            });
        }
        ConditionalState::new(
            acc.expect("at least one branch"),
            [self.outcome.id.clone(), self.output.id.clone()].into(),
            [self.input.id.clone()].into(),
            CausalClass::Causal {
                transposed: [self.input.id.clone()].into(),
            },
            tol,
        )
    }
}

/// `ρ_X = Tr_A[ρ_{X|A} ρ_A]`, i.e. `P(x) = Tr[E_x ρ]`.
pub fn born_rule(l: &LikelihoodOperator, rho: &JointState) -> Result<ClassicalDistribution> {
    if rho.factors() != l.quantum_regions() {
        return Err(Error::Mismatch {
            context: "born_rule quantum factors".into(),
            expected: format!("{:?}", l.quantum_regions().iter().map(|f| &f.id).collect::<Vec<_>>()),
            found: format!("{:?}", rho.op().factor_ids()),
        });
    }
    let probs: Vec<f64> = l
        .effects()
        .iter()
        .map(|e| (e * rho.op().matrix()).trace().re.max(0.0))
        .collect();
    ClassicalDistribution::new(l.outcome_region().clone(), probs)
}

/// `ρ_A = Σ_x P(x) ρ_{A|X=x}`.
pub fn ensemble_average(
    e: &EnsemblePreparation,
    d: &ClassicalDistribution,
    tol: &Tolerance,
) -> Result<JointState> {
    if d.region() != e.label_region() {
        return Err(Error::Mismatch {
            context: "ensemble_average label region".into(),
            expected: e.label_region().id.clone(),
            found: d.region().id.clone(),
        });
    }
    let qdim: usize = e.quantum_regions().iter().map(|f| f.dim).product();
    let mut acc = CMat::zeros(qdim, qdim);
    for (p, s) in d.probs().iter().zip(e.states()) {
        acc += s.scale(*p);
    }
    JointState::acausal(
        LabeledOperator::new(e.quantum_regions().to_vec(), acc)?,
        tol,
    )
}

/// `ρ_{XB} = Tr_A[ϱ_{XB|A} ρ_A]`: measure `rho_a`, keeping the classical
/// record and the post-measurement quantum output.
pub fn apply_instrument(inst: &Instrument, rho_a: &JointState, tol: &Tolerance) -> Result<HybridState> {
    if rho_a.factors() != [inst.input_region().clone()] {
        return Err(Error::Mismatch {
            context: "instrument input".into(),
            expected: inst.input_region().id.clone(),
            found: format!("{:?}", rho_a.op().factor_ids()),
        });
    }
    let mut components = BTreeMap::new();
    for x in 0..inst.outcome_region().dim {
        let ch = inst.branch_channel(x, tol)?;
        components.insert(vec![x], linalg::hermitize(&ch.apply_matrix(rho_a.op().matrix())));
    }
    HybridState::new(
        vec![inst.outcome_region().clone()],
        vec![inst.output_region().clone()],
        components,
        tol,
    )
}
