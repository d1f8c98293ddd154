//! Seeded self-check suites: randomized verification of the library's main
//! guarantees, shared between the CLI `check` command and the integration
//! tests. Every suite is deterministic per seed and reports the largest
//! deviation it observed.

use std::collections::BTreeMap;

use crate::compat::{
    bfm_compatible, objective_witness, posterior_given_likelihood, subjective_witness,
    support_lemma_check,
};
use crate::conditional::{conditional_from_joint, JointState};
use crate::entropy::conditional_mutual_information;
use crate::error::{Error, Result};
use crate::hybrid::{
    value_tuples, ClassicalDistribution, EnsemblePreparation, HybridState, Instrument,
    LikelihoodOperator,
};
use crate::improve::improve_shared_prior;
use crate::linalg::{self, CMat};
use crate::operator::LabeledOperator;
use crate::pool::{check_pool_condition, pool_multiplicative, pool_supra};
use crate::random::RandomSource;
use crate::region::Region;
use crate::scenario::{
    instrument_scenario, postprocess_scenario, preparation_scenario, realize_arbitrary_joint,
    remote_measurement_scenario, retrodiction_scenario, sequential_measurement_scenario,
    two_direct_scenario, two_preparation_scenario, two_remote_scenario, Scenario, StochasticMap,
};
use crate::suffstat::{condition_on_statistic, minimal_sufficient_statistic};
use crate::tolerance::Tolerance;

/// Parameters of a suite run.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_dim: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 100,
            max_dim: 3,
        }
    }
}

/// Outcome of a suite run.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub passed: bool,
    pub max_deviation: f64,
    pub threshold: f64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str, threshold: f64) -> Self {
        Self {
            name: name.into(),
            trials: 0,
            passed: true,
            max_deviation: 0.0,
            threshold,
            failures: Vec::new(),
        }
    }

    fn observe(&mut self, dev: f64, context: impl Fn() -> String) {
        self.max_deviation = self.max_deviation.max(dev);
        if dev > self.threshold {
            self.passed = false;
            if self.failures.len() < 10 {
                self.failures.push(format!("{} (deviation {dev:.3e})", context()));
            }
        }
    }

    fn fail(&mut self, context: String) {
        self.passed = false;
        if self.failures.len() < 10 {
            self.failures.push(context);
        }
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "objective_witness",
    "subjective_witness",
    "support_lemma",
    "sufficient_statistic",
    "classical_pooling",
    "multiplicative_pooling",
    "realize_joint",
    "strong_subadditivity",
    "classical_reduction",
];

pub fn run_suite(name: &str, cfg: &SuiteConfig, tol: &Tolerance) -> Result<SuiteReport> {
    match name {
        "objective_witness" => Ok(objective_witness_suite(cfg, tol)),
        "subjective_witness" => Ok(subjective_witness_suite(cfg, tol)),
        "support_lemma" => Ok(support_lemma_suite(cfg, tol)),
        "sufficient_statistic" => Ok(sufficient_statistic_suite(cfg, tol)),
        "classical_pooling" => Ok(classical_pooling_suite(cfg, tol)),
        "multiplicative_pooling" => Ok(multiplicative_pooling_suite(cfg, tol)),
        "realize_joint" => Ok(realize_joint_suite(cfg, tol)),
        "strong_subadditivity" => Ok(strong_subadditivity_suite(cfg, tol)),
        "classical_reduction" => Ok(classical_reduction_suite(cfg, tol)),
        _ => Err(Error::Invalid(format!(
            "unknown suite `{name}`; available: {}",
            SUITE_NAMES.join(", ")
        ))),
    }
}

fn random_state_pair(r: &mut RandomSource, max_dim: usize) -> (JointState, JointState, usize) {
    let dim = 2 + r.usize_below(max_dim.max(2) - 1);
    let tol = Tolerance::default();
    let rank1 = 1 + r.usize_below(dim);
    let rank2 = 1 + r.usize_below(dim);
    let s1 = JointState::acausal(
        LabeledOperator::new(
            vec![Region::quantum("B", dim)],
            r.density_matrix_of_rank(dim, rank1),
        )
        .expect("generated state"),
        &tol,
    )
    .expect("generated state");
    let s2 = JointState::acausal(
        LabeledOperator::new(
            vec![Region::quantum("B", dim)],
            r.density_matrix_of_rank(dim, rank2),
        )
        .expect("generated state"),
        &tol,
    )
    .expect("generated state");
    (s1, s2, dim)
}

/// Compatibility ⇔ a shared joint exists whose conditionals reproduce both
/// inputs.
pub fn objective_witness_suite(cfg: &SuiteConfig, tol: &Tolerance) -> SuiteReport {
    let mut report = SuiteReport::new("objective_witness", 1e-9);
    for k in 0..cfg.trials {
        let mut r = RandomSource::for_trial(cfg.seed, k as u64);
        let (s1, s2, dim) = random_state_pair(&mut r, cfg.max_dim.max(4).min(4));
        report.trials += 1;
        let compatible = match bfm_compatible(&s1, &s2, tol) {
            Ok(v) => v.compatible,
            Err(e) => {
                report.fail(format!("trial {k}: compatibility check failed: {e}"));
                continue;
            }
        };
        match (compatible, objective_witness(&s1, &s2, tol)) {
            (true, Ok(w)) => {
                let ids: Vec<String> = w
                    .joint
                    .classical_regions()
                    .iter()
                    .map(|f| f.id.clone())
                    .collect();
                for (id, v, s) in [(&ids[0], w.outcomes.0, &s1), (&ids[1], w.outcomes.1, &s2)] {
                    match w.joint.condition(&[(id, v)], tol) {
                        Ok(c) => {
                            let dev = c.op().distance(s.op()).unwrap_or(f64::INFINITY);
                            report.observe(dev, || format!("trial {k} dim {dim}: conditional mismatch"));
                        }
                        Err(e) => report.fail(format!("trial {k}: conditioning failed: {e}")),
                    }
                }
            }
            (false, Err(Error::Incompatible)) => {}
            (true, Err(e)) => report.fail(format!("trial {k}: compatible pair but witness failed: {e}")),
            (false, Ok(_)) => report.fail(format!("trial {k}: incompatible pair produced a witness")),
            (false, Err(e)) => report.fail(format!("trial {k}: wrong error for incompatible pair: {e}")),
        }
    }
    report
}

/// Compatibility ⇔ a single measurement outcome makes both posteriors agree;
/// engineered orthogonal pairs never agree under random likelihoods.
pub fn subjective_witness_suite(cfg: &SuiteConfig, tol: &Tolerance) -> SuiteReport {
    let mut report = SuiteReport::new("subjective_witness", 1e-9);
    for k in 0..cfg.trials {
        let mut r = RandomSource::for_trial(cfg.seed, k as u64);
        let (s1, s2, dim) = random_state_pair(&mut r, cfg.max_dim.max(4).min(4));
        report.trials += 1;
        let compatible = match bfm_compatible(&s1, &s2, tol) {
            Ok(v) => v.compatible,
            Err(e) => {
                report.fail(format!("trial {k}: compatibility check failed: {e}"));
                continue;
            }
        };
        match (compatible, subjective_witness(&s1, &s2, tol)) {
            (true, Ok(w)) => {
                let p1 = posterior_given_likelihood(&s1, &w.likelihood, w.outcome, tol);
                let p2 = posterior_given_likelihood(&s2, &w.likelihood, w.outcome, tol);
                match (p1, p2) {
                    (Ok(p1), Ok(p2)) => {
                        let dev = p1.op().distance(p2.op()).unwrap_or(f64::INFINITY);
                        report.observe(dev, || format!("trial {k} dim {dim}: posterior mismatch"));
                    }
                    _ => report.fail(format!("trial {k}: posterior undefined at witness outcome")),
                }
            }
            (false, Err(Error::Incompatible)) => {}
            (true, Err(e)) => report.fail(format!("trial {k}: compatible pair but witness failed: {e}")),
            (false, Ok(_)) => report.fail(format!("trial {k}: incompatible pair produced a witness")),
            (false, Err(e)) => report.fail(format!("trial {k}: wrong error for incompatible pair: {e}")),
        }
    }
    // Orthogonal-support pairs: no likelihood outcome can reconcile the
    // agents. Uses a quarter of the configured trials, 20 likelihoods each.
    let orth_trials = (cfg.trials / 4).max(1);
    for k in 0..orth_trials {
        let mut r = RandomSource::for_trial(cfg.seed.wrapping_add(0x5eed), k as u64);
        let dim = 3 + r.usize_below(2);
        let split = 1 + r.usize_below(dim - 1);
        // random unitary from the QR of a Ginibre matrix
        let q = r.ginibre(dim, dim).qr().q();
        let block = |cols: std::ops::Range<usize>, rr: &mut RandomSource| {
            let n = cols.len();
            let inner = rr.density_matrix(n);
            let sub = CMat::from_fn(dim, n, |i, j| q[(i, cols.start + j)]);
            linalg::hermitize(&(&sub * inner * sub.adjoint()))
        };
        let m1 = block(0..split, &mut r);
        let m2 = block(split..dim, &mut r);
        let s1 = JointState::acausal(
            LabeledOperator::new(vec![Region::quantum("B", dim)], m1).expect("state"),
            tol,
        )
        .expect("state");
        let s2 = JointState::acausal(
            LabeledOperator::new(vec![Region::quantum("B", dim)], m2).expect("state"),
            tol,
        )
        .expect("state");
        report.trials += 1;
        if subjective_witness(&s1, &s2, tol).is_ok() {
            report.fail(format!("orthogonal trial {k}: witness produced for disjoint supports"));
        }
        for j in 0..20 {
            let l = match r.random_povm(
                Region::classical("X", 2),
                vec![Region::quantum("B", dim)],
                tol,
            ) {
                Ok(l) => l,
                Err(e) => {
                    report.fail(format!("orthogonal trial {k}.{j}: POVM generation failed: {e}"));
                    continue;
                }
            };
            for x in 0..2 {
                let p1 = posterior_given_likelihood(&s1, &l, x, tol);
                let p2 = posterior_given_likelihood(&s2, &l, x, tol);
                if let (Ok(p1), Ok(p2)) = (p1, p2) {
                    let dist = p1.op().distance(p2.op()).unwrap_or(f64::INFINITY);
                    if dist <= 1e-9 {
                        report.fail(format!(
                            "orthogonal trial {k}.{j}: outcome {x} reconciled disjoint supports"
                        ));
                    }
                }
            }
        }
    }
    report
}

fn random_stochastic(r: &mut RandomSource, input: usize, output: Region) -> StochasticMap {
    let rows = (0..input).map(|_| r.distribution(output.dim)).collect();
    StochasticMap::new(output, rows).expect("generated stochastic map")
}

fn random_instrument(r: &mut RandomSource, input: Region, output: Region, n_out: usize, tol: &Tolerance) -> Result<Instrument> {
    // split a random channel's Kraus operators across outcomes
    let ch = r.random_channel(input.clone(), output.clone(), tol)?;
    let kraus = ch.kraus().to_vec();
    let mut branches: Vec<Vec<CMat>> = vec![Vec::new(); n_out];
    for (i, k) in kraus.into_iter().enumerate() {
        branches[i % n_out].push(k);
    }
    // guard against empty branches when the channel has few Kraus operators
    for b in branches.iter_mut() {
        if b.is_empty() {
            b.push(CMat::zeros(output.dim, input.dim));
        }
    }
    Instrument::new(Region::classical("X", n_out), input, output, branches, tol)
}

fn random_scenario(r: &mut RandomSource, which: usize, tol: &Tolerance) -> Result<Scenario> {
    let dim = 2;
    let b = Region::quantum("B", dim);
    match which % 9 {
        0 => {
            let z = Region::classical("Z", 3);
            let prep = EnsemblePreparation::new(
                z.clone(),
                vec![b],
                (0..3).map(|_| r.density_matrix(dim)).collect(),
                tol,
            )?;
            let pz = ClassicalDistribution::new(z, r.distribution(3))?;
            preparation_scenario(&pz, &prep, tol)
        }
        1 => {
            let a = Region::quantum("A", dim);
            let rho = JointState::acausal(
                LabeledOperator::new(vec![a.clone(), b], r.density_matrix(dim * dim))?,
                tol,
            )?;
            let l = r.random_povm(Region::classical("X", 2), vec![a], tol)?;
            remote_measurement_scenario(&rho, &l, tol)
        }
        2 => {
            let rho = r.random_density(b.clone(), tol)?;
            let l = r.random_povm(Region::classical("X", 3), vec![b], tol)?;
            retrodiction_scenario(&rho, &l, tol)
        }
        3 => {
            let a = Region::quantum("A", dim);
            let rho = r.random_density(a.clone(), tol)?;
            let inst = random_instrument(r, a, b, 2, tol)?;
            instrument_scenario(&rho, &inst, tol)
        }
        4 => {
            let z = Region::classical("X1", 3);
            let prep = EnsemblePreparation::new(
                z.clone(),
                vec![b],
                (0..3).map(|_| r.density_matrix(dim)).collect(),
                tol,
            )?;
            let pz = ClassicalDistribution::new(z, r.distribution(3))?;
            let base = preparation_scenario(&pz, &prep, tol)?;
            let proc = random_stochastic(r, 3, Region::classical("X2", 2));
            postprocess_scenario(&base.joint, &proc, tol)
        }
        5 => {
            let z = Region::classical("Z", 3);
            let prep = EnsemblePreparation::new(
                z.clone(),
                vec![b],
                (0..3).map(|_| r.density_matrix(dim)).collect(),
                tol,
            )?;
            let pz = ClassicalDistribution::new(z, r.distribution(3))?;
            let l1 = random_stochastic(r, 3, Region::classical("X1", 2));
            let l2 = random_stochastic(r, 3, Region::classical("X2", 2));
            two_preparation_scenario(&pz, &prep, &l1, &l2, tol)
        }
        6 => {
            let a1 = Region::quantum("A1", dim);
            let a2 = Region::quantum("A2", dim);
            let rho = JointState::acausal(
                LabeledOperator::new(
                    vec![a1.clone(), a2.clone(), b],
                    r.density_matrix(dim * dim * dim),
                )?,
                tol,
            )?;
            let l1 = r.random_povm(Region::classical("X1", 2), vec![a1], tol)?;
            let l2 = r.random_povm(Region::classical("X2", 2), vec![a2], tol)?;
            two_remote_scenario(&rho, &l1, &l2, tol)
        }
        7 => {
            let rho = r.random_density(b.clone(), tol)?;
            let lz = r.random_povm(Region::classical("Z", 3), vec![b], tol)?;
            let l1 = random_stochastic(r, 3, Region::classical("X1", 2));
            let l2 = random_stochastic(r, 3, Region::classical("X2", 2));
            two_direct_scenario(&rho, &lz, &l1, &l2, tol)
        }
        _ => {
            let a1 = Region::quantum("A1", dim);
            let a2 = Region::quantum("A2", dim);
            let rho = r.random_density(a1.clone(), tol)?;
            let mut inst1 = random_instrument(r, a1, a2.clone(), 2, tol)?;
            inst1 = Instrument::new(
                Region::classical("X1", 2),
                inst1.input_region().clone(),
                inst1.output_region().clone(),
                inst1.branches().to_vec(),
                tol,
            )?;
            let mut inst2 = random_instrument(r, a2, b, 2, tol)?;
            inst2 = Instrument::new(
                Region::classical("X2", 2),
                inst2.input_region().clone(),
                inst2.output_region().clone(),
                inst2.branches().to_vec(),
                tol,
            )?;
            sequential_measurement_scenario(&rho, &inst1, &inst2, tol)
        }
    }
}

/// Every branch of every randomly built scenario stays inside the prior's
/// support.
pub fn support_lemma_suite(cfg: &SuiteConfig, tol: &Tolerance) -> SuiteReport {
    let mut report = SuiteReport::new("support_lemma", 1e-9);
    for k in 0..cfg.trials {
        let mut r = RandomSource::for_trial(cfg.seed, k as u64);
        report.trials += 1;
        let s = match random_scenario(&mut r, k, tol) {
            Ok(s) => s,
            Err(e) => {
                report.fail(format!("trial {k}: scenario build failed: {e}"));
                continue;
            }
        };
        let cdims: Vec<usize> = s.joint.classical_regions().iter().map(|f| f.dim).collect();
        let prior = match s.joint.quantum_marginal(tol) {
            Ok(p) => p,
            Err(e) => {
                report.fail(format!("trial {k}: marginal failed: {e}"));
                continue;
            }
        };
        let supp = match prior.op().support(tol) {
            Ok(p) => p,
            Err(e) => {
                report.fail(format!("trial {k}: support failed: {e}"));
                continue;
            }
        };
        let d = prior.op().dim();
        let outside = linalg::identity(d) - supp.projector.matrix();
        for t in value_tuples(&cdims) {
            let p = s.joint.prob(&t).unwrap_or(0.0);
            if p <= Tolerance::ABS_FLOOR {
                continue;
            }
            match support_lemma_check(&s.joint, &t, tol) {
                Ok(true) => {
                    let comp = s.joint.component(&t).expect("component");
                    let leak = linalg::op_norm(&(&outside * comp * &outside));
                    report.observe(leak, || {
                        format!("trial {k} ({}): branch {t:?} leaked", s.provenance.builder)
                    });
                }
                Ok(false) => report.fail(format!(
                    "trial {k} ({}): branch {t:?} outside prior support",
                    s.provenance.builder
                )),
                Err(e) => report.fail(format!("trial {k}: check failed: {e}")),
            }
        }
    }
    report
}

/// Cell mixtures equal their representatives; announcing a branch state
/// returns it verbatim.
pub fn sufficient_statistic_suite(cfg: &SuiteConfig, tol: &Tolerance) -> SuiteReport {
    let mut report = SuiteReport::new("sufficient_statistic", 1e-9);
    for k in 0..cfg.trials {
        let mut r = RandomSource::for_trial(cfg.seed, k as u64);
        let dim = 2 + r.usize_below(cfg.max_dim.max(2) - 1);
        // 4-value X with an engineered duplicate pair (values 0 and 1)
        let x = Region::classical("X", 4);
        let b = Region::quantum("B", dim);
        let shared = r.density_matrix(dim);
        let states = [
            shared.clone(),
            shared.clone(),
            r.density_matrix(dim),
            r.density_matrix(dim),
        ];
        let probs = r.distribution(4);
        let mut comps = BTreeMap::new();
        for (i, s) in states.iter().enumerate() {
            comps.insert(vec![i], s.scale(probs[i]));
        }
        report.trials += 1;
        let h = match HybridState::new(vec![x], vec![b.clone()], comps, tol) {
            Ok(h) => h,
            Err(e) => {
                report.fail(format!("trial {k}: hybrid build failed: {e}"));
                continue;
            }
        };
        let map = match minimal_sufficient_statistic(&h, tol) {
            Ok(m) => m,
            Err(e) => {
                report.fail(format!("trial {k}: statistic failed: {e}"));
                continue;
            }
        };
        if map.cells.len() != 3 {
            report.fail(format!("trial {k}: expected 3 cells, found {}", map.cells.len()));
            continue;
        }
        let cell = map.cell_of(&[0]).expect("value 0 has positive probability");
        if map.cell_of(&[1]) != Some(cell) {
            report.fail(format!("trial {k}: duplicate branches not merged"));
            continue;
        }
        match condition_on_statistic(&h, &map, cell, tol) {
            Ok(c) => {
                let dev = linalg::op_norm(&(c.op().matrix() - &shared));
                report.observe(dev, || format!("trial {k}: cell mixture deviates from branch"));
            }
            Err(e) => report.fail(format!("trial {k}: conditioning failed: {e}")),
        }
        let announced = JointState::acausal(
            LabeledOperator::new(vec![b], shared.clone()).expect("state"),
            tol,
        )
        .expect("state");
        match improve_shared_prior(&h, &announced, tol) {
            Ok(improved) => {
                let dev = improved.op().distance(announced.op()).unwrap_or(f64::INFINITY);
                report.observe(dev, || format!("trial {k}: improved state differs from announcement"));
            }
            Err(e) => report.fail(format!("trial {k}: improvement failed: {e}")),
        }
    }
    report
}

/// On classical scenarios with conditionally independent readouts, exact
/// supra-Bayesian pooling equals the normalized product rule `c·Q₁Q₂/P`.
pub fn classical_pooling_suite(cfg: &SuiteConfig, tol: &Tolerance) -> SuiteReport {
    let mut report = SuiteReport::new("classical_pooling", 1e-12);
    for k in 0..cfg.trials {
        let mut r = RandomSource::for_trial(cfg.seed, k as u64);
        let ny = 2 + r.usize_below(2);
        let y = Region::quantum("Y", ny);
        let x1 = Region::classical("X1", 2);
        let x2 = Region::classical("X2", 2);
        let py = r.distribution(ny);
        let rows1: Vec<Vec<f64>> = (0..ny).map(|_| r.distribution(2)).collect();
        let rows2: Vec<Vec<f64>> = (0..ny).map(|_| r.distribution(2)).collect();
        let mut comps = BTreeMap::new();
        for v1 in 0..2usize {
            for v2 in 0..2usize {
                let mut m = CMat::zeros(ny, ny);
                for yv in 0..ny {
                    m[(yv, yv)] = linalg::cr(py[yv] * rows1[yv][v1] * rows2[yv][v2]);
                }
                comps.insert(vec![v1, v2], m);
            }
        }
        report.trials += 1;
        let h = match HybridState::new(vec![x1, x2], vec![y], comps, tol) {
            Ok(h) => h,
            Err(e) => {
                report.fail(format!("trial {k}: hybrid build failed: {e}"));
                continue;
            }
        };
        for v1 in 0..2usize {
            for v2 in 0..2usize {
                let supra = match pool_supra(&h, "X1", v1, "X2", v2, tol) {
                    Ok(s) => s,
                    Err(e) => {
                        report.fail(format!("trial {k}: supra pooling failed: {e}"));
                        continue;
                    }
                };
                // scalar oracle: c · Q1(y) Q2(y) / P(y)
                let p1: f64 = (0..ny).map(|yv| py[yv] * rows1[yv][v1]).sum();
                let p2: f64 = (0..ny).map(|yv| py[yv] * rows2[yv][v2]).sum();
                let q: Vec<f64> = (0..ny)
                    .map(|yv| {
                        let q1 = py[yv] * rows1[yv][v1] / p1;
                        let q2 = py[yv] * rows2[yv][v2] / p2;
                        q1 * q2 / py[yv]
                    })
                    .collect();
                let norm: f64 = q.iter().sum();
                for yv in 0..ny {
                    let dev = (supra.op().matrix()[(yv, yv)].re - q[yv] / norm).abs();
                    report.observe(dev, || {
                        format!("trial {k}: pooled probability mismatch at ({v1},{v2},{yv})")
                    });
                }
            }
        }
    }
    report
}

/// On scenarios built to satisfy the product-likelihood condition, the
/// multiplicative pool equals exact supra-Bayesian pooling.
pub fn multiplicative_pooling_suite(cfg: &SuiteConfig, tol: &Tolerance) -> SuiteReport {
    let mut report = SuiteReport::new("multiplicative_pooling", 1e-9);
    for k in 0..cfg.trials {
        let mut r = RandomSource::for_trial(cfg.seed, k as u64);
        let da = 2 + r.usize_below(cfg.max_dim.min(3).max(2) - 1);
        let nb = 2 + r.usize_below(2);
        let a1 = Region::quantum("A1", da);
        let a2 = Region::quantum("A2", da);
        let b = Region::quantum("B", nb);
        // Σ_i p_i ρ^{A1}_i ⊗ ρ^{A2}_i ⊗ |i⟩⟨i|_B
        let p = r.distribution(nb);
        let mut acc: Option<LabeledOperator> = None;
        for i in 0..nb {
            let mut point = CMat::zeros(nb, nb);
            point[(i, i)] = linalg::cr(1.0);
            let term = LabeledOperator::new(vec![a1.clone()], r.density_matrix(da))
                .expect("operator")
                .tensor(&LabeledOperator::new(vec![a2.clone()], r.density_matrix(da)).expect("operator"))
                .expect("tensor")
                .tensor(&LabeledOperator::new(vec![b.clone()], point).expect("operator"))
                .expect("tensor")
                .scale(p[i]);
            acc = Some(match acc {
                None => term,
                Some(s) => s.add(&term).expect("sum"),
            });
        }
        report.trials += 1;
        let rho = JointState::acausal(acc.expect("state"), tol).expect("state");
        let l1 = match r.random_povm(Region::classical("X1", 2), vec![a1], tol) {
            Ok(l) => l,
            Err(e) => {
                report.fail(format!("trial {k}: POVM generation failed: {e}"));
                continue;
            }
        };
        let l2 = match r.random_povm(Region::classical("X2", 2), vec![a2], tol) {
            Ok(l) => l,
            Err(e) => {
                report.fail(format!("trial {k}: POVM generation failed: {e}"));
                continue;
            }
        };
        let s = match two_remote_scenario(&rho, &l1, &l2, tol) {
            Ok(s) => s,
            Err(e) => {
                report.fail(format!("trial {k}: scenario build failed: {e}"));
                continue;
            }
        };
        match check_pool_condition(&s.joint, "X1", "X2", tol) {
            Ok(true) => {}
            Ok(false) => {
                report.fail(format!("trial {k}: product condition failed on a CI construction"));
                continue;
            }
            Err(e) => {
                report.fail(format!("trial {k}: condition check failed: {e}"));
                continue;
            }
        }
        let prior = s.joint.quantum_marginal(tol).expect("marginal");
        for v1 in 0..2usize {
            for v2 in 0..2usize {
                let s1 = match s.joint.condition(&[("X1", v1)], tol) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                let s2 = match s.joint.condition(&[("X2", v2)], tol) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                let mult = match pool_multiplicative(&s1, &s2, &prior, tol) {
                    Ok(m) => m,
                    Err(e) => {
                        report.fail(format!("trial {k}: multiplicative pool refused: {e}"));
                        continue;
                    }
                };
                let supra = match pool_supra(&s.joint, "X1", v1, "X2", v2, tol) {
                    Ok(s) => s,
                    Err(e) => {
                        report.fail(format!("trial {k}: supra pool failed: {e}"));
                        continue;
                    }
                };
                let dev = mult.op().distance(supra.op()).unwrap_or(f64::INFINITY);
                report.observe(dev, || format!("trial {k}: pools disagree at ({v1},{v2})"));
            }
        }
    }
    report
}

/// Round trip: realize an arbitrary hybrid as a sequential-measurement
/// scenario and rebuild it.
pub fn realize_joint_suite(cfg: &SuiteConfig, tol: &Tolerance) -> SuiteReport {
    let mut report = SuiteReport::new("realize_joint", 1e-9);
    for k in 0..cfg.trials {
        let mut r = RandomSource::for_trial(cfg.seed, k as u64);
        let dim = 2 + r.usize_below(cfg.max_dim.min(3).max(2) - 1);
        let x1 = Region::classical("X1", 2);
        let x2 = Region::classical("X2", 2);
        let b = Region::quantum("B", dim);
        let probs = r.distribution(4);
        let mut comps = BTreeMap::new();
        for (i, t) in value_tuples(&[2, 2]).into_iter().enumerate() {
            comps.insert(t, r.density_matrix(dim).scale(probs[i]));
        }
        report.trials += 1;
        let target = match HybridState::new(vec![x1, x2], vec![b], comps, tol) {
            Ok(h) => h,
            Err(e) => {
                report.fail(format!("trial {k}: target build failed: {e}"));
                continue;
            }
        };
        let built = realize_arbitrary_joint(&target, tol).and_then(|(rho, i1, i2)| {
            sequential_measurement_scenario(&rho, &i1, &i2, tol)
        });
        match built {
            Ok(s) => {
                for (t, m) in target.components() {
                    let dev = linalg::op_norm(&(s.joint.component(t).expect("component") - m));
                    report.observe(dev, || format!("trial {k}: component {t:?} mismatch"));
                }
            }
            Err(e) => report.fail(format!("trial {k}: realization failed: {e}")),
        }
    }
    report
}

/// Conditional mutual information is nonnegative on random tripartite states.
pub fn strong_subadditivity_suite(cfg: &SuiteConfig, tol: &Tolerance) -> SuiteReport {
    let mut report = SuiteReport::new("strong_subadditivity", 1e-9);
    for k in 0..cfg.trials {
        let mut r = RandomSource::for_trial(cfg.seed, k as u64);
        let dc = if k % 2 == 0 { 2 } else { 3 };
        let regions = vec![
            Region::quantum("A", 2),
            Region::quantum("B", 2),
            Region::quantum("C", dc),
        ];
        let total: usize = regions.iter().map(|f| f.dim).product();
        report.trials += 1;
        let rho = match LabeledOperator::new(regions, r.density_matrix(total))
            .and_then(|op| JointState::acausal(op, tol))
        {
            Ok(s) => s,
            Err(e) => {
                report.fail(format!("trial {k}: state build failed: {e}"));
                continue;
            }
        };
        match conditional_mutual_information(&rho, &["A"], &["B"], &["C"], tol) {
            Ok(cmi) => report.observe((-cmi).max(0.0), || format!("trial {k}: negative CMI {cmi:.3e}")),
            Err(e) => report.fail(format!("trial {k}: CMI failed: {e}")),
        }
    }
    report
}

/// Diagonal states reproduce scalar probability identities: conditionals,
/// Bayesian inversion, and posterior updates all reduce to arithmetic.
pub fn classical_reduction_suite(cfg: &SuiteConfig, tol: &Tolerance) -> SuiteReport {
    let mut report = SuiteReport::new("classical_reduction", 1e-12);
    for k in 0..cfg.trials {
        let mut r = RandomSource::for_trial(cfg.seed, k as u64);
        let nr = 2 + r.usize_below(2);
        let ns = 2 + r.usize_below(2);
        let joint_probs = r.distribution(nr * ns);
        let rr = Region::classical("R", nr);
        let ss = Region::classical("S", ns);
        let mut m = CMat::zeros(nr * ns, nr * ns);
        for i in 0..nr * ns {
            m[(i, i)] = linalg::cr(joint_probs[i]);
        }
        report.trials += 1;
        let joint = match LabeledOperator::new(vec![rr.clone(), ss.clone()], m)
            .and_then(|op| JointState::hybrid(op, tol))
        {
            Ok(j) => j,
            Err(e) => {
                report.fail(format!("trial {k}: joint build failed: {e}"));
                continue;
            }
        };
        // marginalization: P(R=i) = Σ_j P(i,j)
        let marg = joint.op().marginal(&["R"]).expect("marginal");
        for i in 0..nr {
            let expect: f64 = (0..ns).map(|j| joint_probs[i * ns + j]).sum();
            let dev = (marg.matrix()[(i, i)].re - expect).abs();
            report.observe(dev, || format!("trial {k}: marginal mismatch at R={i}"));
        }
        // conditional: entries of the diagonal conditional are P(S=j|R=i)
        let cond = match conditional_from_joint(&joint, &["R"], tol) {
            Ok(c) => c,
            Err(e) => {
                report.fail(format!("trial {k}: conditional failed: {e}"));
                continue;
            }
        };
        let cm = cond.op().matrix_in_order(&["R", "S"]).expect("ordering");
        for i in 0..nr {
            let pr: f64 = (0..ns).map(|j| joint_probs[i * ns + j]).sum();
            for j in 0..ns {
                let expect = joint_probs[i * ns + j] / pr;
                let dev = (cm[(i * ns + j, i * ns + j)].re - expect).abs();
                report.observe(dev, || format!("trial {k}: conditional mismatch at ({i},{j})"));
            }
        }
        // Bayesian posterior update: a diagonal likelihood on the prior
        // reproduces P(i|x) = E_x(i) P(i) / Σ_j E_x(j) P(j)
        let prior_probs = r.distribution(nr);
        let prior = ClassicalDistribution::new(rr.clone(), prior_probs.clone())
            .expect("distribution")
            .embed(tol)
            .expect("state");
        let e0: Vec<f64> = (0..nr).map(|_| r.uniform() * 0.98 + 0.01).collect();
        let effects = vec![
            CMat::from_fn(nr, nr, |i, j| if i == j { linalg::cr(e0[i]) } else { linalg::cr(0.0) }),
            CMat::from_fn(nr, nr, |i, j| if i == j { linalg::cr(1.0 - e0[i]) } else { linalg::cr(0.0) }),
        ];
        let l = LikelihoodOperator::new(Region::classical("X", 2), vec![rr.clone()], effects, tol)
            .expect("likelihood");
        match posterior_given_likelihood(&prior, &l, 0, tol) {
            Ok(post) => {
                let norm: f64 = (0..nr).map(|i| e0[i] * prior_probs[i]).sum();
                for i in 0..nr {
                    let expect = e0[i] * prior_probs[i] / norm;
                    let dev = (post.op().matrix()[(i, i)].re - expect).abs();
                    report.observe(dev, || format!("trial {k}: posterior mismatch at {i}"));
                }
            }
            Err(e) => report.fail(format!("trial {k}: posterior failed: {e}")),
        }
    }
    report
}
