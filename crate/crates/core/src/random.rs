//! Deterministic random generators for the self-check suites: Ginibre-induced
//! density matrices, random POVMs, and random channels from Haar isometries.
//! The same seed always reproduces the same stream.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::conditional::{Channel, JointState};
use crate::error::Result;
use crate::hybrid::LikelihoodOperator;
use crate::linalg::{self, CMat};
use crate::operator::LabeledOperator;
use crate::region::Region;
use crate::tolerance::Tolerance;

/// Seeded generator; cheap to fork per trial.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha12Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for trial `k` of a suite seeded with `seed`.
    pub fn for_trial(seed: u64, k: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(k.wrapping_add(1));
        Self { rng }
    }

    fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Matrix of iid standard complex Gaussians.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> CMat {
        DMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(self.gaussian(), self.gaussian())
        })
    }

    pub fn usize_below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen_range(0.0..1.0)
    }

    /// `G G† / Tr[G G†]`: full-rank almost surely, unit trace, PSD.
    pub fn density_matrix(&mut self, dim: usize) -> CMat {
        let g = self.ginibre(dim, dim);
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        linalg::hermitize(&m.scale(1.0 / tr))
    }

    /// Rank-limited density matrix (e.g. rank 1 for a random pure state).
    pub fn density_matrix_of_rank(&mut self, dim: usize, rank: usize) -> CMat {
        let g = self.ginibre(dim, rank.clamp(1, dim));
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        linalg::hermitize(&m.scale(1.0 / tr))
    }

    pub fn random_density(&mut self, region: Region, tol: &Tolerance) -> Result<JointState> {
        let m = self.density_matrix(region.dim);
        JointState::acausal(LabeledOperator::new(vec![region], m)?, tol)
    }

    /// POVM `E_i = S^{-1/2} A_i S^{-1/2}` from random positives `A_i`,
    /// `S = Σ A_i`: valid and full-support almost surely.
    pub fn random_povm(
        &mut self,
        outcome: Region,
        quantum: Vec<Region>,
        tol: &Tolerance,
    ) -> Result<LikelihoodOperator> {
        let dim: usize = quantum.iter().map(|f| f.dim).product();
        let n = outcome.dim;
        let positives: Vec<CMat> = (0..n)
            .map(|_| {
                let g = self.ginibre(dim, dim);
                linalg::hermitize(&(&g * g.adjoint()))
            })
            .collect();
        let mut s = CMat::zeros(dim, dim);
        for a in &positives {
            s += a;
        }
        let isqrt = linalg::spectral_map(&s, |v| if v > 0.0 { 1.0 / v.sqrt() } else { 0.0 });
        let effects: Vec<CMat> = positives
            .iter()
            .map(|a| linalg::hermitize(&(&isqrt * a * &isqrt)))
            .collect();
        LikelihoodOperator::new(outcome, quantum, effects, tol)
    }

    /// Haar-random isometry `V: C^din → C^din ⊗ C^denv` via QR of a Ginibre
    /// matrix; the channel's Kraus operators are its environment slices.
    pub fn random_channel(
        &mut self,
        input: Region,
        output: Region,
        tol: &Tolerance,
    ) -> Result<Channel> {
        let din = input.dim;
        let dout = output.dim;
        // environment dimension din*dout guarantees a generic channel exists
        let denv = din;
        let g = self.ginibre(dout * denv, dout * denv);
        let qr = g.qr();
        let q = qr.q();
        // isometry: first `din` columns
        let kraus: Vec<CMat> = (0..denv)
            .map(|e| CMat::from_fn(dout, din, |b, a| q[(b * denv + e, a)]))
            .collect();
        Channel::new(input, output, kraus, tol)
    }

    /// Probability vector from normalized uniform draws, bounded away from
    /// zero.
    pub fn distribution(&mut self, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n).map(|_| self.uniform() + 1e-3).collect();
        let s: f64 = v.iter().sum();
        for x in &mut v {
            *x /= s;
        }
        v
    }
}
