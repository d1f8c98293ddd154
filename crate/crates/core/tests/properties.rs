//! Randomized invariant checks for the operator layer: identities that must
//! hold for every well-formed input, exercised over seeded random states,
//! channels, and scenarios.

use condstates::conditional::{
    bayes_invert, belief_propagate, channel_to_conditional, conditional_from_joint,
    conditional_to_channel, joint_from_conditional, JointState,
};
use condstates::entropy::conditional_mutual_information;
use condstates::hybrid::HybridState;
use condstates::linalg::{self, CMat};
use condstates::operator::LabeledOperator;
use condstates::pool::{pool_linear, PoolWeights};
use condstates::random::RandomSource;
use condstates::region::Region;
use condstates::suffstat::{condition_on_statistic, minimal_sufficient_statistic};
use condstates::Tolerance;
use proptest::prelude::*;

const TOL: Tolerance = Tolerance::new(1e-10, 1e-9);

fn bipartite(r: &mut RandomSource, da: usize, db: usize) -> JointState {
    JointState::acausal(
        LabeledOperator::new(
            vec![Region::quantum("A", da), Region::quantum("B", db)],
            r.density_matrix(da * db),
        )
        .unwrap(),
        &TOL,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn star_with_identity_is_identity_map(seed: u64) {
        let mut r = RandomSource::new(seed);
        let dim = 2 + r.usize_below(3);
        let m = LabeledOperator::new(vec![Region::quantum("B", dim)], r.density_matrix(dim)).unwrap();
        let id = LabeledOperator::new(
            vec![Region::quantum("B", dim)],
            linalg::identity(dim),
        )
        .unwrap();
        let starred = m.star(&id, &TOL).unwrap();
        prop_assert!(m.distance(&starred).unwrap() < 1e-10);
    }

    #[test]
    fn star_preserves_trace_against_unit_trace_operators(seed: u64) {
        // Tr[M ⋆ N] = Tr[M N]; with M = I this is Tr[N]
        let mut r = RandomSource::new(seed);
        let dim = 2 + r.usize_below(3);
        let n = LabeledOperator::new(vec![Region::quantum("B", dim)], r.density_matrix(dim)).unwrap();
        let m = LabeledOperator::new(vec![Region::quantum("B", dim)], r.density_matrix(dim)).unwrap();
        let starred = m.star(&n, &TOL).unwrap();
        let direct = (m.matrix() * n.matrix()).trace().re;
        prop_assert!((starred.trace().re - direct).abs() < 1e-10);
    }

    #[test]
    fn conditional_joint_round_trip(seed: u64) {
        let mut r = RandomSource::new(seed);
        let db = 2 + r.usize_below(2);
        let j = bipartite(&mut r, 2, db);
        let cond = conditional_from_joint(&j, &["A"], &TOL).unwrap();
        let marg = JointState::acausal(j.op().marginal(&["A"]).unwrap(), &TOL).unwrap();
        let back = joint_from_conditional(&cond, &marg, &TOL).unwrap();
        prop_assert!(j.op().distance(back.op()).unwrap() < 1e-9);
    }

    #[test]
    fn bayes_inversion_is_an_involution(seed: u64) {
        let mut r = RandomSource::new(seed);
        let j = bipartite(&mut r, 2, 2);
        let cond = conditional_from_joint(&j, &["A"], &TOL).unwrap();
        let ma = JointState::acausal(j.op().marginal(&["A"]).unwrap(), &TOL).unwrap();
        let mb = JointState::acausal(j.op().marginal(&["B"]).unwrap(), &TOL).unwrap();
        let inv = bayes_invert(&cond, &ma, &TOL).unwrap();
        let back = bayes_invert(&inv, &mb, &TOL).unwrap();
        prop_assert!(cond.op().distance(back.op()).unwrap() < 1e-8);
    }

    #[test]
    fn belief_propagation_matches_marginalization(seed: u64) {
        let mut r = RandomSource::new(seed);
        let j = bipartite(&mut r, 2, 3);
        let cond = conditional_from_joint(&j, &["A"], &TOL).unwrap();
        let ma = JointState::acausal(j.op().marginal(&["A"]).unwrap(), &TOL).unwrap();
        let propagated = belief_propagate(&cond, &ma, &TOL).unwrap();
        let mb = j.op().marginal(&["B"]).unwrap();
        prop_assert!(propagated.op().distance(&mb).unwrap() < 1e-9);
    }

    #[test]
    fn channel_conditional_round_trip(seed: u64) {
        let mut r = RandomSource::new(seed);
        let din = 2 + r.usize_below(2);
        let dout = 2 + r.usize_below(2);
        let ch = r
            .random_channel(Region::quantum("A", din), Region::quantum("B", dout), &TOL)
            .unwrap();
        let cond = channel_to_conditional(&ch, &TOL).unwrap();
        let back = conditional_to_channel(&cond, &TOL).unwrap();
        for _ in 0..3 {
            let rho = r.density_matrix(din);
            let dev = linalg::op_norm(&(ch.apply_matrix(&rho) - back.apply_matrix(&rho)));
            prop_assert!(dev < 1e-9, "channel action changed by {dev}");
        }
    }

    #[test]
    fn conditional_mutual_information_is_nonnegative(seed: u64) {
        let mut r = RandomSource::new(seed);
        let regions = vec![
            Region::quantum("A", 2),
            Region::quantum("B", 2),
            Region::quantum("C", 2),
        ];
        let rho = JointState::acausal(
            LabeledOperator::new(regions, r.density_matrix(8)).unwrap(),
            &TOL,
        )
        .unwrap();
        let cmi = conditional_mutual_information(&rho, &["A"], &["B"], &["C"], &TOL).unwrap();
        prop_assert!(cmi >= -1e-9, "CMI = {cmi}");
    }

    #[test]
    fn entropy_is_concave_under_linear_pooling(seed: u64) {
        let mut r = RandomSource::new(seed);
        let dim = 2 + r.usize_below(2);
        let w = 0.2 + 0.6 * r.uniform();
        let mk = |r: &mut RandomSource| {
            JointState::acausal(
                LabeledOperator::new(vec![Region::quantum("B", dim)], r.density_matrix(dim)).unwrap(),
                &TOL,
            )
            .unwrap()
        };
        let s1 = mk(&mut r);
        let s2 = mk(&mut r);
        let pooled = pool_linear(
            &[s1.clone(), s2.clone()],
            &PoolWeights::new(vec![w, 1.0 - w]).unwrap(),
            &TOL,
        )
        .unwrap();
        let h = |s: &JointState| s.op().von_neumann_entropy(&TOL).unwrap();
        prop_assert!(h(&pooled) >= w * h(&s1) + (1.0 - w) * h(&s2) - 1e-9);
    }

    #[test]
    fn statistic_cells_average_back_to_the_marginal(seed: u64) {
        let mut r = RandomSource::new(seed);
        let dim = 2;
        let nx = 3 + r.usize_below(2);
        let probs = r.distribution(nx);
        let mut comps = std::collections::BTreeMap::new();
        for (i, p) in probs.iter().enumerate() {
            comps.insert(vec![i], r.density_matrix(dim).scale(*p));
        }
        let h = HybridState::new(
            vec![Region::classical("X", nx)],
            vec![Region::quantum("B", dim)],
            comps,
            &TOL,
        )
        .unwrap();
        let map = minimal_sufficient_statistic(&h, &TOL).unwrap();
        let mut acc = CMat::zeros(dim, dim);
        for (ci, cell) in map.cells.iter().enumerate() {
            let cond = condition_on_statistic(&h, &map, ci, &TOL).unwrap();
            acc += cond.op().matrix().scale(cell.probability);
        }
        let marg = h.quantum_marginal(&TOL).unwrap();
        prop_assert!(linalg::op_norm(&(acc - marg.op().matrix())) < 1e-9);
    }

    #[test]
    fn support_projector_is_idempotent(seed: u64) {
        let mut r = RandomSource::new(seed);
        let dim = 2 + r.usize_below(3);
        let rank = 1 + r.usize_below(dim);
        let op = LabeledOperator::new(
            vec![Region::quantum("B", dim)],
            r.density_matrix_of_rank(dim, rank),
        )
        .unwrap();
        let supp = op.support(&TOL).unwrap();
        prop_assert_eq!(supp.rank, rank);
        let p = supp.projector.matrix();
        prop_assert!(linalg::op_norm(&(p * p - p)) < 1e-10);
        // the projector fixes the operator
        prop_assert!(linalg::op_norm(&(p * op.matrix() * p - op.matrix())) < 1e-9);
    }

    #[test]
    fn hybrid_assembly_round_trip(seed: u64) {
        let mut r = RandomSource::new(seed);
        let probs = r.distribution(2);
        let mut comps = std::collections::BTreeMap::new();
        for (i, p) in probs.iter().enumerate() {
            comps.insert(vec![i], r.density_matrix(2).scale(*p));
        }
        let h = HybridState::new(
            vec![Region::classical("X", 2)],
            vec![Region::quantum("B", 2)],
            comps,
            &TOL,
        )
        .unwrap();
        let joint = h.assemble(&TOL).unwrap();
        let back = HybridState::from_joint(&joint, &TOL).unwrap();
        for (t, m) in h.components() {
            prop_assert!(linalg::op_norm(&(back.component(t).unwrap() - m)) < 1e-12);
        }
    }

    #[test]
    fn factor_permutation_round_trips(seed: u64) {
        let mut r = RandomSource::new(seed);
        let dims = [2usize, 3, 2];
        let total: usize = dims.iter().product();
        let m = r.ginibre(total, total);
        let perm = [2usize, 0, 1];
        let permuted = linalg::permute_factors(&m, &dims, &perm);
        // inverse permutation
        let new_dims: Vec<usize> = perm.iter().map(|&i| dims[i]).collect();
        let mut inv = [0usize; 3];
        for (new_pos, &old_pos) in perm.iter().enumerate() {
            inv[old_pos] = new_pos;
        }
        let back = linalg::permute_factors(&permuted, &new_dims, &inv);
        prop_assert!(linalg::op_norm(&(back - m)) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_factorizes(seed: u64) {
        let mut r = RandomSource::new(seed);
        let a = r.density_matrix(2);
        let b = r.density_matrix(3);
        let prod = linalg::kron(&a, &b);
        let ta = linalg::partial_trace(&prod, &[2, 3], &[true, false]);
        prop_assert!(linalg::op_norm(&(ta - a)) < 1e-12);
    }
}
