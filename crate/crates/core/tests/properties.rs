use irvweak::election::{
    analyze, borda_scores, bucklin_result, most_last_place, BordaVariant, Rule, WeakMeasure, PERMUTATIONS,
};
use irvweak::montecarlo::{binomial_stderr, run_experiment, Criterion, ExperimentConfig};
use irvweak::spatial::{derive_profile, sample_election, social_utilities, SpatialElection, SpatialModel};
use irvweak::{Candidate, Pick, Profile3};
use num_rational::Ratio;
use proptest::prelude::*;

fn arb_profile() -> impl Strategy<Value = Profile3> {
    (prop::array::uniform6(0u64..40), prop::array::uniform3(0u64..40))
        .prop_map(|(f, b)| Profile3::new(f, b))
        .prop_filter("non-empty", |p| p.voters() > 0)
}

fn arb_complete() -> impl Strategy<Value = Profile3> {
    prop::array::uniform6(0u64..40).prop_map(Profile3::complete).prop_filter("non-empty", |p| p.voters() > 0)
}

fn relabel_pick(p: Pick, perm: [Candidate; 3]) -> Pick {
    match p {
        Pick::Unique(c) => Pick::Unique(perm[c.index()]),
        Pick::Tie(s) => Pick::Tie(s.iter().map(|c| perm[c.index()]).collect()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn borda_totals(p in arb_profile()) {
        let sum = |v| borda_scores(&p, v).unwrap().iter().copied().sum::<Ratio<i64>>();
        let v = p.voters() as i64;
        let b = p.bullet_total() as i64;
        prop_assert_eq!(sum(BordaVariant::Avg), Ratio::from_integer(3 * v));
        prop_assert_eq!(sum(BordaVariant::Om), Ratio::from_integer(3 * v + b));
        prop_assert_eq!(sum(BordaVariant::Pm), Ratio::from_integer(3 * v - b));
        if b == 0 {
            prop_assert_eq!(sum(BordaVariant::Complete), Ratio::from_integer(3 * v));
        }
    }

    #[test]
    fn margins_are_antisymmetric(p in arb_profile()) {
        let m = analyze(&p, 0).unwrap().pairwise.margin;
        for x in 0..3 {
            prop_assert_eq!(m[x][x], 0);
            for y in 0..3 {
                prop_assert_eq!(m[x][y], -m[y][x]);
            }
        }
    }

    #[test]
    fn analyze_is_deterministic(p in arb_profile(), seed in any::<u64>()) {
        prop_assert_eq!(analyze(&p, seed).unwrap(), analyze(&p, seed).unwrap());
    }

    #[test]
    fn irv_avoids_plurality_and_condorcet_losers(p in arb_profile(), seed in any::<u64>()) {
        let out = analyze(&p, seed).unwrap();
        if let Some(loser) = out.condorcet_loser {
            prop_assert_ne!(out.irv_winner, loser);
        }
        let first = Candidate::ALL.map(|c| p.first_place(c));
        if first[0] != first[1] && first[1] != first[2] && first[0] != first[2] {
            let low = Pick::argmin(|c| first[c.index()]).unique().unwrap();
            prop_assert_ne!(out.irv_winner, low);
        }
    }

    #[test]
    fn bucklin_loser_is_most_last_without_majority(p in arb_complete()) {
        let v = p.voters();
        prop_assume!(Candidate::ALL.iter().all(|&c| 2 * p.first_place(c) <= v));
        prop_assert_eq!(bucklin_result(&p).unwrap().loser, most_last_place(&p).unwrap());
    }

    #[test]
    fn relabeling_is_equivariant(p in arb_complete(), k in 0usize..6) {
        let perm = PERMUTATIONS[k];
        let q = p.relabeled(perm);
        let a = analyze(&p, 0).unwrap();
        let b = analyze(&q, 0).unwrap();
        for m in [WeakMeasure::Borda, WeakMeasure::Bucklin, WeakMeasure::MostLastPlace] {
            prop_assert_eq!(b.weakest(m).unwrap(), relabel_pick(a.weakest(m).unwrap(), perm));
        }
        prop_assert_eq!(b.condorcet_winner, a.condorcet_winner.map(|c| perm[c.index()]));
        if !a.irv.elimination_tie && !a.irv.final_tie {
            prop_assert_eq!(b.irv_winner, perm[a.irv_winner.index()]);
        }
    }
}

fn one_d_models() -> Vec<SpatialModel> {
    ["UNI", "BIM(0.4)", "WBI(0.5)"].iter().map(|s| s.parse().unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_dimensional_profiles_are_single_peaked(k in 0usize..3, seed in any::<u64>(), v in 1usize..300) {
        let model = &one_d_models()[k];
        let e = sample_election(model, v, seed).unwrap();
        prop_assume!(!e.has_coincident_candidates());
        let p = derive_profile(&e, 0.0, seed ^ 1).unwrap();
        prop_assert_eq!(p.voters(), v as u64);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| e.candidates[i][0].total_cmp(&e.candidates[j][0]));
        let [l, m, r] = order.map(|i| Candidate::new(i).unwrap());
        // the two rankings that put the centre last
        prop_assert_eq!(p.count([l, r, m]), 0);
        prop_assert_eq!(p.count([r, l, m]), 0);
    }

    #[test]
    fn spatial_relabeling_is_equivariant(seed in any::<u64>(), k in 0usize..6, v in 1usize..200) {
        let model: SpatialModel = "UNIxBIM(0.5)".parse().unwrap();
        let e = sample_election(&model, v, seed).unwrap();
        let perm = PERMUTATIONS[k];
        let mut moved = e.candidates;
        for c in 0..3 {
            moved[perm[c].index()] = e.candidates[c];
        }
        let f = SpatialElection { candidates: moved, ..e.clone() };
        let p = derive_profile(&e, 0.0, 3).unwrap();
        let q = derive_profile(&f, 0.0, 3).unwrap();
        prop_assert_eq!(q, p.relabeled(perm));
        let u = social_utilities(&e);
        let w = social_utilities(&f);
        for c in 0..3 {
            prop_assert!((w[perm[c].index()] - u[c]).abs() <= 1e-9 * u[c].abs().max(1.0));
        }
    }
}

#[test]
fn experiment_statistics_are_consistent() {
    let mut cfg = ExperimentConfig::new("BIM(0.5)xBIM(0.5)".parse().unwrap(), 11);
    cfg.trials = 2000;
    cfg.v_count = 301;
    cfg.rules = vec![Rule::Irv, Rule::Plurality, Rule::Minimax];
    let r = run_experiment(&cfg).unwrap();
    for s in &r.stats {
        assert_eq!(s.stderr, binomial_stderr(s.count, cfg.trials));
        assert_eq!(s.frequency, s.count as f64 / cfg.trials as f64);
    }
    for b in &r.borda_utility {
        let borda = r.stat(b.rule, Criterion::Weak(WeakMeasure::Borda)).unwrap().count;
        let util = r.stat(b.rule, Criterion::MinUtility).unwrap().count;
        assert!(b.joint_count <= borda.min(util));
    }
}
