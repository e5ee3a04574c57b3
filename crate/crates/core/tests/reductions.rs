use bmgame_core::sample::{
    random_bipartite, random_star, star_core_imputation, GraphParams, StarParams,
};
use bmgame_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

prop_compose! {
    fn knapsack()(items in prop::collection::vec((1u64..4, 0u64..5), 1..5), cap in 0u64..7, goal in 0u64..13)
        -> KnapsackInstance {
        KnapsackInstance::from_pairs(&items, cap, goal).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn knapsack_answer_is_star_instability(k in knapsack()) {
        let (g, p) = knapsack_to_star::<i64>(&k).unwrap();
        let yes = solve_knapsack(&k).unwrap().yes;
        let brute = check_core_bruteforce(&g, &p, CoreCheck { allow_profit_share: true, max_agents: 20 }).unwrap();
        prop_assert_eq!(yes, !brute.in_core);
        prop_assert_eq!(yes, star_unstable_coalition_dp(&g, &p).unwrap().is_some());
        let lemmas = verify_fully_matched_lemmas(&g, &p, 20).unwrap();
        prop_assert!(lemmas.passed(), "{}", lemmas);
    }

    #[test]
    fn gadget_verifies_whenever_built(k in knapsack()) {
        let (g, p) = knapsack_to_star::<i64>(&k).unwrap();
        match star_to_bipartite_gadget(&g, &p) {
            Ok((h, q)) => {
                prop_assert!(q.values().iter().all(|x| *x >= 0));
                let report = verify_gadget(&h, &q, GadgetCheck::default()).unwrap();
                let failed = report.failures().filter(|c| c.name != NO_UNSTABLE_WITH_XY).count();
                prop_assert_eq!(failed, 0, "{}", report);
                prop_assert!(is_imputation(&h, &q));
            }
            Err(Error::Precondition(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn strong_partner_level_preserves_verdicts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = GraphParams { max_u: 3, max_v: 3, max_capacity: 3, max_weight: 8, edge_probability: 0.6 };
        let g: IntGame = random_bipartite(&mut rng, &params);
        let p = sample::random_imputation(&mut rng, &g).unwrap();
        let level = strong_partner_level(&g, &p);
        let (h, q) = partner_duplication_at(&g, &p, level).unwrap();
        let report = verify_partner_equivalence(&g, &p, &h, &q, 20).unwrap();
        prop_assert!(report.passed(), "{}", report);
        let (g0, p0) = partner_source(&h).unwrap();
        prop_assert_eq!(g0, g);
        prop_assert_eq!(p0, p);
    }
}

#[test]
fn default_partner_level_can_split_verdicts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let params = StarParams {
        max_leaves: 4,
        max_capacity: 3,
        max_weight: 8,
    };
    let mut split = 0;
    for _ in 0..200 {
        let g: IntGame = random_star(&mut rng, &params);
        let p = star_core_imputation(&mut rng, &g).unwrap();
        let (h, q) = partner_duplication(&g, &p).unwrap();
        let report = verify_partner_equivalence(&g, &p, &h, &q, 20).unwrap();
        split += usize::from(!report.passed());
    }
    assert!(split > 0);
}
