use bmgame_core::sample::{random_bipartite, random_star, GraphParams, StarParams};
use bmgame_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SMALL: GraphParams = GraphParams {
    max_u: 4,
    max_v: 4,
    max_capacity: 3,
    max_weight: 10,
    edge_probability: 0.6,
};

const STAR: StarParams = StarParams {
    max_leaves: 8,
    max_capacity: 4,
    max_weight: 10,
};

fn graph(seed: u64) -> IntGame {
    random_bipartite(&mut ChaCha8Rng::seed_from_u64(seed), &SMALL)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solver_matches_brute_force(seed in any::<u64>()) {
        let g = graph(seed);
        let m = max_weight_b_matching(&g);
        m.check(&g).unwrap();
        let b = brute_force_matching(&g).unwrap();
        b.check(&g).unwrap();
        prop_assert_eq!(m.total_weight, b.total_weight);
    }

    #[test]
    fn more_capacity_never_hurts(seed in any::<u64>(), pick in any::<usize>()) {
        let g = graph(seed);
        let k = pick % g.agent_count();
        let mut caps = g.capacities().to_vec();
        caps[k] += 1;
        let edges = g
            .edges()
            .iter()
            .map(|e| (g.id(e.u).to_string(), g.id(e.v).to_string(), e.weight))
            .collect();
        let bigger = GameInstance::new(g.u_side().to_vec(), g.v_side().to_vec(), caps, edges).unwrap();
        let before = max_weight_b_matching(&g).total_weight;
        let after = max_weight_b_matching(&bigger).total_weight;
        prop_assert!(before <= after);
    }

    #[test]
    fn greedy_is_optimal_on_stars(seed in any::<u64>()) {
        let g: IntGame = random_star(&mut ChaCha8Rng::seed_from_u64(seed), &STAR);
        let greedy = greedy_star_matching(&g).unwrap();
        greedy.check(&g).unwrap();
        prop_assert_eq!(greedy.total_weight, max_weight_b_matching(&g).total_weight);
    }

    #[test]
    fn rational_and_integer_agree(seed in any::<u64>()) {
        let g = graph(seed);
        let q: Game = g.convert().unwrap();
        let expected = Rational::from_integer(max_weight_b_matching(&g).total_weight.into());
        prop_assert_eq!(max_weight_b_matching(&q).total_weight, expected);
    }
}

#[test]
fn scaled_weights_scale_worth() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let third = Rational::new(1.into(), 3.into());
    for _ in 0..50 {
        let g: Game = random_bipartite(&mut rng, &SMALL);
        let edges = g
            .edges()
            .iter()
            .map(|e| {
                (
                    g.id(e.u).to_string(),
                    g.id(e.v).to_string(),
                    &e.weight * &third,
                )
            })
            .collect();
        let scaled = GameInstance::new(
            g.u_side().to_vec(),
            g.v_side().to_vec(),
            g.capacities().to_vec(),
            edges,
        )
        .unwrap();
        assert_eq!(
            max_weight_b_matching(&scaled).total_weight,
            max_weight_b_matching(&g).total_weight * &third
        );
    }
}

#[test]
fn no_edges_is_worth_zero() {
    let g = GameInstance::<i64>::builder()
        .u("a", 2)
        .v("b", 2)
        .build()
        .unwrap();
    let m = max_weight_b_matching(&g);
    assert_eq!(m.total_weight, 0);
    assert!(m.multiplicities.is_empty());
}
