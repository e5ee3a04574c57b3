//! Seeded random instances and payoff vectors with integral data, for
//! property tests and experiments.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{coalition_worths, grand_worth, marginal_utilities, max_deficit_from_worths};
use crate::instance::{GameInstance, PayoffVector};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct GraphParams {
    pub max_u: usize,
    pub max_v: usize,
    pub max_capacity: u64,
    pub max_weight: u64,
    pub edge_probability: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct StarParams {
    pub max_leaves: usize,
    pub max_capacity: u64,
    pub max_weight: u64,
}

/// Between 1 and `max_u` (resp. `max_v`) vertices named `u1..`, `v1..`,
/// capacities in `0..=max_capacity`, each pair joined independently with
/// a weight in `0..=max_weight`.
pub fn random_bipartite<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    params: &GraphParams,
) -> GameInstance<T> {
    let nu = rng.gen_range(1..=params.max_u.max(1));
    let nv = rng.gen_range(1..=params.max_v.max(1));
    let mut builder = GameInstance::builder();
    for i in 1..=nu {
        builder = builder.u(format!("u{i}"), rng.gen_range(0..=params.max_capacity));
    }
    for j in 1..=nv {
        builder = builder.v(format!("v{j}"), rng.gen_range(0..=params.max_capacity));
    }
    for i in 1..=nu {
        for j in 1..=nv {
            if rng.gen_bool(params.edge_probability) {
                let w = T::from_count(rng.gen_range(0..=params.max_weight));
                builder = builder.edge(format!("u{i}"), format!("v{j}"), w);
            }
        }
    }
    builder.build().expect("generated instance is valid")
}

/// Center `u` with capacity in `1..=max_capacity`, 1 to `max_leaves`
/// leaves `v1..` with capacities in `0..=max_capacity`, every leaf joined
/// to the center with a weight in `0..=max_weight`.
pub fn random_star<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    params: &StarParams,
) -> GameInstance<T> {
    let n = rng.gen_range(1..=params.max_leaves.max(1));
    let mut builder = GameInstance::builder().u("u", rng.gen_range(1..=params.max_capacity.max(1)));
    for j in 1..=n {
        let w = T::from_count(rng.gen_range(0..=params.max_weight));
        builder = builder
            .v(format!("v{j}"), rng.gen_range(0..=params.max_capacity))
            .edge("u", format!("v{j}"), w);
    }
    builder.build().expect("generated star is valid")
}

fn count_of<T: Scalar>(x: &T) -> Result<u64> {
    let q = x.to_rational();
    if !q.is_integer() {
        return Err(Error::NonIntegral(x.to_string()));
    }
    q.to_integer()
        .to_u64()
        .ok_or_else(|| Error::Unrepresentable(x.to_string()))
}

/// Uniformly random split of `total` into `parts` nonnegative integers.
fn composition<R: Rng + ?Sized>(rng: &mut R, total: u64, parts: usize) -> Vec<u64> {
    if parts == 0 {
        return Vec::new();
    }
    let mut cuts: Vec<u64> = (1..parts).map(|_| rng.gen_range(0..=total)).collect();
    cuts.push(0);
    cuts.push(total);
    cuts.sort_unstable();
    cuts.windows(2).map(|w| w[1] - w[0]).collect()
}

/// A random integral imputation. Needs an integral grand worth.
pub fn random_imputation<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    g: &GameInstance<T>,
) -> Result<PayoffVector<T>> {
    let total = count_of(&grand_worth(g))?;
    let values = composition(rng, total, g.agent_count())
        .into_iter()
        .map(T::from_count)
        .collect();
    PayoffVector::new(g, values)
}

/// A core imputation of a star: each leaf gets an integer in
/// `0..=marginal`, the center gets the rest.
pub fn star_core_imputation<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    g: &GameInstance<T>,
) -> Result<PayoffVector<T>> {
    let star = g.star()?;
    let marginals = marginal_utilities(g);
    let mut values = vec![T::zero(); g.agent_count()];
    let mut rest = grand_worth(g);
    for &leaf in &star.leaves {
        let share = T::from_count(rng.gen_range(0..=count_of(&marginals[leaf])?));
        rest -= share.clone();
        values[leaf] = share;
    }
    if rest.is_negative() {
        return Err(Error::Precondition(
            "leaf marginals exceed the grand worth".into(),
        ));
    }
    values[star.center] = rest;
    PayoffVector::new(g, values)
}

/// Draws random imputations until one is in the core, up to `attempts`.
pub fn core_imputation_by_rejection<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    g: &GameInstance<T>,
    attempts: usize,
    max_agents: usize,
) -> Result<Option<PayoffVector<T>>> {
    let worths = coalition_worths(g, max_agents)?;
    for _ in 0..attempts {
        let p = random_imputation(rng, g)?;
        if !max_deficit_from_worths(&worths, &p).1.is_positive() {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Raises one agent `j` with `marginal(j) < worth(N)` to `marginal(j) + 1`,
/// taking the difference from the others, so that `N \ {j}` is unstable.
/// `None` when no agent qualifies.
pub fn perturb_out_of_core<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
) -> Result<Option<PayoffVector<T>>> {
    let grand = grand_worth(g);
    let marginals = marginal_utilities(g);
    let candidates: Vec<usize> = (0..g.agent_count())
        .filter(|&j| marginals[j] < grand)
        .collect();
    let Some(&j) = candidates.choose(rng) else {
        return Ok(None);
    };
    let mut values = p.values().to_vec();
    let target = marginals[j].clone() + T::one();
    if values[j] >= target {
        return Ok(Some(p.clone()));
    }
    let mut need = target.clone() - values[j].clone();
    values[j] = target;
    let mut donors: Vec<usize> = (0..g.agent_count()).filter(|&k| k != j).collect();
    donors.shuffle(rng);
    for k in donors {
        let take = need.clone().min(values[k].clone());
        values[k] -= take.clone();
        need -= take;
    }
    debug_assert!(need.is_zero());
    PayoffVector::new(g, values).map(Some)
}
