//! Core analysis specific to star graphs.
//!
//! On a star an imputation is in the core exactly when no leaf is paid more
//! than its marginal utility, which needs only `n + 1` matching solves. For
//! general profit shares the search for an unstable coalition is hard, but
//! a dynamic program over the center's capacity finds the best coalition in
//! pseudo-polynomial time.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{grand_worth, is_imputation, worth, CoreVerdict, Witness};
use crate::instance::{Coalition, GameInstance, PayoffVector};
use crate::scalar::Scalar;
use crate::solver::solve_active;

/// Triple counts up to this are checked exhaustively.
pub const EXHAUSTIVE_TRIPLES: u128 = 1 << 12;

/// Limit on `(leaves + 1) * (center capacity + 1)` for the DP.
pub const DP_STATE_BUDGET: u128 = 1_000_000;

/// Core test by the marginal-utility characterization. The witness is
/// `N \ {v}` for the most overpaid leaf `v` (first in leaf order on ties),
/// with deficit `p(v) - marginal(v)`.
pub fn check_core_star<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
) -> Result<CoreVerdict<T>> {
    let star = g.star()?;
    if !is_imputation(g, p) {
        return Err(Error::NotAnImputation);
    }
    let grand = grand_worth(g);
    let mut active = vec![true; g.agent_count()];
    let mut worst: Option<(usize, T)> = None;
    for &leaf in &star.leaves {
        active[leaf] = false;
        let without = solve_active(g, &active).total_weight;
        active[leaf] = true;
        let marginal = grand.clone() - without;
        let excess = p.get(leaf).clone() - marginal;
        if excess.is_positive() && worst.as_ref().is_none_or(|(_, d)| excess > *d) {
            worst = Some((leaf, excess));
        }
    }
    Ok(match worst {
        None => CoreVerdict::stable(),
        Some((leaf, deficit)) => CoreVerdict::unstable(Coalition::grand(g).without(leaf), deficit),
    })
}

/// `S` contains the center; `v` and `v_prime` are distinct leaves outside `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalTriple {
    pub base: Coalition,
    pub v: usize,
    pub v_prime: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalViolation<T> {
    pub triple: MarginalTriple,
    /// `worth(S + v) - worth(S)`.
    pub gain_alone: T,
    /// `worth(S + v + v') - worth(S + v')`.
    pub gain_with_other: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiminishingCheck<T> {
    pub checked: usize,
    pub exhaustive: bool,
    pub violation: Option<MarginalViolation<T>>,
}

impl<T> DiminishingCheck<T> {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `worth(S+v) - worth(S) >= worth(S+v+v') - worth(S+v')` over
/// triples with the center in `S`. All triples are checked when there are
/// at most [`EXHAUSTIVE_TRIPLES`]; otherwise `trials` random ones drawn
/// from `seed`. Stops at the first violation.
pub fn verify_diminishing_marginals<T: Scalar>(
    g: &GameInstance<T>,
    trials: usize,
    seed: u64,
) -> Result<DiminishingCheck<T>> {
    let star = g.star()?;
    let n = star.leaf_count();
    let total = if n < 2 {
        0
    } else {
        (n * (n - 1)) as u128 * (1u128 << (n - 2).min(100))
    };
    let mut memo: HashMap<Coalition, T> = HashMap::new();
    let mut value = |s: Coalition| -> T {
        if let Some(x) = memo.get(&s) {
            return x.clone();
        }
        let x = worth(g, &s).expect("coalitions are built from the instance");
        memo.insert(s, x.clone());
        x
    };
    let mut check = |triple: MarginalTriple| -> Option<MarginalViolation<T>> {
        let base = triple.base.clone();
        let gain_alone = value(base.with(triple.v)) - value(base.clone());
        let gain_with_other =
            value(base.with(triple.v).with(triple.v_prime)) - value(base.with(triple.v_prime));
        (gain_alone < gain_with_other).then(|| MarginalViolation {
            triple,
            gain_alone,
            gain_with_other,
        })
    };

    let mut checked = 0;
    if total <= EXHAUSTIVE_TRIPLES {
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                let others: Vec<usize> = (0..n).filter(|&k| k != a && k != b).collect();
                for mask in 0..1u64 << others.len() {
                    let base = Coalition::new(
                        others
                            .iter()
                            .enumerate()
                            .filter(|(bit, _)| mask >> bit & 1 == 1)
                            .map(|(_, &k)| star.leaves[k])
                            .chain(std::iter::once(star.center)),
                    );
                    checked += 1;
                    let triple = MarginalTriple {
                        base,
                        v: star.leaves[a],
                        v_prime: star.leaves[b],
                    };
                    if let Some(violation) = check(triple) {
                        return Ok(DiminishingCheck {
                            checked,
                            exhaustive: true,
                            violation: Some(violation),
                        });
                    }
                }
            }
        }
        return Ok(DiminishingCheck {
            checked,
            exhaustive: true,
            violation: None,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let base = Coalition::new(
            (0..n)
                .filter(|&k| k != a && k != b)
                .filter(|_| rng.gen_bool(0.5))
                .map(|k| star.leaves[k])
                .chain(std::iter::once(star.center)),
        );
        checked += 1;
        let triple = MarginalTriple {
            base,
            v: star.leaves[a],
            v_prime: star.leaves[b],
        };
        if let Some(violation) = check(triple) {
            return Ok(DiminishingCheck {
                checked,
                exhaustive: false,
                violation: Some(violation),
            });
        }
    }
    Ok(DiminishingCheck {
        checked,
        exhaustive: false,
        violation: None,
    })
}

/// Best coalition containing the center, i.e. the maximizer of
/// `worth(S) - p(S)` over `S` with the center in `S`, by dynamic
/// programming over units of center capacity.
///
/// Leaves are scanned by nonincreasing weight (ties by leaf order). A leaf
/// included when `j` units are already used takes `min(b_i, b_u - j)`
/// copies, which is exactly what the greedy star matching would give it, so
/// every DP path evaluates one coalition exactly. Requires integral weights
/// and payoffs.
pub fn star_max_deficit_dp<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
) -> Result<Witness<T>> {
    let star = g.star()?;
    if let Some(e) = g.edges().iter().find(|e| !e.weight.is_integral()) {
        return Err(Error::NonIntegral(format!(
            "weight {} on edge ({}, {})",
            e.weight,
            g.id(e.u),
            g.id(e.v)
        )));
    }
    if let Some(i) = (0..p.len()).find(|&i| !p.get(i).is_integral()) {
        return Err(Error::NonIntegral(format!(
            "payoff {} of `{}`",
            p.get(i),
            g.id(i)
        )));
    }
    let units = g.capacity(star.center);
    let states = (star.leaf_count() as u128 + 1) * (units as u128 + 1);
    if states > DP_STATE_BUDGET {
        return Err(Error::guard("DP states", states, DP_STATE_BUDGET));
    }
    let width = units as usize + 1;

    let mut order: Vec<(usize, T)> = star
        .leaves
        .iter()
        .zip(&star.leaf_edges)
        .map(|(&leaf, e)| {
            (
                leaf,
                e.map_or_else(T::zero, |e| g.edges()[e].weight.clone()),
            )
        })
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1));

    // value[j]: best deficit with j center units in use; `from` records,
    // per layer and state, the previous state and whether the leaf joined.
    let mut value: Vec<Option<T>> = vec![None; width];
    value[0] = Some(-p.get(star.center).clone());
    let mut from: Vec<Vec<(usize, bool)>> = Vec::with_capacity(order.len());
    for (leaf, w) in &order {
        let mut next = value.clone();
        let mut layer: Vec<(usize, bool)> = (0..width).map(|j| (j, false)).collect();
        for (j, current) in value.iter().enumerate() {
            let Some(current) = current else { continue };
            let take = g.capacity(*leaf).min(units - j as u64);
            let to = j + take as usize;
            let cand = current.clone() + w.times(take) - p.get(*leaf).clone();
            if next[to].as_ref().is_none_or(|x| cand > *x) {
                next[to] = Some(cand);
                layer[to] = (j, true);
            }
        }
        value = next;
        from.push(layer);
    }

    let (mut j, best) = value
        .iter()
        .enumerate()
        .filter_map(|(j, x)| x.as_ref().map(|x| (j, x.clone())))
        .fold(None::<(usize, T)>, |acc, (j, x)| match acc {
            Some((_, ref y)) if *y >= x => acc,
            _ => Some((j, x)),
        })
        .expect("state 0 is always reachable");
    let mut members = vec![star.center];
    for (k, layer) in from.iter().enumerate().rev() {
        let (prev, joined) = layer[j];
        if joined {
            members.push(order[k].0);
        }
        j = prev;
    }
    Ok(Witness {
        coalition: Coalition::new(members),
        deficit: best,
    })
}

/// A coalition with strictly positive deficit, if one exists. Coalitions
/// without the center have worth 0 and, with nonnegative payoffs, are
/// never unstable, so the center-containing optimum decides.
pub fn star_unstable_coalition_dp<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
) -> Result<Option<Witness<T>>> {
    let best = star_max_deficit_dp(g, p)?;
    Ok(best.deficit.is_positive().then_some(best))
}
