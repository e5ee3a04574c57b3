//! The b-matching game: coalition worth, imputations, marginal utilities
//! and exhaustive core analysis.

use crate::error::{Error, Result};
use crate::instance::{Coalition, GameInstance, PayoffVector};
use crate::scalar::Scalar;
use crate::solver::{max_weight_b_matching, solve_active};

/// Default agent limit for exhaustive coalition enumeration.
pub const DEFAULT_MAX_AGENTS: usize = 24;

/// Hard ceiling: coalitions are enumerated as `u64` bitmasks.
pub const MASK_BITS: usize = 63;

/// A coalition together with its deficit `worth(S) - p(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness<T> {
    pub coalition: Coalition,
    pub deficit: T,
}

/// Outcome of a core test. `witness` is present exactly when `in_core` is
/// false, and then its deficit is strictly positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreVerdict<T> {
    pub in_core: bool,
    pub witness: Option<Witness<T>>,
}

impl<T: Scalar> CoreVerdict<T> {
    pub fn stable() -> Self {
        CoreVerdict {
            in_core: true,
            witness: None,
        }
    }

    pub fn unstable(coalition: Coalition, deficit: T) -> Self {
        debug_assert!(deficit.is_positive());
        CoreVerdict {
            in_core: false,
            witness: Some(Witness { coalition, deficit }),
        }
    }
}

/// Options for [`check_core_bruteforce`].
#[derive(Clone, Copy, Debug)]
pub struct CoreCheck {
    /// Accept payoff vectors that do not sum to the grand coalition's worth.
    pub allow_profit_share: bool,
    pub max_agents: usize,
}

impl Default for CoreCheck {
    fn default() -> Self {
        CoreCheck {
            allow_profit_share: false,
            max_agents: DEFAULT_MAX_AGENTS,
        }
    }
}

/// Worth of `s`: the maximum-weight b-matching of the induced sub-instance.
pub fn worth<T: Scalar>(g: &GameInstance<T>, s: &Coalition) -> Result<T> {
    g.check_coalition(s)?;
    Ok(solve_active(g, &s.indicator(g.agent_count())).total_weight)
}

pub(crate) fn worth_of_mask<T: Scalar>(g: &GameInstance<T>, mask: u64, active: &mut [bool]) -> T {
    for (i, slot) in active.iter_mut().enumerate() {
        *slot = mask >> i & 1 == 1;
    }
    solve_active(g, active).total_weight
}

pub fn grand_worth<T: Scalar>(g: &GameInstance<T>) -> T {
    max_weight_b_matching(g).total_weight
}

/// True iff every payoff is nonnegative and they sum to the grand worth.
pub fn is_imputation<T: Scalar>(g: &GameInstance<T>, p: &PayoffVector<T>) -> bool {
    p.len() == g.agent_count()
        && p.values().iter().all(|x| !x.is_negative())
        && p.total() == grand_worth(g)
}

/// `worth(N) - worth(N \ {i})`.
pub fn marginal_utility<T: Scalar>(g: &GameInstance<T>, agent: &str) -> Result<T> {
    let i = g.agent(agent)?;
    Ok(marginal_of(g, i, &grand_worth(g)))
}

fn marginal_of<T: Scalar>(g: &GameInstance<T>, i: usize, grand: &T) -> T {
    let mut active = vec![true; g.agent_count()];
    active[i] = false;
    grand.clone() - solve_active(g, &active).total_weight
}

/// Marginal utility of every agent, in agent order.
pub fn marginal_utilities<T: Scalar>(g: &GameInstance<T>) -> Vec<T> {
    let grand = grand_worth(g);
    (0..g.agent_count())
        .map(|i| marginal_of(g, i, &grand))
        .collect()
}

fn enumeration_guard<T: Scalar>(g: &GameInstance<T>, max_agents: usize) -> Result<()> {
    let limit = max_agents.min(MASK_BITS);
    if g.agent_count() > limit {
        return Err(Error::guard(
            "agent count",
            g.agent_count() as u64,
            limit as u64,
        ));
    }
    Ok(())
}

/// Worth of every coalition, indexed by bitmask.
pub fn coalition_worths<T: Scalar>(g: &GameInstance<T>, max_agents: usize) -> Result<Vec<T>> {
    enumeration_guard(g, max_agents)?;
    let n = g.agent_count();
    let mut active = vec![false; n];
    Ok((0..1u64 << n)
        .map(|mask| worth_of_mask(g, mask, &mut active))
        .collect())
}

/// Maximum of `worth(S) - p(S)` over all coalitions given a precomputed
/// worth table. The empty coalition (deficit 0) is included; ties go to
/// the smallest bitmask.
pub fn max_deficit_from_worths<T: Scalar>(worths: &[T], p: &PayoffVector<T>) -> (u64, T) {
    let mut best = (0u64, T::zero());
    for (mask, w) in worths.iter().enumerate().skip(1) {
        let d = w.clone() - p.of_mask(mask as u64);
        if d > best.1 {
            best = (mask as u64, d);
        }
    }
    best
}

/// Coalition maximizing `worth(S) - p(S)`, the empty coalition included,
/// ties broken by smallest bitmask.
pub fn max_deficit<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
    max_agents: usize,
) -> Result<Witness<T>> {
    enumeration_guard(g, max_agents)?;
    check_payoff_len(g, p)?;
    let n = g.agent_count();
    let mut active = vec![false; n];
    let mut best = (0u64, T::zero());
    for mask in 1..1u64 << n {
        let d = worth_of_mask(g, mask, &mut active) - p.of_mask(mask);
        if d > best.1 {
            best = (mask, d);
        }
    }
    Ok(Witness {
        coalition: Coalition::from_mask(best.0),
        deficit: best.1,
    })
}

fn check_payoff_len<T: Scalar>(g: &GameInstance<T>, p: &PayoffVector<T>) -> Result<()> {
    if p.len() != g.agent_count() {
        return Err(Error::PayoffLength {
            expected: g.agent_count(),
            got: p.len(),
        });
    }
    Ok(())
}

/// Exhaustive core test over all `2^n` coalitions. The witness, if any, is
/// a maximum-deficit coalition.
pub fn check_core_bruteforce<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
    opts: CoreCheck,
) -> Result<CoreVerdict<T>> {
    enumeration_guard(g, opts.max_agents)?;
    check_payoff_len(g, p)?;
    if !opts.allow_profit_share && !is_imputation(g, p) {
        return Err(Error::NotAnImputation);
    }
    let best = max_deficit(g, p, opts.max_agents)?;
    Ok(if best.deficit.is_positive() {
        CoreVerdict::unstable(best.coalition, best.deficit)
    } else {
        CoreVerdict::stable()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;
    use crate::Rational;

    fn star_a<T: Scalar>() -> GameInstance<T> {
        GameInstance::builder()
            .u("u", 2)
            .v("v1", 1)
            .v("v2", 2)
            .edge("u", "v1", T::from_count(3))
            .edge("u", "v2", T::from_count(2))
            .build()
            .unwrap()
    }

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn worth_examples() {
        let g = star_a::<i64>();
        assert_eq!(worth(&g, &Coalition::empty()).unwrap(), 0);
        assert_eq!(worth(&g, &Coalition::new([1])).unwrap(), 0);
        assert_eq!(worth(&g, &Coalition::new([1, 2])).unwrap(), 0);
        assert_eq!(worth(&g, &Coalition::new([0, 2])).unwrap(), 4);
        assert_eq!(worth(&g, &Coalition::grand(&g)).unwrap(), 5);
        assert!(worth(&g, &Coalition::new([9])).is_err());
    }

    #[test]
    fn imputation_examples() {
        let g = star_a::<i64>();
        assert!(is_imputation(
            &g,
            &PayoffVector::new(&g, vec![3, 1, 1]).unwrap()
        ));
        assert!(!is_imputation(
            &g,
            &PayoffVector::new(&g, vec![4, 1, 1]).unwrap()
        ));
        let empty_game = GameInstance::<i64>::builder()
            .u("a", 1)
            .v("b", 1)
            .build()
            .unwrap();
        assert!(is_imputation(
            &empty_game,
            &PayoffVector::zeros(&empty_game)
        ));
    }

    #[test]
    fn marginal_examples() {
        let g = star_a::<i64>();
        assert_eq!(marginal_utility(&g, "v1").unwrap(), 1);
        assert_eq!(marginal_utility(&g, "v2").unwrap(), 2);
        assert_eq!(marginal_utility(&g, "u").unwrap(), 5);
        assert!(marginal_utility(&g, "nope").is_err());
        let lonely = GameInstance::<i64>::builder()
            .u("u", 1)
            .v("v", 1)
            .v("w", 1)
            .edge("u", "v", 2)
            .build()
            .unwrap();
        assert_eq!(marginal_utility(&lonely, "w").unwrap(), 0);
        assert_eq!(marginal_utilities(&g), [5, 1, 2]);
    }

    #[test]
    fn core_examples() {
        let g = star_a::<Rational>();
        let inside = PayoffVector::new(&g, vec![q("3"), q("1"), q("1")]).unwrap();
        assert_eq!(
            check_core_bruteforce(&g, &inside, CoreCheck::default()).unwrap(),
            CoreVerdict::stable()
        );
        assert_eq!(max_deficit(&g, &inside, 24).unwrap().deficit, q("0"));

        let outside = PayoffVector::new(&g, vec![q("5/2"), q("3/2"), q("1")]).unwrap();
        let verdict = check_core_bruteforce(&g, &outside, CoreCheck::default()).unwrap();
        assert!(!verdict.in_core);
        let w = verdict.witness.unwrap();
        assert_eq!(w.coalition.ids(&g), ["u", "v2"]);
        assert_eq!(w.deficit, q("1/2"));
    }

    #[test]
    fn profit_share_flag() {
        let g = star_a::<i64>();
        let rich = PayoffVector::new(&g, vec![100, 100, 100]).unwrap();
        assert_eq!(
            check_core_bruteforce(&g, &rich, CoreCheck::default()),
            Err(Error::NotAnImputation)
        );
        let opts = CoreCheck {
            allow_profit_share: true,
            ..CoreCheck::default()
        };
        assert!(check_core_bruteforce(&g, &rich, opts).unwrap().in_core);
        let best = max_deficit(&g, &rich, 24).unwrap();
        assert!(best.coalition.is_empty());
        assert_eq!(best.deficit, 0);
    }

    #[test]
    fn edgeless_game_is_always_stable() {
        let g = GameInstance::<i64>::builder()
            .u("a", 2)
            .v("b", 1)
            .v("c", 3)
            .build()
            .unwrap();
        let p = PayoffVector::new(&g, vec![0, 4, 1]).unwrap();
        let opts = CoreCheck {
            allow_profit_share: true,
            ..CoreCheck::default()
        };
        assert!(check_core_bruteforce(&g, &p, opts).unwrap().in_core);
    }

    #[test]
    fn guard() {
        let mut b = GameInstance::<i64>::builder();
        for i in 0..25 {
            b = b.u(format!("a{i}"), 1);
        }
        let g = b.build().unwrap();
        let p = PayoffVector::zeros(&g);
        assert!(matches!(
            max_deficit(&g, &p, 24),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn worth_table_matches_direct() {
        let g = star_a::<i64>();
        let table = coalition_worths(&g, 24).unwrap();
        assert_eq!(table, [0, 0, 0, 3, 0, 4, 0, 5]);
        let p = PayoffVector::new(&g, vec![2, 2, 1]).unwrap();
        let direct = max_deficit(&g, &p, 24).unwrap();
        let (mask, d) = max_deficit_from_worths(&table, &p);
        assert_eq!(Coalition::from_mask(mask), direct.coalition);
        assert_eq!(d, direct.deficit);
    }
}
