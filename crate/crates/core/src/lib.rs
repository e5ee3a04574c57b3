//! Exact toolkit for bipartite b-matching games where edges may be used
//! any number of times (transportation games).
//!
//! The worth of a coalition is the maximum weight of a b-matching on the
//! sub-graph it induces. The crate computes worths, decides core membership
//! (exhaustively on any graph, in polynomial time on stars), and builds and
//! checks the gadgets that embed 0-1 knapsack into core membership.
//!
//! All algorithms are generic over an exact [`Scalar`]; the aliases below
//! fix the arbitrary-precision rational used by the command-line tool.

pub mod error;
pub mod game;
pub mod instance;
pub mod knapsack;
pub mod reductions;
pub mod sample;
pub mod scalar;
pub mod solver;
pub mod star;

pub use error::{Error, Result};
pub use game::{
    check_core_bruteforce, coalition_worths, grand_worth, is_imputation, marginal_utilities,
    marginal_utility, max_deficit, worth, CoreCheck, CoreVerdict, Witness,
};
pub use instance::{
    parse_coalition, parse_instance, parse_payoff, serialize_coalition, serialize_instance,
    serialize_payoff, BMatching, Coalition, Edge, GameInstance, PayoffVector, Provenance,
    StarShape,
};
pub use knapsack::{solve_knapsack, Item, KnapsackInstance, KnapsackSolution};
pub use reductions::{
    knapsack_to_star, partner_duplication, partner_duplication_at, partner_level, partner_source,
    star_to_bipartite_gadget, strong_partner_level, verify_fully_matched_lemmas, verify_gadget,
    verify_partner_equivalence, Check, GadgetCheck, ReductionReport, Relation, NO_UNSTABLE_WITH_XY,
};
pub use scalar::Scalar;
pub use solver::{brute_force_matching, greedy_star_matching, max_weight_b_matching};
pub use star::{
    check_core_star, star_max_deficit_dp, star_unstable_coalition_dp, verify_diminishing_marginals,
};

/// Arbitrary-precision rational, always in lowest terms.
pub type Rational = num_rational::BigRational;

pub type Game = GameInstance<Rational>;
pub type Payoff = PayoffVector<Rational>;
pub type Matching = BMatching<Rational>;

/// Machine-integer variants for fast exhaustive work on integral data.
pub type IntGame = GameInstance<i64>;
pub type IntPayoff = PayoffVector<i64>;
