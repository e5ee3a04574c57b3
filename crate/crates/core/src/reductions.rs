//! Generators and exact verifiers for the three hardness gadgets:
//!
//! * knapsack to star: an unstable coalition exists iff the knapsack
//!   instance is a YES instance;
//! * star to bipartite: two extra vertices `x` and `y` turn the star profit
//!   share into an imputation of a larger graph with the same unstable
//!   coalitions;
//! * partner duplication: every vertex gets a partner on the other side and
//!   the uniform payoff `p*` is in the new core iff the old payoff was in
//!   the old core.
//!
//! Verifiers return a [`ReductionReport`] of named exact checks.

use std::fmt;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::game::{
    check_core_bruteforce, coalition_worths, grand_worth, is_imputation, worth, CoreCheck,
};
use crate::instance::{json_scalar, Coalition, GameInstance, PayoffVector, Provenance};
use crate::knapsack::KnapsackInstance;
use crate::scalar::{format_rational, Scalar};
use crate::solver::{max_weight_b_matching, solve_active};
use crate::Rational;

/// Default agent limit for the exhaustive parts of the verifiers.
pub const REDUCTION_MAX_AGENTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `actual == expected`
    Eq,
    /// `actual <= expected`
    Le,
    /// `actual < expected`
    Lt,
}

impl Relation {
    fn holds(self, actual: &Rational, expected: &Rational) -> bool {
        match self {
            Relation::Eq => actual == expected,
            Relation::Le => actual <= expected,
            Relation::Lt => actual < expected,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "==",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub expected: Rational,
    pub actual: Rational,
    pub pass: bool,
}

/// Named exact checks; passes iff every check does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub title: String,
    pub checks: Vec<Check>,
}

impl ReductionReport {
    pub fn new(title: impl Into<String>) -> Self {
        ReductionReport {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn check<T: Scalar>(
        &mut self,
        name: impl Into<String>,
        relation: Relation,
        actual: &T,
        expected: &T,
    ) -> bool {
        let (actual, expected) = (actual.to_rational(), expected.to_rational());
        let pass = relation.holds(&actual, &expected);
        self.checks.push(Check {
            name: name.into(),
            relation,
            expected,
            actual,
            pass,
        });
        pass
    }

    pub fn equal<T: Scalar>(&mut self, name: impl Into<String>, actual: &T, expected: &T) -> bool {
        self.check(name, Relation::Eq, actual, expected)
    }

    pub fn count(&mut self, name: impl Into<String>, actual: usize, expected: usize) -> bool {
        self.equal(name, &(actual as i64), &(expected as i64))
    }

    pub fn flag(&mut self, name: impl Into<String>, actual: bool, expected: bool) -> bool {
        self.equal(name, &i64::from(actual), &i64::from(expected))
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        let checks = self
            .checks
            .iter()
            .map(|c| {
                let mut o = Map::new();
                o.insert("name".into(), c.name.as_str().into());
                o.insert("relation".into(), c.relation.symbol().into());
                o.insert("expected".into(), json_scalar(&c.expected));
                o.insert("actual".into(), json_scalar(&c.actual));
                o.insert("pass".into(), c.pass.into());
                Value::Object(o)
            })
            .collect();
        let mut top = Map::new();
        top.insert("report".into(), self.title.as_str().into());
        top.insert("pass".into(), self.passed().into());
        top.insert("checks".into(), Value::Array(checks));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
        s.push('\n');
        s
    }
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "report: {}", self.title)?;
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: actual {} {} expected {}",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                format_rational(&c.actual),
                c.relation.symbol(),
                format_rational(&c.expected),
            )?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{}: {} checks, {} failed",
            if failed == 0 {
                "VERIFIED"
            } else {
                "VERIFICATION FAILED"
            },
            self.checks.len(),
            failed
        )
    }
}

fn guard<T: Scalar>(g: &GameInstance<T>, max_agents: usize) -> Result<()> {
    if g.agent_count() > max_agents {
        return Err(Error::guard(
            "agent count",
            g.agent_count() as u64,
            max_agents as u64,
        ));
    }
    Ok(())
}

fn fresh_id<T: Scalar>(g: &GameInstance<T>, base: &str, taken: &[String]) -> String {
    let mut id = base.to_string();
    while g.index_of(&id).is_some() || taken.contains(&id) {
        id.push('\'');
    }
    id
}

fn name_of<T: Scalar>(g: &GameInstance<T>, s: &Coalition) -> String {
    format!("{{{}}}", s.ids(g).join(","))
}

/// Star with center `u` (capacity `C`, payoff `A`) and one leaf `v_i` per
/// item with capacity `c_i`, weight `a_i + 1` and payoff `c_i(a_i+1) - a_i`.
pub fn knapsack_to_star<T: Scalar>(
    k: &KnapsackInstance,
) -> Result<(GameInstance<T>, PayoffVector<T>)> {
    k.validate()?;
    let mut builder = GameInstance::builder().u("u", k.capacity);
    let mut payoffs = vec![T::from_count(k.goal)];
    for (i, item) in k.items.iter().enumerate() {
        let leaf = format!("v{}", i + 1);
        let weight = T::from_count(item.value) + T::one();
        payoffs.push(weight.times(item.weight) - T::from_count(item.value));
        builder = builder.v(leaf.clone(), item.weight).edge("u", leaf, weight);
    }
    let g = builder
        .build()?
        .with_provenance(Provenance::KnapsackToStar {
            knapsack: k.clone(),
        });
    let p = PayoffVector::new(&g, payoffs)?;
    Ok((g, p))
}

/// Checks, on a knapsack-shaped star, that every center-containing
/// coalition whose leaves are all fully matched has deficit
/// `sum(a_i) - A`, that dropping a leaf that is not fully matched raises
/// the deficit by at least 1, and that a best coalition fully matches its
/// leaves. Item data is read back from the star: `a_i = w_i - 1`,
/// `c_i = b_i`, `A = p(u)`.
pub fn verify_fully_matched_lemmas<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
    max_agents: usize,
) -> Result<ReductionReport> {
    let star = g.star()?;
    guard(g, max_agents.min(crate::game::MASK_BITS))?;
    let n = star.leaf_count();
    let weight =
        |k: usize| star.leaf_edges[k].map_or_else(T::zero, |e| g.edges()[e].weight.clone());
    let value = |k: usize| weight(k) - T::one();
    let goal = p.get(star.center).clone();

    let mut report = ReductionReport::new("knapsack-to-star: fully matched leaves");
    for (k, &leaf) in star.leaves.iter().enumerate() {
        report.equal(
            format!("payoff of {} = c(a+1) - a", g.id(leaf)),
            p.get(leaf),
            &(weight(k).times(g.capacity(leaf)) - value(k)),
        );
    }

    let to_coalition = |mask: u64| {
        Coalition::new(
            (0..n)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| star.leaves[k])
                .chain(std::iter::once(star.center)),
        )
    };
    let deficits: Vec<T> = (0..1u64 << n)
        .map(|mask| {
            let s = to_coalition(mask);
            worth(g, &s).expect("valid coalition") - p.of(&s)
        })
        .collect();

    let mut active = vec![false; g.agent_count()];
    let mut best = (0u64, deficits[0].clone());
    let mut best_fully_matched = true;
    for mask in 0..1u64 << n {
        let s = to_coalition(mask);
        for (i, slot) in active.iter_mut().enumerate() {
            *slot = s.contains(i);
        }
        let m = solve_active(g, &active);
        let load = m.load(g);
        let short: Vec<usize> = (0..n)
            .filter(|k| mask >> k & 1 == 1 && load[star.leaves[*k]] < g.capacity(star.leaves[*k]))
            .collect();
        let deficit = &deficits[mask as usize];
        if *deficit > best.1 {
            best = (mask, deficit.clone());
            best_fully_matched = short.is_empty();
        }
        if short.is_empty() {
            let total: T = (0..n).filter(|k| mask >> k & 1 == 1).map(&value).sum();
            report.equal(
                format!("{}: deficit = sum(a) - A", name_of(g, &s)),
                deficit,
                &(total - goal.clone()),
            );
        } else {
            for k in short {
                report.check(
                    format!(
                        "{}: dropping unsaturated {} raises deficit by >= 1",
                        name_of(g, &s),
                        g.id(star.leaves[k])
                    ),
                    Relation::Le,
                    deficit,
                    &(deficits[(mask & !(1 << k)) as usize].clone() - T::one()),
                );
            }
        }
    }
    report.flag(
        format!(
            "best coalition {} fully matches its leaves",
            name_of(g, &to_coalition(best.0))
        ),
        best_fully_matched,
        true,
    );
    Ok(report)
}

/// Adds `x` (on the center's side, joined to every leaf with weight
/// `w_x = sum(p_i) + 1`) and `y` (on the leaves' side, joined to the center
/// with weight `w_y = p_u + 1`), with `b_x = sum(b_i)`, `b_y = b_u`,
/// `p_x = (b_x - 1) w_x + 1` and `p_y = (b_y - 1) w_y + 1`.
///
/// Every leaf weight must be below `p(G*) + 2 = w_x + w_y`, otherwise the
/// original star edges can beat the gadget edges and the extended payoff is
/// not an imputation. Computed payoffs must be nonnegative.
pub fn star_to_bipartite_gadget<T: Scalar>(
    g_star: &GameInstance<T>,
    p: &PayoffVector<T>,
) -> Result<(GameInstance<T>, PayoffVector<T>)> {
    let star = g_star.star()?;
    if star.leaf_count() == 0 {
        return Err(Error::NoLeaves);
    }
    if p.len() != g_star.agent_count() {
        return Err(Error::PayoffLength {
            expected: g_star.agent_count(),
            got: p.len(),
        });
    }
    let center = star.center;
    let leaf_payoff: T = star.leaves.iter().map(|&v| p.get(v).clone()).sum();
    let leaf_capacity: u64 = star.leaves.iter().map(|&v| g_star.capacity(v)).sum();
    let bound = p.total() + T::from_count(2);
    for (k, e) in star.leaf_edges.iter().enumerate() {
        if let Some(e) = e {
            let w = &g_star.edges()[*e].weight;
            if *w >= bound {
                return Err(Error::Precondition(format!(
                    "weight {w} of leaf `{}` is not below p(G*) + 2 = {bound}",
                    g_star.id(star.leaves[k])
                )));
            }
        }
    }

    let w_x = leaf_payoff + T::one();
    let w_y = p.get(center).clone() + T::one();
    let b_x = leaf_capacity;
    let b_y = g_star.capacity(center);
    let p_x = (T::from_count(b_x) - T::one()) * w_x.clone() + T::one();
    let p_y = (T::from_count(b_y) - T::one()) * w_y.clone() + T::one();
    for (name, value) in [("p_x", &p_x), ("p_y", &p_y)] {
        if value.is_negative() {
            return Err(Error::Precondition(format!("{name} = {value} is negative")));
        }
    }

    let x = fresh_id(g_star, "x", &[]);
    let x_payoff_id = x.clone();
    let y = fresh_id(g_star, "y", std::slice::from_ref(&x));
    let center_on_u = g_star.is_u_side(center);
    let mut u_side = g_star.u_side().to_vec();
    let mut v_side = g_star.v_side().to_vec();
    let mut capacities: Vec<u64> = g_star.capacities()[..u_side.len()].to_vec();
    let mut v_caps: Vec<u64> = g_star.capacities()[u_side.len()..].to_vec();
    if center_on_u {
        u_side.push(x.clone());
        capacities.push(b_x);
        v_side.push(y.clone());
        v_caps.push(b_y);
    } else {
        u_side.push(y.clone());
        capacities.push(b_y);
        v_side.push(x.clone());
        v_caps.push(b_x);
    }
    capacities.extend(v_caps);

    let orient = |a: &str, b: &str, w: T| {
        if center_on_u {
            (a.to_string(), b.to_string(), w)
        } else {
            (b.to_string(), a.to_string(), w)
        }
    };
    let mut edges: Vec<(String, String, T)> = g_star
        .edges()
        .iter()
        .map(|e| {
            (
                g_star.id(e.u).to_string(),
                g_star.id(e.v).to_string(),
                e.weight.clone(),
            )
        })
        .collect();
    for &leaf in &star.leaves {
        edges.push(orient(&x, g_star.id(leaf), w_x.clone()));
    }
    edges.push(orient(g_star.id(center), &y, w_y));

    let g = GameInstance::new(u_side, v_side, capacities, edges)?
        .with_provenance(Provenance::StarToBipartite { x, y });
    let payoffs = g
        .ids()
        .iter()
        .map(|id| match g_star.index_of(id) {
            Some(i) => p.get(i).clone(),
            None if *id == x_payoff_id => p_x.clone(),
            None => p_y.clone(),
        })
        .collect();
    let p = PayoffVector::new(&g, payoffs)?;
    Ok((g, p))
}

/// Name of the [`verify_gadget`] check that counts unstable coalitions
/// containing `x` or `y`. The literal statement does not always hold: when
/// the center already spends its capacity on a heavier leaf edge, adding
/// `y` to an unstable coalition keeps it unstable. A coalition of largest
/// deficit never needs `x` or `y`, which the other checks confirm.
pub const NO_UNSTABLE_WITH_XY: &str = "unstable coalitions containing x or y";

/// Options for [`verify_gadget`].
#[derive(Clone, Copy, Debug)]
pub struct GadgetCheck {
    /// Run the exhaustive coalition comparison.
    pub brute_force: bool,
    pub max_agents: usize,
}

impl Default for GadgetCheck {
    fn default() -> Self {
        GadgetCheck {
            brute_force: true,
            max_agents: REDUCTION_MAX_AGENTS,
        }
    }
}

/// Verifies a gadget built by [`star_to_bipartite_gadget`]: its parameters,
/// `p(G) = worth(G) = b_x w_x + b_y w_y`, the two tight sub-coalitions
/// `{u, y}` and `{x} + leaves`, that the optimal matching avoids the star
/// edges, and (optionally, by enumeration) that no unstable coalition
/// contains `x` or `y` and that the largest deficit is the star's.
pub fn verify_gadget<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
    opts: GadgetCheck,
) -> Result<ReductionReport> {
    let (x_id, y_id) = match g.provenance() {
        Some(Provenance::StarToBipartite { x, y }) => (x.clone(), y.clone()),
        _ => return Err(Error::MissingProvenance("star-to-bipartite")),
    };
    let (xi, yi) = (g.agent(&x_id)?, g.agent(&y_id)?);
    if p.len() != g.agent_count() {
        return Err(Error::PayoffLength {
            expected: g.agent_count(),
            got: p.len(),
        });
    }
    let star_members = Coalition::new((0..g.agent_count()).filter(|&i| i != xi && i != yi));
    let g_star = g.restrict(&star_members)?;
    let p_star = p.restrict(&star_members);
    let shape = g_star.star()?;
    let lift = |i: usize| star_members.members()[i];
    let center = lift(shape.center);
    let leaves: Vec<usize> = shape.leaves.iter().map(|&i| lift(i)).collect();

    let mut report = ReductionReport::new("star-to-bipartite gadget");
    let sum_p: T = leaves.iter().map(|&v| p.get(v).clone()).sum();
    let sum_b: u64 = leaves.iter().map(|&v| g.capacity(v)).sum();
    let b_u = g.capacity(center);
    let p_u = p.get(center).clone();
    let w_x = sum_p.clone() + T::one();
    let w_y = p_u.clone() + T::one();

    // Parameters.
    let x_edges: Vec<usize> = (0..g.edges().len())
        .filter(|&k| g.edges()[k].u == xi || g.edges()[k].v == xi)
        .collect();
    let y_edges: Vec<usize> = (0..g.edges().len())
        .filter(|&k| g.edges()[k].u == yi || g.edges()[k].v == yi)
        .collect();
    report.count("edges at x", x_edges.len(), leaves.len());
    report.count("edges at y", y_edges.len(), 1);
    for &v in &leaves {
        let w = g
            .edge_between(xi, v)
            .map_or_else(T::zero, |k| g.edges()[k].weight.clone());
        report.equal(format!("w(x,{}) = sum p_i + 1", g.id(v)), &w, &w_x);
    }
    let wy_actual = g
        .edge_between(yi, center)
        .map_or_else(T::zero, |k| g.edges()[k].weight.clone());
    report.equal("w(u,y) = p_u + 1", &wy_actual, &w_y);
    report.equal("b_x = sum b_i", &(g.capacity(xi) as i64), &(sum_b as i64));
    report.equal("b_y = b_u", &(g.capacity(yi) as i64), &(b_u as i64));
    let b_x = g.capacity(xi);
    let b_y = g.capacity(yi);
    report.equal(
        "p_x = (b_x - 1) w_x + 1",
        p.get(xi),
        &((T::from_count(b_x) - T::one()) * w_x.clone() + T::one()),
    );
    report.equal(
        "p_y = (b_y - 1) w_y + 1",
        p.get(yi),
        &((T::from_count(b_y) - T::one()) * w_y.clone() + T::one()),
    );

    // (1) p(G) = worth(G) = b_x w_x + b_y w_y.
    let target = w_x.times(b_x) + w_y.times(b_y);
    let m = max_weight_b_matching(g);
    report.equal("p(G) = b_x w_x + b_y w_y", &p.total(), &target);
    report.equal("worth(G) = b_x w_x + b_y w_y", &m.total_weight, &target);
    let star_edge_use: u64 = g
        .edges()
        .iter()
        .zip(&m.multiplicities)
        .filter(|(e, _)| e.u != xi && e.v != xi && e.u != yi && e.v != yi)
        .map(|(_, &k)| k)
        .sum();
    report.equal(
        "optimal matching uses no (u,v_i) edge",
        &(star_edge_use as i64),
        &0,
    );

    // (2) {u, y}.
    let uy = Coalition::new([center, yi]);
    let uy_target = p_u.times(b_u) + T::from_count(b_u);
    report.equal("p({u,y}) = b_u p_u + b_u", &p.of(&uy), &uy_target);
    report.equal("worth({u,y}) = b_u p_u + b_u", &worth(g, &uy)?, &uy_target);

    // (3) {x} + leaves.
    let xv = Coalition::new(leaves.iter().copied().chain([xi]));
    let xv_target = w_x.times(sum_b);
    report.equal("p({x}+V*) = (sum b_i)(sum p_i + 1)", &p.of(&xv), &xv_target);
    report.equal(
        "worth({x}+V*) = (sum b_i)(sum p_i + 1)",
        &worth(g, &xv)?,
        &xv_target,
    );

    // (4) exhaustive comparison with the star.
    if opts.brute_force {
        guard(g, opts.max_agents)?;
        let table = coalition_worths(g, opts.max_agents)?;
        let star_table = coalition_worths(&g_star, opts.max_agents)?;
        let star_bits = |mask: u64| -> Option<u64> {
            if mask >> xi & 1 == 1 || mask >> yi & 1 == 1 {
                return None;
            }
            let mut out = 0;
            for (k, &i) in star_members.members().iter().enumerate() {
                out |= (mask >> i & 1) << k;
            }
            Some(out)
        };
        let mut with_xy = 0usize;
        let mut mismatched = 0usize;
        let mut best = T::zero();
        let mut best_with_xy = T::zero();
        for (mask, w) in table.iter().enumerate() {
            let deficit = w.clone() - p.of_mask(mask as u64);
            let is_unstable = deficit.is_positive();
            match star_bits(mask as u64) {
                None => {
                    with_xy += usize::from(is_unstable);
                    best_with_xy = best_with_xy.max(deficit.clone());
                }
                Some(sm) => {
                    let star_unstable =
                        (star_table[sm as usize].clone() - p_star.of_mask(sm)).is_positive();
                    mismatched += usize::from(star_unstable != is_unstable);
                }
            }
            best = best.max(deficit);
        }
        let star_best = star_table
            .iter()
            .enumerate()
            .map(|(mask, w)| w.clone() - p_star.of_mask(mask as u64))
            .fold(T::zero(), |a, b| a.max(b));
        report.count(NO_UNSTABLE_WITH_XY, with_xy, 0);
        report.count(
            "coalitions of G* with a different verdict in G",
            mismatched,
            0,
        );
        report.check(
            "max deficit with x or y <= max deficit of G*",
            Relation::Le,
            &best_with_xy,
            &star_best,
        );
        report.equal("max deficit: G vs G*", &best, &star_best);
        report.flag(
            "G has an unstable coalition iff G* does",
            best.is_positive(),
            star_best.is_positive(),
        );
    }
    Ok(report)
}

/// Gives every vertex `v` a partner `v'` on the opposite side joined by an
/// edge of weight `2p* - p(v)`, where `p* = 1 + max(max p, max w)`. Original
/// capacities grow by one, partners get capacity 1, and every agent is paid
/// `p*`.
pub fn partner_duplication<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
) -> Result<(GameInstance<T>, PayoffVector<T>)> {
    partner_duplication_at(g, p, partner_level(g, p))
}

/// [`partner_duplication`] with an explicit level, which must be at least
/// [`partner_level`].
///
/// At the default level the verdicts can differ: a coalition may contain
/// an original without its partner and spend the spare unit of capacity on
/// an original edge. [`strong_partner_level`] rules that out.
pub fn partner_duplication_at<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
    p_star: T,
) -> Result<(GameInstance<T>, PayoffVector<T>)> {
    if !is_imputation(g, p) {
        return Err(Error::NotAnImputation);
    }
    let least = partner_level(g, p);
    if p_star < least {
        return Err(Error::Precondition(format!(
            "partner level {p_star} is below {least}"
        )));
    }
    let mut taken: Vec<String> = Vec::new();
    let partners: Vec<String> = g
        .ids()
        .iter()
        .map(|id| {
            let fresh = fresh_id(g, &format!("{id}'"), &taken);
            taken.push(fresh.clone());
            fresh
        })
        .collect();
    let n = g.agent_count();
    let u_orig: Vec<usize> = (0..n).filter(|&i| g.is_u_side(i)).collect();
    let v_orig: Vec<usize> = (0..n).filter(|&i| !g.is_u_side(i)).collect();

    let u_side: Vec<String> = u_orig
        .iter()
        .map(|&i| g.id(i).to_string())
        .chain(v_orig.iter().map(|&i| partners[i].clone()))
        .collect();
    let v_side: Vec<String> = v_orig
        .iter()
        .map(|&i| g.id(i).to_string())
        .chain(u_orig.iter().map(|&i| partners[i].clone()))
        .collect();
    let capacities: Vec<u64> = u_orig
        .iter()
        .map(|&i| g.capacity(i) + 1)
        .chain(v_orig.iter().map(|_| 1))
        .chain(v_orig.iter().map(|&i| g.capacity(i) + 1))
        .chain(u_orig.iter().map(|_| 1))
        .collect();
    let mut edges: Vec<(String, String, T)> = g
        .edges()
        .iter()
        .map(|e| {
            (
                g.id(e.u).to_string(),
                g.id(e.v).to_string(),
                e.weight.clone(),
            )
        })
        .collect();
    for (i, partner) in partners.iter().enumerate() {
        let w = p_star.times(2) - p.get(i).clone();
        if g.is_u_side(i) {
            edges.push((g.id(i).to_string(), partner.clone(), w));
        } else {
            edges.push((partner.clone(), g.id(i).to_string(), w));
        }
    }
    let pairs = g.ids().iter().cloned().zip(partners).collect();
    let g2 = GameInstance::new(u_side, v_side, capacities, edges)?.with_provenance(
        Provenance::PartnerDuplication {
            p_star: p_star.clone(),
            partners: pairs,
        },
    );
    let p2 = PayoffVector::new(&g2, vec![p_star; g2.agent_count()])?;
    Ok((g2, p2))
}

/// `1 + max(max payoff, max edge weight)`, with an empty max taken as 0.
pub fn partner_level<T: Scalar>(g: &GameInstance<T>, p: &PayoffVector<T>) -> T {
    let top = p
        .values()
        .iter()
        .chain(g.edges().iter().map(|e| &e.weight))
        .max()
        .cloned()
        .unwrap_or_else(T::zero);
    top.max(T::zero()) + T::one()
}

/// `1 + max payoff + max edge weight`. At this level adding a partner to a
/// coalition that holds its original never lowers the deficit, so the core
/// verdicts agree.
pub fn strong_partner_level<T: Scalar>(g: &GameInstance<T>, p: &PayoffVector<T>) -> T {
    let top = |it: &mut dyn Iterator<Item = &T>| it.max().cloned().unwrap_or_else(T::zero);
    let max_p = top(&mut p.values().iter());
    let max_w = top(&mut g.edges().iter().map(|e| &e.weight));
    max_p.max(T::zero()) + max_w.max(T::zero()) + T::one()
}

fn partner_map<T: Scalar>(g2: &GameInstance<T>) -> Result<(T, Vec<(usize, usize)>)> {
    match g2.provenance() {
        Some(Provenance::PartnerDuplication { p_star, partners }) => {
            let pairs = partners
                .iter()
                .map(|(a, b)| Ok((g2.agent(a)?, g2.agent(b)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((p_star.clone(), pairs))
        }
        _ => Err(Error::MissingProvenance("partner-duplication")),
    }
}

/// Rebuilds the source game and imputation from a duplicated instance:
/// originals keep their side with capacity `b' - 1`, and
/// `p(v) = 2p* - w'(v, v')`.
pub fn partner_source<T: Scalar>(
    g2: &GameInstance<T>,
) -> Result<(GameInstance<T>, PayoffVector<T>)> {
    let (p_star, pairs) = partner_map(g2)?;
    let originals = Coalition::new(pairs.iter().map(|&(o, _)| o));
    let mut u_side = Vec::new();
    let mut v_side = Vec::new();
    let mut u_caps = Vec::new();
    let mut v_caps = Vec::new();
    for i in originals.iter() {
        let cap = g2.capacity(i).checked_sub(1).ok_or_else(|| {
            Error::Precondition(format!("original `{}` has capacity 0", g2.id(i)))
        })?;
        if g2.is_u_side(i) {
            u_side.push(g2.id(i).to_string());
            u_caps.push(cap);
        } else {
            v_side.push(g2.id(i).to_string());
            v_caps.push(cap);
        }
    }
    u_caps.extend(v_caps);
    let edges = g2
        .edges()
        .iter()
        .filter(|e| originals.contains(e.u) && originals.contains(e.v))
        .map(|e| {
            (
                g2.id(e.u).to_string(),
                g2.id(e.v).to_string(),
                e.weight.clone(),
            )
        })
        .collect();
    let g = GameInstance::new(u_side, v_side, u_caps, edges)?;
    let pairs_by_id = pairs
        .iter()
        .map(|&(o, q)| {
            let k = g2
                .edge_between(o, q)
                .ok_or_else(|| Error::Precondition(format!("no partner edge at `{}`", g2.id(o))))?;
            Ok((
                g2.id(o).to_string(),
                p_star.times(2) - g2.edges()[k].weight.clone(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let p = PayoffVector::from_pairs(&g, pairs_by_id)?;
    Ok((g, p))
}

/// Checks that `(g2, p2)` built by [`partner_duplication`] from `(g, p)`
/// has the same core verdict, by enumeration on both games, together with
/// the supporting identities and both witness mappings.
pub fn verify_partner_equivalence<T: Scalar>(
    g: &GameInstance<T>,
    p: &PayoffVector<T>,
    g2: &GameInstance<T>,
    p2: &PayoffVector<T>,
    max_agents: usize,
) -> Result<ReductionReport> {
    guard(g2, max_agents)?;
    let (p_star, pairs) = partner_map(g2)?;
    let mut report = ReductionReport::new("partner duplication");
    if p.len() != g.agent_count() || p2.len() != g2.agent_count() {
        return Err(Error::PayoffLength {
            expected: g2.agent_count(),
            got: p2.len(),
        });
    }
    report.count("originals paired", pairs.len(), g.agent_count());
    report.count("agents in G'", g2.agent_count(), 2 * g.agent_count());
    report.check(
        "1 + max(max p, max w) <= p*",
        Relation::Le,
        &partner_level(g, p),
        &p_star,
    );
    let off_level = p2.values().iter().filter(|x| **x != p_star).count();
    report.count("agents of G' not paid p*", off_level, 0);

    // Original index in g -> (original, partner) indices in g2.
    let lifted: Vec<(usize, usize)> = (0..g.agent_count())
        .map(|i| {
            let o = g2.agent(g.id(i))?;
            pairs
                .iter()
                .find(|(a, _)| *a == o)
                .copied()
                .ok_or_else(|| Error::UnknownAgent(g.id(i).to_string()))
        })
        .collect::<Result<_>>()?;

    let mut not_heaviest = 0;
    for (i, &(o, q)) in lifted.iter().enumerate() {
        let partner_w = g2
            .edge_between(o, q)
            .map_or_else(T::zero, |k| g2.edges()[k].weight.clone());
        report.equal(
            format!("w'({},{}) = 2p* - p", g2.id(o), g2.id(q)),
            &partner_w,
            &(p_star.times(2) - p.get(i).clone()),
        );
        not_heaviest += g2
            .edges()
            .iter()
            .filter(|e| (e.u == o || e.v == o) && !(e.u == q || e.v == q))
            .filter(|e| e.weight >= partner_w)
            .count();
    }
    report.count(
        "original edges at least as heavy as a partner edge",
        not_heaviest,
        0,
    );

    let nu = grand_worth(g);
    let nu2 = grand_worth(g2);
    let bonus: T = (0..g.agent_count())
        .map(|i| p_star.times(2) - p.get(i).clone())
        .sum();
    report.equal(
        "worth(G') = worth(G) + sum(2p* - p_v)",
        &nu2,
        &(nu.clone() + bonus),
    );
    report.equal("p'(G') = worth(G')", &p2.total(), &nu2);
    report.flag("p' is an imputation", is_imputation(g2, p2), true);

    let opts = CoreCheck {
        allow_profit_share: false,
        max_agents,
    };
    let before = check_core_bruteforce(g, p, opts)?;
    let after = check_core_bruteforce(g2, p2, opts)?;
    report.flag(
        "p' in core of G' iff p in core of G",
        after.in_core,
        before.in_core,
    );

    if let (Some(w), Some(w2)) = (&before.witness, &after.witness) {
        let doubled = Coalition::new(w.coalition.iter().flat_map(|i| {
            let (o, q) = lifted[i];
            [o, q]
        }));
        let size = w.coalition.len() as u64;
        let expected = worth(g, &w.coalition)? + p_star.times(2 * size) - p.of(&w.coalition);
        let nu_doubled = worth(g2, &doubled)?;
        report.equal(
            format!(
                "worth'({}) = worth(S) + 2|S|p* - p(S)",
                name_of(g2, &doubled)
            ),
            &nu_doubled,
            &expected,
        );
        report.check(
            format!("p'({}) < worth'", name_of(g2, &doubled)),
            Relation::Lt,
            &p2.of(&doubled),
            &nu_doubled,
        );

        let projected =
            Coalition::new((0..g.agent_count()).filter(|&i| w2.coalition.contains(lifted[i].0)));
        report.check(
            format!(
                "originals {} of G' witness are unstable in G",
                name_of(g, &projected)
            ),
            Relation::Lt,
            &p.of(&projected),
            &worth(g, &projected)?,
        );
    }
    Ok(report)
}
