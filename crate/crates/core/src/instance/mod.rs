//! Game instances, coalitions, payoff vectors and b-matchings.
//!
//! Agents are addressed by index. The agent order is the `u_side` ids in
//! input order followed by the `v_side` ids in input order; coalition
//! bitmasks use the same order (bit `i` is agent `i`).

mod io;

pub(crate) use io::{json_number, json_scalar, read_u64};
pub use io::{
    parse_coalition, parse_instance, parse_payoff, serialize_coalition, serialize_instance,
    serialize_payoff,
};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::knapsack::KnapsackInstance;
use crate::scalar::Scalar;

/// Edge between agent `u` (on the u side) and agent `v` (on the v side).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub weight: T,
}

/// Record of how a generated instance was built, so verifiers can
/// recompute what they expect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance<T> {
    /// Star built from a knapsack instance.
    KnapsackToStar { knapsack: KnapsackInstance },
    /// Star extended by the x/y gadget; the star is everything but `x` and `y`.
    StarToBipartite { x: String, y: String },
    /// Every original vertex paired with a partner on the opposite side.
    PartnerDuplication {
        p_star: T,
        partners: Vec<(String, String)>,
    },
}

/// A weighted bipartite graph with vertex capacities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameInstance<T> {
    ids: Vec<String>,
    u_count: usize,
    capacities: Vec<u64>,
    edges: Vec<Edge<T>>,
    index: HashMap<String, usize>,
    provenance: Option<Provenance<T>>,
}

impl<T: Scalar> GameInstance<T> {
    /// Builds and validates an instance. `capacities` is in agent order.
    pub fn new(
        u_side: Vec<String>,
        v_side: Vec<String>,
        capacities: Vec<u64>,
        edges: Vec<(String, String, T)>,
    ) -> Result<Self> {
        let u_count = u_side.len();
        let ids: Vec<String> = u_side.into_iter().chain(v_side).collect();
        if capacities.len() != ids.len() {
            return Err(Error::format(
                "capacities",
                format!("{} capacities for {} vertices", capacities.len(), ids.len()),
            ));
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                let side = if i < u_count { "u_side" } else { "v_side" };
                return Err(Error::format(
                    format!("{side}[{}]", if i < u_count { i } else { i - u_count }),
                    format!("duplicate vertex id `{id}`"),
                ));
            }
        }
        let mut seen = HashMap::with_capacity(edges.len());
        let mut checked = Vec::with_capacity(edges.len());
        for (k, (u, v, weight)) in edges.into_iter().enumerate() {
            let loc = format!("edges[{k}]");
            let ui = *index
                .get(&u)
                .ok_or_else(|| Error::format(&loc, format!("unknown vertex `{u}`")))?;
            let vi = *index
                .get(&v)
                .ok_or_else(|| Error::format(&loc, format!("unknown vertex `{v}`")))?;
            if ui >= u_count || vi < u_count {
                return Err(Error::format(
                    &loc,
                    format!("edge ({u}, {v}) does not join u_side to v_side"),
                ));
            }
            if weight.is_negative() {
                return Err(Error::format(&loc, format!("negative weight {weight}")));
            }
            if let Some(first) = seen.insert((ui, vi), k) {
                return Err(Error::format(
                    &loc,
                    format!("duplicate edge ({u}, {v}), first listed as edges[{first}]"),
                ));
            }
            checked.push(Edge {
                u: ui,
                v: vi,
                weight,
            });
        }
        Ok(GameInstance {
            ids,
            u_count,
            capacities,
            edges: checked,
            index,
            provenance: None,
        })
    }

    pub fn builder() -> InstanceBuilder<T> {
        InstanceBuilder::default()
    }

    pub fn empty() -> Self {
        Self::new(vec![], vec![], vec![], vec![]).expect("empty instance is valid")
    }

    pub fn with_provenance(mut self, provenance: Provenance<T>) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn provenance(&self) -> Option<&Provenance<T>> {
        self.provenance.as_ref()
    }

    pub fn agent_count(&self) -> usize {
        self.ids.len()
    }

    pub fn u_side(&self) -> &[String] {
        &self.ids[..self.u_count]
    }

    pub fn v_side(&self) -> &[String] {
        &self.ids[self.u_count..]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, agent: usize) -> &str {
        &self.ids[agent]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn agent(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownAgent(id.to_string()))
    }

    pub fn is_u_side(&self, agent: usize) -> bool {
        agent < self.u_count
    }

    pub fn capacity(&self, agent: usize) -> u64 {
        self.capacities[agent]
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacities
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges.iter().position(|e| e.u == u && e.v == v)
    }

    /// The sub-instance induced by `s`; capacities are inherited and the
    /// relative order of vertices and edges is kept.
    pub fn restrict(&self, s: &Coalition) -> Result<Self> {
        self.check_coalition(s)?;
        let keep = s.indicator(self.agent_count());
        let u_side = self.ids[..self.u_count]
            .iter()
            .enumerate()
            .filter(|(i, _)| keep[*i])
            .map(|(_, id)| id.clone())
            .collect();
        let v_side = self.ids[self.u_count..]
            .iter()
            .enumerate()
            .filter(|(i, _)| keep[self.u_count + i])
            .map(|(_, id)| id.clone())
            .collect();
        let capacities = s.iter().map(|i| self.capacities[i]).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.u] && keep[e.v])
            .map(|e| {
                (
                    self.ids[e.u].clone(),
                    self.ids[e.v].clone(),
                    e.weight.clone(),
                )
            })
            .collect();
        Self::new(u_side, v_side, capacities, edges)
    }

    pub(crate) fn check_coalition(&self, s: &Coalition) -> Result<()> {
        match s.iter().find(|&i| i >= self.agent_count()) {
            Some(i) => Err(Error::UnknownAgent(format!("#{i}"))),
            None => Ok(()),
        }
    }

    /// Same instance with every value converted to another scalar type.
    pub fn convert<B: Scalar>(&self) -> Result<GameInstance<B>> {
        let conv = |x: &T| {
            crate::scalar::convert::<T, B>(x).ok_or_else(|| Error::Unrepresentable(x.to_string()))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    u: e.u,
                    v: e.v,
                    weight: conv(&e.weight)?,
                })
            })
            .collect::<Result<_>>()?;
        let provenance = match &self.provenance {
            None => None,
            Some(Provenance::KnapsackToStar { knapsack }) => Some(Provenance::KnapsackToStar {
                knapsack: knapsack.clone(),
            }),
            Some(Provenance::StarToBipartite { x, y }) => Some(Provenance::StarToBipartite {
                x: x.clone(),
                y: y.clone(),
            }),
            Some(Provenance::PartnerDuplication { p_star, partners }) => {
                Some(Provenance::PartnerDuplication {
                    p_star: conv(p_star)?,
                    partners: partners.clone(),
                })
            }
        };
        Ok(GameInstance {
            ids: self.ids.clone(),
            u_count: self.u_count,
            capacities: self.capacities.clone(),
            edges,
            index: self.index.clone(),
            provenance,
        })
    }
}

/// Center and leaves of a star: a bipartite graph whose u side (or, failing
/// that, v side) is a single vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarShape {
    pub center: usize,
    /// Leaves in agent order.
    pub leaves: Vec<usize>,
    /// Edge joining each leaf to the center, if any.
    pub leaf_edges: Vec<Option<usize>>,
}

impl StarShape {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }
}

impl<T: Scalar> GameInstance<T> {
    pub fn star(&self) -> Result<StarShape> {
        let n = self.agent_count();
        let (center, leaves): (usize, Vec<usize>) = if self.u_count == 1 {
            (0, (1..n).collect())
        } else if n - self.u_count == 1 {
            (n - 1, (0..n - 1).collect())
        } else {
            return Err(Error::NotAStar);
        };
        let mut leaf_edges = vec![None; leaves.len()];
        for (k, e) in self.edges.iter().enumerate() {
            let leaf = if e.u == center { e.v } else { e.u };
            let pos = leaves
                .binary_search(&leaf)
                .expect("every edge of a star touches the center");
            leaf_edges[pos] = Some(k);
        }
        Ok(StarShape {
            center,
            leaves,
            leaf_edges,
        })
    }

    pub fn is_star(&self) -> bool {
        self.star().is_ok()
    }
}

/// Incremental construction, mostly for tests and generators.
#[derive(Clone, Debug)]
pub struct InstanceBuilder<T> {
    u_side: Vec<(String, u64)>,
    v_side: Vec<(String, u64)>,
    edges: Vec<(String, String, T)>,
}

impl<T> Default for InstanceBuilder<T> {
    fn default() -> Self {
        InstanceBuilder {
            u_side: Vec::new(),
            v_side: Vec::new(),
            edges: Vec::new(),
        }
    }
}

impl<T: Scalar> InstanceBuilder<T> {
    pub fn u(mut self, id: impl Into<String>, capacity: u64) -> Self {
        self.u_side.push((id.into(), capacity));
        self
    }

    pub fn v(mut self, id: impl Into<String>, capacity: u64) -> Self {
        self.v_side.push((id.into(), capacity));
        self
    }

    pub fn edge(mut self, u: impl Into<String>, v: impl Into<String>, weight: T) -> Self {
        self.edges.push((u.into(), v.into(), weight));
        self
    }

    pub fn build(self) -> Result<GameInstance<T>> {
        let (u_side, mut caps): (Vec<_>, Vec<_>) = self.u_side.into_iter().unzip();
        let (v_side, v_caps): (Vec<_>, Vec<_>) = self.v_side.into_iter().unzip();
        caps.extend(v_caps);
        GameInstance::new(u_side, v_side, caps, self.edges)
    }
}

/// A set of agents of some instance, stored as sorted agent indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    members: Vec<usize>,
}

impl Coalition {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Coalition { members }
    }

    pub fn empty() -> Self {
        Coalition::default()
    }

    pub fn grand<T: Scalar>(g: &GameInstance<T>) -> Self {
        Coalition {
            members: (0..g.agent_count()).collect(),
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        Coalition {
            members: (0..64).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn from_ids<T: Scalar, S: AsRef<str>>(g: &GameInstance<T>, ids: &[S]) -> Result<Self> {
        let members = ids
            .iter()
            .map(|id| g.agent(id.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Coalition::new(members))
    }

    /// Bitmask form; `None` if some member index is 64 or above.
    pub fn mask(&self) -> Option<u64> {
        self.members
            .iter()
            .try_fold(0u64, |m, &i| (i < 64).then(|| m | 1 << i))
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.members.binary_search(&agent).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn with(&self, agent: usize) -> Self {
        Coalition::new(self.iter().chain(std::iter::once(agent)))
    }

    pub fn without(&self, agent: usize) -> Self {
        Coalition {
            members: self.iter().filter(|&i| i != agent).collect(),
        }
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub(crate) fn indicator(&self, n: usize) -> Vec<bool> {
        let mut keep = vec![false; n];
        for i in self.iter().filter(|&i| i < n) {
            keep[i] = true;
        }
        keep
    }

    /// Member ids in agent order.
    pub fn ids<'a, T: Scalar>(&self, g: &'a GameInstance<T>) -> Vec<&'a str> {
        self.iter().map(|i| g.id(i)).collect()
    }

    /// Member ids sorted lexicographically, for printing.
    pub fn sorted_ids<T: Scalar>(&self, g: &GameInstance<T>) -> Vec<String> {
        let mut ids: Vec<String> = self.iter().map(|i| g.id(i).to_string()).collect();
        ids.sort();
        ids
    }
}

/// Nonnegative payoff per agent, in agent order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PayoffVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> PayoffVector<T> {
    pub fn new(g: &GameInstance<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != g.agent_count() {
            return Err(Error::PayoffLength {
                expected: g.agent_count(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|x| x.is_negative()) {
            return Err(Error::NegativePayoff(g.id(i).to_string()));
        }
        Ok(PayoffVector { values })
    }

    /// Builds from `(id, payoff)` pairs covering every agent exactly once.
    pub fn from_pairs<S: AsRef<str>>(
        g: &GameInstance<T>,
        pairs: impl IntoIterator<Item = (S, T)>,
    ) -> Result<Self> {
        let mut slots: Vec<Option<T>> = vec![None; g.agent_count()];
        for (id, x) in pairs {
            let i = g.agent(id.as_ref())?;
            if slots[i].replace(x).is_some() {
                return Err(Error::format(id.as_ref(), "payoff given twice"));
            }
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| Error::format(g.id(i), "missing payoff")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, values)
    }

    pub fn zeros(g: &GameInstance<T>) -> Self {
        PayoffVector {
            values: vec![T::zero(); g.agent_count()],
        }
    }

    pub fn get(&self, agent: usize) -> &T {
        &self.values[agent]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> T {
        self.values.iter().cloned().sum()
    }

    /// p(S).
    pub fn of(&self, s: &Coalition) -> T {
        s.iter().map(|i| self.values[i].clone()).sum()
    }

    /// p(S) for a bitmask coalition.
    pub fn of_mask(&self, mask: u64) -> T {
        let mut total = T::zero();
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            total += self.values[i].clone();
            m &= m - 1;
        }
        total
    }

    pub fn restrict(&self, s: &Coalition) -> Self {
        PayoffVector {
            values: s.iter().map(|i| self.values[i].clone()).collect(),
        }
    }

    pub fn convert<B: Scalar>(&self) -> Result<PayoffVector<B>> {
        let values = self
            .values
            .iter()
            .map(|x| {
                crate::scalar::convert::<T, B>(x)
                    .ok_or_else(|| Error::Unrepresentable(x.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(PayoffVector { values })
    }
}

/// Edge multiplicities (parallel to the instance's edge list) and their
/// total weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BMatching<T> {
    pub multiplicities: Vec<u64>,
    pub total_weight: T,
}

impl<T: Scalar> BMatching<T> {
    pub fn empty(g: &GameInstance<T>) -> Self {
        BMatching {
            multiplicities: vec![0; g.edges().len()],
            total_weight: T::zero(),
        }
    }

    /// Number of matched copies at each agent.
    pub fn load(&self, g: &GameInstance<T>) -> Vec<u64> {
        let mut load = vec![0u64; g.agent_count()];
        for (e, &m) in g.edges().iter().zip(&self.multiplicities) {
            load[e.u] += m;
            load[e.v] += m;
        }
        load
    }

    /// Checks capacities and that `total_weight` is the exact weighted sum.
    pub fn check(&self, g: &GameInstance<T>) -> Result<()> {
        if self.multiplicities.len() != g.edges().len() {
            return Err(Error::InfeasibleMatching(format!(
                "{} multiplicities for {} edges",
                self.multiplicities.len(),
                g.edges().len()
            )));
        }
        for (i, load) in self.load(g).into_iter().enumerate() {
            if load > g.capacity(i) {
                return Err(Error::InfeasibleMatching(format!(
                    "vertex `{}` used {load} times, capacity {}",
                    g.id(i),
                    g.capacity(i)
                )));
            }
        }
        let weight: T = g
            .edges()
            .iter()
            .zip(&self.multiplicities)
            .map(|(e, &m)| e.weight.times(m))
            .sum();
        if weight != self.total_weight {
            return Err(Error::InfeasibleMatching(format!(
                "total weight {} but edges sum to {weight}",
                self.total_weight
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_a() -> GameInstance<i64> {
        GameInstance::builder()
            .u("u", 2)
            .v("v1", 1)
            .v("v2", 2)
            .edge("u", "v1", 3)
            .edge("u", "v2", 2)
            .build()
            .unwrap()
    }

    #[test]
    fn agent_order_is_u_then_v() {
        let g = star_a();
        assert_eq!(g.ids(), ["u", "v1", "v2"]);
        assert!(g.is_u_side(0) && !g.is_u_side(1));
        assert_eq!(g.capacity(2), 2);
    }

    #[test]
    fn rejects_bad_edges() {
        let dup = GameInstance::<i64>::builder()
            .u("u", 1)
            .v("v", 1)
            .edge("u", "v", 1)
            .edge("u", "v", 2)
            .build();
        assert!(matches!(dup, Err(Error::Format { ref location, .. }) if location == "edges[1]"));

        let flipped = GameInstance::<i64>::builder()
            .u("u", 1)
            .v("v", 1)
            .edge("v", "u", 1)
            .build();
        assert!(matches!(flipped, Err(Error::Format { .. })));

        let same_side = GameInstance::<i64>::builder()
            .u("a", 1)
            .u("b", 1)
            .edge("a", "b", 1)
            .build();
        assert!(same_side.is_err());

        let negative = GameInstance::<i64>::builder()
            .u("u", 1)
            .v("v", 1)
            .edge("u", "v", -1)
            .build();
        assert!(negative.is_err());

        let dup_id = GameInstance::<i64>::builder().u("a", 1).v("a", 1).build();
        assert!(dup_id.is_err());
    }

    #[test]
    fn restrict_identity_empty_and_induced() {
        let g = star_a();
        assert_eq!(g.restrict(&Coalition::grand(&g)).unwrap(), g);
        let empty = g.restrict(&Coalition::empty()).unwrap();
        assert_eq!(empty, GameInstance::empty());

        let s = Coalition::from_ids(&g, &["u", "v2"]).unwrap();
        let h = g.restrict(&s).unwrap();
        assert_eq!(h.ids(), ["u", "v2"]);
        assert_eq!(h.edges().len(), 1);
        assert_eq!(h.edges()[0].weight, 2);
        assert_eq!(h.capacities(), [2, 2]);

        assert!(matches!(
            g.restrict(&Coalition::new([7])),
            Err(Error::UnknownAgent(_))
        ));
    }

    #[test]
    fn star_detection() {
        let g = star_a();
        let star = g.star().unwrap();
        assert_eq!(star.center, 0);
        assert_eq!(star.leaves, [1, 2]);
        assert_eq!(star.leaf_edges, [Some(0), Some(1)]);

        let flipped = GameInstance::<i64>::builder()
            .u("a", 1)
            .u("b", 1)
            .v("c", 2)
            .edge("b", "c", 1)
            .build()
            .unwrap();
        let star = flipped.star().unwrap();
        assert_eq!(star.center, 2);
        assert_eq!(star.leaf_edges, [None, Some(0)]);

        let square = GameInstance::<i64>::builder()
            .u("a", 1)
            .u("b", 1)
            .v("c", 1)
            .v("d", 1)
            .build()
            .unwrap();
        assert_eq!(square.star(), Err(Error::NotAStar));
        assert!(!GameInstance::<i64>::empty().is_star());
    }

    #[test]
    fn coalition_masks() {
        let c = Coalition::from_mask(0b101);
        assert_eq!(c.members(), [0, 2]);
        assert_eq!(c.mask(), Some(0b101));
        assert_eq!(c.with(1).mask(), Some(0b111));
        assert_eq!(c.without(0).mask(), Some(0b100));
        assert_eq!(Coalition::new([70]).mask(), None);
    }

    #[test]
    fn payoffs_validate() {
        let g = star_a();
        assert!(PayoffVector::new(&g, vec![1, 2]).is_err());
        assert_eq!(
            PayoffVector::new(&g, vec![1, -2, 0]),
            Err(Error::NegativePayoff("v1".into()))
        );
        let p = PayoffVector::from_pairs(&g, [("v2", 1), ("u", 3), ("v1", 1)]).unwrap();
        assert_eq!(p.values(), [3, 1, 1]);
        assert_eq!(p.total(), 5);
        assert_eq!(p.of_mask(0b101), 4);
        assert!(PayoffVector::from_pairs(&g, [("u", 3), ("v1", 1)]).is_err());
    }

    #[test]
    fn matching_checker() {
        let g = star_a();
        let ok = BMatching {
            multiplicities: vec![1, 1],
            total_weight: 5,
        };
        ok.check(&g).unwrap();
        let over = BMatching {
            multiplicities: vec![1, 2],
            total_weight: 7,
        };
        assert!(over.check(&g).is_err());
        let wrong_total = BMatching {
            multiplicities: vec![1, 1],
            total_weight: 6,
        };
        assert!(wrong_total.check(&g).is_err());
    }
}
