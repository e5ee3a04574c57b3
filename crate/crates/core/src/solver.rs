//! Maximum-weight b-matching on bipartite graphs (the transportation
//! problem), with a greedy solver for stars and an exhaustive oracle.
//!
//! The exact solver pushes flow through the network
//! `source -> u (cap b(u)) -> v (cap min(b(u), b(v)), gain w) -> sink (cap b(v))`
//! along maximum-gain residual paths until no path of strictly positive
//! gain remains. Each augmentation keeps the residual graph free of
//! positive-gain cycles, so a label-correcting longest-path search is exact.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::instance::{BMatching, GameInstance};
use crate::scalar::Scalar;

/// Limit on total u-side capacity for [`brute_force_matching`].
pub const BRUTE_FORCE_CAPACITY_LIMIT: u64 = 16;

const SOURCE: usize = 0;
const SINK: usize = 1;

struct Arc<T> {
    to: usize,
    cap: u64,
    gain: T,
}

struct Network<T> {
    arcs: Vec<Arc<T>>,
    adj: Vec<Vec<usize>>,
    scratch: Scratch<T>,
}

/// Per-search buffers, kept between augmentations.
struct Scratch<T> {
    dist: Vec<Option<T>>,
    pred: Vec<usize>,
    queued: Vec<bool>,
    relaxed: Vec<usize>,
    queue: VecDeque<usize>,
    path: Vec<usize>,
}

impl<T: Scalar> Network<T> {
    fn new(nodes: usize) -> Self {
        Network {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            scratch: Scratch {
                dist: vec![None; nodes],
                pred: vec![usize::MAX; nodes],
                queued: vec![false; nodes],
                relaxed: vec![0; nodes],
                queue: VecDeque::with_capacity(nodes),
                path: Vec::new(),
            },
        }
    }

    /// Adds `from -> to` and its reverse; returns the forward arc id. The
    /// partner of arc `a` is always `a ^ 1`.
    fn add(&mut self, from: usize, to: usize, cap: u64, gain: T) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            to,
            cap,
            gain: gain.clone(),
        });
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            gain: -gain,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Longest-gain path from source to sink in the residual graph. The
    /// arcs, ending at the sink, are left in `scratch.path`.
    fn best_path(&mut self) -> Option<T> {
        let n = self.adj.len();
        let Scratch {
            dist,
            pred,
            queued,
            relaxed,
            queue,
            path,
        } = &mut self.scratch;
        dist.iter_mut().for_each(|d| *d = None);
        relaxed.iter_mut().for_each(|r| *r = 0);
        dist[SOURCE] = Some(T::zero());
        queue.push_back(SOURCE);
        queued[SOURCE] = true;
        while let Some(x) = queue.pop_front() {
            queued[x] = false;
            let dx = dist[x].clone().expect("queued nodes are labelled");
            for &a in &self.adj[x] {
                let arc = &self.arcs[a];
                if arc.cap == 0 {
                    continue;
                }
                let cand = dx.clone() + arc.gain.clone();
                if dist[arc.to].as_ref().is_none_or(|d| cand > *d) {
                    dist[arc.to] = Some(cand);
                    pred[arc.to] = a;
                    relaxed[arc.to] += 1;
                    assert!(
                        relaxed[arc.to] <= n,
                        "positive-gain cycle in residual graph"
                    );
                    if !queued[arc.to] {
                        queued[arc.to] = true;
                        queue.push_back(arc.to);
                    }
                }
            }
        }
        let gain = dist[SINK].take()?;
        path.clear();
        let mut node = SINK;
        while node != SOURCE {
            let a = pred[node];
            path.push(a);
            node = self.arcs[a ^ 1].to;
        }
        Some(gain)
    }

    fn run(&mut self) {
        while let Some(gain) = self.best_path() {
            if !gain.is_positive() {
                break;
            }
            let path = &self.scratch.path;
            let push = path
                .iter()
                .map(|&a| self.arcs[a].cap)
                .min()
                .expect("paths are nonempty");
            for &a in path {
                self.arcs[a].cap -= push;
                self.arcs[a ^ 1].cap += push;
            }
        }
    }
}

/// Maximum-weight b-matching of the whole instance.
pub fn max_weight_b_matching<T: Scalar>(g: &GameInstance<T>) -> BMatching<T> {
    solve_active(g, &vec![true; g.agent_count()])
}

/// Maximum-weight b-matching of the sub-instance induced by the agents with
/// `active[i]`; multiplicities refer to `g`'s edge list.
pub(crate) fn solve_active<T: Scalar>(g: &GameInstance<T>, active: &[bool]) -> BMatching<T> {
    let n = g.agent_count();
    let mut node_of = vec![usize::MAX; n];
    let mut nodes = 2;
    for (i, slot) in node_of.iter_mut().enumerate() {
        if active[i] && g.capacity(i) > 0 {
            *slot = nodes;
            nodes += 1;
        }
    }
    let mut net = Network::new(nodes);
    for (i, &node) in node_of.iter().enumerate() {
        if node == usize::MAX {
            continue;
        }
        if g.is_u_side(i) {
            net.add(SOURCE, node, g.capacity(i), T::zero());
        } else {
            net.add(node, SINK, g.capacity(i), T::zero());
        }
    }
    // Zero-weight edges can never raise the value, so they are left out.
    let edge_arcs: Vec<Option<usize>> = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (node_of[e.u], node_of[e.v]);
            (a != usize::MAX && b != usize::MAX && e.weight.is_positive()).then(|| {
                let cap = g.capacity(e.u).min(g.capacity(e.v));
                net.add(a, b, cap, e.weight.clone())
            })
        })
        .collect();
    if edge_arcs.iter().any(Option::is_some) {
        net.run();
    }

    let multiplicities: Vec<u64> = edge_arcs
        .iter()
        .map(|a| a.map_or(0, |a| net.arcs[a ^ 1].cap))
        .collect();
    let total_weight = g
        .edges()
        .iter()
        .zip(&multiplicities)
        .filter(|(_, &m)| m > 0)
        .map(|(e, &m)| e.weight.times(m))
        .sum();
    BMatching {
        multiplicities,
        total_weight,
    }
}

/// Greedy matching on a star: leaf edges in nonincreasing weight order
/// (ties by leaf order), each taking as many copies as the leaf and the
/// remaining center capacity allow.
pub fn greedy_star_matching<T: Scalar>(g: &GameInstance<T>) -> Result<BMatching<T>> {
    let star = g.star()?;
    let mut order: Vec<(usize, usize)> = star
        .leaves
        .iter()
        .zip(&star.leaf_edges)
        .filter_map(|(&leaf, e)| e.map(|e| (leaf, e)))
        .collect();
    // Stable sort keeps leaf order among equal weights.
    order.sort_by(|a, b| g.edges()[b.1].weight.cmp(&g.edges()[a.1].weight));

    let mut matching = BMatching::empty(g);
    let mut remaining = g.capacity(star.center);
    for (leaf, e) in order {
        let w = &g.edges()[e].weight;
        if remaining == 0 || !w.is_positive() {
            break;
        }
        let take = g.capacity(leaf).min(remaining);
        matching.multiplicities[e] = take;
        matching.total_weight += w.times(take);
        remaining -= take;
    }
    Ok(matching)
}

/// Exhaustive search over all integral multiplicity assignments. Only for
/// tiny instances: total u-side capacity must be at most
/// [`BRUTE_FORCE_CAPACITY_LIMIT`].
pub fn brute_force_matching<T: Scalar>(g: &GameInstance<T>) -> Result<BMatching<T>> {
    let u_capacity: u64 = (0..g.agent_count())
        .filter(|&i| g.is_u_side(i))
        .map(|i| g.capacity(i))
        .sum();
    if u_capacity > BRUTE_FORCE_CAPACITY_LIMIT {
        return Err(Error::guard(
            "total u-side capacity",
            u_capacity,
            BRUTE_FORCE_CAPACITY_LIMIT,
        ));
    }

    struct Search<'a, T> {
        g: &'a GameInstance<T>,
        remaining: Vec<u64>,
        current: Vec<u64>,
        best: BMatching<T>,
    }

    impl<T: Scalar> Search<'_, T> {
        fn go(&mut self, k: usize, value: T) {
            let edges = self.g.edges();
            if k == edges.len() {
                if value > self.best.total_weight {
                    self.best.total_weight = value;
                    self.best.multiplicities.clone_from(&self.current);
                }
                return;
            }
            let e = &edges[k];
            let most = self.remaining[e.u].min(self.remaining[e.v]);
            for m in 0..=most {
                self.remaining[e.u] -= m;
                self.remaining[e.v] -= m;
                self.current[k] = m;
                self.go(k + 1, value.clone() + e.weight.times(m));
                self.remaining[e.u] += m;
                self.remaining[e.v] += m;
            }
            self.current[k] = 0;
        }
    }

    let mut search = Search {
        g,
        remaining: g.capacities().to_vec(),
        current: vec![0; g.edges().len()],
        best: BMatching::empty(g),
    };
    search.go(0, T::zero());
    Ok(search.best)
}
