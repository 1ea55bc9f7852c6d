//! Bounded max-flow / min-cut primitives.
//!
//! Every use in this crate is parameterized: a flow is grown one augmenting
//! path at a time and abandoned as soon as `k + 1` units are routed, which is
//! all the separation finders ever need to know.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::graph::{pair, EdgePair, MultiGraph, VertexId};
use crate::rng::{derive_seed, SplitMix64};
use crate::Result;

/// Result of a bounded cut computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutResult<T> {
    /// A minimum cut of size at most the bound, together with the set of
    /// vertices reachable from the source once the cut is removed.
    Cut {
        cut: Vec<T>,
        size: u64,
        source_side: BTreeSet<VertexId>,
    },
    /// `k + 1` augmenting paths exist; no cut within the bound.
    ExceedsBound,
}

struct Arc {
    to: usize,
    cap: u64,
    flow: i64,
}

/// Arc-list max flow with BFS augmentation, bounded by a flow target.
struct BoundedFlow {
    arcs: Vec<Arc>,
    head: Vec<Vec<usize>>,
}

impl BoundedFlow {
    fn new(nodes: usize) -> Self {
        BoundedFlow {
            arcs: Vec::new(),
            head: vec![Vec::new(); nodes],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, flow: 0 });
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            flow: 0,
        });
        self.head[from].push(id);
        self.head[to].push(id + 1);
        id
    }

    fn residual(&self, arc: usize) -> u64 {
        (self.arcs[arc].cap as i64 - self.arcs[arc].flow) as u64
    }

    /// Routes flow until `limit` is reached or no augmenting path remains.
    fn run(&mut self, s: usize, t: usize, limit: u64) -> u64 {
        let mut total = 0u64;
        while total < limit {
            let mut parent: Vec<Option<usize>> = vec![None; self.head.len()];
            let mut queue = alloc::collections::VecDeque::new();
            queue.push_back(s);
            let mut seen = vec![false; self.head.len()];
            seen[s] = true;
            'bfs: while let Some(v) = queue.pop_front() {
                for &a in &self.head[v] {
                    let to = self.arcs[a].to;
                    if !seen[to] && self.residual(a) > 0 {
                        seen[to] = true;
                        parent[to] = Some(a);
                        if to == t {
                            break 'bfs;
                        }
                        queue.push_back(to);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            // bottleneck along the path, clipped so we never exceed `limit`
            let mut bottleneck = limit - total;
            let mut v = t;
            while v != s {
                let a = parent[v].unwrap();
                bottleneck = bottleneck.min(self.residual(a));
                v = self.arcs[a ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let a = parent[v].unwrap();
                self.arcs[a].flow += bottleneck as i64;
                self.arcs[a ^ 1].flow -= bottleneck as i64;
                v = self.arcs[a ^ 1].to;
            }
            total += bottleneck;
        }
        total
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = vec![s];
        while let Some(v) = queue.pop() {
            for &a in &self.head[v] {
                let to = self.arcs[a].to;
                if !seen[to] && self.residual(a) > 0 {
                    seen[to] = true;
                    queue.push(to);
                }
            }
        }
        seen
    }
}

/// Minimum edge cut between `u` and `v` if it has size at most `k`;
/// multiplicities act as parallel unit capacities.
pub fn min_edge_cut_bounded(
    g: &MultiGraph,
    u: VertexId,
    v: VertexId,
    k: u64,
) -> Result<CutResult<EdgePair>> {
    if u == v {
        return Err(invalid("min_edge_cut_bounded: identical endpoints"));
    }
    let ids = g.vertex_ids();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut net = BoundedFlow::new(ids.len());
    for (a, b, m) in g.edges_with_mult() {
        net.add(index[&a], index[&b], m as u64);
        net.add(index[&b], index[&a], m as u64);
    }
    let flow = net.run(index[&u], index[&v], k + 1);
    if flow > k {
        return Ok(CutResult::ExceedsBound);
    }
    let seen = net.reachable(index[&u]);
    let mut cut = Vec::new();
    let mut size = 0u64;
    let mut side = BTreeSet::new();
    for (i, &id) in ids.iter().enumerate() {
        if seen[i] {
            side.insert(id);
        }
    }
    for (a, b, m) in g.edges_with_mult() {
        if seen[index[&a]] != seen[index[&b]] {
            cut.push(pair(a, b));
            size += m as u64;
        }
    }
    debug_assert_eq!(size, flow);
    Ok(CutResult::Cut {
        cut,
        size,
        source_side: side,
    })
}

/// Minimum internal vertex cut between `u` and `v` avoiding `forbidden`, if
/// it has size at most `k`. Adjacent endpoints cannot be separated.
pub fn min_vertex_cut_bounded(
    g: &MultiGraph,
    u: VertexId,
    v: VertexId,
    k: u64,
    forbidden: &BTreeSet<VertexId>,
) -> Result<CutResult<VertexId>> {
    if u == v {
        return Err(invalid("min_vertex_cut_bounded: identical endpoints"));
    }
    if forbidden.contains(&u) || forbidden.contains(&v) {
        return Err(invalid("min_vertex_cut_bounded: endpoint in forbidden set"));
    }
    if g.has_edge(u, v) {
        return Ok(CutResult::ExceedsBound);
    }
    let inf = k + 2;
    let ids = g.vertex_ids();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    // node splitting: in = 2i, out = 2i + 1
    let mut net = BoundedFlow::new(2 * ids.len());
    for (i, &id) in ids.iter().enumerate() {
        let cap = if id == u || id == v || forbidden.contains(&id) {
            inf
        } else {
            1
        };
        net.add(2 * i, 2 * i + 1, cap);
    }
    for (a, b, _m) in g.edges_with_mult() {
        let (ia, ib) = (index[&a], index[&b]);
        net.add(2 * ia + 1, 2 * ib, inf);
        net.add(2 * ib + 1, 2 * ia, inf);
    }
    let flow = net.run(2 * index[&u], 2 * index[&v] + 1, k + 1);
    if flow > k {
        return Ok(CutResult::ExceedsBound);
    }
    let seen = net.reachable(2 * index[&u]);
    let mut cut = Vec::new();
    for (i, &id) in ids.iter().enumerate() {
        if seen[2 * i] && !seen[2 * i + 1] {
            cut.push(id);
        }
    }
    debug_assert_eq!(cut.len() as u64, flow);
    let mut side = BTreeSet::new();
    for (i, &id) in ids.iter().enumerate() {
        if seen[2 * i] {
            side.insert(id);
        }
    }
    side.retain(|x| !cut.contains(x));
    Ok(CutResult::Cut {
        cut,
        size: flow,
        source_side: side,
    })
}

/// Up to `want` paths from `sources` to `sinks` whose internal vertices are
/// pairwise disjoint and avoid `sources ∪ sinks`. Paths are returned as full
/// vertex sequences. Fewer than `want` paths are returned when no more exist.
pub fn vertex_disjoint_paths(
    g: &MultiGraph,
    sources: &BTreeSet<VertexId>,
    sinks: &BTreeSet<VertexId>,
    want: u64,
) -> Result<Vec<Vec<VertexId>>> {
    if sources.is_empty() || sinks.is_empty() {
        return Err(invalid("vertex_disjoint_paths: empty endpoint set"));
    }
    if !sources.is_disjoint(sinks) {
        return Err(invalid("vertex_disjoint_paths: endpoint sets overlap"));
    }
    let inf = want + 1;
    let ids = g.vertex_ids();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let n = ids.len();
    let (ss, tt) = (2 * n, 2 * n + 1);
    let mut net = BoundedFlow::new(2 * n + 2);
    let mut split_arc = vec![usize::MAX; n];
    for (i, &id) in ids.iter().enumerate() {
        let cap = if sources.contains(&id) || sinks.contains(&id) {
            inf
        } else {
            1
        };
        split_arc[i] = net.add(2 * i, 2 * i + 1, cap);
    }
    for (a, b, _m) in g.edges_with_mult() {
        let (ia, ib) = (index[&a], index[&b]);
        net.add(2 * ia + 1, 2 * ib, inf);
        net.add(2 * ib + 1, 2 * ia, inf);
    }
    for &s in sources {
        net.add(ss, 2 * index[&s], inf);
    }
    for &t in sinks {
        net.add(2 * index[&t] + 1, tt, inf);
    }
    let flow = net.run(ss, tt, want);

    // Decompose the integral flow into vertex sequences. Each step consumes
    // one unit, so the walk terminates and conservation keeps it on track.
    let mut paths = Vec::new();
    for _ in 0..flow {
        let mut node = ss;
        let mut verts: Vec<VertexId> = Vec::new();
        'walk: loop {
            for &a in &net.head[node] {
                if a % 2 == 0 && net.arcs[a].flow > 0 {
                    net.arcs[a].flow -= 1;
                    let to = net.arcs[a].to;
                    if to == tt {
                        break 'walk;
                    }
                    if to < 2 * n && to % 2 == 0 {
                        verts.push(ids[to / 2]);
                    }
                    node = to;
                    continue 'walk;
                }
            }
            // no outgoing flow: canceled cycle remnants; drop this attempt
            break;
        }
        if verts.len() >= 2 {
            paths.push(verts);
        }
    }
    Ok(paths)
}

/// True iff `v` has at least `bound` paths to distinct sink groups that are
/// internally vertex-disjoint, where each group may absorb one path. Used by
/// the equivalence-class reduction.
pub fn disjoint_paths_to_groups(
    g: &MultiGraph,
    v: VertexId,
    groups: &[BTreeSet<VertexId>],
    bound: u64,
) -> Result<bool> {
    let ids = g.vertex_ids();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let n = ids.len();
    let inf = bound + 1;
    // nodes: split vertices, one collector per group, super sink
    let gbase = 2 * n;
    let tt = gbase + groups.len();
    let mut net = BoundedFlow::new(tt + 1.max(1));
    for (i, &id) in ids.iter().enumerate() {
        let cap = if id == v { inf } else { 1 };
        net.add(2 * i, 2 * i + 1, cap);
    }
    for (a, b, _m) in g.edges_with_mult() {
        let (ia, ib) = (index[&a], index[&b]);
        net.add(2 * ia + 1, 2 * ib, inf);
        net.add(2 * ib + 1, 2 * ia, inf);
    }
    for (gi, group) in groups.iter().enumerate() {
        for &t in group {
            if let Some(&it) = index.get(&t) {
                net.add(2 * it + 1, gbase + gi, inf);
            }
        }
        // each group counts once
        net.add(gbase + gi, tt, 1);
    }
    let flow = net.run(2 * index[&v], tt, bound);
    Ok(flow >= bound)
}

/// Best cut over `trials` independent randomized contraction runs. Each run
/// contracts uniformly random edges (multiplicity-weighted) down to two
/// vertices. Never reports a value below the true minimum cut: the returned
/// edges always form an actual cut. A disconnected input yields `(0, [])`.
pub fn karger_min_cut(g: &MultiGraph, trials: u64, seed: u64) -> (u64, Vec<EdgePair>) {
    if g.vertex_count() < 2 || !g.is_connected() {
        return (0, Vec::new());
    }
    let ids = g.vertex_ids();
    let edges = g.edges_with_mult();
    // expand multiplicities so a uniform draw is multiplicity-weighted
    let mut copies: Vec<EdgePair> = Vec::new();
    for &(u, v, m) in &edges {
        for _ in 0..m {
            copies.push((u, v));
        }
    }
    // two vertices leave nothing to contract; one scan is the answer
    let trials = if ids.len() == 2 { 1 } else { trials };
    let mut best_size = u64::MAX;
    let mut best_cut: Vec<EdgePair> = Vec::new();
    for trial in 0..trials {
        let mut rng = SplitMix64::new(derive_seed(seed, "karger-trial", trial));
        let mut dsu = crate::graph::Dsu::new(ids.iter().copied());
        let mut pool = copies.clone();
        let mut active = ids.len();
        while active > 2 && !pool.is_empty() {
            let i = rng.below(pool.len() as u64) as usize;
            let (u, v) = pool.swap_remove(i);
            if dsu.union(u, v) {
                active -= 1;
            }
        }
        if active != 2 {
            continue;
        }
        let mut size = 0u64;
        let mut cut = Vec::new();
        for &(u, v, m) in &edges {
            if dsu.find(u) != dsu.find(v) {
                size += m as u64;
                cut.push((u, v));
            }
        }
        if size < best_size {
            best_size = size;
            best_cut = cut;
        }
    }
    if best_size == u64::MAX {
        (0, Vec::new())
    } else {
        (best_size, best_cut)
    }
}
