//! Exact Steiner Cut solver.
//!
//! Given a multigraph with terminals, find at most `k` edges whose removal
//! leaves at least `s` components containing a terminal. The solver works on
//! a bordered generalization: the graph carries up to `2k` border terminals,
//! and for every behavior on them (how they are grouped, which groups see a
//! terminal, and how many terminal components there are in total) an optimal
//! cutset is produced. Recursive understanding peels off one side of a good
//! edge separation, solves it for all behaviors, and contracts everything no
//! recorded solution uses; when no separation remains the high-connectivity
//! phase branches over a covering family, condenses the graph around a core
//! vertex and finishes with a knapsack-style dynamic program over the
//! components hanging off the core.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{contract, invalid};
use crate::graph::{pair, tags, ContractionMap, EdgePair, MultiGraph, VertexId};
use crate::report::{Answer, Provenance, SolutionBody, SolutionReport, SolveConfig, Stats};
use crate::separation::{
    find_good_edge_separation, find_good_edge_separation_randomized, GoodEdgeSeparation,
};
use crate::Result;

/// A Steiner Cut instance: delete at most `budget` edges so that at least
/// `parts` components of the result contain a terminal.
#[derive(Debug, Clone)]
pub struct SteinerInstance {
    pub graph: MultiGraph,
    pub terminals: BTreeSet<VertexId>,
    pub parts: u32,
    pub budget: u64,
}

/// Bordered instance solved recursively for all behaviors.
#[derive(Debug, Clone)]
pub struct BorderInstance {
    pub graph: MultiGraph,
    pub terminals: BTreeSet<VertexId>,
    pub budget: u64,
    /// Sorted border terminals, at most `2k` of them.
    pub border: Vec<VertexId>,
}

/// Canonical behavior on border terminals: a partition encoded as a
/// restricted-growth string over the sorted border, a per-class flag for
/// "this group shares a component with a terminal", and the total number of
/// terminal components.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Behavior {
    pub classes: Vec<u8>,
    pub class_has_terminal: Vec<bool>,
    pub parts: u32,
}

/// An edge-deletion solution: canonical pairs plus their multiplicity cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cutset {
    pub pairs: Vec<EdgePair>,
    pub cost: u64,
}

impl Cutset {
    pub fn empty() -> Self {
        Cutset {
            pairs: Vec::new(),
            cost: 0,
        }
    }

    fn better_than(&self, other: &Cutset) -> bool {
        self.cost < other.cost || (self.cost == other.cost && self.pairs < other.pairs)
    }
}

pub type BehaviorMap = BTreeMap<Behavior, Cutset>;

/// Theoretical recursion threshold `q = k (2k)^{2k} 2^{2k} (k+2) + 1`.
pub fn theoretical_q(k: u64) -> u64 {
    let two_k = 2u64.saturating_mul(k);
    let mut p: u64 = 1;
    for _ in 0..two_k {
        p = p.saturating_mul(two_k).saturating_mul(2);
    }
    k.saturating_mul(p).saturating_mul(k + 2).saturating_add(1)
}

fn cost_of(g: &MultiGraph, pairs: &BTreeSet<EdgePair>) -> u64 {
    pairs.iter().map(|&(u, v)| g.multiplicity(u, v) as u64).sum()
}

fn cutset_from(g: &MultiGraph, pairs: &BTreeSet<EdgePair>) -> Cutset {
    Cutset {
        pairs: pairs.iter().copied().collect(),
        cost: cost_of(g, pairs),
    }
}

/// The behavior a concrete deletion set induces on a bordered instance.
pub fn behavior_of(ib: &BorderInstance, x: &BTreeSet<EdgePair>) -> Behavior {
    behavior_of_with_edges(ib, &ib.graph.edges_with_mult(), x)
}

/// Same, over a pre-extracted edge list; avoids cloning the graph on the
/// hot candidate-validation path.
fn behavior_of_with_edges(
    ib: &BorderInstance,
    edges: &[(VertexId, VertexId, u32)],
    x: &BTreeSet<EdgePair>,
) -> Behavior {
    let mut dsu = crate::graph::Dsu::new(ib.graph.vertex_ids());
    for &(u, v, _) in edges {
        if !x.contains(&(u, v)) {
            dsu.union(u, v);
        }
    }
    let mut root_terminal: BTreeMap<VertexId, bool> = BTreeMap::new();
    for v in ib.graph.vertex_ids() {
        let e = root_terminal.entry(dsu.find(v)).or_insert(false);
        *e |= ib.terminals.contains(&v);
    }
    let mut classes = Vec::with_capacity(ib.border.len());
    let mut seen: Vec<VertexId> = Vec::new();
    for &b in &ib.border {
        let root = dsu.find(b);
        let cls = match seen.iter().position(|&c| c == root) {
            Some(p) => p,
            None => {
                seen.push(root);
                seen.len() - 1
            }
        };
        classes.push(cls as u8);
    }
    let class_has_terminal = seen.iter().map(|&r| root_terminal[&r]).collect();
    Behavior {
        classes,
        class_has_terminal,
        parts: root_terminal.values().filter(|&&t| t).count() as u32,
    }
}

/// True iff `x` is a solution to `(ib, behavior)`.
pub fn is_border_solution(ib: &BorderInstance, behavior: &Behavior, x: &BTreeSet<EdgePair>) -> bool {
    cost_of(&ib.graph, x) <= ib.budget && behavior_of(ib, x) == *behavior
}

/// All behaviors for a border of `m` vertices and budget `k`: set partitions
/// as restricted-growth strings, per-class terminal flags, and `0..=k+1`
/// terminal components.
pub fn enumerate_behaviors(m: usize, k: u64) -> Vec<Behavior> {
    fn grow(prefix: &mut Vec<u8>, maxc: u8, m: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=maxc {
            prefix.push(c);
            grow(prefix, maxc.max(c + 1), m, out);
            prefix.pop();
        }
    }
    let mut partitions: Vec<Vec<u8>> = Vec::new();
    grow(&mut Vec::new(), 0, m, &mut partitions);
    let mut out = Vec::new();
    for p in partitions {
        let nclasses = p.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        for ymask in 0..(1u32 << nclasses) {
            let y: Vec<bool> = (0..nclasses).map(|i| ymask >> i & 1 == 1).collect();
            for s_b in 0..=(k + 1) as u32 {
                out.push(Behavior {
                    classes: p.clone(),
                    class_has_terminal: y.clone(),
                    parts: s_b,
                });
            }
        }
    }
    out
}

fn merge_candidate(map: &mut BehaviorMap, behavior: Behavior, cand: Cutset) {
    match map.get_mut(&behavior) {
        Some(cur) => {
            if cand.better_than(cur) {
                *cur = cand;
            }
        }
        None => {
            map.insert(behavior, cand);
        }
    }
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

/// Exhaustive bordered solve: enumerate deletion sets in increasing cost and
/// record the behavior each one induces.
fn brute_force_border(ib: &BorderInstance) -> BehaviorMap {
    let mut map = BehaviorMap::new();
    for (x, cost) in crate::harness::edge_subsets_within_budget(&ib.graph, ib.budget) {
        let behavior = behavior_of(ib, &x);
        let cand = Cutset {
            pairs: x.iter().copied().collect(),
            cost,
        };
        merge_candidate(&mut map, behavior, cand);
    }
    map
}

// ---------------------------------------------------------------------------
// Component dynamic program
// ---------------------------------------------------------------------------

pub const DP_INFINITY: u64 = u64::MAX;

/// Table `T[j][l][t]`: minimum cost of deleting a subset of the first `j`
/// components that isolates exactly `l` terminal vertices, where `t` records
/// whether an unchosen component among the prefix carries a terminal.
#[derive(Debug, Clone)]
pub struct SteinerDp {
    items: Vec<(u64, u64)>,
    table: Vec<Vec<[u64; 2]>>,
}

/// Builds the table for components `(a_j, b_j)` = (deletion cost, terminals
/// separated), with `l` capped at `ell_cap`.
pub fn steiner_component_dp(items: &[(u64, u64)], ell_cap: u64) -> SteinerDp {
    let cap = ell_cap as usize;
    let mut table = vec![vec![[DP_INFINITY; 2]; cap + 1]; items.len() + 1];
    table[0][0][0] = 0;
    for (j, &(aj, bj)) in items.iter().enumerate() {
        for l in 0..=cap {
            let prev = &table[j];
            let take = |tt: usize| -> u64 {
                if l as u64 >= bj {
                    let p = prev[l - bj as usize][tt];
                    if p == DP_INFINITY {
                        DP_INFINITY
                    } else {
                        p.saturating_add(aj)
                    }
                } else {
                    DP_INFINITY
                }
            };
            let bot = if bj == 0 {
                prev[l][0].min(take(0))
            } else {
                take(0)
            };
            let top = if bj == 0 {
                prev[l][1].min(take(1))
            } else {
                prev[l][0].min(prev[l][1]).min(take(1))
            };
            table[j + 1][l][0] = bot;
            table[j + 1][l][1] = top;
        }
    }
    SteinerDp {
        items: items.to_vec(),
        table,
    }
}

impl SteinerDp {
    pub fn value(&self, j: usize, ell: u64, top: bool) -> u64 {
        let cap = self.table[0].len() - 1;
        if ell as usize > cap {
            return DP_INFINITY;
        }
        self.table[j][ell as usize][top as usize]
    }

    /// Reconstructs a witness subset for `T[p'][ell][top]` by walking the
    /// transitions backwards; prefers skipping a component on ties.
    pub fn reconstruct(&self, ell: u64, top: bool) -> Option<(u64, Vec<usize>)> {
        let p = self.items.len();
        let total = self.value(p, ell, top);
        if total == DP_INFINITY {
            return None;
        }
        let mut chosen = Vec::new();
        let mut l = ell as usize;
        let mut t = top as usize;
        for j in (0..p).rev() {
            let (_aj, bj) = self.items[j];
            let cur = self.table[j + 1][l][t];
            let prev = &self.table[j];
            let skipped = if bj == 0 {
                prev[l][t] == cur
            } else if t == 1 {
                prev[l][0].min(prev[l][1]) == cur
            } else {
                false
            };
            if skipped {
                if bj > 0 && t == 1 {
                    t = if prev[l][0] <= prev[l][1] { 0 } else { 1 };
                }
                continue;
            }
            chosen.push(j);
            l -= bj as usize;
            debug_assert!(prev[l][t] != DP_INFINITY);
        }
        chosen.reverse();
        Some((total, chosen))
    }
}

// ---------------------------------------------------------------------------
// High-connectivity phase
// ---------------------------------------------------------------------------

struct Branch {
    /// Composite contraction map from the bordered graph to `h`.
    iota: ContractionMap,
    h: MultiGraph,
    core: VertexId,
    /// Components of `h` minus the core, ascending by smallest id.
    comps: Vec<BTreeSet<VertexId>>,
}

fn build_branch(ib: &BorderInstance, s: &[u64], q: u64) -> Result<Option<Branch>> {
    // fused pass: contract the family set and identify all heavy blobs into
    // the core in a single quotient
    let mut dsu = crate::graph::Dsu::new(ib.graph.vertex_ids());
    for &key in s {
        let (u, v) = ((key >> 32) as u32, (key & 0xffff_ffff) as u32);
        if ib.graph.multiplicity(u, v) == 0 {
            return Err(crate::Error::UnknownEdge(u, v));
        }
        dsu.union(u, v);
    }
    let mut weight: BTreeMap<VertexId, u64> = BTreeMap::new();
    for v in ib.graph.vertex_ids() {
        *weight.entry(dsu.find(v)).or_insert(0) += 1;
    }
    let heavy: Vec<VertexId> = weight
        .iter()
        .filter(|(_, &w)| w > q)
        .map(|(&v, _)| v)
        .collect();
    if heavy.is_empty() {
        return Ok(None);
    }
    let anchor = heavy[0];
    for &h in &heavy[1..] {
        dsu.union(anchor, h);
    }
    let (h, iota) = ib.graph.quotient_by(&mut dsu)?;
    let core = iota.image(anchor);
    let rest = h.without_vertices(&[core].into_iter().collect());
    let comps = rest
        .connected_components()
        .into_iter()
        .map(|c| c.into_iter().collect())
        .collect();
    Ok(Some(Branch {
        iota,
        h,
        core,
        comps,
    }))
}

/// Total multiplicity of edges inside `comp ∪ {core}`.
fn block_cost(h: &MultiGraph, comp: &BTreeSet<VertexId>, core: VertexId) -> u64 {
    let mut cost = 0u64;
    for &v in comp {
        for (w, m) in h.adjacency(v) {
            if (comp.contains(&w) && w > v) || w == core {
                cost += m as u64;
            }
        }
    }
    cost
}

fn lift_pairs(
    g: &MultiGraph,
    iota: &ContractionMap,
    h_pairs: &BTreeSet<EdgePair>,
) -> BTreeSet<EdgePair> {
    lift_pairs_from(&g.edges_with_mult(), iota, h_pairs)
}

fn lift_pairs_from(
    edges: &[(VertexId, VertexId, u32)],
    iota: &ContractionMap,
    h_pairs: &BTreeSet<EdgePair>,
) -> BTreeSet<EdgePair> {
    edges
        .iter()
        .filter(|&&(x, y, _)| {
            let (a, b) = (iota.image(x), iota.image(y));
            a != b && h_pairs.contains(&pair(a, b))
        })
        .map(|&(x, y, _)| (x, y))
        .collect()
}

struct BranchCtx<'a> {
    edges: &'a [(VertexId, VertexId, u32)],
    /// Best cost seen so far for each behavior index; strictly worse
    /// candidates skip validation (equal-cost ones still compete so the
    /// lexicographic tie-break stays deterministic).
    hints: &'a [core::sync::atomic::AtomicU64],
    behavior_index: usize,
}

/// Candidate generation for one behavior inside one branch.
fn branch_candidates(
    ib: &BorderInstance,
    br: &Branch,
    behavior: &Behavior,
    ctx: &BranchCtx<'_>,
    map: &mut BehaviorMap,
) {
    // Project border classes onto the contracted graph; a branch can only
    // serve behaviors where merged borders agree.
    let mut img_class: BTreeMap<VertexId, u8> = BTreeMap::new();
    for (i, &b) in ib.border.iter().enumerate() {
        let img = br.iota.image(b);
        let cls = behavior.classes[i];
        match img_class.get(&img) {
            Some(&c) if c != cls => return,
            _ => {
                img_class.insert(img, cls);
            }
        }
    }
    let nclasses = behavior.class_has_terminal.len() as u8;
    let core_class = img_class.get(&br.core).copied();
    // D ranges over the class joined with the core: forced when a border
    // terminal sits on the core, otherwise "none" plus every class.
    let d_options: Vec<Option<u8>> = match core_class {
        Some(c) => vec![Some(c)],
        None => {
            let mut opts = vec![None];
            opts.extend((0..nclasses).map(Some));
            opts
        }
    };
    for d in d_options {
        branch_candidate_for_d(ib, br, behavior, &img_class, d, ctx, map);
    }
}

fn branch_candidate_for_d(
    ib: &BorderInstance,
    br: &Branch,
    behavior: &Behavior,
    img_class: &BTreeMap<VertexId, u8>,
    d: Option<u8>,
    ctx: &BranchCtx<'_>,
    map: &mut BehaviorMap,
) {
    let h = &br.h;
    let k = ib.budget;
    let y = &behavior.class_has_terminal;
    let mut spent = 0u64;
    let mut s0 = 0u64;
    let mut deleted_blocks: Vec<&BTreeSet<VertexId>> = Vec::new();
    let mut isolated_borders: Vec<VertexId> = Vec::new();
    let mut core_in_t = h.has_tag(br.core, tags::TERMINAL);
    let mut remaining: Vec<&BTreeSet<VertexId>> = Vec::new();

    for comp in &br.comps {
        let borders_here: Vec<VertexId> = comp
            .iter()
            .copied()
            .filter(|v| img_class.contains_key(v))
            .collect();
        if borders_here.is_empty() {
            remaining.push(comp);
            continue;
        }
        let in_d: Vec<bool> = borders_here
            .iter()
            .map(|v| Some(img_class[v]) == d)
            .collect();
        if in_d.iter().any(|&x| x) && in_d.iter().any(|&x| !x) {
            return; // mixed component: neither resolution works
        }
        if in_d[0] {
            // joined onto the core
            if comp.iter().any(|&v| h.has_tag(v, tags::TERMINAL)) {
                core_in_t = true;
            }
        } else {
            // whole block deleted
            spent += block_cost(h, comp, br.core);
            if spent > k {
                return;
            }
            s0 += comp
                .iter()
                .filter(|&&v| h.has_tag(v, tags::TERMINAL))
                .count() as u64;
            isolated_borders.extend(borders_here.iter().copied());
            deleted_blocks.push(comp);
        }
    }

    // Every class except D must have collapsed to a single isolated vertex
    // with a consistent terminal flag, and the core side must be allowed to
    // carry (or not carry) terminals.
    let mut class_members: BTreeMap<u8, Vec<VertexId>> = BTreeMap::new();
    for (&img, &c) in img_class {
        class_members.entry(c).or_default().push(img);
    }
    for (&c, members) in &class_members {
        if Some(c) == d {
            continue;
        }
        if members.len() >= 2 {
            return;
        }
        let v = members[0];
        debug_assert!(isolated_borders.contains(&v));
        if h.has_tag(v, tags::TERMINAL) != y[c as usize] {
            return;
        }
    }
    let alpha_bottom = d.map(|c| y[c as usize]) == Some(false);
    if alpha_bottom && core_in_t {
        return;
    }
    // a class assigned to the core must match the core's eventual terminal
    // status only through the behavior's part count, checked by validation

    let items: Vec<(u64, u64)> = remaining
        .iter()
        .map(|comp| {
            (
                block_cost(h, comp, br.core),
                comp.iter()
                    .filter(|&&v| h.has_tag(v, tags::TERMINAL))
                    .count() as u64,
            )
        })
        .collect();
    let ell_cap = (k + 1).min(behavior.parts as u64 + 1);
    let dp = steiner_component_dp(&items, ell_cap);

    // Terminal components: deleted blocks contribute their terminals as
    // singletons (s0 + l); the core component contributes one more unless it
    // must stay terminal-free.
    let core_contribution = if alpha_bottom { 0 } else { 1 };
    let want = behavior.parts as u64;
    if want < s0 + core_contribution {
        return;
    }
    let ell = want - s0 - core_contribution;
    let mut t_options: Vec<bool> = Vec::new();
    if alpha_bottom {
        t_options.push(false);
    } else if core_in_t {
        t_options.extend([false, true]);
    } else {
        t_options.push(true);
    }

    for t in t_options {
        if let Some((dp_cost, chosen)) = dp.reconstruct(ell, t) {
            let total = spent + dp_cost;
            if total > k {
                continue;
            }
            // strictly worse than a solution some branch already validated
            let hint = &ctx.hints[ctx.behavior_index];
            if total > hint.load(core::sync::atomic::Ordering::Relaxed) {
                continue;
            }
            // assemble the candidate in h, then lift it back
            let mut h_pairs: BTreeSet<EdgePair> = BTreeSet::new();
            for comp in deleted_blocks
                .iter()
                .copied()
                .chain(chosen.iter().map(|&j| remaining[j]))
            {
                for &v in comp {
                    for (w, _) in h.adjacency(v) {
                        if comp.contains(&w) || w == br.core {
                            h_pairs.insert(pair(v, w));
                        }
                    }
                }
            }
            let x = lift_pairs_from(ctx.edges, &br.iota, &h_pairs);
            let cost = cost_of(&ib.graph, &x);
            if cost <= k
                && behavior_of_with_edges(ib, ctx.edges, &x) == *behavior
            {
                hint.fetch_min(cost, core::sync::atomic::Ordering::Relaxed);
                merge_candidate(map, behavior.clone(), cutset_from(&ib.graph, &x));
            }
        }
    }
}

fn high_connectivity_border(
    ib: &BorderInstance,
    cfg: &SolveConfig,
    q: u64,
    stats: &mut Stats,
) -> Result<BehaviorMap> {
    let k = ib.budget;
    let mut map = BehaviorMap::new();
    // the empty deletion set solves exactly its own behavior
    merge_candidate(&mut map, behavior_of(ib, &BTreeSet::new()), Cutset::empty());

    let behaviors = enumerate_behaviors(ib.border.len(), k);
    let universe: Vec<u64> = ib
        .graph
        .edge_pairs()
        .into_iter()
        .map(|(u, v)| ((u as u64) << 32) | v as u64)
        .collect();
    let a = 3u64.saturating_mul(q).saturating_mul(k);
    let family = cfg
        .family
        .build(universe, a as usize, k as usize, "steiner-high")?;
    stats.failure_bound += family.provenance.pair_failure_bound;

    let edges = ib.graph.edges_with_mult();
    let hints: Vec<core::sync::atomic::AtomicU64> = behaviors
        .iter()
        .map(|_| core::sync::atomic::AtomicU64::new(u64::MAX))
        .collect();
    let run_branch = |i: usize| -> Result<BehaviorMap> {
        let mut local = BehaviorMap::new();
        if let Some(br) = build_branch(ib, &family.sets[i], q)? {
            for (bi, behavior) in behaviors.iter().enumerate() {
                let ctx = BranchCtx {
                    edges: &edges,
                    hints: &hints,
                    behavior_index: bi,
                };
                branch_candidates(ib, &br, behavior, &ctx, &mut local);
            }
        }
        Ok(local)
    };

    let merged: Vec<BehaviorMap> = run_over_family(family.len(), run_branch)?;
    stats.branches += family.len() as u64;
    stats.family_sets += family.len() as u64;
    for local in merged {
        for (behavior, cand) in local {
            merge_candidate(&mut map, behavior, cand);
        }
    }
    Ok(map)
}

#[cfg(feature = "parallel")]
fn run_over_family<T, F>(len: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_over_family<T, F>(len: usize, f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T>,
{
    (0..len).map(f).collect()
}

// ---------------------------------------------------------------------------
// Recursive understanding
// ---------------------------------------------------------------------------

fn find_separation(
    ib: &BorderInstance,
    cfg: &SolveConfig,
    q: u64,
    stats: &mut Stats,
) -> Result<Option<GoodEdgeSeparation>> {
    if cfg.randomized_separation {
        find_good_edge_separation_randomized(
            &ib.graph,
            q,
            ib.budget,
            &cfg.family,
            cfg.karger_trials,
            stats,
        )
    } else {
        find_good_edge_separation(&ib.graph, q, ib.budget, &cfg.family, stats)
    }
}

/// Solves the bordered problem for every behavior. The map contains entries
/// only for behaviors with a solution; a missing key means none exists.
pub fn solve_border_steiner(
    ib: &BorderInstance,
    cfg: &SolveConfig,
    stats: &mut Stats,
    depth: u64,
) -> Result<BehaviorMap> {
    stats.max_depth = stats.max_depth.max(depth);
    let k = ib.budget;
    if ib.border.len() as u64 > 2 * k {
        return Err(contract("border steiner: more than 2k border terminals"));
    }
    if !ib.graph.is_connected() {
        return Err(invalid("border steiner: disconnected graph"));
    }
    let mut q = cfg.q_override.unwrap_or_else(|| theoretical_q(k)).max(1);

    // Recursion on a good edge separation. If the recorded solutions cover a
    // whole side (possible only with an overridden q), the threshold is
    // escalated so that contraction always makes progress.
    loop {
        let sep = match find_separation(ib, cfg, q, stats)? {
            None => break,
            Some(sep) => sep,
        };
        let (v1, _v2) = {
            let b1 = sep.side1.iter().filter(|v| ib.border.contains(v)).count() as u64;
            if b1 <= k {
                (&sep.side1, &sep.side2)
            } else {
                (&sep.side2, &sep.side1)
            }
        };
        let crossing_in_v1: BTreeSet<VertexId> = sep
            .crossing
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|v| v1.contains(v))
            .collect();
        let mut side_border: BTreeSet<VertexId> = ib
            .border
            .iter()
            .copied()
            .filter(|v| v1.contains(v))
            .collect();
        side_border.extend(crossing_in_v1);
        let mut side_graph = ib.graph.induced(v1).sparsify(k as u32);
        side_graph.cap_multiplicity(k as u32);
        let side_inst = BorderInstance {
            graph: side_graph,
            terminals: ib
                .terminals
                .iter()
                .copied()
                .filter(|v| v1.contains(v))
                .collect(),
            budget: k,
            border: side_border.into_iter().collect(),
        };
        debug_assert!(side_inst.graph.vertex_count() < ib.graph.vertex_count());
        let sub = solve_border_steiner(&side_inst, cfg, stats, depth + 1)?;

        let used: BTreeSet<EdgePair> = sub.values().flat_map(|c| c.pairs.iter().copied()).collect();
        let side_pairs: BTreeSet<EdgePair> = ib.graph.induced(v1).edge_pairs().into_iter().collect();
        let contractable: BTreeSet<EdgePair> = side_pairs.difference(&used).copied().collect();
        if contractable.is_empty() {
            q = q.saturating_mul(2);
            continue;
        }
        let (g2, iota) = ib.graph.contract_edges(&contractable)?;
        debug_assert!(g2.vertex_count() < ib.graph.vertex_count());
        let mut inner_graph = g2.sparsify(k as u32);
        inner_graph.cap_multiplicity(k as u32);
        let inner = BorderInstance {
            graph: inner_graph,
            terminals: ib.terminals.iter().map(|&v| iota.image(v)).collect(),
            budget: k,
            border: {
                let s: BTreeSet<VertexId> = ib.border.iter().map(|&v| iota.image(v)).collect();
                s.into_iter().collect()
            },
        };
        let inner_map = solve_border_steiner(&inner, cfg, stats, depth + 1)?;
        return Ok(transform_output(ib, &inner, &iota, &inner_map));
    }

    // no separation at threshold q
    if ib.graph.vertex_count() as u64 <= (k + 1) * q {
        Ok(brute_force_border(ib))
    } else {
        high_connectivity_border(ib, cfg, q, stats)
    }
}

/// Maps behaviors of the original instance onto the contracted instance and
/// pulls solutions back (edges of the contracted graph are identified with
/// the edges they originate from).
fn transform_output(
    ib: &BorderInstance,
    inner: &BorderInstance,
    iota: &ContractionMap,
    inner_map: &BehaviorMap,
) -> BehaviorMap {
    let mut out = BehaviorMap::new();
    'outer: for behavior in enumerate_behaviors(ib.border.len(), ib.budget) {
        // merged borders must agree on class membership
        let mut img_class: BTreeMap<VertexId, u8> = BTreeMap::new();
        for (i, &b) in ib.border.iter().enumerate() {
            let img = iota.image(b);
            match img_class.get(&img) {
                Some(&c) if c != behavior.classes[i] => continue 'outer,
                _ => {
                    img_class.insert(img, behavior.classes[i]);
                }
            }
        }
        // rebuild the behavior over the contracted border list
        let mut class_map: BTreeMap<u8, u8> = BTreeMap::new();
        let mut classes = Vec::with_capacity(inner.border.len());
        for &img in &inner.border {
            let orig_class = img_class[&img];
            let next = class_map.len() as u8;
            let cls = *class_map.entry(orig_class).or_insert(next);
            classes.push(cls);
        }
        let mut class_has_terminal = vec![false; class_map.len()];
        for (&orig, &new) in &class_map {
            class_has_terminal[new as usize] = behavior.class_has_terminal[orig as usize];
        }
        let inner_behavior = Behavior {
            classes,
            class_has_terminal,
            parts: behavior.parts,
        };
        if let Some(sol) = inner_map.get(&inner_behavior) {
            let h_pairs: BTreeSet<EdgePair> = sol.pairs.iter().copied().collect();
            let x = lift_pairs(&ib.graph, iota, &h_pairs);
            if is_border_solution(ib, &behavior, &x) {
                out.insert(behavior, cutset_from(&ib.graph, &x));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Top level
// ---------------------------------------------------------------------------

fn count_terminal_components(g: &MultiGraph, terminals: &BTreeSet<VertexId>) -> u32 {
    g.connected_components()
        .iter()
        .filter(|c| c.iter().any(|v| terminals.contains(v)))
        .count() as u32
}

/// Solves a Steiner Cut instance and returns a full report. The answer is
/// certified except when randomized families or the randomized separation
/// finder are in use.
pub fn solve_steiner(inst: &SteinerInstance, cfg: &SolveConfig) -> Result<SolutionReport> {
    if inst.parts < 1 {
        return Err(invalid("steiner: s must be at least 1"));
    }
    for &t in &inst.terminals {
        if !inst.graph.has_vertex(t) {
            return Err(crate::Error::UnknownVertex(t));
        }
    }
    let mut stats = Stats::default();
    let k = inst.budget;
    let q = cfg.q_override.unwrap_or_else(|| theoretical_q(k)).max(1);
    let exact = cfg.family.kind.is_deterministic() && !cfg.randomized_separation;
    let provenance = Provenance {
        family_mode: cfg.family.kind.as_str(),
        seed: cfg.family.seed,
        delta: cfg.family.delta,
        q,
        t: None,
        exact,
    };

    if inst.terminals.is_empty() {
        return Ok(SolutionReport::no(provenance, stats));
    }
    let tc = count_terminal_components(&inst.graph, &inst.terminals);
    if tc >= inst.parts {
        return Ok(SolutionReport::yes(
            0,
            SolutionBody::Edges { edges: Vec::new() },
            provenance,
            stats,
        ));
    }

    // normalize connectivity: an uncuttable clique attached to one vertex of
    // each component, with the required component count adjusted
    let (work, s_eff) = if inst.graph.is_connected() {
        (inst.graph.clone(), inst.parts)
    } else {
        let mut g = inst.graph.clone();
        let reps: Vec<VertexId> = g.connected_components().iter().map(|c| c[0]).collect();
        let clique: Vec<VertexId> = (0..k + 2).map(|_| g.fresh_vertex()).collect();
        for (i, &a) in clique.iter().enumerate() {
            for &b in &clique[i + 1..] {
                g.add_edge(a, b, 1).unwrap();
            }
        }
        for r in reps {
            for &c in &clique {
                g.add_edge(r, c, 1).unwrap();
            }
        }
        (g, inst.parts - (tc - 1))
    };
    if s_eff as u64 > k + 1 {
        return Ok(SolutionReport::no(provenance, stats));
    }

    let mut prepared = work.sparsify(k as u32);
    prepared.cap_multiplicity(k as u32);
    for &t in &inst.terminals {
        prepared.set_tags(t, tags::TERMINAL);
    }
    let ib = BorderInstance {
        graph: prepared,
        terminals: inst.terminals.clone(),
        budget: k,
        border: Vec::new(),
    };
    let map = solve_border_steiner(&ib, cfg, &mut stats, 0)?;
    let key = Behavior {
        classes: Vec::new(),
        class_has_terminal: Vec::new(),
        parts: s_eff,
    };
    match map.get(&key) {
        None => Ok(SolutionReport::no(provenance, stats)),
        Some(sol) => {
            // validate against the original instance
            let x: BTreeSet<EdgePair> = sol.pairs.iter().copied().collect();
            for &(u, v) in &x {
                if inst.graph.multiplicity(u, v) == 0 {
                    return Err(contract("steiner: solution uses a non-instance edge"));
                }
            }
            let cost: u64 = x
                .iter()
                .map(|&(u, v)| inst.graph.multiplicity(u, v) as u64)
                .sum();
            let comps = count_terminal_components(&inst.graph.without_pairs(&x), &inst.terminals);
            if cost > k || comps < inst.parts {
                return Err(contract("steiner: candidate failed final validation"));
            }
            Ok(SolutionReport {
                answer: Answer::Yes,
                size: Some(cost),
                solution: Some(SolutionBody::Edges {
                    edges: sol.pairs.clone(),
                }),
                provenance,
                stats,
            })
        }
    }
}
