//! Exact Node Multiway Cut-Uncut solver, with an explicit undeletable set
//! and an edge-deletion front-end by subdivision.
//!
//! The instance asks for at most `k` deletable vertices whose removal leaves
//! every pair of terminals in the same component exactly when they are
//! equivalent. Preprocessing deletes vertices that see too many terminal
//! classes (bounding the number of classes by `k^2 + k`), then splits into
//! components. The bordered recursion peels off the small side of a good
//! node separation or the petals of a flower separation, solves it for all
//! behaviors on its border, bypasses everything no recorded solution uses
//! and shrinks duplicate terminals. The high-connectivity phase guesses an
//! interrogating set `S` and reads candidate solutions directly off the
//! components of the graph induced by `S` and the undeletables.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{contract, invalid};
use crate::flow::disjoint_paths_to_groups;
use crate::graph::{MultiGraph, VertexId};
use crate::report::{Answer, Provenance, SolutionBody, SolutionReport, SolveConfig, Stats};
use crate::separation::{find_flower_separation, find_good_node_separation};
use crate::Result;

/// Node Multiway Cut-Uncut instance. `undeletable` must contain every
/// terminal; `undeletable = terminals` reproduces the plain problem.
#[derive(Debug, Clone)]
pub struct MwcuInstance {
    pub graph: MultiGraph,
    /// Equivalence classes of terminals (disjoint, nonempty).
    pub classes: Vec<BTreeSet<VertexId>>,
    pub budget: u64,
    pub undeletable: BTreeSet<VertexId>,
}

impl MwcuInstance {
    pub fn terminals(&self) -> BTreeSet<VertexId> {
        self.classes.iter().flatten().copied().collect()
    }
}

/// Bordered instance. Border terminals are deletable non-terminals.
#[derive(Debug, Clone)]
pub struct MwcuBorderInstance {
    pub graph: MultiGraph,
    pub classes: Vec<BTreeSet<VertexId>>,
    pub budget: u64,
    pub undeletable: BTreeSet<VertexId>,
    pub border: Vec<VertexId>,
}

impl MwcuBorderInstance {
    fn terminals(&self) -> BTreeSet<VertexId> {
        self.classes.iter().flatten().copied().collect()
    }
}

/// Where a surviving border terminal lives relative to the terminal classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Assign {
    /// Same component as terminal class `c`.
    Class(u16),
    /// A terminal-free component, numbered by first occurrence.
    Fresh(u8),
}

/// Behavior triple `(X_b, E_b, R_b)` in canonical form: which border
/// terminals are deleted, an assumed outside-connectivity partition over the
/// survivors (restricted-growth string), and the component assignment of
/// each assumed group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MwcuBehavior {
    pub deleted: Vec<bool>,
    pub eb: Vec<u8>,
    pub assign: Vec<Assign>,
}

/// A vertex-deletion solution, kept sorted; cost is its length.
pub type VertexSolution = Vec<VertexId>;

pub type MwcuMap = BTreeMap<MwcuBehavior, VertexSolution>;

fn better(a: &VertexSolution, b: &VertexSolution) -> bool {
    a.len() < b.len() || (a.len() == b.len() && a < b)
}

fn merge_candidate(map: &mut MwcuMap, behavior: MwcuBehavior, cand: VertexSolution) {
    match map.get_mut(&behavior) {
        Some(cur) => {
            if better(&cand, cur) {
                *cur = cand;
            }
        }
        None => {
            map.insert(behavior, cand);
        }
    }
}

/// Theoretical recursion threshold `q = k (2k^3 + 6k^2 + 1)^{2k} + k`.
pub fn theoretical_q(k: u64) -> u64 {
    let base = 2u64
        .saturating_mul(k)
        .saturating_mul(k)
        .saturating_mul(k)
        .saturating_add(6u64.saturating_mul(k).saturating_mul(k))
        .saturating_add(1);
    let mut p: u64 = 1;
    for _ in 0..2 * k {
        p = p.saturating_mul(base);
    }
    k.saturating_mul(p).saturating_add(k)
}

/// Component bound `t = (2q+2)(2^k - 1) + 2k + 1`.
pub fn component_bound(q: u64, k: u64) -> u64 {
    let pow = if k >= 63 { u64::MAX } else { (1u64 << k) - 1 };
    (2u64.saturating_mul(q).saturating_add(2))
        .saturating_mul(pow)
        .saturating_add(2 * k + 1)
}

/// Adds, per assumed-connectivity group with at least two survivors, a star
/// of virtual edges realizing `E_b`.
fn behavior_graph(g: &MultiGraph, survivors: &[VertexId], eb: &[u8]) -> MultiGraph {
    let mut gp = g.clone();
    let mut groups: BTreeMap<u8, Vec<VertexId>> = BTreeMap::new();
    for (i, &v) in survivors.iter().enumerate() {
        groups.entry(eb[i]).or_default().push(v);
    }
    for (_, members) in groups {
        for w in &members[1..] {
            if !gp.has_edge(members[0], *w) {
                gp.add_edge(members[0], *w, 1).unwrap();
            }
        }
    }
    gp
}

/// The behavior induced by deletion set `x` under outside-connectivity
/// assumption `eb`, or `None` when the components break `R` itself.
pub fn derive_behavior(
    ib: &MwcuBorderInstance,
    x: &BTreeSet<VertexId>,
    eb: &[u8],
) -> Option<MwcuBehavior> {
    let deleted: Vec<bool> = ib.border.iter().map(|v| x.contains(v)).collect();
    let survivors: Vec<VertexId> = ib
        .border
        .iter()
        .copied()
        .filter(|v| !x.contains(v))
        .collect();
    debug_assert_eq!(survivors.len(), eb.len());
    let gp = behavior_graph(&ib.graph, &survivors, eb);
    let trimmed = gp.without_vertices(x);
    let comps = trimmed.connected_components();
    let mut comp_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of.insert(v, ci);
        }
    }
    // every class in one component, distinct classes in distinct components
    let mut class_comp: Vec<usize> = Vec::with_capacity(ib.classes.len());
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for class in &ib.classes {
        let mut it = class.iter();
        let first = comp_of[it.next().expect("classes are nonempty")];
        for t in it {
            if comp_of[t] != first {
                return None;
            }
        }
        if !used.insert(first) {
            return None;
        }
        class_comp.push(first);
    }
    let mut fresh: BTreeMap<usize, u8> = BTreeMap::new();
    let mut assign = Vec::new();
    let mut seen_group: BTreeSet<u8> = BTreeSet::new();
    for (i, &v) in survivors.iter().enumerate() {
        if !seen_group.insert(eb[i]) {
            continue; // one assignment per group
        }
        let ci = comp_of[&v];
        if let Some(c) = class_comp.iter().position(|&cc| cc == ci) {
            assign.push(Assign::Class(c as u16));
        } else {
            let next = fresh.len() as u8;
            let gid = *fresh.entry(ci).or_insert(next);
            assign.push(Assign::Fresh(gid));
        }
    }
    Some(MwcuBehavior {
        deleted,
        eb: eb.to_vec(),
        assign,
    })
}

/// True iff `x` solves `(ib, behavior)`.
pub fn is_mwcu_border_solution(
    ib: &MwcuBorderInstance,
    behavior: &MwcuBehavior,
    x: &BTreeSet<VertexId>,
) -> bool {
    if x.len() as u64 > ib.budget || !x.is_disjoint(&ib.undeletable) {
        return false;
    }
    let deleted: Vec<bool> = ib.border.iter().map(|v| x.contains(v)).collect();
    if deleted != behavior.deleted {
        return false;
    }
    derive_behavior(ib, x, &behavior.eb).as_ref() == Some(behavior)
}

fn rgs_strings(m: usize) -> Vec<Vec<u8>> {
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
    let mut out = Vec::new();
    grow(&mut Vec::new(), 0, m, &mut out);
    out
}

/// Enumerates all behavior triples for `m` border terminals and `n_classes`
/// terminal classes, extending `R` constructively rather than filtering.
pub fn enumerate_mwcu_behaviors(m: usize, n_classes: usize) -> Vec<MwcuBehavior> {
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << m) {
        let deleted: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
        let s_cnt = m - deleted.iter().filter(|&&d| d).count();
        for eb in rgs_strings(s_cnt) {
            let n_groups = eb.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
            // assignments: each group joins a terminal class or a fresh
            // component, fresh ids normalized by first occurrence
            let mut stack: Vec<(usize, u8, Vec<Assign>)> = vec![(0, 0, Vec::new())];
            while let Some((i, fresh_used, cur)) = stack.pop() {
                if i == n_groups {
                    out.push(MwcuBehavior {
                        deleted: deleted.clone(),
                        eb: eb.clone(),
                        assign: cur,
                    });
                    continue;
                }
                for c in 0..n_classes {
                    let mut next = cur.clone();
                    next.push(Assign::Class(c as u16));
                    stack.push((i + 1, fresh_used, next));
                }
                for gfresh in 0..=fresh_used {
                    let mut next = cur.clone();
                    next.push(Assign::Fresh(gfresh));
                    stack.push((i + 1, fresh_used.max(gfresh + 1), next));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

fn brute_force_border(ib: &MwcuBorderInstance) -> MwcuMap {
    let deletable: Vec<VertexId> = ib
        .graph
        .vertex_ids()
        .into_iter()
        .filter(|v| !ib.undeletable.contains(v))
        .collect();
    let mut map = MwcuMap::new();
    for x in crate::harness::vertex_subsets_within_budget(&deletable, ib.budget) {
        let survivors = ib.border.iter().filter(|v| !x.contains(v)).count();
        for eb in rgs_strings(survivors) {
            if let Some(behavior) = derive_behavior(ib, &x, &eb) {
                merge_candidate(&mut map, behavior, x.iter().copied().collect());
            }
        }
    }
    map
}

// ---------------------------------------------------------------------------
// High-connectivity phase
// ---------------------------------------------------------------------------

fn high_connectivity_border(
    ib: &MwcuBorderInstance,
    cfg: &SolveConfig,
    q: u64,
    t: u64,
    stats: &mut Stats,
) -> Result<MwcuMap> {
    let k = ib.budget;
    let terminals = ib.terminals();
    let deletable: Vec<u64> = ib
        .graph
        .vertex_ids()
        .into_iter()
        .filter(|v| !ib.undeletable.contains(v))
        .map(|v| v as u64)
        .collect();
    let a = q.saturating_mul(t);
    let family = cfg
        .family
        .build(deletable, a as usize, k as usize, "mwcu-high")?;
    stats.failure_bound += family.provenance.pair_failure_bound;
    stats.branches += family.len() as u64;
    stats.family_sets += family.len() as u64;

    let behaviors = enumerate_mwcu_behaviors(ib.border.len(), ib.classes.len());
    let mut map = MwcuMap::new();
    for i in 0..family.len() {
        let s: BTreeSet<VertexId> = family.sets[i].iter().map(|&x| x as VertexId).collect();
        for behavior in &behaviors {
            let survivors: Vec<VertexId> = ib
                .border
                .iter()
                .zip(&behavior.deleted)
                .filter(|(_, &d)| !d)
                .map(|(&v, _)| v)
                .collect();
            let x_b: BTreeSet<VertexId> = ib
                .border
                .iter()
                .zip(&behavior.deleted)
                .filter(|(_, &d)| d)
                .map(|(&v, _)| v)
                .collect();
            if x_b.len() as u64 > k {
                continue;
            }
            // the graph whose components carry the candidate
            let mut keep: BTreeSet<VertexId> = s.clone();
            keep.extend(ib.undeletable.iter().copied());
            keep.extend(survivors.iter().copied());
            keep.retain(|v| !x_b.contains(v));
            let induced = ib.graph.induced(&keep);
            let comps = induced.connected_components();

            // T^big options: empty, a terminal class with its assigned
            // survivors, or a fresh survivor group
            let group_members = |gi: usize| -> BTreeSet<VertexId> {
                survivors
                    .iter()
                    .enumerate()
                    .filter(|(i2, _)| behavior.eb[*i2] as usize == gi)
                    .map(|(_, &v)| v)
                    .collect()
            };
            let mut tbig_options: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new()];
            for (c, class) in ib.classes.iter().enumerate() {
                let mut set: BTreeSet<VertexId> = class.clone();
                for (gi, &g) in behavior.assign.iter().enumerate() {
                    if g == Assign::Class(c as u16) {
                        set.extend(group_members(gi));
                    }
                }
                tbig_options.push(set);
            }
            let fresh_ids: BTreeSet<u8> = behavior
                .assign
                .iter()
                .filter_map(|g| match g {
                    Assign::Fresh(f) => Some(*f),
                    _ => None,
                })
                .collect();
            for f in fresh_ids {
                let mut set = BTreeSet::new();
                for (gi, &g) in behavior.assign.iter().enumerate() {
                    if g == Assign::Fresh(f) {
                        set.extend(group_members(gi));
                    }
                }
                tbig_options.push(set);
            }

            let anchors: BTreeSet<VertexId> = terminals
                .iter()
                .copied()
                .chain(survivors.iter().copied())
                .collect();
            for tbig in &tbig_options {
                let mut union: BTreeSet<VertexId> = BTreeSet::new();
                for comp in &comps {
                    if comp.iter().any(|v| anchors.contains(v) && !tbig.contains(v)) {
                        union.extend(comp.iter().copied());
                    }
                }
                let mut x: BTreeSet<VertexId> = ib.graph.neighborhood_of_set(&union);
                x.extend(x_b.iter().copied());
                if x.len() as u64 > k {
                    continue;
                }
                if is_mwcu_border_solution(ib, behavior, &x) {
                    merge_candidate(&mut map, behavior.clone(), x.into_iter().collect());
                }
            }
        }
    }
    Ok(map)
}

// ---------------------------------------------------------------------------
// Graph surgery used by the recursion
// ---------------------------------------------------------------------------

/// Removes `v` and makes its neighborhood a clique (no parallel edges).
fn bypass_vertex(g: &mut MultiGraph, v: VertexId) {
    let nb = g.neighbors(v);
    g.remove_vertex(v);
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !g.has_edge(a, b) {
                g.add_edge(a, b, 1).unwrap();
            }
        }
    }
}

/// Replaces terminals `u, v` by a fresh vertex adjacent to the union of
/// their neighborhoods; returns the new id.
fn identify_terminals(g: &mut MultiGraph, u: VertexId, v: VertexId) -> VertexId {
    let mut nb: BTreeSet<VertexId> = g.neighbors(u).into_iter().collect();
    nb.extend(g.neighbors(v));
    nb.remove(&u);
    nb.remove(&v);
    g.remove_vertex(u);
    g.remove_vertex(v);
    let w = g.fresh_vertex();
    for n in nb {
        g.add_edge(w, n, 1).unwrap();
    }
    w
}

fn common_neighbors(g: &MultiGraph, u: VertexId, v: VertexId) -> usize {
    let nu: BTreeSet<VertexId> = g.neighbors(u).into_iter().collect();
    g.neighbors(v).into_iter().filter(|w| nu.contains(w)).count()
}

// ---------------------------------------------------------------------------
// Bordered recursion
// ---------------------------------------------------------------------------

/// Solves the bordered problem for every behavior; missing keys mean no
/// solution exists for that behavior.
pub fn solve_border_mwcu(
    ib: MwcuBorderInstance,
    cfg: &SolveConfig,
    stats: &mut Stats,
    depth: u64,
) -> Result<MwcuMap> {
    stats.max_depth = stats.max_depth.max(depth);
    let k = ib.budget;
    if ib.border.len() as u64 > 2 * k {
        return Err(contract("border mwcu: more than 2k border terminals"));
    }
    {
        let terminals = ib.terminals();
        if ib.border.iter().any(|v| terminals.contains(v)) {
            return Err(contract("border mwcu: border terminals must be nonterminals"));
        }
    }
    if ib.border.iter().any(|v| ib.undeletable.contains(v)) {
        return Err(contract("border mwcu: border terminals must be deletable"));
    }
    if !ib.graph.is_connected() {
        return Err(invalid("border mwcu: disconnected graph"));
    }

    let mut ib = ib;
    let mut q = cfg.q_override.unwrap_or_else(|| theoretical_q(k)).max(1);

    loop {
        let terminals = ib.terminals();
        let sep = find_good_node_separation(&ib.graph, &ib.undeletable, q, k, &cfg.family, stats)?;
        let border_set: BTreeSet<VertexId> = ib.border.iter().copied().collect();
        let (v_star, z_w) = match sep {
            Some(s) => {
                let b1 = s.side1.intersection(&border_set).count() as u64;
                let side = if b1 <= k { s.side1 } else { s.side2 };
                let zw = ib.graph.neighborhood_of_set(&side);
                (side, zw)
            }
            None => {
                match find_flower_separation(
                    &ib.graph,
                    &ib.undeletable,
                    &border_set,
                    q,
                    k,
                    &cfg.family,
                    stats,
                )? {
                    None => break,
                    Some(f) => {
                        let union = f.petal_union();
                        (union, f.core)
                    }
                }
            }
        };
        // recursive side instance on V* plus its neighborhood
        let mut w: BTreeSet<VertexId> = v_star.clone();
        w.extend(z_w.iter().copied());
        let side_graph = ib.graph.induced(&w);
        debug_assert!(side_graph.is_connected());
        let side_border: BTreeSet<VertexId> = ib
            .border
            .iter()
            .copied()
            .filter(|v| w.contains(v))
            .chain(z_w.iter().copied())
            .collect();
        let side_classes: Vec<BTreeSet<VertexId>> = ib
            .classes
            .iter()
            .map(|c| c.intersection(&w).copied().collect::<BTreeSet<_>>())
            .filter(|c: &BTreeSet<VertexId>| !c.is_empty())
            .collect();
        let side = MwcuBorderInstance {
            graph: side_graph,
            classes: side_classes,
            budget: k,
            undeletable: ib.undeletable.intersection(&w).copied().collect(),
            border: side_border.iter().copied().collect(),
        };
        debug_assert!(side.graph.vertex_count() < ib.graph.vertex_count());
        let sub = solve_border_mwcu(side, cfg, stats, depth + 1)?;

        let mut used: BTreeSet<VertexId> = side_border;
        for x in sub.values() {
            used.extend(x.iter().copied());
        }
        let bypassable: Vec<VertexId> = v_star
            .iter()
            .copied()
            .filter(|v| !terminals.contains(v) && !used.contains(v))
            .collect();
        if bypassable.is_empty() {
            // recorded solutions cover the whole side; escalate the
            // threshold so the recursion keeps making progress
            q = q.saturating_mul(2);
            continue;
        }
        for v in bypassable {
            debug_assert!(!border_set.contains(&v));
            bypass_vertex(&mut ib.graph, v);
            ib.undeletable.remove(&v);
        }

        // terminal cleanup inside the shrunk side: identify close same-class
        // pairs, reject close cross-class pairs, deduplicate triples
        let mut v_star_terms: BTreeSet<VertexId> =
            terminals.intersection(&v_star).copied().collect();
        'pairs: loop {
            let list: Vec<VertexId> = v_star_terms.iter().copied().collect();
            for (i, &u) in list.iter().enumerate() {
                for &v in &list[i + 1..] {
                    if ib.graph.has_edge(u, v) || common_neighbors(&ib.graph, u, v) as u64 > k {
                        let cu = ib.classes.iter().position(|c| c.contains(&u)).unwrap();
                        let cv = ib.classes.iter().position(|c| c.contains(&v)).unwrap();
                        if cu != cv {
                            return Ok(MwcuMap::new()); // no behavior is solvable
                        }
                        let wid = identify_terminals(&mut ib.graph, u, v);
                        ib.classes[cu].remove(&u);
                        ib.classes[cu].remove(&v);
                        ib.classes[cu].insert(wid);
                        ib.undeletable.remove(&u);
                        ib.undeletable.remove(&v);
                        ib.undeletable.insert(wid);
                        v_star_terms.remove(&u);
                        v_star_terms.remove(&v);
                        v_star_terms.insert(wid);
                        continue 'pairs;
                    }
                }
            }
            break;
        }
        // duplicate terminals: same class, identical all-nonterminal
        // neighborhood; keep two per group
        let all_terms = ib.terminals();
        let mut groups: BTreeMap<(usize, Vec<VertexId>), Vec<VertexId>> = BTreeMap::new();
        for &t in &all_terms {
            let nb = ib.graph.neighbors(t);
            if nb.iter().any(|w| all_terms.contains(w)) {
                continue;
            }
            let c = ib.classes.iter().position(|cl| cl.contains(&t)).unwrap();
            groups.entry((c, nb)).or_default().push(t);
        }
        for ((c, _), members) in groups {
            for &extra in members.iter().skip(2) {
                ib.graph.remove_vertex(extra);
                ib.classes[c].remove(&extra);
                ib.undeletable.remove(&extra);
            }
        }
        ib.classes.retain(|c| !c.is_empty());
    }

    let free = ib
        .graph
        .vertex_ids()
        .iter()
        .filter(|v| !ib.undeletable.contains(v))
        .count() as u64;
    let t = cfg.t_override.unwrap_or_else(|| component_bound(q, k));
    if free <= q.saturating_mul(t).saturating_add(k) {
        Ok(brute_force_border(&ib))
    } else {
        high_connectivity_border(&ib, cfg, q, t, stats)
    }
}

// ---------------------------------------------------------------------------
// Class reduction and the top level
// ---------------------------------------------------------------------------

/// Outcome of the preprocessing chain.
#[derive(Debug, Clone)]
pub enum Reduced {
    /// Reduced instance plus the deletions forced by the path test.
    Instance(MwcuInstance, Vec<VertexId>),
    /// Preprocessing already refuted the instance.
    No,
}

/// Deletes every nonterminal that has `k + 2` internally disjoint paths to
/// terminals of pairwise distinct classes (such a vertex is in every
/// solution), then refutes instances whose classes span components or whose
/// components see more than `k^2 + k` classes.
pub fn reduce_equivalence_classes(inst: &MwcuInstance) -> Result<Reduced> {
    let mut g = inst.graph.clone();
    let mut classes = inst.classes.clone();
    let mut undeletable = inst.undeletable.clone();
    let mut k = inst.budget as i64;
    let mut forced: Vec<VertexId> = Vec::new();
    let terminals: BTreeSet<VertexId> = classes.iter().flatten().copied().collect();

    'outer: loop {
        for v in g.vertex_ids() {
            if terminals.contains(&v) {
                continue;
            }
            if disjoint_paths_to_groups(&g, v, &classes, (k + 2).max(0) as u64)? {
                if undeletable.contains(&v) {
                    return Ok(Reduced::No); // forced but undeletable
                }
                g.remove_vertex(v);
                forced.push(v);
                k -= 1;
                if k < 0 {
                    return Ok(Reduced::No);
                }
                continue 'outer;
            }
        }
        break;
    }

    // classes must not span components; components must not see too many
    // (a component always supports one class, so the bound is at least 1)
    let comps = g.connected_components();
    let limit = (inst.budget * inst.budget + inst.budget).max(1) as usize;
    for class in &classes {
        let mut hit = comps.iter().filter(|c| class.iter().any(|t| c.contains(t)));
        let first = hit.next();
        if first.is_none() || hit.next().is_some() {
            return Ok(Reduced::No);
        }
    }
    for comp in &comps {
        let seen = classes
            .iter()
            .filter(|class| class.iter().any(|t| comp.contains(t)))
            .count();
        if seen > limit {
            return Ok(Reduced::No);
        }
    }
    classes.retain(|c| !c.is_empty());
    undeletable.retain(|v| g.has_vertex(*v));
    Ok(Reduced::Instance(
        MwcuInstance {
            graph: g,
            classes,
            budget: k as u64,
            undeletable,
        },
        forced,
    ))
}

/// Solves a Node Multiway Cut-Uncut instance.
pub fn solve_mwcu(inst: &MwcuInstance, cfg: &SolveConfig) -> Result<SolutionReport> {
    for class in &inst.classes {
        if class.is_empty() {
            return Err(invalid("mwcu: empty terminal class"));
        }
        for t in class {
            if !inst.graph.has_vertex(*t) {
                return Err(crate::Error::UnknownVertex(*t));
            }
            if !inst.undeletable.contains(t) {
                return Err(invalid("mwcu: terminals must be undeletable"));
            }
        }
    }
    let terminals = inst.terminals();
    if terminals.len() != inst.classes.iter().map(|c| c.len()).sum::<usize>() {
        return Err(invalid("mwcu: classes overlap"));
    }

    let mut stats = Stats::default();
    let q = cfg
        .q_override
        .unwrap_or_else(|| theoretical_q(inst.budget))
        .max(1);
    let provenance = Provenance {
        family_mode: cfg.family.kind.as_str(),
        seed: cfg.family.seed,
        delta: cfg.family.delta,
        q,
        t: Some(cfg.t_override.unwrap_or_else(|| component_bound(q, inst.budget))),
        exact: cfg.family.kind.is_deterministic(),
    };

    let mut work = inst.clone();
    work.graph.cap_multiplicity(0); // node problems ignore multiplicities
    let (reduced, forced) = match reduce_equivalence_classes(&work)? {
        Reduced::No => return Ok(SolutionReport::no(provenance, stats)),
        Reduced::Instance(r, f) => (r, f),
    };

    let mut solution: BTreeSet<VertexId> = forced.iter().copied().collect();
    for comp in reduced.graph.connected_components() {
        let comp_set: BTreeSet<VertexId> = comp.iter().copied().collect();
        let classes: Vec<BTreeSet<VertexId>> = reduced
            .classes
            .iter()
            .map(|c| c.intersection(&comp_set).copied().collect::<BTreeSet<_>>())
            .filter(|c: &BTreeSet<VertexId>| !c.is_empty())
            .collect();
        if classes.is_empty() {
            continue;
        }
        let ib = MwcuBorderInstance {
            graph: reduced.graph.induced(&comp_set),
            classes,
            budget: reduced.budget,
            undeletable: reduced
                .undeletable
                .intersection(&comp_set)
                .copied()
                .collect(),
            border: Vec::new(),
        };
        let map = solve_border_mwcu(ib, cfg, &mut stats, 0)?;
        let key = MwcuBehavior {
            deleted: Vec::new(),
            eb: Vec::new(),
            assign: Vec::new(),
        };
        match map.get(&key) {
            None => return Ok(SolutionReport::no(provenance, stats)),
            Some(x) => solution.extend(x.iter().copied()),
        }
    }
    if solution.len() as u64 > inst.budget {
        return Ok(SolutionReport::no(provenance, stats));
    }
    if !is_mwcu_solution(inst, &solution) {
        return Err(contract("mwcu: candidate failed final validation"));
    }
    Ok(SolutionReport {
        answer: Answer::Yes,
        size: Some(solution.len() as u64),
        solution: Some(SolutionBody::Vertices {
            vertices: solution.into_iter().collect(),
        }),
        provenance,
        stats,
    })
}

/// Definitional check: components of `G - X` realize the classes exactly.
pub fn is_mwcu_solution(inst: &MwcuInstance, x: &BTreeSet<VertexId>) -> bool {
    if x.len() as u64 > inst.budget || !x.is_disjoint(&inst.undeletable) {
        return false;
    }
    let trimmed = inst.graph.without_vertices(x);
    let comps = trimmed.connected_components();
    let mut comp_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of.insert(v, ci);
        }
    }
    let mut used = BTreeSet::new();
    for class in &inst.classes {
        let mut ids = class.iter().map(|t| comp_of[t]);
        let first = match ids.next() {
            Some(f) => f,
            None => continue,
        };
        if ids.any(|c| c != first) || !used.insert(first) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Edge-deletion front-end
// ---------------------------------------------------------------------------

/// Edge Multiway Cut-Uncut instance.
#[derive(Debug, Clone)]
pub struct EmwcuInstance {
    pub graph: MultiGraph,
    pub classes: Vec<BTreeSet<VertexId>>,
    pub budget: u64,
}

/// Subdivides every edge copy (the subdivision vertex is the only deletable
/// thing), marks original vertices undeletable, and returns the node
/// instance plus the map from subdivision vertices back to edges.
pub fn emwcu_to_node(
    inst: &EmwcuInstance,
) -> (MwcuInstance, BTreeMap<VertexId, (VertexId, VertexId)>) {
    let mut g = MultiGraph::new();
    for v in inst.graph.vertex_ids() {
        g.add_vertex(v);
    }
    let mut fresh_base = inst.graph.vertex_ids().iter().copied().max().unwrap_or(0);
    let mut back: BTreeMap<VertexId, (VertexId, VertexId)> = BTreeMap::new();
    for (u, v, m) in inst.graph.edges_with_mult() {
        for _ in 0..m {
            fresh_base += 1;
            let w = fresh_base;
            g.add_vertex(w);
            g.add_edge(u, w, 1).unwrap();
            g.add_edge(w, v, 1).unwrap();
            back.insert(w, (u, v));
        }
    }
    let undeletable: BTreeSet<VertexId> = inst.graph.vertex_set();
    (
        MwcuInstance {
            graph: g,
            classes: inst.classes.clone(),
            budget: inst.budget,
            undeletable,
        },
        back,
    )
}

/// Solves Edge Multiway Cut-Uncut by reduction to the node variant.
pub fn solve_emwcu(inst: &EmwcuInstance, cfg: &SolveConfig) -> Result<SolutionReport> {
    let (node, back) = emwcu_to_node(inst);
    let report = solve_mwcu(&node, cfg)?;
    let Some(SolutionBody::Vertices { vertices }) = report.solution else {
        return Ok(report);
    };
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for v in vertices {
        match back.get(&v) {
            Some(&e) => edges.push(e),
            None => {
                return Err(contract("emwcu: solution deleted an original vertex"));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let size: u64 = edges
        .iter()
        .map(|&(u, v)| inst.graph.multiplicity(u, v) as u64)
        .sum();
    if size != report.size.unwrap_or(0) {
        return Err(contract(
            "emwcu: solution deleted a strict subset of a parallel class",
        ));
    }
    Ok(SolutionReport {
        solution: Some(SolutionBody::Edges { edges }),
        ..report
    })
}

/// Definitional check for the edge variant.
pub fn is_emwcu_solution(inst: &EmwcuInstance, x: &BTreeSet<(VertexId, VertexId)>) -> bool {
    let cost: u64 = x
        .iter()
        .map(|&(u, v)| inst.graph.multiplicity(u, v) as u64)
        .sum();
    if cost > inst.budget {
        return false;
    }
    let trimmed = inst.graph.without_pairs(x);
    let comps = trimmed.connected_components();
    let mut comp_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of.insert(v, ci);
        }
    }
    let mut used = BTreeSet::new();
    for class in &inst.classes {
        let mut ids = class.iter().map(|t| comp_of[t]);
        let first = match ids.next() {
            Some(f) => f,
            None => continue,
        };
        if ids.any(|c| c != first) || !used.insert(first) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{FamilyCfg, FamilyKind};

    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    fn cfg_override(q: u64) -> SolveConfig {
        SolveConfig {
            q_override: Some(q),
            t_override: Some(3),
            family: FamilyCfg {
                kind: FamilyKind::Exhaustive,
                delta: 1e-6,
                seed: 5,
            },
            ..SolveConfig::default()
        }
    }

    fn node_inst(
        g: MultiGraph,
        classes: &[&[u32]],
        k: u64,
        extra_undeletable: &[u32],
    ) -> MwcuInstance {
        let classes: Vec<BTreeSet<u32>> =
            classes.iter().map(|c| c.iter().copied().collect()).collect();
        let mut undeletable: BTreeSet<u32> = classes.iter().flatten().copied().collect();
        undeletable.extend(extra_undeletable);
        MwcuInstance {
            graph: g,
            classes,
            budget: k,
            undeletable,
        }
    }

    fn path(n: u32) -> MultiGraph {
        let mut g = MultiGraph::with_vertices(n);
        for v in 1..n {
            g.add_edge(v, v + 1, 1).unwrap();
        }
        g
    }

    #[test]
    fn separate_two_terminals() {
        // a - x - b with a, b in distinct classes
        let inst = node_inst(path(3), &[&[1], &[3]], 1, &[]);
        let r = solve_mwcu(&inst, &cfg()).unwrap();
        assert_eq!(r.answer, Answer::Yes);
        assert_eq!(
            r.solution,
            Some(SolutionBody::Vertices { vertices: vec![2] })
        );
    }

    #[test]
    fn keep_two_terminals_together() {
        let inst = node_inst(path(3), &[&[1, 3]], 1, &[]);
        let r = solve_mwcu(&inst, &cfg()).unwrap();
        assert_eq!(r.size, Some(0));
    }

    #[test]
    fn undeletable_middle_makes_no() {
        let inst = node_inst(path(3), &[&[1], &[3]], 1, &[2]);
        let r = solve_mwcu(&inst, &cfg()).unwrap();
        assert_eq!(r.answer, Answer::No);
    }

    #[test]
    fn forced_deletion_by_three_classes() {
        // vertex 4 adjacent to terminals of three distinct classes, k = 1:
        // the path test forces it into the solution and k drops to 0
        let mut g = MultiGraph::with_vertices(4);
        for t in [1u32, 2, 3] {
            g.add_edge(t, 4, 1).unwrap();
        }
        let inst = node_inst(g.clone(), &[&[1], &[2], &[3]], 1, &[]);
        match reduce_equivalence_classes(&inst).unwrap() {
            Reduced::Instance(red, forced) => {
                assert_eq!(forced, vec![4]);
                assert_eq!(red.budget, 0);
                assert!(!red.graph.has_vertex(4));
            }
            Reduced::No => panic!("reduction should keep the instance"),
        }
        let r = solve_mwcu(&inst, &cfg()).unwrap();
        assert_eq!(r.size, Some(1));

        // same-class neighbors force nothing
        let one_class = node_inst(g, &[&[1, 2, 3]], 1, &[]);
        match reduce_equivalence_classes(&one_class).unwrap() {
            Reduced::Instance(_, forced) => assert!(forced.is_empty()),
            Reduced::No => panic!(),
        }
    }

    #[test]
    fn class_spanning_components_is_no() {
        let mut g = MultiGraph::with_vertices(4);
        g.add_edge(1, 2, 1).unwrap();
        g.add_edge(3, 4, 1).unwrap();
        let inst = node_inst(g, &[&[1, 3]], 2, &[]);
        assert!(matches!(
            reduce_equivalence_classes(&inst).unwrap(),
            Reduced::No
        ));
    }

    #[test]
    fn emwcu_triangle_and_path() {
        // triangle with two terminals in distinct classes: two edge-disjoint
        // paths, so k = 1 is not enough
        let mut tri = MultiGraph::with_vertices(3);
        tri.add_edge(1, 2, 1).unwrap();
        tri.add_edge(2, 3, 1).unwrap();
        tri.add_edge(1, 3, 1).unwrap();
        let inst = EmwcuInstance {
            graph: tri,
            classes: vec![[1].into(), [2].into()],
            budget: 1,
        };
        assert_eq!(solve_emwcu(&inst, &cfg()).unwrap().answer, Answer::No);

        let single = EmwcuInstance {
            graph: path(2),
            classes: vec![[1].into(), [2].into()],
            budget: 1,
        };
        let r = solve_emwcu(&single, &cfg()).unwrap();
        assert_eq!(
            r.solution,
            Some(SolutionBody::Edges {
                edges: vec![(1, 2)]
            })
        );
    }

    #[test]
    fn bypass_connects_neighborhood() {
        // path 1 - 2 - 3: bypassing 2 joins its neighbors directly
        let mut g = path(3);
        bypass_vertex(&mut g, 2);
        assert!(g.has_edge(1, 3));
        assert!(!g.has_vertex(2));
        // bypassing is idempotent on existing edges (no multiplicities)
        let mut tri = MultiGraph::with_vertices(3);
        tri.add_edge(1, 2, 1).unwrap();
        tri.add_edge(2, 3, 1).unwrap();
        tri.add_edge(1, 3, 1).unwrap();
        bypass_vertex(&mut tri, 2);
        assert_eq!(tri.multiplicity(1, 3), 1);
    }

    #[test]
    fn bypass_preserves_behavior_optima() {
        // deleting around a bypassed vertex must keep per-behavior optima
        let mut rng = crate::rng::SplitMix64::new(0xB1B);
        let mut spot_checks = 0;
        for _ in 0..25 {
            let n = 5 + rng.below(3) as u32;
            let inst = crate::harness::gen_mwcu_node(
                n,
                rng.below(4) as usize,
                2,
                2,
                1 + rng.below(2),
                rng.next_u64(),
            );
            let before = crate::harness::oracle_mwcu_node(&inst).unwrap();
            // pick a deletable vertex outside every optimal witness
            let Some((_, witness)) = &before else { continue };
            let candidates: Vec<u32> = inst
                .graph
                .vertex_ids()
                .into_iter()
                .filter(|v| !inst.undeletable.contains(v) && !witness.contains(v))
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let v = candidates[rng.below(candidates.len() as u64) as usize];
            let mut trimmed = inst.clone();
            bypass_vertex(&mut trimmed.graph, v);
            let after = crate::harness::oracle_mwcu_node(&trimmed).unwrap();
            let got = after.map(|(c, _)| c);
            assert_eq!(
                got,
                before.as_ref().map(|(c, _)| *c),
                "bypassing {v} changed the optimum"
            );
            spot_checks += 1;
        }
        assert!(spot_checks > 5);
    }

    #[test]
    fn behavior_enumeration_counts() {
        // no borders: just the base behavior
        assert_eq!(enumerate_mwcu_behaviors(0, 2).len(), 1);
        // one border, one class: deleted, or alive in the class, or alone
        assert_eq!(enumerate_mwcu_behaviors(1, 1).len(), 3);
    }

    #[test]
    fn override_matches_default_on_random_instances() {
        let mut rng = crate::rng::SplitMix64::new(0xC0FF);
        for round in 0..30 {
            let n = 5 + rng.below(4) as u32;
            let g = crate::harness::gen_connected_graph(n, rng.below(5) as usize, rng.next_u64());
            let mut pool: Vec<u32> = (1..=n).collect();
            rng.shuffle(&mut pool);
            let tcount = (2 + rng.below(2) as usize).min(n as usize);
            let nclasses = if tcount >= 3 && rng.chance(1, 2) { 2 } else { 1 }.min(tcount);
            let mut classes: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); nclasses];
            for (i, &t) in pool[..tcount].iter().enumerate() {
                classes[i % nclasses].insert(t);
            }
            let k = 1 + rng.below(2);
            let inst = MwcuInstance {
                graph: g.clone(),
                classes: classes.clone(),
                budget: k,
                undeletable: classes.iter().flatten().copied().collect(),
            };
            let a = solve_mwcu(&inst, &cfg()).unwrap();
            let b = solve_mwcu(&inst, &cfg_override(1)).unwrap();
            assert_eq!(a.size, b.size, "round {round} inst={inst:?}");
        }
    }
}
