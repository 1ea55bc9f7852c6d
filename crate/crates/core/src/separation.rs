//! Good edge separations, good node separations and flower separations.
//!
//! Each finder follows the same pattern: iterate over a covering family,
//! contract the selected part of the graph so that both sides of a sought
//! separation condense into heavy vertices, and look for a small cut between
//! heavy vertices with a bounded flow. When the family is deterministic a
//! negative answer is certified; with randomized families it is Monte Carlo.
//!
//! Exhaustive enumeration counterparts (used as oracles in tests and by the
//! structure diagnostic) live here as well.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::invalid;
use crate::family::SetFamily;
use crate::flow::{karger_min_cut, min_edge_cut_bounded, min_vertex_cut_bounded, CutResult};
use crate::graph::{pair, ContractionMap, EdgePair, MultiGraph, VertexId};
use crate::report::{FamilyCfg, Stats};
use crate::rng::derive_seed;
use crate::Result;

/// Partition `(V1, V2)` with more than `q` vertices on each side, both sides
/// connected, and at most `k` crossing edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodEdgeSeparation {
    pub side1: BTreeSet<VertexId>,
    pub side2: BTreeSet<VertexId>,
    pub crossing: Vec<EdgePair>,
    pub crossing_size: u64,
}

/// Separator `Z` (at most `k` deletable vertices) leaving two components
/// with more than `q` deletable vertices each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodNodeSeparation {
    pub separator: BTreeSet<VertexId>,
    pub side1: BTreeSet<VertexId>,
    pub side2: BTreeSet<VertexId>,
}

/// Small core `Z` with petals: full components hanging exactly off `Z`,
/// individually small, jointly large, next to a large stalk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowerSeparation {
    pub core: BTreeSet<VertexId>,
    pub petals: Vec<BTreeSet<VertexId>>,
}

impl FlowerSeparation {
    pub fn petal_union(&self) -> BTreeSet<VertexId> {
        self.petals.iter().flatten().copied().collect()
    }
}

fn edge_key(e: EdgePair) -> u64 {
    ((e.0 as u64) << 32) | e.1 as u64
}

fn key_edge(k: u64) -> EdgePair {
    ((k >> 32) as u32, (k & 0xffff_ffff) as u32)
}

fn family_edges(fam: &SetFamily, i: usize) -> BTreeSet<EdgePair> {
    fam.sets[i].iter().map(|&k| key_edge(k)).collect()
}

fn family_vertices(fam: &SetFamily, i: usize) -> BTreeSet<VertexId> {
    fam.sets[i].iter().map(|&k| k as VertexId).collect()
}

/// Checks every claimed property of a good edge separation.
pub fn validate_edge_separation(
    g: &MultiGraph,
    q: u64,
    k: u64,
    sep: &GoodEdgeSeparation,
) -> bool {
    let n = g.vertex_count();
    if sep.side1.len() + sep.side2.len() != n || !sep.side1.is_disjoint(&sep.side2) {
        return false;
    }
    if sep.side1.len() as u64 <= q || sep.side2.len() as u64 <= q {
        return false;
    }
    if !g.induced(&sep.side1).is_connected() || !g.induced(&sep.side2).is_connected() {
        return false;
    }
    let mut crossing = Vec::new();
    let mut size = 0u64;
    for (u, v, m) in g.edges_with_mult() {
        if sep.side1.contains(&u) != sep.side1.contains(&v) {
            crossing.push((u, v));
            size += m as u64;
        }
    }
    size <= k && crossing == sep.crossing && size == sep.crossing_size
}

pub fn validate_node_separation(
    g: &MultiGraph,
    v_inf: &BTreeSet<VertexId>,
    q: u64,
    k: u64,
    sep: &GoodNodeSeparation,
) -> bool {
    if sep.separator.len() as u64 > k || !sep.separator.is_disjoint(v_inf) {
        return false;
    }
    let rest = g.without_vertices(&sep.separator);
    let comps = rest.connected_components();
    let as_sets: Vec<BTreeSet<VertexId>> = comps.iter().map(|c| c.iter().copied().collect()).collect();
    if !as_sets.contains(&sep.side1) || !as_sets.contains(&sep.side2) || sep.side1 == sep.side2 {
        return false;
    }
    let free1 = sep.side1.difference(v_inf).count() as u64;
    let free2 = sep.side2.difference(v_inf).count() as u64;
    free1 > q && free2 > q
}

pub fn validate_flower_separation(
    g: &MultiGraph,
    v_inf: &BTreeSet<VertexId>,
    t_b: &BTreeSet<VertexId>,
    q: u64,
    k: u64,
    f: &FlowerSeparation,
) -> bool {
    let zlen = f.core.len() as u64;
    if zlen == 0 || zlen > k || !f.core.is_disjoint(v_inf) {
        return false;
    }
    let rest = g.without_vertices(&f.core);
    let comps: Vec<BTreeSet<VertexId>> = rest
        .connected_components()
        .into_iter()
        .map(|c| c.into_iter().collect())
        .collect();
    let mut petal_union: BTreeSet<VertexId> = BTreeSet::new();
    for p in &f.petals {
        if !comps.contains(p) {
            return false;
        }
        if !p.is_disjoint(t_b) {
            return false;
        }
        if p.difference(v_inf).count() as u64 > q {
            return false;
        }
        if g.neighborhood_of_set(p) != f.core {
            return false;
        }
        for v in p {
            if !petal_union.insert(*v) {
                return false; // repeated petal
            }
        }
    }
    if petal_union.difference(v_inf).count() as u64 <= q {
        return false;
    }
    let stalk: BTreeSet<VertexId> = g
        .vertex_set()
        .difference(&f.core)
        .copied()
        .filter(|v| !petal_union.contains(v))
        .collect();
    stalk.difference(v_inf).count() as u64 > q
}

/// Finds a `(q, k)`-good edge separation by iterating a covering family over
/// the edge set, or certifies (in deterministic family modes) that none
/// exists. Ties are broken by family index, then ascending heavy-pair ids.
pub fn find_good_edge_separation(
    g: &MultiGraph,
    q: u64,
    k: u64,
    fam: &FamilyCfg,
    stats: &mut Stats,
) -> Result<Option<GoodEdgeSeparation>> {
    if !g.is_connected() {
        return Err(invalid("find_good_edge_separation: disconnected input"));
    }
    if (g.vertex_count() as u64) < 2 * q + 2 {
        return Ok(None);
    }
    let universe: Vec<u64> = g.edge_pairs().into_iter().map(edge_key).collect();
    let a = (2 * q).min(u32::MAX as u64) as usize;
    let family = fam.build(universe, a, k as usize, "edge-sep")?;
    stats.failure_bound += family.provenance.pair_failure_bound;
    for i in 0..family.len() {
        stats.family_sets += 1;
        let s = family_edges(&family, i);
        let (h, iota) = g.contract_edges(&s)?;
        let heavy = heavy_vertices(&h, &iota, q, None);
        if heavy.len() < 2 {
            continue;
        }
        for (ai, &u1) in heavy.iter().enumerate() {
            for &u2 in &heavy[ai + 1..] {
                if let CutResult::Cut { cut, .. } = min_edge_cut_bounded(&h, u1, u2, k)? {
                    let cut_set: BTreeSet<EdgePair> = cut.iter().copied().collect();
                    let sep = edge_separation_from_cut(g, &iota, u1, u2, &cut_set);
                    if validate_edge_separation(g, q, k, &sep) {
                        stats.separations += 1;
                        return Ok(Some(sep));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Vertices of `h` whose preimage (outside `v_inf`, when given) exceeds `q`.
fn heavy_vertices(
    h: &MultiGraph,
    iota: &ContractionMap,
    q: u64,
    v_inf: Option<&BTreeSet<VertexId>>,
) -> Vec<VertexId> {
    let mut weight: alloc::collections::BTreeMap<VertexId, u64> = alloc::collections::BTreeMap::new();
    for (v, img) in iota.iter() {
        if v_inf.map_or(true, |inf| !inf.contains(&v)) {
            *weight.entry(img).or_insert(0) += 1;
        }
    }
    h.vertex_ids()
        .into_iter()
        .filter(|v| weight.get(v).copied().unwrap_or(0) > q)
        .collect()
}

fn min_preimage(iota: &ContractionMap, img: VertexId, avoid: Option<&BTreeSet<VertexId>>) -> VertexId {
    iota.iter()
        .filter(|&(v, i)| i == img && avoid.map_or(true, |a| !a.contains(&v)))
        .map(|(v, _)| v)
        .next()
        .expect("image has a preimage")
}

/// Reconstructs the separation induced by a cut found after contraction:
/// the cut is lifted back to original edge pairs and the two sides are the
/// reachability sets of the smallest-id witnesses.
fn edge_separation_from_cut(
    g: &MultiGraph,
    iota: &ContractionMap,
    u1: VertexId,
    u2: VertexId,
    h_cut: &BTreeSet<EdgePair>,
) -> GoodEdgeSeparation {
    let cut: BTreeSet<EdgePair> = g
        .edge_pairs()
        .into_iter()
        .filter(|&(x, y)| h_cut.contains(&pair(iota.image(x), iota.image(y))))
        .collect();
    let v1 = min_preimage(iota, u1, None);
    let v2 = min_preimage(iota, u2, None);
    let trimmed = g.without_pairs(&cut);
    let side1 = trimmed.component_of(v1);
    let side2 = trimmed.component_of(v2);
    let mut crossing = Vec::new();
    let mut size = 0u64;
    for (u, v, m) in g.edges_with_mult() {
        if side1.contains(&u) != side1.contains(&v) {
            crossing.push((u, v));
            size += m as u64;
        }
    }
    GoodEdgeSeparation {
        side1,
        side2,
        crossing,
        crossing_size: size,
    }
}

/// Karger-based variant: after contracting a family set, every edge with a
/// small endpoint is contracted as well, leaving only heavy vertices; any
/// global min cut of size at most `k` then induces a good separation.
pub fn find_good_edge_separation_randomized(
    g: &MultiGraph,
    q: u64,
    k: u64,
    fam: &FamilyCfg,
    karger_trials: u64,
    stats: &mut Stats,
) -> Result<Option<GoodEdgeSeparation>> {
    if !g.is_connected() {
        return Err(invalid("find_good_edge_separation_randomized: disconnected input"));
    }
    if (g.vertex_count() as u64) < 2 * q + 2 {
        return Ok(None);
    }
    let universe: Vec<u64> = g.edge_pairs().into_iter().map(edge_key).collect();
    let family = fam.build(universe, (2 * q) as usize, k as usize, "edge-sep-fast")?;
    stats.failure_bound += family.provenance.pair_failure_bound;
    for i in 0..family.len() {
        stats.family_sets += 1;
        let s = family_edges(&family, i);
        // fused pass: contract the family set, then every edge that keeps a
        // small endpoint, materializing the graph only once
        let mut dsu = crate::graph::Dsu::new(g.vertex_ids());
        for &(u, v) in &s {
            dsu.union(u, v);
        }
        let mut weight: alloc::collections::BTreeMap<VertexId, u64> =
            alloc::collections::BTreeMap::new();
        for v in g.vertex_ids() {
            *weight.entry(dsu.find(v)).or_insert(0) += 1;
        }
        let mut grew = true;
        while grew {
            grew = false;
            for (u, v) in g.edge_pairs() {
                let (ru, rv) = (dsu.find(u), dsu.find(v));
                if ru != rv && (weight[&ru] <= q || weight[&rv] <= q) {
                    let merged = weight[&ru] + weight[&rv];
                    dsu.union(u, v);
                    let root = dsu.find(u);
                    weight.insert(root, merged);
                    grew = true;
                }
            }
        }
        let (h, iota) = g.quotient_by(&mut dsu)?;
        if h.vertex_count() < 2 {
            continue;
        }
        let trial_seed = derive_seed(fam.seed, "edge-sep-karger", i as u64);
        let (size, cut) = karger_min_cut(&h, karger_trials, trial_seed);
        if !cut.is_empty() && size <= k {
            let cut_set: BTreeSet<EdgePair> = cut.iter().copied().collect();
            let sides = h.without_pairs(&cut_set).connected_components();
            if sides.len() == 2 {
                let sep = edge_separation_from_cut(g, &iota, sides[0][0], sides[1][0], &cut_set);
                if validate_edge_separation(g, q, k, &sep) {
                    stats.separations += 1;
                    return Ok(Some(sep));
                }
            }
        }
    }
    Ok(None)
}

/// Finds a `(q, k)`-good node separation with undeletable set `v_inf`, or
/// concludes that none exists (certified for deterministic families).
pub fn find_good_node_separation(
    g: &MultiGraph,
    v_inf: &BTreeSet<VertexId>,
    q: u64,
    k: u64,
    fam: &FamilyCfg,
    stats: &mut Stats,
) -> Result<Option<GoodNodeSeparation>> {
    if !g.is_connected() {
        return Err(invalid("find_good_node_separation: disconnected input"));
    }
    let deletable: Vec<VertexId> = g
        .vertex_ids()
        .into_iter()
        .filter(|v| !v_inf.contains(v))
        .collect();
    if (deletable.len() as u64) < 2 * q + 2 {
        return Ok(None);
    }
    let universe: Vec<u64> = deletable.iter().map(|&v| v as u64).collect();
    let family = fam.build(universe, (2 * q + 2) as usize, k as usize, "node-sep")?;
    stats.failure_bound += family.provenance.pair_failure_bound;
    for i in 0..family.len() {
        stats.family_sets += 1;
        let s = family_vertices(&family, i);
        let mut merged: BTreeSet<VertexId> = s.clone();
        merged.extend(v_inf.iter().copied());
        let inside: BTreeSet<EdgePair> = g
            .edge_pairs()
            .into_iter()
            .filter(|&(u, v)| merged.contains(&u) && merged.contains(&v))
            .collect();
        let (h, iota) = g.contract_edges(&inside)?;
        let s_images: BTreeSet<VertexId> = merged.iter().map(|&v| iota.image(v)).collect();
        let big: Vec<VertexId> = heavy_vertices(&h, &iota, q, Some(v_inf))
            .into_iter()
            .filter(|v| s_images.contains(v))
            .collect();
        if big.len() < 2 {
            continue;
        }
        for (ai, &u1) in big.iter().enumerate() {
            for &u2 in &big[ai + 1..] {
                let mut forbidden = s_images.clone();
                forbidden.remove(&u1);
                forbidden.remove(&u2);
                if let CutResult::Cut { cut, .. } =
                    min_vertex_cut_bounded(&h, u1, u2, k, &forbidden)?
                {
                    let z: BTreeSet<VertexId> = cut.into_iter().collect();
                    let v1 = min_preimage(&iota, u1, Some(v_inf));
                    let v2 = min_preimage(&iota, u2, Some(v_inf));
                    let rest = g.without_vertices(&z);
                    let sep = GoodNodeSeparation {
                        separator: z,
                        side1: rest.component_of(v1),
                        side2: rest.component_of(v2),
                    };
                    if validate_node_separation(g, v_inf, q, k, &sep) {
                        stats.separations += 1;
                        return Ok(Some(sep));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Tests whether `core` is the core of some `(q, k)`-flower separation, via
/// the component-subset dynamic program; petals are the first feasible
/// choice in component order.
pub fn flower_with_core(
    g: &MultiGraph,
    v_inf: &BTreeSet<VertexId>,
    t_b: &BTreeSet<VertexId>,
    q: u64,
    k: u64,
    core: &BTreeSet<VertexId>,
) -> Option<FlowerSeparation> {
    let zlen = core.len() as u64;
    if zlen == 0 || zlen > k || !core.is_disjoint(v_inf) {
        return None;
    }
    let rest = g.without_vertices(core);
    let comps: Vec<BTreeSet<VertexId>> = rest
        .connected_components()
        .into_iter()
        .map(|c| c.into_iter().collect())
        .collect();
    let free_total: u64 = g
        .vertex_set()
        .difference(v_inf)
        .filter(|v| !core.contains(v))
        .count() as u64;
    if free_total < 2 * q + 2 {
        return None;
    }
    let hi = (free_total - q - 1) as usize;
    let lo = (q + 1) as usize;
    // eligibility and weights
    let mut weights: Vec<Option<usize>> = Vec::with_capacity(comps.len());
    for c in &comps {
        let eligible = c.is_disjoint(t_b)
            && c.difference(v_inf).count() as u64 <= q
            && g.neighborhood_of_set(c) == *core;
        weights.push(if eligible {
            Some(c.difference(v_inf).count())
        } else {
            None
        });
    }
    // subset-sum over eligible components with backlinks
    let mut reach: Vec<Option<(usize, bool)>> = vec![None; hi + 1]; // (prev prefix, took?)
    reach[0] = Some((usize::MAX, false));
    let mut tables: Vec<Vec<Option<(usize, bool)>>> = Vec::with_capacity(comps.len() + 1);
    tables.push(reach.clone());
    for (j, w) in weights.iter().enumerate() {
        let mut next = tables[j].clone();
        if let Some(w) = *w {
            for sum in 0..=hi {
                if next[sum].is_none() && sum >= w && tables[j][sum - w].is_some() {
                    next[sum] = Some((j, true));
                }
            }
        }
        tables.push(next);
    }
    let last = tables.last().unwrap();
    let target = (lo..=hi).find(|&s| last[s].is_some())?;
    // walk backlinks: entries record which component completed the sum
    let mut petals_idx = Vec::new();
    let mut sum = target;
    let mut level = comps.len();
    while sum > 0 {
        // find the level where this sum first became reachable
        while level > 0 && tables[level - 1][sum].is_some() {
            level -= 1;
        }
        let (j, took) = tables[level][sum].unwrap();
        debug_assert!(took);
        petals_idx.push(j);
        sum -= weights[j].unwrap();
    }
    petals_idx.sort_unstable();
    let flower = FlowerSeparation {
        core: core.clone(),
        petals: petals_idx.into_iter().map(|j| comps[j].clone()).collect(),
    };
    validate_flower_separation(g, v_inf, t_b, q, k, &flower).then_some(flower)
}

/// Finds a `(q, k)`-flower separation w.r.t. `t_b`, or concludes none exists
/// (certified for deterministic families).
pub fn find_flower_separation(
    g: &MultiGraph,
    v_inf: &BTreeSet<VertexId>,
    t_b: &BTreeSet<VertexId>,
    q: u64,
    k: u64,
    fam: &FamilyCfg,
    stats: &mut Stats,
) -> Result<Option<FlowerSeparation>> {
    if !g.is_connected() {
        return Err(invalid("find_flower_separation: disconnected input"));
    }
    let deletable: Vec<VertexId> = g
        .vertex_ids()
        .into_iter()
        .filter(|v| !v_inf.contains(v))
        .collect();
    if (deletable.len() as u64) < 2 * q + 3 {
        return Ok(None);
    }
    let universe: Vec<u64> = deletable.iter().map(|&v| v as u64).collect();
    let family = fam.build(universe, q as usize, k as usize, "flower-sep")?;
    stats.failure_bound += family.provenance.pair_failure_bound;
    for i in 0..family.len() {
        stats.family_sets += 1;
        let s = family_vertices(&family, i);
        let mut merged: BTreeSet<VertexId> = s.clone();
        merged.extend(v_inf.iter().copied());
        let inside: BTreeSet<EdgePair> = g
            .edge_pairs()
            .into_iter()
            .filter(|&(u, v)| merged.contains(&u) && merged.contains(&v))
            .collect();
        let (h, iota) = g.contract_edges(&inside)?;
        let s_images: BTreeSet<VertexId> = merged.iter().map(|&v| iota.image(v)).collect();
        // interesting: few enough deletable preimages
        let mut free_weight: alloc::collections::BTreeMap<VertexId, u64> =
            alloc::collections::BTreeMap::new();
        for (v, img) in iota.iter() {
            if !v_inf.contains(&v) {
                *free_weight.entry(img).or_insert(0) += 1;
            }
        }
        for &u in &s_images {
            if free_weight.get(&u).copied().unwrap_or(0) > q {
                continue;
            }
            let nh: BTreeSet<VertexId> = h.neighbors(u).into_iter().collect();
            if nh.is_empty() || nh.len() as u64 > k {
                continue;
            }
            // adjacent merged blobs would have been contracted together, so
            // the neighborhood consists of original vertices
            debug_assert!(nh.iter().all(|x| !s_images.contains(x)));
            if let Some(f) = flower_with_core(g, v_inf, t_b, q, k, &nh) {
                stats.separations += 1;
                return Ok(Some(f));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration oracles (tiny graphs); used by tests and by the
// structure diagnostic below.
// ---------------------------------------------------------------------------

const ENUM_LIMIT: usize = 16;

/// Enumerates all vertex bipartitions; exact existence of a good edge
/// separation for graphs with at most 16 vertices.
pub fn exhaustive_edge_separation_exists(g: &MultiGraph, q: u64, k: u64) -> Result<bool> {
    let n = g.vertex_count();
    if n > ENUM_LIMIT {
        return Err(crate::Error::SizeGuard {
            what: "edge separation enumeration",
            limit: ENUM_LIMIT as u64,
            actual: n as u64,
        });
    }
    let ids = g.vertex_ids();
    for mask in 1u32..(1u32 << n.saturating_sub(1)) {
        // fix ids[n-1] on side 2 to halve the space
        let side1: BTreeSet<VertexId> = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let side2: BTreeSet<VertexId> = ids
            .iter()
            .filter(|v| !side1.contains(v))
            .copied()
            .collect();
        if side1.len() as u64 <= q || side2.len() as u64 <= q {
            continue;
        }
        let crossing: u64 = g
            .edges_with_mult()
            .into_iter()
            .filter(|&(u, v, _)| side1.contains(&u) != side1.contains(&v))
            .map(|(_, _, m)| m as u64)
            .sum();
        if crossing <= k
            && g.induced(&side1).is_connected()
            && g.induced(&side2).is_connected()
        {
            return Ok(true);
        }
    }
    Ok(false)
}

fn subsets_up_to(items: &[VertexId], cap: usize) -> Vec<BTreeSet<VertexId>> {
    let mut out = vec![BTreeSet::new()];
    let mut frontier: Vec<(usize, BTreeSet<VertexId>)> = vec![(0, BTreeSet::new())];
    for _ in 0..cap {
        let mut next = Vec::new();
        for (start, cur) in frontier {
            for i in start..items.len() {
                let mut s = cur.clone();
                s.insert(items[i]);
                out.push(s.clone());
                next.push((i + 1, s));
            }
        }
        frontier = next;
    }
    out
}

/// Exact existence of a good node separation by enumerating separators.
pub fn exhaustive_node_separation_exists(
    g: &MultiGraph,
    v_inf: &BTreeSet<VertexId>,
    q: u64,
    k: u64,
) -> Result<bool> {
    let n = g.vertex_count();
    if n > ENUM_LIMIT {
        return Err(crate::Error::SizeGuard {
            what: "node separation enumeration",
            limit: ENUM_LIMIT as u64,
            actual: n as u64,
        });
    }
    let deletable: Vec<VertexId> = g
        .vertex_ids()
        .into_iter()
        .filter(|v| !v_inf.contains(v))
        .collect();
    for z in subsets_up_to(&deletable, k as usize) {
        let rest = g.without_vertices(&z);
        let mut big = 0;
        for comp in rest.connected_components() {
            if comp.iter().filter(|v| !v_inf.contains(v)).count() as u64 > q {
                big += 1;
            }
        }
        if big >= 2 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact existence of a flower separation by enumerating cores.
pub fn exhaustive_flower_exists(
    g: &MultiGraph,
    v_inf: &BTreeSet<VertexId>,
    t_b: &BTreeSet<VertexId>,
    q: u64,
    k: u64,
) -> Result<bool> {
    let n = g.vertex_count();
    if n > ENUM_LIMIT {
        return Err(crate::Error::SizeGuard {
            what: "flower enumeration",
            limit: ENUM_LIMIT as u64,
            actual: n as u64,
        });
    }
    let deletable: Vec<VertexId> = g
        .vertex_ids()
        .into_iter()
        .filter(|v| !v_inf.contains(v))
        .collect();
    for z in subsets_up_to(&deletable, k as usize) {
        if z.is_empty() {
            continue;
        }
        if flower_with_core(g, v_inf, t_b, q, k, &z).is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of the structure diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureOutcome {
    /// The component bounds hold for every small deletion set.
    Holds,
    /// Caller misuse: a separation exists, so the bounds are not implied.
    SeparationExists,
    /// A deletion set violating a bound, with a short description.
    Violated(alloc::string::String),
}

/// Verifies the structural consequence of having no separations: for every
/// `Z ⊆ V \ v_inf` with `|Z| ≤ k`, `G \ Z` has at most
/// `(2q+2)(2^k - 1) + |T_b| + 1` components containing a deletable vertex,
/// of which at most one has more than `q` deletable vertices; and the edge
/// analogue (at most `k+1` components, all but one of size at most `q`) for
/// every edge set of total multiplicity at most `k`.
pub fn check_structure_bound(
    g: &MultiGraph,
    v_inf: &BTreeSet<VertexId>,
    t_b: &BTreeSet<VertexId>,
    q: u64,
    k: u64,
) -> Result<StructureOutcome> {
    let n = g.vertex_count();
    if n > 12 {
        return Err(crate::Error::SizeGuard {
            what: "check_structure_bound",
            limit: 12,
            actual: n as u64,
        });
    }
    if n == 0 {
        return Ok(StructureOutcome::Holds);
    }
    if exhaustive_node_separation_exists(g, v_inf, q, k)?
        || exhaustive_flower_exists(g, v_inf, t_b, q, k)?
    {
        return Ok(StructureOutcome::SeparationExists);
    }
    let node_limit = (2 * q + 2) * ((1u64 << k) - 1) + t_b.len() as u64 + 1;
    let deletable: Vec<VertexId> = g
        .vertex_ids()
        .into_iter()
        .filter(|v| !v_inf.contains(v))
        .collect();
    for z in subsets_up_to(&deletable, k as usize) {
        let rest = g.without_vertices(&z);
        let mut with_free = 0u64;
        let mut big = 0u64;
        for comp in rest.connected_components() {
            let free = comp.iter().filter(|v| !v_inf.contains(v)).count() as u64;
            if free > 0 {
                with_free += 1;
            }
            if free > q {
                big += 1;
            }
        }
        if with_free > node_limit || big > 1 {
            return Ok(StructureOutcome::Violated(alloc::format!(
                "node bound fails for Z = {z:?}: {with_free} components with deletable vertices, {big} big"
            )));
        }
    }
    // edge analogue, meaningful when no good edge separation exists
    if g.is_connected() && !exhaustive_edge_separation_exists(g, q, k)? {
        let pairs = g.edge_pairs();
        let mut stack: Vec<(usize, Vec<EdgePair>, u64)> = vec![(0, Vec::new(), 0)];
        while let Some((start, cur, cost)) = stack.pop() {
            let drop: BTreeSet<EdgePair> = cur.iter().copied().collect();
            let comps = g.without_pairs(&drop).connected_components();
            let big = comps.iter().filter(|c| c.len() as u64 > q).count();
            if comps.len() as u64 > k + 1 || big > 1 {
                return Ok(StructureOutcome::Violated(alloc::format!(
                    "edge bound fails for F = {cur:?}: {} components, {big} big",
                    comps.len()
                )));
            }
            for i in start..pairs.len() {
                let m = g.multiplicity(pairs[i].0, pairs[i].1) as u64;
                if cost + m <= k {
                    let mut next = cur.clone();
                    next.push(pairs[i]);
                    stack.push((i + 1, next, cost + m));
                }
            }
        }
    }
    Ok(StructureOutcome::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::FamilyKind;

    fn famcfg(kind: FamilyKind) -> FamilyCfg {
        FamilyCfg {
            kind,
            delta: 1e-6,
            seed: 7,
        }
    }

    fn two_k4_bridge() -> MultiGraph {
        let mut g = MultiGraph::with_vertices(8);
        for base in [0u32, 4] {
            for u in 1..=4 {
                for v in (u + 1)..=4 {
                    g.add_edge(base + u, base + v, 1).unwrap();
                }
            }
        }
        g.add_edge(4, 5, 1).unwrap();
        g
    }

    #[test]
    fn finds_bridge_between_cliques() {
        let g = two_k4_bridge();
        let mut stats = Stats::default();
        let sep = find_good_edge_separation(&g, 2, 1, &famcfg(FamilyKind::Exhaustive), &mut stats)
            .unwrap()
            .expect("separation exists");
        assert_eq!(sep.crossing, vec![(4, 5)]);
        assert_eq!(sep.side1.len(), 4);
        assert_eq!(sep.side2.len(), 4);
        assert!(validate_edge_separation(&g, 2, 1, &sep));
        assert!(exhaustive_edge_separation_exists(&g, 2, 1).unwrap());
    }

    #[test]
    fn k7_has_no_separation() {
        let mut g = MultiGraph::with_vertices(7);
        for u in 1..=7u32 {
            for v in (u + 1)..=7 {
                g.add_edge(u, v, 1).unwrap();
            }
        }
        let mut stats = Stats::default();
        // perfect-hash family keeps this below the exhaustive universe guard
        let sep =
            find_good_edge_separation(&g, 2, 2, &famcfg(FamilyKind::PerfectHash), &mut stats)
                .unwrap();
        assert!(sep.is_none());
        assert!(!exhaustive_edge_separation_exists(&g, 2, 2).unwrap());
    }

    #[test]
    fn path_middle_split() {
        let mut g = MultiGraph::with_vertices(7);
        for v in 1..7u32 {
            g.add_edge(v, v + 1, 1).unwrap();
        }
        let mut stats = Stats::default();
        let sep = find_good_edge_separation(&g, 2, 1, &famcfg(FamilyKind::Exhaustive), &mut stats)
            .unwrap()
            .expect("a 1-edge split with both sides > 2 exists");
        assert!(validate_edge_separation(&g, 2, 1, &sep));
        assert!(sep.side1.len() >= 3 && sep.side2.len() >= 3);
    }

    #[test]
    fn randomized_finder_matches() {
        let g = two_k4_bridge();
        let mut hits = 0;
        for seed in 0..100u64 {
            let cfg = FamilyCfg {
                kind: FamilyKind::Randomized,
                delta: 1e-4,
                seed,
            };
            let mut stats = Stats::default();
            if let Some(sep) =
                find_good_edge_separation_randomized(&g, 2, 1, &cfg, 200, &mut stats).unwrap()
            {
                assert!(validate_edge_separation(&g, 2, 1, &sep));
                hits += 1;
            }
        }
        assert!(hits >= 95, "randomized finder succeeded only {hits}/100");
    }

    fn two_k4_cutvertex() -> MultiGraph {
        // two K4's sharing articulation vertex 9
        let mut g = MultiGraph::with_vertices(9);
        g.remove_vertex(5);
        g.remove_vertex(6);
        g.remove_vertex(7);
        g.remove_vertex(8);
        for v in [5u32, 6, 7, 8] {
            g.add_vertex(v);
        }
        for set in [[1u32, 2, 3], [5u32, 6, 7]] {
            for i in 0..3 {
                for j in (i + 1)..3 {
                    g.add_edge(set[i], set[j], 1).unwrap();
                }
                g.add_edge(set[i], 9, 1).unwrap();
            }
        }
        g.remove_vertex(4);
        g.remove_vertex(8);
        g
    }

    #[test]
    fn node_separation_at_cut_vertex() {
        let g = two_k4_cutvertex();
        let mut stats = Stats::default();
        let sep = find_good_node_separation(
            &g,
            &BTreeSet::new(),
            2,
            1,
            &famcfg(FamilyKind::Exhaustive),
            &mut stats,
        )
        .unwrap()
        .expect("cut vertex separates");
        assert_eq!(sep.separator, [9].into_iter().collect());
        assert!(validate_node_separation(&g, &BTreeSet::new(), 2, 1, &sep));

        // making the articulation point undeletable kills the separation
        let vinf: BTreeSet<u32> = [9].into_iter().collect();
        let none =
            find_good_node_separation(&g, &vinf, 2, 1, &famcfg(FamilyKind::Exhaustive), &mut stats)
                .unwrap();
        assert!(none.is_none());
        assert!(!exhaustive_node_separation_exists(&g, &vinf, 2, 1).unwrap());
    }

    #[test]
    fn k5_has_no_node_separation() {
        let mut g = MultiGraph::with_vertices(5);
        for u in 1..=5u32 {
            for v in (u + 1)..=5 {
                g.add_edge(u, v, 1).unwrap();
            }
        }
        let mut stats = Stats::default();
        let sep = find_good_node_separation(
            &g,
            &BTreeSet::new(),
            1,
            2,
            &famcfg(FamilyKind::Exhaustive),
            &mut stats,
        )
        .unwrap();
        assert!(sep.is_none());
        assert!(!exhaustive_node_separation_exists(&g, &BTreeSet::new(), 1, 2).unwrap());
    }

    fn star_with_tail() -> MultiGraph {
        // center 1 with leaves 2,3,4 plus path 1-5-6
        let mut g = MultiGraph::with_vertices(6);
        for leaf in [2u32, 3, 4] {
            g.add_edge(1, leaf, 1).unwrap();
        }
        g.add_edge(1, 5, 1).unwrap();
        g.add_edge(5, 6, 1).unwrap();
        g
    }

    #[test]
    fn flower_at_star_center() {
        let g = star_with_tail();
        let mut stats = Stats::default();
        let f = find_flower_separation(
            &g,
            &BTreeSet::new(),
            &BTreeSet::new(),
            1,
            1,
            &famcfg(FamilyKind::Exhaustive),
            &mut stats,
        )
        .unwrap()
        .expect("leaves form petals at core {1}");
        assert_eq!(f.core, [1].into_iter().collect());
        assert!(f.petal_union().len() >= 2);
        assert!(f.petals.iter().all(|p| p.len() == 1 && !p.contains(&5)));
        assert!(validate_flower_separation(
            &g,
            &BTreeSet::new(),
            &BTreeSet::new(),
            1,
            1,
            &f
        ));
    }

    #[test]
    fn flower_respects_border_terminals() {
        let g = star_with_tail();
        let t_b: BTreeSet<u32> = [2].into_iter().collect();
        let mut stats = Stats::default();
        let f = find_flower_separation(
            &g,
            &BTreeSet::new(),
            &t_b,
            1,
            1,
            &famcfg(FamilyKind::Exhaustive),
            &mut stats,
        )
        .unwrap()
        .expect("two other leaves still beat q = 1");
        assert!(f.petals.iter().all(|p| !p.contains(&2)));
        assert!(validate_flower_separation(&g, &BTreeSet::new(), &t_b, 1, 1, &f));
    }

    #[test]
    fn path_has_no_flower() {
        let mut g = MultiGraph::with_vertices(4);
        for v in 1..4u32 {
            g.add_edge(v, v + 1, 1).unwrap();
        }
        let mut stats = Stats::default();
        let f = find_flower_separation(
            &g,
            &BTreeSet::new(),
            &BTreeSet::new(),
            1,
            1,
            &famcfg(FamilyKind::Exhaustive),
            &mut stats,
        )
        .unwrap();
        assert!(f.is_none());
        assert!(
            !exhaustive_flower_exists(&g, &BTreeSet::new(), &BTreeSet::new(), 1, 1).unwrap()
        );
    }

    #[test]
    fn structure_bound_on_k5() {
        let mut g = MultiGraph::with_vertices(5);
        for u in 1..=5u32 {
            for v in (u + 1)..=5 {
                g.add_edge(u, v, 1).unwrap();
            }
        }
        assert_eq!(
            check_structure_bound(&g, &BTreeSet::new(), &BTreeSet::new(), 1, 2).unwrap(),
            StructureOutcome::Holds
        );
    }

    #[test]
    fn structure_bound_flags_misuse() {
        let g = two_k4_bridge();
        // a good node separation exists at q = 2, k = 1 (drop one bridge endpoint)
        assert_eq!(
            check_structure_bound(&g, &BTreeSet::new(), &BTreeSet::new(), 2, 1).unwrap(),
            StructureOutcome::SeparationExists
        );
    }

    #[test]
    fn structure_bound_single_vertex() {
        let g = MultiGraph::with_vertices(1);
        assert_eq!(
            check_structure_bound(&g, &BTreeSet::new(), &BTreeSet::new(), 1, 1).unwrap(),
            StructureOutcome::Holds
        );
    }

    #[test]
    fn ph_mode_agrees_with_enumeration_randomly() {
        let mut seedgen = crate::rng::SplitMix64::new(0xBEEF);
        for _ in 0..60 {
            let n = 4 + (seedgen.next_u64() % 6) as u32;
            let extra = (seedgen.next_u64() % 6) as usize;
            let g = crate::harness::gen_connected_graph(n, extra, seedgen.next_u64());
            for (q, k) in [(1u64, 1u64), (2, 1), (1, 2), (2, 2)] {
                let mut stats = Stats::default();
                let found =
                    find_good_node_separation(&g, &BTreeSet::new(), q, k, &famcfg(FamilyKind::PerfectHash), &mut stats)
                        .unwrap();
                let exists = exhaustive_node_separation_exists(&g, &BTreeSet::new(), q, k).unwrap();
                assert_eq!(found.is_some(), exists, "n={n} q={q} k={k} g={g:?}");
                if let Some(sep) = found {
                    assert!(validate_node_separation(&g, &BTreeSet::new(), q, k, &sep));
                }
            }
        }
    }
}
