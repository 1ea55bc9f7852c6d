//! Brute-force oracles, random instance generators, and the hardness
//! reductions used as a test-instance source.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::graph::{pair, EdgePair, MultiGraph, VertexId};
use crate::rng::SplitMix64;
use crate::steiner::SteinerInstance;
use crate::Result;

/// Size guards for the exhaustive oracles.
const ORACLE_N: usize = 12;
const ORACLE_K: u64 = 4;
const ORACLE_S: u32 = 4;

fn oracle_guards(n: usize, k: u64, s: u32) -> Result<()> {
    if n > ORACLE_N {
        return Err(Error::SizeGuard {
            what: "oracle vertex count",
            limit: ORACLE_N as u64,
            actual: n as u64,
        });
    }
    if k > ORACLE_K {
        return Err(Error::SizeGuard {
            what: "oracle budget",
            limit: ORACLE_K,
            actual: k,
        });
    }
    if s > ORACLE_S {
        return Err(Error::SizeGuard {
            what: "oracle component target",
            limit: ORACLE_S as u64,
            actual: s as u64,
        });
    }
    Ok(())
}

/// Exhaustive Steiner Cut oracle: the lexicographically first minimum-cost
/// edge set leaving at least `parts` terminal components, or `None`.
pub fn oracle_steiner(inst: &SteinerInstance) -> Result<Option<(u64, Vec<EdgePair>)>> {
    oracle_guards(inst.graph.vertex_count(), inst.budget, inst.parts)?;
    for (x, cost) in edge_subsets_within_budget(&inst.graph, inst.budget) {
        let trimmed = inst.graph.without_pairs(&x);
        let tc = trimmed
            .connected_components()
            .iter()
            .filter(|c| c.iter().any(|v| inst.terminals.contains(v)))
            .count() as u32;
        if tc >= inst.parts {
            return Ok(Some((cost, x.into_iter().collect())));
        }
    }
    Ok(None)
}

/// Exhaustive Node Multiway Cut-Uncut oracle.
pub fn oracle_mwcu_node(
    inst: &crate::mwcu::MwcuInstance,
) -> Result<Option<(u64, Vec<VertexId>)>> {
    oracle_guards(inst.graph.vertex_count(), inst.budget, 0)?;
    let deletable: Vec<VertexId> = inst
        .graph
        .vertex_ids()
        .into_iter()
        .filter(|v| !inst.undeletable.contains(v))
        .collect();
    for x in vertex_subsets_within_budget(&deletable, inst.budget) {
        if crate::mwcu::is_mwcu_solution(inst, &x) {
            return Ok(Some((x.len() as u64, x.into_iter().collect())));
        }
    }
    Ok(None)
}

/// Exhaustive Edge Multiway Cut-Uncut oracle.
pub fn oracle_mwcu_edge(
    inst: &crate::mwcu::EmwcuInstance,
) -> Result<Option<(u64, Vec<EdgePair>)>> {
    oracle_guards(inst.graph.vertex_count(), inst.budget, 0)?;
    for (x, cost) in edge_subsets_within_budget(&inst.graph, inst.budget) {
        if crate::mwcu::is_emwcu_solution(inst, &x) {
            return Ok(Some((cost, x.into_iter().collect())));
        }
    }
    Ok(None)
}

/// Exhaustive Node Unique Label Cover oracle.
pub fn oracle_ulc_node(
    inst: &crate::ulc::UlcInstance,
) -> Result<Option<(u64, Vec<VertexId>)>> {
    oracle_guards(inst.graph.vertex_count(), inst.budget, 0)?;
    let vertices = inst.graph.vertex_ids();
    for x in vertex_subsets_within_budget(&vertices, inst.budget) {
        let remaining = inst.graph.without_vertices(&x);
        let mut feasible = true;
        for comp in remaining.connected_components() {
            let comp_set: BTreeSet<VertexId> = comp.iter().copied().collect();
            if crate::ulc::enumerate_labelings(inst, &comp_set)?.is_empty() {
                feasible = false;
                break;
            }
        }
        if feasible {
            return Ok(Some((x.len() as u64, x.into_iter().collect())));
        }
    }
    Ok(None)
}

/// Exhaustive Edge Unique Label Cover oracle.
pub fn oracle_ulc_edge(
    inst: &crate::ulc::EulcInstance,
) -> Result<Option<(u64, Vec<EdgePair>)>> {
    if inst.graph.vertex_count() > ORACLE_N * 8 {
        return Err(Error::SizeGuard {
            what: "edge ulc oracle vertex count",
            limit: (ORACLE_N * 8) as u64,
            actual: inst.graph.vertex_count() as u64,
        });
    }
    // view as a node instance with no deletions to reuse the propagation
    let as_node = crate::ulc::UlcInstance {
        graph: inst.graph.clone(),
        sigma: inst.sigma,
        budget: 0,
        domains: inst.domains.clone(),
        constraints: inst.constraints.clone(),
    };
    for (x, cost) in edge_subsets_within_budget(&inst.graph, inst.budget) {
        let trimmed = crate::ulc::UlcInstance {
            graph: inst.graph.without_pairs(&x),
            ..as_node.clone()
        };
        let mut feasible = true;
        for comp in trimmed.graph.connected_components() {
            let comp_set: BTreeSet<VertexId> = comp.iter().copied().collect();
            if crate::ulc::enumerate_labelings(&trimmed, &comp_set)?.is_empty() {
                feasible = false;
                break;
            }
        }
        if feasible {
            return Ok(Some((cost, x.into_iter().collect())));
        }
    }
    Ok(None)
}

/// Random partial permutation with roughly `coverage` of the alphabet in
/// its domain.
fn random_partial_perm(s: usize, rng: &mut SplitMix64, total: bool) -> crate::ulc::PartialPerm {
    let mut from: Vec<u8> = (0..s as u8).collect();
    let mut to: Vec<u8> = (0..s as u8).collect();
    rng.shuffle(&mut from);
    rng.shuffle(&mut to);
    let keep = if total {
        s
    } else {
        1 + rng.below(s as u64) as usize
    };
    let pairs: Vec<(u8, u8)> = from[..keep]
        .iter()
        .copied()
        .zip(to[..keep].iter().copied())
        .collect();
    crate::ulc::PartialPerm::from_pairs(s, &pairs).unwrap()
}

/// Random Node ULC instance on a connected graph; lists lean towards full.
pub fn gen_ulc_node(
    n: u32,
    extra_edges: usize,
    sigma: usize,
    k: u64,
    seed: u64,
) -> crate::ulc::UlcInstance {
    let g = gen_connected_graph(n, extra_edges, seed);
    let mut rng = SplitMix64::new(seed ^ 0x01ABE1);
    let full = if sigma == 64 { u64::MAX } else { (1u64 << sigma) - 1 };
    let domains = (1..=n)
        .map(|v| {
            let d = if rng.chance(3, 4) {
                full
            } else {
                // nonempty random subset
                let mut m = 0u64;
                for b in 0..sigma {
                    if rng.chance(1, 2) {
                        m |= 1 << b;
                    }
                }
                if m == 0 {
                    1 << rng.below(sigma as u64)
                } else {
                    m
                }
            };
            (v, d)
        })
        .collect();
    let constraints = g
        .edge_pairs()
        .into_iter()
        .map(|e| {
            let total = rng.chance(2, 3);
            (e, random_partial_perm(sigma, &mut rng, total))
        })
        .collect();
    crate::ulc::UlcInstance {
        graph: g,
        sigma,
        budget: k,
        domains,
        constraints,
    }
}

/// Random Edge ULC instance (full lists, mixed partial/total permutations).
pub fn gen_ulc_edge(
    n: u32,
    extra_edges: usize,
    sigma: usize,
    k: u64,
    seed: u64,
) -> crate::ulc::EulcInstance {
    let node = gen_ulc_node(n, extra_edges, sigma, k, seed);
    let full = if sigma == 64 { u64::MAX } else { (1u64 << sigma) - 1 };
    crate::ulc::EulcInstance {
        graph: node.graph,
        sigma,
        budget: k,
        domains: (1..=n).map(|v| (v, full)).collect(),
        constraints: node.constraints,
    }
}

// ---------------------------------------------------------------------------
// Hardness-instance source: multicolored clique and the two reductions
// ---------------------------------------------------------------------------

/// A Multicolored Clique instance: `parts` parts of `part_size` vertices
/// each, edges only between different parts. Vertex ids are part-major:
/// part `i` holds ids `i*part_size + 1 ..= (i+1)*part_size`.
#[derive(Debug, Clone)]
pub struct MccInstance {
    pub parts: u32,
    pub part_size: u32,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl MccInstance {
    pub fn part_of(&self, v: VertexId) -> u32 {
        (v - 1) / self.part_size
    }

    pub fn index_in_part(&self, v: VertexId) -> u32 {
        (v - 1) % self.part_size
    }

    pub fn validate(&self) -> Result<()> {
        let total = self.parts * self.part_size;
        for &(u, v) in &self.edges {
            if u == 0 || v == 0 || u > total || v > total {
                return Err(Error::UnknownVertex(u.max(v)));
            }
            if self.part_of(u) == self.part_of(v) {
                return Err(crate::error::invalid(
                    "mcc: edges within a part are not allowed",
                ));
            }
        }
        Ok(())
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains(&(u, v)) || self.edges.contains(&(v, u))
    }
}

/// Random MCC instance with each inter-part pair present with probability
/// `num/den`.
pub fn gen_random_mcc(parts: u32, part_size: u32, num: u64, den: u64, seed: u64) -> MccInstance {
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for i in 0..parts {
        for j in (i + 1)..parts {
            for p in 0..part_size {
                for q in 0..part_size {
                    if rng.chance(num, den) {
                        edges.push((i * part_size + p + 1, j * part_size + q + 1));
                    }
                }
            }
        }
    }
    MccInstance {
        parts,
        part_size,
        edges,
    }
}

/// Brute-force multicolored-clique check (one vertex per part, pairwise
/// adjacent).
pub fn mcc_has_clique(mcc: &MccInstance) -> Result<bool> {
    if mcc.parts > 4 || mcc.part_size > 5 {
        return Err(Error::SizeGuard {
            what: "mcc clique search",
            limit: 4,
            actual: mcc.parts.max(mcc.part_size) as u64,
        });
    }
    let k = mcc.parts as usize;
    let n = mcc.part_size;
    let mut choice = vec![0u32; k];
    loop {
        let verts: Vec<VertexId> = (0..k)
            .map(|i| i as u32 * n + choice[i] + 1)
            .collect();
        let mut ok = true;
        'pairs: for a in 0..k {
            for b in (a + 1)..k {
                if !mcc.has_edge(verts[a], verts[b]) {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            return Ok(true);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == k {
                return Ok(false);
            }
            choice[i] += 1;
            if choice[i] < n {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// The cycle-and-crossing reduction from Multicolored Clique to Edge Unique
/// Label Cover: alphabet `{0..n} x {0..n}`, one `kn`-cycle per part with a
/// first-coordinate shift, one crossing edge per part pair carrying the
/// swap restricted to the edges of `H`, and budget `k^2`.
pub fn gen_mcc_to_eulc(mcc: &MccInstance) -> Result<crate::ulc::EulcInstance> {
    mcc.validate()?;
    let k = mcc.parts;
    let n = mcc.part_size;
    let base = n as usize + 1;
    let sigma = base * base;
    if sigma > crate::ulc::MAX_SIGMA {
        return Err(Error::SizeGuard {
            what: "mcc reduction alphabet",
            limit: crate::ulc::MAX_SIGMA as u64,
            actual: sigma as u64,
        });
    }
    let enc = |a: u32, b: u32| -> u8 { (a as usize * base + b as usize) as u8 };
    let cyc = k * n;
    // cycle vertex ids, part-major
    let vid = |i: u32, p: u32| -> VertexId { i * cyc + p + 1 };
    let mut g = MultiGraph::new();
    for i in 0..k {
        for p in 0..cyc {
            g.add_vertex(vid(i, p));
        }
    }
    let mut constraints: BTreeMap<EdgePair, crate::ulc::PartialPerm> = BTreeMap::new();
    let mut next_free: VertexId = k * cyc + 1;

    // first-coordinate decrement modulo n+1
    let shift_pairs: Vec<(u8, u8)> = (0..=n)
        .flat_map(|a| {
            (0..=n).map(move |b| {
                let a2 = if a == 0 { n } else { a - 1 };
                (enc(a, b), enc(a2, b))
            })
        })
        .collect();
    let shift = crate::ulc::PartialPerm::from_pairs(sigma, &shift_pairs)?;
    let identity = crate::ulc::PartialPerm::identity(sigma);

    let mut add_constrained = |g: &mut MultiGraph,
                               u: VertexId,
                               v: VertexId,
                               psi: &crate::ulc::PartialPerm|
     -> Result<()> {
        if !g.has_edge(u, v) {
            g.add_edge(u, v, 1)?;
            constraints.insert(pair(u, v), if u < v { psi.clone() } else { psi.inverse() });
        } else {
            // a duplicate pair (length-2 cycles): subdivide this copy with
            // an identity half so the graph stays simple
            let m = next_free;
            next_free += 1;
            g.add_vertex(m);
            g.add_edge(u, m, 1)?;
            constraints.insert(pair(u, m), if u < m { psi.clone() } else { psi.inverse() });
            g.add_edge(m, v, 1)?;
            constraints.insert(
                pair(m, v),
                if m < v {
                    crate::ulc::PartialPerm::identity(sigma)
                } else {
                    crate::ulc::PartialPerm::identity(sigma).inverse()
                },
            );
        }
        Ok(())
    };

    for i in 0..k {
        for p in 0..cyc {
            let u = vid(i, p);
            let v = vid(i, (p + 1) % cyc);
            add_constrained(&mut g, u, v, &shift)?;
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            let crossing: Vec<(u8, u8)> = mcc
                .edges
                .iter()
                .filter(|&&(a, b)| {
                    let (pa, pb) = (mcc.part_of(a), mcc.part_of(b));
                    (pa, pb) == (i, j) || (pa, pb) == (j, i)
                })
                .map(|&(a, b)| {
                    let (vi, vj) = if mcc.part_of(a) == i { (a, b) } else { (b, a) };
                    (
                        enc(mcc.index_in_part(vi), mcc.index_in_part(vj)),
                        enc(mcc.index_in_part(vj), mcc.index_in_part(vi)),
                    )
                })
                .collect();
            let sigma_ij = crate::ulc::PartialPerm::from_pairs(sigma, &crossing)?;
            add_constrained(&mut g, vid(i, j * n), vid(j, i * n), &sigma_ij)?;
        }
    }
    let _ = identity;

    // admissible labels exclude coordinate n
    let mut lambda = 0u64;
    for a in 0..n {
        for b in 0..n {
            lambda |= 1 << enc(a, b);
        }
    }
    let domains = g.vertex_ids().into_iter().map(|v| (v, lambda)).collect();
    Ok(crate::ulc::EulcInstance {
        graph: g,
        sigma,
        budget: (k as u64) * (k as u64),
        domains,
        constraints,
    })
}

/// Restricts a general edge-ULC instance to full lists and total
/// permutations: `k' = k(k+2)`, alphabet extended by `k+2` fresh symbols;
/// lists become loop gadgets (triangles after loop elimination) and each
/// constraint becomes `k+2` parallel total extensions, subdivided to keep
/// the graph simple.
pub fn gen_restrict_ulc(inst: &crate::ulc::EulcInstance) -> Result<crate::ulc::EulcInstance> {
    let k = inst.budget;
    let s = inst.sigma;
    let extra = (k + 2) as usize;
    let s2 = s + extra;
    if s2 > crate::ulc::MAX_SIGMA {
        return Err(Error::SizeGuard {
            what: "restricted ulc alphabet",
            limit: crate::ulc::MAX_SIGMA as u64,
            actual: s2 as u64,
        });
    }
    let k2 = k * (k + 2);
    let mut g = MultiGraph::new();
    for v in inst.graph.vertex_ids() {
        g.add_vertex(v);
    }
    let mut next: VertexId = inst.graph.vertex_ids().iter().copied().max().unwrap_or(0) + 1;
    let mut fresh = |g: &mut MultiGraph| -> VertexId {
        let v = next;
        next += 1;
        g.add_vertex(v);
        v
    };
    let mut constraints: BTreeMap<EdgePair, crate::ulc::PartialPerm> = BTreeMap::new();
    let put = |constraints: &mut BTreeMap<EdgePair, crate::ulc::PartialPerm>,
                   g: &mut MultiGraph,
                   u: VertexId,
                   v: VertexId,
                   psi: crate::ulc::PartialPerm|
     -> Result<()> {
        g.add_edge(u, v, 1)?;
        constraints.insert(pair(u, v), if u < v { psi } else { psi.inverse() });
        Ok(())
    };
    let identity = crate::ulc::PartialPerm::identity(s2);

    // loop gadgets: pi_v stabilizes exactly the list of v; each of the
    // k'+1 loops becomes a triangle with pi_v on its middle edge
    for v in inst.graph.vertex_ids() {
        let dom = inst.domain(v);
        let moved: Vec<u8> = (0..s2 as u8)
            .filter(|&l| (l as usize) >= s || dom >> l & 1 == 0)
            .collect();
        debug_assert!(moved.len() >= 2);
        let mut pairs: Vec<(u8, u8)> = (0..s2 as u8)
            .filter(|l| !moved.contains(l))
            .map(|l| (l, l))
            .collect();
        for (i, &l) in moved.iter().enumerate() {
            pairs.push((l, moved[(i + 1) % moved.len()]));
        }
        let pi = crate::ulc::PartialPerm::from_pairs(s2, &pairs)?;
        for _ in 0..=k2 {
            let a = fresh(&mut g);
            let b = fresh(&mut g);
            put(&mut constraints, &mut g, v, a, identity.clone())?;
            put(&mut constraints, &mut g, a, b, pi.clone())?;
            put(&mut constraints, &mut g, b, v, identity.clone())?;
        }
    }

    // k+2 total extensions per original edge, subdivided
    for (u, v, _) in inst.graph.edges_with_mult() {
        let psi = inst.psi_from(u, v);
        let dom_missing: Vec<u8> = (0..s as u8)
            .filter(|&l| psi.apply(l).is_none())
            .chain(s as u8..s2 as u8)
            .collect();
        let img_missing: Vec<u8> = {
            let inv = psi.inverse();
            (0..s as u8)
                .filter(|&l| inv.apply(l).is_none())
                .chain(s as u8..s2 as u8)
                .collect()
        };
        debug_assert_eq!(dom_missing.len(), img_missing.len());
        let width = dom_missing.len();
        let base_pairs: Vec<(u8, u8)> = psi
            .pairs()
            .iter()
            .map(|&(a, b)| (a, b))
            .collect();
        for i in 0..extra {
            let mut pairs = base_pairs.clone();
            for (j, &a) in dom_missing.iter().enumerate() {
                pairs.push((a, img_missing[(j + i) % width]));
            }
            let psi_i = crate::ulc::PartialPerm::from_pairs(s2, &pairs)?;
            debug_assert!(psi_i.is_total());
            let m = fresh(&mut g);
            put(&mut constraints, &mut g, u, m, identity.clone())?;
            put(&mut constraints, &mut g, m, v, psi_i)?;
        }
    }

    let full = (1u64 << s2) - 1;
    let domains = g.vertex_ids().into_iter().map(|v| (v, full)).collect();
    Ok(crate::ulc::EulcInstance {
        graph: g,
        sigma: s2,
        budget: k2,
        domains,
        constraints,
    })
}

/// Random Node MWCU instance: connected graph, random terminal classes,
/// every terminal undeletable. Deterministic per seed.
pub fn gen_mwcu_node(
    n: u32,
    extra_edges: usize,
    n_classes: usize,
    terminals: usize,
    k: u64,
    seed: u64,
) -> crate::mwcu::MwcuInstance {
    let g = gen_connected_graph(n, extra_edges, seed);
    let mut rng = SplitMix64::new(seed ^ 0xA11CE);
    let mut pool: Vec<u32> = (1..=n).collect();
    rng.shuffle(&mut pool);
    let tcount = terminals.min(n as usize);
    let nclasses = n_classes.clamp(1, tcount.max(1));
    let mut classes: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); nclasses];
    for (i, &t) in pool[..tcount].iter().enumerate() {
        classes[i % nclasses].insert(t);
    }
    classes.retain(|c| !c.is_empty());
    let undeletable = classes.iter().flatten().copied().collect();
    crate::mwcu::MwcuInstance {
        graph: g,
        classes,
        budget: k,
        undeletable,
    }
}

/// Random connected graph on vertices `1..=n` with `n - 1 + extra` candidate
/// edges (duplicates collapse), built from a random spanning tree plus random
/// chords. Deterministic per seed.
pub fn gen_connected_graph(n: u32, extra: usize, seed: u64) -> MultiGraph {
    let mut g = MultiGraph::with_vertices(n);
    if n <= 1 {
        return g;
    }
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<u32> = (1..=n).collect();
    rng.shuffle(&mut order);
    for i in 1..n as usize {
        let u = order[i];
        let v = order[rng.below(i as u64) as usize];
        g.add_edge(u, v, 1).unwrap();
    }
    for _ in 0..extra {
        let u = rng.below(n as u64) as u32 + 1;
        let v = rng.below(n as u64) as u32 + 1;
        if u != v && !g.has_edge(u, v) {
            g.add_edge(u, v, 1).unwrap();
        }
    }
    g
}

/// Random connected graph where every non-tree pair is present with
/// probability `num/den`; density 1 yields the complete graph.
pub fn gen_connected_graph_density(n: u32, num: u64, den: u64, seed: u64) -> MultiGraph {
    let mut g = MultiGraph::with_vertices(n);
    if n <= 1 {
        return g;
    }
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<u32> = (1..=n).collect();
    rng.shuffle(&mut order);
    for i in 1..n as usize {
        let u = order[i];
        let v = order[rng.below(i as u64) as usize];
        g.add_edge(u, v, 1).unwrap();
    }
    for u in 1..=n {
        for v in (u + 1)..=n {
            if !g.has_edge(u, v) && rng.chance(num.min(den), den) {
                g.add_edge(u, v, 1).unwrap();
            }
        }
    }
    g
}

/// Enumerates subsets of `items` with at most `cap` elements, smallest
/// first, in lexicographic order within each size.
pub fn subsets_up_to_size<T: Clone + Ord>(items: &[T], cap: usize) -> Vec<BTreeSet<T>> {
    let mut out = vec![BTreeSet::new()];
    let mut frontier: Vec<(usize, BTreeSet<T>)> = vec![(0, BTreeSet::new())];
    for _ in 0..cap {
        let mut next = Vec::new();
        for (start, cur) in frontier {
            for i in start..items.len() {
                let mut s = cur.clone();
                s.insert(items[i].clone());
                out.push(s.clone());
                next.push((i + 1, s));
            }
        }
        frontier = next;
    }
    out
}

/// Enumerates edge-pair subsets whose total multiplicity cost stays within
/// `budget`, in increasing cost then lexicographic order.
pub fn edge_subsets_within_budget(g: &MultiGraph, budget: u64) -> Vec<(BTreeSet<EdgePair>, u64)> {
    let pairs: Vec<(EdgePair, u64)> = g
        .edges_with_mult()
        .into_iter()
        .map(|(u, v, m)| (pair(u, v), m as u64))
        .collect();
    let mut out: Vec<(BTreeSet<EdgePair>, u64)> = Vec::new();
    let mut stack: Vec<(usize, BTreeSet<EdgePair>, u64)> = vec![(0, BTreeSet::new(), 0)];
    while let Some((start, cur, cost)) = stack.pop() {
        out.push((cur.clone(), cost));
        for i in start..pairs.len() {
            let (p, m) = pairs[i];
            if cost + m <= budget {
                let mut s = cur.clone();
                s.insert(p);
                stack.push((i + 1, s, cost + m));
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Vertex subsets of `pool` with at most `budget` elements, in increasing
/// size then lexicographic order.
pub fn vertex_subsets_within_budget(
    pool: &[VertexId],
    budget: u64,
) -> Vec<BTreeSet<VertexId>> {
    let mut subs = subsets_up_to_size(pool, budget as usize);
    subs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_connected_and_deterministic() {
        for seed in 0..20 {
            let g = gen_connected_graph(8, 4, seed);
            assert!(g.is_connected());
            assert_eq!(g, gen_connected_graph(8, 4, seed));
        }
        assert_eq!(gen_connected_graph(1, 0, 3).vertex_count(), 1);
    }

    #[test]
    fn density_generator_edges() {
        // full density is the complete graph; zero density is a tree
        let g = gen_connected_graph_density(6, 1, 1, 5);
        assert_eq!(g.edge_count(), 15);
        let t = gen_connected_graph_density(6, 0, 1, 5);
        assert_eq!(t.edge_count(), 5);
        assert!(t.is_connected());
        assert_eq!(gen_connected_graph_density(1, 1, 1, 0).vertex_count(), 1);
        assert_eq!(
            gen_connected_graph_density(7, 1, 3, 9),
            gen_connected_graph_density(7, 1, 3, 9)
        );
    }

    #[test]
    fn subset_enumeration_orders() {
        let subs = vertex_subsets_within_budget(&[1, 2, 3], 2);
        assert_eq!(subs[0], BTreeSet::new());
        assert_eq!(subs.len(), 1 + 3 + 3);
        assert!(subs[1].len() == 1 && subs[3].len() == 1);
        assert!(subs[4].len() == 2);
    }

    #[test]
    fn steiner_oracle_basics() {
        let mut g = MultiGraph::with_vertices(3);
        g.add_edge(1, 2, 1).unwrap();
        g.add_edge(2, 3, 1).unwrap();
        let inst = SteinerInstance {
            graph: g,
            terminals: [1, 3].into_iter().collect(),
            parts: 2,
            budget: 1,
        };
        let (cost, _) = oracle_steiner(&inst).unwrap().unwrap();
        assert_eq!(cost, 1);
        let infeasible = SteinerInstance {
            parts: 3,
            ..inst.clone()
        };
        assert!(oracle_steiner(&infeasible).unwrap().is_none());
        let zero = SteinerInstance {
            parts: 1,
            budget: 0,
            ..inst
        };
        assert_eq!(oracle_steiner(&zero).unwrap().unwrap().0, 0);
    }

    #[test]
    fn ulc_solver_matches_oracle() {
        use crate::report::SolveConfig;
        use crate::ulc::{solve_eulc, solve_ulc};
        let mut rng = SplitMix64::new(0x1AB);
        let cfg = SolveConfig::default();
        for round in 0..25 {
            let n = 3 + rng.below(5) as u32;
            let inst = gen_ulc_node(
                n,
                rng.below(4) as usize,
                2 + rng.below(2) as usize,
                rng.below(3),
                rng.next_u64(),
            );
            let oracle = oracle_ulc_node(&inst).unwrap();
            let got = solve_ulc(&inst, &cfg).unwrap();
            assert_eq!(
                got.size,
                oracle.as_ref().map(|(c, _)| *c),
                "node round {round} inst={inst:?}"
            );
        }
        for round in 0..12 {
            let n = 3 + rng.below(3) as u32;
            let inst = gen_ulc_edge(
                n,
                rng.below(3) as usize,
                2,
                rng.below(2),
                rng.next_u64(),
            );
            let oracle = oracle_ulc_edge(&inst).unwrap();
            let got = solve_eulc(&inst, &cfg).unwrap();
            assert_eq!(
                got.size,
                oracle.as_ref().map(|(c, _)| *c),
                "edge round {round} inst={inst:?}"
            );
        }
    }

    #[test]
    fn mcc_reduction_fixture_shape() {
        // two parts of two vertices, a single crossing edge
        let mcc = MccInstance {
            parts: 2,
            part_size: 2,
            edges: vec![(1, 4)],
        };
        let red = gen_mcc_to_eulc(&mcc).unwrap();
        assert_eq!(red.graph.vertex_count(), 8);
        assert_eq!(red.graph.edge_count(), 9);
        assert_eq!(red.sigma, 9);
        assert_eq!(red.budget, 4);
        // v^0_0 - v^1_1 is an edge, so {v^0_0, v^1_1} is a clique
        assert!(mcc_has_clique(&mcc).unwrap());
        let sol = oracle_ulc_edge(&red).unwrap();
        assert!(sol.is_some(), "clique instance must reduce to YES");
        assert_eq!(sol.unwrap().0, 4);
    }

    #[test]
    fn mcc_no_cross_edges_is_no() {
        let mcc = MccInstance {
            parts: 2,
            part_size: 2,
            edges: vec![],
        };
        let red = gen_mcc_to_eulc(&mcc).unwrap();
        assert!(oracle_ulc_edge(&red).unwrap().is_none());
    }

    #[test]
    fn mcc_reduction_matches_clique_search() {
        let mut rng = SplitMix64::new(0x3CC);
        for round in 0..12 {
            let n = 1 + rng.below(2) as u32; // part size 1..2 keeps the oracle fast
            let mcc = gen_random_mcc(2, n, 1, 2, rng.next_u64());
            let red = gen_mcc_to_eulc(&mcc).unwrap();
            let expected = mcc_has_clique(&mcc).unwrap();
            let got = oracle_ulc_edge(&red).unwrap().is_some();
            assert_eq!(got, expected, "round {round} mcc={mcc:?}");
        }
    }

    #[test]
    fn restricted_reduction_preserves_answers() {
        let mut rng = SplitMix64::new(0x9E57);
        for round in 0..10 {
            let n = 3 + rng.below(2) as u32;
            let k = rng.below(2);
            let inst = gen_ulc_edge(n, rng.below(2) as usize, 2, k, rng.next_u64());
            let restricted = gen_restrict_ulc(&inst).unwrap();
            assert_eq!(restricted.budget, k * (k + 2));
            assert_eq!(restricted.sigma, inst.sigma + k as usize + 2);
            let full = (1u64 << restricted.sigma) - 1;
            assert!(restricted
                .graph
                .vertex_ids()
                .iter()
                .all(|&v| restricted.domain(v) == full));
            assert!(restricted.constraints.values().all(|p| p.is_total()));
            let before = oracle_ulc_edge(&inst).unwrap().is_some();
            let after = oracle_ulc_edge(&restricted).unwrap().is_some();
            assert_eq!(before, after, "round {round} k={k} inst={inst:?}");

            if after {
                // spot check: a witness labeling never puts an extension
                // symbol on an original vertex (the loop gadgets forbid it)
                let (_, f) = oracle_ulc_edge(&restricted).unwrap().unwrap();
                let x: BTreeSet<(u32, u32)> = f.into_iter().collect();
                let view = crate::ulc::UlcInstance {
                    graph: restricted.graph.without_pairs(&x),
                    sigma: restricted.sigma,
                    budget: 0,
                    domains: restricted.domains.clone(),
                    constraints: restricted.constraints.clone(),
                };
                for comp in view.graph.connected_components() {
                    let set: BTreeSet<u32> = comp.iter().copied().collect();
                    let lab = crate::ulc::enumerate_labelings(&view, &set)
                        .unwrap()
                        .into_iter()
                        .next()
                        .unwrap();
                    for (&v, &l) in &lab {
                        if inst.graph.has_vertex(v) {
                            assert!(
                                (l as usize) < inst.sigma,
                                "original vertex {v} took extension label {l}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mwcu_solver_matches_oracle() {
        use crate::mwcu::{solve_mwcu, EmwcuInstance, solve_emwcu};
        use crate::report::SolveConfig;
        let mut rng = SplitMix64::new(0xBEA7);
        let cfg = SolveConfig::default();
        for round in 0..25 {
            let n = 4 + rng.below(5) as u32;
            let inst = gen_mwcu_node(
                n,
                rng.below(5) as usize,
                1 + rng.below(3) as usize,
                (2 + rng.below(2)) as usize,
                rng.below(3),
                rng.next_u64(),
            );
            let oracle = oracle_mwcu_node(&inst).unwrap();
            let got = solve_mwcu(&inst, &cfg).unwrap();
            assert_eq!(
                got.size,
                oracle.as_ref().map(|(c, _)| *c),
                "round {round} inst={inst:?}"
            );
        }
        for round in 0..15 {
            let n = 4 + rng.below(3) as u32;
            let g = gen_connected_graph(n, rng.below(4) as usize, rng.next_u64());
            let mut pool: Vec<u32> = (1..=n).collect();
            rng.shuffle(&mut pool);
            let inst = EmwcuInstance {
                graph: g,
                classes: vec![[pool[0]].into(), [pool[1]].into()],
                budget: rng.below(3),
            };
            let oracle = oracle_mwcu_edge(&inst).unwrap();
            let got = solve_emwcu(&inst, &cfg).unwrap();
            assert_eq!(
                got.size,
                oracle.as_ref().map(|(c, _)| *c),
                "edge round {round} inst={inst:?}"
            );
        }
    }

    #[test]
    fn steiner_solver_matches_oracle() {
        use crate::report::{FamilyCfg, FamilyKind, SolveConfig};
        use crate::steiner::solve_steiner;
        let mut rng = SplitMix64::new(0xACE);
        let cfgs = [
            SolveConfig::default(),
            SolveConfig {
                q_override: Some(1),
                family: FamilyCfg {
                    kind: FamilyKind::Exhaustive,
                    delta: 1e-6,
                    seed: 11,
                },
                ..SolveConfig::default()
            },
        ];
        for round in 0..30 {
            let n = 4 + rng.below(5) as u32;
            let g = gen_connected_graph(n, rng.below(4) as usize, rng.next_u64());
            let mut pool: Vec<u32> = (1..=n).collect();
            rng.shuffle(&mut pool);
            let t: BTreeSet<u32> = pool[..(2 + rng.below(2) as usize).min(n as usize)]
                .iter()
                .copied()
                .collect();
            let inst = SteinerInstance {
                graph: g,
                terminals: t,
                parts: 2 + rng.below(2) as u32,
                budget: rng.below(3),
            };
            let oracle = oracle_steiner(&inst).unwrap();
            for cfg in &cfgs {
                let got = solve_steiner(&inst, cfg).unwrap();
                match &oracle {
                    None => assert_eq!(got.size, None, "round {round}: expected NO"),
                    Some((cost, _)) => {
                        assert_eq!(got.size, Some(*cost), "round {round} inst={inst:?}")
                    }
                }
            }
        }
    }
}
