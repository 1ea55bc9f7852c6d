//! Loop-free multigraph with stable vertex ids and composable contractions.
//!
//! Contraction is the workhorse of every solver here: a set of edges is
//! contracted in one pass (the components of the selected edge set are merged
//! into fresh vertices), loops are dropped and parallel edges are kept with
//! summed multiplicities. The induced vertex mapping is returned explicitly
//! so that terminals, borders and solutions can be carried across.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error};
use crate::Result;

pub type VertexId = u32;

/// A canonical (smaller id first) endpoint pair.
pub type EdgePair = (VertexId, VertexId);

pub fn pair(u: VertexId, v: VertexId) -> EdgePair {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Per-vertex tag bits; merged by union when vertices are contracted.
pub mod tags {
    pub const TERMINAL: u8 = 1;
    pub const BORDER: u8 = 2;
    pub const UNDELETABLE: u8 = 4;
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Vertex {
    tags: u8,
    adj: BTreeMap<VertexId, u32>,
}

/// Loop-free multigraph. Parallel edges are stored as multiplicity counts on
/// canonical vertex pairs. Vertex ids are never reused within one contraction
/// history: merged groups receive fresh ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiGraph {
    vertices: BTreeMap<VertexId, Vertex>,
    next_id: VertexId,
}

/// Total map from original vertex ids to current vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractionMap {
    map: BTreeMap<VertexId, VertexId>,
}

impl ContractionMap {
    pub fn identity(g: &MultiGraph) -> Self {
        ContractionMap {
            map: g.vertex_ids().iter().map(|&v| (v, v)).collect(),
        }
    }

    pub fn image(&self, v: VertexId) -> VertexId {
        self.map[&v]
    }

    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        self.map.get(&v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.map.iter().map(|(&a, &b)| (a, b))
    }

    /// All original vertices mapped onto `w`.
    pub fn preimage(&self, w: VertexId) -> BTreeSet<VertexId> {
        self.map
            .iter()
            .filter(|&(_, &img)| img == w)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Composition `other ∘ self` (apply `self` first).
    pub fn then(&self, other: &ContractionMap) -> ContractionMap {
        ContractionMap {
            map: self
                .map
                .iter()
                .map(|(&v, &mid)| (v, other.image(mid)))
                .collect(),
        }
    }
}

impl MultiGraph {
    pub fn new() -> Self {
        MultiGraph::default()
    }

    /// Graph with vertices `1..=n` and no edges.
    pub fn with_vertices(n: u32) -> Self {
        let mut g = MultiGraph::new();
        for v in 1..=n {
            g.add_vertex(v);
        }
        g
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        self.vertices.entry(v).or_default();
        if v >= self.next_id {
            self.next_id = v + 1;
        }
    }

    /// Adds a fresh vertex and returns its id.
    pub fn fresh_vertex(&mut self) -> VertexId {
        let v = self.next_id;
        self.add_vertex(v);
        v
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn set_tags(&mut self, v: VertexId, t: u8) {
        if let Some(vd) = self.vertices.get_mut(&v) {
            vd.tags |= t;
        }
    }

    pub fn clear_tags(&mut self, v: VertexId) {
        if let Some(vd) = self.vertices.get_mut(&v) {
            vd.tags = 0;
        }
    }

    pub fn tags(&self, v: VertexId) -> u8 {
        self.vertices.get(&v).map_or(0, |vd| vd.tags)
    }

    pub fn has_tag(&self, v: VertexId, t: u8) -> bool {
        self.tags(v) & t != 0
    }

    pub fn tagged(&self, t: u8) -> BTreeSet<VertexId> {
        self.vertices
            .iter()
            .filter(|(_, vd)| vd.tags & t != 0)
            .map(|(&v, _)| v)
            .collect()
    }

    /// Adds `mult` parallel copies of edge `uv`. Loops are rejected.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, mult: u32) -> Result<()> {
        if u == v {
            return Err(invalid(alloc::format!("loop edge {u}-{v}")));
        }
        if !self.has_vertex(u) {
            return Err(Error::UnknownVertex(u));
        }
        if !self.has_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        if mult == 0 {
            return Ok(());
        }
        *self
            .vertices
            .get_mut(&u)
            .unwrap()
            .adj
            .entry(v)
            .or_insert(0) += mult;
        *self
            .vertices
            .get_mut(&v)
            .unwrap()
            .adj
            .entry(u)
            .or_insert(0) += mult;
        Ok(())
    }

    pub fn remove_pair(&mut self, u: VertexId, v: VertexId) {
        if let Some(vd) = self.vertices.get_mut(&u) {
            vd.adj.remove(&v);
        }
        if let Some(vd) = self.vertices.get_mut(&v) {
            vd.adj.remove(&u);
        }
    }

    pub fn remove_vertex(&mut self, v: VertexId) {
        if let Some(vd) = self.vertices.remove(&v) {
            for (w, _) in vd.adj {
                if let Some(wd) = self.vertices.get_mut(&w) {
                    wd.adj.remove(&v);
                }
            }
        }
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u32 {
        self.vertices
            .get(&u)
            .and_then(|vd| vd.adj.get(&v).copied())
            .unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.multiplicity(u, v) > 0
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of distinct endpoint pairs.
    pub fn pair_count(&self) -> usize {
        self.edge_pairs().len()
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.vertices
            .values()
            .map(|vd| vd.adj.values().map(|&m| m as u64).sum::<u64>())
            .sum::<u64>()
            / 2
    }

    pub fn vertex_ids(&self) -> Vec<VertexId> {
        self.vertices.keys().copied().collect()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.keys().copied().collect()
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.vertices
            .get(&v)
            .map(|vd| vd.adj.keys().copied().collect())
            .unwrap_or_default()
    }

    pub fn adjacency(&self, v: VertexId) -> impl Iterator<Item = (VertexId, u32)> + '_ {
        self.vertices
            .get(&v)
            .into_iter()
            .flat_map(|vd| vd.adj.iter().map(|(&w, &m)| (w, m)))
    }

    pub fn degree(&self, v: VertexId) -> u64 {
        self.vertices
            .get(&v)
            .map(|vd| vd.adj.values().map(|&m| m as u64).sum())
            .unwrap_or(0)
    }

    /// Canonical pairs `(u, v)` with `u < v`, ascending.
    pub fn edge_pairs(&self) -> Vec<EdgePair> {
        let mut out = Vec::new();
        for (&u, vd) in &self.vertices {
            for &w in vd.adj.keys() {
                if u < w {
                    out.push((u, w));
                }
            }
        }
        out
    }

    /// Canonical pairs with multiplicities.
    pub fn edges_with_mult(&self) -> Vec<(VertexId, VertexId, u32)> {
        let mut out = Vec::new();
        for (&u, vd) in &self.vertices {
            for (&w, &m) in &vd.adj {
                if u < w {
                    out.push((u, w, m));
                }
            }
        }
        out
    }

    /// Neighborhood of a vertex set (excluding the set itself).
    pub fn neighborhood_of_set(&self, set: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for &v in set {
            for w in self.neighbors(v) {
                if !set.contains(&w) {
                    out.insert(w);
                }
            }
        }
        out
    }

    /// Induced subgraph on `keep`; ids and tags are preserved.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> MultiGraph {
        let mut g = MultiGraph::new();
        g.next_id = self.next_id;
        for &v in keep {
            if let Some(vd) = self.vertices.get(&v) {
                let adj = vd
                    .adj
                    .iter()
                    .filter(|(w, _)| keep.contains(w))
                    .map(|(&w, &m)| (w, m))
                    .collect();
                g.vertices.insert(
                    v,
                    Vertex {
                        tags: vd.tags,
                        adj,
                    },
                );
            }
        }
        g
    }

    /// Graph with the listed vertices removed.
    pub fn without_vertices(&self, drop: &BTreeSet<VertexId>) -> MultiGraph {
        let keep: BTreeSet<VertexId> = self
            .vertices
            .keys()
            .copied()
            .filter(|v| !drop.contains(v))
            .collect();
        self.induced(&keep)
    }

    /// Graph with the listed edge pairs removed (all parallel copies).
    pub fn without_pairs(&self, drop: &BTreeSet<EdgePair>) -> MultiGraph {
        let mut g = self.clone();
        for &(u, v) in drop {
            g.remove_pair(u, v);
        }
        g
    }

    /// Caps every multiplicity at `k + 1`. Edge cuts of size at most `k` are
    /// unaffected: a pair of multiplicity above `k` can never be fully paid.
    pub fn cap_multiplicity(&mut self, k: u32) {
        let cap = k.saturating_add(1);
        for vd in self.vertices.values_mut() {
            for m in vd.adj.values_mut() {
                if *m > cap {
                    *m = cap;
                }
            }
        }
    }

    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut comps = Vec::new();
        for &start in self.vertices.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = vec![start];
            seen.insert(start);
            while let Some(v) = queue.pop() {
                for w in self.neighbors(v) {
                    if seen.insert(w) {
                        comp.push(w);
                        queue.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Component of `v` as a set.
    pub fn component_of(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        if !self.has_vertex(v) {
            return seen;
        }
        let mut queue = vec![v];
        seen.insert(v);
        while let Some(x) = queue.pop() {
            for w in self.neighbors(x) {
                if seen.insert(w) {
                    queue.push(w);
                }
            }
        }
        seen
    }

    /// Contracts every edge in `d` in one pass: the connected components of
    /// `(V, d)` are merged, loops dropped, multiplicities summed (uncapped).
    /// Components of size one keep their id; merged groups get fresh ids.
    pub fn contract_edges(&self, d: &BTreeSet<EdgePair>) -> Result<(MultiGraph, ContractionMap)> {
        for &(u, v) in d {
            if self.multiplicity(u, v) == 0 {
                return Err(Error::UnknownEdge(u, v));
            }
        }
        let mut dsu = Dsu::new(self.vertex_ids());
        for &(u, v) in d {
            dsu.union(u, v);
        }
        self.quotient(&mut dsu)
    }

    /// Merges all vertices of `group` into one fresh vertex; equivalent to
    /// adding a spanning star on the group and contracting it.
    pub fn identify_vertices(
        &self,
        group: &BTreeSet<VertexId>,
    ) -> Result<(MultiGraph, ContractionMap)> {
        if group.is_empty() {
            return Err(invalid("identify_vertices: empty group"));
        }
        for &v in group {
            if !self.has_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        let mut dsu = Dsu::new(self.vertex_ids());
        let mut it = group.iter();
        let first = *it.next().unwrap();
        for &v in it {
            dsu.union(first, v);
        }
        // A single-vertex group still yields a fresh id, matching the
        // definition via an added-and-contracted star.
        let (mut g, mut iota) = self.quotient(&mut dsu)?;
        if group.len() == 1 {
            let fresh = g.next_id;
            let old = first;
            let vd = g.vertices.remove(&old).unwrap();
            for (&w, &m) in &vd.adj {
                let wd = g.vertices.get_mut(&w).unwrap();
                wd.adj.remove(&old);
                wd.adj.insert(fresh, m);
            }
            g.vertices.insert(fresh, vd);
            g.next_id = fresh + 1;
            for (_, img) in iota.map.iter_mut() {
                if *img == old {
                    *img = fresh;
                }
            }
        }
        Ok((g, iota))
    }

    /// Quotient by an arbitrary union-find over the vertex set; used by the
    /// hot paths that fuse several contraction rounds into one pass.
    pub fn quotient_by(&self, dsu: &mut Dsu) -> Result<(MultiGraph, ContractionMap)> {
        self.quotient(dsu)
    }

    fn quotient(&self, dsu: &mut Dsu) -> Result<(MultiGraph, ContractionMap)> {
        // Assign ids: singleton classes keep their id, merged classes get
        // fresh ids in order of their smallest member.
        let ids = self.vertex_ids();
        let mut by_root: Vec<(VertexId, VertexId)> = ids
            .iter()
            .map(|&v| (dsu.find(v), v))
            .collect();
        by_root.sort_unstable();
        let mut next = self.next_id;
        // one entry per class, keyed by its smallest member (first in the
        // sorted run); img laid out in original-vertex order afterwards
        let mut img_pairs: Vec<(VertexId, VertexId)> = Vec::with_capacity(ids.len());
        let mut class_tags: Vec<(VertexId, u8)> = Vec::new();
        let mut i = 0;
        while i < by_root.len() {
            let root = by_root[i].0;
            let mut j = i;
            let mut tags = 0u8;
            while j < by_root.len() && by_root[j].0 == root {
                tags |= self.tags(by_root[j].1);
                j += 1;
            }
            let id = if j - i == 1 {
                by_root[i].1
            } else {
                let id = next;
                next += 1;
                id
            };
            for row in &by_root[i..j] {
                img_pairs.push((row.1, id));
            }
            class_tags.push((id, tags));
            i = j;
        }
        img_pairs.sort_unstable();
        let img: BTreeMap<VertexId, VertexId> = img_pairs.into_iter().collect();

        // merge projected edges by sorting once, then bulk-load adjacency
        let mut arcs: Vec<(VertexId, VertexId, u32)> = Vec::new();
        for (u, v, m) in self.edges_with_mult() {
            let (a, b) = (img[&u], img[&v]);
            if a != b {
                arcs.push((a, b, m));
                arcs.push((b, a, m));
            }
        }
        arcs.sort_unstable();
        class_tags.sort_unstable();
        let mut g = MultiGraph {
            vertices: BTreeMap::new(),
            next_id: next.max(self.next_id),
        };
        let mut arc_i = 0;
        for (id, tags) in class_tags {
            let mut adj_rows: Vec<(VertexId, u32)> = Vec::new();
            while arc_i < arcs.len() && arcs[arc_i].0 == id {
                let to = arcs[arc_i].1;
                let mut m = 0u32;
                while arc_i < arcs.len() && arcs[arc_i].0 == id && arcs[arc_i].1 == to {
                    m += arcs[arc_i].2;
                    arc_i += 1;
                }
                adj_rows.push((to, m));
            }
            g.vertices.insert(
                id,
                Vertex {
                    tags,
                    adj: adj_rows.into_iter().collect(),
                },
            );
        }
        Ok((g, ContractionMap { map: img }))
    }

    /// Nagamochi-Ibaraki style sparsification: keeps the union of `k + 1`
    /// successively removed spanning forests. All edge cuts of size at most
    /// `k` are exactly preserved; at most `(k+1)(|V|-1)` edges remain.
    pub fn sparsify(&self, k: u32) -> MultiGraph {
        let mut remaining: BTreeMap<EdgePair, u32> = self
            .edges_with_mult()
            .into_iter()
            .map(|(u, v, m)| ((u, v), m))
            .collect();
        let mut kept: BTreeMap<EdgePair, u32> = BTreeMap::new();
        for _round in 0..=k {
            let mut dsu = Dsu::new(self.vertex_ids());
            for (&(u, v), m) in remaining.iter_mut() {
                if *m > 0 && dsu.union(u, v) {
                    *kept.entry((u, v)).or_insert(0) += 1;
                    *m -= 1;
                }
            }
        }
        let mut g = MultiGraph::new();
        g.next_id = self.next_id;
        for (&v, vd) in &self.vertices {
            g.vertices.insert(
                v,
                Vertex {
                    tags: vd.tags,
                    adj: BTreeMap::new(),
                },
            );
        }
        for ((u, v), m) in kept {
            g.add_edge(u, v, m).unwrap();
        }
        g
    }
}

/// Union-find over arbitrary vertex ids, stored contiguously; ids resolve
/// to slots by binary search.
pub struct Dsu {
    ids: Vec<VertexId>,
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl Dsu {
    pub fn new(ids: impl IntoIterator<Item = VertexId>) -> Self {
        let mut ids: Vec<VertexId> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        let n = ids.len();
        Dsu {
            ids,
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn slot(&self, v: VertexId) -> usize {
        self.ids.binary_search(&v).expect("id tracked by the dsu")
    }

    fn find_slot(&mut self, mut i: usize) -> usize {
        while self.parent[i] as usize != i {
            let grand = self.parent[self.parent[i] as usize];
            self.parent[i] = grand;
            i = grand as usize;
        }
        i
    }

    pub fn find(&mut self, v: VertexId) -> VertexId {
        let slot = self.slot(v);
        let root = self.find_slot(slot);
        self.ids[root]
    }

    pub fn union(&mut self, a: VertexId, b: VertexId) -> bool {
        let (ra, rb) = (self.slot(a), self.slot(b));
        let (ra, rb) = (self.find_slot(ra), self.find_slot(rb));
        if ra == rb {
            return false;
        }
        let (ka, kb) = (self.rank[ra], self.rank[rb]);
        if ka < kb {
            self.parent[ra] = rb as u32;
        } else if ka > kb {
            self.parent[rb] = ra as u32;
        } else {
            self.parent[rb] = ra as u32;
            self.rank[ra] += 1;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn triangle() -> MultiGraph {
        let mut g = MultiGraph::with_vertices(3);
        g.add_edge(1, 2, 1).unwrap();
        g.add_edge(2, 3, 1).unwrap();
        g.add_edge(3, 1, 1).unwrap();
        g
    }

    #[test]
    fn contract_triangle_edge() {
        let g = triangle();
        let d: BTreeSet<EdgePair> = [(1, 2)].into_iter().collect();
        let (h, iota) = g.contract_edges(&d).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(iota.image(1), iota.image(2));
        assert_ne!(iota.image(1), iota.image(3));
        let w = iota.image(1);
        assert_eq!(h.multiplicity(w, 3), 2);
    }

    #[test]
    fn contract_empty_is_identity() {
        let g = triangle();
        let (h, iota) = g.contract_edges(&BTreeSet::new()).unwrap();
        assert_eq!(h, g);
        for v in g.vertex_ids() {
            assert_eq!(iota.image(v), v);
        }
    }

    #[test]
    fn contract_path_two_edges() {
        // path a-b-c-d; contracting {ab, cd} leaves a 2-vertex path.
        let mut g = MultiGraph::with_vertices(4);
        g.add_edge(1, 2, 1).unwrap();
        g.add_edge(2, 3, 1).unwrap();
        g.add_edge(3, 4, 1).unwrap();
        let d: BTreeSet<EdgePair> = [(1, 2), (3, 4)].into_iter().collect();
        let (h, iota) = g.contract_edges(&d).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 1);
        assert_eq!(iota.image(1), iota.image(2));
        assert_eq!(iota.image(3), iota.image(4));
        assert_ne!(iota.image(1), iota.image(3));
        // agrees with sequential contraction in either order
        let (h1, i1) = g
            .contract_edges(&[(1, 2)].into_iter().collect())
            .unwrap();
        let (h2, i2) = h1
            .contract_edges(&[(i1.image(3), i1.image(4))].into_iter().collect())
            .unwrap();
        assert_eq!(h2.vertex_count(), h.vertex_count());
        assert_eq!(h2.edge_count(), h.edge_count());
        let seq = i1.then(&i2);
        assert_eq!(seq.image(1), seq.image(2));
        assert_eq!(seq.image(3), seq.image(4));
        assert_ne!(seq.image(1), seq.image(4));
    }

    #[test]
    fn contract_unknown_edge_rejected() {
        let g = triangle();
        let d: BTreeSet<EdgePair> = [(1, 9)].into_iter().collect();
        assert!(matches!(g.contract_edges(&d), Err(Error::UnknownEdge(1, 9))));
    }

    #[test]
    fn identify_singleton_renames_only() {
        let g = triangle();
        let (h, iota) = g.identify_vertices(&[2].into_iter().collect()).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 3);
        let w = iota.image(2);
        assert!(w >= 4, "fresh id expected");
        assert_eq!(h.multiplicity(1, w), 1);
        assert_eq!(h.multiplicity(3, w), 1);
        assert_eq!(h.multiplicity(1, 3), 1);
    }

    #[test]
    fn identify_opposite_corners_of_square() {
        // 1-2-3-4-1; identifying {1, 3} merges the two length-2 paths.
        let mut g = MultiGraph::with_vertices(4);
        for (u, v) in [(1, 2), (2, 3), (3, 4), (4, 1)] {
            g.add_edge(u, v, 1).unwrap();
        }
        let (h, iota) = g.identify_vertices(&[1, 3].into_iter().collect()).unwrap();
        assert_eq!(h.vertex_count(), 3);
        let w = iota.image(1);
        assert_eq!(iota.image(3), w);
        assert_eq!(h.multiplicity(w, 2), 2);
        assert_eq!(h.multiplicity(w, 4), 2);
        // equivalent to inserting a star edge and contracting it
        let mut g2 = g.clone();
        g2.add_edge(1, 3, 1).unwrap();
        let (h2, _) = g2.contract_edges(&[(1, 3)].into_iter().collect()).unwrap();
        assert_eq!(h2.edges_with_mult(), h.edges_with_mult());
    }

    #[test]
    fn identify_all_vertices_drops_loops() {
        let g = triangle();
        let (h, _) = g
            .identify_vertices(&g.vertex_set())
            .unwrap();
        assert_eq!(h.vertex_count(), 1);
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn tags_merge_by_union() {
        let mut g = triangle();
        g.set_tags(1, tags::TERMINAL);
        g.set_tags(2, tags::BORDER);
        let (h, iota) = g.contract_edges(&[(1, 2)].into_iter().collect()).unwrap();
        let w = iota.image(1);
        assert!(h.has_tag(w, tags::TERMINAL));
        assert!(h.has_tag(w, tags::BORDER));
        assert!(!h.has_tag(3, tags::TERMINAL));
    }

    #[test]
    fn sparsify_keeps_trees() {
        let mut g = MultiGraph::with_vertices(5);
        for (u, v) in [(1, 2), (2, 3), (3, 4), (4, 5)] {
            g.add_edge(u, v, 1).unwrap();
        }
        for k in 0..4 {
            assert_eq!(g.sparsify(k), g);
        }
    }

    #[test]
    fn sparsify_k5_bounds() {
        let mut g = MultiGraph::with_vertices(5);
        for u in 1..=5u32 {
            for v in (u + 1)..=5 {
                g.add_edge(u, v, 1).unwrap();
            }
        }
        let s = g.sparsify(1);
        assert!(s.edge_count() <= 8, "at most (k+1)(n-1) = 8 edges kept");
        assert!(s.is_connected());
    }

    #[test]
    fn sparsify_keeps_parallel_copies() {
        let mut g = MultiGraph::with_vertices(2);
        g.add_edge(1, 2, 3).unwrap(); // multiplicity k+2 with k = 1
        let s = g.sparsify(1);
        assert_eq!(s.multiplicity(1, 2), 2);
    }

    #[test]
    fn components_deterministic() {
        let mut g = MultiGraph::with_vertices(4);
        g.add_edge(3, 4, 1).unwrap();
        let comps = g.connected_components();
        assert_eq!(comps, vec![vec![1], vec![2], vec![3, 4]]);
        assert_eq!(MultiGraph::new().connected_components().len(), 0);
    }

    #[test]
    fn cap_multiplicity_caps() {
        let mut g = MultiGraph::with_vertices(2);
        g.add_edge(1, 2, 10).unwrap();
        g.cap_multiplicity(2);
        assert_eq!(g.multiplicity(1, 2), 3);
    }
}
