//! Exact Node Unique Label Cover solver, plus the edge-deletion front-end.
//!
//! Vertices carry admissible label lists, edges carry partial permutations;
//! the task is to delete at most `k` vertices and label the rest so every
//! surviving constraint holds. Labels propagate uniquely along connected
//! subgraphs, which powers everything here: the bordered recursion bypasses
//! all vertices no recorded border solution needs, and the
//! high-connectivity phase guesses an interrogating vertex set, pins down
//! the (at most `s`) viable labelings of its big stains by majority over
//! `2k+1` disjoint paths, and finishes with a bounded search tree over three
//! rules (finish, branch on an unlabelable neighborhood, resolve a small
//! stain).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{contract, invalid};
use crate::flow::vertex_disjoint_paths;
use crate::graph::{pair, EdgePair, MultiGraph, VertexId};
use crate::report::{Answer, Provenance, SolutionBody, SolutionReport, SolveConfig, Stats};
use crate::separation::{find_flower_separation, find_good_node_separation};
use crate::Result;

pub type Label = u8;

/// Alphabet sizes are capped so label sets fit in a word.
pub const MAX_SIGMA: usize = 64;

/// A partial permutation of the alphabet: injective where defined.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PartialPerm {
    fwd: Vec<Option<Label>>,
}

impl PartialPerm {
    pub fn empty(s: usize) -> Self {
        PartialPerm { fwd: vec![None; s] }
    }

    pub fn identity(s: usize) -> Self {
        PartialPerm {
            fwd: (0..s as u8).map(Some).collect(),
        }
    }

    pub fn from_pairs(s: usize, pairs: &[(Label, Label)]) -> Result<Self> {
        let mut fwd = vec![None; s];
        let mut seen_to = vec![false; s];
        for &(a, b) in pairs {
            if a as usize >= s || b as usize >= s {
                return Err(invalid("partial permutation: label out of range"));
            }
            if fwd[a as usize].is_some() || seen_to[b as usize] {
                return Err(invalid("partial permutation: not injective/functional"));
            }
            fwd[a as usize] = Some(b);
            seen_to[b as usize] = true;
        }
        Ok(PartialPerm { fwd })
    }

    pub fn sigma(&self) -> usize {
        self.fwd.len()
    }

    pub fn apply(&self, a: Label) -> Option<Label> {
        self.fwd[a as usize]
    }

    pub fn pairs(&self) -> Vec<(Label, Label)> {
        self.fwd
            .iter()
            .enumerate()
            .filter_map(|(a, b)| b.map(|b| (a as Label, b)))
            .collect()
    }

    pub fn inverse(&self) -> PartialPerm {
        let mut fwd = vec![None; self.fwd.len()];
        for (a, b) in self.pairs() {
            fwd[b as usize] = Some(a);
        }
        PartialPerm { fwd }
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &PartialPerm) -> PartialPerm {
        let fwd = self
            .fwd
            .iter()
            .map(|b| b.and_then(|b| other.apply(b)))
            .collect();
        PartialPerm { fwd }
    }

    pub fn intersect(&self, other: &PartialPerm) -> PartialPerm {
        let fwd = self
            .fwd
            .iter()
            .zip(&other.fwd)
            .map(|(a, b)| if a == b { *a } else { None })
            .collect();
        PartialPerm { fwd }
    }

    /// Image of a label set under the permutation.
    pub fn image_mask(&self, mask: u64) -> u64 {
        let mut out = 0u64;
        for (a, b) in self.pairs() {
            if mask >> a & 1 == 1 {
                out |= 1 << b;
            }
        }
        out
    }

    pub fn is_total(&self) -> bool {
        self.fwd.iter().all(|b| b.is_some())
    }
}

/// Node Unique Label Cover instance. `domains[v]` is the bitmask of labels
/// admissible at `v`; `constraints[(u,v)]` (with `u < v`) is oriented from
/// `u` to `v`.
#[derive(Debug, Clone)]
pub struct UlcInstance {
    pub graph: MultiGraph,
    pub sigma: usize,
    pub budget: u64,
    pub domains: BTreeMap<VertexId, u64>,
    pub constraints: BTreeMap<EdgePair, PartialPerm>,
}

impl UlcInstance {
    pub fn domain(&self, v: VertexId) -> u64 {
        self.domains.get(&v).copied().unwrap_or(0)
    }

    /// Constraint oriented from `u` towards `v`.
    pub fn psi_from(&self, u: VertexId, v: VertexId) -> PartialPerm {
        let p = &self.constraints[&pair(u, v)];
        if u < v {
            p.clone()
        } else {
            p.inverse()
        }
    }

    pub fn full_mask(&self) -> u64 {
        if self.sigma == 64 {
            u64::MAX
        } else {
            (1u64 << self.sigma) - 1
        }
    }

    /// Structural sanity: every edge has a constraint, domains in range.
    pub fn validate(&self) -> Result<()> {
        if self.sigma == 0 || self.sigma > MAX_SIGMA {
            return Err(invalid("ulc: alphabet size out of range"));
        }
        for (u, v, m) in self.graph.edges_with_mult() {
            if m != 1 {
                return Err(invalid("ulc: parallel edges are not representable"));
            }
            match self.constraints.get(&(u, v)) {
                None => return Err(invalid("ulc: edge without constraint")),
                Some(p) if p.sigma() != self.sigma => {
                    return Err(invalid("ulc: constraint alphabet mismatch"))
                }
                _ => {}
            }
        }
        for v in self.graph.vertex_ids() {
            if self.domain(v) & !self.full_mask() != 0 {
                return Err(invalid("ulc: domain out of range"));
            }
        }
        Ok(())
    }
}

/// Updates (or creates) edge `uv` with constraint `psi` oriented `u -> v`.
pub fn update_edge(inst: &mut UlcInstance, u: VertexId, v: VertexId, psi: &PartialPerm) {
    debug_assert_ne!(u, v);
    let key = pair(u, v);
    let oriented = if u < v { psi.clone() } else { psi.inverse() };
    match inst.constraints.get_mut(&key) {
        Some(cur) => {
            *cur = cur.intersect(&oriented);
        }
        None => {
            inst.graph.add_edge(u, v, 1).unwrap();
            inst.constraints.insert(key, oriented);
        }
    }
}

/// Record of one bypass, kept so labelings can be extended back.
#[derive(Debug, Clone)]
pub struct BypassRecord {
    pub vertex: VertexId,
    pub domain: u64,
    /// Neighbors at bypass time with the constraint oriented neighbor -> v.
    pub incident: Vec<(VertexId, PartialPerm)>,
}

/// Removes `v`, restricting the neighbors' lists through the incident
/// constraints and updating every neighbor pair with the composition.
pub fn bypass_vertex_ulc(inst: &mut UlcInstance, v: VertexId) -> Result<BypassRecord> {
    let dom = inst.domain(v);
    if dom == 0 {
        return Err(contract("ulc bypass: empty label list"));
    }
    let nb = inst.graph.neighbors(v);
    let record = BypassRecord {
        vertex: v,
        domain: dom,
        incident: nb.iter().map(|&u| (u, inst.psi_from(u, v))).collect(),
    };
    // restrict neighbor lists to images of the list at v
    for &u in &nb {
        let psi_vu = inst.psi_from(v, u);
        let img = psi_vu.image_mask(dom);
        let cur = inst.domain(u);
        inst.domains.insert(u, cur & img);
    }
    // pairwise composed constraints
    for (i, &u1) in nb.iter().enumerate() {
        let to_v = inst.psi_from(u1, v);
        for &u2 in &nb[i + 1..] {
            let from_v = inst.psi_from(v, u2);
            let composed = to_v.then(&from_v);
            update_edge(inst, u1, u2, &composed);
        }
    }
    for &u in &nb {
        inst.constraints.remove(&pair(u, v));
    }
    inst.graph.remove_vertex(v);
    inst.domains.remove(&v);
    Ok(record)
}

pub type Labeling = BTreeMap<VertexId, Label>;

/// The unique labeling of connected `area` fixing `anchor -> label`, found
/// by breadth-first propagation and full verification; `None` if infeasible.
pub fn propagate_labeling(
    inst: &UlcInstance,
    area: &BTreeSet<VertexId>,
    anchor: VertexId,
    label: Label,
) -> Result<Option<Labeling>> {
    if !area.contains(&anchor) {
        return Err(invalid("propagate_labeling: anchor outside area"));
    }
    let induced = inst.graph.induced(area);
    if !induced.is_connected() {
        return Err(invalid("propagate_labeling: area is not connected"));
    }
    if inst.domain(anchor) >> label & 1 == 0 {
        return Ok(None);
    }
    let mut lab: Labeling = BTreeMap::new();
    lab.insert(anchor, label);
    let mut queue = vec![anchor];
    while let Some(u) = queue.pop() {
        let alpha = lab[&u];
        for w in induced.neighbors(u) {
            let psi = inst.psi_from(u, w);
            match psi.apply(alpha) {
                None => return Ok(None),
                Some(beta) => {
                    if inst.domain(w) >> beta & 1 == 0 {
                        return Ok(None);
                    }
                    match lab.get(&w) {
                        Some(&prev) if prev != beta => return Ok(None),
                        Some(_) => {}
                        None => {
                            lab.insert(w, beta);
                            queue.push(w);
                        }
                    }
                }
            }
        }
    }
    // full verification over all edges in the area
    for (u, w, _) in induced.edges_with_mult() {
        let psi = inst.psi_from(u, w);
        if psi.apply(lab[&u]) != Some(lab[&w]) {
            return Ok(None);
        }
    }
    Ok(Some(lab))
}

/// All labelings of a connected area (at most `sigma` of them), anchored at
/// its smallest vertex, in ascending label order.
pub fn enumerate_labelings(inst: &UlcInstance, area: &BTreeSet<VertexId>) -> Result<Vec<Labeling>> {
    let anchor = *area
        .iter()
        .next()
        .ok_or_else(|| invalid("enumerate_labelings: empty area"))?;
    let mut out = Vec::new();
    for label in 0..inst.sigma as Label {
        if inst.domain(anchor) >> label & 1 == 0 {
            continue;
        }
        if let Some(lab) = propagate_labeling(inst, area, anchor, label)? {
            out.push(lab);
        }
    }
    Ok(out)
}

/// A labeling of `G[set]` that equals `anchors` wherever both are defined:
/// anchored components propagate, the rest take their first labeling.
fn find_labeling_extending(
    inst: &UlcInstance,
    set: &BTreeSet<VertexId>,
    anchors: &Labeling,
) -> Result<Option<Labeling>> {
    let induced = inst.graph.induced(set);
    let mut out = Labeling::new();
    for comp in induced.connected_components() {
        let comp_set: BTreeSet<VertexId> = comp.iter().copied().collect();
        let anchored: Vec<VertexId> = comp
            .iter()
            .copied()
            .filter(|v| anchors.contains_key(v))
            .collect();
        let lab = if let Some(&a) = anchored.first() {
            match propagate_labeling(inst, &comp_set, a, anchors[&a])? {
                None => return Ok(None),
                Some(lab) => {
                    if anchored.iter().any(|v| lab[v] != anchors[v]) {
                        return Ok(None);
                    }
                    lab
                }
            }
        } else {
            match enumerate_labelings(inst, &comp_set)?.into_iter().next() {
                None => return Ok(None),
                Some(lab) => lab,
            }
        };
        out.extend(lab);
    }
    Ok(Some(out))
}

/// Definitional check of a full solution.
pub fn is_ulc_solution(inst: &UlcInstance, x: &BTreeSet<VertexId>, lab: &Labeling) -> bool {
    if x.len() as u64 > inst.budget {
        return false;
    }
    for v in inst.graph.vertex_ids() {
        if x.contains(&v) {
            continue;
        }
        match lab.get(&v) {
            None => return false,
            Some(&a) => {
                if inst.domain(v) >> a & 1 == 0 {
                    return false;
                }
            }
        }
    }
    for (u, v, _) in inst.graph.edges_with_mult() {
        if x.contains(&u) || x.contains(&v) {
            continue;
        }
        if inst.psi_from(u, v).apply(lab[&u]) != Some(lab[&v]) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Bordered problem
// ---------------------------------------------------------------------------

/// Behavior: per border vertex, a required label or deletion (`None`).
pub type UlcBehavior = Vec<Option<Label>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UlcSolution {
    pub deleted: Vec<VertexId>,
    pub labeling: Labeling,
}

pub type UlcMap = BTreeMap<UlcBehavior, UlcSolution>;

#[derive(Debug, Clone)]
pub struct UlcBorderInstance {
    pub inst: UlcInstance,
    /// Sorted border terminals, at most `4k`.
    pub border: Vec<VertexId>,
}

fn consistent_with(
    ib: &UlcBorderInstance,
    behavior: &UlcBehavior,
    x: &BTreeSet<VertexId>,
    lab: &Labeling,
) -> bool {
    ib.border.iter().zip(behavior).all(|(&v, want)| match want {
        None => x.contains(&v),
        Some(a) => !x.contains(&v) && lab.get(&v) == Some(a),
    })
}

fn better(a: &UlcSolution, b: &UlcSolution) -> bool {
    a.deleted.len() < b.deleted.len()
        || (a.deleted.len() == b.deleted.len() && a.deleted < b.deleted)
}

fn merge_candidate(map: &mut UlcMap, behavior: UlcBehavior, cand: UlcSolution) {
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

/// Theoretical recursion threshold `q = k (s+1)^{4k} + 2k`.
pub fn theoretical_q(k: u64, sigma: u64) -> u64 {
    let mut p: u64 = 1;
    for _ in 0..4 * k {
        p = p.saturating_mul(sigma.saturating_add(1));
    }
    k.saturating_mul(p).saturating_add(2 * k)
}

/// Component bound `t = (2q+2)(2^k - 1) + 4k + 1`.
pub fn component_bound(q: u64, k: u64) -> u64 {
    let pow = if k >= 63 { u64::MAX } else { (1u64 << k) - 1 };
    (2u64.saturating_mul(q).saturating_add(2))
        .saturating_mul(pow)
        .saturating_add(4 * k + 1)
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

/// For a fixed deletion set, the realizable border assignments decompose per
/// component; behaviors are assembled as their product.
fn record_deletion_set(
    ib: &UlcBorderInstance,
    x: &BTreeSet<VertexId>,
    map: &mut UlcMap,
) -> Result<()> {
    let inst = &ib.inst;
    let remaining = inst.graph.without_vertices(x);
    let mut base_label = Labeling::new();
    let mut choice_groups: Vec<Vec<Labeling>> = Vec::new();
    for comp in remaining.connected_components() {
        let comp_set: BTreeSet<VertexId> = comp.iter().copied().collect();
        let has_border = comp.iter().any(|v| ib.border.contains(v));
        let labs = enumerate_labelings(inst, &comp_set)?;
        if labs.is_empty() {
            return Ok(()); // x is infeasible outright
        }
        if has_border {
            choice_groups.push(labs);
        } else {
            base_label.extend(labs.into_iter().next().unwrap());
        }
    }
    // product over border-carrying components
    let mut stack: Vec<(usize, Labeling)> = vec![(0, base_label)];
    while let Some((i, lab)) = stack.pop() {
        if i == choice_groups.len() {
            let behavior: UlcBehavior = ib
                .border
                .iter()
                .map(|v| if x.contains(v) { None } else { Some(lab[v]) })
                .collect();
            merge_candidate(
                map,
                behavior,
                UlcSolution {
                    deleted: x.iter().copied().collect(),
                    labeling: lab,
                },
            );
            continue;
        }
        for choice in &choice_groups[i] {
            let mut next = lab.clone();
            next.extend(choice.iter().map(|(&v, &a)| (v, a)));
            stack.push((i + 1, next));
        }
    }
    Ok(())
}

fn brute_force_border(ib: &UlcBorderInstance) -> Result<UlcMap> {
    let vertices = ib.inst.graph.vertex_ids();
    let mut map = UlcMap::new();
    for x in crate::harness::vertex_subsets_within_budget(&vertices, ib.inst.budget) {
        record_deletion_set(ib, &x, &mut map)?;
    }
    Ok(map)
}

// ---------------------------------------------------------------------------
// High-connectivity phase
// ---------------------------------------------------------------------------

/// At most `s` viable labelings of the union of big stains: labelings of the
/// largest stain, each extended to every other big stain by the majority
/// vote over `2k+1` internally disjoint connecting paths.
fn big_stain_labelings(
    inst: &UlcInstance,
    big_stains: &[BTreeSet<VertexId>],
    k: u64,
) -> Result<Vec<Labeling>> {
    if big_stains.is_empty() {
        return Ok(Vec::new());
    }
    let c1_idx = (0..big_stains.len())
        .max_by_key(|&i| {
            (
                big_stains[i].len(),
                core::cmp::Reverse(*big_stains[i].iter().next().unwrap()),
            )
        })
        .unwrap();
    let c1 = &big_stains[c1_idx];
    let mut out = Vec::new();
    'seed: for base in enumerate_labelings(inst, c1)? {
        let mut total = base.clone();
        for (i, c2) in big_stains.iter().enumerate() {
            if i == c1_idx {
                continue;
            }
            let paths = vertex_disjoint_paths(&inst.graph, c1, c2, 2 * k + 1)?;
            // one vote per path: compose the constraints along it
            let mut votes: BTreeMap<Label, u64> = BTreeMap::new();
            let mut lab_by_vote: BTreeMap<Label, Labeling> = BTreeMap::new();
            let anchor2 = *c2.iter().next().unwrap();
            for p in &paths {
                let mut cur = match base.get(&p[0]) {
                    Some(&a) => a,
                    None => continue,
                };
                let mut ok = true;
                for w in p.windows(2) {
                    match inst.psi_from(w[0], w[1]).apply(cur) {
                        Some(next) => cur = next,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                if let Some(lab) = propagate_labeling(inst, c2, *p.last().unwrap(), cur)? {
                    let key = lab[&anchor2];
                    *votes.entry(key).or_insert(0) += 1;
                    lab_by_vote.entry(key).or_insert(lab);
                }
            }
            // an unambiguous winner needs at least k+1 agreeing votes
            match votes.iter().find(|(_, &c)| c >= k + 1) {
                Some((&key, _)) => total.extend(lab_by_vote.remove(&key).unwrap()),
                None => continue 'seed,
            }
        }
        out.push(total);
    }
    Ok(out)
}

/// Search state of the bounded search tree.
#[derive(Debug, Clone)]
struct SearchState {
    x0: BTreeSet<VertexId>,
    y: BTreeSet<VertexId>,
    ypsi: BTreeSet<VertexId>,
    psi_y: Labeling,
}

/// Outcome of advancing one state by the first applicable rule.
enum Step {
    Leaf(Option<(BTreeSet<VertexId>, Labeling)>),
    Children(Vec<SearchState>),
}

fn first_rule(
    ib: &UlcBorderInstance,
    st: &SearchState,
    s_big_closed: &BTreeSet<VertexId>,
    s_big: &BTreeSet<VertexId>,
    s_set: &BTreeSet<VertexId>,
) -> Result<Step> {
    let inst = &ib.inst;
    let k = inst.budget;
    // Finishing Rule
    if st.x0.len() as u64 > k {
        return Ok(Step::Leaf(None));
    }
    let alive: BTreeSet<VertexId> = inst
        .graph
        .vertex_ids()
        .into_iter()
        .filter(|v| !st.x0.contains(v))
        .collect();
    if let Some(lab) = find_labeling_extending(inst, &alive, &st.psi_y)? {
        return Ok(Step::Leaf(Some((st.x0.clone(), lab))));
    }
    // Neighborhood Branching Rule
    let mut closed: BTreeSet<VertexId> = st.ypsi.clone();
    for &v in &st.ypsi {
        for w in inst.graph.neighbors(v) {
            if !st.x0.contains(&w) {
                closed.insert(w);
            }
        }
    }
    if find_labeling_extending(inst, &closed, &st.psi_y)?.is_none() {
        if st.x0.len() as u64 >= k {
            return Ok(Step::Leaf(None)); // any child would exceed the budget
        }
        let blocking = find_blocking_set(inst, st, &closed)?;
        let mut children = Vec::new();
        for b in blocking {
            // deleting a committed labeled vertex contradicts the tuple
            if st.ypsi.contains(&b) {
                continue;
            }
            let mut child = st.clone();
            child.x0.insert(b);
            child.y.remove(&b);
            children.push(child);
        }
        return Ok(Step::Children(children));
    }
    // Small Stains Rule
    let mut blocked: BTreeSet<VertexId> = s_big_closed.clone();
    blocked.extend(st.x0.iter().copied());
    let outside = inst.graph.without_vertices(&blocked);
    let comp = outside
        .connected_components()
        .into_iter()
        .map(|c| c.into_iter().collect::<BTreeSet<VertexId>>())
        .find(|c| c.iter().any(|v| st.y.contains(v) && !st.ypsi.contains(v)));
    let c = match comp {
        Some(c) => c,
        None => {
            return Err(contract(
                "ulc rules: no rule applicable on a non-terminated state",
            ))
        }
    };
    // case 1: the committed labeling extends over S^big and N[C]
    let mut c_star: BTreeSet<VertexId> = s_big.clone();
    for &v in &c {
        c_star.insert(v);
        for w in inst.graph.neighbors(v) {
            if !st.x0.contains(&w) {
                c_star.insert(w);
            }
        }
    }
    if let Some(lab) = find_labeling_extending(inst, &c_star, &st.psi_y)? {
        let mut child = st.clone();
        for &v in &c {
            if child.y.contains(&v) && !child.ypsi.contains(&v) {
                child.ypsi.insert(v);
                child.psi_y.insert(v, lab[&v]);
            }
        }
        return Ok(Step::Children(vec![child]));
    }
    // an unlabelable closure around C forces one more deletion in every
    // solution below this state; a spent budget ends the branch here
    if st.x0.len() as u64 >= k {
        return Ok(Step::Leaf(None));
    }
    let mut children = Vec::new();
    let c_out: BTreeSet<VertexId> = c.iter().copied().filter(|v| !s_set.contains(v)).collect();
    // case 2: C holds deletions plus fully small stains
    if !c_out.is_empty()
        && c_out.is_disjoint(&st.ypsi)
        && (st.x0.len() + c_out.len()) as u64 <= k
    {
        let mut child = st.clone();
        child.x0.extend(c_out.iter().copied());
        for v in &c_out {
            child.y.remove(v);
        }
        if label_stains_in(inst, &c, s_set, &mut child)? {
            children.push(child);
        }
    }
    let n_c: BTreeSet<VertexId> = inst.graph.neighborhood_of_set(&c);
    let fully_blocked = n_c.iter().all(|v| st.x0.contains(v));
    if !fully_blocked {
        // case 4: C joins the big component; one branch per labeling of C
        for lab in enumerate_labelings(inst, &c)? {
            if c.iter()
                .filter(|v| st.ypsi.contains(v))
                .any(|v| st.psi_y[v] != lab[v])
            {
                continue;
            }
            let mut child = st.clone();
            child.y.extend(c.iter().copied());
            child.ypsi.extend(c.iter().copied());
            child.psi_y.extend(lab);
            children.push(child);
        }
    }
    Ok(Step::Children(children))
}

/// Case-2 helper: every stain inside `c` must admit a labeling; commits the
/// first one found.
fn label_stains_in(
    inst: &UlcInstance,
    c: &BTreeSet<VertexId>,
    s_set: &BTreeSet<VertexId>,
    child: &mut SearchState,
) -> Result<bool> {
    let inside: BTreeSet<VertexId> = c.intersection(s_set).copied().collect();
    let induced = inst.graph.induced(&inside);
    for stain in induced.connected_components() {
        let stain_set: BTreeSet<VertexId> = stain.iter().copied().collect();
        if stain_set.iter().all(|v| child.ypsi.contains(v)) {
            continue;
        }
        match enumerate_labelings(inst, &stain_set)?.into_iter().next() {
            None => return Ok(false),
            Some(lab) => {
                for (&v, &a) in &lab {
                    if let Some(&prev) = child.psi_y.get(&v) {
                        if prev != a {
                            return Ok(false);
                        }
                    }
                    child.ypsi.insert(v);
                    child.psi_y.insert(v, a);
                }
            }
        }
    }
    Ok(true)
}

/// A blocking set: one or two vertices next to the labeled region that
/// cannot be labeled consistently with it, so one of them must be deleted.
fn find_blocking_set(
    inst: &UlcInstance,
    st: &SearchState,
    closed: &BTreeSet<VertexId>,
) -> Result<Vec<VertexId>> {
    let frontier: Vec<VertexId> = closed
        .iter()
        .copied()
        .filter(|v| !st.ypsi.contains(v))
        .collect();
    let mut forced: BTreeMap<VertexId, Label> = BTreeMap::new();
    for &v in &frontier {
        let w = inst
            .graph
            .neighbors(v)
            .into_iter()
            .find(|w| st.ypsi.contains(w))
            .expect("frontier vertices touch the labeled region");
        let cand = inst.psi_from(w, v).apply(st.psi_y[&w]);
        match cand {
            Some(beta) if inst.domain(v) >> beta & 1 == 1 => {
                forced.insert(v, beta);
            }
            _ => return Ok(vec![v]),
        }
    }
    // some edge inside the closed neighborhood must be violated
    for (u, v, _) in inst.graph.induced(closed).edges_with_mult() {
        let lu = st.psi_y.get(&u).or_else(|| forced.get(&u));
        let lv = st.psi_y.get(&v).or_else(|| forced.get(&v));
        if let (Some(&lu), Some(&lv)) = (lu, lv) {
            if inst.psi_from(u, v).apply(lu) != Some(lv) {
                let mut b = Vec::new();
                if !st.ypsi.contains(&u) {
                    b.push(u);
                }
                if !st.ypsi.contains(&v) {
                    b.push(v);
                }
                if !b.is_empty() {
                    return Ok(b);
                }
            }
        }
    }
    Err(contract(
        "ulc neighborhood rule: no blocking set despite unlabelable closure",
    ))
}

#[allow(clippy::too_many_arguments)]
fn run_search_tree(
    ib: &UlcBorderInstance,
    behavior: &UlcBehavior,
    s_set: &BTreeSet<VertexId>,
    s_big: &BTreeSet<VertexId>,
    psi_big: &Labeling,
    forsaken: &BTreeSet<VertexId>,
    map: &mut UlcMap,
    leaf_cap: u64,
    max_leaves_seen: &mut u64,
) -> Result<()> {
    let inst = &ib.inst;
    // initial tuple
    let mut st = SearchState {
        x0: forsaken.clone(),
        y: s_set.clone(),
        ypsi: s_big.clone(),
        psi_y: psi_big.clone(),
    };
    if !st.x0.is_disjoint(&st.y) {
        return Ok(());
    }
    for (i, &v) in ib.border.iter().enumerate() {
        match behavior[i] {
            None => {
                if st.y.contains(&v) {
                    return Ok(());
                }
            }
            Some(a) => {
                if st.ypsi.contains(&v) {
                    if st.psi_y[&v] != a {
                        return Ok(());
                    }
                    continue;
                }
                st.y.insert(v);
                let comp: BTreeSet<VertexId> = inst.graph.induced(&st.y).component_of(v);
                match propagate_labeling(inst, &comp, v, a)? {
                    None => return Ok(()),
                    Some(lab) => {
                        if comp
                            .iter()
                            .filter(|w| st.ypsi.contains(w))
                            .any(|w| st.psi_y[w] != lab[w])
                        {
                            return Ok(());
                        }
                        st.ypsi.extend(comp.iter().copied());
                        st.psi_y.extend(lab);
                    }
                }
            }
        }
    }

    let mut s_big_closed: BTreeSet<VertexId> = s_big.clone();
    for &v in s_big {
        s_big_closed.extend(inst.graph.neighbors(v));
    }

    let mut leaves = 0u64;
    let mut stack = vec![st];
    while let Some(state) = stack.pop() {
        match first_rule(ib, &state, &s_big_closed, s_big, s_set)? {
            Step::Leaf(outcome) => {
                leaves += 1;
                if let Some((x0, lab)) = outcome {
                    if is_ulc_solution(inst, &x0, &lab) && consistent_with(ib, behavior, &x0, &lab)
                    {
                        merge_candidate(
                            map,
                            behavior.clone(),
                            UlcSolution {
                                deleted: x0.into_iter().collect(),
                                labeling: lab,
                            },
                        );
                    }
                }
            }
            Step::Children(children) => {
                if children.is_empty() {
                    leaves += 1;
                }
                stack.extend(children);
            }
        }
        if leaves > leaf_cap {
            return Err(contract("ulc search tree exceeded its (2s+1)^k leaf bound"));
        }
    }
    *max_leaves_seen = (*max_leaves_seen).max(leaves);
    Ok(())
}

fn enumerate_ulc_behaviors(m: usize, sigma: usize) -> Vec<UlcBehavior> {
    let mut out: Vec<UlcBehavior> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for b in &out {
            for choice in core::iter::once(None).chain((0..sigma as Label).map(Some)) {
                let mut nb = b.clone();
                nb.push(choice);
                next.push(nb);
            }
        }
        out = next;
    }
    out
}

fn high_connectivity_border(
    ib: &UlcBorderInstance,
    cfg: &SolveConfig,
    q: u64,
    t: u64,
    stats: &mut Stats,
) -> Result<UlcMap> {
    let inst = &ib.inst;
    let k = inst.budget;
    let s = inst.sigma as u64;
    let leaf_cap = {
        let mut cap: u64 = 1;
        for _ in 0..k {
            cap = cap.saturating_mul(2 * s + 1);
        }
        cap
    };
    let mut map = UlcMap::new();
    let behaviors = enumerate_ulc_behaviors(ib.border.len(), inst.sigma);

    // empty deletion set, per behavior
    for behavior in &behaviors {
        if behavior.iter().any(|b| b.is_none()) {
            continue;
        }
        let anchors: Labeling = ib
            .border
            .iter()
            .zip(behavior)
            .map(|(&v, l)| (v, l.unwrap()))
            .collect();
        if let Some(lab) = find_labeling_extending(inst, &inst.graph.vertex_set(), &anchors)? {
            merge_candidate(
                &mut map,
                behavior.clone(),
                UlcSolution {
                    deleted: Vec::new(),
                    labeling: lab,
                },
            );
        }
    }

    let universe: Vec<u64> = inst.graph.vertex_ids().into_iter().map(|v| v as u64).collect();
    let a = q.saturating_mul(t).saturating_add((q + 1).saturating_mul(k));
    let family = cfg.family.build(universe, a as usize, k as usize, "ulc-high")?;
    stats.failure_bound += family.provenance.pair_failure_bound;
    stats.family_sets += family.len() as u64;
    stats.branches += family.len() as u64;

    let mut max_leaves = 0u64;
    for i in 0..family.len() {
        let s_raw: BTreeSet<VertexId> = family.sets[i].iter().map(|&x| x as VertexId).collect();
        for behavior in &behaviors {
            let forsaken: BTreeSet<VertexId> = ib
                .border
                .iter()
                .zip(behavior)
                .filter(|(_, b)| b.is_none())
                .map(|(&v, _)| v)
                .chain(
                    inst.graph
                        .vertex_ids()
                        .into_iter()
                        .filter(|&v| inst.domain(v) == 0),
                )
                .collect();
            if forsaken.len() as u64 > k {
                continue;
            }
            // grow S: add (ascending) any non-forsaken vertex whose closed
            // neighborhood misses S
            let mut s_set = s_raw.clone();
            loop {
                let mut grew = false;
                for v in inst.graph.vertex_ids() {
                    if forsaken.contains(&v) || s_set.contains(&v) {
                        continue;
                    }
                    if inst.graph.neighbors(v).iter().all(|w| !s_set.contains(w)) {
                        s_set.insert(v);
                        grew = true;
                    }
                }
                if !grew {
                    break;
                }
            }
            if !forsaken.is_disjoint(&s_set) {
                continue;
            }
            let stains = inst.graph.induced(&s_set).connected_components();
            let big: Vec<BTreeSet<VertexId>> = stains
                .iter()
                .filter(|c| c.len() as u64 > q)
                .map(|c| c.iter().copied().collect())
                .collect();
            if big.is_empty() {
                continue;
            }
            let s_big: BTreeSet<VertexId> = big.iter().flatten().copied().collect();
            for psi_big in big_stain_labelings(inst, &big, k)? {
                run_search_tree(
                    ib,
                    behavior,
                    &s_set,
                    &s_big,
                    &psi_big,
                    &forsaken,
                    &mut map,
                    leaf_cap,
                    &mut max_leaves,
                )?;
            }
        }
    }
    stats.max_rule_leaves = stats.max_rule_leaves.max(max_leaves);
    Ok(map)
}

// ---------------------------------------------------------------------------
// Bordered recursion
// ---------------------------------------------------------------------------

/// Solves the bordered problem for every behavior (functions from the border
/// to labels-or-deletion); missing keys mean no consistent solution exists.
pub fn solve_border_ulc(
    ib: UlcBorderInstance,
    cfg: &SolveConfig,
    stats: &mut Stats,
    depth: u64,
) -> Result<UlcMap> {
    stats.max_depth = stats.max_depth.max(depth);
    let k = ib.inst.budget;
    if ib.border.len() as u64 > 4 * k {
        return Err(contract("border ulc: more than 4k border terminals"));
    }
    if !ib.inst.graph.is_connected() {
        return Err(invalid("border ulc: disconnected graph"));
    }
    let original = ib.clone();
    let mut ib = ib;
    let mut q = cfg
        .q_override
        .unwrap_or_else(|| theoretical_q(k, ib.inst.sigma as u64))
        .max(1);
    let empty_vinf: BTreeSet<VertexId> = BTreeSet::new();
    let mut bypass_log: Vec<BypassRecord> = Vec::new();

    loop {
        let border_set: BTreeSet<VertexId> = ib.border.iter().copied().collect();
        let sep =
            find_good_node_separation(&ib.inst.graph, &empty_vinf, q, 2 * k, &cfg.family, stats)?;
        let (v_star, z_w) = match sep {
            Some(sepn) => {
                let b1 = sepn.side1.intersection(&border_set).count() as u64;
                let side = if b1 <= 2 * k { sepn.side1 } else { sepn.side2 };
                let zw = ib.inst.graph.neighborhood_of_set(&side);
                (side, zw)
            }
            None => match find_flower_separation(
                &ib.inst.graph,
                &empty_vinf,
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
            },
        };
        let mut w: BTreeSet<VertexId> = v_star.clone();
        w.extend(z_w.iter().copied());
        let side_border: BTreeSet<VertexId> = ib
            .border
            .iter()
            .copied()
            .filter(|v| w.contains(v))
            .chain(z_w.iter().copied())
            .collect();
        let side = UlcBorderInstance {
            inst: UlcInstance {
                graph: ib.inst.graph.induced(&w),
                sigma: ib.inst.sigma,
                budget: k,
                domains: ib
                    .inst
                    .domains
                    .iter()
                    .filter(|(v, _)| w.contains(v))
                    .map(|(&v, &d)| (v, d))
                    .collect(),
                constraints: ib
                    .inst
                    .constraints
                    .iter()
                    .filter(|((u, v), _)| w.contains(u) && w.contains(v))
                    .map(|(&e, p)| (e, p.clone()))
                    .collect(),
            },
            border: side_border.iter().copied().collect(),
        };
        debug_assert!(side.inst.graph.vertex_count() < ib.inst.graph.vertex_count());
        let sub = solve_border_ulc(side, cfg, stats, depth + 1)?;
        if sub.is_empty() {
            // no behavior of the side instance is solvable, so neither is
            // any behavior of this one
            return Ok(UlcMap::new());
        }
        let mut used: BTreeSet<VertexId> = side_border;
        for sol in sub.values() {
            used.extend(sol.deleted.iter().copied());
        }
        let bypassable: Vec<VertexId> = v_star
            .iter()
            .copied()
            .filter(|v| !used.contains(v))
            .collect();
        if bypassable.is_empty() {
            q = q.saturating_mul(2);
            continue;
        }
        for v in bypassable {
            bypass_log.push(bypass_vertex_ulc(&mut ib.inst, v)?);
        }
    }

    let t = cfg.t_override.unwrap_or_else(|| component_bound(q, k));
    let map = if ib.inst.graph.vertex_count() as u64 <= q.saturating_mul(t).saturating_add(k) {
        brute_force_border(&ib)?
    } else {
        high_connectivity_border(&ib, cfg, q, t, stats)?
    };

    if bypass_log.is_empty() {
        return Ok(map);
    }
    // extend labelings back over the bypassed vertices, newest first
    let mut extended = UlcMap::new();
    for (behavior, sol) in map.iter() {
        let x: BTreeSet<VertexId> = sol.deleted.iter().copied().collect();
        let mut lab = sol.labeling.clone();
        for rec in bypass_log.iter().rev() {
            let alpha = match rec
                .incident
                .iter()
                .find(|(u, _)| !x.contains(u) && lab.contains_key(u))
            {
                Some((u, psi_to_v)) => match psi_to_v.apply(lab[u]) {
                    Some(a) if rec.domain >> a & 1 == 1 => a,
                    _ => {
                        return Err(contract("ulc: bypass extension hit a dead neighbor"));
                    }
                },
                None => (0..64)
                    .find(|b| rec.domain >> b & 1 == 1)
                    .map(|b| b as Label)
                    .expect("bypassed vertices have nonempty lists"),
            };
            lab.insert(rec.vertex, alpha);
        }
        if is_ulc_solution(&original.inst, &x, &lab)
            && consistent_with(&original, behavior, &x, &lab)
        {
            extended.insert(
                behavior.clone(),
                UlcSolution {
                    deleted: sol.deleted.clone(),
                    labeling: lab,
                },
            );
        } else {
            return Err(contract("ulc: bypass extension failed validation"));
        }
    }
    Ok(extended)
}

// ---------------------------------------------------------------------------
// Top level and the edge-deletion front-end
// ---------------------------------------------------------------------------

/// Solves a Node Unique Label Cover instance.
pub fn solve_ulc(inst: &UlcInstance, cfg: &SolveConfig) -> Result<SolutionReport> {
    inst.validate()?;
    let mut stats = Stats::default();
    let k = inst.budget;
    let q = cfg
        .q_override
        .unwrap_or_else(|| theoretical_q(k, inst.sigma as u64))
        .max(1);
    let provenance = Provenance {
        family_mode: cfg.family.kind.as_str(),
        seed: cfg.family.seed,
        delta: cfg.family.delta,
        q,
        t: Some(cfg.t_override.unwrap_or_else(|| component_bound(q, k))),
        exact: cfg.family.kind.is_deterministic(),
    };

    let mut deleted: BTreeSet<VertexId> = BTreeSet::new();
    let mut labeling = Labeling::new();
    for comp in inst.graph.connected_components() {
        let comp_set: BTreeSet<VertexId> = comp.iter().copied().collect();
        let sub = UlcInstance {
            graph: inst.graph.induced(&comp_set),
            sigma: inst.sigma,
            budget: k,
            domains: inst
                .domains
                .iter()
                .filter(|(v, _)| comp_set.contains(v))
                .map(|(&v, &d)| (v, d))
                .collect(),
            constraints: inst
                .constraints
                .iter()
                .filter(|((u, v), _)| comp_set.contains(u) && comp_set.contains(v))
                .map(|(&e, p)| (e, p.clone()))
                .collect(),
        };
        let ib = UlcBorderInstance {
            inst: sub,
            border: Vec::new(),
        };
        let map = solve_border_ulc(ib, cfg, &mut stats, 0)?;
        match map.get(&Vec::new()) {
            None => return Ok(SolutionReport::no(provenance, stats)),
            Some(sol) => {
                deleted.extend(sol.deleted.iter().copied());
                labeling.extend(sol.labeling.iter().map(|(&v, &a)| (v, a)));
            }
        }
    }
    if deleted.len() as u64 > k {
        return Ok(SolutionReport::no(provenance, stats));
    }
    if !is_ulc_solution(inst, &deleted, &labeling) {
        return Err(contract("ulc: candidate failed final validation"));
    }
    Ok(SolutionReport {
        answer: Answer::Yes,
        size: Some(deleted.len() as u64),
        solution: Some(SolutionBody::VerticesLabeled {
            vertices: deleted.iter().copied().collect(),
            labeling: labeling.iter().map(|(&v, &a)| (v, a)).collect(),
        }),
        provenance,
        stats,
    })
}

/// Edge Unique Label Cover instance: deletions are edges, every vertex must
/// be labeled.
#[derive(Debug, Clone)]
pub struct EulcInstance {
    pub graph: MultiGraph,
    pub sigma: usize,
    pub budget: u64,
    pub domains: BTreeMap<VertexId, u64>,
    pub constraints: BTreeMap<EdgePair, PartialPerm>,
}

impl EulcInstance {
    pub fn domain(&self, v: VertexId) -> u64 {
        self.domains.get(&v).copied().unwrap_or(0)
    }

    pub fn psi_from(&self, u: VertexId, v: VertexId) -> PartialPerm {
        let p = &self.constraints[&pair(u, v)];
        if u < v {
            p.clone()
        } else {
            p.inverse()
        }
    }
}

/// Definitional check for the edge variant: all vertices labeled, surviving
/// constraints satisfied.
pub fn is_eulc_solution(inst: &EulcInstance, x: &BTreeSet<EdgePair>, lab: &Labeling) -> bool {
    if x.len() as u64 > inst.budget {
        return false;
    }
    for v in inst.graph.vertex_ids() {
        match lab.get(&v) {
            None => return false,
            Some(&a) => {
                if inst.domain(v) >> a & 1 == 0 {
                    return false;
                }
            }
        }
    }
    for (u, v, _) in inst.graph.edges_with_mult() {
        if x.contains(&pair(u, v)) {
            continue;
        }
        if inst.psi_from(u, v).apply(lab[&u]) != Some(lab[&v]) {
            return false;
        }
    }
    true
}

/// Artifacts of the edge-to-node reduction.
pub struct EulcReduction {
    pub node: UlcInstance,
    /// Subdivision vertex -> original edge.
    pub edge_of: BTreeMap<VertexId, EdgePair>,
    /// Original vertex -> its undeletability clique of copies.
    pub copies_of: BTreeMap<VertexId, Vec<VertexId>>,
}

/// Subdivides each edge (identity half on the `u` side, the original
/// constraint on the other half) and replaces every original vertex by a
/// `k+1`-clique of copies with identity constraints.
pub fn reduce_edge_ulc(inst: &EulcInstance) -> EulcReduction {
    let k = inst.budget;
    let mut g = MultiGraph::new();
    let mut domains = BTreeMap::new();
    let mut constraints = BTreeMap::new();
    let mut next: VertexId = 1;
    let mut fresh = || {
        let v = next;
        next += 1;
        v
    };
    let mut copies_of: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for v in inst.graph.vertex_ids() {
        let copies: Vec<VertexId> = (0..=k).map(|_| fresh()).collect();
        for &c in &copies {
            g.add_vertex(c);
            domains.insert(c, inst.domain(v));
        }
        for (i, &a) in copies.iter().enumerate() {
            for &b in &copies[i + 1..] {
                g.add_edge(a, b, 1).unwrap();
                constraints.insert(pair(a, b), PartialPerm::identity(inst.sigma));
            }
        }
        copies_of.insert(v, copies);
    }
    let full = if inst.sigma == 64 {
        u64::MAX
    } else {
        (1u64 << inst.sigma) - 1
    };
    let mut edge_of = BTreeMap::new();
    for (u, v, _) in inst.graph.edges_with_mult() {
        let m = fresh();
        g.add_vertex(m);
        domains.insert(m, full);
        edge_of.insert(m, (u, v));
        let psi = inst.psi_from(u, v);
        for &cu in &copies_of[&u] {
            g.add_edge(cu, m, 1).unwrap();
            constraints.insert(pair(cu, m), PartialPerm::identity(inst.sigma));
        }
        for &cv in &copies_of[&v] {
            g.add_edge(m, cv, 1).unwrap();
            // oriented m -> cv carries the original constraint
            let oriented = if m < cv { psi.clone() } else { psi.inverse() };
            constraints.insert(pair(m, cv), oriented);
        }
    }
    EulcReduction {
        node: UlcInstance {
            graph: g,
            sigma: inst.sigma,
            budget: k,
            domains,
            constraints,
        },
        edge_of,
        copies_of,
    }
}

/// Solves Edge Unique Label Cover through the node reduction.
pub fn solve_eulc(inst: &EulcInstance, cfg: &SolveConfig) -> Result<SolutionReport> {
    for (_, _, m) in inst.graph.edges_with_mult() {
        if m != 1 {
            return Err(invalid("eulc: parallel edges are not representable"));
        }
    }
    let red = reduce_edge_ulc(inst);
    let report = solve_ulc(&red.node, cfg)?;
    let Some(SolutionBody::VerticesLabeled { vertices, labeling }) = report.solution else {
        return Ok(report);
    };
    let mut edges: Vec<EdgePair> = Vec::new();
    for v in vertices {
        match red.edge_of.get(&v) {
            Some(&e) => edges.push(e),
            None => return Err(contract("eulc: solution deleted a vertex copy")),
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let node_lab: Labeling = labeling.into_iter().collect();
    let mut lab = Labeling::new();
    for (orig, copies) in &red.copies_of {
        let a = copies
            .iter()
            .find_map(|c| node_lab.get(c))
            .expect("at least one copy survives");
        lab.insert(*orig, *a);
    }
    let x: BTreeSet<EdgePair> = edges.iter().copied().collect();
    if !is_eulc_solution(inst, &x, &lab) {
        return Err(contract("eulc: translated solution failed validation"));
    }
    Ok(SolutionReport {
        size: Some(edges.len() as u64),
        solution: Some(SolutionBody::EdgesLabeled {
            edges,
            labeling: lab.iter().map(|(&v, &a)| (v, a)).collect(),
        }),
        ..report
    })
}
