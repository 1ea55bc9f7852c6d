//! Line-based instance files.
//!
//! ```text
//! # comment
//! p <steiner|emwcu|nmwcu|eulc|nulc|mcc> <n> <m>
//! param k <k>
//! e u v [mult]
//! t v                  (steiner)         param s <s>
//! t v <class>          (emwcu, nmwcu)    undeletable v   (nmwcu)
//! sigma <s>  dom v a..  cst u v a:b ..   (eulc, nulc)
//! param parts <p>      (mcc)
//! ```
//!
//! Vertex ids are 1-based and bounded by `n`; there are exactly `m` `e`
//! lines; labels are 0-based. Every violation is reported with its line
//! number. Printing is canonical, so identical instances print identically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use cutsolver_core::graph::{pair, EdgePair, MultiGraph, VertexId};
use cutsolver_core::harness::MccInstance;
use cutsolver_core::mwcu::{EmwcuInstance, MwcuInstance};
use cutsolver_core::steiner::SteinerInstance;
use cutsolver_core::ulc::{EulcInstance, PartialPerm, UlcInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Steiner,
    Emwcu,
    Nmwcu,
    Eulc,
    Nulc,
    Mcc,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Steiner => "steiner",
            Problem::Emwcu => "emwcu",
            Problem::Nmwcu => "nmwcu",
            Problem::Eulc => "eulc",
            Problem::Nulc => "nulc",
            Problem::Mcc => "mcc",
        }
    }

    pub fn from_str(s: &str) -> Option<Problem> {
        Some(match s {
            "steiner" => Problem::Steiner,
            "emwcu" => Problem::Emwcu,
            "nmwcu" => Problem::Nmwcu,
            "eulc" => Problem::Eulc,
            "nulc" => Problem::Nulc,
            "mcc" => Problem::Mcc,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub enum Instance {
    Steiner(SteinerInstance),
    Emwcu(EmwcuInstance),
    Nmwcu(MwcuInstance),
    Eulc(EulcInstance),
    Nulc(UlcInstance),
    Mcc(MccInstance),
}

impl Instance {
    pub fn problem(&self) -> Problem {
        match self {
            Instance::Steiner(_) => Problem::Steiner,
            Instance::Emwcu(_) => Problem::Emwcu,
            Instance::Nmwcu(_) => Problem::Nmwcu,
            Instance::Eulc(_) => Problem::Eulc,
            Instance::Nulc(_) => Problem::Nulc,
            Instance::Mcc(_) => Problem::Mcc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

struct RawInstance {
    problem: Problem,
    n: u32,
    edges: Vec<(VertexId, VertexId, u32)>,
    k: Option<u64>,
    s_param: Option<u32>,
    parts: Option<u32>,
    sigma: Option<usize>,
    terminals: Vec<(VertexId, Option<u64>)>,
    undeletable: Vec<VertexId>,
    doms: BTreeMap<VertexId, Vec<u8>>,
    csts: BTreeMap<EdgePair, Vec<(u8, u8)>>,
    cst_orient: BTreeMap<EdgePair, bool>, // stored pair listed as (u < v)?
}

pub fn parse(text: &str) -> Result<Instance, ParseError> {
    let mut raw: Option<RawInstance> = None;
    let mut edge_lines = 0usize;
    let mut declared_m = 0usize;
    for (idx, line_raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line_raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok[0] {
            "p" => {
                if raw.is_some() {
                    return Err(err(lineno, "duplicate problem header"));
                }
                if tok.len() != 4 {
                    return Err(err(lineno, "expected: p <problem> <n> <m>"));
                }
                let problem = Problem::from_str(tok[1])
                    .ok_or_else(|| err(lineno, format!("unknown problem '{}'", tok[1])))?;
                let n: u32 = tok[2]
                    .parse()
                    .map_err(|_| err(lineno, "n must be an integer"))?;
                declared_m = tok[3]
                    .parse()
                    .map_err(|_| err(lineno, "m must be an integer"))?;
                raw = Some(RawInstance {
                    problem,
                    n,
                    edges: Vec::new(),
                    k: None,
                    s_param: None,
                    parts: None,
                    sigma: None,
                    terminals: Vec::new(),
                    undeletable: Vec::new(),
                    doms: BTreeMap::new(),
                    csts: BTreeMap::new(),
                    cst_orient: BTreeMap::new(),
                });
            }
            _ => {
                let r = raw
                    .as_mut()
                    .ok_or_else(|| err(lineno, "content before the problem header"))?;
                let vertex = |s: &str, lineno: usize| -> Result<VertexId, ParseError> {
                    let v: u32 = s
                        .parse()
                        .map_err(|_| err(lineno, format!("'{s}' is not a vertex id")))?;
                    if v == 0 || v > r.n {
                        return Err(err(lineno, format!("vertex id {v} out of range 1..={}", r.n)));
                    }
                    Ok(v)
                };
                match tok[0] {
                    "e" => {
                        if tok.len() != 3 && tok.len() != 4 {
                            return Err(err(lineno, "expected: e u v [mult]"));
                        }
                        let u = vertex(tok[1], lineno)?;
                        let v = vertex(tok[2], lineno)?;
                        if u == v {
                            return Err(err(lineno, "loops are not allowed"));
                        }
                        let mult: u32 = if tok.len() == 4 {
                            tok[3]
                                .parse()
                                .map_err(|_| err(lineno, "multiplicity must be an integer"))?
                        } else {
                            1
                        };
                        if mult == 0 {
                            return Err(err(lineno, "multiplicity must be positive"));
                        }
                        r.edges.push((u, v, mult));
                        edge_lines += 1;
                    }
                    "param" => {
                        if tok.len() != 3 {
                            return Err(err(lineno, "expected: param <name> <value>"));
                        }
                        match tok[1] {
                            "k" => {
                                r.k = Some(tok[2].parse().map_err(|_| {
                                    err(lineno, "param k must be an integer")
                                })?)
                            }
                            "s" => {
                                r.s_param = Some(tok[2].parse().map_err(|_| {
                                    err(lineno, "param s must be an integer")
                                })?)
                            }
                            "parts" => {
                                r.parts = Some(tok[2].parse().map_err(|_| {
                                    err(lineno, "param parts must be an integer")
                                })?)
                            }
                            other => {
                                return Err(err(lineno, format!("unknown parameter '{other}'")))
                            }
                        }
                    }
                    "t" => {
                        let u = vertex(tok[1], lineno)?;
                        match (r.problem, tok.len()) {
                            (Problem::Steiner, 2) => r.terminals.push((u, None)),
                            (Problem::Emwcu | Problem::Nmwcu, 3) => {
                                let class: u64 = tok[2].parse().map_err(|_| {
                                    err(lineno, "terminal class must be an integer")
                                })?;
                                r.terminals.push((u, Some(class)));
                            }
                            (Problem::Steiner, _) => {
                                return Err(err(lineno, "expected: t v"));
                            }
                            (Problem::Emwcu | Problem::Nmwcu, _) => {
                                return Err(err(lineno, "expected: t v <class>"));
                            }
                            _ => {
                                return Err(err(
                                    lineno,
                                    "terminals are not part of this problem",
                                ))
                            }
                        }
                    }
                    "undeletable" => {
                        if r.problem != Problem::Nmwcu {
                            return Err(err(
                                lineno,
                                "undeletable vertices exist only in nmwcu instances",
                            ));
                        }
                        if tok.len() != 2 {
                            return Err(err(lineno, "expected: undeletable v"));
                        }
                        r.undeletable.push(vertex(tok[1], lineno)?);
                    }
                    "sigma" => {
                        if !matches!(r.problem, Problem::Eulc | Problem::Nulc) {
                            return Err(err(lineno, "sigma applies only to label cover"));
                        }
                        if tok.len() != 2 {
                            return Err(err(lineno, "expected: sigma <s>"));
                        }
                        let s: usize = tok[1]
                            .parse()
                            .map_err(|_| err(lineno, "sigma must be an integer"))?;
                        if s == 0 || s > cutsolver_core::ulc::MAX_SIGMA {
                            return Err(err(
                                lineno,
                                format!("sigma must be in 1..={}", cutsolver_core::ulc::MAX_SIGMA),
                            ));
                        }
                        r.sigma = Some(s);
                    }
                    "dom" => {
                        if !matches!(r.problem, Problem::Eulc | Problem::Nulc) {
                            return Err(err(lineno, "dom applies only to label cover"));
                        }
                        if tok.len() < 2 {
                            return Err(err(lineno, "expected: dom v a1 a2 ..."));
                        }
                        let v = vertex(tok[1], lineno)?;
                        let mut labels = Vec::new();
                        for t in &tok[2..] {
                            labels.push(
                                t.parse::<u8>()
                                    .map_err(|_| err(lineno, format!("'{t}' is not a label")))?,
                            );
                        }
                        if r.doms.insert(v, labels).is_some() {
                            return Err(err(lineno, format!("duplicate dom line for vertex {v}")));
                        }
                    }
                    "cst" => {
                        if !matches!(r.problem, Problem::Eulc | Problem::Nulc) {
                            return Err(err(lineno, "cst applies only to label cover"));
                        }
                        if tok.len() < 3 {
                            return Err(err(lineno, "expected: cst u v a:b ..."));
                        }
                        let u = vertex(tok[1], lineno)?;
                        let v = vertex(tok[2], lineno)?;
                        if u == v {
                            return Err(err(lineno, "constraint on a loop"));
                        }
                        let mut pairs = Vec::new();
                        for t in &tok[3..] {
                            let (a, b) = t
                                .split_once(':')
                                .ok_or_else(|| err(lineno, format!("'{t}' is not 'a:b'")))?;
                            let a: u8 = a
                                .parse()
                                .map_err(|_| err(lineno, format!("'{a}' is not a label")))?;
                            let b: u8 = b
                                .parse()
                                .map_err(|_| err(lineno, format!("'{b}' is not a label")))?;
                            pairs.push((a, b));
                        }
                        let key = pair(u, v);
                        if r.csts.insert(key, pairs).is_some() {
                            return Err(err(lineno, format!("duplicate cst line for {u}-{v}")));
                        }
                        r.cst_orient.insert(key, u < v);
                    }
                    other => return Err(err(lineno, format!("unknown directive '{other}'"))),
                }
            }
        }
    }
    let raw = raw.ok_or_else(|| err(0, "missing problem header"))?;
    if edge_lines != declared_m {
        return Err(err(
            0,
            format!("header declares {declared_m} edges but {edge_lines} e lines follow"),
        ));
    }
    finish(raw)
}

fn build_graph(n: u32, edges: &[(VertexId, VertexId, u32)]) -> Result<MultiGraph, ParseError> {
    let mut g = MultiGraph::with_vertices(n);
    for &(u, v, m) in edges {
        g.add_edge(u, v, m)
            .map_err(|e| err(0, format!("bad edge {u}-{v}: {e}")))?;
    }
    Ok(g)
}

fn finish(raw: RawInstance) -> Result<Instance, ParseError> {
    let k = raw.k.ok_or_else(|| err(0, "missing 'param k'"))?;
    match raw.problem {
        Problem::Steiner => {
            let s = raw.s_param.ok_or_else(|| err(0, "missing 'param s'"))?;
            let graph = build_graph(raw.n, &raw.edges)?;
            let terminals: BTreeSet<VertexId> = raw.terminals.iter().map(|&(v, _)| v).collect();
            Ok(Instance::Steiner(SteinerInstance {
                graph,
                terminals,
                parts: s,
                budget: k,
            }))
        }
        Problem::Emwcu | Problem::Nmwcu => {
            let graph = build_graph(raw.n, &raw.edges)?;
            let mut by_class: BTreeMap<u64, BTreeSet<VertexId>> = BTreeMap::new();
            for &(v, class) in &raw.terminals {
                let class = class.ok_or_else(|| err(0, "terminal without class"))?;
                by_class.entry(class).or_default().insert(v);
            }
            let classes: Vec<BTreeSet<VertexId>> = by_class.into_values().collect();
            for (i, a) in classes.iter().enumerate() {
                for b in classes.iter().skip(i + 1) {
                    if !a.is_disjoint(b) {
                        return Err(err(0, "a terminal appears in two classes"));
                    }
                }
            }
            if raw.problem == Problem::Emwcu {
                Ok(Instance::Emwcu(EmwcuInstance {
                    graph,
                    classes,
                    budget: k,
                }))
            } else {
                let mut undeletable: BTreeSet<VertexId> =
                    classes.iter().flatten().copied().collect();
                undeletable.extend(raw.undeletable.iter().copied());
                Ok(Instance::Nmwcu(MwcuInstance {
                    graph,
                    classes,
                    budget: k,
                    undeletable,
                }))
            }
        }
        Problem::Eulc | Problem::Nulc => {
            let sigma = raw.sigma.ok_or_else(|| err(0, "missing 'sigma'"))?;
            let graph = build_graph(raw.n, &raw.edges)?;
            for (u, v, m) in graph.edges_with_mult() {
                if m != 1 {
                    return Err(err(0, format!("label cover edge {u}-{v} has multiplicity {m}")));
                }
            }
            let full: u64 = if sigma == 64 { u64::MAX } else { (1u64 << sigma) - 1 };
            let mut domains: BTreeMap<VertexId, u64> =
                (1..=raw.n).map(|v| (v, full)).collect();
            for (&v, labels) in &raw.doms {
                let mut mask = 0u64;
                for &l in labels {
                    if l as usize >= sigma {
                        return Err(err(0, format!("label {l} out of range at vertex {v}")));
                    }
                    mask |= 1 << l;
                }
                domains.insert(v, mask);
            }
            let mut constraints: BTreeMap<EdgePair, PartialPerm> = BTreeMap::new();
            for (key, pairs) in &raw.csts {
                if !graph.has_edge(key.0, key.1) {
                    return Err(err(0, format!("cst for missing edge {}-{}", key.0, key.1)));
                }
                let listed_fwd = raw.cst_orient[key];
                let oriented: Vec<(u8, u8)> = if listed_fwd {
                    pairs.clone()
                } else {
                    pairs.iter().map(|&(a, b)| (b, a)).collect()
                };
                let pp = PartialPerm::from_pairs(sigma, &oriented)
                    .map_err(|e| err(0, format!("cst {}-{}: {e}", key.0, key.1)))?;
                constraints.insert(*key, pp);
            }
            for (u, v, _) in graph.edges_with_mult() {
                if !constraints.contains_key(&(u, v)) {
                    return Err(err(0, format!("edge {u}-{v} has no cst line")));
                }
            }
            if raw.problem == Problem::Eulc {
                Ok(Instance::Eulc(EulcInstance {
                    graph,
                    sigma,
                    budget: k,
                    domains,
                    constraints,
                }))
            } else {
                let inst = UlcInstance {
                    graph,
                    sigma,
                    budget: k,
                    domains,
                    constraints,
                };
                inst.validate().map_err(|e| err(0, format!("{e}")))?;
                Ok(Instance::Nulc(inst))
            }
        }
        Problem::Mcc => {
            let parts = raw.parts.ok_or_else(|| err(0, "missing 'param parts'"))?;
            if parts == 0 || raw.n % parts != 0 {
                return Err(err(0, "n must be divisible by the part count"));
            }
            let mcc = MccInstance {
                parts,
                part_size: raw.n / parts,
                edges: raw.edges.iter().map(|&(u, v, _)| (u, v)).collect(),
            };
            mcc.validate().map_err(|e| err(0, format!("{e}")))?;
            let _ = k;
            Ok(Instance::Mcc(mcc))
        }
    }
}

/// Canonical text form; `parse(print(x))` reproduces `x`.
pub fn print(inst: &Instance) -> String {
    let mut out = String::new();
    match inst {
        Instance::Steiner(i) => {
            let edges = i.graph.edges_with_mult();
            let n = i.graph.vertex_ids().iter().copied().max().unwrap_or(0);
            writeln!(out, "p steiner {} {}", n, edges.len()).unwrap();
            writeln!(out, "param k {}", i.budget).unwrap();
            writeln!(out, "param s {}", i.parts).unwrap();
            print_edges(&mut out, &edges);
            for t in &i.terminals {
                writeln!(out, "t {t}").unwrap();
            }
        }
        Instance::Emwcu(i) => {
            let edges = i.graph.edges_with_mult();
            let n = i.graph.vertex_ids().iter().copied().max().unwrap_or(0);
            writeln!(out, "p emwcu {} {}", n, edges.len()).unwrap();
            writeln!(out, "param k {}", i.budget).unwrap();
            print_edges(&mut out, &edges);
            for (c, class) in i.classes.iter().enumerate() {
                for t in class {
                    writeln!(out, "t {t} {c}").unwrap();
                }
            }
        }
        Instance::Nmwcu(i) => {
            let edges = i.graph.edges_with_mult();
            let n = i.graph.vertex_ids().iter().copied().max().unwrap_or(0);
            writeln!(out, "p nmwcu {} {}", n, edges.len()).unwrap();
            writeln!(out, "param k {}", i.budget).unwrap();
            print_edges(&mut out, &edges);
            let terminals: BTreeSet<VertexId> = i.classes.iter().flatten().copied().collect();
            for (c, class) in i.classes.iter().enumerate() {
                for t in class {
                    writeln!(out, "t {t} {c}").unwrap();
                }
            }
            for v in &i.undeletable {
                if !terminals.contains(v) {
                    writeln!(out, "undeletable {v}").unwrap();
                }
            }
        }
        Instance::Eulc(i) => {
            print_ulc(&mut out, "eulc", &i.graph, i.sigma, i.budget, &i.domains, &i.constraints)
        }
        Instance::Nulc(i) => {
            print_ulc(&mut out, "nulc", &i.graph, i.sigma, i.budget, &i.domains, &i.constraints)
        }
        Instance::Mcc(i) => {
            writeln!(out, "p mcc {} {}", i.parts * i.part_size, i.edges.len()).unwrap();
            writeln!(out, "param k 0").unwrap();
            writeln!(out, "param parts {}", i.parts).unwrap();
            let mut edges: Vec<(u32, u32)> =
                i.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
            edges.sort_unstable();
            for (u, v) in edges {
                writeln!(out, "e {u} {v}").unwrap();
            }
        }
    }
    out
}

fn print_edges(out: &mut String, edges: &[(VertexId, VertexId, u32)]) {
    for &(u, v, m) in edges {
        if m == 1 {
            writeln!(out, "e {u} {v}").unwrap();
        } else {
            writeln!(out, "e {u} {v} {m}").unwrap();
        }
    }
}

fn print_ulc(
    out: &mut String,
    name: &str,
    graph: &MultiGraph,
    sigma: usize,
    budget: u64,
    domains: &BTreeMap<VertexId, u64>,
    constraints: &BTreeMap<EdgePair, PartialPerm>,
) {
    let edges = graph.edges_with_mult();
    let n = graph.vertex_ids().iter().copied().max().unwrap_or(0);
    writeln!(out, "p {name} {} {}", n, edges.len()).unwrap();
    writeln!(out, "param k {budget}").unwrap();
    writeln!(out, "sigma {sigma}").unwrap();
    print_edges(out, &edges);
    let full: u64 = if sigma == 64 { u64::MAX } else { (1u64 << sigma) - 1 };
    for (&v, &mask) in domains {
        if mask == full {
            continue; // full lists are the default
        }
        let labels: Vec<String> = (0..sigma)
            .filter(|&l| mask >> l & 1 == 1)
            .map(|l| l.to_string())
            .collect();
        writeln!(out, "dom {v} {}", labels.join(" ")).unwrap();
    }
    for (&(u, v), p) in constraints {
        let pairs: Vec<String> = p
            .pairs()
            .iter()
            .map(|(a, b)| format!("{a}:{b}"))
            .collect();
        writeln!(out, "cst {u} {v} {}", pairs.join(" ")).unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STEINER: &str = "# fixture\np steiner 3 2\nparam k 1\nparam s 2\ne 1 2\ne 2 3\nt 1\nt 3\n";

    #[test]
    fn parse_steiner_fixture() {
        let inst = parse(STEINER).unwrap();
        match &inst {
            Instance::Steiner(s) => {
                assert_eq!(s.budget, 1);
                assert_eq!(s.parts, 2);
                assert_eq!(s.terminals.len(), 2);
                assert_eq!(s.graph.edge_count(), 2);
            }
            _ => panic!(),
        }
        let round = parse(&print(&inst)).unwrap();
        assert_eq!(print(&inst), print(&round));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse("e 1 2\n").unwrap_err().message.contains("header"));
        let bad_vertex = "p steiner 2 1\nparam k 1\nparam s 1\ne 1 5\n";
        assert_eq!(parse(bad_vertex).unwrap_err().line, 4);
        let bad_m = "p steiner 2 2\nparam k 1\nparam s 1\ne 1 2\n";
        assert!(parse(bad_m).unwrap_err().message.contains("declares"));
        let loopy = "p steiner 2 1\nparam k 1\nparam s 1\ne 1 1\n";
        assert!(parse(loopy).unwrap_err().message.contains("loop"));
        let bad_perm = "p nulc 2 1\nparam k 0\nsigma 2\ne 1 2\ncst 1 2 0:0 0:1\n";
        assert!(parse(bad_perm).unwrap_err().message.contains("injective"));
        let missing_cst = "p nulc 2 1\nparam k 0\nsigma 2\ne 1 2\n";
        assert!(parse(missing_cst).unwrap_err().message.contains("no cst"));
    }

    #[test]
    fn nmwcu_roundtrip() {
        let text = "p nmwcu 4 3\nparam k 1\ne 1 2\ne 2 3\ne 3 4\nt 1 0\nt 4 1\nundeletable 2\n";
        let inst = parse(text).unwrap();
        match &inst {
            Instance::Nmwcu(i) => {
                assert_eq!(i.classes.len(), 2);
                assert!(i.undeletable.contains(&2));
                assert!(i.undeletable.contains(&1));
            }
            _ => panic!(),
        }
        assert_eq!(print(&parse(&print(&inst)).unwrap()), print(&inst));
    }

    #[test]
    fn ulc_roundtrip_with_orientation() {
        // cst listed with the larger endpoint first must invert correctly
        let text =
            "p nulc 2 1\nparam k 0\nsigma 3\ne 1 2\ndom 1 0 1\ncst 2 1 0:1 1:0 2:2\n";
        let inst = parse(text).unwrap();
        match &inst {
            Instance::Nulc(i) => {
                assert_eq!(i.psi_from(2, 1).apply(0), Some(1));
                assert_eq!(i.psi_from(1, 2).apply(1), Some(0));
                assert_eq!(i.domain(1), 0b011);
            }
            _ => panic!(),
        }
        let printed = print(&inst);
        assert_eq!(print(&parse(&printed).unwrap()), printed);
    }

    #[test]
    fn mcc_roundtrip() {
        let text = "p mcc 4 1\nparam k 0\nparam parts 2\ne 1 4\n";
        let inst = parse(text).unwrap();
        match &inst {
            Instance::Mcc(m) => {
                assert_eq!(m.parts, 2);
                assert_eq!(m.part_size, 2);
            }
            _ => panic!(),
        }
        assert_eq!(print(&parse(&print(&inst)).unwrap()), print(&inst));
        let intra = "p mcc 4 1\nparam k 0\nparam parts 2\ne 1 2\n";
        assert!(parse(intra).is_err());
    }
}
