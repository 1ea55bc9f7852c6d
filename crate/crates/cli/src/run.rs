//! Command implementations shared by the binary and the test suites.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use cutsolver_core::graph::pair;
use cutsolver_core::harness;
use cutsolver_core::mwcu;
use cutsolver_core::report::{
    Answer, FamilyCfg, FamilyKind, Provenance, SolutionBody, SolutionReport, SolveConfig, Stats,
};
use cutsolver_core::steiner;
use cutsolver_core::ulc;

use crate::format::{Instance, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Randomized,
    Bruteforce,
}

impl Mode {
    pub fn from_str(s: &str) -> Option<Mode> {
        Some(match s {
            "exact" => Mode::Exact,
            "randomized" => Mode::Randomized,
            "bruteforce" => Mode::Bruteforce,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveOpts {
    pub mode: Mode,
    pub family: Option<FamilyKind>,
    pub delta: f64,
    pub q_override: Option<u64>,
    pub t_override: Option<u64>,
    pub seed: u64,
    pub karger_trials: u64,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts {
            mode: Mode::Exact,
            family: None,
            delta: 1e-6,
            q_override: None,
            t_override: None,
            seed: 0,
            karger_trials: 200,
        }
    }
}

impl SolveOpts {
    pub fn to_config(&self) -> SolveConfig {
        let kind = self.family.unwrap_or(match self.mode {
            Mode::Randomized => FamilyKind::Randomized,
            _ => FamilyKind::Exhaustive,
        });
        SolveConfig {
            family: FamilyCfg {
                kind,
                delta: self.delta,
                seed: self.seed,
            },
            q_override: self.q_override,
            t_override: self.t_override,
            karger_trials: self.karger_trials,
            randomized_separation: self.mode == Mode::Randomized,
        }
    }
}

/// Flat, stable JSON report. Wall time is deliberately absent so reports are
/// byte-identical across repeated runs and thread counts; timing goes to the
/// human-readable stats channel instead.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonReport {
    pub problem: String,
    pub answer: String,
    pub size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(u32, u32)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labeling: Option<Vec<(u32, u8)>>,
    #[serde(skip_deserializing)]
    pub provenance: Option<Provenance>,
    #[serde(skip_deserializing)]
    pub stats: Option<Stats>,
}

pub fn to_json_report(problem: Problem, report: &SolutionReport) -> JsonReport {
    let answer = match report.answer {
        Answer::Yes => "yes",
        Answer::No => "no",
        Answer::NoMonteCarlo => "no-monte-carlo",
    };
    let (edges, vertices, labeling) = match &report.solution {
        None => (None, None, None),
        Some(SolutionBody::Edges { edges }) => (Some(edges.clone()), None, None),
        Some(SolutionBody::Vertices { vertices }) => (None, Some(vertices.clone()), None),
        Some(SolutionBody::VerticesLabeled { vertices, labeling }) => {
            (None, Some(vertices.clone()), Some(labeling.clone()))
        }
        Some(SolutionBody::EdgesLabeled { edges, labeling }) => {
            (Some(edges.clone()), None, Some(labeling.clone()))
        }
    };
    JsonReport {
        problem: problem.as_str().to_string(),
        answer: answer.to_string(),
        size: report.size,
        edges,
        vertices,
        labeling,
        provenance: Some(report.provenance.clone()),
        stats: Some(report.stats),
    }
}

/// Exit code contract: 0 solved-yes, 2 solved-no, 3 monte-carlo-no, 1 error.
pub fn exit_code(report: &SolutionReport) -> i32 {
    match report.answer {
        Answer::Yes => 0,
        Answer::No => 2,
        Answer::NoMonteCarlo => 3,
    }
}

fn bruteforce_provenance(seed: u64) -> Provenance {
    Provenance {
        family_mode: "bruteforce",
        seed,
        delta: 0.0,
        q: 0,
        t: None,
        exact: true,
    }
}

/// Runs the selected solver (or the exhaustive oracle) on an instance.
pub fn solve_instance(inst: &Instance, opts: &SolveOpts) -> Result<SolutionReport, String> {
    let cfg = opts.to_config();
    let as_report = |opt: Option<(u64, SolutionBody)>| -> SolutionReport {
        let stats = Stats::default();
        match opt {
            None => SolutionReport::no(bruteforce_provenance(opts.seed), stats),
            Some((size, body)) => {
                SolutionReport::yes(size, body, bruteforce_provenance(opts.seed), stats)
            }
        }
    };
    let run = || -> cutsolver_core::Result<SolutionReport> {
        match (inst, opts.mode) {
            (Instance::Mcc(_), _) => Err(cutsolver_core::Error::InvalidInput(
                "mcc instances are reduction inputs; run `reduce --to eulc` first".into(),
            )),
            (Instance::Steiner(i), Mode::Bruteforce) => Ok(as_report(
                harness::oracle_steiner(i)?.map(|(c, e)| (c, SolutionBody::Edges { edges: e })),
            )),
            (Instance::Steiner(i), _) => steiner::solve_steiner(i, &cfg),
            (Instance::Emwcu(i), Mode::Bruteforce) => Ok(as_report(
                harness::oracle_mwcu_edge(i)?.map(|(c, e)| (c, SolutionBody::Edges { edges: e })),
            )),
            (Instance::Emwcu(i), _) => mwcu::solve_emwcu(i, &cfg),
            (Instance::Nmwcu(i), Mode::Bruteforce) => Ok(as_report(
                harness::oracle_mwcu_node(i)?
                    .map(|(c, v)| (c, SolutionBody::Vertices { vertices: v })),
            )),
            (Instance::Nmwcu(i), _) => mwcu::solve_mwcu(i, &cfg),
            (Instance::Nulc(i), Mode::Bruteforce) => {
                match harness::oracle_ulc_node(i)? {
                    None => Ok(as_report(None)),
                    Some((c, v)) => {
                        // rebuild a witness labeling for the verifier
                        let x: BTreeSet<u32> = v.iter().copied().collect();
                        let mut lab = Vec::new();
                        let remaining = i.graph.without_vertices(&x);
                        for comp in remaining.connected_components() {
                            let set: BTreeSet<u32> = comp.iter().copied().collect();
                            let l = ulc::enumerate_labelings(i, &set)?
                                .into_iter()
                                .next()
                                .expect("oracle certified feasibility");
                            lab.extend(l.into_iter());
                        }
                        lab.sort_unstable();
                        Ok(as_report(Some((
                            c,
                            SolutionBody::VerticesLabeled {
                                vertices: v,
                                labeling: lab,
                            },
                        ))))
                    }
                }
            }
            (Instance::Nulc(i), _) => ulc::solve_ulc(i, &cfg),
            (Instance::Eulc(i), Mode::Bruteforce) => match harness::oracle_ulc_edge(i)? {
                None => Ok(as_report(None)),
                Some((c, e)) => {
                    let x: BTreeSet<(u32, u32)> = e.iter().copied().collect();
                    let view = ulc::UlcInstance {
                        graph: i.graph.without_pairs(&x),
                        sigma: i.sigma,
                        budget: 0,
                        domains: i.domains.clone(),
                        constraints: i.constraints.clone(),
                    };
                    let mut lab = Vec::new();
                    for comp in view.graph.connected_components() {
                        let set: BTreeSet<u32> = comp.iter().copied().collect();
                        let l = ulc::enumerate_labelings(&view, &set)?
                            .into_iter()
                            .next()
                            .expect("oracle certified feasibility");
                        lab.extend(l.into_iter());
                    }
                    lab.sort_unstable();
                    Ok(as_report(Some((
                        c,
                        SolutionBody::EdgesLabeled {
                            edges: e,
                            labeling: lab,
                        },
                    ))))
                }
            },
            (Instance::Eulc(i), _) => ulc::solve_eulc(i, &cfg),
        }
    };
    run().map_err(|e| e.to_string())
}

/// Re-validates a claimed report by definitional simulation. Returns the
/// first violated condition as the error.
pub fn verify_report(inst: &Instance, report: &JsonReport) -> Result<(), String> {
    if report.problem != inst.problem().as_str() {
        return Err(format!(
            "report is for problem '{}' but the instance is '{}'",
            report.problem,
            inst.problem().as_str()
        ));
    }
    if report.answer != "yes" {
        return Ok(()); // negative answers carry no witness to check
    }
    let claimed = report
        .size
        .ok_or_else(|| "answer is yes but no size is given".to_string())?;
    match inst {
        Instance::Mcc(_) => Err("mcc reports cannot be verified".to_string()),
        Instance::Steiner(i) => {
            let edges = report
                .edges
                .as_ref()
                .ok_or_else(|| "missing edge list".to_string())?;
            let mut cost = 0u64;
            let mut x = BTreeSet::new();
            for &(u, v) in edges {
                let m = i.graph.multiplicity(u, v);
                if m == 0 {
                    return Err(format!("edge {u}-{v} is not in the instance"));
                }
                x.insert(pair(u, v));
                cost += m as u64;
            }
            if cost != claimed {
                return Err(format!("claimed size {claimed} but edges cost {cost}"));
            }
            if cost > i.budget {
                return Err(format!("cost {cost} exceeds budget {}", i.budget));
            }
            let tc = i
                .graph
                .without_pairs(&x)
                .connected_components()
                .iter()
                .filter(|c| c.iter().any(|v| i.terminals.contains(v)))
                .count() as u32;
            if tc < i.parts {
                return Err(format!(
                    "only {tc} terminal components, {} required",
                    i.parts
                ));
            }
            Ok(())
        }
        Instance::Emwcu(i) => {
            let edges = report
                .edges
                .as_ref()
                .ok_or_else(|| "missing edge list".to_string())?;
            let x: BTreeSet<(u32, u32)> = edges.iter().map(|&(u, v)| pair(u, v)).collect();
            let cost: u64 = x
                .iter()
                .map(|&(u, v)| i.graph.multiplicity(u, v) as u64)
                .sum();
            if cost != claimed {
                return Err(format!("claimed size {claimed} but edges cost {cost}"));
            }
            if !mwcu::is_emwcu_solution(i, &x) {
                return Err("deleting the edges does not realize the classes".to_string());
            }
            Ok(())
        }
        Instance::Nmwcu(i) => {
            let vertices = report
                .vertices
                .as_ref()
                .ok_or_else(|| "missing vertex list".to_string())?;
            let x: BTreeSet<u32> = vertices.iter().copied().collect();
            if x.len() as u64 != claimed {
                return Err(format!(
                    "claimed size {claimed} but {} vertices listed",
                    x.len()
                ));
            }
            for v in &x {
                if i.undeletable.contains(v) {
                    return Err(format!("vertex {v} is undeletable"));
                }
            }
            if !mwcu::is_mwcu_solution(i, &x) {
                return Err("deleting the vertices does not realize the classes".to_string());
            }
            Ok(())
        }
        Instance::Nulc(i) => {
            let vertices = report
                .vertices
                .as_ref()
                .ok_or_else(|| "missing vertex list".to_string())?;
            let labeling = report
                .labeling
                .as_ref()
                .ok_or_else(|| "missing labeling".to_string())?;
            let x: BTreeSet<u32> = vertices.iter().copied().collect();
            if x.len() as u64 != claimed {
                return Err(format!(
                    "claimed size {claimed} but {} vertices listed",
                    x.len()
                ));
            }
            let lab: ulc::Labeling = labeling.iter().map(|&(v, a)| (v, a)).collect();
            for v in i.graph.vertex_ids() {
                if !x.contains(&v) {
                    let a = lab
                        .get(&v)
                        .ok_or_else(|| format!("vertex {v} is unlabeled"))?;
                    if i.domain(v) >> a & 1 == 0 {
                        return Err(format!("label {a} is not admissible at vertex {v}"));
                    }
                }
            }
            if !ulc::is_ulc_solution(i, &x, &lab) {
                return Err("a surviving constraint is violated".to_string());
            }
            Ok(())
        }
        Instance::Eulc(i) => {
            let edges = report
                .edges
                .as_ref()
                .ok_or_else(|| "missing edge list".to_string())?;
            let labeling = report
                .labeling
                .as_ref()
                .ok_or_else(|| "missing labeling".to_string())?;
            let x: BTreeSet<(u32, u32)> = edges.iter().map(|&(u, v)| pair(u, v)).collect();
            if x.len() as u64 != claimed {
                return Err(format!(
                    "claimed size {claimed} but {} edges listed",
                    x.len()
                ));
            }
            let lab: ulc::Labeling = labeling.iter().map(|&(v, a)| (v, a)).collect();
            for v in i.graph.vertex_ids() {
                let a = lab
                    .get(&v)
                    .ok_or_else(|| format!("vertex {v} is unlabeled"))?;
                if i.domain(v) >> a & 1 == 0 {
                    return Err(format!("label {a} is not admissible at vertex {v}"));
                }
            }
            if !ulc::is_eulc_solution(i, &x, &lab) {
                return Err("a surviving constraint is violated".to_string());
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenOpts {
    pub problem: Problem,
    pub n: u32,
    pub extra_edges: usize,
    /// When set, edge density in percent (100 = complete graph) instead of
    /// the tree-plus-extra-edges scheme.
    pub density: Option<u32>,
    pub k: u64,
    pub seed: u64,
    pub steiner_parts: u32,
    pub terminals: usize,
    pub classes: usize,
    pub sigma: usize,
    pub mcc_parts: u32,
    /// Steiner only: attach a small pendant tail holding one terminal, so a
    /// one-edge cut exists regardless of how dense the bulk is.
    pub plant_cut: bool,
}

impl Default for GenOpts {
    fn default() -> Self {
        GenOpts {
            problem: Problem::Steiner,
            n: 8,
            extra_edges: 4,
            density: None,
            k: 2,
            seed: 0,
            steiner_parts: 2,
            terminals: 3,
            classes: 2,
            sigma: 3,
            mcc_parts: 2,
            plant_cut: false,
        }
    }
}

/// Deterministic random instance generation; identical options produce a
/// byte-identical instance file.
pub fn generate(opts: &GenOpts) -> Result<Instance, String> {
    use cutsolver_core::rng::SplitMix64;
    let mut rng = SplitMix64::new(opts.seed);
    Ok(match opts.problem {
        Problem::Steiner => {
            let mut graph;
            let mut terminals: BTreeSet<u32>;
            if opts.plant_cut {
                if opts.n < 6 {
                    return Err("--plant-cut needs at least 6 vertices".to_string());
                }
                let bulk = opts.n - 3;
                graph = harness::gen_connected_graph(bulk, opts.extra_edges, opts.seed);
                for v in bulk + 1..=opts.n {
                    graph.add_vertex(v);
                }
                // pendant path of three vertices behind a single edge
                graph.add_edge(1, bulk + 1, 1).map_err(|e| e.to_string())?;
                graph
                    .add_edge(bulk + 1, bulk + 2, 1)
                    .map_err(|e| e.to_string())?;
                graph
                    .add_edge(bulk + 2, bulk + 3, 1)
                    .map_err(|e| e.to_string())?;
                terminals = [opts.n].into_iter().collect();
                while terminals.len() < opts.terminals.max(2) {
                    terminals.insert(rng.below(bulk as u64) as u32 + 1);
                }
            } else {
                graph = match opts.density {
                    Some(pct) => harness::gen_connected_graph_density(
                        opts.n,
                        pct as u64,
                        100,
                        opts.seed,
                    ),
                    None => harness::gen_connected_graph(opts.n, opts.extra_edges, opts.seed),
                };
                let mut pool: Vec<u32> = (1..=opts.n).collect();
                rng.shuffle(&mut pool);
                terminals = pool[..opts.terminals.min(opts.n as usize)]
                    .iter()
                    .copied()
                    .collect();
            }
            Instance::Steiner(SteinerLike {
                graph,
                terminals,
                parts: opts.steiner_parts,
                budget: opts.k,
            }
            .into())
        }
        Problem::Nmwcu | Problem::Emwcu => {
            let node = harness::gen_mwcu_node(
                opts.n,
                opts.extra_edges,
                opts.classes,
                opts.terminals,
                opts.k,
                opts.seed,
            );
            if opts.problem == Problem::Nmwcu {
                Instance::Nmwcu(node)
            } else {
                Instance::Emwcu(mwcu::EmwcuInstance {
                    graph: node.graph,
                    classes: node.classes,
                    budget: opts.k,
                })
            }
        }
        Problem::Nulc => Instance::Nulc(harness::gen_ulc_node(
            opts.n,
            opts.extra_edges,
            opts.sigma,
            opts.k,
            opts.seed,
        )),
        Problem::Eulc => Instance::Eulc(harness::gen_ulc_edge(
            opts.n,
            opts.extra_edges,
            opts.sigma,
            opts.k,
            opts.seed,
        )),
        Problem::Mcc => {
            if opts.mcc_parts == 0 || opts.n % opts.mcc_parts != 0 {
                return Err("mcc: n must be divisible by the part count".to_string());
            }
            Instance::Mcc(harness::gen_random_mcc(
                opts.mcc_parts,
                opts.n / opts.mcc_parts,
                1,
                2,
                opts.seed,
            ))
        }
    })
}

// small helper so the steiner arm above reads uniformly
struct SteinerLike {
    graph: cutsolver_core::MultiGraph,
    terminals: BTreeSet<u32>,
    parts: u32,
    budget: u64,
}

impl From<SteinerLike> for steiner::SteinerInstance {
    fn from(s: SteinerLike) -> Self {
        steiner::SteinerInstance {
            graph: s.graph,
            terminals: s.terminals,
            parts: s.parts,
            budget: s.budget,
        }
    }
}

/// Reduction targets for `reduce`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReduceTarget {
    Eulc,
    Restricted,
    Nulc,
    Nmwcu,
}

impl ReduceTarget {
    pub fn from_str(s: &str) -> Option<ReduceTarget> {
        Some(match s {
            "eulc" => ReduceTarget::Eulc,
            "restricted" => ReduceTarget::Restricted,
            "nulc" => ReduceTarget::Nulc,
            "nmwcu" => ReduceTarget::Nmwcu,
            _ => return None,
        })
    }
}

pub fn reduce(inst: &Instance, target: ReduceTarget) -> Result<Instance, String> {
    match (inst, target) {
        (Instance::Mcc(m), ReduceTarget::Eulc) => Ok(Instance::Eulc(
            harness::gen_mcc_to_eulc(m).map_err(|e| e.to_string())?,
        )),
        (Instance::Eulc(i), ReduceTarget::Restricted) => Ok(Instance::Eulc(
            harness::gen_restrict_ulc(i).map_err(|e| e.to_string())?,
        )),
        (Instance::Eulc(i), ReduceTarget::Nulc) => {
            Ok(Instance::Nulc(ulc::reduce_edge_ulc(i).node))
        }
        (Instance::Emwcu(i), ReduceTarget::Nmwcu) => {
            Ok(Instance::Nmwcu(mwcu::emwcu_to_node(i).0))
        }
        _ => Err(format!(
            "no reduction from {} to {:?}",
            inst.problem().as_str(),
            target
        )),
    }
}
