//! Solver configuration, run statistics and the final report type shared by
//! every solver front-end.

use alloc::vec::Vec;

use crate::family::{build_family, DeltaPolicy, FamilyMode, FamilySpec, SetFamily};
use crate::graph::{EdgePair, VertexId};
use crate::rng::derive_seed;
use crate::Result;

/// Which covering-family construction the solvers draw branch sets from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum FamilyKind {
    Exhaustive,
    PerfectHash,
    Randomized,
}

impl FamilyKind {
    pub fn is_deterministic(self) -> bool {
        !matches!(self, FamilyKind::Randomized)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::Exhaustive => "exhaustive",
            FamilyKind::PerfectHash => "perfect-hash",
            FamilyKind::Randomized => "randomized",
        }
    }
}

/// Family construction knobs threaded through every separation finder and
/// branching step. Sub-seeds are derived per call site so call order cannot
/// perturb the stream.
#[derive(Debug, Clone)]
pub struct FamilyCfg {
    pub kind: FamilyKind,
    /// Per-site covering failure bound for randomized families.
    pub delta: f64,
    pub seed: u64,
}

impl Default for FamilyCfg {
    fn default() -> Self {
        FamilyCfg {
            kind: FamilyKind::Exhaustive,
            delta: 1e-6,
            seed: 0,
        }
    }
}

impl FamilyCfg {
    pub fn build(&self, universe: Vec<u64>, a: usize, b: usize, site: &str) -> Result<SetFamily> {
        let mode = match self.kind {
            FamilyKind::Exhaustive => FamilyMode::Exhaustive,
            FamilyKind::PerfectHash => FamilyMode::PerfectHash,
            FamilyKind::Randomized => FamilyMode::Randomized {
                seed: derive_seed(self.seed, site, 0),
                delta: self.delta,
                policy: DeltaPolicy::FixedPair,
            },
        };
        build_family(&FamilySpec::new(universe, a, b, mode))
    }
}

/// Full solver configuration.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub family: FamilyCfg,
    /// Replaces the theoretical recursion threshold `q` when set. The
    /// theoretical value makes the brute-force step absorb every desk-scale
    /// instance; overriding it exercises recursion and the
    /// high-connectivity phase.
    pub q_override: Option<u64>,
    /// Replaces the derived component bound `t` when set; otherwise `t` is
    /// recomputed from the effective `q`.
    pub t_override: Option<u64>,
    /// Trials per Karger invocation in the randomized edge-separation finder.
    pub karger_trials: u64,
    /// Steiner only: use the Karger-based separation finder instead of the
    /// pairwise bounded-flow finder.
    pub randomized_separation: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            family: FamilyCfg::default(),
            q_override: None,
            t_override: None,
            karger_trials: 200,
            randomized_separation: false,
        }
    }
}

/// Deterministic run counters; wall time is measured by callers that have a
/// clock.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Stats {
    /// Branches explored across high-connectivity phases.
    pub branches: u64,
    /// Separations found during recursive understanding.
    pub separations: u64,
    /// Maximum recursion depth reached.
    pub max_depth: u64,
    /// Covering-family sets iterated in total.
    pub family_sets: u64,
    /// Largest number of leaves any bounded-search-tree invocation produced
    /// (label-cover solver only; bounded by `(2s+1)^k`).
    pub max_rule_leaves: u64,
    /// Accumulated covering-failure bound over all randomized family sites
    /// (0 in deterministic modes). A negative answer is only Monte Carlo
    /// when this is positive.
    pub failure_bound: f64,
}

impl Stats {
    pub fn absorb(&mut self, other: &Stats) {
        self.branches += other.branches;
        self.separations += other.separations;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.family_sets += other.family_sets;
        self.max_rule_leaves = self.max_rule_leaves.max(other.max_rule_leaves);
        self.failure_bound += other.failure_bound;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Answer {
    Yes,
    No,
    /// A negative answer that relies on randomized covering families; the
    /// failure bound in the stats quantifies the residual doubt.
    NoMonteCarlo,
}

/// Problem-specific solution payload.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SolutionBody {
    Edges {
        edges: Vec<EdgePair>,
    },
    Vertices {
        vertices: Vec<VertexId>,
    },
    VerticesLabeled {
        vertices: Vec<VertexId>,
        labeling: Vec<(VertexId, u8)>,
    },
    EdgesLabeled {
        edges: Vec<EdgePair>,
        labeling: Vec<(VertexId, u8)>,
    },
}

/// Construction provenance recorded with every answer.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Provenance {
    pub family_mode: &'static str,
    pub seed: u64,
    pub delta: f64,
    pub q: u64,
    pub t: Option<u64>,
    /// True when every conclusion is certified (deterministic families and
    /// deterministic separation finders).
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolutionReport {
    pub answer: Answer,
    pub size: Option<u64>,
    pub solution: Option<SolutionBody>,
    pub provenance: Provenance,
    pub stats: Stats,
}

impl SolutionReport {
    pub fn no(provenance: Provenance, stats: Stats) -> Self {
        let answer = if provenance.exact {
            Answer::No
        } else {
            Answer::NoMonteCarlo
        };
        SolutionReport {
            answer,
            size: None,
            solution: None,
            provenance,
            stats,
        }
    }

    pub fn yes(size: u64, body: SolutionBody, provenance: Provenance, stats: Stats) -> Self {
        SolutionReport {
            answer: Answer::Yes,
            size: Some(size),
            solution: Some(body),
            provenance,
            stats,
        }
    }
}
