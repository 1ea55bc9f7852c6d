//! Covering set families.
//!
//! A family `F` of subsets of a universe `U` is `(a, b)`-covering when for
//! any disjoint `A, B ⊆ U` with `|A| ≤ a`, `|B| ≤ b` some `S ∈ F` satisfies
//! `A ⊆ S` and `B ∩ S = ∅`. Every separation finder and every
//! high-connectivity branching step draws its branch sets from such a family.
//!
//! Three constructions are provided:
//!  * exhaustive — all subsets, only for tiny universes;
//!  * perfect-hash — hash positions modulo a small set of primes and emit
//!    preimages of every bucket subset of size at most `a`; deterministic
//!    covering guarantee with a modest constant blow-up;
//!  * randomized — independent draws where each element joins with
//!    probability `a/(a+b)`; the number of draws is chosen from the
//!    per-draw success bound `(a/(a+b))^a (b/(a+b))^b`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error};
use crate::rng::SplitMix64;
use crate::Result;

/// Largest universe for which exhaustive enumeration is permitted.
pub const EXHAUSTIVE_LIMIT: usize = 20;
/// Largest universe for which `covering_check` will enumerate all pairs.
pub const COVERING_CHECK_LIMIT: usize = 16;
/// Hard cap on the number of sets any construction may emit.
pub const FAMILY_SIZE_GUARD: u64 = 50_000_000;

/// How the randomized repetition count interprets `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum DeltaPolicy {
    /// `delta` bounds the failure probability for one fixed `(A, B)` pair.
    /// This is what the solvers use: each branching site cares about the one
    /// pair induced by the sought solution.
    FixedPair,
    /// `delta` bounds the probability that *any* admissible pair is missed,
    /// via a union bound over the number of pairs. Used when the whole
    /// covering property is the deliverable.
    AllPairs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyMode {
    Exhaustive,
    PerfectHash,
    Randomized {
        seed: u64,
        delta: f64,
        policy: DeltaPolicy,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    /// Universe elements; order defines hash positions. Deduplicated and
    /// sorted on construction.
    pub universe: Vec<u64>,
    pub a: usize,
    pub b: usize,
    pub mode: FamilyMode,
}

impl FamilySpec {
    pub fn new(mut universe: Vec<u64>, a: usize, b: usize, mode: FamilyMode) -> Self {
        universe.sort_unstable();
        universe.dedup();
        let n = universe.len();
        FamilySpec {
            universe,
            a: a.min(n),
            b: b.min(n),
            mode,
        }
    }
}

/// Construction record kept with every family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyProvenance {
    pub mode: &'static str,
    pub seed: Option<u64>,
    pub repetitions: u64,
    /// Probability that one fixed admissible pair is left uncovered
    /// (0 for the deterministic modes).
    pub pair_failure_bound: f64,
    /// Union-bound failure probability over all admissible pairs, when the
    /// pair count was small enough to estimate.
    pub family_failure_bound: Option<f64>,
    pub primes: Vec<u64>,
    /// Asserted ceiling on the family size for the perfect-hash mode:
    /// `(#primes) * sum_{i<=a} C(max bucket count, i)`.
    pub size_ceiling: Option<u64>,
}

/// A covering family over a universe of opaque `u64` elements. Sets are kept
/// as sorted element vectors in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFamily {
    pub universe: Vec<u64>,
    pub sets: Vec<Vec<u64>>,
    pub provenance: FamilyProvenance,
}

impl SetFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, i: usize) -> BTreeSet<u64> {
        self.sets[i].iter().copied().collect()
    }
}

fn ln(x: f64) -> f64 {
    libm::log(x)
}

fn powi(x: f64, e: usize) -> f64 {
    libm::pow(x, e as f64)
}

/// `ln` of `sum_{i<=cap} C(n, i)`, computed in plain f64; saturates to
/// infinity for huge values, which only makes the repetition count larger.
fn ln_binom_prefix_sum(n: usize, cap: usize) -> f64 {
    let mut total = 0.0f64;
    let mut term = 1.0f64;
    for i in 0..=cap.min(n) {
        if i > 0 {
            term *= (n - i + 1) as f64 / i as f64;
        }
        total += term;
        if !total.is_finite() {
            return f64::INFINITY;
        }
    }
    ln(total)
}

/// Builds the covering family described by `spec`.
pub fn build_family(spec: &FamilySpec) -> Result<SetFamily> {
    let n = spec.universe.len();
    match &spec.mode {
        FamilyMode::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::SizeGuard {
                    what: "exhaustive family universe",
                    limit: EXHAUSTIVE_LIMIT as u64,
                    actual: n as u64,
                });
            }
            let mut sets = Vec::with_capacity(1usize << n);
            for mask in 0u32..(1u32 << n) {
                let mut s = Vec::new();
                for (i, &e) in spec.universe.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        s.push(e);
                    }
                }
                sets.push(s);
            }
            Ok(SetFamily {
                universe: spec.universe.clone(),
                sets,
                provenance: FamilyProvenance {
                    mode: "exhaustive",
                    seed: None,
                    repetitions: 0,
                    pair_failure_bound: 0.0,
                    family_failure_bound: Some(0.0),
                    primes: Vec::new(),
                    size_ceiling: None,
                },
            })
        }
        FamilyMode::PerfectHash => build_perfect_hash(spec),
        FamilyMode::Randomized {
            seed,
            delta,
            policy,
        } => build_randomized(spec, *seed, *delta, *policy),
    }
}

fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn primes_from(start: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut x = start.max(2);
    while out.len() < count {
        if is_prime(x) {
            out.push(x);
        }
        x += 1;
    }
    out
}

fn build_perfect_hash(spec: &FamilySpec) -> Result<SetFamily> {
    let n = spec.universe.len();
    let (a, b) = (spec.a, spec.b);
    if a == 0 {
        // The empty set covers every admissible pair.
        return Ok(SetFamily {
            universe: spec.universe.clone(),
            sets: vec![Vec::new()],
            provenance: FamilyProvenance {
                mode: "perfect-hash",
                seed: None,
                repetitions: 0,
                pair_failure_bound: 0.0,
                family_failure_bound: Some(0.0),
                primes: Vec::new(),
                size_ceiling: Some(1),
            },
        });
    }
    let r = (a + b).min(n).max(1);
    // Hash over positions 0..n-1. A prime fails an r-subset only if it
    // divides some pairwise difference (< n), so any prime above n-1 is
    // injective everywhere, and in general each r-subset rules out at most
    // C(r,2) * log_p1(n-1) primes. Two strategies compete: a single prime
    // above the universe (few, large buckets) versus a collection of primes
    // starting near r (many, small buckets); the cheaper ceiling wins.
    let bucket_sum = |p: u64| -> u64 {
        let mut term: u64 = 1;
        let mut sum: u64 = 1;
        for i in 1..=a.min(p as usize) {
            term = term.saturating_mul(p - (i as u64) + 1) / i as u64;
            sum = sum.saturating_add(term);
        }
        sum
    };
    let single = primes_from((n as u64).max(r as u64).max(2), 1);
    let single_ceiling = bucket_sum(single[0]);
    let p_start = (r as u64).max(2);
    let first = primes_from(p_start, 1)[0];
    let fks_count = if first > (n.saturating_sub(1)) as u64 {
        1
    } else {
        let pairs = r * (r - 1) / 2;
        let mut bad_per_pair = 0usize;
        let mut acc = first;
        while acc <= (n - 1) as u64 {
            bad_per_pair += 1;
            acc = acc.saturating_mul(first);
        }
        pairs * bad_per_pair + 1
    };
    let fks = primes_from(p_start, fks_count);
    let fks_ceiling = (fks.len() as u64).saturating_mul(bucket_sum(*fks.last().unwrap()));
    let (primes, ceiling) = if single_ceiling <= fks_ceiling {
        (single, single_ceiling)
    } else {
        (fks, fks_ceiling)
    };
    if ceiling > FAMILY_SIZE_GUARD {
        return Err(Error::SizeGuard {
            what: "perfect-hash family size",
            limit: FAMILY_SIZE_GUARD,
            actual: ceiling,
        });
    }

    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut sets: Vec<Vec<u64>> = Vec::new();
    for &p in &primes {
        // preimages of every bucket subset of size <= a
        let buckets: Vec<Vec<u64>> = (0..p)
            .map(|bucket| {
                spec.universe
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (*i as u64) % p == bucket)
                    .map(|(_, &e)| e)
                    .collect()
            })
            .collect();
        let nonempty: Vec<usize> = (0..p as usize)
            .filter(|&i| !buckets[i].is_empty())
            .collect();
        let mut choose = |subset: &[usize]| {
            let mut s: Vec<u64> = subset
                .iter()
                .flat_map(|&i| buckets[i].iter().copied())
                .collect();
            s.sort_unstable();
            if seen.insert(s.clone()) {
                sets.push(s);
            }
        };
        // enumerate subsets of nonempty buckets of size <= a
        let m = nonempty.len();
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
        while let Some((start, cur)) = stack.pop() {
            choose(&cur);
            if cur.len() == a {
                continue;
            }
            for i in start..m {
                let mut next = cur.clone();
                next.push(nonempty[i]);
                stack.push((i + 1, next));
            }
        }
    }
    let size_ceiling = ceiling;
    assert!(
        (sets.len() as u64) <= size_ceiling,
        "perfect-hash family exceeded its precomputed ceiling"
    );
    Ok(SetFamily {
        universe: spec.universe.clone(),
        sets,
        provenance: FamilyProvenance {
            mode: "perfect-hash",
            seed: None,
            repetitions: 0,
            pair_failure_bound: 0.0,
            family_failure_bound: Some(0.0),
            primes,
            size_ceiling: Some(size_ceiling),
        },
    })
}

fn build_randomized(spec: &FamilySpec, seed: u64, delta: f64, policy: DeltaPolicy) -> Result<SetFamily> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("randomized family: delta must be in (0, 1)"));
    }
    let n = spec.universe.len();
    let (a, b) = (spec.a, spec.b);
    // Per-draw probability that a fixed (A, B) with |A| = a, |B| = b is
    // covered; elements join independently with probability a/(a+b).
    let (p_cover, num, den) = if a == 0 {
        // the empty draw covers everything relevant; emit one empty set
        (1.0, 0u64, 1u64)
    } else if b == 0 {
        (1.0, 1u64, 1u64)
    } else {
        let pa = a as f64 / (a + b) as f64;
        let pb = b as f64 / (a + b) as f64;
        (powi(pa, a) * powi(pb, b), a as u64, (a + b) as u64)
    };
    let (t, pair_fail, family_fail) = if p_cover >= 1.0 {
        (1u64, 0.0, Some(0.0))
    } else {
        let ln_fail_one = ln(1.0 - p_cover); // negative
        let target = match policy {
            DeltaPolicy::FixedPair => ln(delta),
            DeltaPolicy::AllPairs => {
                let ln_pairs = ln_binom_prefix_sum(n, a) + ln_binom_prefix_sum(n, b);
                ln(delta) - ln_pairs
            }
        };
        let t = libm::ceil(target / ln_fail_one).max(1.0);
        if !t.is_finite() || t > FAMILY_SIZE_GUARD as f64 {
            return Err(Error::SizeGuard {
                what: "randomized family repetitions",
                limit: FAMILY_SIZE_GUARD,
                actual: u64::MAX,
            });
        }
        let t = t as u64;
        let pair_fail = libm::exp(ln_fail_one * t as f64);
        let family_fail = if n <= 64 {
            let ln_pairs = ln_binom_prefix_sum(n, a) + ln_binom_prefix_sum(n, b);
            Some((libm::exp(ln_pairs) * pair_fail).min(1.0))
        } else {
            None
        };
        (t, pair_fail, family_fail)
    };

    let mut g = SplitMix64::new(seed);
    let mut sets = Vec::with_capacity(t as usize);
    for _ in 0..t {
        let mut s = Vec::new();
        for &e in &spec.universe {
            if num >= den || g.chance(num, den) {
                s.push(e);
            }
        }
        sets.push(s);
    }
    Ok(SetFamily {
        universe: spec.universe.clone(),
        sets,
        provenance: FamilyProvenance {
            mode: "randomized",
            seed: Some(seed),
            repetitions: t,
            pair_failure_bound: pair_fail,
            family_failure_bound: family_fail,
            primes: Vec::new(),
            size_ceiling: None,
        },
    })
}

/// Exhaustively verifies the covering guarantee: true iff for every disjoint
/// `(A, B)` with `|A| ≤ a`, `|B| ≤ b` some member covers `A` and avoids `B`.
pub fn covering_check(fam: &SetFamily, a: usize, b: usize) -> Result<bool> {
    let n = fam.universe.len();
    if n > COVERING_CHECK_LIMIT {
        return Err(Error::SizeGuard {
            what: "covering_check universe",
            limit: COVERING_CHECK_LIMIT as u64,
            actual: n as u64,
        });
    }
    let index: alloc::collections::BTreeMap<u64, usize> = fam
        .universe
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    let masks: Vec<u32> = fam
        .sets
        .iter()
        .map(|s| {
            let mut m = 0u32;
            for e in s {
                m |= 1 << index[e];
            }
            m
        })
        .collect();

    let a = a.min(n);
    let b = b.min(n);
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut a_masks: Vec<u32> = Vec::new();
    collect_subsets(full, a, &mut a_masks);
    for &am in &a_masks {
        let rest = full & !am;
        let mut b_masks: Vec<u32> = Vec::new();
        collect_subsets(rest, b, &mut b_masks);
        for &bm in &b_masks {
            let mut ok = false;
            for &sm in &masks {
                if am & sm == am && bm & sm == 0 {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn collect_subsets(pool: u32, cap: usize, out: &mut Vec<u32>) {
    fn rec(pool: u32, cap: usize, from: u32, cur: u32, out: &mut Vec<u32>) {
        out.push(cur);
        if cap == 0 {
            return;
        }
        let mut i = from;
        while i < 32 {
            if pool >> i & 1 == 1 {
                rec(pool, cap - 1, i + 1, cur | (1 << i), out);
            }
            i += 1;
        }
    }
    rec(pool, cap, 0, 0, out);
}
