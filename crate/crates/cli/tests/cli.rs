//! Front-end behavior: file format round-trips, report verification,
//! golden JSON output, exit codes and cross-thread determinism.

use std::collections::BTreeSet;
use std::process::Command;

use cutsolver_cli::format::{parse, print, Instance, Problem};
use cutsolver_cli::run::{
    generate, reduce, solve_instance, to_json_report, verify_report, GenOpts, JsonReport, Mode,
    ReduceTarget, SolveOpts,
};
use cutsolver_core::rng::SplitMix64;

use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cutsolver"))
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn golden_json_fixture() {
    let out = bin()
        .args([
            "solve",
            &fixture("path3.steiner"),
            "--json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let expected = std::fs::read_to_string(fixture("path3.golden.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn exit_codes_distinguish_outcomes() {
    // yes -> 0
    let yes = bin()
        .args(["solve", &fixture("path3.steiner")])
        .output()
        .unwrap();
    assert_eq!(yes.status.code(), Some(0));

    // certified no -> 2
    let dir = tempfile::tempdir().unwrap();
    let no_path = dir.path().join("no.steiner");
    std::fs::write(
        &no_path,
        "p steiner 3 3\nparam k 1\nparam s 2\ne 1 2\ne 2 3\ne 1 3\nt 1\nt 3\n",
    )
    .unwrap();
    let no = bin()
        .args(["solve", no_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(no.status.code(), Some(2));

    // randomized family on the same instance -> monte-carlo no -> 3
    let mc = bin()
        .args([
            "solve",
            no_path.to_str().unwrap(),
            "--mode",
            "randomized",
            "--q-override",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(mc.status.code(), Some(3));

    // parse error -> 1
    let bad = dir.path().join("bad.steiner");
    std::fs::write(&bad, "p steiner 2 1\ne 1 7\n").unwrap();
    let err = bin()
        .args(["solve", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(err.status.code(), Some(1));
}

#[test]
fn bruteforce_mode_matches_exact_on_fixtures() {
    let mut rng = SplitMix64::new(77);
    for problem in [Problem::Steiner, Problem::Nmwcu, Problem::Emwcu, Problem::Nulc] {
        for _ in 0..6 {
            let opts = GenOpts {
                problem,
                n: 5 + rng.below(3) as u32,
                extra_edges: rng.below(4) as usize,
                k: 1 + rng.below(2),
                seed: rng.next_u64(),
                terminals: 3,
                classes: 2,
                sigma: 2,
                ..GenOpts::default()
            };
            let inst = generate(&opts).unwrap();
            let exact = solve_instance(&inst, &SolveOpts::default()).unwrap();
            let brute = solve_instance(
                &inst,
                &SolveOpts {
                    mode: Mode::Bruteforce,
                    ..SolveOpts::default()
                },
            )
            .unwrap();
            assert_eq!(exact.size, brute.size, "{problem:?} opts={opts:?}");
        }
    }
}

#[test]
fn verify_accepts_valid_and_rejects_tampered() {
    let inst = parse(&std::fs::read_to_string(fixture("path3.steiner")).unwrap()).unwrap();
    let report = solve_instance(&inst, &SolveOpts::default()).unwrap();
    let mut json = to_json_report(Problem::Steiner, &report);
    verify_report(&inst, &json).unwrap();

    // tampered size
    json.size = Some(0);
    let err = verify_report(&inst, &json).unwrap_err();
    assert!(err.contains("claimed size"), "{err}");

    // labeling violation is named with its vertex
    let swap: Vec<(u8, u8)> = vec![(0, 1), (1, 0)];
    let mut g = cutsolver_core::MultiGraph::with_vertices(2);
    g.add_edge(1, 2, 1).unwrap();
    let nulc = Instance::Nulc(cutsolver_core::ulc::UlcInstance {
        graph: g,
        sigma: 2,
        budget: 0,
        domains: [(1u32, 0b11u64), (2, 0b11)].into_iter().collect(),
        constraints: [(
            (1u32, 2u32),
            cutsolver_core::ulc::PartialPerm::from_pairs(2, &swap).unwrap(),
        )]
        .into_iter()
        .collect(),
    });
    let ok = solve_instance(&nulc, &SolveOpts::default()).unwrap();
    let mut jr = to_json_report(Problem::Nulc, &ok);
    verify_report(&nulc, &jr).unwrap();
    // violate the list at vertex 2 by narrowing the instance's domain
    let narrowed = match &nulc {
        Instance::Nulc(i) => {
            let mut i = i.clone();
            // the swap forces label(2) = 1 - label(1); permit only label(1)
            // at vertex 2 so the witness's label there becomes inadmissible
            let keep_1 = jr.labeling.as_ref().unwrap()[0].1;
            i.domains.insert(2, 1 << keep_1);
            Instance::Nulc(i)
        }
        _ => unreachable!(),
    };
    let err = verify_report(&narrowed, &jr).unwrap_err();
    assert!(err.contains("vertex 2"), "{err}");
    // and a negative report verifies vacuously
    jr.answer = "no".to_string();
    verify_report(&nulc, &jr).unwrap();
}

#[test]
fn reports_are_byte_identical_across_threads_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("inst.steiner");
    let gen = bin()
        .args([
            "gen", "--problem", "steiner", "-n", "12", "-k", "2", "--terminals", "3", "--seed",
            "11", "-o",
            inst_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(gen.status.success());
    let mut outputs = Vec::new();
    for threads in ["1", "2", "4", "1"] {
        let out = bin()
            .args([
                "solve",
                inst_path.to_str().unwrap(),
                "--json",
                "--seed",
                "42",
                "--mode",
                "randomized",
                "--q-override",
                "2",
                "--threads",
                threads,
            ])
            .output()
            .unwrap();
        outputs.push(String::from_utf8(out.stdout).unwrap());
    }
    assert!(
        outputs.windows(2).all(|w| w[0] == w[1]),
        "reports differ across thread counts"
    );
}

#[test]
fn gen_is_deterministic_per_seed() {
    for problem in ["steiner", "nmwcu", "eulc", "mcc"] {
        let run = |seed: &str| {
            let extra: &[&str] = if problem == "mcc" {
                &["--mcc-parts", "2"]
            } else {
                &[]
            };
            let out = bin()
                .args(["gen", "--problem", problem, "-n", "8", "-k", "2", "--seed", seed])
                .args(extra)
                .output()
                .unwrap();
            assert!(out.status.success());
            String::from_utf8(out.stdout).unwrap()
        };
        assert_eq!(run("5"), run("5"), "{problem}");
        assert_ne!(run("5"), run("6"), "{problem}");
    }
}

#[test]
fn reductions_preserve_answers_end_to_end() {
    let mut rng = SplitMix64::new(0xE2E);
    // emwcu -> nmwcu
    for _ in 0..5 {
        let opts = GenOpts {
            problem: Problem::Emwcu,
            n: 5 + rng.below(2) as u32,
            extra_edges: rng.below(3) as usize,
            k: 1 + rng.below(2),
            seed: rng.next_u64(),
            terminals: 3,
            classes: 2,
            ..GenOpts::default()
        };
        let edge_inst = generate(&opts).unwrap();
        let node_inst = reduce(&edge_inst, ReduceTarget::Nmwcu).unwrap();
        let a = solve_instance(&edge_inst, &SolveOpts::default()).unwrap();
        let b = solve_instance(&node_inst, &SolveOpts::default()).unwrap();
        assert_eq!(a.size, b.size);
    }
    // eulc -> nulc
    for _ in 0..5 {
        let opts = GenOpts {
            problem: Problem::Eulc,
            n: 4 + rng.below(2) as u32,
            extra_edges: rng.below(3) as usize,
            k: rng.below(2),
            seed: rng.next_u64(),
            sigma: 2,
            ..GenOpts::default()
        };
        let edge_inst = generate(&opts).unwrap();
        let node_inst = reduce(&edge_inst, ReduceTarget::Nulc).unwrap();
        let a = solve_instance(&edge_inst, &SolveOpts::default()).unwrap();
        let b = solve_instance(&node_inst, &SolveOpts::default()).unwrap();
        assert_eq!(a.size, b.size);
    }
}

#[test]
fn solve_rejects_mcc_directly() {
    let inst = generate(&GenOpts {
        problem: Problem::Mcc,
        n: 4,
        mcc_parts: 2,
        ..GenOpts::default()
    })
    .unwrap();
    assert!(solve_instance(&inst, &SolveOpts::default())
        .unwrap_err()
        .contains("reduce"));
}

#[test]
fn every_yes_report_passes_verify() {
    let mut rng = SplitMix64::new(0xE55);
    for problem in [
        Problem::Steiner,
        Problem::Emwcu,
        Problem::Nmwcu,
        Problem::Eulc,
        Problem::Nulc,
    ] {
        for _ in 0..8 {
            let opts = GenOpts {
                problem,
                n: 4 + rng.below(4) as u32,
                extra_edges: rng.below(4) as usize,
                k: 1 + rng.below(2),
                seed: rng.next_u64(),
                terminals: 2 + rng.below(2) as usize,
                classes: 1 + rng.below(2) as usize,
                sigma: 2,
                ..GenOpts::default()
            };
            let inst = generate(&opts).unwrap();
            let report = solve_instance(&inst, &SolveOpts::default()).unwrap();
            if report.answer == cutsolver_core::report::Answer::Yes {
                let json = to_json_report(problem, &report);
                verify_report(&inst, &json)
                    .unwrap_or_else(|e| panic!("{problem:?} report failed verify: {e}"));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Canonical print and parse are mutually inverse on generated
    /// instances of every problem kind.
    #[test]
    fn file_roundtrip(seed in any::<u64>(), which in 0usize..6) {
        let problem = [
            Problem::Steiner,
            Problem::Emwcu,
            Problem::Nmwcu,
            Problem::Eulc,
            Problem::Nulc,
            Problem::Mcc,
        ][which];
        let opts = GenOpts {
            problem,
            n: 4 + (seed % 5) as u32,
            extra_edges: (seed % 4) as usize,
            k: 1 + seed % 2,
            seed,
            sigma: 2 + (seed % 2) as usize,
            mcc_parts: 2,
            ..GenOpts::default()
        };
        let opts = if problem == Problem::Mcc {
            GenOpts { n: 4 + 2 * ((seed % 2) as u32), ..opts }
        } else {
            opts
        };
        let inst = generate(&opts).unwrap();
        let text = print(&inst);
        let reparsed = parse(&text).unwrap();
        prop_assert_eq!(print(&reparsed), text);
    }

    /// Verification rejects any nonempty tampering of a valid witness.
    #[test]
    fn verify_rejects_added_vertices(seed in any::<u64>()) {
        let opts = GenOpts {
            problem: Problem::Nmwcu,
            n: 6,
            extra_edges: (seed % 5) as usize,
            k: 2,
            seed,
            terminals: 3,
            classes: 2,
            ..GenOpts::default()
        };
        let inst = generate(&opts).unwrap();
        let report = solve_instance(&inst, &SolveOpts::default()).unwrap();
        if report.answer == cutsolver_core::report::Answer::Yes {
            let json = to_json_report(Problem::Nmwcu, &report);
            prop_assert!(verify_report(&inst, &json).is_ok());
            // claim a larger size than the witness shows
            let mut bad: JsonReport = json.clone();
            bad.size = Some(bad.size.unwrap() + 1);
            prop_assert!(verify_report(&inst, &bad).is_err());
            // sneak in an undeletable vertex
            if let Instance::Nmwcu(i) = &inst {
                let mut bad2 = json.clone();
                let t = *i.undeletable.iter().next().unwrap();
                let mut vs: BTreeSet<u32> =
                    bad2.vertices.clone().unwrap_or_default().into_iter().collect();
                vs.insert(t);
                bad2.vertices = Some(vs.iter().copied().collect());
                bad2.size = Some(vs.len() as u64);
                prop_assert!(verify_report(&inst, &bad2).is_err());
            }
        }
    }
}
