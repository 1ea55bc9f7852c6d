use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use cutsolver_cli::format::{self, Instance, Problem};
use cutsolver_cli::run::{
    exit_code, generate, reduce, solve_instance, to_json_report, verify_report, GenOpts,
    JsonReport, Mode, ReduceTarget, SolveOpts,
};
use cutsolver_core::report::FamilyKind;

#[derive(Parser)]
#[command(
    name = "cutsolver",
    about = "Exact solvers for Steiner Cut, Multiway Cut-Uncut and Unique Label Cover"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and print a report.
    Solve(SolveArgs),
    /// Re-validate a solution report against its instance.
    Verify(VerifyArgs),
    /// Generate a random instance.
    Gen(GenArgs),
    /// Apply one of the instance reductions.
    Reduce(ReduceArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    instance: PathBuf,
    /// Expected problem; rejected if the file header disagrees.
    #[arg(long)]
    problem: Option<String>,
    /// exact | randomized | bruteforce
    #[arg(long, default_value = "exact")]
    mode: String,
    /// exhaustive | perfect-hash | randomized
    #[arg(long)]
    family: Option<String>,
    /// Per-site covering failure bound for randomized families.
    #[arg(long, default_value_t = 1e-6)]
    family_delta: f64,
    /// Engineering override for the recursion threshold q.
    #[arg(long)]
    q_override: Option<u64>,
    /// Engineering override for the component bound t.
    #[arg(long)]
    t_override: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials per Karger invocation in randomized mode.
    #[arg(long, default_value_t = 200)]
    karger_trials: u64,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
    /// Print run statistics (including wall time) on stderr.
    #[arg(long)]
    stats: bool,
    /// Worker threads for branch-level parallelism (output is independent).
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    report: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// steiner | emwcu | nmwcu | eulc | nulc | mcc
    #[arg(long)]
    problem: String,
    #[arg(short, long)]
    n: u32,
    #[arg(short, long, default_value_t = 2)]
    k: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra edges on top of a random spanning tree.
    #[arg(long, default_value_t = 4)]
    extra_edges: usize,
    /// Edge density in percent (overrides --extra-edges; 100 = complete).
    #[arg(long)]
    density: Option<u32>,
    /// Steiner: required number of terminal components.
    #[arg(long, default_value_t = 2)]
    parts: u32,
    #[arg(long, default_value_t = 3)]
    terminals: usize,
    /// MWCU: number of terminal classes.
    #[arg(long, default_value_t = 2)]
    classes: usize,
    /// Label cover: alphabet size.
    #[arg(long, default_value_t = 3)]
    sigma: usize,
    /// MCC: number of parts.
    #[arg(long, default_value_t = 2)]
    mcc_parts: u32,
    /// Steiner: attach a pendant tail with a terminal so a small cut exists.
    #[arg(long)]
    plant_cut: bool,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    instance: PathBuf,
    /// eulc (from mcc) | restricted (from eulc) | nulc (from eulc) | nmwcu (from emwcu)
    #[arg(long)]
    to: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn read_instance(path: &PathBuf) -> Result<Instance, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    format::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run_solve(args: &SolveArgs) -> Result<ExitCode, String> {
    let inst = read_instance(&args.instance)?;
    if let Some(p) = &args.problem {
        let want = Problem::from_str(p).ok_or_else(|| format!("unknown problem '{p}'"))?;
        if want != inst.problem() {
            return Err(format!(
                "instance is '{}' but '--problem {}' was requested",
                inst.problem().as_str(),
                p
            ));
        }
    }
    let mode = Mode::from_str(&args.mode).ok_or_else(|| format!("unknown mode '{}'", args.mode))?;
    let family = match &args.family {
        None => None,
        Some(f) => Some(match f.as_str() {
            "exhaustive" => FamilyKind::Exhaustive,
            "perfect-hash" => FamilyKind::PerfectHash,
            "randomized" => FamilyKind::Randomized,
            other => return Err(format!("unknown family '{other}'")),
        }),
    };
    let opts = SolveOpts {
        mode,
        family,
        delta: args.family_delta,
        q_override: args.q_override,
        t_override: args.t_override,
        seed: args.seed,
        karger_trials: args.karger_trials,
    };
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.max(1))
        .build()
        .map_err(|e| format!("thread pool: {e}"))?;
    let report = pool.install(|| solve_instance(&inst, &opts))?;
    let elapsed = started.elapsed();

    let json = to_json_report(inst.problem(), &report);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&json).unwrap());
    } else {
        match report.answer {
            cutsolver_core::report::Answer::Yes => {
                println!("yes {}", report.size.unwrap_or(0));
                if let Some(edges) = &json.edges {
                    let parts: Vec<String> =
                        edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
                    println!("edges: {}", parts.join(" "));
                }
                if let Some(vertices) = &json.vertices {
                    let parts: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
                    println!("vertices: {}", parts.join(" "));
                }
                if let Some(lab) = &json.labeling {
                    let parts: Vec<String> =
                        lab.iter().map(|(v, a)| format!("{v}={a}")).collect();
                    println!("labeling: {}", parts.join(" "));
                }
            }
            cutsolver_core::report::Answer::No => println!("no"),
            cutsolver_core::report::Answer::NoMonteCarlo => println!("no (monte-carlo)"),
        }
    }
    if args.stats {
        let s = report.stats;
        eprintln!(
            "stats: branches={} separations={} max_depth={} family_sets={} rule_leaves={} failure_bound={:.3e} wall_ms={}",
            s.branches,
            s.separations,
            s.max_depth,
            s.family_sets,
            s.max_rule_leaves,
            s.failure_bound,
            elapsed.as_millis()
        );
    }
    Ok(ExitCode::from(exit_code(&report) as u8))
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode, String> {
    let inst = read_instance(&args.instance)?;
    let text = std::fs::read_to_string(&args.report)
        .map_err(|e| format!("cannot read {}: {e}", args.report.display()))?;
    let report: JsonReport =
        serde_json::from_str(&text).map_err(|e| format!("report is not valid JSON: {e}"))?;
    match verify_report(&inst, &report) {
        Ok(()) => {
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        Err(why) => {
            println!("invalid: {why}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn run_gen(args: &GenArgs) -> Result<ExitCode, String> {
    let problem =
        Problem::from_str(&args.problem).ok_or_else(|| format!("unknown problem '{}'", args.problem))?;
    let opts = GenOpts {
        problem,
        n: args.n,
        extra_edges: args.extra_edges,
        density: args.density,
        k: args.k,
        seed: args.seed,
        steiner_parts: args.parts,
        terminals: args.terminals,
        classes: args.classes,
        sigma: args.sigma,
        mcc_parts: args.mcc_parts,
        plant_cut: args.plant_cut,
    };
    let inst = generate(&opts)?;
    write_out(&args.output, &format::print(&inst))?;
    Ok(ExitCode::SUCCESS)
}

fn run_reduce(args: &ReduceArgs) -> Result<ExitCode, String> {
    let inst = read_instance(&args.instance)?;
    let target =
        ReduceTarget::from_str(&args.to).ok_or_else(|| format!("unknown target '{}'", args.to))?;
    let out = reduce(&inst, target)?;
    write_out(&args.output, &format::print(&out))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Verify(a) => run_verify(a),
        Command::Gen(a) => run_gen(a),
        Command::Reduce(a) => run_reduce(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(std::io::stderr(), "error: {msg}");
            ExitCode::FAILURE
        }
    }
}
