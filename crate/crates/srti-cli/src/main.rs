//! `srti` — generate and verify stable-roommates benchmark instances with
//! ties and incomplete preference lists.
//!
//! Exit codes: 0 success, 2 usage error, 3 budget or time limit exhausted,
//! 4 validation failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use srti_cli::files::{self, FileError};
use srti_cli::pipeline::{run_pipeline, PipelineError, PipelineSpec};
use srti_core::baseline::{generate_er, ErParams};
use srti_core::combine::{
    self, CombineError, CombineParams, Preservation,
};
use srti_core::enumerate::{count_stable, enumerate_stable, solve_egalitarian, EgalSolution};
use srti_core::io::{self, MatchingRepr, ProvenanceDocument};
use srti_core::seedgen::{self, CompletenessMode, SeedGenError, SeedParams, SeedModes, TieMode};
use srti_core::{Instance, Matching};

/// Environment variable overriding the default RNG seed when `--seed` is
/// not given.
const SEED_ENV: &str = "SRTI_SEED";

#[derive(Parser)]
#[command(
    name = "srti",
    version,
    about = "Generate and verify stable-roommates benchmark instances (with ties and incomplete lists)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a satisfiable (n,m,k)-seed instance
    GenSeed(GenSeedArgs),
    /// Combine seed instances into one instance with a certified lower bound
    Combine(CombineArgs),
    /// Run the benchmark recipe: per 20 agents, seeds (8,7,6) (8,7,6) (6,5,2)
    Pipeline(PipelineArgs),
    /// Enumerate all stable matchings of an instance
    Enumerate(EnumerateArgs),
    /// Count the stable matchings of an instance
    Count(CountArgs),
    /// Find a stable matching of minimum egalitarian cost
    SolveEgal(SolveEgalArgs),
    /// Re-validate an instance file against its provenance sidecar
    Verify(VerifyArgs),
    /// Generate an Erdős–Rényi random baseline instance
    Baseline(BaselineArgs),
}

#[derive(Args)]
struct GenSeedArgs {
    /// Number of agents
    #[arg(short)]
    n: u32,
    /// Maximum preference-list length (default n-1)
    #[arg(short)]
    m: Option<u32>,
    /// Number of witness stable matchings
    #[arg(short)]
    k: u32,
    /// Require complete preference lists (implies m = n-1)
    #[arg(long)]
    complete: bool,
    /// Forbid ties (all ranks strict)
    #[arg(long, conflicts_with = "all_tied")]
    no_ties: bool,
    /// Force each list into a single rank group
    #[arg(long)]
    all_tied: bool,
    /// Require symmetric listing: x lists y iff y lists x
    #[arg(long)]
    symmetric: bool,
    /// RNG seed (default: $SRTI_SEED or 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Attempt budget for the rejection sampler
    #[arg(long, default_value_t = seedgen::DEFAULT_ATTEMPT_BUDGET)]
    budget: u32,
    /// Output instance path; the provenance goes to <out>.meta
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CombineArgs {
    /// Seed instance files (.srti with .srti.meta sidecars)
    #[arg(required = true)]
    seeds: Vec<PathBuf>,
    /// Probability of incompleteness
    #[arg(long)]
    p1: f64,
    /// Probability that an added agent joins a tie
    #[arg(long)]
    p2: f64,
    /// Maximum list length of the combined instance (default: largest seed m)
    #[arg(long)]
    m_cap: Option<u32>,
    /// RNG seed (default: $SRTI_SEED or 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Only link agents of opposite classes (bipartite instances)
    #[arg(long)]
    smti: bool,
    /// Commit additions only together with their mirror image
    #[arg(long)]
    symmetric: bool,
    /// Output instance path; the provenance goes to <out>.meta
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// Nominal agent count, a positive multiple of 20
    #[arg(long)]
    n_total: u32,
    /// Probability of incompleteness
    #[arg(long, default_value_t = 0.0)]
    p1: f64,
    /// Probability of ties
    #[arg(long, default_value_t = 0.0)]
    p2: f64,
    /// Number of instances to generate
    #[arg(long, default_value_t = 1)]
    instances: u32,
    /// RNG seed (default: $SRTI_SEED or 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out_dir: PathBuf,
    /// Worker threads across instances
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct EnumerateArgs {
    instance: PathBuf,
    /// Stop after this many stable matchings
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
    /// Time limit in seconds
    #[arg(long, default_value_t = 200.0)]
    time_limit: f64,
    /// Print every matching found
    #[arg(long)]
    print_matchings: bool,
    /// Emit a JSON report instead of key-value lines
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CountArgs {
    instance: PathBuf,
    /// Stop after this many stable matchings
    #[arg(long, default_value_t = u64::MAX)]
    cap: u64,
    /// Time limit in seconds
    #[arg(long, default_value_t = 200.0)]
    time_limit: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SolveEgalArgs {
    instance: PathBuf,
    /// Time limit in seconds
    #[arg(long, default_value_t = 200.0)]
    time_limit: f64,
    /// Write the optimal matching to this path (.match format)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    /// Refuse preservation checks beyond this many witness unions
    #[arg(long, default_value_t = 1_000_000)]
    max_products: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BaselineArgs {
    /// Number of agents
    #[arg(short)]
    n: u32,
    /// Probability of mutual acceptability per pair
    #[arg(short)]
    p: f64,
    /// RNG seed (default: $SRTI_SEED or 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output instance path; the provenance goes to <out>.meta
    #[arg(long)]
    out: PathBuf,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl ToString) -> Self {
        CliError { code: 2, message: message.to_string() }
    }
    fn budget(message: impl ToString) -> Self {
        CliError { code: 3, message: message.to_string() }
    }
    fn validation(message: impl ToString) -> Self {
        CliError { code: 4, message: message.to_string() }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Io { .. } => CliError::usage(e),
            _ => CliError::validation(e),
        }
    }
}

impl From<SeedGenError> for CliError {
    fn from(e: SeedGenError) -> Self {
        match e {
            SeedGenError::AttemptsExhausted { .. } => CliError::budget(e),
            _ => CliError::usage(e),
        }
    }
}

impl From<CombineError> for CliError {
    fn from(e: CombineError) -> Self {
        match e {
            CombineError::InvalidWitness { .. } => CliError::validation(e),
            _ => CliError::usage(e),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Seed(inner) => inner.into(),
            PipelineError::Combine(inner) => inner.into(),
            PipelineError::File(inner) => inner.into(),
            _ => CliError::usage(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::GenSeed(args) => cmd_gen_seed(args),
        Command::Combine(args) => cmd_combine(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Count(args) => cmd_count(args),
        Command::SolveEgal(args) => cmd_solve_egal(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Baseline(args) => cmd_baseline(args),
    }
}

/// `--seed`, else `$SRTI_SEED`, else 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV} must be a 64-bit integer, got `{text}`"))),
        Err(_) => Ok(0),
    }
}

fn budget_of(secs: f64) -> Option<Duration> {
    (secs > 0.0).then(|| Duration::from_secs_f64(secs))
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Ok(files::read_instance(path)?)
}

fn cmd_gen_seed(args: GenSeedArgs) -> Result<(), CliError> {
    let m = args.m.unwrap_or_else(|| args.n.saturating_sub(1));
    let modes = SeedModes {
        completeness: if args.complete {
            CompletenessMode::Complete
        } else {
            CompletenessMode::Any
        },
        ties: if args.no_ties {
            TieMode::Forbid
        } else if args.all_tied {
            TieMode::AllTied
        } else {
            TieMode::Any
        },
        symmetric: args.symmetric,
    };
    let params = SeedParams {
        n: args.n,
        m,
        k: args.k,
        modes,
        rng_seed: resolve_seed(args.seed)?,
        attempt_budget: args.budget,
    };
    let started = Instant::now();
    let seed = seedgen::generate_seed(&params)?;
    files::write_seed(&args.out, &params, &seed)?;
    println!("out {}", args.out.display());
    println!("n {}", seed.n());
    println!("m {}", seed.m());
    println!("k {}", seed.k());
    println!("rng_seed {}", params.rng_seed);
    println!("time_s {:.3}", started.elapsed().as_secs_f64());
    println!("# ({},{},{})-seed written with {} witnesses", seed.n(), seed.m(), seed.k(), seed.k());
    Ok(())
}

fn cmd_combine(args: CombineArgs) -> Result<(), CliError> {
    let mut seeds = Vec::with_capacity(args.seeds.len());
    for path in &args.seeds {
        let (seed, _) = files::read_seed(path)?;
        seeds.push(seed);
    }
    let params = CombineParams {
        p1: args.p1,
        p2: args.p2,
        m_cap: args.m_cap.unwrap_or_else(|| combine::default_m_cap(&seeds)),
        rng_seed: resolve_seed(args.seed)?,
        smti_mode: args.smti,
        symmetric: args.symmetric,
    };
    let combined = combine::combine(&seeds, &params)?;
    files::write_combined(&args.out, &combined)?;
    println!("out {}", args.out.display());
    println!("n {}", combined.instance().n());
    println!("m_cap {}", params.m_cap);
    println!("seeds {}", combined.seeds().len());
    println!("lower_bound {}", combined.lower_bound());
    println!(
        "# combined {} seeds into {} agents; at least {} stable matchings",
        combined.seeds().len(),
        combined.instance().n(),
        combined.lower_bound()
    );
    Ok(())
}

fn cmd_pipeline(args: PipelineArgs) -> Result<(), CliError> {
    let spec = PipelineSpec {
        n_total: args.n_total,
        p1: args.p1,
        p2: args.p2,
        instances: args.instances,
        rng_seed: resolve_seed(args.seed)?,
        out_dir: args.out_dir,
        jobs: args.jobs,
    };
    let started = Instant::now();
    let outcomes = run_pipeline(&spec)?;
    println!("out_dir {}", spec.out_dir.display());
    println!("instances {}", outcomes.len());
    println!("n {}", outcomes[0].n);
    println!("lower_bound {}", outcomes[0].lower_bound);
    for outcome in &outcomes {
        println!("instance {}", outcome.path.display());
    }
    println!("time_s {:.3}", started.elapsed().as_secs_f64());
    println!(
        "# {} instance(s) with {} agents each, certified >= {} stable matchings",
        outcomes.len(),
        outcomes[0].n,
        outcomes[0].lower_bound
    );
    Ok(())
}

#[derive(Serialize)]
struct EnumerateReport {
    instance: String,
    n: u32,
    cap: u64,
    count: u64,
    exhausted: bool,
    time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    matchings: Option<Vec<MatchingRepr>>,
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<(), CliError> {
    if args.cap == 0 {
        return Err(CliError::usage("--cap must be at least 1"));
    }
    let inst = load_instance(&args.instance)?;
    let started = Instant::now();
    let result = enumerate_stable(&inst, args.cap, budget_of(args.time_limit));
    let report = EnumerateReport {
        instance: args.instance.display().to_string(),
        n: inst.n(),
        cap: args.cap,
        count: result.count,
        exhausted: result.exhausted,
        time_s: started.elapsed().as_secs_f64(),
        matchings: args
            .print_matchings
            .then(|| result.matchings.iter().map(MatchingRepr::from_matching).collect()),
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("instance {}", report.instance);
        println!("n {}", report.n);
        println!("cap {}", report.cap);
        println!("count {}", report.count);
        println!("exhausted {}", report.exhausted);
        println!("time_s {:.3}", report.time_s);
        if args.print_matchings {
            for (i, mu) in result.matchings.iter().enumerate() {
                println!("matching {}", i + 1);
                print!("{}", io::serialize_matching(mu));
            }
        }
        println!(
            "# {} stable matching(s){} in {:.3}s",
            report.count,
            if report.exhausted { ", search exhausted" } else { ", truncated" },
            report.time_s
        );
    }
    if !result.exhausted {
        return Err(CliError::budget("enumeration truncated by cap or time limit"));
    }
    Ok(())
}

#[derive(Serialize)]
struct CountReport {
    instance: String,
    n: u32,
    cap: u64,
    count: u64,
    exhausted: bool,
    time_s: f64,
}

fn cmd_count(args: CountArgs) -> Result<(), CliError> {
    if args.cap == 0 {
        return Err(CliError::usage("--cap must be at least 1"));
    }
    let inst = load_instance(&args.instance)?;
    let started = Instant::now();
    let (count, exhausted) = count_stable(&inst, args.cap, budget_of(args.time_limit));
    let report = CountReport {
        instance: args.instance.display().to_string(),
        n: inst.n(),
        cap: args.cap,
        count,
        exhausted,
        time_s: started.elapsed().as_secs_f64(),
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("instance {}", report.instance);
        println!("n {}", report.n);
        println!("cap {}", report.cap);
        println!("count {}", report.count);
        println!("exhausted {}", report.exhausted);
        println!("time_s {:.3}", report.time_s);
        println!(
            "# {} stable matching(s){}",
            count,
            if exhausted { " (exact)" } else { " (lower bound, truncated)" }
        );
    }
    if !exhausted {
        return Err(CliError::budget("count truncated by cap or time limit"));
    }
    Ok(())
}

#[derive(Serialize)]
struct EgalReport {
    instance: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cost: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matching: Option<MatchingRepr>,
    time_s: f64,
}

fn cmd_solve_egal(args: SolveEgalArgs) -> Result<(), CliError> {
    let inst = load_instance(&args.instance)?;
    let started = Instant::now();
    let solution = solve_egalitarian(&inst, budget_of(args.time_limit));
    let time_s = started.elapsed().as_secs_f64();
    let (status, best): (&'static str, Option<(Matching, u64)>) = match solution {
        EgalSolution::Optimal { matching, cost } => ("optimal", Some((matching, cost.value()))),
        EgalSolution::Unsatisfiable => ("unsatisfiable", None),
        EgalSolution::TimedOut { best } => {
            ("timeout", best.map(|(m, c)| (m, c.value())))
        }
    };
    let report = EgalReport {
        instance: args.instance.display().to_string(),
        status,
        cost: best.as_ref().map(|(_, c)| *c),
        matching: best.as_ref().map(|(m, _)| MatchingRepr::from_matching(m)),
        time_s,
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("instance {}", report.instance);
        println!("status {status}");
        if let Some((matching, cost)) = &best {
            println!("cost {cost}");
            print!("{}", io::serialize_matching(matching));
        }
        println!("time_s {time_s:.3}");
        match status {
            "optimal" => println!("# egalitarian optimum {} in {:.3}s", best.as_ref().unwrap().1, time_s),
            "unsatisfiable" => println!("# no stable matching exists"),
            _ => println!("# time limit hit; best cost so far {:?}", report.cost),
        }
    }
    if let Some(out) = &args.out {
        if let Some((matching, _)) = &best {
            std::fs::write(out, io::serialize_matching(matching))
                .map_err(|e| CliError::usage(format!("{}: {e}", out.display())))?;
        }
    }
    if status == "timeout" {
        return Err(CliError::budget("egalitarian search hit the time limit"));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    instance: String,
    kind: &'static str,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    products_checked: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound: Option<u128>,
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let inst = load_instance(&args.instance)?;
    let doc = files::read_provenance(&args.instance)?;
    let mut report = VerifyReport {
        instance: args.instance.display().to_string(),
        kind: match &doc {
            ProvenanceDocument::Seed(_) => "seed",
            ProvenanceDocument::SeedCombine(_) => "seed-combine",
            ProvenanceDocument::Er(_) => "er",
        },
        valid: true,
        violation: None,
        products_checked: None,
        lower_bound: None,
    };
    match doc {
        ProvenanceDocument::Seed(seed_doc) => {
            if let Err(e) = seed_doc.to_seed(inst) {
                report.valid = false;
                report.violation = Some(e.to_string());
            }
        }
        ProvenanceDocument::SeedCombine(combine_doc) => {
            report.lower_bound = Some(combine_doc.lower_bound);
            match combine_doc.witness_pair_sets(&inst) {
                Err(e) => {
                    report.valid = false;
                    report.violation = Some(e.to_string());
                }
                Ok(sets) => {
                    let preservation: Preservation =
                        combine::verify_preservation(&inst, &sets, args.max_products)
                            .map_err(CliError::from)?;
                    report.products_checked = Some(preservation.checked);
                    if let Some(failure) = preservation.counterexample {
                        report.valid = false;
                        report.violation = Some(format!(
                            "witness union {:?} is blocked by the pair ({}, {})",
                            failure.witness_indices,
                            failure.blocking_pair.0,
                            failure.blocking_pair.1
                        ));
                    }
                }
            }
        }
        ProvenanceDocument::Er(er_doc) => {
            if let Err(message) = check_er_instance(&inst, &er_doc) {
                report.valid = false;
                report.violation = Some(message);
            }
        }
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("instance {}", report.instance);
        println!("kind {}", report.kind);
        println!("valid {}", report.valid);
        if let Some(v) = &report.violation {
            println!("violation {v}");
        }
        if let Some(c) = report.products_checked {
            println!("products_checked {c}");
        }
        if let Some(lb) = report.lower_bound {
            println!("lower_bound {lb}");
        }
    }
    if !report.valid {
        return Err(CliError::validation("verification failed"));
    }
    Ok(())
}

fn check_er_instance(inst: &Instance, doc: &srti_core::io::ErProvenance) -> Result<(), String> {
    if doc.n != inst.n() {
        return Err(format!("document records n={} but the instance has n={}", doc.n, inst.n()));
    }
    if inst.m() != inst.n() - 1 {
        return Err(format!("baseline instances use m = n-1, found m={}", inst.m()));
    }
    for x in inst.agents() {
        if inst.list(x).groups().iter().any(|g| g.len() > 1) {
            return Err(format!("agent {x} has tied entries"));
        }
        for y in inst.list(x).agents() {
            if !inst.list(y).contains(x) {
                return Err(format!("agents {x} and {y} list each other asymmetrically"));
            }
        }
    }
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<(), CliError> {
    let params = ErParams {
        n: args.n,
        p: args.p,
        rng_seed: resolve_seed(args.seed)?,
    };
    let inst = generate_er(&params).map_err(CliError::usage)?;
    let doc = ProvenanceDocument::Er(srti_core::io::ErProvenance {
        n: params.n,
        p: params.p,
        rng_seed: params.rng_seed,
    });
    files::write_instance(&args.out, &inst, &doc)?;
    println!("out {}", args.out.display());
    println!("n {}", params.n);
    println!("p {}", params.p);
    println!("rng_seed {}", params.rng_seed);
    println!("# random baseline instance written");
    Ok(())
}
