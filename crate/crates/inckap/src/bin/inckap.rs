use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use inckap::algscale::{build_ordering_from_schedule, phase_schedule};
use inckap::evaluator::competitive_ratio;
use inckap::flows::{flow_ratio, quickest_increment, FlowInstance};
use inckap::instances::{gen_coverage, gen_m_bound, gen_random_xos, gen_sqrt6};
use inckap::objective::Instance;
use inckap::verify::{render, suite_bounds, suite_flows, suite_lemmas};
use inckap::{Error, Result};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_CAPABILITY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "inckap",
    version,
    about = "Incremental knapsack orderings for XOS objectives"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for all randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (modules are deterministic regardless).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Maximum ground-set size accepted for exhaustive modes.
    #[arg(long, global = true)]
    limit_m: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in or generated instance as JSON.
    Gen(GenArgs),
    /// Build the scaling ordering for an instance and report its ratio.
    Solve(IoArgs),
    /// Write the full ratio curve of the scaling ordering as CSV.
    Curve(IoArgs),
    /// Run a built-in verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Quickest-Increment on a graph file, with its ratio curve.
    Flow(IoArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Singleton-value bound M.
    #[arg(long, default_value_t = 1.0)]
    m_param: f64,
    /// Ground-set size (random_xos, coverage).
    #[arg(long, default_value_t = 6)]
    m: usize,
    /// Clause count (random_xos).
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Universe size (coverage).
    #[arg(long, default_value_t = 6)]
    universe: usize,
}

#[derive(Args)]
struct IoArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format for `solve` (json only for now).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    MBound,
    Sqrt6,
    RandomXos,
    Coverage,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Bounds,
    Lemmas,
    Flows,
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => print!("{}", text),
    }
    Ok(())
}

fn load_instance(cli: &Cli, path: &PathBuf) -> Result<Instance> {
    let text = fs::read_to_string(path)?;
    let inst = Instance::from_json(&text)?;
    if let Some(limit) = cli.limit_m {
        if inst.len() > limit {
            return Err(Error::capability(format!(
                "instance has m = {} above --limit-m {}",
                inst.len(),
                limit
            )));
        }
    }
    Ok(inst)
}

fn cmd_gen(args: &GenArgs, seed: u64) -> Result<()> {
    let inst = match args.kind {
        Kind::MBound => gen_m_bound(args.m_param)?,
        Kind::Sqrt6 => gen_sqrt6(),
        Kind::RandomXos => gen_random_xos(args.m, args.k, args.m_param, seed)?,
        Kind::Coverage => gen_coverage(args.universe, args.m, seed)?,
    };
    emit(&args.output, &(inst.to_json()? + "\n"))
}

#[derive(Serialize)]
struct SolveOut {
    order: Vec<String>,
    phases: Vec<SolvePhase>,
    ratio: f64,
    rho: f64,
    m_bound: f64,
    within_bound: bool,
}

#[derive(Serialize)]
struct SolvePhase {
    capacity: f64,
    target: Vec<String>,
}

fn cmd_solve(cli: &Cli, args: &IoArgs) -> Result<()> {
    let inst = load_instance(cli, &args.input)?;
    let report = inst.validate();
    if !report.ok {
        return Err(Error::invalid(report.violations.join("; ")));
    }
    log::info!("solving instance with m = {}", inst.len());
    let schedule = phase_schedule(&inst)?;
    let ordering = build_ordering_from_schedule(&inst, &schedule)?;
    let curve = competitive_ratio(&inst, &ordering.order)?;
    let out = SolveOut {
        order: ordering
            .order
            .iter()
            .map(|&e| inst.element_name(e).to_string())
            .collect(),
        phases: schedule
            .phases
            .iter()
            .map(|p| SolvePhase {
                capacity: p.capacity,
                target: p
                    .target
                    .iter()
                    .map(|&e| inst.element_name(e).to_string())
                    .collect(),
            })
            .collect(),
        ratio: curve.overall,
        rho: schedule.rho,
        m_bound: schedule.m_bound,
        within_bound: curve.overall <= schedule.rho + 1e-6,
    };
    emit(&args.output, &(serde_json::to_string_pretty(&out)? + "\n"))
}

fn cmd_curve(cli: &Cli, args: &IoArgs) -> Result<()> {
    let inst = load_instance(cli, &args.input)?;
    let report = inst.validate();
    if !report.ok {
        return Err(Error::invalid(report.violations.join("; ")));
    }
    let ordering = inckap::algscale::build_ordering(&inst)?;
    let curve = competitive_ratio(&inst, &ordering.order)?;
    emit(&args.output, &curve.to_csv())
}

fn cmd_flow(args: &IoArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input)?;
    let graph = FlowInstance::parse(&text)?;
    let trace = quickest_increment(&graph).map_err(|e| match e {
        // an unreachable sink is an input problem for the CLI contract
        Error::Infeasible(msg) => Error::invalid(msg),
        other => other,
    })?;
    let curve = flow_ratio(&graph, &trace.ordering)?;
    let mut out = String::new();
    out.push_str(&format!(
        "# order: {}\n",
        trace
            .ordering
            .iter()
            .map(|&e| {
                let (u, v) = graph.edges[e];
                format!("{}->{}", graph.vertices[u], graph.vertices[v])
            })
            .collect::<Vec<_>>()
            .join(" ")
    ));
    out.push_str(&format!("# batches: {:?}\n", trace.batch_sizes));
    out.push_str("k,opt,alg,ratio\n");
    for row in &curve.rows {
        let ratio = if row.ratio.is_infinite() {
            "inf".to_string()
        } else {
            format!("{}", row.ratio)
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.capacity, row.opt, row.alg, ratio
        ));
    }
    emit(&args.output, &out)
}

fn cmd_verify(suite: Suite, seed: u64) -> Result<bool> {
    let checks = match suite {
        Suite::Bounds => suite_bounds(seed)?,
        Suite::Lemmas => suite_lemmas(seed)?,
        Suite::Flows => suite_flows(seed)?,
    };
    let (text, all) = render(&checks);
    print!("{}", text);
    Ok(all)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(args, cli.seed).map(|_| true),
        Command::Solve(args) => cmd_solve(cli, args).map(|_| true),
        Command::Curve(args) => cmd_curve(cli, args).map(|_| true),
        Command::Verify { suite } => cmd_verify(*suite, cli.seed),
        Command::Flow(args) => cmd_flow(args).map(|_| true),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("INCKAP_LOG")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e @ (Error::InvalidInput(_) | Error::Io(_) | Error::Json(_))) => {
            eprintln!("error: {}", e);
            ExitCode::from(EXIT_INVALID_INPUT)
        }
        Err(e @ Error::CapabilityLimit(_)) => {
            eprintln!("error: {}", e);
            ExitCode::from(EXIT_CAPABILITY)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(EXIT_INVALID_INPUT)
        }
    }
}
