use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use capsched::bounds::{bound_report, BoundReport};
use capsched::harness::{
    generate_instance, render_gantt, render_table, run_algorithm, run_experiment, verify_schedule, DemandDistribution,
    GeneratorConfig, Suite, VerifyReport, VERSION,
};
use capsched::io::{inline_instance, read_instance, to_json, InstanceRef, ScheduleDoc};
use capsched::oracle::{optimal_schedule, OracleLimits};
use capsched::single_machine::DEFAULT_EPSILON;
use capsched::{check_feasibility, Algorithm, Error, Instance, Schedule};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_RATIO: u8 = 3;

#[derive(Parser)]
#[command(name = "capsched", version, about = "Scheduling on capacitated parallel machines")]
struct Cli {
    /// Report format for bounds, verify, run and bench.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgArg {
    Wsvf,
    Wspt,
    Hybrid,
    Pack,
}

impl From<AlgArg> for Algorithm {
    fn from(a: AlgArg) -> Self {
        match a {
            AlgArg::Wsvf => Algorithm::Wsvf,
            AlgArg::Wspt => Algorithm::Wspt,
            AlgArg::Hybrid => Algorithm::Hybrid,
            AlgArg::Pack => Algorithm::Pack,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Bimodal,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Schedule an instance with one algorithm.
    Run(RunArgs),
    /// Lower bounds and guarantees for an instance.
    Bounds {
        instance: PathBuf,
        #[arg(long)]
        machines: Option<usize>,
    },
    /// Check a schedule file: feasibility, invariants and ratio.
    Verify {
        schedule: PathBuf,
        /// Use the exact oracle as the ratio denominator.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
    },
    /// Exact optimum for a small instance.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        machines: Option<usize>,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        /// Seconds before the search stops and reports its best schedule.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long)]
        inline: bool,
    },
    /// Render a schedule file as SVG.
    Gantt { schedule: PathBuf },
    /// Run an experiment suite.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, default_value_t = 1)]
        parallel: usize,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Start from this generator config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    machines: Option<usize>,
    #[arg(long)]
    alpha_max: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    p_range: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    w_range: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    distribution: Option<DistArg>,
    #[arg(long)]
    integer_p: bool,
}

#[derive(Args)]
struct RunArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    alg: AlgArg,
    /// Defaults to the instance's machine count.
    #[arg(long)]
    machines: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Give all machines to the hybrid's only job class when the other is empty.
    #[arg(long)]
    rebalance: bool,
    /// Embed the instance instead of referencing its path.
    #[arg(long)]
    inline: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MissingAssignment(_) | Error::DuplicateAssignment { .. } => EXIT_INFEASIBLE,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult = Result<u8, Failure>;

fn seed_override() -> Result<Option<u64>, Failure> {
    match std::env::var("CAPSCHED_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Failure {
            code: EXIT_USAGE,
            message: format!("CAPSCHED_SEED must be an unsigned integer, got {v:?}"),
        }),
        Err(_) => Ok(None),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::from(e).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path, machines: Option<usize>) -> Result<Arc<Instance>, Failure> {
    let inst = read_instance(path)?;
    Ok(Arc::new(match machines {
        Some(m) if m != inst.machines() => inst.with_machines(m)?,
        _ => inst,
    }))
}

fn instance_ref(path: &Path, inst: &Instance, inline: bool) -> Result<InstanceRef, Failure> {
    if inline {
        Ok(inline_instance(inst)?)
    } else {
        Ok(InstanceRef::Path(path.to_string_lossy().into_owned()))
    }
}

fn schedule_table(s: &Schedule, cost: f64) -> String {
    let inst = s.instance();
    let mut out = format!("algorithm {}  machines {}  cost {}\n", s.algorithm(), s.machines(), fmt_num(cost));
    let width = inst.jobs().iter().map(|j| j.id.len()).max().unwrap_or(3).max(3);
    let _ = writeln!(out, "{:>width$}  machine  {:>10}  {:>10}", "job", "start", "completion");
    for a in s.assignments() {
        let c = s.completion(a.job).unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "{:>width$}  {:>7}  {:>10}  {:>10}",
            inst.job(a.job).id,
            a.machine,
            fmt_num(a.start),
            fmt_num(c)
        );
    }
    out
}

fn fmt_num(x: f64) -> String {
    format!("{}", capsched::io::round_significant(x))
}

fn bounds_table(r: &BoundReport) -> String {
    let opt = |x: Option<f64>| x.map_or_else(|| "-".to_owned(), fmt_num);
    let rows = [
        ("machines", r.machines.to_string()),
        ("alpha", fmt_num(r.alpha)),
        ("cn", fmt_num(r.cn)),
        ("c1_hat", fmt_num(r.c1_hat)),
        ("eastman_lb", fmt_num(r.eastman_lb)),
        ("eastman_sharp", fmt_num(r.eastman_sharp)),
        ("combined_lb", fmt_num(r.combined_lb)),
        ("theorem1_factor", opt(r.theorem1_factor)),
        ("hybrid_factor", opt(r.hybrid_factor)),
    ];
    rows.iter().map(|(k, v)| format!("{k:<16} {v}\n")).collect()
}

fn verify_table(r: &VerifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "algorithm        {}", r.algorithm);
    let _ = writeln!(out, "cost             {}", fmt_num(r.cost));
    let _ = writeln!(out, "cost consistent  {}", r.cost_consistent);
    let _ = writeln!(out, "feasible         {} ({} violations)", r.feasibility.is_feasible(), r.feasibility.violations.len());
    if let Some(inv) = &r.invariants {
        let _ = writeln!(out, "invariants       {} violations", inv.violation_count());
    }
    if let Some(p) = &r.pack {
        let _ = writeln!(out, "pack upper bound {} (holds: {})", fmt_num(p.algorithm_bound), p.upper_bound_holds);
    }
    let q = &r.ratio;
    let _ = writeln!(
        out,
        "ratio            {} against {} ({}), factor {}: {}",
        fmt_num(q.ratio),
        fmt_num(q.lower_bound),
        if q.lower_bound_kind == capsched::bounds::LowerBoundKind::Oracle { "oracle" } else { "combined_lb" },
        q.factor.map_or_else(|| "-".to_owned(), fmt_num),
        format!("{:?}", q.verdict).to_lowercase()
    );
    out
}

fn oracle_limits(max_n: usize, timeout: f64) -> Result<OracleLimits, Failure> {
    let max_time = Duration::try_from_secs_f64(timeout)
        .map_err(|_| Failure { code: EXIT_USAGE, message: format!("invalid timeout {timeout}") })?;
    Ok(OracleLimits { max_jobs: max_n, max_time, ..OracleLimits::default() })
}

fn generate(cli: &Cli, args: &GenerateArgs) -> CliResult {
    let mut cfg = match &args.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p).map_err(Error::from)?).map_err(Error::from)?,
        None => GeneratorConfig::default(),
    };
    if let Some(seed) = seed_override()? {
        cfg.seed = seed;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(m) = args.machines {
        cfg.machines = m;
    }
    if let Some(a) = args.alpha_max {
        cfg.alpha_max = a;
    }
    if let Some(r) = &args.p_range {
        cfg.p_range = [r[0], r[1]];
    }
    if let Some(r) = &args.w_range {
        cfg.w_range = [r[0], r[1]];
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(d) = args.distribution {
        cfg.distribution = match d {
            DistArg::Uniform => DemandDistribution::Uniform,
            DistArg::Bimodal => DemandDistribution::Bimodal,
        };
    }
    cfg.integer_p |= args.integer_p;
    emit(&cli.output, &to_json(&generate_instance(&cfg)?)?)?;
    Ok(0)
}

fn run(cli: &Cli, args: &RunArgs) -> CliResult {
    let alg = Algorithm::from(args.alg);
    if !(args.epsilon > 0.0 && args.epsilon <= 1.0) {
        return Err(Failure { code: EXIT_USAGE, message: format!("epsilon must lie in (0, 1], got {}", args.epsilon) });
    }
    let machines = match alg {
        Algorithm::Pack => args.machines.or(Some(1)),
        _ => args.machines,
    };
    let inst = load_instance(&args.instance, machines)?;
    let schedule = run_algorithm(&inst, alg, inst.machines(), args.epsilon, args.rebalance)?;
    let doc = ScheduleDoc::from_schedule(&schedule, instance_ref(&args.instance, &inst, args.inline)?)?;
    let text = match cli.format {
        Format::Json => to_json(&doc)?,
        Format::Table => schedule_table(&schedule, doc.cost),
    };
    emit(&cli.output, &text)?;
    Ok(if check_feasibility(&schedule)?.is_feasible() { 0 } else { EXIT_INFEASIBLE })
}

fn verify(cli: &Cli, path: &Path, use_oracle: bool, max_n: usize, timeout: f64) -> CliResult {
    let doc: ScheduleDoc =
        serde_json::from_str(&fs::read_to_string(path).map_err(Error::from)?).map_err(Error::from)?;
    let schedule = doc.to_schedule(path.parent())?;
    let optimum = if use_oracle {
        let out = optimal_schedule(schedule.instance_arc(), schedule.machines(), &oracle_limits(max_n, timeout)?)?;
        out.optimal.then_some(out.cost)
    } else {
        None
    };
    let report = verify_schedule(&schedule, Some(doc.cost), optimum)?;
    let text = match cli.format {
        Format::Json => to_json(&report)?,
        Format::Table => verify_table(&report),
    };
    emit(&cli.output, &text)?;
    Ok(if report.has_violation() {
        EXIT_INFEASIBLE
    } else if report.ratio_violated() {
        EXIT_RATIO
    } else {
        0
    })
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Generate(args) => generate(cli, args),
        Command::Run(args) => run(cli, args),
        Command::Bounds { instance, machines } => {
            let inst = load_instance(instance, *machines)?;
            let report = bound_report(&inst, inst.machines());
            let text = match cli.format {
                Format::Json => to_json(&report)?,
                Format::Table => bounds_table(&report),
            };
            emit(&cli.output, &text)?;
            Ok(0)
        }
        Command::Verify { schedule, oracle, max_n, timeout } => verify(cli, schedule, *oracle, *max_n, *timeout),
        Command::Oracle { instance, machines, max_n, timeout, inline } => {
            let inst = load_instance(instance, *machines)?;
            let out = optimal_schedule(&inst, inst.machines(), &oracle_limits(*max_n, *timeout)?)?;
            let doc = ScheduleDoc::from_schedule(&out.schedule, instance_ref(instance, &inst, *inline)?)?;
            let text = match cli.format {
                Format::Json => to_json(&doc)?,
                Format::Table => schedule_table(&out.schedule, out.cost),
            };
            emit(&cli.output, &text)?;
            Ok(0)
        }
        Command::Gantt { schedule } => {
            let s = capsched::io::read_schedule(schedule)?;
            if !check_feasibility(&s)?.is_feasible() {
                return Err(Failure { code: EXIT_INFEASIBLE, message: "schedule is infeasible".into() });
            }
            emit(&cli.output, &render_gantt(&s)?)?;
            Ok(0)
        }
        Command::Bench { suite, parallel } => {
            let mut suite: Suite =
                serde_json::from_str(&fs::read_to_string(suite).map_err(Error::from)?).map_err(Error::from)?;
            if let Some(seed) = seed_override()? {
                suite.entries.iter_mut().for_each(|e| e.generator.seed = seed);
            }
            let report = run_experiment(&suite, *parallel)?;
            let text = match cli.format {
                Format::Json => to_json(&report)?,
                Format::Table => render_table(&report),
            };
            emit(&cli.output, &text)?;
            Ok(if report.has_anomaly() {
                EXIT_INFEASIBLE
            } else if report.has_violation() {
                EXIT_RATIO
            } else {
                0
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("capsched {VERSION}: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
