//! `lpinit` — solve, generate, verify, and benchmark linear programs with
//! pluggable simplex initialization strategies.
//!
//! Exit codes: 0 optimal/success, 2 infeasible, 3 unbounded, 4 parse or
//! usage error, 5 iteration limit / run did not produce an answer.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lp_core::engine::PivotRule;
use lp_core::model::GeneralLp;
use lp_core::Settings;

use lp_harness::bench::{run_bench, write_csv, write_json, BenchInstance};
use lp_harness::dimacs::{parse_dimacs_min, write_dimacs_min};
use lp_harness::gen::{generate, split_seed, Instance, InstanceKind, InstanceSpec};
use lp_harness::mps::{parse_mps, write_mps};
use lp_harness::oracle::{oracle_general, OracleVerdict, DEFAULT_ENUM_CAP};
use lp_harness::otfmt::{parse_ot, write_ot};
use lp_harness::registry::{run_strategy, RunStatus, StrategyOutput, STRATEGIES};
use lp_harness::{standard_to_general, Error};


/// Print to stdout, ignoring write errors (a closed pipe downstream must
/// not turn a finished run into a panic).
macro_rules! say {
    ($($t:tt)*) => {
        let _ = writeln!(std::io::stdout(), $($t)*);
    };
}

#[derive(Parser)]
#[command(
    name = "lpinit",
    version,
    about = "simplex initialization workbench",
    long_about = "Solve linear programs with a chosen initialization strategy, generate \
                  seeded test instances, verify answers against a brute-force vertex \
                  enumeration, and benchmark strategies side by side."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance with a chosen initialization strategy.
    Solve(SolveArgs),
    /// Run strategies across a suite and report CSV/JSON.
    Bench(BenchArgs),
    /// Generate a seeded instance file of a declared kind.
    Gen(GenArgs),
    /// Verify an instance by brute-force vertex enumeration.
    Oracle(OracleArgs),
    /// List the registered strategies.
    Strategies,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pivot {
    Dantzig,
    Bland,
}

impl Pivot {
    fn rule(self) -> PivotRule {
        match self {
            Pivot::Dantzig => PivotRule::Dantzig,
            Pivot::Bland => PivotRule::Bland,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputKind {
    Text,
    Json,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (.mps, .dimacs/.min/.net, or .ot).
    #[arg(long)]
    input: PathBuf,
    /// Initialization strategy (see `lpinit strategies`).
    #[arg(long, default_value = "two_phase")]
    init: String,
    #[arg(long, value_enum, default_value_t = Pivot::Dantzig)]
    pivot: Pivot,
    /// Feasibility tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration budget override (approximate; rounded to engine granularity).
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputKind::Text)]
    output: OutputKind,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files to run.
    #[arg(long)]
    suite: Option<PathBuf>,
    /// Generated sub-suite spec `kind:m:n:density:count`; repeatable.
    #[arg(long = "gen")]
    gen: Vec<String>,
    /// Comma-separated strategy names; defaults to the full registry.
    #[arg(long)]
    strategies: Option<String>,
    /// Master seed for generated instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write a JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Attach per-iteration logs to the JSON report.
    #[arg(long)]
    verbose: bool,
    /// Free-text note emitted as a comment ahead of the CSV header.
    #[arg(long)]
    note: Option<String>,
    #[arg(long, value_enum, default_value_t = Pivot::Dantzig)]
    pivot: Pivot,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// feasible | infeasible | unbounded | dual_feasible_start | ot | mcf | block_separable
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; written as MPS, OT text, or DIMACS depending on kind.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    /// Enumeration cap on C(n, m).
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    cap: usize,
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are ordinary exits; bad usage maps to the
            // parse-error code.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(4),
            };
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            exit_code_of_error(&e)
        }
    };
    ExitCode::from(code)
}

fn exit_code_of_error(e: &Error) -> u8 {
    match e {
        Error::TooLarge(_) => 5,
        _ => 4,
    }
}

fn status_code(status: RunStatus) -> u8 {
    match status {
        RunStatus::Optimal => 0,
        RunStatus::PrimalInfeasible => 2,
        RunStatus::PrimalUnbounded => 3,
        RunStatus::IterationLimit | RunStatus::InitFailed => 5,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Bench(args) => cmd_bench(args),
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Oracle(args) => cmd_oracle(args),
        Cmd::Strategies => {
            for (name, summary) in STRATEGIES {
                say!("{:18} {}", name, summary);
            }
            Ok(0)
        }
    }
}

fn settings_with(tol: Option<f64>) -> Settings {
    let mut s = Settings::default();
    if let Some(t) = tol {
        s.feas_tol = t;
    }
    s
}

/// Load any supported instance file as a general-form program, tagged with
/// its family label.
fn load_general(path: &Path, settings: &Settings) -> Result<(GeneralLp, &'static str), Error> {
    let text = fs::read_to_string(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    match ext.as_str() {
        "ot" => {
            let p = parse_ot(&text)?;
            let lp = lp_core::network::ot_to_standard(&p, settings)?;
            Ok((standard_to_general(&lp)?, "ot"))
        }
        "dimacs" | "min" | "net" => {
            let p = parse_dimacs_min(&text)?;
            let emb = lp_core::network::mcf_to_standard(&p, settings)?;
            Ok((standard_to_general(&emb.lp)?, "mcf"))
        }
        _ => Ok((parse_mps(&text)?, "mps")),
    }
}

fn apply_iter_budget(settings: &mut Settings, p: &GeneralLp, max_iter: Option<usize>) {
    if let Some(budget) = max_iter {
        let span = (p.m() + p.n()).max(1);
        settings.iter_factor = (budget / span).max(1);
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Error> {
    let mut settings = settings_with(args.tol);
    let (problem, _) = load_general(&args.input, &settings)?;
    apply_iter_budget(&mut settings, &problem, args.max_iter);
    let out = run_strategy(&args.init, &problem, args.pivot.rule(), &settings)?;
    match args.output {
        OutputKind::Text => print_solve_text(&problem, &out),
        OutputKind::Json => print_solve_json(&out)?,
    }
    Ok(status_code(out.status))
}

fn print_solve_text(p: &GeneralLp, out: &StrategyOutput) {
    say!("problem    {} ({} rows, {} cols)", p.name, p.m(), p.n());
    say!("strategy   {}", out.strategy);
    say!("status     {}", out.status.name());
    if let Some(obj) = out.objective {
        say!("objective  {:.10}", obj);
    }
    if let Some(x) = &out.x {
        for (name, v) in p.col_names.iter().zip(x) {
            if v.abs() > 1e-11 {
                say!("  {:10} = {:.10}", name, v);
            }
        }
    }
    say!(
        "work       {} init + {} solve pivots, {:.3} ms init, {:.3} ms total",
        out.init_work,
        out.solve_iterations,
        out.init_time.as_secs_f64() * 1e3,
        out.total_time.as_secs_f64() * 1e3
    );
    if !out.flags.is_empty() {
        say!("flags      {}", out.flags.join(", "));
    }
    if let Some(f) = &out.failure {
        say!("failure    {}", f);
    }
}

fn print_solve_json(out: &StrategyOutput) -> Result<(), Error> {
    let doc = serde_json::json!({
        "strategy": out.strategy,
        "status": out.status.name(),
        "objective": out.objective,
        "x": out.x,
        "init_work": out.init_work,
        "solve_iterations": out.solve_iterations,
        "init_ms": out.init_time.as_secs_f64() * 1e3,
        "total_ms": out.total_time.as_secs_f64() * 1e3,
        "flags": out.flags,
        "failure": out.failure,
    });
    say!(
        "{}",
        serde_json::to_string_pretty(&doc).map_err(|e| Error::BadSpec(e.to_string()))?
    );
    Ok(())
}

fn parse_gen_spec(text: &str) -> Result<(InstanceKind, usize, usize, f64, usize), Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 5 {
        return Err(Error::BadSpec(format!(
            "generator spec '{}' is not kind:m:n:density:count",
            text
        )));
    }
    let kind = InstanceKind::parse(parts[0])?;
    let m = parts[1].parse().map_err(|_| Error::BadSpec(format!("bad m in '{}'", text)))?;
    let n = parts[2].parse().map_err(|_| Error::BadSpec(format!("bad n in '{}'", text)))?;
    let density =
        parts[3].parse().map_err(|_| Error::BadSpec(format!("bad density in '{}'", text)))?;
    let count = parts[4].parse().map_err(|_| Error::BadSpec(format!("bad count in '{}'", text)))?;
    Ok((kind, m, n, density, count))
}

fn instance_to_general(inst: &Instance, settings: &Settings) -> Result<GeneralLp, Error> {
    match inst {
        Instance::Standard(lp) => standard_to_general(lp),
        Instance::Ot(p) => standard_to_general(&lp_core::network::ot_to_standard(p, settings)?),
        Instance::Mcf(p) => {
            standard_to_general(&lp_core::network::mcf_to_standard(p, settings)?.lp)
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Error> {
    let settings = settings_with(args.tol);
    let mut instances = Vec::new();

    if let Some(dir) = &args.suite {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                matches!(
                    p.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase().as_str(),
                    "mps" | "ot" | "dimacs" | "min" | "net"
                )
            })
            .collect();
        paths.sort();
        for path in paths {
            let (problem, kind) = load_general(&path, &settings)?;
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("instance")
                .to_string();
            instances.push(BenchInstance { name, kind: kind.to_string(), problem });
        }
    }

    let mut counter: u64 = 0;
    for spec_text in &args.gen {
        let (kind, m, n, density, count) = parse_gen_spec(spec_text)?;
        for _ in 0..count {
            let seed = split_seed(args.seed, counter);
            let g = generate(&InstanceSpec { m, n, density, seed, kind }, &settings)?;
            let problem = instance_to_general(&g.instance, &settings)?;
            instances.push(BenchInstance {
                name: format!("gen-{}-{:03}", kind.name(), counter),
                kind: kind.name().to_string(),
                problem,
            });
            counter += 1;
        }
    }

    if instances.is_empty() && args.suite.is_none() && args.gen.is_empty() {
        return Err(Error::BadSpec("bench needs --suite and/or --gen".into()));
    }

    let strategies: Vec<String> = match &args.strategies {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => STRATEGIES.iter().map(|&(n, _)| n.to_string()).collect(),
    };

    let report = run_bench(&instances, &strategies, args.pivot.rule(), &settings)?;
    for w in &report.warnings {
        eprintln!("warning: {}", w);
    }

    let csv = write_csv(&report, args.note.as_deref())?;
    match &args.csv {
        Some(path) => fs::write(path, &csv)?,
        None => { let _ = write!(std::io::stdout(), "{}", csv); }
    }
    if let Some(path) = &args.json {
        let json = write_json(&report, args.note.as_deref(), args.verbose)?;
        fs::write(path, json)?;
    }
    Ok(0)
}

fn cmd_gen(args: GenArgs) -> Result<u8, Error> {
    let settings = Settings::default();
    let kind = InstanceKind::parse(&args.kind)?;
    let spec = InstanceSpec { m: args.m, n: args.n, density: args.density, seed: args.seed, kind };
    let g = generate(&spec, &settings)?;
    if g.density_adjusted {
        eprintln!("note: density was raised to reach full row rank");
    }
    let text = match &g.instance {
        Instance::Standard(lp) => {
            let mut p = standard_to_general(lp)?;
            p.name = format!("GEN{}", args.seed);
            write_mps(&p)
        }
        Instance::Ot(p) => write_ot(p),
        Instance::Mcf(p) => write_dimacs_min(p),
    };
    fs::write(&args.out, text)?;
    say!("wrote {} ({})", args.out.display(), kind.name());
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Error> {
    let settings = settings_with(args.tol);
    let (problem, _) = load_general(&args.input, &settings)?;
    let verdict = oracle_general(&problem, args.cap, &settings)?;
    match verdict {
        OracleVerdict::Optimal { value, basis } => {
            say!("Optimal {:.10} at basis {:?}", value, basis);
            Ok(0)
        }
        OracleVerdict::Infeasible => {
            say!("PrimalInfeasible");
            Ok(2)
        }
        OracleVerdict::Unbounded => {
            say!("PrimalUnbounded");
            Ok(3)
        }
    }
}
