//! Command-line driver.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write as _};
use std::num::{NonZeroU64, NonZeroUsize};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{CommandFactory, Parser, ValueEnum};
use ic4_core::oracle::{bfs, check_invariant, oracle_verdict, validate_counterexample, OracleVerdict, ReachMap};
use ic4_core::random::GenParams;
use ic4_core::sat::{bundled_factory, Cdcl};
use ic4_core::ts::TransitionSystem;
use ic4_core::{EffortMode, EngineKind, HeuristicBudget, Options, RunResult, Verdict};

use crate::aiger::{parse_aag, write_aag};
use crate::dimacs::{write_invariant, write_ts};
use crate::external::{external_factory, serve};
use crate::fuzz::{reuse_means, run_fuzz, to_csv, FuzzConfig};
use crate::record::RunRecord;
use crate::solver_log::ClauseLog;
use crate::witness::{write_traces, write_witness};

pub const EXIT_UNKNOWN: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_SAFE: i32 = 10;
pub const EXIT_UNSAFE: i32 = 20;

/// Models with more latches skip `--oracle-check`.
const ORACLE_MAX_LATCHES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    #[value(name = "ic3")]
    Ic3,
    #[value(name = "ic4-min")]
    Ic4Min,
    #[value(name = "ic4-max")]
    Ic4Max,
    #[value(name = "ic4-heur")]
    Ic4Heur,
    #[value(name = "ic4-pd")]
    Ic4Pd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Min,
    Max,
    Heur,
}

#[derive(Debug, Parser)]
#[command(name = "ic4", version, about = "SAT-based safety model checking of AIGER circuits")]
pub struct Cli {
    /// ASCII AIGER model (`aag`).
    #[arg(required_unless_present_any = ["fuzz", "serve_solver"])]
    pub input: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "ic4-heur")]
    pub engine: EngineArg,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Give up with UNKNOWN before blocking at a frame beyond this index.
    #[arg(long)]
    pub max_frames: Option<usize>,

    #[arg(long)]
    pub time_limit_ms: Option<u64>,

    /// Conflict budget per condition-fixing attempt in heuristic mode.
    #[arg(long, default_value = "10000")]
    pub heur_conflicts: NonZeroU64,

    /// Unpushability proofs per frame before heuristic mode stops fixing.
    #[arg(long, default_value = "3")]
    pub heur_unpush_per_frame: NonZeroUsize,

    /// Effort mode of the local runs of `ic4-pd`.
    #[arg(long, value_enum, default_value = "min")]
    pub pd_mode: ModeArg,

    /// Outer iterations of `ic4-pd` before UNKNOWN (default 2 * 2^latches).
    #[arg(long)]
    pub pd_iteration_cap: Option<usize>,

    /// Cross-check the verdict and certificate against explicit-state search.
    #[arg(long)]
    pub oracle_check: bool,

    /// Write the inductive invariant of a SAFE run as DIMACS.
    #[arg(long, value_name = "PATH")]
    pub certificate: Option<PathBuf>,

    /// Write the counterexample of an UNSAFE run as an AIGER witness.
    #[arg(long, value_name = "PATH")]
    pub witness: Option<PathBuf>,

    /// Write stimulus traces for every reachable state the run generated.
    #[arg(long, value_name = "PATH")]
    pub dump_traces: Option<PathBuf>,

    /// JSON-lines run record (`-` for standard error); the CSV report with `--fuzz`.
    #[arg(long, value_name = "PATH")]
    pub stats: Option<PathBuf>,

    /// Write the transition system CNF with variable-role comments.
    #[arg(long, value_name = "PATH")]
    pub dump_cnf: Option<PathBuf>,

    /// Write every clause given to each solver instance.
    #[arg(long, value_name = "PATH")]
    pub dump_solver: Option<PathBuf>,

    /// Write the oracle's reachable-state count per BFS depth as CSV.
    #[arg(long, value_name = "PATH")]
    pub dump_histogram: Option<PathBuf>,

    /// Do not consult stored reachable states before blocking.
    #[arg(long)]
    pub no_reuse: bool,

    /// Keep full predecessor states instead of shrinking them.
    #[arg(long)]
    pub no_lifting: bool,

    /// Re-verify every lemma and stored state with extra SAT calls.
    #[arg(long)]
    pub self_check: bool,

    /// Run the SAT backend as this command, spoken to over the text protocol.
    #[arg(long, value_name = "CMD")]
    pub external_solver: Option<String>,

    /// Run the differential fuzz suite on N random models instead.
    #[arg(long, value_name = "N")]
    pub fuzz: Option<usize>,

    #[arg(long, value_name = "L", default_value_t = 8)]
    pub fuzz_latches: usize,

    #[arg(long, value_name = "A", default_value_t = 32)]
    pub fuzz_ands: usize,

    #[arg(long, value_name = "I", default_value_t = 2)]
    pub fuzz_inputs: usize,

    /// Serve the bundled solver over the text protocol on stdin/stdout.
    #[arg(long, hide = true)]
    pub serve_solver: bool,
}

struct UserError(String);

impl<E: std::fmt::Display> From<E> for UserError {
    fn from(e: E) -> Self {
        UserError(e.to_string())
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), UserError> {
    fs::write(path, text).map_err(|e| UserError(format!("cannot write {}: {e}", path.display())))
}

fn heuristic(cli: &Cli) -> EffortMode {
    EffortMode::Heuristic(HeuristicBudget { conflicts: cli.heur_conflicts, unpush_per_frame: cli.heur_unpush_per_frame })
}

pub fn engine_kind(cli: &Cli) -> EngineKind {
    match cli.engine {
        EngineArg::Ic3 => EngineKind::Ic3,
        EngineArg::Ic4Min => EngineKind::Ic4(EffortMode::Minimal),
        EngineArg::Ic4Max => EngineKind::Ic4(EffortMode::Maximal),
        EngineArg::Ic4Heur => EngineKind::Ic4(heuristic(cli)),
        EngineArg::Ic4Pd => EngineKind::Pd(match cli.pd_mode {
            ModeArg::Min => EffortMode::Minimal,
            ModeArg::Max => EffortMode::Maximal,
            ModeArg::Heur => heuristic(cli),
        }),
    }
}

/// Runs the driver and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return 0;
            }
            eprintln!("{}", Cli::command().render_usage());
            return EXIT_USAGE;
        }
    };
    match catch_unwind(AssertUnwindSafe(|| dispatch(&cli))) {
        Ok(Ok(code)) => code,
        Ok(Err(UserError(msg))) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(_) => {
            eprintln!("error: internal failure");
            EXIT_INTERNAL
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, UserError> {
    if cli.serve_solver {
        let mut s = Cdcl::new(cli.seed);
        serve(&mut s, BufReader::new(io::stdin().lock()), io::stdout().lock())?;
        return Ok(0);
    }
    if let Some(n) = cli.fuzz {
        return fuzz(cli, n);
    }
    let path = cli.input.as_ref().expect("clap requires the input");
    let text = fs::read_to_string(path).map_err(|e| UserError(format!("cannot read {}: {e}", path.display())))?;
    let circuit = parse_aag(&text).map_err(|e| UserError(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map_or_else(|| "model".into(), |s| s.to_string_lossy().into_owned());
    let ts = TransitionSystem::encode(&circuit, name);
    check_model(cli, &ts)
}

fn options(cli: &Cli) -> Result<(Options, Option<ClauseLog>), UserError> {
    let mut solver = match &cli.external_solver {
        Some(cmd) => external_factory(cmd).map_err(UserError)?,
        None => bundled_factory(),
    };
    let log = cli.dump_solver.as_ref().map(|_| ClauseLog::default());
    if let Some(l) = &log {
        solver = l.wrap(solver);
    }
    let interrupt = cli.time_limit_ms.map(|ms| {
        let deadline = Instant::now() + Duration::from_millis(ms);
        Arc::new(move || Instant::now() >= deadline) as ic4_core::verdict::Interrupt
    });
    let opts = Options {
        seed: cli.seed,
        max_frames: cli.max_frames,
        interrupt,
        reuse: !cli.no_reuse,
        lifting: !cli.no_lifting,
        self_check: cli.self_check || cfg!(debug_assertions),
        solver,
        pd_iteration_cap: cli.pd_iteration_cap,
    };
    Ok((opts, log))
}

fn oracle_check(ts: &TransitionSystem, rm: &ReachMap, r: &RunResult, opts: &Options) -> Result<(), String> {
    if rm.truncated {
        return Ok(());
    }
    match (oracle_verdict(ts, rm), &r.verdict) {
        (OracleVerdict::Safe, Verdict::Safe { invariant, .. }) => {
            check_invariant(ts, invariant, rm, &opts.solver).map_err(|e| format!("invariant rejected: {e}"))
        }
        (OracleVerdict::Unsafe { depth }, Verdict::Unsafe { trace }) => {
            validate_counterexample(ts, trace).map_err(|e| format!("counterexample rejected: {e}"))?;
            if trace.steps() < depth {
                return Err(format!("counterexample shorter than the oracle's {depth} steps"));
            }
            Ok(())
        }
        (_, Verdict::Unknown { .. }) => Ok(()),
        (o, v) => Err(format!("verdict {} disagrees with oracle {o:?}", v.label())),
    }
}

fn check_model(cli: &Cli, ts: &TransitionSystem) -> Result<i32, UserError> {
    let kind = engine_kind(cli);
    let (opts, log) = options(cli)?;
    if let Some(p) = &cli.dump_cnf {
        write_file(p, &write_ts(ts))?;
    }
    let needs_oracle = cli.dump_histogram.is_some() || cli.oracle_check && ts.num_latches() <= ORACLE_MAX_LATCHES;
    let rm = if needs_oracle { Some(bfs(ts, ic4_core::oracle::DEFAULT_MAX_STATES)?) } else { None };
    if let (Some(p), Some(rm)) = (&cli.dump_histogram, &rm) {
        let mut csv = String::from("depth,states\n");
        for (d, n) in rm.depth_histogram().iter().enumerate() {
            csv.push_str(&format!("{d},{n}\n"));
        }
        write_file(p, &csv)?;
    }

    let result = match catch_unwind(AssertUnwindSafe(|| kind.run(ts, &opts))) {
        Ok(r) => r,
        Err(_) => {
            eprintln!("error: internal failure in {}", kind.name());
            return Ok(EXIT_INTERNAL);
        }
    };
    if cli.oracle_check {
        if let Some(rm) = &rm {
            if let Err(e) = oracle_check(ts, rm, &result, &opts) {
                eprintln!("error: oracle check failed: {e}");
                return Ok(EXIT_INTERNAL);
            }
        }
    }

    println!("{}", result.verdict.label());
    let _ = io::stdout().flush();
    let code = match &result.verdict {
        Verdict::Safe { invariant, .. } => {
            if let Some(p) = &cli.certificate {
                write_file(p, &write_invariant(ts, invariant, kind.name()))?;
            }
            EXIT_SAFE
        }
        Verdict::Unsafe { trace } => {
            if let Some(p) = &cli.witness {
                write_file(p, &write_witness(ts, trace))?;
            }
            EXIT_UNSAFE
        }
        Verdict::Unknown { reason } => {
            eprintln!("unknown: {reason}");
            EXIT_UNKNOWN
        }
    };
    if let Some(p) = &cli.dump_traces {
        write_file(p, &write_traces(&result.reach))?;
    }
    if let (Some(p), Some(log)) = (&cli.dump_solver, &log) {
        write_file(p, &log.to_dimacs())?;
    }
    if let Some(p) = &cli.stats {
        let line = RunRecord::new(&ts.name, cli.seed, &result.verdict, &result.stats).to_json_line();
        if p.as_os_str() == "-" {
            eprint!("{line}");
        } else {
            write_file(p, &line)?;
        }
    }
    Ok(code)
}

fn fuzz(cli: &Cli, count: usize) -> Result<i32, UserError> {
    if cli.fuzz_latches == 0 || cli.fuzz_latches > 16 {
        return Err(UserError("--fuzz-latches must be between 1 and 16".into()));
    }
    let cfg = FuzzConfig {
        params: GenParams { max_latches: cli.fuzz_latches, max_ands: cli.fuzz_ands, max_inputs: cli.fuzz_inputs.min(8) },
        ..FuzzConfig::new(count, cli.seed)
    };
    let report = run_fuzz(&cfg);
    let csv = to_csv(&report.rows);
    match &cli.stats {
        Some(p) => write_file(p, &csv)?,
        None => print!("{csv}"),
    }
    let (with, without) = reuse_means(&report.rows, None);
    eprintln!(
        "fuzz: {count} models, {} runs, {} failures; mean reachable states generated {with:.3} with reuse, {without:.3} without",
        report.rows.len(),
        report.failures.len()
    );
    if report.failures.is_empty() {
        return Ok(0);
    }
    let dir = cli.stats.as_deref().and_then(Path::parent).filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    for f in &report.failures {
        let path = dir.join(format!("fuzz-fail-{}-{}.aag", f.model, f.engine));
        let mut text = write_aag(&f.circuit);
        if f.circuit.comments.is_empty() {
            text.push_str("c\n");
        }
        text.push_str(&format!("{}: {}\n", f.engine, f.message));
        write_file(&path, &text)?;
        eprintln!("error: {} on {}: {} (model written to {})", f.engine, f.model, f.message, path.display());
    }
    Ok(EXIT_INTERNAL)
}
