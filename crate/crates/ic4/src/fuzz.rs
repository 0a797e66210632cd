//! Differential fuzzing of every engine against the explicit-state oracle.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};

use ic4_core::aig::AigCircuit;
use ic4_core::oracle::{bfs, check_invariant, oracle_verdict, validate_counterexample, OracleVerdict, ReachMap, DEFAULT_MAX_STATES};
use ic4_core::random::{random_circuit, GenParams};
use ic4_core::ts::TransitionSystem;
use ic4_core::{EffortMode, EngineKind, HeuristicBudget, Options, RunResult, Verdict};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub count: usize,
    pub params: GenParams,
    pub seed: u64,
    /// Candidates drawn per model while looking for the wanted verdict.
    pub max_attempts: usize,
}

impl FuzzConfig {
    pub fn new(count: usize, seed: u64) -> FuzzConfig {
        FuzzConfig { count, params: GenParams::default(), seed, max_attempts: 64 }
    }
}

pub fn engines() -> [EngineKind; 5] {
    [
        EngineKind::Ic3,
        EngineKind::Ic4(EffortMode::Minimal),
        EngineKind::Ic4(EffortMode::Maximal),
        EngineKind::Ic4(EffortMode::Heuristic(HeuristicBudget::default())),
        EngineKind::Pd(EffortMode::Minimal),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzRow {
    pub model: String,
    pub engine: &'static str,
    pub verdict: &'static str,
    pub oracle: &'static str,
    pub frames: usize,
    pub diameter: usize,
    pub reach_generated: usize,
    pub reach_generated_no_reuse: usize,
    pub unpushable: usize,
    pub reuse_hits: usize,
}

#[derive(Clone, Debug)]
pub struct FuzzFailure {
    pub model: String,
    pub engine: &'static str,
    pub circuit: AigCircuit,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct FuzzReport {
    pub rows: Vec<FuzzRow>,
    pub failures: Vec<FuzzFailure>,
}

pub struct Model {
    pub name: String,
    pub circuit: AigCircuit,
    pub ts: TransitionSystem,
    pub reach: ReachMap,
    pub verdict: OracleVerdict,
}

fn oracle_label(v: &OracleVerdict) -> &'static str {
    match v {
        OracleVerdict::Safe => "SAFE",
        OracleVerdict::Unsafe { .. } => "UNSAFE",
        OracleVerdict::Inconclusive => "INCONCLUSIVE",
    }
}

/// Model `index` of the suite: even indices aim for a safe model, odd ones
/// for an unsafe one, by drawing candidates until the oracle agrees. After
/// `max_attempts` misses the last conclusive candidate is kept.
pub fn model(cfg: &FuzzConfig, index: usize) -> Model {
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index as u64);
    let want_safe = index.is_multiple_of(2);
    let mut fallback = None;
    for _ in 0..cfg.max_attempts.max(1) {
        let s: u64 = rng.random();
        let circuit = random_circuit(s, &cfg.params);
        let name = format!("m{index:04}-{s:016x}");
        let ts = TransitionSystem::encode(&circuit, name.clone());
        let reach = bfs(&ts, DEFAULT_MAX_STATES).expect("generated models fit the oracle");
        let verdict = oracle_verdict(&ts, &reach);
        if verdict == OracleVerdict::Inconclusive {
            continue;
        }
        let m = Model { name, circuit, ts, reach, verdict };
        if (m.verdict == OracleVerdict::Safe) == want_safe {
            return m;
        }
        fallback = Some(m);
    }
    fallback.expect("no conclusive candidate model")
}

/// Cross-checks one run against the oracle. Returns a description of the
/// first violated property.
pub fn check_run(m: &Model, kind: EngineKind, r: &RunResult, opts: &Options) -> Result<(), String> {
    match (&m.verdict, &r.verdict) {
        (OracleVerdict::Safe, Verdict::Safe { invariant, frames }) => {
            check_invariant(&m.ts, invariant, &m.reach, &opts.solver).map_err(|e| format!("certificate: {e}"))?;
            if kind != EngineKind::Ic3 && *frames > m.reach.diameter + 1 {
                return Err(format!("{frames} frames exceed diameter {} + 1", m.reach.diameter));
            }
        }
        (OracleVerdict::Unsafe { depth }, Verdict::Unsafe { trace }) => {
            validate_counterexample(&m.ts, trace).map_err(|e| format!("counterexample: {e}"))?;
            if trace.steps() < *depth {
                return Err(format!("trace of {} steps beats the oracle depth {depth}", trace.steps()));
            }
        }
        (o, v) => return Err(format!("oracle says {}, engine says {}", oracle_label(o), v.label())),
    }
    let s = &r.stats;
    let k = s.frames;
    let bound = match kind {
        EngineKind::Ic4(EffortMode::Minimal) => Some(k * (k + 1) / 2),
        EngineKind::Ic4(_) => Some(k * s.unpushable),
        _ => None,
    };
    if let Some(b) = bound {
        if s.reach_generated > b {
            return Err(format!("{} reachable states generated, bound {b}", s.reach_generated));
        }
    }
    for e in r.reach.entries() {
        if m.reach.depth(&e.state).is_none_or(|d| d > e.depth) {
            return Err(format!("stored state {} at depth {} is not reachable that fast", e.state, e.depth));
        }
    }
    Ok(())
}

fn run_guarded(m: &Model, kind: EngineKind, opts: &Options) -> Result<RunResult, String> {
    catch_unwind(AssertUnwindSafe(|| kind.run(&m.ts, opts))).map_err(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        format!("engine panicked: {msg}")
    })
}

fn run_model(cfg: &FuzzConfig, index: usize) -> (Vec<FuzzRow>, Vec<FuzzFailure>) {
    let m = model(cfg, index);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for kind in engines() {
        let opts = Options { seed: cfg.seed, self_check: true, ..Options::default() };
        let no_reuse = Options { reuse: false, ..opts.clone() };
        let outcome = run_guarded(&m, kind, &opts).and_then(|r| {
            check_run(&m, kind, &r, &opts)?;
            let r2 = run_guarded(&m, kind, &no_reuse)?;
            check_run(&m, kind, &r2, &no_reuse).map_err(|e| format!("without reuse: {e}"))?;
            Ok((r, r2))
        });
        match outcome {
            Ok((r, r2)) => rows.push(FuzzRow {
                model: m.name.clone(),
                engine: kind.name(),
                verdict: r.verdict.label(),
                oracle: oracle_label(&m.verdict),
                frames: r.stats.frames,
                diameter: m.reach.diameter,
                reach_generated: r.stats.reach_generated,
                reach_generated_no_reuse: r2.stats.reach_generated,
                unpushable: r.stats.unpushable,
                reuse_hits: r.stats.reuse_hits,
            }),
            Err(message) => failures.push(FuzzFailure {
                model: m.name.clone(),
                engine: kind.name(),
                circuit: m.circuit.clone(),
                message,
            }),
        }
    }
    (rows, failures)
}

/// Runs the suite on the rayon pool. Rows come back in model order, then
/// engine order, regardless of scheduling.
pub fn run_fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let per_model: Vec<_> = (0..cfg.count).into_par_iter().map(|i| run_model(cfg, i)).collect();
    let mut report = FuzzReport::default();
    for (rows, failures) in per_model {
        report.rows.extend(rows);
        report.failures.extend(failures);
    }
    report
}

pub const CSV_HEADER: &str =
    "model,engine,verdict,oracle,frames,diameter,reach_generated,reach_generated_no_reuse,unpushable,reuse_hits";

pub fn to_csv(rows: &[FuzzRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.model,
            r.engine,
            r.verdict,
            r.oracle,
            r.frames,
            r.diameter,
            r.reach_generated,
            r.reach_generated_no_reuse,
            r.unpushable,
            r.reuse_hits
        );
    }
    s
}

/// Mean reachable states generated per run, with and without reuse, over
/// the rows of `engine` (all engines when `None`).
pub fn reuse_means(rows: &[FuzzRow], engine: Option<&str>) -> (f64, f64) {
    let sel: Vec<&FuzzRow> = rows.iter().filter(|r| engine.is_none_or(|e| r.engine == e)).collect();
    if sel.is_empty() {
        return (0.0, 0.0);
    }
    let n = sel.len() as f64;
    let with = sel.iter().map(|r| r.reach_generated as f64).sum::<f64>() / n;
    let without = sel.iter().map(|r| r.reach_generated_no_reuse as f64).sum::<f64>() / n;
    (with, without)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let mut cfg = FuzzConfig::new(12, 3);
        cfg.params = GenParams { max_latches: 4, max_ands: 12, max_inputs: 2 };
        let r = run_fuzz(&cfg);
        assert!(r.failures.is_empty(), "{:?}", r.failures.first().map(|f| &f.message));
        assert_eq!(r.rows.len(), 12 * engines().len());
        let safe = r.rows.iter().filter(|r| r.oracle == "SAFE").count();
        assert!(safe > 0 && safe < r.rows.len());
    }

    #[test]
    fn csv_shape() {
        let row = FuzzRow {
            model: "m".into(),
            engine: "ic3",
            verdict: "SAFE",
            oracle: "SAFE",
            frames: 2,
            diameter: 1,
            reach_generated: 0,
            reach_generated_no_reuse: 0,
            unpushable: 0,
            reuse_hits: 0,
        };
        assert_eq!(to_csv(&[row]).lines().nth(1), Some("m,ic3,SAFE,SAFE,2,1,0,0,0,0"));
    }
}
