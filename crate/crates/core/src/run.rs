//! Engine entry points.

use alloc::vec::Vec;

use crate::engine::{Engine, UnpushProof};
use crate::reach::ReachStore;
use crate::stats::Stats;
use crate::ts::TransitionSystem;
use crate::verdict::{EffortMode, Options, Verdict};

#[derive(Clone, Debug)]
pub struct RunResult {
    pub verdict: Verdict,
    pub stats: Stats,
    pub reach: ReachStore,
    pub proofs: Vec<UnpushProof>,
}

fn run_global(ts: &TransitionSystem, mode: Option<EffortMode>, opts: &Options) -> RunResult {
    let mut reach = ReachStore::new(ts);
    let mut e = Engine::new(ts, opts, mode, &mut reach);
    let verdict = e.run();
    let stats = e.stats().clone();
    let proofs = e.proofs().to_vec();
    drop(e);
    RunResult { verdict, stats, reach, proofs }
}

/// Plain frame-based checking: pushing never tries to fix a clause.
pub fn prove_ic3(ts: &TransitionSystem, opts: &Options) -> RunResult {
    run_global(ts, None, opts)
}

pub fn prove_ic4(ts: &TransitionSystem, mode: EffortMode, opts: &Options) -> RunResult {
    run_global(ts, Some(mode), opts)
}

/// Which engine to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Ic3,
    Ic4(EffortMode),
    Pd(EffortMode),
}

impl EngineKind {
    pub fn run(self, ts: &TransitionSystem, opts: &Options) -> RunResult {
        match self {
            EngineKind::Ic3 => prove_ic3(ts, opts),
            EngineKind::Ic4(m) => prove_ic4(ts, m, opts),
            EngineKind::Pd(m) => crate::pd::prove_pd(ts, m, opts),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Ic3 => "ic3",
            EngineKind::Ic4(EffortMode::Minimal) => "ic4-min",
            EngineKind::Ic4(EffortMode::Maximal) => "ic4-max",
            EngineKind::Ic4(EffortMode::Heuristic(_)) => "ic4-heur",
            EngineKind::Pd(_) => "ic4-pd",
        }
    }
}
