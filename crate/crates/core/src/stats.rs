//! Per-run counters, serialized by the driver as one JSON-lines record.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// How `frames` is counted: F_0 = I is frame 0, and `frames` is the index
/// of the highest frame opened before the run stopped. Pushing F_k opens
/// F_{k+1}, so a fixed point found while pushing F_k reports k + 1.
pub const FRAME_CONVENTION: &str = "highest-frame-index-opened; F0=I is index 0";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatCalls {
    pub bad: u64,
    pub consecution: u64,
    pub generalize: u64,
    pub pushing: u64,
    pub lift: u64,
    pub certify: u64,
}

impl SatCalls {
    pub fn total(&self) -> u64 {
        self.bad + self.consecution + self.generalize + self.pushing + self.lift + self.certify
    }

    pub fn absorb(&mut self, o: &SatCalls) {
        self.bad += o.bad;
        self.consecution += o.consecution;
        self.generalize += o.generalize;
        self.pushing += o.pushing;
        self.lift += o.lift;
        self.certify += o.certify;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdStats {
    pub q_generated: usize,
    pub q_inductive_as_is: usize,
    pub literals_removed: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub engine: String,
    pub mode: Option<String>,
    pub frames: usize,
    pub frame_convention: String,
    pub clauses_per_frame: Vec<usize>,
    pub sat_calls: SatCalls,
    pub obligations: u64,
    pub lemmas: u64,
    pub unpushable: usize,
    pub reach_generated: usize,
    pub reuse_hits: usize,
    pub pd: Option<PdStats>,
}

impl Stats {
    pub(crate) fn new(engine: &str, mode: Option<&str>) -> Stats {
        Stats {
            engine: engine.into(),
            mode: mode.map(Into::into),
            frame_convention: FRAME_CONVENTION.into(),
            ..Stats::default()
        }
    }
}
