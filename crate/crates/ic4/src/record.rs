//! The JSON-lines run record.

use ic4_core::stats::Stats;
use ic4_core::Verdict;
use serde::Serialize;

/// One line per run. Engine counters are flattened next to the run
/// identification fields.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord<'a> {
    pub model: &'a str,
    pub seed: u64,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(flatten)]
    pub stats: &'a Stats,
}

impl<'a> RunRecord<'a> {
    pub fn new(model: &'a str, seed: u64, verdict: &Verdict, stats: &'a Stats) -> RunRecord<'a> {
        let reason = match verdict {
            Verdict::Unknown { reason } => Some(reason.to_string()),
            _ => None,
        };
        RunRecord { model, seed, verdict: verdict.label(), reason, stats }
    }

    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("stats serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ic4_core::fixtures::sat3;
    use ic4_core::ts::TransitionSystem;
    use ic4_core::{prove_ic4, EffortMode, Options};

    #[test]
    fn record_fields() {
        let ts = TransitionSystem::encode(&sat3(), "sat3");
        let r = prove_ic4(&ts, EffortMode::Minimal, &Options::default());
        let line = RunRecord::new("sat3", 7, &r.verdict, &r.stats).to_json_line();
        assert!(line.ends_with('\n') && !line[..line.len() - 1].contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["model"], "sat3");
        assert_eq!(v["verdict"], "SAFE");
        assert_eq!(v["engine"], "ic4");
        assert_eq!(v["mode"], "minimal");
        assert!(v["sat_calls"]["consecution"].is_u64());
        assert!(v.get("reason").is_none());
    }
}
