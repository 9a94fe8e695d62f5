use std::fmt::Write;

use tsactor_core::{Handling, Outcome, RunStatus, TraceEvent, Verdict};

use super::ScenarioConfig;

/// An error a client hit while running its session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClientError {
    pub client: String,
    pub error: tsactor_core::Error,
}

/// Everything observed in one scenario run.
#[derive(Debug, Clone)]
pub struct TraceReport {
    pub config: ScenarioConfig,
    pub status: RunStatus,
    pub steps: u64,
    pub events: Vec<TraceEvent>,
    /// Name of the stateful actor the clients talk to.
    pub actor: String,
    pub dead_letters: usize,
    /// Dead letters whose kind is in the retained set.
    pub retained_dead_letters: usize,
    /// Per client: did its session reach its end.
    pub completions: Vec<(String, bool)>,
    /// Conformance verdicts, named by what was checked.
    pub verdicts: Vec<(String, Verdict)>,
    /// Other named pass/fail observations.
    pub checks: Vec<(String, bool)>,
    pub errors: Vec<ClientError>,
    /// `(client, value)` in removal order, for buffer scenarios.
    pub removed: Vec<(String, i64)>,
    pub final_state: String,
    pub output: Vec<String>,
}

impl TraceReport {
    /// Handlings of the stateful actor, any outcome.
    pub fn handlings(&self) -> impl Iterator<Item = &Handling> {
        self.events
            .iter()
            .filter_map(TraceEvent::as_handling)
            .filter(|h| *h.actor_name == *self.actor)
    }

    pub fn handled(&self) -> impl Iterator<Item = &Handling> {
        self.handlings().filter(|h| h.outcome == Outcome::Handled)
    }

    pub fn handled_kinds(&self) -> Vec<String> {
        self.handled().map(|h| h.kind.to_string()).collect()
    }

    pub fn stashed(&self) -> usize {
        self.handlings().filter(|h| h.outcome == Outcome::Stashed).count()
    }

    /// Sizes of the stash flushes, in order.
    pub fn flushes(&self) -> Vec<usize> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Flush { count, .. } => Some(*count),
                TraceEvent::Message(_) => None,
            })
            .collect()
    }

    pub fn removed_by(&self, client: &str) -> Vec<i64> {
        self.removed
            .iter()
            .filter(|(c, _)| c == client)
            .map(|&(_, v)| v)
            .collect()
    }

    pub fn is_complete(&self, client: &str) -> bool {
        self.completions.iter().any(|(c, done)| c == client && *done)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|(n, _)| n == name).map(|&(_, ok)| ok)
    }

    /// Quiescent, every session complete, every verdict and check passed,
    /// and no client error.
    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Quiescent
            && self.completions.iter().all(|(_, done)| *done)
            && self.verdicts.iter().all(|(_, v)| v.is_ok())
            && self.checks.iter().all(|(_, ok)| *ok)
            && self.errors.is_empty()
    }

    /// Human-readable summary. Equal runs render identically.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let status = match self.status {
            RunStatus::Quiescent => "quiescent",
            RunStatus::BudgetExhausted => "BUDGET_EXHAUSTED",
        };
        let _ = writeln!(
            s,
            "scenario {} seed {}: {} after {} steps",
            self.config.scenario, self.config.seed, status, self.steps
        );
        let _ = writeln!(s, "handled: {}", self.handled_kinds().join(" "));
        let _ = writeln!(
            s,
            "dead letters: {}, stashed: {}, flushes: {:?}",
            self.dead_letters,
            self.stashed(),
            self.flushes()
        );
        if !self.removed.is_empty() {
            let values: Vec<String> = self.removed.iter().map(|(c, v)| format!("{v}@{c}")).collect();
            let _ = writeln!(s, "removed: {}", values.join(" "));
        }
        let _ = writeln!(s, "final state: {}", self.final_state);
        for (client, done) in &self.completions {
            let _ = writeln!(s, "session {client}: {}", if *done { "complete" } else { "INCOMPLETE" });
        }
        for (name, verdict) in &self.verdicts {
            let _ = writeln!(s, "verdict {name}: {verdict}");
        }
        for (name, ok) in &self.checks {
            let _ = writeln!(s, "check {name}: {}", if *ok { "OK" } else { "FAILED" });
        }
        for e in &self.errors {
            let _ = writeln!(s, "error {}: {} {}", e.client, e.error.code(), e.error);
        }
        for line in &self.output {
            let _ = writeln!(s, "> {line}");
        }
        s
    }
}
