//! Line-delimited JSON export of handling traces.
//!
//! One object per line. Message records carry `step`, `actor`, `state`,
//! `kind`, `outcome` (`handled`, `stashed` or `dead-letter`), and optional
//! `client` and `payload`. Stash flushes are `{"step", "actor", "outcome":
//! "flush(n)"}`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use tsactor_core::{Kind, Outcome, Trace, TraceEvent, TraceStep};

use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub step: u64,
    pub actor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<String>,
}

impl Record {
    pub fn is_handled(&self) -> bool {
        self.outcome == Outcome::Handled.as_str()
    }

    /// `n` for a `flush(n)` record.
    pub fn flush_count(&self) -> Option<usize> {
        self.outcome.strip_prefix("flush(")?.strip_suffix(')')?.parse().ok()
    }
}

impl From<&TraceEvent> for Record {
    fn from(event: &TraceEvent) -> Self {
        match event {
            TraceEvent::Message(h) => Record {
                step: h.step,
                actor: h.actor_name.to_string(),
                state: Some(h.state.to_string()),
                kind: Some(h.kind.to_string()),
                outcome: h.outcome.as_str().into(),
                client: h.client.as_ref().map(|c| c.to_string()),
                payload: (!h.payload.is_empty()).then(|| h.payload.clone()),
            },
            TraceEvent::Flush {
                step,
                actor_name,
                count,
                ..
            } => Record {
                step: *step,
                actor: actor_name.to_string(),
                state: None,
                kind: None,
                outcome: format!("flush({count})"),
                client: None,
                payload: None,
            },
        }
    }
}

pub fn write_trace<'e>(
    mut out: impl Write,
    events: impl IntoIterator<Item = &'e TraceEvent>,
) -> Result<(), Error> {
    for event in events {
        let line = serde_json::to_string(&Record::from(event)).expect("records always serialize");
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn render_trace<'e>(events: impl IntoIterator<Item = &'e TraceEvent>) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, events).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Reads records, skipping blank lines.
pub fn read_trace(input: impl BufRead) -> Result<Vec<Record>, Error> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| Error::TraceParse {
            line: i + 1,
            message: e.to_string(),
        })?;
        let known = matches!(record.outcome.as_str(), "handled" | "stashed" | "dead-letter");
        if !known && record.flush_count().is_none() {
            return Err(Error::TraceParse {
                line: i + 1,
                message: format!("unknown outcome `{}`", record.outcome),
            });
        }
        if known && record.kind.is_none() {
            return Err(Error::TraceParse {
                line: i + 1,
                message: "message record without `kind`".into(),
            });
        }
        records.push(record);
    }
    Ok(records)
}

/// The handled messages of `actor` (or of every actor) as a checkable trace.
pub fn to_trace(records: &[Record], actor: Option<&str>) -> Trace {
    Trace {
        steps: records
            .iter()
            .filter(|r| r.is_handled())
            .filter(|r| actor.is_none_or(|a| r.actor == a))
            .map(|r| TraceStep {
                state: r.state.clone(),
                kind: Kind::new(r.kind.as_deref().expect("checked on read")),
                client: r.client.clone(),
            })
            .collect(),
    }
}
