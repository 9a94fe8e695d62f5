//! Protocol documents, trace files and runnable case studies on top of
//! [`tsactor_core`].

mod document;
mod error;
pub mod scenarios;
mod trace_file;

pub use document::{load_spec, parse_spec, serialize_spec, SpecDocument};
pub use error::Error;
pub use trace_file::{read_trace, render_trace, to_trace, write_trace, Record};
pub use tsactor_core as core;
