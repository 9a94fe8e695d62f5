use thiserror::Error;

/// Failures of the file formats and the scenario harness, plus every core
/// error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] tsactor_core::Error),
    #[error("cannot parse protocol document: {0}")]
    SpecParse(String),
    #[error("line {line}: cannot parse trace record: {message}")]
    TraceParse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("step budget of {0} exhausted with work pending")]
    BudgetExhausted(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Core(e) => e.code(),
            Error::SpecParse(_) => "SPEC_PARSE_ERROR",
            Error::TraceParse { .. } => "TRACE_PARSE_ERROR",
            Error::Config(_) => "CONFIG_INVALID",
            Error::BudgetExhausted(_) => "BUDGET_EXHAUSTED",
            Error::Io(_) => "IO_ERROR",
        }
    }
}
