use alloc::string::String;

use crate::runtime::Kind;

/// Errors raised by the typed reference, protocol and protocol-spec layers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The message kind is not part of the reference's interface.
    #[error("message `{kind}` is not in interface `{interface}`")]
    MessageNotInInterface { kind: Kind, interface: String },

    /// An affine reference was used for a second send.
    #[error("affinity violation: reference to `{interface}` was already used")]
    AffinityViolation { interface: String },

    /// A reference cannot stand in for one at the requested interface.
    #[error("interface `{actual}` cannot be used where `{expected}` is expected")]
    SubstitutionUnsafe { actual: String, expected: String },

    /// A deferred cell was completed twice.
    #[error("deferred cell already completed")]
    DoubleCompletion,

    /// The actor completed a continuation at an interface other than the one
    /// the protocol table fixed at send time.
    #[error("protocol breach: continuation expects `{expected}`, actor supplied `{actual}`")]
    ProtocolBreach { expected: String, actual: String },

    /// A client certified a reference at the wrong protocol state.
    #[error("state mismatch: expected `{expected}`, reference is at `{actual}`")]
    StateMismatch { expected: String, actual: String },

    /// A protocol table has no entry for a kind of the reference's interface.
    #[error("protocol table `{table}` has no successor for `{kind}`")]
    TableNotTotal { table: String, kind: Kind },

    /// The kind is not enabled in the given protocol state.
    #[error("`{kind}` is not enabled in state `{state}`")]
    KindNotEnabled { state: String, kind: Kind },

    /// The state name is not declared by the protocol.
    #[error("unknown state `{0}`")]
    UnknownState(String),

    /// No client table is declared (or derivable) for the role.
    #[error("unknown role `{0}`")]
    UnknownRole(String),

    /// A protocol document violates a validation rule.
    #[error("invalid protocol: {0}")]
    SpecInvalid(String),
}

impl Error {
    /// Stable upper-case code, used in diagnostics and trace files.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MessageNotInInterface { .. } => "MESSAGE_NOT_IN_INTERFACE",
            Error::AffinityViolation { .. } => "AFFINITY_VIOLATION",
            Error::SubstitutionUnsafe { .. } => "SUBSTITUTION_UNSAFE",
            Error::DoubleCompletion => "DOUBLE_COMPLETION",
            Error::ProtocolBreach { .. } => "PROTOCOL_BREACH",
            Error::StateMismatch { .. } => "STATE_MISMATCH",
            Error::TableNotTotal { .. } => "TABLE_NOT_TOTAL",
            Error::KindNotEnabled { .. } => "KIND_NOT_ENABLED",
            Error::UnknownState(_) => "UNKNOWN_STATE",
            Error::UnknownRole(_) => "UNKNOWN_ROLE",
            Error::SpecInvalid(_) => "SPEC_INVALID",
        }
    }
}
