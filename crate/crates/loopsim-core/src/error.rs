use alloc::string::String;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("capacity exceeded: {requested} qubits requested, limit is {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("measurement branch has zero probability")]
    BranchImpossible,

    #[error("protocol order violated: {0}")]
    ProtocolOrder(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no data: {0}")]
    EmptyData(&'static str),

    #[error("singular limit: {0}")]
    SingularLimit(&'static str),

    #[error("Y-measurement outcomes of photon {photon} are not related by a local Pauli correction")]
    OutcomeAsymmetry { photon: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Shorthand for argument errors with a formatted message.
macro_rules! arg_err {
    ($($t:tt)*) => {
        $crate::Error::Argument(alloc::format!($($t)*))
    };
}
pub(crate) use arg_err;
