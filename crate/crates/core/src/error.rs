use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid dimension spec: {0}")]
    InvalidDimensions(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("invalid keep set: {0}")]
    InvalidKeepSet(String),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("matrix is not Hermitian (max |m - m†| = {0:e})")]
    NotHermitian(f64),
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("invalid density operator: {0}")]
    InvalidDensity(String),
    #[error("invalid projector set: {0}")]
    InvalidProjectors(String),
    #[error("channel kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("vanishing success probability ({0:e})")]
    VanishingProbability(f64),
    #[error("operator is not a contraction (largest eigenvalue of K†K is {0})")]
    NotContraction(f64),
    #[error("map annihilates its input (trace {0:e})")]
    Annihilated(f64),
    #[error("non-unitary element: {0}")]
    NonUnitary(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("outcome index {index} out of range for {count} outcomes")]
    OutcomeOutOfRange { index: usize, count: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
}
