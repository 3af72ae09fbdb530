//! Finite-dimensional quantum state and channel simulation for checking
//! no-signaling claims.
//!
//! The crate is `no_std` and only needs `alloc`. It contains dense complex
//! linear algebra ([`linalg`]), pure states and density operators over
//! labeled tensor factors ([`state`]), Kraus-form local operations with
//! Choi-matrix complete-positivity tests ([`channel`]), path-mode linear
//! optics ([`optics`]), marginal-invariance checks ([`nosig`]) and the
//! end-to-end signaling scenarios built on top of them ([`scenario`]).
//!
//! Basis orderings are fixed crate-wide:
//!
//! | factor            | index 0 | index 1 |
//! |-------------------|---------|---------|
//! | photon 1 (source) | `a`     | `b`     |
//! | photon 1 (detect) | `h`     | `g`     |
//! | photon 2 (source) | `a'`    | `b'`    |
//! | photon 2 (detect) | `c'`    | `d'`    |
//! | phase shifter     | `u`     | `v`     |
//! | spin              | `↑`     | `↓`     |
//! | position          | `⇓`     | `⇑`     |
#![no_std]
// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod error;
pub mod linalg;
pub mod nosig;
pub mod optics;
pub mod scenario;
pub mod state;

pub use channel::{ChannelKind, ChannelReport, GreenbergerMap, KrausChannel, LinearMap};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DimensionSpec, C64};
pub use nosig::{ObstructionReport, TargetTransform};
pub use optics::{Element, OpticalNetwork};
pub use scenario::ScenarioReport;
pub use state::{DensityOperator, PureState};

/// Numerical tolerances shared by every module.
pub mod tol {
    /// Maximum |m - m†| entry for a matrix to count as Hermitian.
    pub const HERMITIAN: f64 = 1e-10;
    /// Allowed deviation of a squared norm or trace from one.
    pub const NORMALIZATION: f64 = 1e-10;
    /// Most negative eigenvalue accepted as positive semidefinite.
    pub const PSD: f64 = 1e-9;
    /// Residual allowed in Kraus completeness and projector sums.
    pub const COMPLETENESS: f64 = 1e-9;
    /// Off-diagonal Frobenius mass at which Jacobi sweeps stop.
    pub const JACOBI: f64 = 1e-12;
    /// Probabilities and traces below this are treated as zero.
    pub const VANISHING: f64 = 1e-12;
    /// Marginal distance below which two reduced states coincide.
    pub const MARGINAL: f64 = 1e-9;
}
