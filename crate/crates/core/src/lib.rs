//! Entanglement-based information measures on block-decomposable operator
//! algebras: compound states, couplings, q-entropy, and channel capacities.
//!
//! The crate is organised bottom-up:
//!
//! * [`matcore`] — dense complex matrix kernel (Kronecker products, partial
//!   traces, Hermitian spectral calculus, the tilde/transpose operation).
//! * [`algebra`] — block-diagonal algebras `B = ⊕ L(H_i)` and their normal
//!   states.
//! * [`coupling`] — amplitude operators, compound densities, and the
//!   standard / diagonal / separable couplings with CP/TCP classification.
//! * [`infomeasure`] — von Neumann and Belavkin–Staszewski entropies,
//!   entangled and total information, q-entropy and q-conditional entropy.
//! * [`channel`] — trace-preserving CP maps in Kraus form, their duals,
//!   tensor powers, and the push of couplings through a channel.
//! * [`capacity`] — the channel informations I_q, I_c, I_s and the
//!   q-/c-capacities via multi-start derivative-free optimization.
//! * [`sampling`] — seeded random states, channels, and couplings used by
//!   the optimizer, the test suites, and the benchmarks.
//!
//! All entropies and informations are natural-log quantities (nats).

pub mod algebra;
pub mod capacity;
pub mod channel;
pub mod coupling;
pub mod infomeasure;
pub mod matcore;
pub mod sampling;

pub use algebra::{AlgebraState, BlockShape};
pub use capacity::{CapacityReport, OptimizerConfig, PureDecomposition};
pub use channel::Channel;
pub use coupling::{AmplitudeOperator, Coupling, CouplingClass, Ensemble, Factor};
pub use infomeasure::InfoReport;
pub use matcore::{CMatrix, Spectrum};

use thiserror::Error;

/// Default guard on the total embedded dimension of any constructed object.
pub const DEFAULT_MAX_DIM: usize = 256;

/// Relative support cutoff: eigenvalues at or below `EPS_SUPPORT * λ_max`
/// count as zero in ranks, pseudo-inverses, and logarithms.
pub const EPS_SUPPORT: f64 = 1e-10;

/// Relative Hermiticity tolerance: `‖m − m†‖ ≤ TOL_HERM * ‖m‖`.
pub const TOL_HERM: f64 = 1e-9;

/// Relative positive-semidefiniteness slack on eigenvalues.
pub const TOL_PSD: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },
    #[error("matrix entries must be finite")]
    NonFiniteEntry,
    #[error("entry count {got} does not match {rows}x{cols}")]
    BadEntryCount { rows: usize, cols: usize, got: usize },
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e}")]
    NotPsd { eigenvalue: f64 },
    #[error("eigensolver failed to converge")]
    EigenFailed,
    #[error("trace must be 1: got {0}")]
    NotNormalized(f64),
    #[error("amplitude operator is not normalized: Tr υ†υ = {0}")]
    AmplitudeNotNormalized(f64),
    #[error("Kraus set is not trace preserving: deviation {0:.3e}")]
    NotTracePreserving(f64),
    #[error("operator is not an isometry: deviation {0:.3e}")]
    NotIsometry(f64),
    #[error("ensemble must be nonempty")]
    EmptyEnsemble,
    #[error("ensemble weights must be nonnegative and sum to 1: got sum {0}")]
    BadWeights(f64),
    #[error("ensemble average does not match the declared state: deviation {0:.3e}")]
    AverageMismatch(f64),
    #[error("density is not a member of the block algebra: deviation {0:.3e}")]
    NotAlgebraMember(f64),
    #[error("marginal does not match the given state: deviation {0:.3e}")]
    MarginalMismatch(f64),
    #[error("block shapes do not match ({context})")]
    ShapeMismatch { context: &'static str },
    #[error("tensor powers require simple (single-block) algebras")]
    NotSimpleAlgebra,
    #[error("dimension {dim} exceeds the limit {limit}")]
    DimensionGuard { dim: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
