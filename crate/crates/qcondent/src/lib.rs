//! Measurement-conditioned entropy and accessible mutual information for
//! finite-dimensional bipartite quantum states.
//!
//! For a joint state `rho(A,B)` and a POVM measured on B, the conditional
//! entropy `H(A|beta)` averages the von Neumann entropy of the post-outcome
//! states of A. Minimizing it over measurements gives the conditional
//! entropy `H(A|B)`; maximizing the classical mutual information of outcome
//! pairs over measurements on both sides gives the accessible mutual
//! information `I(A;B)`. This crate computes certified one-sided bounds on
//! both, and ships a verification harness for the entropy inequalities that
//! relate them:
//!
//! | Quantity | Relation checked |
//! |----------|------------------|
//! | `H(A,B)` vs outcomes | `H(A,B) <= H(alpha, beta)` |
//! | conditioning | `H(A|B) <= H(A)` |
//! | subadditivity | `H(A,B) <= H(B) + H(A|beta)` |
//! | information cap | `I(A;B) <= H(A) - H(A|B)` |
//!
//! Entropies are in bits throughout. The `parallel` feature (on by default)
//! runs optimizer restarts and verification sweeps on a rayon pool; the
//! sequential fallback produces bit-identical results.

pub mod io;
pub mod matkernel;
pub mod measure;
pub mod optimize;
pub mod qstate;
pub mod verify;

mod exec;

pub use matkernel::{CMatrix, CVector, MatError, Spectrum, Subsystem};
pub use measure::{
    JointOutcomeTable, MeasureError, NaimarkDilation, OutcomeDistribution, Povm,
};
pub use optimize::{
    BoundKind, OptimizationResult, OptimizeError, OptimizerConfig, PovmParams,
};
pub use qstate::{DensityMatrix, Ensemble, StateError};
pub use verify::{CheckReport, SweepConfig, SweepOutcome, SweepSummary, VerifyError};
