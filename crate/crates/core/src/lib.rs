//! Exact left-invertibility diagnostics for rank-one perturbations of shift
//! isometries and diagonal operators.
//!
//! Vectors are eventually-geometric sequences in ℓ², so every inner product
//! and norm the diagnostics need is a closed-form finite sum. The `oracle`
//! module checks verdicts against dense truncations.

pub mod analytic;
pub mod batch;
pub mod diagonal;
pub mod hardy;
pub mod operators;
pub mod oracle;
pub mod perturbation;
pub mod probe;
pub mod seq;

pub use operators::{OperatorError, OperatorExpr};
pub use perturbation::{PerturbationDiagnostics, Verdict};
pub use seq::{Complex, DiagonalSymbol, GeomTail, GeomTailSeq, SeqError};
