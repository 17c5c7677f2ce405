//! Error types shared by every module of the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside its documented range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The symmetric eigensolver did not converge within its iteration cap.
    #[error("symmetric eigendecomposition failed to converge for a {dim}x{dim} matrix")]
    EigenFailed { dim: usize },

    /// A spectral shift landed on (or numerically indistinguishably close to)
    /// an eigenvalue, so the shifted resolvent is undefined.
    #[error("barrier collision: shift {shift} meets an eigenvalue within relative gap 1e-12")]
    BarrierCollision { shift: f64 },

    /// A selected index carries a zero diagonal weight.
    #[error("weight support violation: column {index} has zero weight")]
    WeightSupportViolation { index: usize },

    /// Ker(D) ⊂ Ker(U) fails: some columns outside the weight support are
    /// nonzero in U.
    #[error("kernel compatibility violated for columns {columns:?}: weights vanish but the matrix columns do not")]
    KernelCompatibility { columns: Vec<usize> },

    /// The selector could not take a step that exact arithmetic guarantees.
    #[error("numerical breakdown during selection at step {step}: {detail}")]
    NumericalBreakdown { step: usize, detail: String },

    /// The input points do not span the ambient space.
    #[error("body not full-dimensional: point set does not span R^{dim}")]
    DegenerateBody { dim: usize },

    /// The ellipsoid iteration hit its cap before reaching the tolerance.
    #[error("ellipsoid iteration cap {max_iter} reached with gap {gap:.3e} (tolerance {tol:.3e})")]
    IterationCap { max_iter: usize, gap: f64, tol: f64 },

    /// The second-moment matrix of the kept contact points is singular.
    #[error("whitening failed: second-moment matrix is numerically singular")]
    SingularWhitening,

    /// An identity decomposition violates its residual thresholds.
    #[error("invalid identity decomposition: {detail}")]
    DecompositionInvalid { detail: String },

    /// A certificate is structurally unusable (wrong kind, bad indices, ...).
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// CSV / JSON ingestion problems, with position information.
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
}
