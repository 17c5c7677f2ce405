//! Deterministic column selection and factorization certificates.
//!
//! The toolkit extracts well-conditioned column subsets of dense matrices and
//! turns convex bodies in John position into explicit factorizations, each
//! run emitting a machine-checkable certificate:
//!
//! * [`barrier::ri_select`] — restricted invertibility: a subset σ with
//!   s_min(U_σ D_σ⁻¹) > ε‖U‖_HS/‖D‖_HS at the proportional size
//!   ⌊(1−ε)²‖U‖²_HS/‖U‖²⌋, found by a lower-barrier potential walk.
//! * [`barrier::kt_select`] — norm-bounded selection: ⌈λm⌉ columns with
//!   ‖U_σ‖ controlled by √λ‖U‖ + ‖U‖_HS/√m, found by an upper-barrier walk.
//! * [`john::mvee`] / [`john::whiten_decomposition`] — minimum-volume
//!   enclosing ellipsoid of a symmetric point set and an exact identity
//!   decomposition Σ c_j x_j x_jᵗ = I from its contact structure.
//! * [`factorize`] — proportional factorizations (symmetric and
//!   nonsymmetric) and the distance-to-the-cube basis with a certified
//!   lower constant.
//! * [`certify`] — independent re-verification of certificates plus
//!   exhaustive subset oracles at desk scale.
//!
//! Everything is deterministic: identical inputs produce bitwise identical
//! certificates.

pub mod barrier;
pub mod certify;
pub mod cli;
pub mod error;
pub mod factorize;
pub mod generate;
pub mod john;
pub mod linalg;

pub use barrier::{
    kt_select, ri_select, CertKind, CertParams, DiagonalWeights, SelectionCertificate, StepRecord,
};
pub use error::{Error, Result};
pub use factorize::{cube_basis, dr_nonsymmetric, dr_symmetric, optimize_eps};
pub use john::{mvee, validate_decomposition, whiten_decomposition, JohnDecomposition, PointSet};
pub use linalg::{DenseMatrix, Spectrum, SymMatrix};
