//! Dense real linear-algebra kernel.
//!
//! Everything downstream (barrier selectors, the ellipsoid engine, the
//! factorization pipelines and the certificate checker) goes through the
//! handful of primitives defined here: validated dense matrices, exactly
//! symmetric matrices, symmetric eigendecompositions, shifted resolvent
//! quadratics, norms, restricted smallest singular values and orthogonal
//! complements.
//!
//! All summations run in a fixed index order, so identical inputs produce
//! bitwise identical outputs on a given platform.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigensolver iteration cap; generous for the dense sizes this crate targets.
const EIGEN_MAX_SWEEPS: usize = 10_000;

/// A validated dense real matrix: finite entries, at least one row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    m: DMatrix<f64>,
}

impl DenseMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::InvalidInput(
                "matrix must have at least one row and one column".into(),
            ));
        }
        if let Some((i, j)) = first_nonfinite(&m) {
            return Err(Error::InvalidInput(format!(
                "matrix entry ({i}, {j}) is not finite"
            )));
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidInput("matrix must be nonempty".into()));
        }
        let ncols = rows[0].len();
        if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
            return Err(Error::InvalidInput(format!(
                "row {} has {} fields, expected {}",
                i + 1,
                rows[i].len(),
                ncols
            )));
        }
        let m = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
        Self::new(m)
    }

    /// Matrix with the given columns (all of equal dimension).
    pub fn from_columns(cols: &[DVector<f64>]) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::InvalidInput("matrix must be nonempty".into()));
        }
        Self::new(DMatrix::from_columns(cols))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn column(&self, j: usize) -> DVector<f64> {
        self.m.column(j).into_owned()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }
}

fn first_nonfinite(m: &DMatrix<f64>) -> Option<(usize, usize)> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !m[(i, j)].is_finite() {
                return Some((i, j));
            }
        }
    }
    None
}

/// A real symmetric matrix whose symmetry is exact by construction: every
/// write touches an (i, j)/(j, i) pair with the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    /// Diagonal matrix with the given entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
        }
        Self { m }
    }

    /// Forces exact symmetry on a numerically near-symmetric matrix by
    /// averaging mirrored entries.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetrize requires a square matrix");
        let n = m.nrows();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = m[(i, i)];
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Self { m: out }
    }

    /// Gram matrix U·Uᵗ. The (i, j) and (j, i) dot products run over the same
    /// index order, so the result is exactly symmetric.
    pub fn gram(u: &DenseMatrix) -> Self {
        let n = u.rows();
        let a = u.as_matrix();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..u.cols() {
                    s += a[(i, k)] * a[(j, k)];
                }
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
        }
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// A += w · v vᵗ; v_i v_j = v_j v_i exactly, so symmetry is preserved.
    pub fn add_scaled_outer(&mut self, v: &DVector<f64>, w: f64) {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                self.m[(i, j)] += w * v[i] * v[j];
            }
        }
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn hs_norm(&self) -> f64 {
        let mut s = 0.0;
        for v in self.m.iter() {
            s += v * v;
        }
        s.sqrt()
    }
}

/// Sorted symmetric eigendecomposition: eigenvalues descending, eigenvector
/// columns orthonormal and aligned with the eigenvalue order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors (columns), ordered like the eigenvalues.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// vᵗ(A − tI)⁻¹v and vᵗ(A − tI)⁻²v through the eigenbasis.
    ///
    /// Errors with a barrier collision when `t` sits on an eigenvalue within
    /// relative gap 1e-12.
    pub fn shifted_quadratics(&self, shift: f64, v: &DVector<f64>) -> Result<(f64, f64)> {
        self.check_shift(shift)?;
        let c = self.eigenvectors.tr_mul(v);
        let mut q1 = 0.0;
        let mut q2 = 0.0;
        for i in 0..self.dim() {
            let w = c[i] * c[i];
            let d = self.eigenvalues[i] - shift;
            q1 += w / d;
            q2 += w / (d * d);
        }
        Ok((q1, q2))
    }

    /// Errors when the shift collides with the spectrum.
    pub fn check_shift(&self, shift: f64) -> Result<()> {
        let scale = self
            .eigenvalues
            .iter()
            .fold(1.0_f64, |a, &l| a.max(l.abs()))
            .max(shift.abs());
        for &l in self.eigenvalues.iter() {
            if (l - shift).abs() <= 1e-12 * scale {
                return Err(Error::BarrierCollision { shift });
            }
        }
        Ok(())
    }

    /// Functional calculus: Q f(Λ) Qᵗ, returned exactly symmetric.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let q = &self.eigenvectors;
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += vals[k] * q[(i, k)] * q[(j, k)];
                }
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
        }
        SymMatrix { m }
    }
}

/// Symmetric eigendecomposition of `s`, sorted descending.
pub fn sym_eigen(s: &SymMatrix) -> Result<Spectrum> {
    let n = s.dim();
    let se = nalgebra::SymmetricEigen::try_new(s.m.clone(), f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or(Error::EigenFailed { dim: n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let eigenvalues = DVector::from_fn(n, |i, _| se.eigenvalues[order[i]]);
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Largest singular value of `u`.
pub fn operator_norm(u: &DenseMatrix) -> f64 {
    let sv = u.as_matrix().clone().singular_values();
    sv.iter().fold(0.0_f64, |a, &s| a.max(s))
}

/// Hilbert-Schmidt (Frobenius) norm: sqrt of the sum of squared entries.
pub fn hs_norm(u: &DenseMatrix) -> f64 {
    let mut s = 0.0;
    let m = u.as_matrix();
    for j in 0..u.cols() {
        for i in 0..u.rows() {
            let v = m[(i, j)];
            s += v * v;
        }
    }
    s.sqrt()
}

/// Smallest singular value of the matrix with columns Ue_j / α_j, j ∈ σ.
///
/// When |σ| exceeds the row count the restriction has a nontrivial kernel and
/// the value is 0 by definition.
pub fn smin_restricted(
    u: &DenseMatrix,
    sigma: &[usize],
    d: &crate::barrier::DiagonalWeights,
) -> Result<f64> {
    if sigma.is_empty() {
        return Err(Error::InvalidInput(
            "smin_restricted requires a nonempty index set".into(),
        ));
    }
    let mut cols = Vec::with_capacity(sigma.len());
    for &j in sigma {
        if j >= u.cols() {
            return Err(Error::InvalidInput(format!(
                "column index {j} out of range for a matrix with {} columns",
                u.cols()
            )));
        }
        let alpha = d.alpha(j);
        if alpha == 0.0 {
            return Err(Error::WeightSupportViolation { index: j });
        }
        cols.push(u.column(j) / alpha);
    }
    if cols.len() > u.rows() {
        return Ok(0.0);
    }
    let m = DMatrix::from_columns(&cols);
    let sv = m.singular_values();
    Ok(sv.iter().fold(f64::INFINITY, |a, &s| a.min(s)))
}

/// Orthonormal basis of the orthogonal complement of span(vectors) in ℝ^dim.
///
/// Deterministic: the span is orthonormalized first (rank-deficient inputs are
/// fine), then standard basis vectors are swept in index order and kept when
/// their residual against the running basis stays above the rank threshold.
/// The result has dim − rank(span) columns (possibly zero).
pub fn orth_complement_basis(dim: usize, vectors: &[DVector<f64>]) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        assert_eq!(v.len(), dim, "vector dimension mismatch");
        if let Some(q) = orthonormal_residual(&basis, v) {
            basis.push(q);
        }
    }
    let rank = basis.len();
    let mut complement: Vec<DVector<f64>> = Vec::new();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let e = DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 });
        if let Some(q) = orthonormal_residual(&basis, &e) {
            complement.push(q.clone());
            basis.push(q);
        }
    }
    debug_assert_eq!(complement.len(), dim - rank);
    if complement.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        DMatrix::from_columns(&complement)
    }
}

/// Projects `v` against `basis` (twice, for stability) and returns the
/// normalized residual, or None when `v` is numerically in the span.
fn orthonormal_residual(basis: &[DVector<f64>], v: &DVector<f64>) -> Option<DVector<f64>> {
    let original = v.norm();
    if original == 0.0 {
        return None;
    }
    let mut w = v.clone();
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(&w);
            w.axpy(-c, q, 1.0);
        }
    }
    let res = w.norm();
    if res <= 1e-8 * original.max(1.0) {
        None
    } else {
        Some(w / res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::DiagonalWeights;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.random_range(-10.0..10.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix { m }
    }

    #[test]
    fn eigen_identity() {
        let s = SymMatrix::identity(3);
        let spec = sym_eigen(&s).unwrap();
        for &l in spec.eigenvalues().iter() {
            assert_relative_eq!(l, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn eigen_diagonal() {
        let s = SymMatrix::from_diagonal(&[3.0, 1.0]);
        let spec = sym_eigen(&s).unwrap();
        assert_relative_eq!(spec.eigenvalues()[0], 3.0, max_relative = 1e-14);
        assert_relative_eq!(spec.eigenvalues()[1], 1.0, max_relative = 1e-14);
        // eigenvectors are ±e1, ±e2
        assert!(spec.eigenvectors()[(0, 0)].abs() > 1.0 - 1e-12);
        assert!(spec.eigenvectors()[(1, 1)].abs() > 1.0 - 1e-12);
    }

    #[test]
    fn eigen_reconstruction_residual() {
        // oracle: rebuild QΛQᵗ and compare against the input
        for seed in 0..5 {
            let s = random_sym(6, seed);
            let spec = sym_eigen(&s).unwrap();
            let rebuilt = spec.map(|l| l);
            let mut diff = 0.0;
            for i in 0..6 {
                for j in 0..6 {
                    let d = rebuilt.entry(i, j) - s.entry(i, j);
                    diff += d * d;
                }
            }
            assert!(diff.sqrt() <= 1e-11 * s.hs_norm().max(1.0));
        }
    }

    #[test]
    fn eigen_orthonormality_and_scale_sweep() {
        // invariant sweep: residual and QᵗQ = I across dimensions up to 64
        for &n in &[2usize, 8, 24, 64] {
            let s = random_sym(n, 7 + n as u64);
            let spec = sym_eigen(&s).unwrap();
            let q = spec.eigenvectors();
            let qtq = q.tr_mul(q);
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((qtq[(i, j)] - target).abs() <= 1e-12 * n as f64);
                }
            }
            let rebuilt = spec.map(|l| l);
            let mut diff = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let d = rebuilt.entry(i, j) - s.entry(i, j);
                    diff += d * d;
                }
            }
            assert!(diff.sqrt() <= 1e-11 * s.hs_norm());
        }
    }

    #[test]
    fn shifted_quadratics_zero_matrix() {
        let spec = sym_eigen(&SymMatrix::zeros(2)).unwrap();
        let v = DVector::from_vec(vec![1.0, 0.0]);
        let (q1, q2) = spec.shifted_quadratics(-1.0, &v).unwrap();
        assert_relative_eq!(q1, 1.0, max_relative = 1e-14);
        assert_relative_eq!(q2, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn shifted_quadratics_kernel_case() {
        // A = 0, t = b > 0: q1 = -w/b, q2 = w/b² with w = ‖v‖²
        let spec = sym_eigen(&SymMatrix::zeros(3)).unwrap();
        let v = DVector::from_vec(vec![1.0, 2.0, -2.0]);
        let w = 9.0;
        let b = 0.35;
        let (q1, q2) = spec.shifted_quadratics(b, &v).unwrap();
        assert_relative_eq!(q1, -w / b, max_relative = 1e-13);
        assert_relative_eq!(q2, w / (b * b), max_relative = 1e-13);
    }

    #[test]
    fn shifted_quadratics_two_by_two() {
        let spec = sym_eigen(&SymMatrix::from_diagonal(&[2.0, 0.0])).unwrap();
        let v = DVector::from_vec(vec![1.0, 1.0]);
        let (q1, q2) = spec.shifted_quadratics(1.0, &v).unwrap();
        assert_relative_eq!(q1, 0.0, epsilon = 1e-14);
        assert_relative_eq!(q2, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn shifted_quadratics_positive_for_negative_shift() {
        for seed in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let raw = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-2.0..2.0));
            let psd = SymMatrix::symmetrize(&(&raw * raw.transpose()));
            let spec = sym_eigen(&psd).unwrap();
            let v = DVector::from_fn(5, |i, _| (i as f64 + 1.0) / 3.0);
            let (q1, q2) = spec.shifted_quadratics(-0.7, &v).unwrap();
            assert!(q1 > 0.0);
            assert!(q2 > 0.0);
        }
    }

    #[test]
    fn shift_collision_rejected() {
        let spec = sym_eigen(&SymMatrix::from_diagonal(&[2.0, 1.0])).unwrap();
        assert!(matches!(
            spec.shifted_quadratics(2.0, &DVector::from_vec(vec![1.0, 0.0])),
            Err(Error::BarrierCollision { .. })
        ));
    }

    #[test]
    fn operator_norm_examples() {
        assert_relative_eq!(operator_norm(&DenseMatrix::identity(4)), 1.0, max_relative = 1e-12);
        let dup = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_relative_eq!(operator_norm(&dup), 2.0_f64.sqrt(), max_relative = 1e-12);
        let zero = DenseMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(operator_norm(&zero), 0.0);
    }

    #[test]
    fn hs_norm_examples() {
        assert_relative_eq!(hs_norm(&DenseMatrix::identity(4)), 2.0, max_relative = 1e-14);
        let ones = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_relative_eq!(hs_norm(&ones), 2.0, max_relative = 1e-14);
        // column-norm formula agrees with the entrywise sum
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = DMatrix::from_fn(3, 5, |_, _| rng.random_range(-4.0..4.0));
        let u = DenseMatrix::new(m.clone()).unwrap();
        let colsum: f64 = (0..5).map(|j| m.column(j).norm_squared()).sum();
        assert_relative_eq!(hs_norm(&u), colsum.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn norm_ordering_invariant() {
        // ‖U‖² ≤ ‖U‖²_HS ≤ rank·‖U‖² on random matrices
        for seed in 0..6 {
            let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
            let m = DMatrix::from_fn(4, 7, |_, _| rng.random_range(-3.0..3.0));
            let u = DenseMatrix::new(m).unwrap();
            let op2 = operator_norm(&u).powi(2);
            let hs2 = hs_norm(&u).powi(2);
            let rank = 4.0; // full row rank almost surely
            assert!(op2 <= hs2 * (1.0 + 1e-12));
            assert!(hs2 <= rank * op2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn smin_restricted_examples() {
        let id = DenseMatrix::identity(4);
        let w = DiagonalWeights::identity(4);
        assert_relative_eq!(smin_restricted(&id, &[0, 1], &w).unwrap(), 1.0, max_relative = 1e-12);

        // columns e1 and e1+e2: Gram eigenvalues (3±√5)/2
        let u = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let w2 = DiagonalWeights::identity(2);
        let expected = ((3.0 - 5.0_f64.sqrt()) / 2.0).sqrt();
        assert_relative_eq!(
            smin_restricted(&u, &[0, 1], &w2).unwrap(),
            expected,
            max_relative = 1e-12
        );

        // single column: the column norm
        let single = smin_restricted(&u, &[1], &w2).unwrap();
        assert_relative_eq!(single, 2.0_f64.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn smin_restricted_errors() {
        let id = DenseMatrix::identity(3);
        let w = DiagonalWeights::identity(3);
        assert!(smin_restricted(&id, &[], &w).is_err());
        let wz = DiagonalWeights::new(vec![1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            smin_restricted(&id, &[1], &wz),
            Err(Error::WeightSupportViolation { index: 1 })
        ));
    }

    #[test]
    fn smin_restricted_matches_random_unit_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m = DMatrix::from_fn(5, 8, |_, _| rng.random_range(-2.0..2.0));
        let u = DenseMatrix::new(m).unwrap();
        let w = DiagonalWeights::identity(8);
        let sigma = [0usize, 2, 4, 6];
        let smin = smin_restricted(&u, &sigma, &w).unwrap();
        let cols: Vec<DVector<f64>> = sigma.iter().map(|&j| u.column(j)).collect();
        let restricted = DMatrix::from_columns(&cols);
        for _ in 0..10_000 {
            let mut x = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
            let n = x.norm();
            if n == 0.0 {
                continue;
            }
            x /= n;
            assert!((&restricted * x).norm() >= smin - 1e-9);
        }
    }

    #[test]
    fn complement_basis_examples() {
        // {e1} in R²: complement is ±e2
        let b = orth_complement_basis(2, &[DVector::from_vec(vec![1.0, 0.0])]);
        assert_eq!(b.ncols(), 1);
        assert!(b[(1, 0)].abs() > 1.0 - 1e-12);

        // empty input in R³: a full orthonormal basis
        let b3 = orth_complement_basis(3, &[]);
        assert_eq!(b3.ncols(), 3);

        // {(1,1,0),(0,1,1)}: complement spanned by (1,-1,1)/√3 (cross-product check)
        let b1 = orth_complement_basis(
            3,
            &[
                DVector::from_vec(vec![1.0, 1.0, 0.0]),
                DVector::from_vec(vec![0.0, 1.0, 1.0]),
            ],
        );
        assert_eq!(b1.ncols(), 1);
        let expected = DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3.0_f64.sqrt();
        let dot = b1.column(0).dot(&expected);
        assert_relative_eq!(dot.abs(), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn complement_basis_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let vecs: Vec<DVector<f64>> = (0..3)
            .map(|_| DVector::from_fn(6, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let b = orth_complement_basis(6, &vecs);
        assert_eq!(b.ncols(), 3);
        for c in 0..b.ncols() {
            for v in &vecs {
                assert!(b.column(c).dot(v).abs() <= 1e-10 * v.norm());
            }
            for c2 in 0..b.ncols() {
                let target = if c == c2 { 1.0 } else { 0.0 };
                assert!((b.column(c).dot(&b.column(c2)) - target).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn dense_matrix_validation() {
        assert!(DenseMatrix::from_rows(&[vec![1.0], vec![f64::NAN]]).is_err());
        assert!(DenseMatrix::from_rows(&[]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }
}
