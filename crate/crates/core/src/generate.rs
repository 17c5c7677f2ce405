//! Seeded generators for matrices and the named example bodies, so test
//! suites and the `gen` subcommand are self-contained and reproducible.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::barrier::DiagonalWeights;
use crate::error::Result;
use crate::john::{JohnDecomposition, PointSet};
use crate::linalg::{orth_complement_basis, DenseMatrix};

/// n×m matrix with independent standard normal entries.
pub fn gaussian_matrix(n: usize, m: usize, seed: u64) -> Result<DenseMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mat = DMatrix::from_fn(n, m, |_, _| StandardNormal.sample(&mut rng));
    DenseMatrix::new(mat)
}

/// Positive diagonal weights drawn uniformly from [0.5, 2].
pub fn random_positive_weights(m: usize, seed: u64) -> Result<DiagonalWeights> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DiagonalWeights::new((0..m).map(|_| rng.random_range(0.5..2.0)).collect())
}

/// The 2n signed standard basis vectors ±e_i.
pub fn cross_polytope_points(n: usize) -> Result<PointSet> {
    let mut pts = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            pts.push(DVector::from_fn(n, |r, _| if r == i { s } else { 0.0 }));
        }
    }
    PointSet::new(pts, true)
}

/// Exact identity decomposition of the cross-polytope contact structure:
/// points ±e_i with weight 1/2 each.
pub fn cross_polytope_decomposition(n: usize) -> Result<JohnDecomposition> {
    let ps = cross_polytope_points(n)?;
    JohnDecomposition::new(ps.points().to_vec(), vec![0.5; 2 * n])
}

/// Vertices of the regular simplex in ℝⁿ: n+1 unit vectors with pairwise
/// inner product −1/n. Built by centering the standard basis of ℝ^{n+1} and
/// rotating the spanning hyperplane down to ℝⁿ.
pub fn simplex_points(n: usize) -> Result<PointSet> {
    let np1 = n + 1;
    let ones = DVector::from_element(np1, 1.0);
    let basis = orth_complement_basis(np1, &[ones]); // (n+1)×n, orthonormal ⊥ 1
    let center = 1.0 / np1 as f64;
    let mut pts = Vec::with_capacity(np1);
    for i in 0..np1 {
        let centered = DVector::from_fn(np1, |r, _| {
            if r == i {
                1.0 - center
            } else {
                -center
            }
        });
        let mut coords = basis.tr_mul(&centered);
        let norm = coords.norm();
        coords /= norm;
        pts.push(coords);
    }
    PointSet::new(pts, false)
}

/// The simplex identity decomposition: vertex weights n/(n+1).
pub fn simplex_decomposition(n: usize) -> Result<JohnDecomposition> {
    let ps = simplex_points(n)?;
    let c = n as f64 / (n + 1) as f64;
    JohnDecomposition::new(ps.points().to_vec(), vec![c; n + 1])
}

/// m random unit directions; the body is their symmetric convex hull.
pub fn random_symmetric_polytope(n: usize, m: usize, seed: u64) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<DVector<f64>> = (0..m)
        .map(|_| {
            loop {
                let mut v =
                    DVector::from_fn(n, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
                let norm = v.norm();
                if norm > 1e-8 {
                    v /= norm;
                    return v;
                }
            }
        })
        .collect();
    PointSet::new(pts, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_is_seed_deterministic() {
        let a = gaussian_matrix(4, 6, 9).unwrap();
        let b = gaussian_matrix(4, 6, 9).unwrap();
        assert_eq!(a, b);
        let c = gaussian_matrix(4, 6, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn simplex_geometry() {
        let ps = simplex_points(6).unwrap();
        assert_eq!(ps.len(), 7);
        for (i, p) in ps.points().iter().enumerate() {
            assert_relative_eq!(p.norm(), 1.0, max_relative = 1e-12);
            for q in ps.points().iter().skip(i + 1) {
                assert_relative_eq!(p.dot(q), -1.0 / 6.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cross_polytope_decomposition_is_exact() {
        let d = cross_polytope_decomposition(4).unwrap();
        let report = crate::john::validate_decomposition(&d);
        assert_eq!(report.identity_residual, 0.0);
        assert_eq!(report.trace_defect, 0.0);
    }
}
