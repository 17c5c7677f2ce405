//! John-position engine: minimum-volume enclosing ellipsoid of a symmetric
//! point set and extraction of an exact identity decomposition
//! Σ c_j x_j x_jᵗ = I from its contact structure.
//!
//! The ellipsoid solver is a barycentric coordinate-ascent on the weights
//! (Khachiyan's update with away steps), run directly on the ± closure: the
//! centered formulation only sees x xᵗ, so signs never enter. Away steps let
//! non-contact weights reach zero instead of merely decaying.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, SymMatrix};

/// A finite point set; with `symmetric` set the intended body is conv(±points).
#[derive(Debug, Clone)]
pub struct PointSet {
    dim: usize,
    points: Vec<DVector<f64>>,
    symmetric: bool,
}

impl PointSet {
    pub fn new(points: Vec<DVector<f64>>, symmetric: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point set must be nonempty".into()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("points must have dimension >= 1".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("point {i} is not finite")));
            }
            if p.norm() == 0.0 {
                return Err(Error::InvalidInput(format!("point {i} is zero")));
            }
        }
        Ok(Self {
            dim,
            points,
            symmetric,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }
}

/// (1+tol)-approximate minimum-volume enclosing ellipsoid {x : xᵗMx ≤ 1}
/// of conv(±points), with the barycentric weights that produced it.
#[derive(Debug, Clone)]
pub struct MveeResult {
    pub shape: SymMatrix,
    /// Nonnegative weights over the input points, summing to one.
    pub weights: Vec<f64>,
    /// Indices whose weight exceeds the contact threshold 1e-9·n/m.
    pub contact_indices: Vec<usize>,
    pub iterations: usize,
    pub final_gap: f64,
    pub tol: f64,
}

/// Contact points x_j (unit up to the solver tolerance) and weights c_j > 0
/// with Σ c_j x_j x_jᵗ = I up to floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct JohnDecomposition {
    pub points: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
}

/// Residuals of an identity decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionReport {
    /// ‖Σ c_j x_j x_jᵗ − I‖_HS
    pub identity_residual: f64,
    /// Σ c_j − n
    pub trace_defect: f64,
    /// max_j |‖x_j‖₂ − 1|
    pub max_norm_defect: f64,
}

impl JohnDecomposition {
    pub fn new(points: Vec<DVector<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidInput(
                "decomposition needs matching nonempty points and weights".into(),
            ));
        }
        let dim = points[0].len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::InvalidInput("points must share one dimension".into()));
            }
        }
        if weights.iter().any(|&c| !(c.is_finite() && c > 0.0)) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        Ok(Self { points, weights })
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Checks the invariants that the factorization pipelines rely on:
    /// identity residual ≤ 1e-10·n, trace defect ≤ 1e-8, near-unit points.
    pub fn ensure_valid(&self) -> Result<()> {
        let n = self.dim() as f64;
        let report = validate_decomposition(self);
        if report.identity_residual > 1e-10 * n {
            return Err(Error::DecompositionInvalid {
                detail: format!(
                    "identity residual {:.3e} exceeds {:.3e}",
                    report.identity_residual,
                    1e-10 * n
                ),
            });
        }
        if report.trace_defect.abs() > 1e-8 {
            return Err(Error::DecompositionInvalid {
                detail: format!("weight sum misses the dimension by {:.3e}", report.trace_defect),
            });
        }
        if report.max_norm_defect > 1e-8 {
            return Err(Error::DecompositionInvalid {
                detail: format!(
                    "a point deviates from unit norm by {:.3e}",
                    report.max_norm_defect
                ),
            });
        }
        Ok(())
    }
}

/// Residual report for an identity decomposition.
pub fn validate_decomposition(d: &JohnDecomposition) -> DecompositionReport {
    let n = d.dim();
    let mut sum = SymMatrix::zeros(n);
    for (p, &c) in d.points.iter().zip(&d.weights) {
        sum.add_scaled_outer(p, c);
    }
    let mut residual = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            let diff = sum.entry(i, j) - target;
            residual += diff * diff;
        }
    }
    let trace_defect = d.weights.iter().sum::<f64>() - n as f64;
    let max_norm_defect = d
        .points
        .iter()
        .map(|p| (p.norm() - 1.0).abs())
        .fold(0.0_f64, f64::max);
    DecompositionReport {
        identity_residual: residual.sqrt(),
        trace_defect,
        max_norm_defect,
    }
}

/// Minimum-volume enclosing ellipsoid of conv(±points).
///
/// Coordinate ascent on the log-volume dual: each iteration either pushes
/// weight toward the point sticking out the most (g_j > n) or pulls weight
/// away from a supported point that has sunk inside (g_j < n), with an exact
/// line search. Stops when both violations are within `tol`.
pub fn mvee(ps: &PointSet, tol: f64, max_iter: usize) -> Result<MveeResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    let n = ps.dim();
    let m = ps.len();
    let nf = n as f64;
    let points = ps.points();

    let mut u = vec![1.0 / m as f64; m];
    let mut lambda = second_moment(points, &u, n);

    // span check on the uniform-weight second moment
    {
        let spec = sym_eigen(&lambda)?;
        if spec.lambda_min() <= 1e-12 * spec.lambda_max().max(1e-300) {
            return Err(Error::DegenerateBody { dim: n });
        }
    }

    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut g = vec![0.0; m];
    while iterations < max_iter {
        let inv = match nalgebra::Cholesky::new(lambda.as_matrix().clone()) {
            Some(chol) => chol.inverse(),
            None => {
                // drift guard: rebuild from the weights and retry once
                lambda = second_moment(points, &u, n);
                nalgebra::Cholesky::new(lambda.as_matrix().clone())
                    .ok_or(Error::DegenerateBody { dim: n })?
                    .inverse()
            }
        };
        for (j, p) in points.iter().enumerate() {
            g[j] = p.dot(&(&inv * p));
        }

        let mut i_plus = 0;
        let mut g_plus = f64::NEG_INFINITY;
        let mut i_minus = usize::MAX;
        let mut g_minus = f64::INFINITY;
        for j in 0..m {
            if g[j] > g_plus {
                g_plus = g[j];
                i_plus = j;
            }
            if u[j] > 0.0 && g[j] < g_minus {
                g_minus = g[j];
                i_minus = j;
            }
        }
        let eps_plus = g_plus / nf - 1.0;
        let eps_minus = 1.0 - g_minus / nf;
        gap = eps_plus.max(eps_minus);
        if gap <= tol {
            break;
        }

        let (i, beta) = if eps_plus >= eps_minus {
            let gi = g_plus;
            (i_plus, (gi - nf) / (nf * (gi - 1.0)))
        } else {
            let gi = g_minus;
            let lower = -u[i_minus] / (1.0 - u[i_minus]);
            let beta = if gi > 1.0 + 1e-14 {
                ((gi - nf) / (nf * (gi - 1.0))).max(lower)
            } else {
                lower
            };
            // keep the updated moment matrix safely nonsingular
            let mut beta = beta;
            while 1.0 + beta * (gi - 1.0) <= 1e-12 {
                beta *= 0.5;
            }
            (i_minus, beta)
        };

        for w in u.iter_mut() {
            *w *= 1.0 - beta;
        }
        u[i] += beta;
        if u[i] < 0.0 {
            u[i] = 0.0;
        }
        let mut next = lambda.as_matrix() * (1.0 - beta);
        let p = &points[i];
        for r in 0..n {
            for c in 0..n {
                next[(r, c)] += beta * p[r] * p[c];
            }
        }
        lambda = SymMatrix::symmetrize(&next);
        if iterations % 256 == 255 {
            lambda = second_moment(points, &u, n);
        }
        iterations += 1;
    }
    if gap > tol {
        return Err(Error::IterationCap {
            max_iter,
            gap,
            tol,
        });
    }

    // final shape from a fresh rebuild: M = Λ⁻¹/n
    lambda = second_moment(points, &u, n);
    let spec = sym_eigen(&lambda)?;
    if spec.lambda_min() <= 0.0 {
        return Err(Error::DegenerateBody { dim: n });
    }
    let shape = spec.map(|l| 1.0 / (nf * l));

    let threshold = 1e-9 * nf / m as f64;
    let contact_indices = (0..m).filter(|&j| u[j] > threshold).collect();
    Ok(MveeResult {
        shape,
        weights: u,
        contact_indices,
        iterations,
        final_gap: gap,
        tol,
    })
}

fn second_moment(points: &[DVector<f64>], u: &[f64], n: usize) -> SymMatrix {
    let mut s = SymMatrix::zeros(n);
    for (p, &w) in points.iter().zip(u) {
        if w > 0.0 {
            s.add_scaled_outer(p, w);
        }
    }
    s
}

/// Turns an approximate ellipsoid solution into an exact identity
/// decomposition.
///
/// With y_j = M^{1/2}x_j and c̃_j = n·u_j over the kept weights, the whitening
/// S = Σ c̃_j y_j y_jᵗ is inverted so that x_j' = S^{-1/2}y_j/‖S^{-1/2}y_j‖
/// and c_j' = c̃_j‖S^{-1/2}y_j‖² satisfy Σ c_j' x_j' x_j'ᵗ = I up to floating
/// point, at the cost of moving the points by O(tol).
pub fn whiten_decomposition(res: &MveeResult, ps: &PointSet) -> Result<JohnDecomposition> {
    let n = ps.dim();
    let nf = n as f64;
    let m = ps.len();
    if res.weights.len() != m {
        return Err(Error::InvalidInput(
            "ellipsoid result does not match the point set".into(),
        ));
    }
    let threshold = 1e-9 * nf / m as f64;
    let shape_spec = sym_eigen(&res.shape)?;
    if shape_spec.lambda_min() <= 0.0 {
        return Err(Error::SingularWhitening);
    }
    let m_sqrt = shape_spec.map(|l| l.sqrt());

    let mut kept: Vec<(DVector<f64>, f64)> = Vec::new();
    for (j, p) in ps.points().iter().enumerate() {
        let w = res.weights[j];
        if w > threshold {
            kept.push((m_sqrt.as_matrix() * p, nf * w));
        }
    }
    if kept.is_empty() {
        return Err(Error::SingularWhitening);
    }

    let mut s = SymMatrix::zeros(n);
    for (y, c) in &kept {
        s.add_scaled_outer(y, *c);
    }
    let s_spec = sym_eigen(&s)?;
    if s_spec.lambda_min() <= 1e-14 * s_spec.lambda_max().max(1.0) {
        return Err(Error::SingularWhitening);
    }
    let s_inv_sqrt = s_spec.map(|l| 1.0 / l.sqrt());

    let mut points = Vec::with_capacity(kept.len());
    let mut weights = Vec::with_capacity(kept.len());
    for (y, c) in &kept {
        let w = s_inv_sqrt.as_matrix() * y;
        let norm = w.norm();
        points.push(&w / norm);
        weights.push(c * norm * norm);
    }
    JohnDecomposition::new(points, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn signed_axes(n: usize, scale: f64) -> PointSet {
        let mut pts = Vec::new();
        for i in 0..n {
            for s in [1.0, -1.0] {
                pts.push(DVector::from_fn(n, |r, _| {
                    if r == i {
                        s * scale
                    } else {
                        0.0
                    }
                }));
            }
        }
        PointSet::new(pts, true).unwrap()
    }

    fn random_points(n: usize, m: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<DVector<f64>> = (0..m)
            .map(|_| {
                let mut v = DVector::from_fn(n, |_, _| {
                    rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng)
                });
                let norm: f64 = v.norm();
                v /= norm;
                v
            })
            .collect();
        PointSet::new(pts, true).unwrap()
    }

    #[test]
    fn mvee_unit_cross_polytope() {
        let ps = signed_axes(3, 1.0);
        let res = mvee(&ps, 1e-7, 100_000).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((res.shape.entry(i, j) - target).abs() <= 1e-9);
            }
        }
        for &w in &res.weights {
            assert_relative_eq!(w, 1.0 / 6.0, max_relative = 1e-9);
        }
        assert_eq!(res.contact_indices.len(), 6);
    }

    #[test]
    fn mvee_scaled_axes() {
        let ps = signed_axes(3, 2.0);
        let res = mvee(&ps, 1e-7, 100_000).unwrap();
        for i in 0..3 {
            assert_relative_eq!(res.shape.entry(i, i), 0.25, max_relative = 1e-9);
        }
    }

    #[test]
    fn mvee_containment_on_random_points() {
        let ps = random_points(4, 20, 2);
        let res = mvee(&ps, 1e-7, 100_000).unwrap();
        for p in ps.points() {
            let val = p.dot(&(res.shape.as_matrix() * p));
            assert!(val <= 1.0 + 1e-7 + 1e-12);
        }
        // contact points sit on the boundary up to 10·tol
        for &j in &res.contact_indices {
            let p = &ps.points()[j];
            let val = p.dot(&(res.shape.as_matrix() * p));
            assert!(val >= 1.0 - 1e-6);
        }
    }

    #[test]
    fn mvee_rejects_flat_bodies() {
        let pts = vec![
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![-1.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.5, 0.0, 0.0]),
        ];
        let ps = PointSet::new(pts, true).unwrap();
        assert!(matches!(
            mvee(&ps, 1e-7, 1000),
            Err(Error::DegenerateBody { dim: 3 })
        ));
    }

    #[test]
    fn whiten_cross_polytope_is_identityish() {
        let ps = signed_axes(4, 1.0);
        let res = mvee(&ps, 1e-7, 100_000).unwrap();
        let d = whiten_decomposition(&res, &ps).unwrap();
        assert_eq!(d.len(), 8);
        for &c in &d.weights {
            assert_relative_eq!(c, 0.5, max_relative = 1e-8);
        }
        let report = validate_decomposition(&d);
        assert!(report.identity_residual <= 1e-10 * 4.0);
        assert!(report.trace_defect.abs() <= 1e-8);
        assert!(report.max_norm_defect <= 1e-10);
    }

    #[test]
    fn whiten_random_bodies_validate() {
        for seed in 0..5 {
            let ps = random_points(4, 15, 40 + seed);
            let res = mvee(&ps, 1e-7, 200_000).unwrap();
            let d = whiten_decomposition(&res, &ps).unwrap();
            let report = validate_decomposition(&d);
            assert!(
                report.identity_residual <= 1e-10 * 4.0,
                "seed {seed}: residual {}",
                report.identity_residual
            );
            assert!(report.trace_defect.abs() <= 1e-8);
            d.ensure_valid().unwrap();
        }
    }

    #[test]
    fn validate_detects_perturbation() {
        // exact cross-polytope decomposition has zero residuals
        let mut pts = Vec::new();
        for i in 0..3 {
            for s in [1.0_f64, -1.0] {
                pts.push(DVector::from_fn(3, |r, _| if r == i { s } else { 0.0 }));
            }
        }
        let exact = JohnDecomposition::new(pts.clone(), vec![0.5; 6]).unwrap();
        let r = validate_decomposition(&exact);
        assert_eq!(r.identity_residual, 0.0);
        assert_eq!(r.trace_defect, 0.0);
        assert_eq!(r.max_norm_defect, 0.0);

        // +1e-3 on one weight shows up as a ~1e-3 residual
        let mut weights = vec![0.5; 6];
        weights[0] += 1e-3;
        let bumped = JohnDecomposition::new(pts, weights).unwrap();
        let rb = validate_decomposition(&bumped);
        assert_relative_eq!(rb.identity_residual, 1e-3, max_relative = 1e-9);
        assert!(bumped.ensure_valid().is_err());
    }

    #[test]
    fn simplex_direct_decomposition_validates() {
        // regular simplex: n+1 unit vertices, pairwise inner product −1/n,
        // weights n/(n+1)
        let d = crate::generate::simplex_decomposition(5).unwrap();
        let report = validate_decomposition(&d);
        assert!(report.identity_residual <= 1e-13 * 5.0);
        assert!(report.trace_defect.abs() <= 1e-10);
        assert!(report.max_norm_defect <= 1e-12);
    }
}
