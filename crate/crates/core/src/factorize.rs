//! Factorization pipelines built on top of the barrier selectors and a John
//! identity decomposition: proportional selection of contact points in the
//! symmetric and nonsymmetric settings, and the distance-to-the-cube basis
//! with a certified lower constant.

use nalgebra::{DMatrix, DVector};

use crate::barrier::{ri_select_with_target, DiagonalWeights, SelectionCertificate};
use crate::error::{Error, Result};
use crate::john::JohnDecomposition;
use crate::linalg::{orth_complement_basis, sym_eigen, DenseMatrix, SymMatrix};

/// Symmetric proportional factorization: selected contact points through
/// which the identity ℓ₁ᵏ → ℓ₂ᵏ factors with lower constant ε.
#[derive(Debug, Clone)]
pub struct DRSymResult {
    pub sigma: Vec<usize>,
    /// Selected contact points x_j, j ∈ σ.
    pub points: Vec<DVector<f64>>,
    pub epsilon: f64,
    /// s_min of the matrix with columns x_j, j ∈ σ.
    pub lower_constant: f64,
    /// The ℓ¹ upper side holds symbolically: contact points have unit gauge,
    /// so ‖Σ a_j x_j‖_X ≤ Σ|a_j| by the triangle inequality.
    pub upper_bound_note: String,
    pub certificate: SelectionCertificate,
}

/// Nonsymmetric factorization: contact points, grouping, and the orthogonal
/// projection that absorbs the group sums.
#[derive(Debug, Clone)]
pub struct DRNonsymResult {
    /// Final selection (indices into the decomposition).
    pub sigma: Vec<usize>,
    /// First-pass selection, ascending.
    pub sigma1: Vec<usize>,
    /// Partition of σ₁ into groups A_l (indices into the decomposition).
    pub groups: Vec<Vec<usize>>,
    /// Orthogonal projection on ℝⁿ with range inside span{x_j}_{j∈σ₁},
    /// annihilating every group sum z_l.
    pub projection: DMatrix<f64>,
    pub rank_p: usize,
    /// s_min of the matrix with columns Px_j, j ∈ σ (direct SVD).
    pub lower_constant: f64,
    /// Product of the two per-pass achieved s_min values; the factorization
    /// chain guarantees lower_constant ≥ chain_bound.
    pub chain_bound: f64,
    /// The nominal target ε²/16.
    pub nominal_lower_bound: f64,
    /// max_l |A_l| − 1, the membership constant of −Px_j ∈ (|A_l|−1)·PK.
    pub upper_group_bound: usize,
    /// ⌊4/ε⌋ + 1, the theorem's cap on |A_l|.
    pub group_bound_limit: usize,
    pub epsilon: f64,
    pub pass1: SelectionCertificate,
    pub pass2: SelectionCertificate,
    pub warnings: Vec<String>,
}

/// Basis of ℝⁿ realizing the distance-to-the-cube estimate: k contact points
/// plus n−k orthogonal complement vectors of Euclidean norm 1/d.
#[derive(Debug, Clone)]
pub struct CubeBasisResult {
    /// n×n basis matrix; columns 0..k are contact points, columns k..n the
    /// scaled complement.
    pub t: DMatrix<f64>,
    pub k: usize,
    pub epsilon: f64,
    /// Ellipsoid ratio: the certified containment (1/d)·B₂ⁿ ⊆ B_X.
    pub d: f64,
    /// Certified constant: c_low·‖a‖₁ ≤ ‖Ta‖₂ for all a.
    pub c_low: f64,
    /// Distance bound of the two-ellipsoid theorem, 2^{4/3}·√n·d^{2/3}.
    pub claimed_bound: f64,
    pub sigma: Vec<usize>,
    pub achieved_smin: f64,
    pub warnings: Vec<String>,
}

/// Columns √c_j·x_j with weights √c_j; for a valid decomposition UUᵗ = I, so
/// ‖U‖ = 1 and ‖U‖²_HS = ‖D‖²_HS = n.
fn john_matrix(decomp: &JohnDecomposition) -> Result<(DenseMatrix, DiagonalWeights)> {
    let cols: Vec<DVector<f64>> = decomp
        .points
        .iter()
        .zip(&decomp.weights)
        .map(|(x, &c)| x * c.sqrt())
        .collect();
    let u = DenseMatrix::from_columns(&cols)?;
    let d = DiagonalWeights::new(decomp.weights.iter().map(|&c| c.sqrt()).collect())?;
    Ok((u, d))
}

/// Proportional selection of contact points in the symmetric setting: for the
/// selected σ, ε(Σ a_j²)^{1/2} ≤ ‖Σ a_j x_j‖₂ with |σ| ≥ max(1, ⌊(1−ε)²n⌋).
pub fn dr_symmetric(decomp: &JohnDecomposition, eps: f64) -> Result<DRSymResult> {
    decomp.ensure_valid()?;
    let n = decomp.dim();
    let (u, d) = john_matrix(decomp)?;
    // UUᵗ = I makes the stable rank exactly n; pinning the size avoids
    // floor-boundary sensitivity when (1−ε)²n is an integer.
    let target = (((1.0 - eps) * (1.0 - eps) * n as f64).floor() as usize).max(1);
    let certificate = ri_select_with_target(&u, &d, eps, Some(target))?;
    let points: Vec<DVector<f64>> = certificate
        .sigma
        .iter()
        .map(|&j| decomp.points[j].clone())
        .collect();
    Ok(DRSymResult {
        sigma: certificate.sigma.clone(),
        points,
        epsilon: eps,
        lower_constant: certificate.achieved,
        upper_bound_note:
            "triangle inequality: ||sum a_j x_j||_X <= sum |a_j| since contact points have unit gauge"
                .into(),
        certificate,
    })
}

/// Nonsymmetric factorization. Two selector passes at parameter ε/4 sandwich
/// a projection step: the first pass picks σ₁, σ₁ is partitioned into groups
/// whose sums z_l are projected away, and the second pass runs on the columns
/// of the projection P″ = I − Σ_l 1_{A_l}1_{A_l}ᵗ/|A_l| pulled back through
/// the basis map e_j → x_j.
pub fn dr_nonsymmetric(decomp: &JohnDecomposition, eps: f64) -> Result<DRNonsymResult> {
    if !(eps.is_finite() && 0.0 < eps && eps < 1.0) {
        return Err(Error::InvalidInput("eps must lie in (0,1)".into()));
    }
    decomp.ensure_valid()?;
    let n = decomp.dim();
    let (u, d) = john_matrix(decomp)?;
    let mut warnings: Vec<String> = Vec::new();

    let eps4 = eps / 4.0;
    let target1 = (((1.0 - eps4) * (1.0 - eps4) * n as f64).floor() as usize).max(1);
    let pass1 = ri_select_with_target(&u, &d, eps4, Some(target1))?;
    let mut sigma1 = pass1.sigma.clone();
    sigma1.sort_unstable();
    let s = sigma1.len();

    // groups of near-equal size in index order; the formula keeps every group
    // at least 2 wide except in the degenerate s = 1 corner
    let mut g = ((eps / 2.0) * s as f64).floor() as usize;
    g = g.max(1);
    while g > 1 && s / g < 2 {
        g -= 1;
    }
    let base = s / g;
    let rem = s % g;
    let mut groups: Vec<Vec<usize>> = Vec::with_capacity(g);
    let mut pos = 0usize;
    for l in 0..g {
        let size = base + usize::from(l < rem);
        groups.push(sigma1[pos..pos + size].to_vec());
        pos += size;
    }
    let rank_p = s - g;
    if rank_p == 0 {
        return Err(Error::InvalidInput(format!(
            "projection collapses: first pass selected {s} columns and {g} groups leave rank 0"
        )));
    }

    // orthonormal basis of Y = span{x_j}, then the complement of the group
    // sums inside Y
    let t_cols: Vec<DVector<f64>> = sigma1.iter().map(|&j| decomp.points[j].clone()).collect();
    let t_mat = DMatrix::from_columns(&t_cols);
    let qr = t_mat.clone().qr();
    let q_y = qr.q();
    let r = qr.r();

    let z_vectors: Vec<DVector<f64>> = groups
        .iter()
        .map(|grp| {
            let mut z = DVector::zeros(n);
            for &j in grp {
                z += &decomp.points[j];
            }
            z
        })
        .collect();
    let zetas: Vec<DVector<f64>> = z_vectors.iter().map(|z| q_y.tr_mul(z)).collect();
    let b = orth_complement_basis(s, &zetas);
    if b.ncols() != rank_p {
        warnings.push(format!(
            "group sums are numerically dependent: complement has {} columns, expected {rank_p}",
            b.ncols()
        ));
    }
    let w = &q_y * &b;
    let projection = SymMatrix::symmetrize(&(&w * w.transpose()));

    for (l, z) in z_vectors.iter().enumerate() {
        let res = (projection.as_matrix() * z).norm();
        if res > 1e-10 * z.norm().max(1.0) {
            warnings.push(format!("Pz_{l} has residual {res:.3e}"));
        }
    }
    // numerical rank of P at threshold 1e-8
    {
        let spec = sym_eigen(&projection)?;
        let top = spec.lambda_max().max(1.0);
        let numerical_rank = spec
            .eigenvalues()
            .iter()
            .filter(|&&l| l > 1e-8 * top)
            .count();
        if numerical_rank != rank_p {
            warnings.push(format!(
                "numerical rank of P is {numerical_rank}, expected {rank_p}"
            ));
        }
    }

    // P″ is exact: Ker P′ is spanned by the group indicators, which are
    // orthogonal because groups are disjoint.
    let mut p2 = DMatrix::identity(s, s);
    let mut offset = 0usize;
    for grp in &groups {
        let size = grp.len();
        let inv = 1.0 / size as f64;
        for a in 0..size {
            for bpos in 0..size {
                p2[(offset + a, offset + bpos)] -= inv;
            }
        }
        offset += size;
    }

    // P′ = T⁻¹PT restricted to Y, realized as R⁻¹·Qᵗ·P·T
    let pt = projection.as_matrix() * &t_mat;
    let qtpt = q_y.tr_mul(&pt);
    let p1 = r
        .clone()
        .solve_upper_triangular(&qtpt)
        .ok_or_else(|| Error::NumericalBreakdown {
            step: 0,
            detail: "basis map is numerically singular".into(),
        })?;
    let check = &p2 * &p1 - &p2;
    let check_norm = check.iter().map(|v| v * v).sum::<f64>().sqrt();
    let p1_scale = p1.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    if check_norm > 1e-10 * p1_scale {
        warnings.push(format!(
            "projection pullback check ||P''P' - P''|| = {check_norm:.3e} exceeds tolerance"
        ));
    }

    // second pass on the columns of P″; the nominal size comes from the first
    // pass but can never exceed the projection rank
    let u2 = DenseMatrix::new(p2.clone())?;
    let d2 = DiagonalWeights::identity(s);
    let requested = (((1.0 - eps4) * (1.0 - eps4) * s as f64).floor() as usize).max(1);
    let k2 = requested.min(rank_p);
    if k2 < requested {
        warnings.push(format!(
            "second-pass size capped at the projection rank ({requested} -> {k2})"
        ));
    }
    let pass2 = ri_select_with_target(&u2, &d2, eps4, Some(k2))?;
    let sigma: Vec<usize> = pass2.sigma.iter().map(|&p| sigma1[p]).collect();

    let chain_bound = pass1.achieved * pass2.achieved;
    let projected_cols: Vec<DVector<f64>> = sigma
        .iter()
        .map(|&j| projection.as_matrix() * &decomp.points[j])
        .collect();
    let lower_constant = DMatrix::from_columns(&projected_cols)
        .singular_values()
        .iter()
        .fold(f64::INFINITY, |a, &v| a.min(v));

    let upper_group_bound = groups.iter().map(|grp| grp.len() - 1).max().unwrap_or(0);
    let group_bound_limit = (4.0 / eps).floor() as usize + 1;

    Ok(DRNonsymResult {
        sigma,
        sigma1,
        groups,
        projection: projection.as_matrix().clone(),
        rank_p,
        lower_constant,
        chain_bound,
        nominal_lower_bound: eps * eps / 16.0,
        upper_group_bound,
        group_bound_limit,
        epsilon: eps,
        pass1,
        pass2,
        warnings,
    })
}

/// Default ε = (2n)^{-1/3} of the one-ellipsoid distance construction.
pub fn default_cube_eps(n: usize) -> f64 {
    1.0 / (2.0 * n as f64).cbrt()
}

/// Distance-to-the-cube basis. Contact points selected at parameter ε make up
/// the first k = max(1, ⌊(1−ε)²n⌋) ≥ ⌊(1−2ε)n⌋ columns; the rest is an
/// orthogonal basis of the complement scaled to Euclidean norm 1/d, which the
/// containment (1/d)·B₂ⁿ ⊆ B_X turns into unit-gauge vectors. The certified
/// constant is evaluated with achieved quantities, so it is never weaker than
/// the theorem.
pub fn cube_basis(
    decomp: &JohnDecomposition,
    eps: Option<f64>,
    d: Option<f64>,
) -> Result<CubeBasisResult> {
    decomp.ensure_valid()?;
    let n = decomp.dim();
    let nf = n as f64;
    if let Some(e) = eps {
        if !(e.is_finite() && 0.0 < e && e < 1.0) {
            return Err(Error::InvalidInput("eps must lie in (0,1)".into()));
        }
    }
    if let Some(ratio) = d {
        if !(ratio.is_finite() && ratio >= 1.0) {
            return Err(Error::InvalidInput(
                "distance ratio d must be at least 1".into(),
            ));
        }
    }
    let eps = eps.unwrap_or_else(|| default_cube_eps(n));
    let d = d.unwrap_or_else(|| nf.sqrt());

    let drs = dr_symmetric(decomp, eps)?;
    let k = drs.sigma.len();
    let s_ach = drs.lower_constant;
    let mut warnings = drs.certificate.warnings.clone();

    let complement = orth_complement_basis(n, &drs.points);
    if complement.ncols() != n - k {
        warnings.push(format!(
            "complement dimension {} does not match n - k = {}",
            complement.ncols(),
            n - k
        ));
    }

    let mut t = DMatrix::zeros(n, n);
    for (col, x) in drs.points.iter().enumerate() {
        t.set_column(col, x);
    }
    for col in 0..complement.ncols() {
        let y = complement.column(col) / d;
        t.set_column(k + col, &y);
    }

    let c_low = if k == n {
        s_ach / nf.sqrt()
    } else {
        let contact_term = s_ach / (k as f64).sqrt();
        let complement_term = 1.0 / (d * ((n - k) as f64).sqrt());
        contact_term.min(complement_term) / 2.0_f64.sqrt()
    };
    let claimed_bound = 2.0_f64.powf(4.0 / 3.0) * nf.sqrt() * d.powf(2.0 / 3.0);

    Ok(CubeBasisResult {
        t,
        k,
        epsilon: eps,
        d,
        c_low,
        claimed_bound,
        sigma: drs.sigma,
        achieved_smin: s_ach,
        warnings,
    })
}

/// The small-dimension ε balancing the two terms of the cube certificate:
/// the unique root of ε/√((1−ε)²n) = 1/(n·√(1−(1−ε)²)) in (0,1), by
/// bisection to 1e-12. The left side increases and the right side decreases,
/// so the bracket is monotone.
pub fn optimize_eps(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput("optimize_eps requires n >= 2".into()));
    }
    let nf = n as f64;
    let f = |e: f64| e / ((1.0 - e) * nf.sqrt()) - 1.0 / (nf * (1.0 - (1.0 - e) * (1.0 - e)).sqrt());
    let mut lo = 1e-12;
    let mut hi = 1.0 - 1e-12;
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
