//! Independent certificate verification and exhaustive subset oracles.
//!
//! Verification recomputes every claim from the input matrices and the
//! certificate's σ using only the linear-algebra kernel, never the selector
//! internals, so implementation drift in the selectors is caught here.

use nalgebra::{DMatrix, DVector};

use crate::barrier::{
    kt_claimed_bound, kt_target_size, ri_claimed_bound, ri_target_size, CertKind, CertParams,
    DiagonalWeights, SelectionCertificate,
};
use crate::error::{Error, Result};
use crate::linalg::{hs_norm, operator_norm, smin_restricted, DenseMatrix};

/// Outcome of one verification clause.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Re-verification of a certificate from (inputs, σ) alone.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub kind: CertKind,
    pub clauses: Vec<Clause>,
    /// Achieved value recomputed through the kernel.
    pub recomputed_achieved: f64,
    /// Theorem bound recomputed from the inputs.
    pub recomputed_bound: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }
}

fn clause(name: &str, pass: bool, detail: String) -> Clause {
    Clause {
        name: name.into(),
        pass,
        detail,
    }
}

fn check_indices(sigma: &[usize], m: usize) -> (bool, String) {
    let mut seen = vec![false; m];
    for &j in sigma {
        if j >= m {
            return (false, format!("index {j} out of range for {m} columns"));
        }
        if seen[j] {
            return (false, format!("index {j} repeats"));
        }
        seen[j] = true;
    }
    (true, "indices distinct and in range".into())
}

/// Checks a restricted-invertibility certificate: sizes, index sanity,
/// support membership, the bound formula, and the achieved value recomputed
/// by SVD.
pub fn verify_ri(
    u: &DenseMatrix,
    d: &DiagonalWeights,
    cert: &SelectionCertificate,
) -> Result<VerificationReport> {
    if cert.kind != CertKind::RestrictedInvertibility {
        return Err(Error::MalformedCertificate(
            "expected a restricted-invertibility certificate".into(),
        ));
    }
    let CertParams::Ri { eps, .. } = cert.params else {
        return Err(Error::MalformedCertificate(
            "parameter block does not match the certificate kind".into(),
        ));
    };
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::MalformedCertificate("eps must lie in (0,1)".into()));
    }
    let mut clauses = Vec::new();

    let k_formula = ri_target_size(u, eps)?;
    clauses.push(clause(
        "size",
        cert.sigma.len() == cert.target_size && cert.target_size == k_formula,
        format!(
            "|sigma| = {}, certificate k = {}, formula k = {k_formula}",
            cert.sigma.len(),
            cert.target_size
        ),
    ));

    let (idx_ok, idx_detail) = check_indices(&cert.sigma, u.cols());
    clauses.push(clause("indices", idx_ok, idx_detail));

    let support_ok = idx_ok && cert.sigma.iter().all(|&j| d.alpha(j) != 0.0);
    clauses.push(clause(
        "support",
        support_ok,
        "every selected index carries a nonzero weight".into(),
    ));

    let bound = ri_claimed_bound(hs_norm(u), d.hs_norm_sq().sqrt(), eps);
    let bound_ok = (bound - cert.claimed_bound).abs() <= 1e-12 * bound.max(1.0);
    clauses.push(clause(
        "bound-formula",
        bound_ok,
        format!("recomputed {bound:.12e}, certificate {:.12e}", cert.claimed_bound),
    ));

    let achieved = if idx_ok && support_ok && !cert.sigma.is_empty() {
        smin_restricted(u, &cert.sigma, d)?
    } else {
        f64::NAN
    };
    let achieved_ok = achieved.is_finite()
        && (achieved - cert.achieved).abs() <= 1e-9 * achieved.abs().max(1.0);
    clauses.push(clause(
        "achieved-recomputation",
        achieved_ok,
        format!("recomputed {achieved:.12e}, certificate {:.12e}", cert.achieved),
    ));

    let theorem_ok = achieved.is_finite() && achieved >= (1.0 - 1e-6) * bound;
    clauses.push(clause(
        "theorem-bound",
        theorem_ok,
        format!("s_min {achieved:.6e} against bound {bound:.6e}"),
    ));

    Ok(VerificationReport {
        kind: CertKind::RestrictedInvertibility,
        clauses,
        recomputed_achieved: achieved,
        recomputed_bound: bound,
    })
}

/// Checks a norm-bound certificate: sizes, indices, the bound formula and the
/// restricted operator norm recomputed by SVD.
pub fn verify_kt(u: &DenseMatrix, cert: &SelectionCertificate) -> Result<VerificationReport> {
    if cert.kind != CertKind::NormBound {
        return Err(Error::MalformedCertificate(
            "expected a norm-bound certificate".into(),
        ));
    }
    let CertParams::Kt { lambda, eta, .. } = cert.params else {
        return Err(Error::MalformedCertificate(
            "parameter block does not match the certificate kind".into(),
        ));
    };
    let m = u.cols();
    let mut clauses = Vec::new();

    let k_formula = kt_target_size(m, lambda)?;
    clauses.push(clause(
        "size",
        cert.sigma.len() == cert.target_size && cert.target_size == k_formula,
        format!(
            "|sigma| = {}, certificate k = {}, formula k = {k_formula}",
            cert.sigma.len(),
            cert.target_size
        ),
    ));

    let (idx_ok, idx_detail) = check_indices(&cert.sigma, m);
    clauses.push(clause("indices", idx_ok, idx_detail));

    let bound = kt_claimed_bound(operator_norm(u), hs_norm(u), m, lambda, eta);
    let bound_ok = (bound - cert.claimed_bound).abs() <= 1e-12 * bound.max(1.0);
    clauses.push(clause(
        "bound-formula",
        bound_ok,
        format!("recomputed {bound:.12e}, certificate {:.12e}", cert.claimed_bound),
    ));

    let achieved = if idx_ok && !cert.sigma.is_empty() {
        restricted_norm(u, &cert.sigma)
    } else {
        f64::NAN
    };
    let achieved_ok = achieved.is_finite()
        && (achieved - cert.achieved).abs() <= 1e-9 * achieved.abs().max(1.0);
    clauses.push(clause(
        "achieved-recomputation",
        achieved_ok,
        format!("recomputed {achieved:.12e}, certificate {:.12e}", cert.achieved),
    ));

    let theorem_ok = achieved.is_finite() && achieved <= (1.0 + 1e-6) * bound;
    clauses.push(clause(
        "theorem-bound",
        theorem_ok,
        format!("||U_sigma|| {achieved:.6e} against bound {bound:.6e}"),
    ));

    Ok(VerificationReport {
        kind: CertKind::NormBound,
        clauses,
        recomputed_achieved: achieved,
        recomputed_bound: bound,
    })
}

fn restricted_norm(u: &DenseMatrix, sigma: &[usize]) -> f64 {
    let cols: Vec<DVector<f64>> = sigma.iter().map(|&j| u.column(j)).collect();
    DMatrix::from_columns(&cols)
        .singular_values()
        .iter()
        .fold(0.0_f64, |a, &s| a.max(s))
}

const ENUMERATION_CAP: usize = 12;

/// Exhaustive maximizer of s_min(U_σ D_σ⁻¹) over size-k subsets of the weight
/// support. Refuses m > 12 (at most C(12,6) = 924 decompositions).
pub fn oracle_best_subset_smin(
    u: &DenseMatrix,
    d: &DiagonalWeights,
    k: usize,
) -> Result<(Vec<usize>, f64)> {
    if u.cols() > ENUMERATION_CAP {
        return Err(Error::InvalidInput(format!(
            "subset enumeration refuses m = {} > {ENUMERATION_CAP}",
            u.cols()
        )));
    }
    let support = d.support();
    if k == 0 || k > support.len() {
        return Err(Error::InvalidInput(format!(
            "subset size {k} out of range for a support of {}",
            support.len()
        )));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_subset(&support, k, &mut |subset| {
        let v = smin_restricted(u, subset, d)?;
        if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
            best = Some((subset.to_vec(), v));
        }
        Ok(())
    })?;
    Ok(best.expect("at least one subset exists"))
}

/// Exhaustive minimizer of ‖U_σ‖ over size-k subsets of {1..m}.
pub fn oracle_best_subset_norm(u: &DenseMatrix, k: usize) -> Result<(Vec<usize>, f64)> {
    if u.cols() > ENUMERATION_CAP {
        return Err(Error::InvalidInput(format!(
            "subset enumeration refuses m = {} > {ENUMERATION_CAP}",
            u.cols()
        )));
    }
    if k == 0 || k > u.cols() {
        return Err(Error::InvalidInput(format!(
            "subset size {k} out of range for {} columns",
            u.cols()
        )));
    }
    let all: Vec<usize> = (0..u.cols()).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_subset(&all, k, &mut |subset| {
        let v = restricted_norm(u, subset);
        if best.as_ref().map_or(true, |(_, bv)| v < *bv) {
            best = Some((subset.to_vec(), v));
        }
        Ok(())
    })?;
    Ok(best.expect("at least one subset exists"))
}

/// Lexicographic size-k subsets of `pool`, visited deterministically.
fn for_each_subset(
    pool: &[usize],
    k: usize,
    visit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let n = pool.len();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut subset = vec![0usize; k];
    loop {
        for (slot, &i) in idx.iter().enumerate() {
            subset[slot] = pool[i];
        }
        visit(&subset)?;
        // advance the combination
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            if idx[pos] != pos + n - k {
                break;
            }
        }
        if idx[pos] == pos + n - k {
            return Ok(());
        }
        idx[pos] += 1;
        for later in pos + 1..k {
            idx[later] = idx[later - 1] + 1;
        }
    }
}
