//! Command-line surface: CSV ingestion, one subcommand per pipeline, JSON
//! certificate emission and the verification entry point.
//!
//! Exit codes: 0 success, 2 validation error (bad parameters, unreadable or
//! malformed files), 3 verification failure.
//!
//! Certificates serialize with a stable top-level schema
//! {kind, sigma, k, claimed_bound, achieved, params, trace[], warnings[],
//! tool_version}; σ is emitted 1-based to match the usual column numbering,
//! while everything in-process is 0-based.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::barrier::{
    kt_select_with_delta, ri_select, CertKind, CertParams, DiagonalWeights, SelectionCertificate,
    StepRecord,
};
use crate::certify::{verify_kt, verify_ri, VerificationReport};
use crate::error::{Error, Result};
use crate::factorize::{cube_basis, dr_nonsymmetric, dr_symmetric};
use crate::generate;
use crate::john::{mvee, whiten_decomposition, JohnDecomposition, PointSet};
use crate::linalg::DenseMatrix;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "colsel",
    version,
    about = "Deterministic column selection and factorization certificates"
)]
pub struct RunConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct EllipsoidOpts {
    /// Relative tolerance of the enclosing-ellipsoid solve.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Iteration cap of the enclosing-ellipsoid solve.
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Restricted-invertibility column selection with a certificate.
    Ri {
        /// Matrix CSV (one row per line).
        #[arg(long)]
        matrix: PathBuf,
        /// Selection parameter in (0,1).
        #[arg(long)]
        eps: f64,
        /// Diagonal weights CSV (single row); identity when omitted.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Use column norms as weights.
        #[arg(long, conflicts_with = "weights")]
        colnorm: bool,
        /// Certificate JSON output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Norm-bounded column selection with a certificate.
    Kt {
        #[arg(long)]
        matrix: PathBuf,
        /// Selected proportion λ in [1/m, 1).
        #[arg(long)]
        lam: f64,
        /// Barrier start parameter η in [λ, 1); defaults to λ.
        #[arg(long)]
        eta: Option<f64>,
        /// Barrier increment; the selection is invariant under rescaling.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Symmetric proportional factorization from a point set.
    Drsym {
        /// Point CSV (one point per line); the body is conv(±points).
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        ellipsoid: EllipsoidOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Nonsymmetric factorization with grouping and projection.
    Drnonsym {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        ellipsoid: EllipsoidOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distance-to-the-cube basis with a certified lower constant.
    Cube {
        #[arg(long)]
        points: PathBuf,
        /// Overrides the default ε = (2n)^(-1/3).
        #[arg(long)]
        eps: Option<f64>,
        /// User-supplied distance-ellipsoid ratio; defaults to √n.
        #[arg(long)]
        dist_ratio: Option<f64>,
        #[command(flatten)]
        ellipsoid: EllipsoidOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimum-volume enclosing ellipsoid and identity decomposition.
    Mvee {
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        ellipsoid: EllipsoidOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify an emitted certificate against its inputs.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, conflicts_with = "weights")]
        colnorm: bool,
    },
    /// Seeded generators for matrices and the named example bodies.
    Gen {
        /// One of: gaussian, cross-polytope, simplex, random-symmetric-polytope.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        /// Point count for random bodies.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `argv` and runs one pipeline; never panics on bad input.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(config.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Ri {
            matrix,
            eps,
            weights,
            colnorm,
            out,
        } => {
            if !(eps.is_finite() && 0.0 < eps && eps < 1.0) {
                return Err(Error::InvalidInput("eps must lie in (0,1)".into()));
            }
            let u = load_matrix(&matrix)?;
            let d = resolve_weights(&u, weights.as_deref(), colnorm)?;
            let cert = ri_select(&u, &d, eps)?;
            write_json(&out, &certificate_to_json(&cert))?;
            println!(
                "restricted invertibility: |sigma| = {}, claimed bound {:.6e}, achieved {:.6e}",
                cert.sigma.len(),
                cert.claimed_bound,
                cert.achieved
            );
            println!("certificate written to {}", out.display());
            Ok(0)
        }
        Command::Kt {
            matrix,
            lam,
            eta,
            delta,
            out,
        } => {
            if !(lam.is_finite() && 0.0 < lam && lam < 1.0) {
                return Err(Error::InvalidInput("lam must lie in (0,1)".into()));
            }
            let u = load_matrix(&matrix)?;
            let cert = kt_select_with_delta(&u, lam, eta, delta)?;
            write_json(&out, &certificate_to_json(&cert))?;
            println!(
                "norm-bounded selection: |sigma| = {}, claimed bound {:.6e}, achieved {:.6e}",
                cert.sigma.len(),
                cert.claimed_bound,
                cert.achieved
            );
            println!("certificate written to {}", out.display());
            Ok(0)
        }
        Command::Drsym {
            points,
            eps,
            ellipsoid,
            out,
        } => {
            if !(eps.is_finite() && 0.0 < eps && eps < 1.0) {
                return Err(Error::InvalidInput("eps must lie in (0,1)".into()));
            }
            let decomp = decomposition_from_points(&points, &ellipsoid)?;
            let res = dr_symmetric(&decomp, eps)?;
            let payload = json!({
                "kind": "dr-symmetric",
                "eps": eps,
                "sigma": one_based(&res.sigma),
                "lower_constant": res.lower_constant,
                "upper_bound_note": res.upper_bound_note,
                "certificate": certificate_to_json(&res.certificate),
                "tool_version": TOOL_VERSION,
            });
            write_json(&out, &payload)?;
            println!(
                "symmetric factorization: |sigma| = {}, lower constant {:.6e} (target {:.6e})",
                res.sigma.len(),
                res.lower_constant,
                eps
            );
            println!("result written to {}", out.display());
            Ok(0)
        }
        Command::Drnonsym {
            points,
            eps,
            ellipsoid,
            out,
        } => {
            if !(eps.is_finite() && 0.0 < eps && eps < 1.0) {
                return Err(Error::InvalidInput("eps must lie in (0,1)".into()));
            }
            let decomp = decomposition_from_points(&points, &ellipsoid)?;
            let res = dr_nonsymmetric(&decomp, eps)?;
            let payload = json!({
                "kind": "dr-nonsymmetric",
                "eps": eps,
                "sigma": one_based(&res.sigma),
                "sigma1": one_based(&res.sigma1),
                "groups": res.groups.iter().map(|g| one_based(g)).collect::<Vec<_>>(),
                "rank_p": res.rank_p,
                "lower_constant": res.lower_constant,
                "chain_bound": res.chain_bound,
                "nominal_lower_bound": res.nominal_lower_bound,
                "upper_group_bound": res.upper_group_bound,
                "group_bound_limit": res.group_bound_limit,
                "projection": matrix_rows(&res.projection),
                "pass1": certificate_to_json(&res.pass1),
                "pass2": certificate_to_json(&res.pass2),
                "warnings": res.warnings,
                "tool_version": TOOL_VERSION,
            });
            write_json(&out, &payload)?;
            println!(
                "nonsymmetric factorization: rank P = {}, lower constant {:.6e} (chain bound {:.6e}, nominal {:.6e})",
                res.rank_p, res.lower_constant, res.chain_bound, res.nominal_lower_bound
            );
            println!("result written to {}", out.display());
            Ok(0)
        }
        Command::Cube {
            points,
            eps,
            dist_ratio,
            ellipsoid,
            out,
        } => {
            let decomp = decomposition_from_points(&points, &ellipsoid)?;
            let res = cube_basis(&decomp, eps, dist_ratio)?;
            let payload = json!({
                "kind": "cube-basis",
                "eps": res.epsilon,
                "d": res.d,
                "k": res.k,
                "sigma": one_based(&res.sigma),
                "c_low": res.c_low,
                "inv_c_low": 1.0 / res.c_low,
                "claimed_bound": res.claimed_bound,
                "achieved_smin": res.achieved_smin,
                "basis": matrix_rows(&res.t),
                "warnings": res.warnings,
                "tool_version": TOOL_VERSION,
            });
            write_json(&out, &payload)?;
            println!(
                "cube basis: k = {}, c_low = {:.6e}, 1/c_low = {:.6e}",
                res.k,
                res.c_low,
                1.0 / res.c_low
            );
            println!("result written to {}", out.display());
            Ok(0)
        }
        Command::Mvee {
            points,
            ellipsoid,
            out,
        } => {
            let ps = load_points(&points)?;
            let res = mvee(&ps, ellipsoid.tol, ellipsoid.max_iter)?;
            let decomp = whiten_decomposition(&res, &ps)?;
            let payload = json!({
                "kind": "mvee",
                "dim": ps.dim(),
                "num_points": ps.len(),
                "tol": res.tol,
                "iterations": res.iterations,
                "final_gap": res.final_gap,
                "shape": matrix_rows(res.shape.as_matrix()),
                "weights": res.weights,
                "contact_indices": one_based(&res.contact_indices),
                "decomposition": {
                    "points": decomp.points.iter().map(vector_entries).collect::<Vec<_>>(),
                    "weights": decomp.weights,
                },
                "tool_version": TOOL_VERSION,
            });
            write_json(&out, &payload)?;
            println!(
                "ellipsoid solved in {} iterations (gap {:.3e}); {} contact points",
                res.iterations,
                res.final_gap,
                res.contact_indices.len()
            );
            println!("result written to {}", out.display());
            Ok(0)
        }
        Command::Verify {
            cert,
            matrix,
            weights,
            colnorm,
        } => {
            let u = load_matrix(&matrix)?;
            let parsed = read_certificate(&cert)?;
            let report = match parsed.kind {
                CertKind::RestrictedInvertibility => {
                    let d = resolve_weights(&u, weights.as_deref(), colnorm)?;
                    verify_ri(&u, &d, &parsed)?
                }
                CertKind::NormBound => verify_kt(&u, &parsed)?,
            };
            print_report(&report);
            if report.passed() {
                println!("verification: PASS");
                Ok(0)
            } else {
                println!("verification: FAIL");
                Ok(3)
            }
        }
        Command::Gen {
            kind,
            rows,
            cols,
            dim,
            count,
            seed,
            out,
        } => run_gen(&kind, rows, cols, dim, count, seed, &out),
    }
}

fn run_gen(
    kind: &str,
    rows: Option<usize>,
    cols: Option<usize>,
    dim: Option<usize>,
    count: Option<usize>,
    seed: u64,
    out: &Path,
) -> Result<i32> {
    let need = |value: Option<usize>, flag: &str| {
        value.ok_or_else(|| Error::InvalidInput(format!("gen {kind} requires --{flag}")))
    };
    match kind {
        "gaussian" => {
            let n = need(rows, "rows")?;
            let m = need(cols, "cols")?;
            let u = generate::gaussian_matrix(n, m, seed)?;
            save_matrix(out, &u)?;
            println!("wrote {n}x{m} gaussian matrix (seed {seed}) to {}", out.display());
        }
        "cross-polytope" => {
            let n = need(dim, "dim")?;
            let ps = generate::cross_polytope_points(n)?;
            save_points(out, &ps)?;
            println!("wrote {} cross-polytope points to {}", ps.len(), out.display());
        }
        "simplex" => {
            let n = need(dim, "dim")?;
            let ps = generate::simplex_points(n)?;
            save_points(out, &ps)?;
            println!("wrote {} simplex vertices to {}", ps.len(), out.display());
        }
        "random-symmetric-polytope" => {
            let n = need(dim, "dim")?;
            let m = need(count, "count")?;
            let ps = generate::random_symmetric_polytope(n, m, seed)?;
            save_points(out, &ps)?;
            println!(
                "wrote {} random unit directions (seed {seed}) to {}",
                ps.len(),
                out.display()
            );
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown gen kind '{other}'; expected gaussian, cross-polytope, simplex or random-symmetric-polytope"
            )));
        }
    }
    Ok(0)
}

fn resolve_weights(
    u: &DenseMatrix,
    weights: Option<&Path>,
    colnorm: bool,
) -> Result<DiagonalWeights> {
    match (weights, colnorm) {
        (Some(path), _) => load_weights(path, u.cols()),
        (None, true) => Ok(DiagonalWeights::from_column_norms(u)),
        (None, false) => Ok(DiagonalWeights::identity(u.cols())),
    }
}

fn decomposition_from_points(path: &Path, opts: &EllipsoidOpts) -> Result<JohnDecomposition> {
    let ps = load_points(path)?;
    let res = mvee(&ps, opts.tol, opts.max_iter)?;
    whiten_decomposition(&res, &ps)
}

// ── file formats ────────────────────────────────────────────────────────────

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses CSV rows of decimal numbers; rejects ragged rows and non-finite
/// tokens with the offending position in the message.
pub fn parse_csv_matrix(content: &str, label: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut expected = 0usize;
    for (i, line) in content.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() && i == content.lines().count() - 1 {
            break;
        }
        let mut row = Vec::new();
        for (j, tok) in line.split(',').enumerate() {
            let tok = tok.trim();
            let value: f64 = tok.parse().map_err(|_| Error::Parse {
                path: label.into(),
                detail: format!("row {}, column {}: invalid number '{tok}'", i + 1, j + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    path: label.into(),
                    detail: format!("row {}, column {}: non-finite value", i + 1, j + 1),
                });
            }
            row.push(value);
        }
        if expected == 0 {
            expected = row.len();
        } else if row.len() != expected {
            return Err(Error::Parse {
                path: label.into(),
                detail: format!("row {} has {} fields, expected {expected}", i + 1, row.len()),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            path: label.into(),
            detail: "file is empty".into(),
        });
    }
    Ok(rows)
}

/// Loads a matrix CSV: one row per line, comma-separated decimal numbers.
pub fn load_matrix(path: &Path) -> Result<DenseMatrix> {
    let content = read_file(path)?;
    let rows = parse_csv_matrix(&content, &path.display().to_string())?;
    DenseMatrix::from_rows(&rows)
}

/// Serializes a matrix with shortest round-trip decimal formatting.
pub fn matrix_to_csv(u: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..u.rows() {
        let row: Vec<String> = (0..u.cols()).map(|j| format!("{}", u.entry(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn save_matrix(path: &Path, u: &DenseMatrix) -> Result<()> {
    write_file(path, &matrix_to_csv(u))
}

/// Loads a point set: each CSV line is one point.
pub fn load_points(path: &Path) -> Result<PointSet> {
    let content = read_file(path)?;
    let rows = parse_csv_matrix(&content, &path.display().to_string())?;
    let points: Vec<DVector<f64>> = rows.into_iter().map(DVector::from_vec).collect();
    PointSet::new(points, true)
}

pub fn save_points(path: &Path, ps: &PointSet) -> Result<()> {
    let mut out = String::new();
    for p in ps.points() {
        let row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

/// Loads diagonal weights from a single-row CSV.
pub fn load_weights(path: &Path, expected: usize) -> Result<DiagonalWeights> {
    let content = read_file(path)?;
    let rows = parse_csv_matrix(&content, &path.display().to_string())?;
    if rows.len() != 1 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            detail: format!("weights must be a single row, found {} rows", rows.len()),
        });
    }
    if rows[0].len() != expected {
        return Err(Error::Parse {
            path: path.display().to_string(),
            detail: format!(
                "weights row has {} fields, expected {expected} (one per matrix column)",
                rows[0].len()
            ),
        });
    }
    DiagonalWeights::new(rows[0].clone())
}

// ── certificate JSON ────────────────────────────────────────────────────────

#[derive(Debug, Serialize, Deserialize)]
struct TraceJson {
    chosen_index: usize,
    barrier_before: f64,
    barrier_after: f64,
    potential_before: f64,
    potential_after: f64,
    feasibility_margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aggregate_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_max_after: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CertificateJson {
    kind: String,
    sigma: Vec<usize>,
    k: usize,
    claimed_bound: f64,
    achieved: f64,
    params: Map<String, Value>,
    trace: Vec<TraceJson>,
    warnings: Vec<String>,
    tool_version: String,
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|&j| j + 1).collect()
}

fn vector_entries(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Converts a certificate into its stable JSON form (σ 1-based).
pub fn certificate_to_json(cert: &SelectionCertificate) -> Value {
    let params = match &cert.params {
        CertParams::Ri {
            eps,
            b0,
            delta,
            final_barrier,
            tie_break,
        } => {
            let mut map = Map::new();
            map.insert("eps".into(), json!(eps));
            map.insert("b0".into(), json!(b0));
            map.insert("delta".into(), json!(delta));
            map.insert("final_barrier".into(), json!(final_barrier));
            map.insert("tie_break".into(), json!(tie_break));
            map
        }
        CertParams::Kt {
            lambda,
            eta,
            delta,
            weight,
            u0,
            final_barrier,
            simplified_bound,
            tie_break,
        } => {
            let mut map = Map::new();
            map.insert("lambda".into(), json!(lambda));
            map.insert("eta".into(), json!(eta));
            map.insert("delta".into(), json!(delta));
            map.insert("weight".into(), json!(weight));
            map.insert("u0".into(), json!(u0));
            map.insert("final_barrier".into(), json!(final_barrier));
            if let Some(sb) = simplified_bound {
                map.insert("simplified_bound".into(), json!(sb));
            }
            map.insert("tie_break".into(), json!(tie_break));
            map
        }
    };
    let doc = CertificateJson {
        kind: cert.kind.as_str().into(),
        sigma: one_based(&cert.sigma),
        k: cert.target_size,
        claimed_bound: cert.claimed_bound,
        achieved: cert.achieved,
        params,
        trace: cert
            .trace
            .iter()
            .map(|r| TraceJson {
                chosen_index: r.chosen_index + 1,
                barrier_before: r.barrier_before,
                barrier_after: r.barrier_after,
                potential_before: r.potential_before,
                potential_after: r.potential_after,
                feasibility_margin: r.feasibility_margin,
                aggregate_margin: r.aggregate_margin,
                lambda_max_after: r.lambda_max_after,
            })
            .collect(),
        warnings: cert.warnings.clone(),
        tool_version: TOOL_VERSION.into(),
    };
    serde_json::to_value(doc).expect("certificate serialization cannot fail")
}

fn param_f64(map: &Map<String, Value>, key: &str) -> Result<f64> {
    map.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::MalformedCertificate(format!("params.{key} missing or not a number")))
}

/// Parses a certificate JSON document back into its in-memory form
/// (σ back to 0-based).
pub fn certificate_from_json(value: &Value) -> Result<SelectionCertificate> {
    let doc: CertificateJson = serde_json::from_value(value.clone())
        .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    if doc.sigma.iter().any(|&j| j == 0) {
        return Err(Error::MalformedCertificate(
            "sigma entries are 1-based and must be positive".into(),
        ));
    }
    let kind = match doc.kind.as_str() {
        "restricted-invertibility" => CertKind::RestrictedInvertibility,
        "norm-bound" => CertKind::NormBound,
        other => {
            return Err(Error::MalformedCertificate(format!(
                "unknown certificate kind '{other}'"
            )))
        }
    };
    let params = match kind {
        CertKind::RestrictedInvertibility => CertParams::Ri {
            eps: param_f64(&doc.params, "eps")?,
            b0: param_f64(&doc.params, "b0")?,
            delta: param_f64(&doc.params, "delta")?,
            final_barrier: param_f64(&doc.params, "final_barrier")?,
            tie_break: doc
                .params
                .get("tie_break")
                .and_then(Value::as_str)
                .unwrap_or("max-margin-ratio")
                .into(),
        },
        CertKind::NormBound => CertParams::Kt {
            lambda: param_f64(&doc.params, "lambda")?,
            eta: param_f64(&doc.params, "eta")?,
            delta: param_f64(&doc.params, "delta")?,
            weight: param_f64(&doc.params, "weight")?,
            u0: param_f64(&doc.params, "u0")?,
            final_barrier: param_f64(&doc.params, "final_barrier")?,
            simplified_bound: doc.params.get("simplified_bound").and_then(Value::as_f64),
            tie_break: doc
                .params
                .get("tie_break")
                .and_then(Value::as_str)
                .unwrap_or("min-F")
                .into(),
        },
    };
    Ok(SelectionCertificate {
        kind,
        sigma: doc.sigma.iter().map(|&j| j - 1).collect(),
        target_size: doc.k,
        claimed_bound: doc.claimed_bound,
        achieved: doc.achieved,
        params,
        trace: doc
            .trace
            .into_iter()
            .map(|r| StepRecord {
                chosen_index: r.chosen_index.saturating_sub(1),
                barrier_before: r.barrier_before,
                barrier_after: r.barrier_after,
                potential_before: r.potential_before,
                potential_after: r.potential_after,
                feasibility_margin: r.feasibility_margin,
                aggregate_margin: r.aggregate_margin,
                lambda_max_after: r.lambda_max_after,
            })
            .collect(),
        warnings: doc.warnings,
    })
}

fn read_certificate(path: &Path) -> Result<SelectionCertificate> {
    let content = read_file(path)?;
    let value: Value = serde_json::from_str(&content).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    certificate_from_json(&value)
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    text.push('\n');
    write_file(path, &text)
}

fn print_report(report: &VerificationReport) {
    println!("{:<24} {:<6} detail", "clause", "status");
    for c in &report.clauses {
        println!(
            "{:<24} {:<6} {}",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.detail
        );
    }
}
