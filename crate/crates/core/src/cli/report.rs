//! Serializable report documents. Matrices are row-major nested arrays.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diffop::{RightDiffOp, SymmetryReport};
use crate::linalg::{to_rows, Matrix};

pub type Rows = Vec<Vec<f64>>;

pub fn rows(m: &Matrix) -> Rows {
    to_rows(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A published value that is not reproduced, while its corrected
    /// counterpart is. Does not count as a failure.
    KnownErratum,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::KnownErratum => "ERRATUM",
        })
    }
}

/// Comparison direction of a check value against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Below,
    Above,
    Equal,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl NamedCheck {
    fn new(name: &str, value: f64, bound: Bound, threshold: f64) -> Self {
        let ok = match bound {
            Bound::Below => value < threshold,
            Bound::Above => value > threshold,
            Bound::Equal => value == threshold,
            Bound::AtLeast => value >= threshold,
        };
        Self {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            value,
            bound,
            threshold,
            detail: String::new(),
        }
    }

    /// Passes when `value < threshold`.
    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Bound::Below, threshold)
    }

    /// Passes when `value > threshold`.
    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Bound::Above, threshold)
    }

    /// Passes when `value == expected` (integer-valued quantities).
    pub fn equal(name: &str, value: usize, expected: usize) -> Self {
        Self::new(name, value as f64, Bound::Equal, expected as f64)
    }

    pub fn at_least(name: &str, value: usize, minimum: usize) -> Self {
        Self::new(name, value as f64, Bound::AtLeast, minimum as f64)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// Downgrades a failure to [`Status::KnownErratum`] when `corrected` passes.
    pub fn erratum_if(mut self, corrected: &NamedCheck) -> Self {
        if self.status == Status::Fail && corrected.status == Status::Pass {
            self.status = Status::KnownErratum;
        }
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn line(&self) -> String {
        let op = match self.bound {
            Bound::Below => "<",
            Bound::Above => ">",
            Bound::Equal => "==",
            Bound::AtLeast => ">=",
        };
        let mut s = format!(
            "{:<8}{:<64} {:.3e} {op} {:.1e}",
            self.status.to_string(),
            self.name,
            self.value,
            self.threshold
        );
        if !self.detail.is_empty() {
            s.push_str("  ");
            s.push_str(&self.detail);
        }
        s
    }
}

/// `F₂, F₁, F₀` as lists of `x`-power coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorCoeffs {
    pub f2: Vec<Rows>,
    pub f1: Vec<Rows>,
    pub f0: Vec<Rows>,
}

impl OperatorCoeffs {
    pub fn of(d: &RightDiffOp) -> Self {
        let c = |p: &crate::weights::MatrixPolynomial| p.x_coeffs().iter().map(rows).collect();
        Self {
            f2: c(d.f2()),
            f1: c(d.f1()),
            f0: c(d.f0()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub weight: String,
    /// Resolved parameters, defaults filled in.
    pub params: std::collections::BTreeMap<String, f64>,
    pub op: String,
    /// Label of the selected operator or description of the combination.
    pub op_label: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub omega: f64,
    pub n_max: usize,
    pub tol: f64,
    pub seed: u64,
    pub search_degree: usize,
    pub expect_no_commuting: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDiagnostics {
    /// Degrees covered by `orthonormality_defect`.
    pub checked_upto: usize,
    pub orthonormality_defect: f64,
    pub recursion_defect: f64,
    pub a_consistency_defect: f64,
    pub a_tilde_consistency_defect: f64,
    pub b_symmetry_defect: f64,
    /// `max ‖RₙD − ΛₙRₙ‖ / ‖Rₙ‖` in coefficient norm, `n ≤ 10`.
    pub eigen_defect: f64,
    /// Largest gap between the catalog's closed-form `Λₙ` and `Λₙ` from the leading coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog_eigenvalue_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub name: String,
    pub m: Rows,
    pub distance: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypSummary {
    pub exists: bool,
    pub normalized_min_residual: f64,
    pub lambda_bar: Rows,
    pub canonical_m: Rows,
    pub nullspace_dimension: usize,
    pub nullspace: Vec<Rows>,
    pub memberships: Vec<Membership>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingSummary {
    pub m: Rows,
    /// Coefficients of `½T`.
    pub t: OperatorCoeffs,
    pub t_symmetry_full: SymmetryReport,
    pub t_symmetry_truncated: SymmetryReport,
    pub l_diagonal: Vec<Rows>,
    pub l_upper: Vec<Rows>,
    /// Max relative gap between closed-form and quadrature `Xₙ`.
    pub x_cross_check: f64,
    /// `max |X_N|`.
    pub x_n: f64,
    pub estar_e: Rows,
    pub comm_residual: f64,
    pub kernel_residual: f64,
    pub operator_residual: f64,
    pub l_hat_spectrum: Vec<f64>,
    pub l_hat_gaps: Vec<f64>,
    pub l_hat_min_gap: f64,
    pub l_hat_clusters: usize,
    pub joint_offdiag: f64,
    pub estar_e_spectrum: Vec<f64>,
    pub estar_e_gap_ratio: f64,
    pub corrupted_kernel_residual: f64,
    pub corrupted_operator_residual: f64,
    pub random_l_comm_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutantSummary {
    pub tridiagonal_parameters: usize,
    pub tridiagonal_dimension: usize,
    pub tridiagonal_identity_distance: f64,
    pub search_degree: usize,
    pub search_unknowns: usize,
    pub kernel_dimension: usize,
    pub symmetric_dimension: usize,
    pub bounded_dimension: usize,
    pub bounded_rank_gap: Option<f64>,
    /// Relative distance of the identity to the final search stage.
    pub identity_distance: f64,
    /// Relative distance of `½T` to the final search stage, when `T` exists.
    pub t_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub sequence: SequenceDiagnostics,
    pub d_symmetry: SymmetryReport,
    pub hyp: HypSummary,
    pub commuting: Option<CommutingSummary>,
    pub commutant: CommutantSummary,
    pub checks: Vec<NamedCheck>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.failed())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub groups: Vec<String>,
    pub checks: Vec<NamedCheck>,
}

impl SuiteReport {
    pub fn failures(&self) -> Vec<&NamedCheck> {
        self.checks.iter().filter(|c| c.failed()).collect()
    }
}

/// `quantity,index,value` rows for the spectra of a report.
pub fn spectra_csv(report: &Report) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "index", "value"])?;
    if let Some(c) = &report.commuting {
        for (name, vals) in [("l_hat", &c.l_hat_spectrum), ("estar_e", &c.estar_e_spectrum)] {
            for (i, v) in vals.iter().enumerate() {
                w.write_record([name.to_string(), i.to_string(), format!("{v:e}")])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// `name,status,value,threshold` rows for a suite report.
pub fn suite_csv(report: &SuiteReport) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "status", "value", "threshold"])?;
    for c in &report.checks {
        w.write_record([
            c.name.clone(),
            c.status.to_string(),
            format!("{:e}", c.value),
            format!("{:e}", c.threshold),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
