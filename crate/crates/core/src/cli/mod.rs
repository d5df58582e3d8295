//! Command-line surface: `list`, `run` and `paper-suite`.
//!
//! Exit codes: 0 pass, 1 usage or configuration error, 2 inconclusive
//! constant-matrix condition, 3 quadrature failure, 4 loss of positivity,
//! 5 failed check.

pub mod report;
pub mod suite;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::commuting::commutant::{diffop_commutant_search, tridiagonal_commutant};
use crate::commuting::setup::{build_estar_e, commutation_residual, gap_ratio, random_symmetric, TimeBandSetup};
use crate::commuting::{solve_hyp, HypSolution};
use crate::diffop::{check_symmetry, Domain, RightDiffOp};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, Matrix};
use crate::orthopoly::{monic_sequence, MonicSequence, MAX_DEGREE};
use crate::reference;
use crate::weights::catalog::catalog_schema;
use crate::weights::{catalog_get, CatalogEntry};

use report::*;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_QUADRATURE: i32 = 3;
pub const EXIT_POSITIVITY: i32 = 4;
pub const EXIT_CHECK: i32 = 5;

/// Kernel probes and random polynomials used by `run`.
pub const KERNEL_PROBES: usize = 100;
pub const RANDOM_POLYNOMIALS: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "bispectral",
    version,
    about = "Matrix orthogonal polynomials, commuting operators and time-and-band limiting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the catalog weights, their parameters and operators
    List {
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Build and verify the commuting operators for one weight, operator, N and Ω
    Run(RunArgs),
    /// Reproduce the published examples as named checks
    PaperSuite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub weight: String,
    /// Weight parameters as a JSON object
    #[arg(long, default_value = "{}")]
    pub params: String,
    /// Operator index or label, or `combo:c0,c1,...` with one rational coefficient per operator
    #[arg(long, default_value = "0")]
    pub op: String,
    /// Time cutoff
    #[arg(long = "N")]
    pub n: usize,
    /// Band cutoff, strictly inside the interval
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    /// Last block index of L (default N + 4, at least 12, at most 19)
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Truncated-quadrature tolerance
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coefficient degree of the differential commutant search
    #[arg(long, default_value_t = 6)]
    pub search_degree: usize,
    /// Report file; `-` writes the report to standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Pass when no commuting operator exists instead
    #[arg(long)]
    pub expect_no_commuting: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    /// Run one example group only (see `list` for names)
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Exit code for a pipeline error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::HypInconclusive { .. } => EXIT_INCONCLUSIVE,
        Error::QuadratureDegree { .. } | Error::QuadratureFailure(_) => EXIT_QUADRATURE,
        Error::Positivity { .. } | Error::NotPositiveDefinite { .. } => EXIT_POSITIVITY,
        Error::InvalidParameter(_)
        | Error::UnknownWeight(_)
        | Error::OutsideInterval { .. }
        | Error::NotClassicalShape
        | Error::DimensionMismatch { .. } => EXIT_USAGE,
        _ => EXIT_CHECK,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match cli.command {
        Command::List { json } => cmd_list(json),
        Command::Run(args) => match cmd_run(&args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
        Command::PaperSuite(args) => match suite::cmd_paper_suite(&args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                exit_code(&e)
            }
        },
    }
}

fn cmd_list(json: bool) -> i32 {
    let schema = catalog_schema();
    if json {
        println!("{}", serde_json::to_string_pretty(&schema).expect("schema serializes"));
    } else {
        for s in &schema {
            let params: Vec<String> = s
                .params
                .iter()
                .map(|p| format!("{}={} ({})", p.name, p.default, p.constraint))
                .collect();
            println!(
                "{:<14} {:<12} operators [{}]  params {}",
                s.name,
                s.interval,
                s.operators.join(", "),
                if params.is_empty() {
                    "none".to_string()
                } else {
                    params.join(", ")
                }
            );
        }
    }
    EXIT_PASS
}

/// `a/b` or a decimal.
fn parse_rational(s: &str) -> Result<f64> {
    let bad = || Error::InvalidParameter(format!("`{s}` is not a rational coefficient"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(bad());
            }
            a / b
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Operator chosen by index, label or `combo:` coefficients, with its label
/// and (for catalog operators) its closed-form eigenvalue.
pub fn select_operator(entry: &CatalogEntry, sel: &str) -> Result<(RightDiffOp, String, Option<usize>)> {
    if let Some(rest) = sel.strip_prefix("combo:") {
        let coeffs = rest.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        if coeffs.len() != entry.operators.len() {
            return Err(Error::InvalidParameter(format!(
                "`{}` has {} operators but {} coefficients were given",
                entry.name,
                entry.operators.len(),
                coeffs.len()
            )));
        }
        let terms: Vec<(f64, &RightDiffOp)> = coeffs
            .iter()
            .copied()
            .zip(entry.operators.iter().map(|o| &o.op))
            .collect();
        let label = coeffs
            .iter()
            .zip(&entry.operators)
            .map(|(c, o)| format!("{c}·{}", o.label))
            .collect::<Vec<_>>()
            .join(" + ");
        return Ok((RightDiffOp::combination(&terms), label, None));
    }
    if let Ok(i) = sel.parse::<usize>() {
        let o = entry
            .operators
            .get(i)
            .ok_or_else(|| Error::InvalidParameter(format!("`{}` has no operator with index {i}", entry.name)))?;
        return Ok((o.op.clone(), o.label.clone(), Some(i)));
    }
    entry
        .operators
        .iter()
        .position(|o| o.label == sel)
        .map(|i| (entry.operators[i].op.clone(), entry.operators[i].label.clone(), Some(i)))
        .ok_or_else(|| Error::InvalidParameter(format!("`{}` has no operator `{sel}`", entry.name)))
}

/// Published constant matrices applicable to a configuration, each with its
/// corrected counterpart when it is a known misprint.
pub fn published_m(entry: &CatalogEntry, label: &str, n: usize) -> Vec<(String, Matrix, Option<Matrix>)> {
    match (entry.name.as_str(), label) {
        ("gegenbauer", "D1") => {
            let (p, q) = (entry.param("p"), entry.param("q"));
            vec![(
                "m1-published".into(),
                reference::gegenbauer_m1_printed(p, q, n),
                Some(reference::gegenbauer_m1(p, q, n)),
            )]
        }
        ("gegenbauer", "D2") => {
            let (p, q) = (entry.param("p"), entry.param("q"));
            vec![(
                "m2-published".into(),
                reference::gegenbauer_m2_printed(p, q, n),
                Some(reference::gegenbauer_m2(p, q, n)),
            )]
        }
        ("jacobi_cg7", "D") => {
            vec![(
                "m-published".into(),
                reference::jacobi_cg7_m(entry.param("alpha"), entry.param("beta"), n),
                None,
            )]
        }
        ("ddi_pair", "(D+ - D-)/2") => vec![(
            "m-published".into(),
            reference::ddi_m_printed(),
            Some(reference::ddi_m()),
        )],
        _ => vec![],
    }
}

/// Membership of published matrices in the solution set, with the corrected
/// value as a second entry when the published one is a known misprint.
pub fn memberships(
    hyp: &HypSolution,
    published: &[(String, Matrix, Option<Matrix>)],
    checks: &mut Vec<NamedCheck>,
) -> Vec<Membership> {
    let mut out = Vec::new();
    for (name, m, corrected) in published {
        let stem = name.trim_end_matches("-published");
        let d = hyp.distance(m);
        let mut check = NamedCheck::below(&format!("hyp-contains-{name}"), d, 1e-8);
        let fixed = corrected.as_ref().map(|c| {
            let dc = hyp.distance(c);
            (
                c,
                dc,
                NamedCheck::below(&format!("hyp-contains-{stem}-corrected"), dc, 1e-8),
            )
        });
        if let Some((_, _, cc)) = &fixed {
            check = check.erratum_if(cc);
        }
        out.push(Membership {
            name: name.clone(),
            m: rows(m),
            distance: d,
            status: check.status,
        });
        checks.push(check);
        if let Some((c, dc, cc)) = fixed {
            out.push(Membership {
                name: format!("{stem}-corrected"),
                m: rows(c),
                distance: dc,
                status: cc.status,
            });
            checks.push(cc);
        }
    }
    out
}

/// `max ‖RₙD − ΛₙRₙ‖ / ‖Rₙ‖` (coefficient max norm), `n ≤ upto`.
pub fn eigen_defect(seq: &MonicSequence, d: &RightDiffOp, upto: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for n in 0..=upto.min(seq.n_max) {
        let r = &seq.r[n];
        let lam = d.monic_eigenvalue(n)?;
        let diff = &d.apply_right(r) - &r.left_mul(&lam);
        worst = worst.max(diff.coeff_max_abs() / r.coeff_max_abs());
    }
    Ok(worst)
}

fn sequence_diagnostics(
    seq: &MonicSequence,
    d: &RightDiffOp,
    entry: &CatalogEntry,
    index: Option<usize>,
) -> Result<SequenceDiagnostics> {
    let upto = seq.n_max.min(12);
    let catalog_eigenvalue_defect = match index {
        Some(i) => {
            let f = &entry.operators[i].eigenvalue;
            let mut worst = 0.0_f64;
            for n in 0..=10 {
                worst = worst.max(max_abs(&(f(n) - d.monic_eigenvalue(n)?)));
            }
            Some(worst)
        }
        None => None,
    };
    Ok(SequenceDiagnostics {
        checked_upto: upto,
        orthonormality_defect: seq.orthonormality_defect(upto)?,
        recursion_defect: seq.recursion_defect(),
        a_consistency_defect: seq.a_consistency_defect(),
        a_tilde_consistency_defect: seq.a_tilde_consistency_defect(),
        b_symmetry_defect: seq.b_symmetry_defect(),
        eigen_defect: eigen_defect(seq, d, 10)?,
        catalog_eigenvalue_defect,
    })
}

/// Validated configuration for `run`.
pub fn resolve_config(args: &RunArgs) -> Result<(RunConfig, CatalogEntry, RightDiffOp, Option<usize>)> {
    let params: Value = serde_json::from_str(&args.params)
        .map_err(|e| Error::InvalidParameter(format!("--params is not valid JSON: {e}")))?;
    let entry = catalog_get(&args.weight, &params)?;
    let (op, op_label, index) = select_operator(&entry, &args.op)?;
    let (a, b) = entry.weight.interval();
    if !(args.omega > a && args.omega < b) {
        return Err(Error::InvalidParameter(format!(
            "omega = {} must lie strictly inside ({a}, {b})",
            args.omega
        )));
    }
    let limit = MAX_DEGREE - 1;
    let n_max = args.nmax.unwrap_or((args.n + 4).max(12).min(limit));
    if n_max < args.n + 2 || n_max > limit {
        return Err(Error::InvalidParameter(format!(
            "nmax = {n_max} must satisfy N + 2 = {} <= nmax <= {limit}",
            args.n + 2
        )));
    }
    if !(args.tol > 0.0 && args.tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tol = {} must lie in (0, 1)",
            args.tol
        )));
    }
    let config = RunConfig {
        weight: entry.name.clone(),
        params: entry.params.clone(),
        op: args.op.clone(),
        op_label,
        n: args.n,
        omega: args.omega,
        n_max,
        tol: args.tol,
        seed: args.seed,
        search_degree: args.search_degree,
        expect_no_commuting: args.expect_no_commuting,
    };
    Ok((config, entry, op, index))
}

/// Runs the whole pipeline for a configuration.
pub fn run_report(args: &RunArgs) -> Result<Report> {
    let (config, entry, d, index) = resolve_config(args)?;
    let w = &entry.weight;
    let (n, omega) = (config.n, config.omega);
    let d = d.to_frame(w.frame());
    let seq = monic_sequence(w, config.n_max + 1)?;
    let mut checks = Vec::new();

    let sequence = sequence_diagnostics(&seq, &d, &entry, index)?;
    checks.push(NamedCheck::below(
        "orthonormality",
        sequence.orthonormality_defect,
        1e-9,
    ));
    checks.push(NamedCheck::below("monic-eigenvalue", sequence.eigen_defect, 1e-9));
    if let Some(v) = sequence.catalog_eigenvalue_defect {
        checks.push(NamedCheck::below("closed-form-eigenvalue", v, 1e-9));
    }
    let d_symmetry = check_symmetry(&d, w, Domain::Full);
    checks.push(
        NamedCheck::below("d-symmetric", d_symmetry.max_residual(), d_symmetry.tolerance)
            .with_detail(format!("boundary defect {:.2e}", d_symmetry.max_boundary_defect())),
    );

    let hyp = solve_hyp(w, &d, n)?;
    let mut member_checks = Vec::new();
    let published = published_m(&entry, &config.op_label, n);
    let members = if hyp.exists {
        memberships(&hyp, &published, &mut member_checks)
    } else {
        vec![]
    };
    let hyp_summary = HypSummary {
        exists: hyp.exists,
        normalized_min_residual: hyp.normalized_min_residual,
        lambda_bar: rows(&hyp.lambda_bar),
        canonical_m: rows(&hyp.canonical_m()),
        nullspace_dimension: hyp.solutions.dimension(),
        nullspace: hyp.nullspace_matrices().iter().map(rows).collect(),
        memberships: members,
    };

    let mut commuting = None;
    let estar_e;
    let mut t = None;
    if hyp.exists {
        checks.push(NamedCheck::below(
            "hyp-exists",
            hyp.normalized_min_residual,
            crate::commuting::hyp::EXISTS_TOL,
        ));
        checks.extend(member_checks);
        let setup = TimeBandSetup::with_m(w, &d, n, omega, config.n_max, config.tol, Some(hyp.canonical_m()))?;
        let summary = commuting_summary(&setup, config.seed)?;
        push_commuting_checks(&summary, &mut checks);
        commuting = Some(summary);
        estar_e = setup.estar_e.clone();
        t = Some(setup.t.clone());
    } else {
        let name = if config.expect_no_commuting {
            "hyp-not-satisfied"
        } else {
            "hyp-exists"
        };
        let check = if config.expect_no_commuting {
            NamedCheck::above(name, hyp.normalized_min_residual, crate::commuting::hyp::NOT_EXISTS_TOL)
        } else {
            NamedCheck::below(name, hyp.normalized_min_residual, crate::commuting::hyp::EXISTS_TOL)
        };
        checks.push(check);
        estar_e = build_estar_e(&seq, w, n, omega, config.tol)?;
    }
    if hyp.exists && config.expect_no_commuting {
        checks.push(NamedCheck::above(
            "hyp-not-satisfied",
            hyp.normalized_min_residual,
            crate::commuting::hyp::NOT_EXISTS_TOL,
        ));
    }

    let tri = tridiagonal_commutant(&estar_e);
    let search = diffop_commutant_search(&seq, w, n, omega, config.search_degree, config.seed)?;
    let id = RightDiffOp::identity(w.dim(), w.frame());
    let identity_distance = search.subspace_distance(&search.bounded, &[id]);
    let t_distance = t
        .as_ref()
        .map(|t| search.subspace_distance(&search.bounded, std::slice::from_ref(t)));
    checks.push(NamedCheck::below(
        "identity-in-tridiagonal-commutant",
        tri.identity_distance,
        1e-8,
    ));
    checks.push(NamedCheck::below(
        "identity-in-diffop-commutant",
        identity_distance,
        1e-8,
    ));
    if let Some(td) = t_distance {
        checks.push(NamedCheck::below("t-in-diffop-commutant", td, 1e-8));
    }
    if config.expect_no_commuting {
        checks.push(NamedCheck::equal("tridiagonal-commutant-trivial", tri.dimension, 1));
        checks.push(NamedCheck::equal(
            "diffop-commutant-trivial",
            search.bounded.dimension,
            1,
        ));
        if entry.name == "hermite_cg06" && n >= 1 && config.search_degree >= 2 {
            let fam = reference::hermite_family_basis(n, w.frame());
            checks.push(NamedCheck::below(
                "published-family-in-symmetric-stage",
                search.subspace_distance(&search.symmetric, &fam),
                1e-6,
            ));
            checks.push(NamedCheck::equal(
                "symmetric-stage-dimension",
                search.symmetric.dimension,
                3,
            ));
        }
    } else {
        checks.push(NamedCheck::at_least(
            "tridiagonal-commutant-nontrivial",
            tri.dimension,
            2,
        ));
    }
    let commutant = CommutantSummary {
        tridiagonal_parameters: tri.parameters,
        tridiagonal_dimension: tri.dimension,
        tridiagonal_identity_distance: tri.identity_distance,
        search_degree: config.search_degree,
        search_unknowns: search.unknowns,
        kernel_dimension: search.kernel.dimension,
        symmetric_dimension: search.symmetric.dimension,
        bounded_dimension: search.bounded.dimension,
        bounded_rank_gap: search.bounded.rank_gap,
        identity_distance,
        t_distance,
    };
    Ok(Report {
        config,
        sequence,
        d_symmetry,
        hyp: hyp_summary,
        commuting,
        commutant,
        checks,
    })
}

fn commuting_summary(setup: &TimeBandSetup, seed: u64) -> Result<CommutingSummary> {
    let w = &setup.weight;
    let kernel = setup.check_kernel_commutation(KERNEL_PROBES, RANDOM_POLYNOMIALS, seed)?;
    let comm = setup.verify_commutation()?;
    let corrupted =
        setup.check_kernel_commutation_for(&setup.corrupted_t(), KERNEL_PROBES, RANDOM_POLYNOMIALS, seed)?;
    let l_hat = setup.l_hat();
    let random_l = random_symmetric(l_hat.nrows(), seed ^ 0x1abe1);
    let spectrum = comm.joint.spectrum.clone();
    Ok(CommutingSummary {
        m: rows(&setup.m),
        t: OperatorCoeffs::of(&setup.t),
        t_symmetry_full: check_symmetry(&setup.t, w, Domain::Full),
        t_symmetry_truncated: check_symmetry(&setup.t, w, Domain::Truncated { omega: setup.omega }),
        l_diagonal: setup.l.diagonal.iter().map(rows).collect(),
        l_upper: setup.l.upper.iter().map(rows).collect(),
        x_cross_check: setup.x_cross_check()?,
        x_n: max_abs(&setup.l.upper[setup.n]),
        estar_e: rows(&setup.estar_e.data),
        comm_residual: comm.comm_residual,
        kernel_residual: kernel.kernel_residual,
        operator_residual: kernel.operator_residual,
        l_hat_gaps: spectrum.windows(2).map(|p| p[1] - p[0]).collect(),
        l_hat_spectrum: spectrum,
        l_hat_min_gap: comm.joint.min_gap,
        l_hat_clusters: comm.joint.clusters,
        joint_offdiag: comm.joint.offdiag,
        estar_e_gap_ratio: gap_ratio(&comm.estar_e_spectrum),
        estar_e_spectrum: comm.estar_e_spectrum,
        corrupted_kernel_residual: corrupted.kernel_residual,
        corrupted_operator_residual: corrupted.operator_residual,
        random_l_comm_residual: commutation_residual(&random_l, &setup.estar_e.data),
    })
}

fn push_commuting_checks(c: &CommutingSummary, checks: &mut Vec<NamedCheck>) {
    checks.push(NamedCheck::below(
        "t-symmetric-full",
        c.t_symmetry_full.max_residual(),
        c.t_symmetry_full.tolerance,
    ));
    checks.push(NamedCheck::below(
        "t-symmetric-truncated",
        c.t_symmetry_truncated.max_residual(),
        c.t_symmetry_truncated.tolerance,
    ));
    checks.push(NamedCheck::below("x-closed-form", c.x_cross_check, 1e-9));
    checks.push(NamedCheck::below("x-n-decoupling", c.x_n, 1e-10));
    let lo = c.estar_e_spectrum.first().copied().unwrap_or(0.0);
    let hi = c.estar_e_spectrum.last().copied().unwrap_or(0.0);
    checks.push(NamedCheck::below(
        "estar-e-spectrum-in-unit-interval",
        (-lo).max(hi - 1.0).max(0.0),
        1e-8,
    ));
    checks.push(NamedCheck::below("l-hat-commutes-with-estar-e", c.comm_residual, 1e-8));
    checks.push(NamedCheck::below("kernel-identity", c.kernel_residual, 1e-8));
    checks.push(NamedCheck::below("operator-identity", c.operator_residual, 1e-8));
    checks.push(
        NamedCheck::below("joint-diagonalization", c.joint_offdiag, 1e-6).with_detail(format!(
            "{} clusters, E*E gap ratio {:.2e}",
            c.l_hat_clusters, c.estar_e_gap_ratio
        )),
    );
    checks.push(NamedCheck::above(
        "control-corrupted-m-kernel",
        c.corrupted_kernel_residual,
        1e-3,
    ));
    checks.push(NamedCheck::above(
        "control-random-l-commutator",
        c.random_l_comm_residual,
        1e-2,
    ));
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    let Some(path) = out else { return Ok(()) };
    let res = if path.as_os_str() == "-" {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        std::fs::write(path, text)
    };
    res.map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))
}

/// Verdict lines go to standard error when the report itself is on standard output.
fn print_lines(out: &Option<PathBuf>, lines: impl IntoIterator<Item = String>) {
    let to_stderr = out.as_ref().is_some_and(|p| p.as_os_str() == "-");
    for l in lines {
        if to_stderr {
            eprintln!("{l}");
        } else {
            println!("{l}");
        }
    }
}

pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

fn cmd_run(args: &RunArgs) -> Result<i32> {
    let report = run_report(args)?;
    let text = match args.format {
        Format::Json => report_json(&report),
        Format::Csv => spectra_csv(&report).map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?,
    };
    write_output(&args.out, &text)?;
    print_lines(&args.out, report.checks.iter().map(NamedCheck::line));
    Ok(if report.passed() { EXIT_PASS } else { EXIT_CHECK })
}
