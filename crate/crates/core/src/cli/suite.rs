//! The fixed list of reproductions behind `paper-suite`, grouped by catalog
//! weight. A group that errors contributes one failed check carrying the error.

use serde_json::{json, Value};

use crate::commuting::commutant::{
    commutator_residual, diffop_commutant_search, perturbed_identity, tridiagonal_commutant,
};
use crate::commuting::hyp::NOT_EXISTS_TOL;
use crate::commuting::setup::{build_estar_e, build_t, commutation_residual, random_symmetric, TimeBandSetup};
use crate::commuting::solve_hyp;
use crate::diffop::{check_symmetry, weak_symmetry_defect, Domain, RightDiffOp};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, Matrix};
use crate::orthopoly::monic_sequence;
use crate::reference;
use crate::weights::catalog::ddi_plus;
use crate::weights::{catalog_get, quad_truncated, CatalogEntry, MatrixPolynomial};

use super::report::{NamedCheck, SuiteReport};
use super::{eigen_defect, print_lines, write_output, Format, SuiteArgs, EXIT_CHECK, EXIT_PASS};

pub const GROUPS: [&str; 5] = ["scalar_jacobi", "gegenbauer", "jacobi_cg7", "ddi_pair", "hermite_cg06"];

fn entry(name: &str, params: Value) -> Result<CatalogEntry> {
    catalog_get(name, &params)
}

fn op<'a>(e: &'a CatalogEntry, label: &str) -> Result<&'a RightDiffOp> {
    e.operator(label)
        .map(|o| &o.op)
        .ok_or_else(|| Error::InvalidParameter(format!("no operator {label}")))
}

/// Sequence, commutation and negative-control checks for one setup.
fn commutation_checks(
    prefix: &str,
    e: &CatalogEntry,
    d: &RightDiffOp,
    n: usize,
    omega: f64,
    seed: u64,
) -> Result<Vec<NamedCheck>> {
    let setup = TimeBandSetup::new(&e.weight, d, n, omega, (n + 4).max(12), 1e-12)?;
    let name = |s: &str| format!("{prefix}/{s}");
    let kernel = setup.check_kernel_commutation(100, 20, seed)?;
    let comm = setup.verify_commutation()?;
    let bad = setup.check_kernel_commutation_for(&setup.corrupted_t(), 100, 20, seed)?;
    let random_l = random_symmetric(setup.l_hat().nrows(), seed ^ 0x1abe1);
    Ok(vec![
        NamedCheck::below(&name("orthonormality"), setup.sequence.orthonormality_defect(12)?, 1e-9),
        NamedCheck::below(
            &name("monic-eigenvalue"),
            eigen_defect(&setup.sequence, &setup.d, 10)?,
            1e-9,
        ),
        NamedCheck::below(&name("x-closed-form"), setup.x_cross_check()?, 1e-9),
        NamedCheck::below(&name("x-n-decoupling"), max_abs(&setup.l.upper[n]), 1e-10),
        NamedCheck::below(&name("l-hat-commutes-with-estar-e"), comm.comm_residual, 1e-8),
        NamedCheck::below(&name("kernel-identity"), kernel.kernel_residual, 1e-8),
        NamedCheck::below(&name("operator-identity"), kernel.operator_residual, 1e-8),
        NamedCheck::below(&name("joint-diagonalization"), comm.joint.offdiag, 1e-6)
            .with_detail(format!("E*E gap ratio {:.2e}", comm.estar_e_gap_ratio)),
        NamedCheck::above(&name("control-corrupted-m-kernel"), bad.kernel_residual, 1e-3),
        NamedCheck::above(&name("control-corrupted-m-operator"), bad.operator_residual, 1e-3),
        NamedCheck::above(
            &name("control-random-l-commutator"),
            commutation_residual(&random_l, &setup.estar_e.data),
            1e-2,
        ),
    ])
}

fn scalar_jacobi(seed: u64) -> Result<Vec<NamedCheck>> {
    let e = entry("scalar_jacobi", Value::Null)?;
    let d = op(&e, "D")?;
    let mut out = Vec::new();
    let hyp = solve_hyp(&e.weight, d, 3)?;
    out.push(NamedCheck::below(
        "scalar/hyp-m-zero",
        max_abs(&hyp.canonical_m()),
        1e-12,
    ));
    out.push(NamedCheck::equal("scalar/hyp-nullspace", hyp.solutions.dimension(), 1));
    out.extend(commutation_checks("scalar/N=10/omega=0.6", &e, d, 10, 0.6, seed)?);
    let small = TimeBandSetup::new(&e.weight, d, 0, 0.6, 12, 1e-12)?;
    out.push(NamedCheck::below(
        "scalar/N=0/kernel-identity",
        small.check_kernel_commutation(100, 20, seed)?.kernel_residual,
        1e-10,
    ));
    // T symmetric on [0, Ω] for random Ω, checked by quadrature
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..5 {
        let omega = rand::Rng::gen_range(&mut rng, 0.05..0.95);
        let t = build_t(&e.weight, d, &Matrix::zeros(1, 1), 4, omega)?;
        let rule = quad_truncated(&e.weight, omega, 12, 1e-12)?;
        for _ in 0..10 {
            let p = crate::commuting::setup::random_polynomial(&e.weight, 4, &mut rng);
            let q = crate::commuting::setup::random_polynomial(&e.weight, 4, &mut rng);
            worst = worst.max(weak_symmetry_defect(&t, &p, &q, &rule)?);
        }
    }
    out.push(NamedCheck::below("scalar/t-weakly-symmetric-truncated", worst, 1e-9));
    Ok(out)
}

fn gegenbauer(seed: u64) -> Result<Vec<NamedCheck>> {
    let mut out = Vec::new();
    for (p, q) in [(1.0, 3.0), (2.0, 5.0), (1.5, 4.0)] {
        let e = entry("gegenbauer", json!({"p": p, "q": q}))?;
        for n in [1usize, 2, 5] {
            for (label, printed, fixed) in [
                (
                    "D1",
                    reference::gegenbauer_m1_printed(p, q, n),
                    reference::gegenbauer_m1(p, q, n),
                ),
                (
                    "D2",
                    reference::gegenbauer_m2_printed(p, q, n),
                    reference::gegenbauer_m2(p, q, n),
                ),
            ] {
                let hyp = solve_hyp(&e.weight, op(&e, label)?, n)?;
                let prefix = format!("gegenbauer/p={p},q={q}/N={n}/{label}");
                let cc = NamedCheck::below(
                    &format!("{prefix}/hyp-contains-m-corrected"),
                    hyp.distance(&fixed),
                    1e-8,
                );
                out.push(
                    NamedCheck::below(
                        &format!("{prefix}/hyp-contains-m-published"),
                        hyp.distance(&printed),
                        1e-8,
                    )
                    .erratum_if(&cc),
                );
                out.push(cc);
            }
        }
    }
    let e = entry("gegenbauer", Value::Null)?;
    let (p, q) = (e.param("p"), e.param("q"));
    let (d1, d2) = (op(&e, "D1")?, op(&e, "D2")?);
    let sum = d1.add(d2);
    let hyp = solve_hyp(&e.weight, &sum, 3)?;
    let cc = NamedCheck::below(
        "gegenbauer/D1+D2/hyp-contains-plus-2j",
        hyp.distance(&(reference::gegenbauer_j(p, q) * 2.0)),
        1e-8,
    );
    out.push(
        NamedCheck::below(
            "gegenbauer/D1+D2/hyp-contains-published-sum",
            hyp.distance(&reference::gegenbauer_m_sum_printed(p, q)),
            1e-8,
        )
        .erratum_if(&cc),
    );
    out.push(cc);
    out.extend(commutation_checks("gegenbauer/D1/N=8/omega=0.3", &e, d1, 8, 0.3, seed)?);
    out.extend(commutation_checks("gegenbauer/D2/N=8/omega=0.3", &e, d2, 8, 0.3, seed)?);

    let s1 = TimeBandSetup::new(&e.weight, d1, 4, 0.3, 12, 1e-12)?;
    let s2 = TimeBandSetup::new(&e.weight, d2, 4, 0.3, 12, 1e-12)?;
    let tri = tridiagonal_commutant(&s1.estar_e);
    out.push(NamedCheck::at_least(
        "gegenbauer/N=4/tridiagonal-commutant",
        tri.dimension,
        3,
    ));
    let flat: Vec<_> = tri
        .basis
        .iter()
        .map(|m| crate::linalg::Vector::from_iterator(m.len(), m.iter().copied()))
        .collect();
    let dist = [s1.l_hat(), s2.l_hat()]
        .iter()
        .map(|l| {
            crate::linalg::distance_to_span(&flat, &crate::linalg::Vector::from_iterator(l.len(), l.iter().copied()))
        })
        .fold(0.0, f64::max);
    out.push(NamedCheck::below(
        "gegenbauer/N=4/l-hats-in-tridiagonal-commutant",
        dist,
        1e-8,
    ));
    let search = diffop_commutant_search(&s1.sequence, &e.weight, 4, 0.3, 3, seed)?;
    out.push(NamedCheck::at_least(
        "gegenbauer/N=4/diffop-commutant",
        search.bounded.dimension,
        2,
    ));
    out.push(NamedCheck::below(
        "gegenbauer/N=4/t-in-diffop-commutant",
        search.subspace_distance(&search.bounded, &[s1.t.clone(), s2.t.clone()]),
        1e-8,
    ));
    Ok(out)
}

fn jacobi_cg7(seed: u64) -> Result<Vec<NamedCheck>> {
    let mut out = Vec::new();
    for (a, b, k) in [
        (1.0, 1.0, 1.5),
        (2.0, 0.5, 1.0),
        (0.5, 2.0, 0.5),
        (-0.5, 0.0, 0.25),
        (3.0, 1.5, 2.0),
    ] {
        let e = entry("jacobi_cg7", json!({"alpha": a, "beta": b, "k": k}))?;
        let d = op(&e, "D")?;
        let mut worst = 0.0_f64;
        for n in 0..=10 {
            worst = worst.max(max_abs(
                &(d.monic_eigenvalue(n)? - reference::jacobi_cg7_lambda(a, b, k, n)),
            ));
        }
        out.push(NamedCheck::below(
            &format!("jacobi_cg7/a={a},b={b},k={k}/lambda-published"),
            worst,
            1e-12,
        ));
    }
    for (a, b, k, n, omega) in [(1.0, 1.0, 1.5, 3usize, 0.4), (2.0, 0.5, 1.0, 5, 0.7)] {
        let e = entry("jacobi_cg7", json!({"alpha": a, "beta": b, "k": k}))?;
        let d = op(&e, "D")?;
        let prefix = format!("jacobi_cg7/a={a},b={b},k={k}/N={n}");
        let m = reference::jacobi_cg7_m(a, b, n);
        out.push(NamedCheck::below(
            &format!("{prefix}/hyp-contains-m-published"),
            solve_hyp(&e.weight, d, n)?.distance(&m),
            1e-8,
        ));
        let t = build_t(&e.weight, d, &m, n, omega)?;
        let dt = reference::jacobi_cg7_dtilde(a, b, k, n, omega, e.weight.frame());
        out.push(NamedCheck::below(
            &format!("{prefix}/half-t-equals-published-dtilde"),
            t.sub(&dt).coeff_max_abs(),
            1e-12,
        ));
    }
    let e = entry("jacobi_cg7", Value::Null)?;
    out.extend(commutation_checks(
        "jacobi_cg7/N=6/omega=0.4",
        &e,
        op(&e, "D")?,
        6,
        0.4,
        seed,
    )?);
    Ok(out)
}

fn ddi_pair(seed: u64) -> Result<Vec<NamedCheck>> {
    let e = entry("ddi_pair", Value::Null)?;
    let f = e.weight.frame();
    let half = op(&e, "(D+ - D-)/2")?;
    let mut out = Vec::new();
    for n in [2usize, 5] {
        for label in ["D+", "D-"] {
            let hyp = solve_hyp(&e.weight, op(&e, label)?, n)?;
            out.push(NamedCheck::above(
                &format!("ddi_pair/{label}/N={n}/hyp-not-satisfied"),
                hyp.normalized_min_residual,
                NOT_EXISTS_TOL,
            ));
        }
        let hyp = solve_hyp(&e.weight, half, n)?;
        let cc = NamedCheck::below(
            &format!("ddi_pair/half/N={n}/hyp-contains-m-corrected"),
            hyp.distance(&reference::ddi_m()),
            1e-8,
        );
        out.push(
            NamedCheck::below(
                &format!("ddi_pair/half/N={n}/hyp-contains-m-published"),
                hyp.distance(&reference::ddi_m_printed()),
                1e-8,
            )
            .erratum_if(&cc),
        );
        out.push(cc);
    }
    for (n, omega) in [(2usize, 0.5), (6, 0.25)] {
        let t = build_t(&e.weight, half, &reference::ddi_m(), n, omega)?;
        out.push(NamedCheck::below(
            &format!("ddi_pair/half/N={n}/half-t-equals-published-dtilde"),
            t.sub(&reference::ddi_dtilde(n, omega, f)).coeff_max_abs(),
            1e-12,
        ));
    }
    let cc = NamedCheck::below(
        "ddi_pair/half/expansion-corrected",
        half.sub(&reference::ddi_half(f)).coeff_max_abs(),
        1e-12,
    );
    out.push(
        NamedCheck::below(
            "ddi_pair/half/expansion-published",
            half.sub(&reference::ddi_half_printed(f)).coeff_max_abs(),
            1e-12,
        )
        .erratum_if(&cc),
    );
    out.push(cc);
    let (mut lam, mut lam_printed) = (0.0_f64, 0.0_f64);
    for n in 0..=10 {
        let l = half.monic_eigenvalue(n)?;
        lam = lam.max(max_abs(&(&l - reference::ddi_lambda(n))));
        lam_printed = lam_printed.max(max_abs(&(&l - reference::ddi_lambda_printed(n))));
    }
    let cc = NamedCheck::below("ddi_pair/half/lambda-corrected", lam, 1e-12);
    out.push(NamedCheck::below("ddi_pair/half/lambda-published", lam_printed, 1e-12).erratum_if(&cc));
    out.push(cc);
    let good = check_symmetry(&ddi_plus(f, -1.5), &e.weight, Domain::Full);
    let bad = check_symmetry(&ddi_plus(f, 1.5), &e.weight, Domain::Full);
    let cc = NamedCheck::below("ddi_pair/D+/symmetric-corrected", good.max_residual(), good.tolerance);
    out.push(NamedCheck::below("ddi_pair/D+/symmetric-published", bad.max_residual(), bad.tolerance).erratum_if(&cc));
    out.push(cc);
    out.extend(commutation_checks(
        "ddi_pair/half/N=6/omega=0.25",
        &e,
        half,
        6,
        0.25,
        seed,
    )?);
    Ok(out)
}

fn hermite_cg06(seed: u64) -> Result<Vec<NamedCheck>> {
    let e = entry("hermite_cg06", Value::Null)?;
    let w = &e.weight;
    let f = w.frame();
    let d = op(&e, "D")?;
    let mut out = Vec::new();
    for n in [2usize, 5] {
        out.push(NamedCheck::above(
            &format!("hermite_cg06/N={n}/hyp-not-satisfied"),
            solve_hyp(w, d, n)?.normalized_min_residual,
            NOT_EXISTS_TOL,
        ));
    }
    let seq = monic_sequence(w, 12)?;
    for n in [3usize, 4, 5] {
        let prefix = format!("hermite_cg06/N={n}/omega=0");
        let ee = build_estar_e(&seq, w, n, 0.0, 1e-12)?;
        let tri = tridiagonal_commutant(&ee);
        out.push(NamedCheck::equal(
            &format!("{prefix}/tridiagonal-commutant"),
            tri.dimension,
            1,
        ));
        out.push(NamedCheck::below(
            &format!("{prefix}/identity-in-tridiagonal-commutant"),
            tri.identity_distance,
            1e-8,
        ));
        let b = perturbed_identity(n + 1, 2, seed);
        out.push(NamedCheck::above(
            &format!("{prefix}/control-perturbed-identity"),
            commutator_residual(&b, &ee.data),
            1e-3,
        ));
        let search = diffop_commutant_search(&seq, w, n, 0.0, 6, seed)?;
        let fam = reference::hermite_family_basis(n, f);
        out.push(NamedCheck::equal(
            &format!("{prefix}/symmetric-stage-dimension"),
            search.symmetric.dimension,
            3,
        ));
        out.push(NamedCheck::below(
            &format!("{prefix}/published-family-in-symmetric-stage"),
            search.subspace_distance(&search.symmetric, &fam),
            1e-6,
        ));
        let corrupted = fam[0].add(&RightDiffOp::new(
            MatrixPolynomial::zero(2, f),
            MatrixPolynomial::zero(2, f),
            MatrixPolynomial::x_times(&Matrix::from_row_slice(2, 2, &[0.0, 0.0, 0.1, 0.0]), f),
        )?);
        out.push(NamedCheck::above(
            &format!("{prefix}/control-corrupted-family"),
            search.subspace_distance(&search.symmetric, &[corrupted]),
            1e-3,
        ));
        out.push(NamedCheck::equal(
            &format!("{prefix}/bounded-stage-dimension"),
            search.bounded.dimension,
            1,
        ));
        out.push(NamedCheck::below(
            &format!("{prefix}/identity-in-bounded-stage"),
            search.subspace_distance(&search.bounded, &[RightDiffOp::identity(2, f)]),
            1e-8,
        ));
    }
    // F₂(Ω)W(Ω) against the published form, scalar e^{−Ω²−2Ω}
    let mut worst = 0.0_f64;
    for omega in [0.0, 0.5, -0.7] {
        for (r1, r2) in [(1.0, 0.0), (0.0, 1.0), (0.3, -1.2)] {
            let fam = reference::hermite_family(4, r1, r2, 0.0, f);
            let got = fam.f2().eval(omega) * w.eval(omega)?;
            let want = reference::hermite_boundary_printed(4, omega, r1, r2) * (-omega * omega - 2.0 * omega).exp();
            worst = worst.max(max_abs(&(got - &want)) / max_abs(&want));
        }
    }
    out.push(NamedCheck::below(
        "hermite_cg06/boundary-matrix-published",
        worst,
        1e-12,
    ));
    Ok(out)
}

/// Runs the selected groups; a group that errors yields one failed check.
pub fn run_suite(only: Option<&str>, seed: u64) -> Result<SuiteReport> {
    let groups: Vec<&str> = match only {
        Some(g) if GROUPS.contains(&g) => vec![g],
        Some(g) => {
            return Err(Error::InvalidParameter(format!(
                "unknown group `{g}`; expected one of {}",
                GROUPS.join(", ")
            )))
        }
        None => GROUPS.to_vec(),
    };
    let mut checks = Vec::new();
    for g in &groups {
        let res = match *g {
            "scalar_jacobi" => scalar_jacobi(seed),
            "gegenbauer" => gegenbauer(seed),
            "jacobi_cg7" => jacobi_cg7(seed),
            "ddi_pair" => ddi_pair(seed),
            _ => hermite_cg06(seed),
        };
        match res {
            Ok(c) => checks.extend(c),
            Err(err) => {
                checks.push(NamedCheck::below(&format!("{g}/completed"), 1.0, 0.0).with_detail(err.to_string()))
            }
        }
    }
    Ok(SuiteReport {
        seed,
        groups: groups.iter().map(|s| s.to_string()).collect(),
        checks,
    })
}

pub fn cmd_paper_suite(args: &SuiteArgs) -> Result<i32> {
    let report = run_suite(args.only.as_deref(), args.seed)?;
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => super::report::suite_csv(&report).map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?,
    };
    write_output(&args.out, &text)?;
    print_lines(&args.out, report.checks.iter().map(NamedCheck::line));
    let failures = report.failures();
    let errata = report
        .checks
        .iter()
        .filter(|c| c.status == super::report::Status::KnownErratum)
        .count();
    print_lines(
        &args.out,
        [format!(
            "{} checks: {} passed, {} failed, {} known errata",
            report.checks.len(),
            report.checks.len() - failures.len() - errata,
            failures.len(),
            errata
        )],
    );
    if failures.is_empty() {
        Ok(EXIT_PASS)
    } else {
        for c in failures {
            eprintln!("failed: {}", c.name);
        }
        Ok(EXIT_CHECK)
    }
}
