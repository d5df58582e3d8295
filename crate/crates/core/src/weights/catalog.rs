//! Built-in weights with their symmetric second-order operators.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use crate::diffop::{check_symmetry, Domain, RightDiffOp};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::{Frame, MatrixPolynomial, MatrixWeight, ScalarFactor, WeightTerm};

/// Closed-form eigenvalue `n ↦ Λₙ` on the monic polynomials.
pub type EigenvalueFn = Arc<dyn Fn(usize) -> Matrix + Send + Sync>;

#[derive(Clone)]
pub struct CatalogOperator {
    pub label: String,
    pub op: RightDiffOp,
    pub eigenvalue: EigenvalueFn,
}

impl fmt::Debug for CatalogOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogOperator")
            .field("label", &self.label)
            .field("op", &self.op)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub weight: MatrixWeight,
    pub operators: Vec<CatalogOperator>,
}

impl CatalogEntry {
    pub fn param(&self, key: &str) -> f64 {
        self.params[key]
    }

    pub fn operator(&self, label: &str) -> Option<&CatalogOperator> {
        self.operators.iter().find(|o| o.label == label)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub constraint: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogSchema {
    pub name: &'static str,
    pub interval: &'static str,
    pub params: Vec<ParamSpec>,
    pub operators: Vec<&'static str>,
}

pub fn catalog_names() -> Vec<&'static str> {
    catalog_schema().into_iter().map(|s| s.name).collect()
}

pub fn catalog_schema() -> Vec<CatalogSchema> {
    let p = |name, default, constraint| ParamSpec {
        name,
        default,
        constraint,
    };
    vec![
        CatalogSchema {
            name: "gegenbauer",
            interval: "[-1, 1]",
            params: vec![p("p", 1.0, "0 < p < q"), p("q", 3.0, "q > p")],
            operators: vec!["D1", "D2"],
        },
        CatalogSchema {
            name: "jacobi_cg7",
            interval: "[0, 1]",
            params: vec![
                p("alpha", 1.0, "alpha > -1"),
                p("beta", 1.0, "beta > -1"),
                p("k", 1.5, "0 < k < beta + 1"),
            ],
            operators: vec!["D"],
        },
        CatalogSchema {
            name: "ddi_pair",
            interval: "[0, 1]",
            params: vec![],
            operators: vec!["D+", "D-", "(D+ - D-)/2"],
        },
        CatalogSchema {
            name: "hermite_cg06",
            interval: "(-inf, inf)",
            params: vec![],
            operators: vec!["D"],
        },
        CatalogSchema {
            name: "scalar_jacobi",
            interval: "[0, 1]",
            params: vec![p("alpha", 0.0, "alpha > -1"), p("beta", 0.0, "beta > -1")],
            operators: vec!["D"],
        },
    ]
}

fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn resolve_params(schema: &CatalogSchema, params: &Value) -> Result<BTreeMap<String, f64>> {
    let mut out: BTreeMap<String, f64> = schema.params.iter().map(|p| (p.name.to_string(), p.default)).collect();
    match params {
        Value::Null => {}
        Value::Object(map) => {
            for (k, v) in map {
                if !out.contains_key(k) {
                    return Err(Error::InvalidParameter(format!(
                        "`{}` has no parameter `{k}`",
                        schema.name
                    )));
                }
                let x = v
                    .as_f64()
                    .ok_or_else(|| Error::InvalidParameter(format!("parameter `{k}` must be a number")))?;
                if !x.is_finite() {
                    return Err(Error::InvalidParameter(format!("parameter `{k}` must be finite")));
                }
                out.insert(k.clone(), x);
            }
        }
        _ => return Err(Error::InvalidParameter("parameters must be a JSON object".into())),
    }
    Ok(out)
}

/// Looks up a catalog weight; `params` is a JSON object (or null for defaults).
///
/// Every operator is checked for symmetry against the weight before the
/// entry is returned.
pub fn catalog_get(name: &str, params: &Value) -> Result<CatalogEntry> {
    let schema = catalog_schema()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownWeight(name.to_string()))?;
    let p = resolve_params(&schema, params)?;
    let (weight, operators) = match name {
        "gegenbauer" => gegenbauer(p["p"], p["q"])?,
        "jacobi_cg7" => jacobi_cg7(p["alpha"], p["beta"], p["k"])?,
        "ddi_pair" => ddi_pair()?,
        "hermite_cg06" => hermite_cg06()?,
        "scalar_jacobi" => scalar_jacobi(p["alpha"], p["beta"])?,
        _ => unreachable!(),
    };
    for o in &operators {
        let rep = check_symmetry(&o.op, &weight, Domain::Full);
        if !rep.verdict {
            return Err(Error::CrossCheck {
                check: format!("{name}/{} symmetric", o.label),
                defect: rep.max_residual().max(rep.max_boundary_defect()),
                tolerance: rep.tolerance,
            });
        }
    }
    Ok(CatalogEntry {
        name: name.to_string(),
        params: p,
        weight,
        operators,
    })
}

type Built = (MatrixWeight, Vec<CatalogOperator>);

fn op(label: &str, op: RightDiffOp, eigenvalue: impl Fn(usize) -> Matrix + Send + Sync + 'static) -> CatalogOperator {
    CatalogOperator {
        label: label.to_string(),
        op,
        eigenvalue: Arc::new(eigenvalue),
    }
}

fn gegenbauer(p: f64, q: f64) -> Result<Built> {
    if !(0.0 < p && p < q) {
        return Err(Error::InvalidParameter(format!(
            "gegenbauer needs 0 < p < q (p = {p}, q = {q})"
        )));
    }
    let id = Frame::IDENTITY;
    let polypart = MatrixPolynomial::new(
        2,
        id,
        vec![m2(q - p, 0.0, 0.0, p), m2(0.0, -q, -q, 0.0), m2(p, 0.0, 0.0, q - p)],
    );
    let w = MatrixWeight::new(
        2,
        -1.0,
        1.0,
        vec![WeightTerm {
            factor: ScalarFactor::Gegenbauer { gamma: q / 2.0 - 1.0 },
            polypart,
        }],
    )?;
    let f = w.frame();
    let d1 = RightDiffOp::from_x_coeffs(
        2,
        vec![m2(0.0, 0.0, 0.0, -1.0), m2(0.0, 1.0, -1.0, 0.0), m2(1.0, 0.0, 0.0, 0.0)],
        vec![m2(0.0, q - p + 2.0, -p, 0.0), m2(q + 2.0, 0.0, 0.0, 0.0)],
        vec![m2(p * (q - p + 1.0), 0.0, 0.0, 0.0)],
        f,
    );
    let d2 = RightDiffOp::from_x_coeffs(
        2,
        vec![m2(-1.0, 0.0, 0.0, 0.0), m2(0.0, -1.0, 1.0, 0.0), m2(0.0, 0.0, 0.0, 1.0)],
        vec![m2(0.0, p - q, p + 2.0, 0.0), m2(0.0, 0.0, 0.0, q + 2.0)],
        vec![m2(0.0, 0.0, 0.0, (p + 1.0) * (q - p))],
        f,
    );
    Ok((
        w,
        vec![
            op("D1", d1, move |n| {
                let n = n as f64;
                m2((n + p) * (n + q - p + 1.0), 0.0, 0.0, 0.0)
            }),
            op("D2", d2, move |n| {
                let n = n as f64;
                m2(0.0, 0.0, 0.0, (n + p + 1.0) * (n + q - p))
            }),
        ],
    ))
}

fn jacobi_cg7(alpha: f64, beta: f64, k: f64) -> Result<Built> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "jacobi_cg7 needs alpha, beta > -1 (alpha = {alpha}, beta = {beta})"
        )));
    }
    if !(0.0 < k && k < beta + 1.0) {
        return Err(Error::InvalidParameter(format!(
            "jacobi_cg7 needs 0 < k < beta + 1 (k = {k}, beta = {beta})"
        )));
    }
    let c = beta + 1.0 - k;
    let polypart = MatrixPolynomial::new(
        2,
        Frame::IDENTITY,
        vec![m2(beta + 1.0, 0.0, 0.0, 0.0), m2(-k, c, c, 0.0), m2(0.0, 0.0, 0.0, c)],
    );
    let w = MatrixWeight::new(
        2,
        0.0,
        1.0,
        vec![WeightTerm {
            factor: ScalarFactor::Jacobi {
                alpha,
                beta,
                a: 0.0,
                b: 1.0,
            },
            polypart,
        }],
    )?;
    let i = Matrix::identity(2, 2);
    let cm = m2(beta + 1.0, 1.0, 0.0, beta + 3.0);
    let u = m2(alpha + beta + 3.0, 0.0, 0.0, alpha + beta + 4.0);
    let v = m2(0.0, 0.0, k - beta - 1.0, alpha + beta + 2.0 - k);
    let d = RightDiffOp::from_x_coeffs(
        2,
        vec![Matrix::zeros(2, 2), i.clone(), -i],
        vec![cm, -u],
        vec![-v],
        w.frame(),
    );
    Ok((
        w,
        vec![op("D", d, move |n| {
            let n = n as f64;
            m2(
                -n * (alpha + beta + n + 2.0),
                0.0,
                1.0 + beta - k,
                -(n + 1.0) * (alpha + beta + n + 2.0) + k,
            )
        })],
    ))
}

/// `D₊`, `D₋` and `½(D₊ − D₋)` for the unit-factor weight on `[0, 1]`.
///
/// `D₊` carries `F₀ = ½[[3, −5], [1, −3]]`: with `+3/2` in the last entry the
/// third symmetry identity fails and `Λ₀ ≠ F₀`.
fn ddi_pair() -> Result<Built> {
    let polypart = MatrixPolynomial::new(
        2,
        Frame::IDENTITY,
        vec![
            m2(1.0, 1.0, 1.0, 1.0),
            m2(0.0, -1.0, -1.0, -2.0),
            m2(1.0, 0.0, 0.0, 1.0),
        ],
    );
    let w = MatrixWeight::new(
        2,
        0.0,
        1.0,
        vec![WeightTerm {
            factor: ScalarFactor::Unit,
            polypart,
        }],
    )?;
    let f = w.frame();
    let dp = ddi_plus(f, -1.5);
    let dm = RightDiffOp::from_x_coeffs(
        2,
        vec![Matrix::zeros(2, 2), m2(0.0, 2.0, 0.0, 2.0), m2(0.0, 0.0, 0.0, -2.0)],
        vec![m2(-1.0, 3.0, -1.0, 3.0), m2(0.0, -1.0, 1.0, -8.0)],
        vec![m2(2.5, -1.5, 1.5, -2.5)],
        f,
    );
    let half = RightDiffOp::combination(&[(0.5, &dp), (-0.5, &dm)]);
    Ok((
        w,
        vec![
            op("D+", dp, |n| {
                let n = n as f64;
                m2(2.0 * n * n + 6.0 * n + 1.5, -n - 2.5, n + 0.5, -1.5)
            }),
            op("D-", dm, |n| {
                let n = n as f64;
                m2(2.5, -n - 1.5, n + 1.5, -2.0 * n * n - 6.0 * n - 2.5)
            }),
            op("(D+ - D-)/2", half, |n| {
                let s = (n * (n + 3)) as f64;
                m2(s - 0.5, -0.5, -0.5, s + 0.5)
            }),
        ],
    ))
}

/// `D₊` with a chosen last entry of `F₀`; `−3/2` gives the symmetric operator.
pub fn ddi_plus(frame: Frame, f0_last: f64) -> RightDiffOp {
    RightDiffOp::from_x_coeffs(
        2,
        vec![Matrix::zeros(2, 2), m2(-2.0, 2.0, 0.0, 0.0), m2(2.0, 0.0, 0.0, 0.0)],
        vec![m2(-7.0, 7.0, -1.0, 1.0), m2(8.0, -1.0, 1.0, 0.0)],
        vec![m2(1.5, -2.5, 0.5, f0_last)],
        frame,
    )
}

/// `W = e·e^{−(x+1)²}[[x², x], [x, 1]] + e·e^{−(x−1)²}E₁₁`, which equals
/// `e^{−x²−2x}[[e^{4x} + x², x], [x, 1]]`.
fn hermite_cg06() -> Result<Built> {
    let e = std::f64::consts::E;
    let w = MatrixWeight::new(
        2,
        f64::NEG_INFINITY,
        f64::INFINITY,
        vec![
            WeightTerm {
                factor: ScalarFactor::ShiftedGaussian { c: -1.0, s: e },
                polypart: MatrixPolynomial::new(
                    2,
                    Frame::IDENTITY,
                    vec![m2(0.0, 0.0, 0.0, 1.0), m2(0.0, 1.0, 1.0, 0.0), m2(1.0, 0.0, 0.0, 0.0)],
                ),
            },
            WeightTerm {
                factor: ScalarFactor::ShiftedGaussian { c: 1.0, s: e },
                polypart: MatrixPolynomial::constant(m2(1.0, 0.0, 0.0, 0.0), Frame::IDENTITY),
            },
        ],
    )?;
    let d = RightDiffOp::from_x_coeffs(
        2,
        vec![Matrix::identity(2, 2)],
        vec![m2(2.0, 2.0, 0.0, -2.0), m2(-2.0, -4.0, 0.0, -2.0)],
        vec![m2(0.0, -2.0, 0.0, 2.0)],
        w.frame(),
    );
    Ok((
        w,
        vec![op("D", d, |n| {
            let n = n as f64;
            m2(-2.0 * n, -4.0 * n - 2.0, 0.0, 2.0 - 2.0 * n)
        })],
    ))
}

fn scalar_jacobi(alpha: f64, beta: f64) -> Result<Built> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "scalar_jacobi needs alpha, beta > -1 (alpha = {alpha}, beta = {beta})"
        )));
    }
    let w = MatrixWeight::new(
        1,
        0.0,
        1.0,
        vec![WeightTerm {
            factor: ScalarFactor::Jacobi {
                alpha,
                beta,
                a: 0.0,
                b: 1.0,
            },
            polypart: MatrixPolynomial::identity(1, Frame::IDENTITY),
        }],
    )?;
    let s = |v: f64| Matrix::from_element(1, 1, v);
    let d = RightDiffOp::from_x_coeffs(
        1,
        vec![s(0.0), s(1.0), s(-1.0)],
        vec![s(beta + 1.0), s(-(alpha + beta + 2.0))],
        vec![],
        w.frame(),
    );
    Ok((
        w,
        vec![op("D", d, move |n| {
            let n = n as f64;
            s(-n * (n + alpha + beta + 1.0))
        })],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn five_entries() {
        let names = catalog_names();
        assert_eq!(names.len(), 5);
        assert!(names.contains(&"gegenbauer") && names.contains(&"hermite_cg06"));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(catalog_get("gegenbauer", &json!({"p": 3.0, "q": 2.0})).is_err());
        assert!(catalog_get("jacobi_cg7", &json!({"alpha": -1.0})).is_err());
        assert!(catalog_get("jacobi_cg7", &json!({"k": 2.5})).is_err());
        assert!(catalog_get("scalar_jacobi", &json!({"gamma": 1.0})).is_err());
        assert!(matches!(
            catalog_get("legendre", &Value::Null),
            Err(Error::UnknownWeight(_))
        ));
    }

    #[test]
    fn weight_values_at_zero() {
        let g = catalog_get("gegenbauer", &json!({"p": 1.0, "q": 2.0})).unwrap();
        assert!((g.weight.eval(0.0).unwrap() - Matrix::identity(2, 2)).abs().max() < 1e-15);
        let d = catalog_get("ddi_pair", &Value::Null).unwrap();
        // 1 + x² is 1 at the origin, where the weight is singular.
        assert!((d.weight.eval(0.0).unwrap() - m2(1.0, 1.0, 1.0, 1.0)).abs().max() < 1e-15);
        let h = catalog_get("hermite_cg06", &Value::Null).unwrap();
        // e^0·(e^0 + 0) = 1 in the first entry.
        assert!((h.weight.eval(0.0).unwrap() - Matrix::identity(2, 2)).abs().max() < 1e-14);
    }

    #[test]
    fn hermite_terms_match_closed_form() {
        let h = catalog_get("hermite_cg06", &Value::Null).unwrap();
        for i in 0..100 {
            let x = -4.0 + 8.0 * i as f64 / 99.0;
            let pre = (-x * x - 2.0 * x).exp();
            let direct = m2((4.0 * x).exp() + x * x, x, x, 1.0) * pre;
            let got = h.weight.eval(x).unwrap();
            let rel = (got - &direct).abs().max() / direct.abs().max();
            assert!(rel < 1e-13, "x = {x}: {rel:e}");
        }
    }

    #[test]
    fn printed_plus_operator_is_not_symmetric() {
        let d = catalog_get("ddi_pair", &Value::Null).unwrap();
        let bad = ddi_plus(d.weight.frame(), 1.5);
        assert!(!check_symmetry(&bad, &d.weight, Domain::Full).verdict);
        let good = ddi_plus(d.weight.frame(), -1.5);
        assert!(check_symmetry(&good, &d.weight, Domain::Full).verdict);
    }

    #[test]
    fn half_difference_second_order_part() {
        let d = catalog_get("ddi_pair", &Value::Null).unwrap();
        let half = &d.operator("(D+ - D-)/2").unwrap().op;
        let f2 = half.f2().x_coeffs();
        let i = Matrix::identity(2, 2);
        assert!((&f2[1] + &i).abs().max() < 1e-14);
        assert!((&f2[2] - &i).abs().max() < 1e-14);
    }
}
