//! Shared oracles and helpers for the integration suites.
#![allow(dead_code)]

use conecap::assembly::ProblemKind;
use conecap::mesh::{ConeSpec, Side};
use conecap::spaceform::SpaceForm;
use conecap::verify::{CaseConfig, GraphSpec};

/// Bessel J0 by its power series; plenty of accuracy below x ~ 12.
pub fn bessel_j0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= -q / ((k * k) as f64);
        sum += term;
    }
    sum
}

/// First positive zero of J0, root-found by bisection on the series.
pub fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    assert!(bessel_j0(lo) > 0.0 && bessel_j0(hi) < 0.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn interior_cone(alpha: f64) -> ConeSpec<f64> {
    ConeSpec::new(0.0, alpha, Side::Interior).unwrap()
}

pub fn cap_case(
    sf: SpaceForm,
    kind: ProblemKind,
    cone: ConeSpec<f64>,
    radius: f64,
) -> CaseConfig<f64> {
    CaseConfig {
        spaceform: sf,
        kind,
        dimension_n: 2,
        cone,
        graph: GraphSpec::Constant { radius },
    }
}

/// Compact scientific formatting for error ladders in report lines.
pub fn fmt_vec(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// One acceptance line on stdout; panics on failure after printing.
pub fn criterion(id: &str, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {id} [{name}]: {verdict} | {detail}");
    assert!(pass, "acceptance {id} [{name}] failed: {detail}");
}
