//! Acceptance suite: every release-gating check, one printed line each.
//!
//! Thresholds come from `conecap::tolerances`; they are pinned there, not
//! here. Reference values are produced by the oracles in `common` (Bessel
//! root bisection) or by closed forms evaluated in place.

mod common;

use common::{bessel_j0_first_zero, cap_case, criterion, fmt_vec, interior_cone};
use conecap::assembly::ProblemKind;
use conecap::mesh::{ConeSpec, Side};
use conecap::radial::{compare_radial_closed_form, self_convergence_error, solve_radial};
use conecap::spaceform::SpaceForm;
use conecap::tolerances as tol;
use conecap::verify::{c_from_r, convergence_study, CaseConfig, ConvergenceStudy, GraphSpec};
use std::f64::consts::PI;

const FIELD_LADDER: [(usize, usize); 3] = [(16, 16), (32, 32), (64, 64)];
const EIGEN_LADDER: [(usize, usize); 3] = [(40, 40), (80, 80), (160, 160)];

fn run1_study() -> ConvergenceStudy<f64> {
    let case = cap_case(
        SpaceForm::Sphere,
        ProblemKind::Serrin,
        interior_cone(PI / 3.0),
        0.8,
    );
    convergence_study(&case, &FIELD_LADDER, 3).expect("run 1 study")
}

/// Errors strictly decrease and the finest-pair observed order clears the bar.
fn field_convergence_ok(errors: &[f64], orders: &[f64]) -> bool {
    errors.windows(2).all(|w| w[1] < w[0])
        && orders.last().copied().unwrap_or(f64::NAN) >= tol::FIELD_ORDER_MIN
}

#[test]
fn criterion_01_closed_form_reproduction() {
    let study = run1_study();
    let errors: Vec<f64> = study
        .outcomes
        .iter()
        .map(|o| o.report.closed_form_linf_error.unwrap())
        .collect();
    let finest = *errors.last().unwrap();
    criterion(
        "1",
        "closed-form reproduction, spherical cap",
        field_convergence_ok(&errors, &study.orders.closed_form)
            && finest <= tol::FIELD_LINF_FINEST,
        &format!(
            "L-inf errors {}, per-step orders {:?}, finest {finest:.3e} <= {}",
            fmt_vec(&errors),
            study.orders.closed_form,
            tol::FIELD_LINF_FINEST
        ),
    );
}

#[test]
fn criterion_02_serrin_constancy() {
    let study = run1_study();
    let c = c_from_r(SpaceForm::Sphere, ProblemKind::Serrin, 0.8f64).unwrap();
    let mean = study.finest().report.serrin_mean;
    let relstds: Vec<f64> = study
        .outcomes
        .iter()
        .map(|o| o.report.serrin_relstd)
        .collect();
    let mean_ok = (mean - c).abs() <= tol::TRACE_MEAN_RTOL * c.abs();
    let relstd_ok =
        relstds[0] <= tol::TRACE_RELSTD_COARSE && relstds.windows(2).all(|w| w[1] < w[0]);
    criterion(
        "2",
        "trace constancy, rigidity-positive",
        mean_ok && relstd_ok,
        &format!(
            "mean {mean:.6} vs {c:.6} (tol {}), relstd {} decreasing",
            tol::TRACE_MEAN_RTOL,
            fmt_vec(&relstds)
        ),
    );
}

#[test]
fn criterion_03_rigidity_negative_control() {
    let case = CaseConfig {
        graph: GraphSpec::Perturbed {
            radius: 0.8,
            amplitude: 0.1,
            mode: 1,
        },
        ..cap_case(
            SpaceForm::Sphere,
            ProblemKind::Serrin,
            interior_cone(PI / 3.0),
            0.8,
        )
    };
    let study = convergence_study(&case, &FIELD_LADDER, 3).unwrap();
    let coarse = study.coarsest().report.serrin_relstd;
    let fine = study.finest().report.serrin_relstd;
    criterion(
        "3",
        "perturbed graph keeps a trace-deviation floor",
        fine >= tol::NEGATIVE_CONTROL_RETENTION * coarse,
        &format!(
            "relstd coarse {coarse:.4}, finest {fine:.4} (retention {:.0}% >= {:.0}%)",
            100.0 * fine / coarse,
            100.0 * tol::NEGATIVE_CONTROL_RETENTION
        ),
    );
}

#[test]
fn criterion_04_molzon_case() {
    let case = cap_case(
        SpaceForm::Sphere,
        ProblemKind::Molzon,
        interior_cone(PI / 3.0),
        0.8,
    );
    let study = convergence_study(&case, &FIELD_LADDER, 3).unwrap();
    let errors: Vec<f64> = study
        .outcomes
        .iter()
        .map(|o| o.report.closed_form_linf_error.unwrap())
        .collect();
    let finest = *errors.last().unwrap();
    let c = c_from_r(SpaceForm::Sphere, ProblemKind::Molzon, 0.8f64).unwrap();
    let mean = study.finest().report.serrin_mean;
    let relstds: Vec<f64> = study
        .outcomes
        .iter()
        .map(|o| o.report.serrin_relstd)
        .collect();
    let min_u = study.finest().report.min_u;
    let pass = field_convergence_ok(&errors, &study.orders.closed_form)
        && finest <= tol::FIELD_LINF_FINEST
        && (mean - c).abs() <= tol::TRACE_MEAN_RTOL * c.abs()
        && relstds[0] <= tol::TRACE_RELSTD_COARSE
        && relstds.windows(2).all(|w| w[1] < w[0])
        && min_u >= tol::POSITIVITY_FLOOR;
    criterion(
        "4",
        "warp-forced problem, spherical cap",
        pass,
        &format!(
            "errors {} orders {:?}, mean {mean:.6} vs {c:.6}, min u {min_u:.2e}",
            fmt_vec(&errors),
            study.orders.closed_form
        ),
    );
}

#[test]
fn criterion_05_exterior_domain() {
    let case = cap_case(
        SpaceForm::Sphere,
        ProblemKind::Serrin,
        ConeSpec::new(0.0, PI / 3.0, Side::Exterior).unwrap(),
        0.8,
    );
    let study = convergence_study(&case, &FIELD_LADDER, 3).unwrap();
    let errors: Vec<f64> = study
        .outcomes
        .iter()
        .map(|o| o.report.closed_form_linf_error.unwrap())
        .collect();
    let finest = *errors.last().unwrap();
    let c = c_from_r(SpaceForm::Sphere, ProblemKind::Serrin, 0.8f64).unwrap();
    let mean = study.finest().report.serrin_mean;
    let relstds: Vec<f64> = study
        .outcomes
        .iter()
        .map(|o| o.report.serrin_relstd)
        .collect();
    let pass = field_convergence_ok(&errors, &study.orders.closed_form)
        && finest <= tol::FIELD_LINF_FINEST
        && (mean - c).abs() <= tol::TRACE_MEAN_RTOL * c.abs()
        && relstds[0] <= tol::TRACE_RELSTD_COARSE
        && relstds.windows(2).all(|w| w[1] < w[0]);
    criterion(
        "5",
        "exterior domain matches interior thresholds",
        pass,
        &format!(
            "errors {} orders {:?}, mean {mean:.6} vs {c:.6}, relstd {}",
            fmt_vec(&errors),
            study.orders.closed_form,
            fmt_vec(&relstds)
        ),
    );
}

#[test]
fn criterion_06_pfunction_invariants() {
    let study = run1_study();
    let p = study.finest().pfunctions.as_ref().unwrap();
    let c2 = 0.8f64.tan().powi(2);
    let sec = 1.0 / 0.8f64.cos();
    let residuals: Vec<f64> = study
        .outcomes
        .iter()
        .map(|o| o.pfunctions.as_ref().unwrap().harmonic_residual)
        .collect();
    let min_order = study
        .orders
        .ptilde_residual
        .iter()
        .fold(f64::INFINITY, |m, &o| m.min(o));
    let pass = (p.p_mean - c2).abs() <= tol::P_VALUE_RTOL * c2
        && p.constancy_spread <= tol::P_SPREAD_RTOL * c2
        && (p.p_tilde_mean - sec).abs() <= tol::P_VALUE_RTOL * sec
        && p.max_principle_pass
        && p.laplacian_negativity >= -p.tolerance
        && residuals.windows(2).all(|w| w[1] < w[0])
        && min_order >= tol::PTILDE_ORDER_MIN;
    criterion(
        "6",
        "subharmonic and harmonic auxiliary functions",
        pass,
        &format!(
            "P {:.6} vs {c2:.6} (spread {:.3e}), Pt {:.6} vs {sec:.6}, negativity {:.2e} >= -{:.2e}, residual orders {:?}",
            p.p_mean,
            p.constancy_spread,
            p.p_tilde_mean,
            p.laplacian_negativity,
            p.tolerance,
            study.orders.ptilde_residual
        ),
    );
}

#[test]
fn criterion_07_eigenvalue_identity_flat() {
    let case = cap_case(
        SpaceForm::Flat,
        ProblemKind::Eigen,
        interior_cone(PI / 2.0),
        1.0,
    );
    let study = convergence_study(&case, &EIGEN_LADDER, 3).unwrap();
    let j01 = bessel_j0_first_zero();
    let lambda_ref = j01 * j01; // R = 1
    let lambda = study.finest().lambda.unwrap();
    let relres = study.finest().report.rellich_relative_residual.unwrap();
    let pass = (lambda - lambda_ref).abs() <= tol::EIGENVALUE_RTOL * lambda_ref
        && relres <= tol::RELLICH_RTOL_FLAT;
    criterion(
        "7",
        "flat sector eigenvalue and boundary identity",
        pass,
        &format!(
            "lambda {lambda:.6} vs {lambda_ref:.6} (tol {}), identity relres {relres:.3e} <= {}",
            tol::EIGENVALUE_RTOL,
            tol::RELLICH_RTOL_FLAT
        ),
    );
}

#[test]
fn criterion_08_eigenvalue_identity_curved() {
    for sf in [SpaceForm::Sphere, SpaceForm::Hyperbolic] {
        let case = cap_case(sf, ProblemKind::Eigen, interior_cone(PI / 3.0), 0.7);
        let study = convergence_study(&case, &EIGEN_LADDER, 3).unwrap();
        let relres: Vec<f64> = study
            .outcomes
            .iter()
            .map(|o| o.report.rellich_relative_residual.unwrap())
            .collect();
        let pass = *relres.last().unwrap() <= tol::RELLICH_RTOL_CURVED
            && relres.windows(2).all(|w| w[1] < w[0]);
        criterion(
            "8",
            &format!("curved boundary identity, K = {}", sf.curvature_int()),
            pass,
            &format!(
                "relres {} (finest <= {})",
                fmt_vec(&relres),
                tol::RELLICH_RTOL_CURVED
            ),
        );
    }
}

#[test]
fn criterion_09_radial_reduction() {
    // closed forms at m = 1024 across curvature, kind, and dimension
    let mut worst = 0.0f64;
    for sf in [SpaceForm::Flat, SpaceForm::Sphere] {
        for kind in [ProblemKind::Molzon, ProblemKind::Serrin] {
            for n in [2u32, 3, 4, 5] {
                let profile = solve_radial(sf, n, kind, 0.8f64, 1024).unwrap();
                let err = compare_radial_closed_form(&profile, sf, kind, n).unwrap();
                worst = worst.max(err);
            }
        }
    }
    criterion(
        "9a",
        "radial closed forms at m = 1024",
        worst <= tol::RADIAL_CLOSED_FORM,
        &format!("max |error| {worst:.3e} <= {}", tol::RADIAL_CLOSED_FORM),
    );

    // Richardson self-convergence order 2 +/- 0.2, hyperbolic included. The
    // flat cases are solved exactly by the stencil (quadratic solution), so
    // their self-convergence error is pure roundoff and counts as converged.
    let mut orders = Vec::new();
    let mut exact = 0usize;
    let mut ok = true;
    for sf in [SpaceForm::Hyperbolic, SpaceForm::Flat, SpaceForm::Sphere] {
        for kind in [ProblemKind::Molzon, ProblemKind::Serrin] {
            for n in [2u32, 5] {
                let e1 = self_convergence_error(sf, n, kind, 0.8f64, 128).unwrap();
                let e2 = self_convergence_error(sf, n, kind, 0.8f64, 256).unwrap();
                if e1.max(e2) < 1e-12 {
                    exact += 1;
                    continue;
                }
                let order = (e1 / e2).log2();
                ok &= (order - 2.0).abs() <= tol::RADIAL_ORDER_HALF_WIDTH;
                orders.push(order);
            }
        }
    }
    criterion(
        "9b",
        "radial Richardson order 2.0 +/- 0.2",
        ok,
        &format!("orders {} ({exact} cases solved exactly)", fmt_vec(&orders)),
    );

    // radial eigenvalue against the Bessel oracle
    let profile = solve_radial(SpaceForm::Flat, 2, ProblemKind::Eigen, 1.0f64, 1024).unwrap();
    let lambda = profile.lambda.unwrap();
    let j01 = bessel_j0_first_zero();
    let reference = j01 * j01;
    criterion(
        "9c",
        "radial eigenvalue vs Bessel root",
        (lambda - reference).abs() <= tol::RADIAL_EIGEN_RTOL * reference,
        &format!(
            "lambda {lambda:.6} vs {reference:.6} (tol {})",
            tol::RADIAL_EIGEN_RTOL
        ),
    );
}

#[test]
fn criterion_10_flux_compatibility() {
    for (kind, label) in [
        (ProblemKind::Serrin, "reaction-forced"),
        (ProblemKind::Molzon, "warp-forced"),
    ] {
        let case = cap_case(SpaceForm::Sphere, kind, interior_cone(PI / 3.0), 0.8);
        let study = convergence_study(&case, &FIELD_LADDER, 3).unwrap();
        let residuals: Vec<f64> = study
            .outcomes
            .iter()
            .map(|o| o.report.flux_residual.unwrap())
            .collect();
        let pass =
            residuals[0] <= tol::FLUX_RESIDUAL_COARSE && residuals.windows(2).all(|w| w[1] < w[0]);
        criterion(
            "10",
            &format!("flux compatibility, {label}"),
            pass,
            &format!(
                "residuals {} (coarse <= {})",
                fmt_vec(&residuals),
                tol::FLUX_RESIDUAL_COARSE
            ),
        );
    }
}
