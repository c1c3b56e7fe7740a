//! One-dimensional radial reduction on [0, R]:
//!   u'' + (n - 1) (h'/h) u' + q u = f,   u'(0) = 0,  u(R) = 0,
//! with q and f chosen per problem kind, covering any dimension n >= 2 and
//! all three curvatures.
//!
//! Central finite differences on a uniform grid; the coefficient singularity
//! at r = 0 is resolved by the symmetry limit (h'/h -> 1/r and u'(0) = 0
//! give Delta u(0) = n u''(0)), keeping the apex on-grid.

use crate::assembly::ProblemKind;
use crate::error::{Error, Result};
use crate::scalar::{flt, to_f64, Real};
use crate::spaceform::{warp, warp_prime, SpaceForm};
use crate::tolerances::{EIGEN_MAX_ITERATIONS, EIGEN_RELATIVE_CHANGE};
use crate::verify::closed_form_u;

/// Radial solution profile on a uniform grid.
#[derive(Debug, Clone)]
pub struct RadialProfile<T> {
    pub radii: Vec<T>,
    pub values: Vec<T>,
    /// Smallest eigenvalue, for the eigenproblem kind.
    pub lambda: Option<T>,
    /// Set when the configuration solves fine but leaves the range the
    /// closed forms are normalized on (spherical forced-reaction runs with
    /// R at or beyond the quarter turn, where cos R changes sign).
    pub outside_closed_form_range: bool,
}

struct Tridiag<T> {
    sub: Vec<T>,  // a[i] multiplies u[i-1], sub[0] unused
    diag: Vec<T>, // b[i] multiplies u[i]
    sup: Vec<T>,  // c[i] multiplies u[i+1], sup[last] unused
}

impl<T: Real> Tridiag<T> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Thomas algorithm; the radial operators are far from breakdown at the
    /// scales used here, a vanishing pivot is still reported.
    fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let mut denom = self.diag[0];
        if denom.abs() <= T::min_positive_value() {
            return Err(Error::Singular {
                pivot: to_f64(denom),
                index: 0,
            });
        }
        c[0] = self.sup[0] / denom;
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.sub[i] * c[i - 1];
            if denom.abs() <= T::min_positive_value() {
                return Err(Error::Singular {
                    pivot: to_f64(denom),
                    index: i,
                });
            }
            if i < n - 1 {
                c[i] = self.sup[i] / denom;
            }
            d[i] = (rhs[i] - self.sub[i] * d[i - 1]) / denom;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            let xi = x[i] - c[i] * x[i + 1];
            x[i] = xi;
        }
        Ok(x)
    }

    fn matvec(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v = v + self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    v = v + self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// The negative radial operator -[u'' + (n-1)(h'/h) u'] on the interior
/// unknowns u_0 .. u_{m-1} (u_m = 0 eliminated), discretized to second order.
fn radial_operator<T: Real>(sf: SpaceForm, n: u32, big_r: T, m: usize) -> Result<Tridiag<T>> {
    let dr = big_r / flt(m as f64);
    let inv2 = T::one() / (dr * dr);
    let nf = flt::<T>(n as f64);
    let mut sub = vec![T::zero(); m];
    let mut diag = vec![T::zero(); m];
    let mut sup = vec![T::zero(); m];
    // row 0: symmetry limit, Delta u(0) = n u''(0) with ghost u_{-1} = u_1
    diag[0] = flt::<T>(2.0) * nf * inv2;
    sup[0] = -flt::<T>(2.0) * nf * inv2;
    for i in 1..m {
        let r = dr * flt(i as f64);
        let coeff = (nf - T::one()) * warp_prime(sf, r)? / warp(sf, r)?;
        sub[i] = -(inv2 - coeff / (flt::<T>(2.0) * dr));
        diag[i] = flt::<T>(2.0) * inv2;
        sup[i] = -(inv2 + coeff / (flt::<T>(2.0) * dr));
    }
    Ok(Tridiag { sub, diag, sup })
}

/// Solve the radial problem of the given kind. For the eigenproblem the
/// profile carries the smallest eigenvalue; otherwise a direct solve.
pub fn solve_radial<T: Real>(
    sf: SpaceForm,
    n: u32,
    kind: ProblemKind,
    big_r: T,
    m: usize,
) -> Result<RadialProfile<T>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "dimension n must be >= 2, got {n}"
        )));
    }
    if m < 8 {
        return Err(Error::InvalidInput(format!(
            "m must be at least 8, got {m}"
        )));
    }
    if !(big_r > T::zero()) {
        return Err(Error::InvalidInput("R must be positive".into()));
    }
    if sf == SpaceForm::Sphere && big_r >= T::PI() {
        return Err(Error::InvalidInput(format!(
            "R = {big_r} reaches the antipode on the sphere"
        )));
    }
    let dr = big_r / flt(m as f64);
    let radii: Vec<T> = (0..=m).map(|i| dr * flt(i as f64)).collect();
    let nf = flt::<T>(n as f64);
    let k = sf.curvature::<T>();
    let mut op = radial_operator(sf, n, big_r, m)?;
    let out_of_scope =
        kind == ProblemKind::Serrin && sf == SpaceForm::Sphere && big_r >= T::PI() * flt(0.5);

    match kind {
        ProblemKind::Eigen => {
            let (lambda, mut values) = radial_eigen(sf, n, &op, &radii)?;
            values.push(T::zero());
            Ok(RadialProfile {
                radii,
                values,
                lambda: Some(lambda),
                outside_closed_form_range: false,
            })
        }
        ProblemKind::Molzon | ProblemKind::Serrin => {
            // operator convention: -(Delta u) + ... = -f
            let mut rhs = Vec::with_capacity(m);
            for i in 0..m {
                let f = match kind {
                    ProblemKind::Molzon => -nf * warp_prime(sf, radii[i])?,
                    _ => -nf,
                };
                rhs.push(-f);
            }
            if kind == ProblemKind::Serrin {
                // Delta u + n K u = -n  =>  (-Delta - n K) u = n
                for i in 0..m {
                    op.diag[i] = op.diag[i] - nf * k;
                }
            }
            let mut values = op.solve(&rhs)?;
            values.push(T::zero());
            Ok(RadialProfile {
                radii,
                values,
                lambda: None,
                outside_closed_form_range: out_of_scope,
            })
        }
    }
}

/// Inverse power iteration for the smallest eigenvalue of the radial
/// operator, using the volume-weighted inner product (weight h^{n-1}).
fn radial_eigen<T: Real>(
    sf: SpaceForm,
    n: u32,
    op: &Tridiag<T>,
    radii: &[T],
) -> Result<(T, Vec<T>)> {
    let m = op.dim();
    let weight: Vec<T> = (0..m)
        .map(|i| {
            let h = warp(sf, radii[i]).unwrap_or_else(|_| T::zero());
            if i == 0 {
                // h^{n-1} vanishes at the apex; trapezoid end weight
                T::min_positive_value()
            } else {
                h.powi(n as i32 - 1)
            }
        })
        .collect();
    let dot = |a: &[T], b: &[T]| -> T {
        a.iter()
            .zip(b)
            .zip(&weight)
            .fold(T::zero(), |s, ((&x, &y), &w)| s + w * x * y)
    };
    let mut x = vec![T::one(); m];
    let nrm = dot(&x, &x).sqrt();
    for v in &mut x {
        *v = *v / nrm;
    }
    let mut lambda = T::zero();
    let mut last_change = f64::INFINITY;
    for _ in 0..EIGEN_MAX_ITERATIONS {
        let y = op.solve(&x)?;
        let oy = op.matvec(&y);
        let next = dot(&oy, &y) / dot(&y, &y);
        let nrm = dot(&y, &y).sqrt();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = *yi / nrm;
        }
        last_change = to_f64((next - lambda).abs() / next.abs().max(T::min_positive_value()));
        lambda = next;
        if last_change < EIGEN_RELATIVE_CHANGE {
            // sign fix: positive at the axis
            if x[0] < T::zero() {
                for v in &mut x {
                    *v = -*v;
                }
            }
            return Ok((lambda, x));
        }
    }
    Err(Error::NoConvergence {
        iterations: EIGEN_MAX_ITERATIONS,
        residual: last_change,
    })
}

/// Maximum absolute deviation of a profile from the closed-form solution.
pub fn compare_radial_closed_form<T: Real>(
    profile: &RadialProfile<T>,
    sf: SpaceForm,
    kind: ProblemKind,
    n: u32,
) -> Result<T> {
    let big_r = *profile.radii.last().expect("profile has a grid");
    let mut worst = T::zero();
    for (&r, &v) in profile.radii.iter().zip(&profile.values) {
        let exact = closed_form_u(sf, kind, n, big_r, r)?;
        let err = (v - exact).abs();
        if err > worst {
            worst = err;
        }
    }
    Ok(worst)
}

/// Self-convergence error between the m and 2m solutions on their shared
/// grid points (every other point of the finer grid).
pub fn self_convergence_error<T: Real>(
    sf: SpaceForm,
    n: u32,
    kind: ProblemKind,
    big_r: T,
    m: usize,
) -> Result<T> {
    let coarse = solve_radial(sf, n, kind, big_r, m)?;
    let fine = solve_radial(sf, n, kind, big_r, 2 * m)?;
    let mut worst = T::zero();
    for i in 0..=m {
        let d = (coarse.values[i] - fine.values[2 * i]).abs();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}
