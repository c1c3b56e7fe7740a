//! The two auxiliary functions driving the rigidity argument, and their
//! discrete maximum-principle / harmonicity checks.
//!
//! For a solution u of the forced reaction equation on the sphere,
//!   P  = |grad u|^2 + 2u + u^2          is subharmonic and capped by c^2,
//!   Pt = <grad u, grad h'> + u h' + h'  is harmonic,
//! and both are constant exactly when the domain is a cap. Discretely the
//! subharmonicity is tested in weak form (stiffness masses), which tolerates
//! the O(h) noise of recovered gradients.

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble, ProblemKind, ProblemSpec, ScalarField};
use crate::error::Result;
use crate::mesh::{BoundaryTag, Mesh};
use crate::postprocess::GradientField;
use crate::scalar::{flt, to_f64, Real};
use crate::spaceform::{warp, warp_prime};
use crate::sparse::CsrMatrix;
use crate::tolerances::{MAX_PRINCIPLE_FACTOR, TRACE_RECOVERY_FACTOR};

/// Nodal P = |grad u|^2 + 2u + u^2.
pub fn p_function<T: Real>(
    mesh: &Mesh<T>,
    u: &ScalarField<T>,
    grad: &GradientField<T>,
) -> Result<ScalarField<T>> {
    u.check_len(mesh)?;
    let two = flt::<T>(2.0);
    Ok(ScalarField(
        (0..mesh.vertex_count())
            .map(|v| {
                let uv = u.values()[v];
                grad.norm_squared(v) + two * uv + uv * uv
            })
            .collect(),
    ))
}

/// Nodal Pt = <grad u, grad h'> + u h' + h'.
///
/// With polar coordinates centered at the cone vertex, grad h' = h'' e_r and
/// h'' = -K h, so the pairing term is -K h(r) du/dr (zero in the flat case).
pub fn p_tilde<T: Real>(
    mesh: &Mesh<T>,
    u: &ScalarField<T>,
    grad: &GradientField<T>,
) -> Result<ScalarField<T>> {
    u.check_len(mesh)?;
    let sf = mesh.spaceform;
    let k = sf.curvature::<T>();
    let mut values = Vec::with_capacity(mesh.vertex_count());
    for v in 0..mesh.vertex_count() {
        let r = mesh.vertices[v].r;
        let h = warp(sf, r)?;
        let hp = warp_prime(sf, r)?;
        let pairing = -k * h * grad.components[v][0];
        values.push(pairing + (u.values()[v] + T::one()) * hp);
    }
    Ok(ScalarField(values))
}

/// Outcome of the discrete maximum-principle test for one nodal field.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MaxPrincipleSummary {
    /// Maximum over vertices not on Gamma0.
    pub interior_max: f64,
    pub gamma0_max: f64,
    pub gamma0_min: f64,
    /// max - min over all vertices.
    pub constancy_spread: f64,
    /// Tolerance used: (MAX_PRINCIPLE_FACTOR h^2 + TRACE_RECOVERY_FACTOR h) ||P||_inf.
    pub tolerance: f64,
    pub pass: bool,
}

/// Check that the field attains its maximum on Gamma0. The tolerance has a
/// quadratic band for quadrature error plus a linear band absorbing the
/// one-sided bias of recovered boundary gradients; both constants are fixed
/// in [`crate::tolerances`] and reported, never silent.
pub fn max_principle_check<T: Real>(
    mesh: &Mesh<T>,
    p: &ScalarField<T>,
) -> Result<MaxPrincipleSummary> {
    p.check_len(mesh)?;
    let on_gamma0 = mesh.gamma0_vertices();
    let mut interior_max = f64::NEG_INFINITY;
    let mut g0_max = f64::NEG_INFINITY;
    let mut g0_min = f64::INFINITY;
    let mut all_max = f64::NEG_INFINITY;
    let mut all_min = f64::INFINITY;
    for v in 0..mesh.vertex_count() {
        let val = to_f64(p.values()[v]);
        all_max = all_max.max(val);
        all_min = all_min.min(val);
        if on_gamma0[v] {
            g0_max = g0_max.max(val);
            g0_min = g0_min.min(val);
        } else {
            interior_max = interior_max.max(val);
        }
    }
    let h = to_f64(mesh.max_edge_length());
    let scale = all_max.abs().max(all_min.abs());
    let tolerance = (MAX_PRINCIPLE_FACTOR * h * h + TRACE_RECOVERY_FACTOR * h) * scale;
    Ok(MaxPrincipleSummary {
        interior_max,
        gamma0_max: g0_max,
        gamma0_min: g0_min,
        constancy_spread: all_max - all_min,
        tolerance,
        pass: interior_max <= g0_max + tolerance,
    })
}

/// Weak-Laplacian masses of a nodal field: minus the stiffness applied to the
/// field, meaningful on vertices whose basis function vanishes on the whole
/// boundary. Masses approximate the integral of (Laplacian of the field)
/// against each hat function.
#[derive(Debug, Clone)]
pub struct WeakLaplacian<T> {
    pub masses: Vec<T>,
    pub interior: Vec<bool>,
}

impl<T: Real> WeakLaplacian<T> {
    /// Most negative interior mass; nonnegative (up to tolerance) for a
    /// discretely subharmonic field.
    pub fn negativity(&self) -> f64 {
        let mut min = 0.0f64;
        for (m, &keep) in self.masses.iter().zip(&self.interior) {
            if keep {
                min = min.min(to_f64(*m));
            }
        }
        min
    }

    /// Largest mass magnitude over the given vertex set, normalized by the
    /// vertex metric area; tends to zero for a discretely harmonic field.
    /// Callers restrict to core vertices: the area normalization degenerates
    /// at the pole and the boundary strip carries recovery bias.
    pub fn harmonic_residual(&self, vertex_areas: &[T], mask: &[bool]) -> f64 {
        let mut max = 0.0f64;
        for v in 0..self.masses.len() {
            if self.interior[v] && mask[v] {
                let a = to_f64(vertex_areas[v]).max(f64::MIN_POSITIVE);
                max = max.max(to_f64(self.masses[v]).abs() / a);
            }
        }
        max
    }
}

/// Apply a precomputed stiffness matrix to a field: masses = -A field,
/// restricted to vertices away from the boundary.
pub fn weak_laplacian_with<T: Real>(
    mesh: &Mesh<T>,
    field: &ScalarField<T>,
    stiffness: &CsrMatrix<T>,
) -> Result<WeakLaplacian<T>> {
    field.check_len(mesh)?;
    let af = stiffness.matvec(field.values());
    let boundary = mesh.boundary_vertices();
    Ok(WeakLaplacian {
        masses: af.into_iter().map(|v| -v).collect(),
        interior: boundary.into_iter().map(|b| !b).collect(),
    })
}

/// As [`weak_laplacian_with`], assembling the stiffness matrix on the spot.
pub fn weak_laplacian<T: Real>(mesh: &Mesh<T>, field: &ScalarField<T>) -> Result<WeakLaplacian<T>> {
    let spec = ProblemSpec::new(ProblemKind::Eigen, 2, mesh.spaceform)?;
    let sys = assemble(mesh, spec)?;
    weak_laplacian_with(mesh, field, &sys.stiffness)
}

/// Sign of the mean outward slope of a nodal field across the cap
/// boundary: +1 when the field grows toward Gamma0, -1 when it falls, 0
/// below rounding. The boundary dichotomy of the continuous theory has no
/// robust discrete analogue, so the slope sign is reported, never asserted.
pub fn boundary_slope_sign<T: Real>(mesh: &Mesh<T>, field: &ScalarField<T>) -> Result<i8> {
    field.check_len(mesh)?;
    let mut acc = 0.0f64;
    let mut total = 0.0f64;
    for e in &mesh.boundary_edges {
        if e.tag != BoundaryTag::Gamma0 {
            continue;
        }
        let tri = mesh.triangles[e.triangle];
        let inner = tri
            .iter()
            .copied()
            .find(|&v| v != e.a && v != e.b)
            .expect("cap edge has an inner opposite vertex");
        let jump = (to_f64(field.values()[e.a]) + to_f64(field.values()[e.b])) * 0.5
            - to_f64(field.values()[inner]);
        let len = to_f64(mesh.edge_metric_length(e.a, e.b));
        acc += len * jump;
        total += len;
    }
    if total == 0.0 {
        return Err(crate::error::Error::Mesh("no GAMMA0 edges".into()));
    }
    let scale = to_f64(field.max_abs()).max(f64::MIN_POSITIVE);
    let mean = acc / total;
    Ok(if mean.abs() <= 1e-12 * scale {
        0
    } else if mean > 0.0 {
        1
    } else {
        -1
    })
}

/// Lumped metric area per vertex (row sums of the mass matrix).
pub fn vertex_areas<T: Real>(mesh: &Mesh<T>, mass: &CsrMatrix<T>) -> Vec<T> {
    (0..mesh.vertex_count()).map(|i| mass.row_sum(i)).collect()
}

/// Combined report over both auxiliary functions of one solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PReport {
    /// Area-weighted mean of P (the cap value is c^2).
    pub p_mean: f64,
    /// Area-weighted mean of Pt (the cap value is sec R on the sphere).
    pub p_tilde_mean: f64,
    pub interior_max: f64,
    pub gamma0_max: f64,
    pub gamma0_min: f64,
    pub constancy_spread: f64,
    pub p_tilde_spread: f64,
    /// Most negative weak-Laplacian mass of P over interior vertices.
    pub laplacian_negativity: f64,
    /// Normalized weak-Laplacian residual of Pt over core vertices.
    pub harmonic_residual: f64,
    /// Tolerance used by the maximum-principle and subharmonicity tests.
    pub tolerance: f64,
    pub max_principle_pass: bool,
    /// Sign of the outward boundary slope of P (reported, not asserted).
    pub boundary_slope_sign: i8,
}

/// Evaluate P and Pt for a solve and run every check. `stiffness`/`mass`
/// reuse the already-assembled operators of the solve.
pub fn pfunction_report<T: Real>(
    mesh: &Mesh<T>,
    u: &ScalarField<T>,
    grad: &GradientField<T>,
    stiffness: &CsrMatrix<T>,
    mass: &CsrMatrix<T>,
) -> Result<PReport> {
    let p = p_function(mesh, u, grad)?;
    let pt = p_tilde(mesh, u, grad)?;
    let summary = max_principle_check(mesh, &p)?;
    let wl_p = weak_laplacian_with(mesh, &p, stiffness)?;
    let wl_pt = weak_laplacian_with(mesh, &pt, stiffness)?;
    let areas = vertex_areas(mesh, mass);
    let core = mesh.core_vertices(0.2);
    let total_area = to_f64(mesh.metric_area());
    let p_mean = to_f64(crate::postprocess::integrate_volume(mesh, &p)?) / total_area;
    let p_tilde_mean = to_f64(crate::postprocess::integrate_volume(mesh, &pt)?) / total_area;
    let pt_max = pt
        .values()
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(to_f64(v)));
    let pt_min = pt
        .values()
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(to_f64(v)));
    Ok(PReport {
        p_mean,
        p_tilde_mean,
        interior_max: summary.interior_max,
        gamma0_max: summary.gamma0_max,
        gamma0_min: summary.gamma0_min,
        constancy_spread: summary.constancy_spread,
        p_tilde_spread: pt_max - pt_min,
        laplacian_negativity: wl_p.negativity(),
        harmonic_residual: wl_pt.harmonic_residual(&areas, &core),
        tolerance: summary.tolerance,
        max_principle_pass: summary.pass,
        boundary_slope_sign: boundary_slope_sign(mesh, &p)?,
    })
}
