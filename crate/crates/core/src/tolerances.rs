//! Pinned tolerances and thresholds used by the verification pipeline and the
//! acceptance suite. Every check in the crate reads its threshold from here,
//! so there are no ad-hoc magic numbers scattered through solver code.

/// Exact arithmetic in f64: identities that are algebraic up to rounding.
pub const EXACT_F64: f64 = 1e-12;

/// Relative symmetry defect allowed in assembled stiffness/mass matrices.
pub const MATRIX_SYMMETRY: f64 = 1e-12;

/// Relative Galerkin residual of a direct solve, `||b - C u|| <= tol * ||b||`.
pub const GALERKIN_RESIDUAL: f64 = 1e-9;

/// Relative change in successive eigenvalue estimates at convergence.
pub const EIGEN_RELATIVE_CHANGE: f64 = 1e-10;

/// Iteration cap for inverse power iteration.
pub const EIGEN_MAX_ITERATIONS: usize = 500;

/// Bisection width for root finding (geodesic circle intersections).
pub const BISECTION_TOL: f64 = 1e-12;

/// Guard for denominators of relative quantities.
pub const DENOMINATOR_GUARD: f64 = 1e-14;

/// Radii below this are treated as a degenerate radial graph.
pub const MESH_DEGENERACY: f64 = 1e-9;

/// Exclusion band below pi for points on the unit sphere (antipode guard).
pub const ANTIPODE_GUARD: f64 = 1e-9;

/// Observed L-infinity convergence order required of the field solves.
pub const FIELD_ORDER_MIN: f64 = 1.8;

/// L-infinity error against the closed form at the finest field resolution.
pub const FIELD_LINF_FINEST: f64 = 5e-4;

/// Relative error allowed between the boundary-trace mean and the predicted
/// Neumann constant at the finest resolution.
pub const TRACE_MEAN_RTOL: f64 = 0.02;

/// Relative standard deviation of the trace allowed at the coarsest
/// resolution of a rigidity-positive run.
pub const TRACE_RELSTD_COARSE: f64 = 0.05;

/// Fraction of the coarse relative standard deviation that a perturbed
/// (rigidity-negative) run must retain at the finest resolution.
pub const NEGATIVE_CONTROL_RETENTION: f64 = 0.5;

/// Observed order required of off-center (wall-centered) cap runs: the
/// pole sits mid-wall where the gradient does not vanish, so the collapsed
/// pole cells contribute a first-order term there.
pub const OFFCENTER_ORDER_MIN: f64 = 0.8;

/// Post-hoc positivity floor for solutions whose theorems assume u >= 0.
pub const POSITIVITY_FLOOR: f64 = -1e-6;

/// P-function plateau value: relative error allowed against the predicted
/// constant at the finest resolution.
pub const P_VALUE_RTOL: f64 = 0.02;

/// P-function constancy spread allowed at the finest resolution, relative
/// to the predicted constant.
pub const P_SPREAD_RTOL: f64 = 0.05;

/// Observed convergence order required of the harmonic residual of the
/// second P-function (gradient-recovery limited, hence below 2).
pub const PTILDE_ORDER_MIN: f64 = 0.8;

/// Quadratic part of the discrete maximum-principle tolerance,
/// `tol = (MAX_PRINCIPLE_FACTOR * h^2 + TRACE_RECOVERY_FACTOR * h) * ||P||_inf`.
pub const MAX_PRINCIPLE_FACTOR: f64 = 10.0;

/// Linear part of the maximum-principle tolerance. One-sided gradient
/// recovery biases boundary-adjacent values of |grad u|^2 by O(h) (measured:
/// about 1.1 h ||P|| on cap runs), so an h^2 band alone would reject exact
/// cap solutions; the constant 2 leaves a factor-two margin over the
/// measured bias.
pub const TRACE_RECOVERY_FACTOR: f64 = 2.0;

/// Relative eigenvalue error allowed against the Bessel benchmark.
pub const EIGENVALUE_RTOL: f64 = 0.01;

/// Rellich identity relative residual at the finest mesh, flat case.
pub const RELLICH_RTOL_FLAT: f64 = 0.01;

/// Rellich identity relative residual at the finest mesh, curved cases.
pub const RELLICH_RTOL_CURVED: f64 = 0.02;

/// Flux-compatibility relative residual allowed at the coarsest resolution.
pub const FLUX_RESIDUAL_COARSE: f64 = 0.05;

/// Maximum radial-profile error against closed forms at m = 1024.
pub const RADIAL_CLOSED_FORM: f64 = 1e-6;

/// Radial self-convergence order window (Richardson), 2.0 +/- this.
pub const RADIAL_ORDER_HALF_WIDTH: f64 = 0.2;

/// Relative error allowed for the radial eigenvalue against j01^2 / R^2.
pub const RADIAL_EIGEN_RTOL: f64 = 0.005;

/// Guarded relative-quantity helper: `|num| / max(|den|, guard)`.
pub fn guarded_ratio(num: f64, den: f64) -> f64 {
    num.abs() / den.abs().max(DENOMINATOR_GUARD)
}
