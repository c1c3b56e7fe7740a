//! Metric-aware P1 finite elements on the polar-parameter mesh.
//!
//! In geodesic polar coordinates the metric is g = dr^2 + h(r)^2 dtheta^2, so
//! for basis functions linear in (r, theta):
//!   grad energy density  = u_r v_r + u_theta v_theta / h^2,
//!   volume element       = h dr dtheta.
//! Element integrals come from [`Mesh::element_quadrature`]: the 3-point
//! barycentric rule on ordinary triangles, a tensor Gauss rule on the
//! collapsed apex cells. The 1/h factor stays bounded because every
//! quadrature point keeps r > 0.
//!
//! Sign conventions: the Laplacian is the geometer's (negative spectrum), the
//! assembled stiffness A is the positive Dirichlet form, so the three
//! equations discretize as
//!   A u = b                (forcing n h'),
//!   (A - n K M) u = b      (forcing n),
//!   A u = lambda M u       (eigenproblem).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::scalar::{flt, to_f64, Real};
use crate::spaceform::{warp, warp_prime, SpaceForm};
use crate::sparse::{CsrMatrix, Inertia, SkylineLdlt};
use crate::tolerances::{EIGEN_MAX_ITERATIONS, EIGEN_RELATIVE_CHANGE};

/// The three boundary-value problem kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemKind {
    /// Delta u = -n h'(r), zero Dirichlet data on Gamma0.
    Molzon,
    /// Delta u + n K u = -n, zero Dirichlet data on Gamma0.
    Serrin,
    /// Delta u + lambda u = 0, first mixed eigenpair.
    Eigen,
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Molzon => "MOLZON",
            ProblemKind::Serrin => "SERRIN",
            ProblemKind::Eigen => "EIGEN",
        }
    }
}

/// Equation selector: kind, dimension n, and the geometry it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub dimension_n: u32,
    pub spaceform: SpaceForm,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, dimension_n: u32, spaceform: SpaceForm) -> Result<Self> {
        if dimension_n < 2 {
            return Err(Error::InvalidInput(format!(
                "dimension n must be at least 2, got {dimension_n}"
            )));
        }
        Ok(ProblemSpec {
            kind,
            dimension_n,
            spaceform,
        })
    }
}

/// Nodal values over a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T>(pub Vec<T>);

impl<T: Real> ScalarField<T> {
    pub fn zeros(n: usize) -> Self {
        ScalarField(vec![T::zero(); n])
    }

    pub fn from_fn<F: FnMut(usize) -> T>(mesh: &Mesh<T>, mut f: F) -> Self {
        ScalarField((0..mesh.vertex_count()).map(|i| f(i)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .fold(T::zero(), |m, &v| if v.abs() > m { v.abs() } else { m })
    }

    pub(crate) fn check_len(&self, mesh: &Mesh<T>) -> Result<()> {
        if self.len() != mesh.vertex_count() {
            return Err(Error::Mismatch(format!(
                "field has {} values for a mesh with {} vertices",
                self.len(),
                mesh.vertex_count()
            )));
        }
        Ok(())
    }
}

/// Assembled discrete operators of one problem on one mesh.
#[derive(Debug, Clone)]
pub struct SparseSystem<T> {
    pub stiffness: CsrMatrix<T>,
    pub mass: CsrMatrix<T>,
    pub load: Vec<T>,
    pub dirichlet_nodes: Vec<usize>,
    pub spec: ProblemSpec,
}

impl<T: Real> SparseSystem<T> {
    /// Mask of non-Dirichlet (free) nodes.
    pub fn free_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.stiffness.dim()];
        for &i in &self.dirichlet_nodes {
            mask[i] = false;
        }
        mask
    }

    /// The shifted operator of the problem: A - n K M for the forced
    /// reaction equation, plain A otherwise.
    pub fn shifted_operator(&self) -> CsrMatrix<T> {
        match self.spec.kind {
            ProblemKind::Serrin => {
                let shift =
                    flt::<T>(self.spec.dimension_n as f64) * self.spec.spaceform.curvature::<T>();
                self.stiffness
                    .linear_combination(T::one(), &self.mass, -shift)
            }
            _ => self.stiffness.clone(),
        }
    }
}

/// Element loop: stiffness, mass, and load from the warped metric.
pub fn assemble<T: Real>(mesh: &Mesh<T>, spec: ProblemSpec) -> Result<SparseSystem<T>> {
    if spec.spaceform != mesh.spaceform {
        return Err(Error::Mismatch(format!(
            "problem is set in {:?} but the mesh lives in {:?}",
            spec.spaceform, mesh.spaceform
        )));
    }
    if spec.dimension_n != 2 {
        return Err(Error::InvalidInput(format!(
            "surface assembly requires dimension n = 2, got {} (higher n is served by the radial reduction)",
            spec.dimension_n
        )));
    }
    let nv = mesh.vertex_count();
    let n_scalar = flt::<T>(spec.dimension_n as f64);
    let mut a_trip = Vec::with_capacity(9 * mesh.triangle_count());
    let mut m_trip = Vec::with_capacity(9 * mesh.triangle_count());
    let mut load = vec![T::zero(); nv];

    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangles[t];
        let mut local_a = [[T::zero(); 3]; 3];
        let mut local_m = [[T::zero(); 3]; 3];
        let mut local_b = [T::zero(); 3];
        for p in mesh.element_quadrature(t) {
            let h = warp(mesh.spaceform, p.r)?;
            let f = match spec.kind {
                ProblemKind::Molzon => n_scalar * warp_prime(mesh.spaceform, p.r)?,
                ProblemKind::Serrin => n_scalar,
                ProblemKind::Eigen => T::zero(),
            };
            for a in 0..3 {
                for b in 0..3 {
                    local_a[a][b] = local_a[a][b]
                        + p.weight
                            * (h * p.grad[a][0] * p.grad[b][0] + p.grad[a][1] * p.grad[b][1] / h);
                    local_m[a][b] = local_m[a][b] + p.weight * h * p.basis[a] * p.basis[b];
                }
                local_b[a] = local_b[a] + p.weight * h * f * p.basis[a];
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                a_trip.push((tri[a], tri[b], local_a[a][b]));
                m_trip.push((tri[a], tri[b], local_m[a][b]));
            }
            load[tri[a]] = load[tri[a]] + local_b[a];
        }
    }

    let dirichlet_nodes: Vec<usize> = mesh
        .gamma0_vertices()
        .iter()
        .enumerate()
        .filter_map(|(i, &on)| on.then_some(i))
        .collect();

    Ok(SparseSystem {
        stiffness: CsrMatrix::from_triplets(nv, a_trip),
        mass: CsrMatrix::from_triplets(nv, m_trip),
        load,
        dirichlet_nodes,
        spec,
    })
}

/// Solution of a direct solve together with factorization diagnostics.
#[derive(Debug, Clone)]
pub struct BvpSolution<T> {
    pub field: ScalarField<T>,
    pub inertia: Inertia,
    pub smallest_pivot: f64,
}

/// Direct solve of the Molzon or Serrin problem: zero Dirichlet values are
/// eliminated on Gamma0, the walls carry the natural condition (no boundary
/// term), and the symmetric indefinite factorization reports its inertia.
pub fn solve_bvp<T: Real>(system: &SparseSystem<T>) -> Result<BvpSolution<T>> {
    if system.spec.kind == ProblemKind::Eigen {
        return Err(Error::InvalidInput(
            "solve_bvp expects MOLZON or SERRIN; use solve_eigen for EIGEN".into(),
        ));
    }
    let free = system.free_mask();
    let op = system.shifted_operator().restrict(&free);
    let rhs: Vec<T> = system
        .load
        .iter()
        .zip(&free)
        .filter_map(|(&b, &f)| f.then_some(b))
        .collect();
    let factor = SkylineLdlt::factor(&op)?;
    let x = factor.solve(&rhs);
    let mut field = vec![T::zero(); system.stiffness.dim()];
    let mut k = 0;
    for (i, &f) in free.iter().enumerate() {
        if f {
            field[i] = x[k];
            k += 1;
        }
    }
    Ok(BvpSolution {
        field: ScalarField(field),
        inertia: factor.inertia(),
        smallest_pivot: factor.smallest_pivot(),
    })
}

/// Smallest eigenpair of A x = lambda M x on the free nodes by inverse power
/// iteration; the eigenfield is M-normalized and sign-fixed positive at the
/// apex (first eigenfunctions are one-signed).
pub fn solve_eigen<T: Real>(
    system: &SparseSystem<T>,
    apex_index: Option<usize>,
) -> Result<(T, ScalarField<T>)> {
    if system.spec.kind != ProblemKind::Eigen {
        return Err(Error::InvalidInput(
            "solve_eigen expects an EIGEN system".into(),
        ));
    }
    let free = system.free_mask();
    let a = system.stiffness.restrict(&free);
    let m = system.mass.restrict(&free);
    let nf = a.dim();
    if nf == 0 {
        return Err(Error::InvalidInput("no free nodes to iterate on".into()));
    }
    let factor = SkylineLdlt::factor(&a)?;

    let mut x = vec![T::one(); nf];
    let norm = m.quadratic_form(&x, &x).sqrt();
    for v in &mut x {
        *v = *v / norm;
    }
    let mut lambda = T::zero();
    let mut converged = false;
    let mut last_change = f64::INFINITY;
    for _ in 0..EIGEN_MAX_ITERATIONS {
        let mx = m.matvec(&x);
        let y = factor.solve(&mx);
        // Rayleigh quotient of y: y' A y / y' M y = y' M x / y' M y
        let my = m.matvec(&y);
        let ymy = y.iter().zip(&my).fold(T::zero(), |s, (&a, b)| s + a * *b);
        let ymx = mx.iter().zip(&y).fold(T::zero(), |s, (&a, b)| s + a * *b);
        let next = ymx / ymy;
        let scale = ymy.sqrt();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = *yi / scale;
        }
        last_change = to_f64((next - lambda).abs() / next.abs().max(T::min_positive_value()));
        let done = last_change < EIGEN_RELATIVE_CHANGE;
        lambda = next;
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: EIGEN_MAX_ITERATIONS,
            residual: last_change,
        });
    }

    let mut field = vec![T::zero(); system.stiffness.dim()];
    let mut k = 0;
    for (i, &f) in free.iter().enumerate() {
        if f {
            field[i] = x[k];
            k += 1;
        }
    }
    // sign fix: positive at the apex when it is a free node, otherwise at the
    // largest-magnitude entry
    let anchor = match apex_index {
        Some(i) if free[i] && field[i] != T::zero() => field[i],
        _ => {
            let mut best = T::zero();
            for &v in &field {
                if v.abs() > best.abs() {
                    best = v;
                }
            }
            best
        }
    };
    if anchor < T::zero() {
        for v in &mut field {
            *v = -*v;
        }
    }
    Ok((lambda, ScalarField(field)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_sector_mesh, constant_graph, ConeSpec, Side};
    use std::f64::consts::PI;

    fn cap(sf: SpaceForm, alpha: f64, radius: f64, nr: usize, nt: usize) -> Mesh<f64> {
        let cone = ConeSpec::new(0.0, alpha, Side::Interior).unwrap();
        let graph = constant_graph(sf, &cone, radius, nt).unwrap();
        build_sector_mesh(sf, &cone, &graph, nr, nt).unwrap()
    }

    fn spec(kind: ProblemKind, sf: SpaceForm) -> ProblemSpec {
        ProblemSpec::new(kind, 2, sf).unwrap()
    }

    #[test]
    fn stiffness_kernel_and_mass_sum() {
        let mesh = cap(SpaceForm::Sphere, PI / 3.0, 0.8, 8, 8);
        let sys = assemble(&mesh, spec(ProblemKind::Serrin, SpaceForm::Sphere)).unwrap();
        // constants lie in the kernel of the stiffness: row sums vanish
        let scale = (0..sys.stiffness.dim())
            .flat_map(|i| sys.stiffness.row(i).map(|(_, v)| v.abs()))
            .fold(0.0f64, f64::max);
        for i in 0..sys.stiffness.dim() {
            assert!(sys.stiffness.row_sum(i).abs() <= 1e-12 * scale, "row {i}");
        }
        // sum of all mass entries is the metric area (partition of unity)
        assert!((sys.mass.total_sum() - mesh.metric_area()).abs() < 1e-12);
        assert!(sys.stiffness.symmetry_defect() < 1e-12);
        assert!(sys.mass.symmetry_defect() < 1e-12);
    }

    #[test]
    fn mass_positive_definite_on_free_nodes() {
        let mesh = cap(SpaceForm::Flat, PI / 2.0, 1.0, 6, 6);
        let sys = assemble(&mesh, spec(ProblemKind::Eigen, SpaceForm::Flat)).unwrap();
        let m = sys.mass.restrict(&sys.free_mask());
        let f = crate::sparse::SkylineLdlt::factor(&m).unwrap();
        assert_eq!(f.inertia().negative, 0);
        assert_eq!(f.inertia().positive, m.dim());
    }

    #[test]
    fn flat_assembly_matches_cartesian_energy() {
        // Oracle: the same triangles mapped to (x, y) = (r cos t, r sin t)
        // and assembled with the exact Cartesian P1 stiffness. The two
        // discretizations carry different finite element spaces (linear in
        // (r, theta) versus linear in (x, y)), so individual entries differ;
        // but both Dirichlet energies of a smooth function converge to the
        // same integral, at second order.
        fn energy_gap(nr: usize, nt: usize) -> f64 {
            let mesh = cap(SpaceForm::Flat, PI / 2.0, 1.0, nr, nt);
            let sys = assemble(&mesh, spec(ProblemKind::Molzon, SpaceForm::Flat)).unwrap();
            let mut tri_list = Vec::new();
            for t in 0..mesh.triangle_count() {
                let tri = mesh.triangles[t];
                let xy: Vec<[f64; 2]> = tri
                    .iter()
                    .map(|&v| {
                        let p = mesh.vertices[v];
                        [p.r * p.theta.cos(), p.r * p.theta.sin()]
                    })
                    .collect();
                let det = (xy[1][0] - xy[0][0]) * (xy[2][1] - xy[0][1])
                    - (xy[2][0] - xy[0][0]) * (xy[1][1] - xy[0][1]);
                let g = [
                    [(xy[1][1] - xy[2][1]) / det, (xy[2][0] - xy[1][0]) / det],
                    [(xy[2][1] - xy[0][1]) / det, (xy[0][0] - xy[2][0]) / det],
                    [(xy[0][1] - xy[1][1]) / det, (xy[1][0] - xy[0][0]) / det],
                ];
                let area = det / 2.0;
                for a in 0..3 {
                    for b in 0..3 {
                        tri_list.push((
                            tri[a],
                            tri[b],
                            area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]),
                        ));
                    }
                }
            }
            let cart = crate::sparse::CsrMatrix::from_triplets(mesh.vertex_count(), tri_list);
            // smooth test function in Cartesian coordinates
            let u: Vec<f64> = (0..mesh.vertex_count())
                .map(|v| {
                    let p = mesh.vertices[v];
                    let (x, y) = (p.r * p.theta.cos(), p.r * p.theta.sin());
                    (1.3 * x).sin() * (0.7 * y).cos()
                })
                .collect();
            (sys.stiffness.quadratic_form(&u, &u) - cart.quadratic_form(&u, &u)).abs()
        }
        let coarse = energy_gap(8, 8);
        let fine = energy_gap(16, 16);
        assert!(
            fine < coarse / 3.0,
            "energy gap coarse {coarse}, fine {fine}"
        );
        assert!(fine < 6e-3, "energy gap too large: {fine}");
    }

    #[test]
    fn corner_vertices_are_dirichlet() {
        let mesh = cap(SpaceForm::Sphere, PI / 3.0, 0.8, 4, 4);
        let sys = assemble(&mesh, spec(ProblemKind::Serrin, SpaceForm::Sphere)).unwrap();
        // corners of the cap (outer layer, first and last ray) are on both
        // boundary pieces and must be eliminated with GAMMA0
        let gamma0 = mesh.gamma0_vertices();
        let corners: Vec<usize> = (0..mesh.vertex_count())
            .filter(|&v| {
                let p = mesh.vertices[v];
                gamma0[v] && (p.theta == 0.0 || (p.theta - PI / 3.0).abs() < 1e-14)
            })
            .collect();
        assert_eq!(corners.len(), 2);
        for c in corners {
            assert!(sys.dirichlet_nodes.contains(&c));
        }
    }

    #[test]
    fn zero_load_solves_to_zero() {
        let mesh = cap(SpaceForm::Sphere, PI / 3.0, 0.8, 6, 6);
        let mut sys = assemble(&mesh, spec(ProblemKind::Molzon, SpaceForm::Sphere)).unwrap();
        sys.load = vec![0.0; sys.load.len()];
        let sol = solve_bvp(&sys).unwrap();
        assert!(sol.field.max_abs() <= 1e-14);
    }

    #[test]
    fn serrin_cap_apex_value_matches_closed_form() {
        let r_cap = 0.8f64;
        let expect = (1.0 - r_cap.cos()) / r_cap.cos();
        let mesh = cap(SpaceForm::Sphere, PI / 3.0, r_cap, 24, 24);
        let sys = assemble(&mesh, spec(ProblemKind::Serrin, SpaceForm::Sphere)).unwrap();
        let sol = solve_bvp(&sys).unwrap();
        let apex = mesh.apex_index.unwrap();
        assert!(
            (sol.field.values()[apex] - expect).abs() < 2e-3,
            "apex value {} vs {expect}",
            sol.field.values()[apex]
        );
        // the shifted operator stayed positive definite on this cap
        assert_eq!(sol.inertia.negative, 0);
    }

    #[test]
    fn flat_sector_serrin_apex_is_half_r_squared() {
        let mesh = cap(SpaceForm::Flat, PI / 2.0, 1.0, 24, 24);
        let sys = assemble(&mesh, spec(ProblemKind::Serrin, SpaceForm::Flat)).unwrap();
        let sol = solve_bvp(&sys).unwrap();
        let apex = mesh.apex_index.unwrap();
        assert!((sol.field.values()[apex] - 0.5).abs() < 2e-3);
    }

    #[test]
    fn galerkin_residual_is_small() {
        let mesh = cap(SpaceForm::Sphere, PI / 3.0, 0.8, 12, 12);
        let sys = assemble(&mesh, spec(ProblemKind::Serrin, SpaceForm::Sphere)).unwrap();
        let sol = solve_bvp(&sys).unwrap();
        let op = sys.shifted_operator();
        let au = op.matvec(sol.field.values());
        let free = sys.free_mask();
        let bnorm = sys.load.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        for i in 0..au.len() {
            if free[i] {
                assert!((au[i] - sys.load[i]).abs() <= 1e-9 * bnorm, "node {i}");
            }
        }
    }

    #[test]
    fn eigen_basic_properties() {
        let mesh = cap(SpaceForm::Flat, PI / 2.0, 1.0, 20, 20);
        let sys = assemble(&mesh, spec(ProblemKind::Eigen, SpaceForm::Flat)).unwrap();
        let (lambda, field) = solve_eigen(&sys, mesh.apex_index).unwrap();
        // eigenfield vanishes on Gamma0 exactly (eliminated) and is
        // positive at the apex by the sign convention
        for &i in &sys.dirichlet_nodes {
            assert_eq!(field.values()[i], 0.0);
        }
        assert!(field.values()[mesh.apex_index.unwrap()] > 0.0);
        // Rayleigh quotient consistency
        let num = sys.stiffness.quadratic_form(field.values(), field.values());
        let den = sys.mass.quadratic_form(field.values(), field.values());
        assert!((lambda - num / den).abs() <= 1e-9 * lambda);
        // M-normalization
        assert!((den - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigen_scaling_and_monotonicity() {
        let lam = |radius: f64| {
            let mesh = cap(SpaceForm::Flat, PI / 2.0, radius, 16, 16);
            let sys = assemble(&mesh, spec(ProblemKind::Eigen, SpaceForm::Flat)).unwrap();
            solve_eigen(&sys, mesh.apex_index).unwrap().0
        };
        let l1 = lam(1.0);
        // Euclidean dilation: lambda scales exactly like 1/R^2 discretely
        let l2 = lam(2.0);
        assert!((l2 - l1 / 4.0).abs() < 1e-8 * l1);
        // enlarging the domain strictly decreases the eigenvalue
        assert!(lam(1.3) < l1);
    }

    #[test]
    fn mismatched_spaceform_rejected() {
        let mesh = cap(SpaceForm::Sphere, PI / 3.0, 0.8, 2, 2);
        assert!(assemble(&mesh, spec(ProblemKind::Serrin, SpaceForm::Flat)).is_err());
        let bad = ProblemSpec {
            kind: ProblemKind::Serrin,
            dimension_n: 3,
            spaceform: SpaceForm::Sphere,
        };
        assert!(assemble(&mesh, bad).is_err());
    }

    #[test]
    fn indefinite_large_cap_solves_and_reports_inertia() {
        // beyond the quarter turn the shifted operator picks up negative
        // pivots; the factorization must still solve and surface them
        let rr = 2.2f64;
        let mesh = cap(SpaceForm::Sphere, PI / 3.0, rr, 24, 24);
        let sys = assemble(&mesh, spec(ProblemKind::Serrin, SpaceForm::Sphere)).unwrap();
        let sol = solve_bvp(&sys).unwrap();
        assert!(sol.inertia.negative > 0, "{:?}", sol.inertia);
        let mut worst = 0.0f64;
        for v in 0..mesh.vertex_count() {
            let exact = (mesh.vertices[v].r.cos() - rr.cos()) / rr.cos();
            worst = worst.max((sol.field.values()[v] - exact).abs());
        }
        assert!(worst < 0.05, "closed-form deviation {worst}");
    }

    #[test]
    fn molzon_and_serrin_coincide_in_flat_space() {
        let mesh = cap(SpaceForm::Flat, PI / 2.0, 1.0, 10, 10);
        let m = assemble(&mesh, spec(ProblemKind::Molzon, SpaceForm::Flat)).unwrap();
        let s = assemble(&mesh, spec(ProblemKind::Serrin, SpaceForm::Flat)).unwrap();
        let um = solve_bvp(&m).unwrap();
        let us = solve_bvp(&s).unwrap();
        for (a, b) in um.field.values().iter().zip(us.field.values()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}
