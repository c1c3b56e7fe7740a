//! Gradient recovery, boundary traces, and quadrature.
//!
//! Gradients are reported in the orthonormal frame (e_r, e_theta/h): the
//! squared norm of the pair is the coordinate-invariant |grad u|^2. Boundary
//! normal derivatives on the cap use the one-sided gradient of the unique
//! adjacent triangle; outwardness comes combinatorially from the stored edge
//! orientation (edges are traversed counterclockwise by their owning
//! triangle, so the outward normal is the right-hand rotation).

use crate::assembly::ScalarField;
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Mesh};
use crate::scalar::{flt, Real};
use crate::spaceform::warp;

/// Orthonormal-frame gradient components per vertex.
#[derive(Debug, Clone)]
pub struct GradientField<T> {
    /// (du/dr, du/dtheta / h) at each vertex.
    pub components: Vec<[T; 2]>,
}

impl<T: Real> GradientField<T> {
    pub fn norm_squared(&self, vertex: usize) -> T {
        let [a, b] = self.components[vertex];
        a * a + b * b
    }
}

/// Per-element coordinate gradient (du/dr, du/dtheta): the metric-measure
/// mean of the interpolant's gradient over the element. Constant elements
/// (ordinary triangles) return their exact gradient.
pub(crate) fn triangle_gradient<T: Real>(mesh: &Mesh<T>, u: &ScalarField<T>, t: usize) -> [T; 2] {
    let tri = mesh.triangles[t];
    let v = [u.values()[tri[0]], u.values()[tri[1]], u.values()[tri[2]]];
    let mut acc = [T::zero(); 2];
    let mut total = T::zero();
    for p in mesh.element_quadrature(t) {
        let h = warp(mesh.spaceform, p.r).unwrap_or_else(|_| T::zero());
        let w = p.weight * h;
        for k in 0..3 {
            acc[0] = acc[0] + w * v[k] * p.grad[k][0];
            acc[1] = acc[1] + w * v[k] * p.grad[k][1];
        }
        total = total + w;
    }
    [acc[0] / total, acc[1] / total]
}

/// Recover a nodal gradient field: each triangle contributes its constant
/// gradient in the orthonormal frame evaluated at the centroid, averaged over
/// adjacent triangles with metric-area weights.
pub fn recover_gradient<T: Real>(mesh: &Mesh<T>, u: &ScalarField<T>) -> Result<GradientField<T>> {
    u.check_len(mesh)?;
    let nv = mesh.vertex_count();
    let mut acc = vec![[T::zero(); 2]; nv];
    let mut weight = vec![T::zero(); nv];
    for t in 0..mesh.triangle_count() {
        let [gr, gt] = triangle_gradient(mesh, u, t);
        let c = mesh.triangle_coords(t);
        let r_c = (c[0][0] + c[1][0] + c[2][0]) / flt(3.0);
        let h_c = warp(mesh.spaceform, r_c)?;
        let w = mesh.triangle_metric_area(t);
        let g = [gr, gt / h_c];
        for &v in &mesh.triangles[t] {
            acc[v][0] = acc[v][0] + w * g[0];
            acc[v][1] = acc[v][1] + w * g[1];
            weight[v] = weight[v] + w;
        }
    }
    for v in 0..nv {
        if weight[v] > T::zero() {
            acc[v][0] = acc[v][0] / weight[v];
            acc[v][1] = acc[v][1] / weight[v];
        }
    }
    Ok(GradientField { components: acc })
}

/// One sample of the Gamma0 normal-derivative trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceSample<T> {
    /// Edge endpoints (as stored in the mesh).
    pub a: usize,
    pub b: usize,
    /// Midpoint in polar coordinates.
    pub r_mid: T,
    pub theta_mid: T,
    /// Metric length of the edge.
    pub length: T,
    /// Outward unit normal in the orthonormal frame at the midpoint.
    pub normal: [T; 2],
    /// du/dnu at the midpoint from the adjacent triangle's gradient.
    pub value: T,
    /// Whether the edge touches a wall vertex (the two corner edges of the
    /// cap; one-sided recovery is least accurate there).
    pub at_corner: bool,
}

/// The Gamma0 trace of a field: one sample per cap edge.
#[derive(Debug, Clone)]
pub struct BoundaryTrace<T> {
    pub samples: Vec<TraceSample<T>>,
}

impl<T: Real> BoundaryTrace<T> {
    pub fn total_length(&self) -> T {
        self.samples.iter().fold(T::zero(), |s, e| s + e.length)
    }

    /// Length-weighted mean of the trace values.
    pub fn mean(&self) -> T {
        let total = self.total_length();
        self.samples
            .iter()
            .fold(T::zero(), |s, e| s + e.length * e.value)
            / total
    }
}

/// Outward normal derivative of `u` on every Gamma0 edge.
pub fn normal_derivative_gamma0<T: Real>(
    mesh: &Mesh<T>,
    u: &ScalarField<T>,
) -> Result<BoundaryTrace<T>> {
    u.check_len(mesh)?;
    let mut on_wall = vec![false; mesh.vertex_count()];
    for e in &mesh.boundary_edges {
        if e.tag == BoundaryTag::Gamma1 {
            on_wall[e.a] = true;
            on_wall[e.b] = true;
        }
    }
    let mut samples = Vec::new();
    for edge in &mesh.boundary_edges {
        if edge.tag != BoundaryTag::Gamma0 {
            continue;
        }
        if edge.triangle >= mesh.triangle_count() {
            return Err(Error::Mesh(format!(
                "boundary edge ({}, {}) references missing triangle {}",
                edge.a, edge.b, edge.triangle
            )));
        }
        let tri = mesh.triangles[edge.triangle];
        if !tri.contains(&edge.a) || !tri.contains(&edge.b) {
            return Err(Error::Mesh(format!(
                "boundary edge ({}, {}) is not an edge of its owning triangle",
                edge.a, edge.b
            )));
        }
        let pa = mesh.vertices[edge.a];
        let pb = mesh.vertices[edge.b];
        let r_mid = (pa.r + pb.r) * flt(0.5);
        let theta_mid = (pa.theta + pb.theta) * flt(0.5);
        let h = warp(mesh.spaceform, r_mid)?;
        // orthonormal-frame edge direction and metric length
        let e = [pb.r - pa.r, h * (pb.theta - pa.theta)];
        let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
        let t_hat = [e[0] / len, e[1] / len];
        // right-hand rotation of the CCW-traversed edge points outward
        let normal = [t_hat[1], -t_hat[0]];
        let [gr, gt] = triangle_gradient(mesh, u, edge.triangle);
        let g = [gr, gt / h];
        samples.push(TraceSample {
            a: edge.a,
            b: edge.b,
            r_mid,
            theta_mid,
            length: len,
            normal,
            value: g[0] * normal[0] + g[1] * normal[1],
            at_corner: on_wall[edge.a] || on_wall[edge.b],
        });
    }
    if samples.is_empty() {
        return Err(Error::Mesh("mesh has no GAMMA0 edges to trace".into()));
    }
    Ok(BoundaryTrace { samples })
}

/// Volume integral of the interpolant of nodal values: element quadrature of
/// value times the volume element h dr dtheta.
pub fn integrate_volume<T: Real>(mesh: &Mesh<T>, values: &ScalarField<T>) -> Result<T> {
    values.check_len(mesh)?;
    let mut total = T::zero();
    for t in 0..mesh.triangle_count() {
        let tri = mesh.triangles[t];
        for p in mesh.element_quadrature(t) {
            let h = warp(mesh.spaceform, p.r)?;
            let v = p.basis[0] * values.values()[tri[0]]
                + p.basis[1] * values.values()[tri[1]]
                + p.basis[2] * values.values()[tri[2]];
            total = total + p.weight * h * v;
        }
    }
    Ok(total)
}

/// Midpoint-rule boundary integral over the trace: sum of length * value * weight.
pub fn integrate_gamma0<T: Real>(trace: &BoundaryTrace<T>, weights: &[T]) -> Result<T> {
    if weights.len() != trace.samples.len() {
        return Err(Error::Mismatch(format!(
            "{} weights for {} trace samples",
            weights.len(),
            trace.samples.len()
        )));
    }
    Ok(trace
        .samples
        .iter()
        .zip(weights)
        .fold(T::zero(), |s, (e, &w)| s + e.length * e.value * w))
}
