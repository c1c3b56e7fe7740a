//! Structured triangulations of sector-like domains in geodesic polar
//! coordinates about the cone vertex.
//!
//! A domain is described by a cone (an angular interval, used from the inside
//! or the outside) and a radial graph rho(theta) for the outer boundary. The
//! mesh is a single apex vertex plus `nr` radial layers on `ntheta + 1` rays;
//! the outer layer is tagged `Gamma0` (the cap), the first and last rays are
//! tagged `Gamma1` (the walls). The apex sits at r = 0 where the polar chart
//! collapses; the parameter-plane triangles at the fan omit two slivers next
//! to the walls whose metric area is O(h^2) and vanishes under refinement.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{flt, to_f64, Real};
use crate::spaceform::{angle_f64, geodesic_distance, warp, PolarPoint, SpaceForm};
use crate::tolerances::{ANTIPODE_GUARD, BISECTION_TOL, MESH_DEGENERACY};

/// Whether the domain lives inside the cone or outside its closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Interior,
    Exterior,
}

/// The cone: an angular interval of directions at the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec<T> {
    pub theta_lo: T,
    pub theta_hi: T,
    pub side: Side,
}

impl<T: Real> ConeSpec<T> {
    pub fn new(theta_lo: T, theta_hi: T, side: Side) -> Result<Self> {
        let width = theta_hi - theta_lo;
        let two_pi = T::PI() + T::PI();
        if !(width > T::zero() && width < two_pi) {
            return Err(Error::InvalidInput(format!(
                "cone opening must lie in (0, 2 pi), got {width}"
            )));
        }
        Ok(ConeSpec {
            theta_lo,
            theta_hi,
            side,
        })
    }

    /// The cone's own opening angle (independent of side).
    pub fn opening(&self) -> T {
        self.theta_hi - self.theta_lo
    }

    /// Convexity of the cone itself; theorems that need a convex cone check
    /// this flag (opening at most pi).
    pub fn is_convex(&self) -> bool {
        self.opening() <= T::PI() + flt(1e-12)
    }

    /// Angular interval actually occupied by the domain: the cone interval
    /// for interior domains, its complement for exterior ones.
    pub fn active_interval(&self) -> (T, T) {
        let two_pi = T::PI() + T::PI();
        match self.side {
            Side::Interior => (self.theta_lo, self.opening()),
            Side::Exterior => (self.theta_hi, two_pi - self.opening()),
        }
    }
}

/// The outer boundary as a radial graph: sampled (theta, rho) pairs with
/// strictly increasing theta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGraph<T> {
    samples: Vec<(T, T)>,
}

impl<T: Real> RadialGraph<T> {
    pub fn new(sf: SpaceForm, samples: Vec<(T, T)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput(
                "radial graph needs at least one sample".into(),
            ));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidInput(
                    "radial graph samples must have strictly increasing theta".into(),
                ));
            }
        }
        for &(theta, rho) in &samples {
            if !(rho > flt(MESH_DEGENERACY)) {
                return Err(Error::Mesh(format!(
                    "degenerate radial graph: rho = {rho} at theta = {theta}"
                )));
            }
            if sf == SpaceForm::Sphere && rho >= T::PI() - flt(ANTIPODE_GUARD) {
                return Err(Error::Mesh(format!(
                    "radial graph reaches the antipode: rho = {rho} at theta = {theta}"
                )));
            }
        }
        Ok(RadialGraph { samples })
    }

    pub fn samples(&self) -> &[(T, T)] {
        &self.samples
    }

    /// Angular interval covered by the samples.
    pub fn span(&self) -> (T, T) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Piecewise-linear evaluation; `theta` must lie inside the span up to a
    /// small tolerance.
    pub fn eval(&self, theta: T) -> Result<T> {
        let (lo, hi) = self.span();
        let tol = flt(1e-9);
        if theta < lo - tol || theta > hi + tol {
            return Err(Error::InvalidInput(format!(
                "theta = {theta} outside the graph span [{lo}, {hi}]"
            )));
        }
        if self.samples.len() == 1 {
            return Ok(self.samples[0].1);
        }
        let t = theta.max(lo).min(hi);
        let idx = self
            .samples
            .partition_point(|&(s, _)| s <= t)
            .min(self.samples.len() - 1)
            .max(1);
        let (t0, r0) = self.samples[idx - 1];
        let (t1, r1) = self.samples[idx];
        let w = (t - t0) / (t1 - t0);
        Ok(r0 + w * (r1 - r0))
    }
}

/// Constant-radius graph rho = R sampled on `n` + 1 uniformly spaced rays.
pub fn constant_graph<T: Real>(
    sf: SpaceForm,
    cone: &ConeSpec<T>,
    radius: T,
    n: usize,
) -> Result<RadialGraph<T>> {
    let (start, width) = cone.active_interval();
    let samples = (0..=n)
        .map(|j| (start + width * flt(j as f64) / flt(n as f64), radius))
        .collect();
    RadialGraph::new(sf, samples)
}

/// Cosine-perturbed graph rho(theta) = R (1 + amplitude cos(2 pi mode (theta - start)/width)).
pub fn perturbed_graph<T: Real>(
    sf: SpaceForm,
    cone: &ConeSpec<T>,
    radius: T,
    amplitude: T,
    mode: u32,
    n: usize,
) -> Result<RadialGraph<T>> {
    let (start, width) = cone.active_interval();
    let two_pi = T::PI() + T::PI();
    let samples = (0..=n)
        .map(|j| {
            let theta = start + width * flt(j as f64) / flt(n as f64);
            let phase = two_pi * flt(mode as f64) * (theta - start) / width;
            (theta, radius * (T::one() + amplitude * phase.cos()))
        })
        .collect();
    RadialGraph::new(sf, samples)
}

/// Graph of the geodesic circle of radius `radius` about the off-center point
/// (dist, theta0): for each requested ray, the larger root rho of
/// `d((rho, theta), (dist, theta0)) = radius`, found by bisection.
pub fn offcenter_cap_graph<T: Real>(
    sf: SpaceForm,
    dist: T,
    radius: T,
    theta0: T,
    thetas: &[T],
) -> Result<RadialGraph<T>> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidInput("circle radius must be positive".into()));
    }
    let center = PolarPoint::new(sf, dist, theta0)?;
    let hi_cap: T = match sf {
        SpaceForm::Sphere => T::PI() - flt(2.0 * ANTIPODE_GUARD),
        _ => dist + radius + T::one(),
    };
    let mut samples = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let g = |rho: T| -> Result<T> {
            Ok(geodesic_distance(sf, PolarPoint::raw(rho, theta), center)? - radius)
        };
        // Walk down from the outer cap to bracket the largest sign change.
        let steps = 256;
        let mut hi = hi_cap;
        let mut ghi = g(hi)?;
        if ghi <= T::zero() {
            return Err(Error::RayMissesCircle {
                theta: angle_f64(theta),
                radius: to_f64(radius),
                dist: to_f64(dist),
            });
        }
        let mut lo = hi;
        let mut found = false;
        for s in 1..=steps {
            let cand = hi_cap * flt((steps - s) as f64) / flt(steps as f64);
            let gc = g(cand)?;
            if gc <= T::zero() {
                lo = cand;
                found = true;
                break;
            }
            hi = cand;
            ghi = gc;
        }
        let _ = ghi;
        if !found {
            return Err(Error::RayMissesCircle {
                theta: angle_f64(theta),
                radius: to_f64(radius),
                dist: to_f64(dist),
            });
        }
        while hi - lo > flt(BISECTION_TOL) {
            let mid = (lo + hi) * flt(0.5);
            if g(mid)? <= T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        samples.push((theta, (lo + hi) * flt(0.5)));
    }
    RadialGraph::new(sf, samples)
}

/// Boundary tag: the cap part of the boundary or the cone walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryTag {
    Gamma0,
    Gamma1,
}

impl BoundaryTag {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryTag::Gamma0 => "GAMMA0",
            BoundaryTag::Gamma1 => "GAMMA1",
        }
    }
}

/// A tagged boundary edge, oriented as traversed by its owning triangle
/// (counterclockwise), so the outward normal is the right-hand rotation of
/// the edge direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: BoundaryTag,
    pub triangle: usize,
}

/// Triangulated sector-like domain in polar coordinates.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    pub spaceform: SpaceForm,
    pub vertices: Vec<PolarPoint<T>>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub apex_index: Option<usize>,
    /// Structured (nr, ntheta) shape when built by [`build_sector_mesh`].
    pub lattice: Option<(usize, usize)>,
}

/// Second-order barycentric quadrature rule on the unit triangle.
const QUAD_BARY: [[f64; 3]; 3] = [
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
];

/// Gauss-Legendre points and weights on [0, 1] for the collapsed apex cells.
const GAUSS3: [(f64, f64); 3] = [
    (0.1127016653792583, 5.0 / 18.0),
    (0.5, 4.0 / 9.0),
    (0.8872983346207417, 5.0 / 18.0),
];

/// One quadrature point of an element: location, shape function values and
/// their (r, theta) gradients, and the parameter-measure weight.
#[derive(Debug, Clone, Copy)]
pub struct ElementPoint<T> {
    pub r: T,
    pub theta: T,
    pub basis: [T; 3],
    pub grad: [[T; 2]; 3],
    pub weight: T,
}

impl<T: Real> Mesh<T> {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// (r, theta) coordinates of a triangle's vertices.
    pub fn triangle_coords(&self, t: usize) -> [[T; 2]; 3] {
        let tri = self.triangles[t];
        [0, 1, 2].map(|k| {
            let p = self.vertices[tri[k]];
            [p.r, p.theta]
        })
    }

    /// Signed parameter-plane area of element `t` (positive when CCW). Apex
    /// cells cover the full chart cell below their outer edge.
    pub fn parametric_area(&self, t: usize) -> T {
        if self.is_apex_cell(t) {
            let tri = self.triangles[t];
            let pa = self.vertices[tri[1]];
            let pb = self.vertices[tri[2]];
            return (pb.theta - pa.theta) * (pa.r + pb.r) * flt(0.5);
        }
        let c = self.triangle_coords(t);
        ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]))
            * flt(0.5)
    }

    /// Whether triangle `t` is an apex fan cell (touches the pole of the
    /// polar chart, where the parametrization collapses an edge).
    pub fn is_apex_cell(&self, t: usize) -> bool {
        match self.apex_index {
            Some(a) => self.triangles[t].contains(&a),
            None => false,
        }
    }

    /// Quadrature of element `t` with shape-function values and gradients.
    ///
    /// Ordinary triangles carry the P1 basis and the 3-point barycentric
    /// rule. An apex fan [apex, a, b] is the full chart cell
    /// {0 <= r <= L(theta), theta_a <= theta <= theta_b} (metrically a
    /// geodesic triangle whose parameter image has a collapsed edge at
    /// r = 0); it carries the degenerate bilinear basis
    ///   N_apex = 1 - s,  N_a = s (1 - q),  N_b = s q,
    /// with r = s L(q), theta interpolated by q, integrated with a 3 x 3
    /// Gauss rule. All quadrature points keep r > 0, which is how the metric
    /// degeneracy at the pole is absorbed.
    pub fn element_quadrature(&self, t: usize) -> Vec<ElementPoint<T>> {
        let tri = self.triangles[t];
        if self.is_apex_cell(t) {
            let apex = self.apex_index.unwrap();
            // construction order is [apex, a, b]
            debug_assert_eq!(tri[0], apex);
            let pa = self.vertices[tri[1]];
            let pb = self.vertices[tri[2]];
            let dth = pb.theta - pa.theta;
            let lp = pb.r - pa.r;
            let mut points = Vec::with_capacity(9);
            for &(sq, sw) in &GAUSS3 {
                for &(qq, qw) in &GAUSS3 {
                    let s = flt::<T>(sq);
                    let q = flt::<T>(qq);
                    let wq = flt::<T>(sw * qw);
                    let len = pa.r + q * lp;
                    let r = s * len;
                    let theta = pa.theta + q * dth;
                    let basis = [T::one() - s, s * (T::one() - q), s * q];
                    // ds/dr = 1/L, ds/dtheta = -s L'/(L dth), dq/dtheta = 1/dth
                    let ds_dr = T::one() / len;
                    let ds_dth = -s * lp / (len * dth);
                    let dq_dth = T::one() / dth;
                    let grad = [
                        [-ds_dr, -ds_dth],
                        [(T::one() - q) * ds_dr, (T::one() - q) * ds_dth - s * dq_dth],
                        [q * ds_dr, q * ds_dth + s * dq_dth],
                    ];
                    points.push(ElementPoint {
                        r,
                        theta,
                        basis,
                        grad,
                        weight: wq * len * dth,
                    });
                }
            }
            points
        } else {
            let c = self.triangle_coords(t);
            let det = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1])
                - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
            let grad = [
                [(c[1][1] - c[2][1]) / det, (c[2][0] - c[1][0]) / det],
                [(c[2][1] - c[0][1]) / det, (c[0][0] - c[2][0]) / det],
                [(c[0][1] - c[1][1]) / det, (c[1][0] - c[0][0]) / det],
            ];
            let w = det * flt(0.5) / flt(3.0);
            QUAD_BARY
                .iter()
                .map(|bary| {
                    let b = bary.map(flt::<T>);
                    let r = b[0] * c[0][0] + b[1] * c[1][0] + b[2] * c[2][0];
                    let theta = b[0] * c[0][1] + b[1] * c[1][1] + b[2] * c[2][1];
                    ElementPoint {
                        r,
                        theta,
                        basis: b,
                        grad,
                        weight: w,
                    }
                })
                .collect()
        }
    }

    /// Metric area of element `t`: quadrature of the volume element h dr dtheta.
    pub fn triangle_metric_area(&self, t: usize) -> T {
        self.element_quadrature(t).iter().fold(T::zero(), |acc, p| {
            acc + p.weight * warp(self.spaceform, p.r).unwrap_or_else(|_| T::zero())
        })
    }

    /// Total metric area of the mesh.
    pub fn metric_area(&self) -> T {
        (0..self.triangle_count()).fold(T::zero(), |acc, t| acc + self.triangle_metric_area(t))
    }

    /// Metric length of the segment between two vertices (midpoint rule for
    /// the angular warp). Edges from the pole are radial regardless of the
    /// angle stored on the apex vertex.
    pub fn edge_metric_length(&self, a: usize, b: usize) -> T {
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        if pa.r == T::zero() || pb.r == T::zero() {
            return (pb.r - pa.r).abs();
        }
        let rm = (pa.r + pb.r) * flt(0.5);
        let h = warp(self.spaceform, rm).unwrap_or_else(|_| T::zero());
        let dr = pb.r - pa.r;
        let dth = pb.theta - pa.theta;
        (dr * dr + h * h * dth * dth).sqrt()
    }

    /// Longest metric edge over all triangles; the mesh-size parameter h.
    pub fn max_edge_length(&self) -> T {
        let mut h = T::zero();
        for tri in &self.triangles {
            for k in 0..3 {
                let l = self.edge_metric_length(tri[k], tri[(k + 1) % 3]);
                if l > h {
                    h = l;
                }
            }
        }
        h
    }

    /// Mask of vertices lying on Gamma0 edges (closure of the cap boundary).
    pub fn gamma0_vertices(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertex_count()];
        for e in &self.boundary_edges {
            if e.tag == BoundaryTag::Gamma0 {
                mask[e.a] = true;
                mask[e.b] = true;
            }
        }
        mask
    }

    /// Mask of "core" vertices: at least `margin` of the lattice extent away
    /// from the pole and from every boundary in both lattice directions.
    /// Pointwise quantities built from recovered gradients are reliable
    /// there; near the boundary strip and the degenerate pole they carry
    /// O(h) recovery bias over vanishing vertex areas. Falls back to the
    /// plain interior for unstructured meshes.
    pub fn core_vertices(&self, margin: f64) -> Vec<bool> {
        match self.lattice {
            Some((nr, ntheta)) => {
                let mut mask = vec![false; self.vertex_count()];
                for i in 1..=nr {
                    let si = i as f64 / nr as f64;
                    for j in 0..=ntheta {
                        let sj = j as f64 / ntheta as f64;
                        if si >= margin && si <= 1.0 - margin && sj >= margin && sj <= 1.0 - margin
                        {
                            mask[1 + (i - 1) * (ntheta + 1) + j] = true;
                        }
                    }
                }
                mask
            }
            None => self.boundary_vertices().into_iter().map(|b| !b).collect(),
        }
    }

    /// Mask of vertices lying on any boundary edge.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertex_count()];
        for e in &self.boundary_edges {
            mask[e.a] = true;
            mask[e.b] = true;
        }
        mask
    }

    /// Plain-text export: vertices, triangles, tagged boundary edges, in
    /// deterministic order.
    pub fn write_export<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "spaceform {}", self.spaceform.curvature_int())?;
        writeln!(out, "vertices {}", self.vertex_count())?;
        for v in &self.vertices {
            writeln!(out, "{} {}", to_f64(v.r), to_f64(v.theta))?;
        }
        writeln!(out, "triangles {}", self.triangle_count())?;
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        writeln!(out, "boundary_edges {}", self.boundary_edges.len())?;
        for e in &self.boundary_edges {
            writeln!(out, "{} {} {}", e.a, e.b, e.tag.name())?;
        }
        Ok(())
    }
}

/// Build the structured sector mesh: one apex vertex, `nr` layers scaled by
/// rho(theta) on each of the `ntheta + 1` rays, fan triangles at the apex and
/// two triangles per quad elsewhere.
///
/// Vertex count: nr (ntheta + 1) + 1. Triangle count: (2 nr - 1) ntheta.
pub fn build_sector_mesh<T: Real>(
    sf: SpaceForm,
    cone: &ConeSpec<T>,
    graph: &RadialGraph<T>,
    nr: usize,
    ntheta: usize,
) -> Result<Mesh<T>> {
    if nr < 1 || ntheta < 1 {
        return Err(Error::InvalidInput(
            "nr and ntheta must both be at least 1".into(),
        ));
    }
    let (start, width) = cone.active_interval();
    let (glo, ghi) = graph.span();
    let tol = flt(1e-9);
    if glo > start + tol || ghi < start + width - tol {
        return Err(Error::Mesh(format!(
            "graph span [{glo}, {ghi}] does not cover the active interval [{start}, {}]",
            start + width
        )));
    }

    let thetas: Vec<T> = (0..=ntheta)
        .map(|j| start + width * flt(j as f64) / flt(ntheta as f64))
        .collect();
    let mut rhos = Vec::with_capacity(ntheta + 1);
    for &theta in &thetas {
        let rho = graph.eval(theta)?;
        if !(rho > flt(MESH_DEGENERACY)) {
            return Err(Error::Mesh(format!(
                "degenerate radial graph: rho = {rho} at theta = {theta}"
            )));
        }
        if sf == SpaceForm::Sphere && rho >= T::PI() - flt(ANTIPODE_GUARD) {
            return Err(Error::Mesh(format!(
                "radial graph reaches the antipode at theta = {theta}"
            )));
        }
        rhos.push(rho);
    }

    // apex first, then layer-major vertices
    let mut vertices = Vec::with_capacity(nr * (ntheta + 1) + 1);
    vertices.push(PolarPoint::raw(T::zero(), start + width * flt(0.5)));
    for i in 1..=nr {
        for j in 0..=ntheta {
            let r = rhos[j] * flt(i as f64) / flt(nr as f64);
            vertices.push(PolarPoint::raw(r, thetas[j]));
        }
    }
    let vid = |i: usize, j: usize| -> usize { 1 + (i - 1) * (ntheta + 1) + j };

    let mut triangles = Vec::with_capacity((2 * nr - 1) * ntheta);
    let mut boundary_edges = Vec::new();

    // apex fan
    for j in 0..ntheta {
        let t = triangles.len();
        triangles.push([0, vid(1, j), vid(1, j + 1)]);
        if j == 0 {
            boundary_edges.push(BoundaryEdge {
                a: 0,
                b: vid(1, 0),
                tag: BoundaryTag::Gamma1,
                triangle: t,
            });
        }
        if j == ntheta - 1 {
            boundary_edges.push(BoundaryEdge {
                a: vid(1, ntheta),
                b: 0,
                tag: BoundaryTag::Gamma1,
                triangle: t,
            });
        }
        if nr == 1 {
            boundary_edges.push(BoundaryEdge {
                a: vid(1, j),
                b: vid(1, j + 1),
                tag: BoundaryTag::Gamma0,
                triangle: t,
            });
        }
    }

    // quad strips, diagonal from (i, j) to (i + 1, j + 1)
    for i in 1..nr {
        for j in 0..ntheta {
            let t1 = triangles.len();
            triangles.push([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)]);
            let t2 = triangles.len();
            triangles.push([vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)]);
            if j == 0 {
                boundary_edges.push(BoundaryEdge {
                    a: vid(i, 0),
                    b: vid(i + 1, 0),
                    tag: BoundaryTag::Gamma1,
                    triangle: t1,
                });
            }
            if j == ntheta - 1 {
                boundary_edges.push(BoundaryEdge {
                    a: vid(i, ntheta),
                    b: vid(i + 1, ntheta),
                    tag: BoundaryTag::Gamma1,
                    triangle: t2,
                });
            }
            if i == nr - 1 {
                boundary_edges.push(BoundaryEdge {
                    a: vid(nr, j),
                    b: vid(nr, j + 1),
                    tag: BoundaryTag::Gamma0,
                    triangle: t1,
                });
            }
        }
    }

    let mesh = Mesh {
        spaceform: sf,
        vertices,
        triangles,
        boundary_edges,
        apex_index: Some(0),
        lattice: Some((nr, ntheta)),
    };
    for t in 0..mesh.triangle_count() {
        if !(mesh.parametric_area(t) > T::zero()) {
            return Err(Error::Mesh(format!(
                "triangle {t} is degenerate or misoriented"
            )));
        }
    }
    Ok(mesh)
}

/// Structural and metric diagnostics of a mesh; `flags` lists violations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshDiagnostics {
    pub vertices: usize,
    pub triangles: usize,
    pub edges: usize,
    pub gamma0_edges: usize,
    pub gamma1_edges: usize,
    pub euler_characteristic: i64,
    pub min_metric_area: f64,
    pub total_metric_area: f64,
    pub min_angle_deg: f64,
    pub max_edge_length: f64,
    pub flags: Vec<String>,
}

impl MeshDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Diagnostic pass over a mesh: edge-manifold structure, boundary tags,
/// Euler characteristic, orientation, and element quality.
pub fn validate_mesh<T: Real>(mesh: &Mesh<T>) -> MeshDiagnostics {
    let mut flags = Vec::new();
    let mut edge_use: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            *edge_use.entry(key).or_insert(0) += 1;
        }
    }
    let tagged: BTreeMap<(usize, usize), BoundaryTag> = mesh
        .boundary_edges
        .iter()
        .map(|e| ((e.a.min(e.b), e.a.max(e.b)), e.tag))
        .collect();
    for (&key, &uses) in &edge_use {
        match uses {
            1 => {
                if !tagged.contains_key(&key) {
                    flags.push(format!("untagged boundary edge {key:?}"));
                }
            }
            2 => {
                if tagged.contains_key(&key) {
                    flags.push(format!("interior edge {key:?} carries a boundary tag"));
                }
            }
            n => flags.push(format!("edge {key:?} used by {n} triangles")),
        }
    }
    for key in tagged.keys() {
        if !edge_use.contains_key(key) {
            flags.push(format!("tagged edge {key:?} not in any triangle"));
        }
    }

    let gamma0 = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.tag == BoundaryTag::Gamma0)
        .count();
    let gamma1 = mesh.boundary_edges.len() - gamma0;
    if gamma0 == 0 {
        flags.push("no GAMMA0 edges: domain is not admissible".into());
    }
    if gamma1 == 0 {
        flags.push("no GAMMA1 edges: domain is not admissible".into());
    }

    let euler = mesh.vertex_count() as i64 - edge_use.len() as i64 + mesh.triangle_count() as i64;
    if euler != 1 {
        flags.push(format!("Euler characteristic {euler}, expected 1"));
    }

    let mut min_area = f64::INFINITY;
    let mut total_area = 0.0;
    let mut min_angle = f64::INFINITY;
    let mut max_edge = 0.0f64;
    for t in 0..mesh.triangle_count() {
        let a = to_f64(mesh.triangle_metric_area(t));
        total_area += a;
        min_area = min_area.min(a);
        if to_f64(mesh.parametric_area(t)) <= 0.0 {
            flags.push(format!("triangle {t} has nonpositive orientation"));
        }
        let tri = mesh.triangles[t];
        let mut l = [0.0f64; 3];
        for k in 0..3 {
            l[k] = to_f64(mesh.edge_metric_length(tri[k], tri[(k + 1) % 3]));
            max_edge = max_edge.max(l[k]);
        }
        // law of cosines on metric edge lengths
        for k in 0..3 {
            let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
            let cosang = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0);
            min_angle = min_angle.min(cosang.acos().to_degrees());
        }
    }
    if min_area <= 0.0 {
        flags.push(format!("nonpositive metric area {min_area}"));
    }

    MeshDiagnostics {
        vertices: mesh.vertex_count(),
        triangles: mesh.triangle_count(),
        edges: edge_use.len(),
        gamma0_edges: gamma0,
        gamma1_edges: gamma1,
        euler_characteristic: euler,
        min_metric_area: min_area,
        total_metric_area: total_area,
        min_angle_deg: min_angle,
        max_edge_length: max_edge,
        flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cone_interior(alpha: f64) -> ConeSpec<f64> {
        ConeSpec::new(0.0, alpha, Side::Interior).unwrap()
    }

    fn cap_mesh(sf: SpaceForm, alpha: f64, radius: f64, nr: usize, nt: usize) -> Mesh<f64> {
        let cone = cone_interior(alpha);
        let graph = constant_graph(sf, &cone, radius, nt.max(8)).unwrap();
        build_sector_mesh(sf, &cone, &graph, nr, nt).unwrap()
    }

    #[test]
    fn counts_match_construction_formula() {
        let m = cap_mesh(SpaceForm::Sphere, PI / 3.0, 0.8, 2, 2);
        assert_eq!(m.vertex_count(), 7);
        assert_eq!(m.triangle_count(), 6);
        let m = cap_mesh(SpaceForm::Flat, PI / 3.0, 1.0, 1, 1);
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.triangle_count(), 1);
    }

    #[test]
    fn euler_characteristic_of_small_mesh() {
        let m = cap_mesh(SpaceForm::Sphere, PI / 3.0, 0.8, 2, 2);
        let d = validate_mesh(&m);
        assert_eq!(d.edges, 12);
        assert_eq!(d.euler_characteristic, 1);
        assert!(d.is_valid(), "{:?}", d.flags);
        assert!(d.min_metric_area > 0.0);
    }

    #[test]
    fn metric_area_converges_to_cap_area() {
        // alpha (1 - cos R) for the spherical cap, analytic volume integral
        let alpha = PI / 3.0;
        let r = 0.8f64;
        let exact = alpha * (1.0 - r.cos());
        let coarse = (cap_mesh(SpaceForm::Sphere, alpha, r, 16, 16).metric_area() - exact).abs();
        let fine = (cap_mesh(SpaceForm::Sphere, alpha, r, 32, 32).metric_area() - exact).abs();
        assert!(fine < exact * 1e-3, "fine error {fine}");
        assert!(coarse / fine > 3.0, "O(h^2): coarse {coarse}, fine {fine}");
        // the flat volume element is linear in r, so the quadrature is exact
        let flat =
            (cap_mesh(SpaceForm::Flat, alpha, r, 16, 16).metric_area() - alpha * r * r / 2.0).abs();
        assert!(flat < 1e-13, "flat area defect {flat}");
        // hyperbolic cap converges at second order like the spherical one
        let exact = alpha * (r.cosh() - 1.0);
        let coarse =
            (cap_mesh(SpaceForm::Hyperbolic, alpha, r, 16, 16).metric_area() - exact).abs();
        let fine = (cap_mesh(SpaceForm::Hyperbolic, alpha, r, 32, 32).metric_area() - exact).abs();
        assert!(coarse / fine > 3.0, "coarse {coarse}, fine {fine}");
    }

    #[test]
    fn exterior_counts_match_complementary_interior() {
        let alpha = PI / 3.0;
        let ext = ConeSpec::new(0.0, alpha, Side::Exterior).unwrap();
        let g = constant_graph(SpaceForm::Sphere, &ext, 0.8, 24).unwrap();
        let m_ext = build_sector_mesh(SpaceForm::Sphere, &ext, &g, 8, 24).unwrap();
        let int = ConeSpec::new(0.0, 2.0 * PI - alpha, Side::Interior).unwrap();
        let g = constant_graph(SpaceForm::Sphere, &int, 0.8, 24).unwrap();
        let m_int = build_sector_mesh(SpaceForm::Sphere, &int, &g, 8, 24).unwrap();
        assert_eq!(m_ext.vertex_count(), m_int.vertex_count());
        assert_eq!(m_ext.triangle_count(), m_int.triangle_count());
        assert_eq!(m_ext.boundary_edges.len(), m_int.boundary_edges.len());
        // the exterior active interval is the complement of the cone
        let (start, width) = ext.active_interval();
        assert!((start - alpha).abs() < 1e-15);
        assert!((width - (2.0 * PI - alpha)).abs() < 1e-15);
    }

    #[test]
    fn apex_lies_on_wall_closure() {
        let m = cap_mesh(SpaceForm::Flat, PI / 2.0, 1.0, 4, 6);
        let apex = m.apex_index.unwrap();
        let on_gamma1 = m
            .boundary_edges
            .iter()
            .any(|e| e.tag == BoundaryTag::Gamma1 && (e.a == apex || e.b == apex));
        assert!(on_gamma1);
        // wall edges stay on the wall rays except at the degenerate apex
        let (start, width) = cone_interior(PI / 2.0).active_interval();
        for e in &m.boundary_edges {
            if e.tag == BoundaryTag::Gamma1 {
                for v in [e.a, e.b] {
                    let p = m.vertices[v];
                    let on_wall = (p.theta - start).abs() < 1e-12
                        || (p.theta - (start + width)).abs() < 1e-12;
                    assert!(on_wall || p.r == 0.0, "wall vertex off the rays: {p:?}");
                }
            }
        }
    }

    #[test]
    fn gamma0_edges_lie_on_graph() {
        let cone = cone_interior(PI / 2.0);
        let graph = perturbed_graph(SpaceForm::Flat, &cone, 1.0, 0.1, 1, 12).unwrap();
        let m = build_sector_mesh(SpaceForm::Flat, &cone, &graph, 6, 12).unwrap();
        for e in &m.boundary_edges {
            if e.tag == BoundaryTag::Gamma0 {
                for v in [e.a, e.b] {
                    let p = m.vertices[v];
                    let rho = graph.eval(p.theta).unwrap();
                    assert!((p.r - rho).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn offcenter_graph_examples() {
        // concentric degenerate case: d = 0 gives rho = R on every ray
        let thetas: Vec<f64> = (0..=8).map(|j| j as f64 * PI / 16.0).collect();
        let g = offcenter_cap_graph(SpaceForm::Sphere, 0.0, 0.7, 0.0, &thetas).unwrap();
        for &(_, rho) in g.samples() {
            assert!((rho - 0.7).abs() < 1e-11);
        }
        // collinear flat case
        let g = offcenter_cap_graph(SpaceForm::Flat, 0.5f64, 1.0, 0.0, &[0.0]).unwrap();
        assert!((g.samples()[0].1 - 1.5).abs() < 1e-11);
        // spherical law of cosines at a right angle: cos R = cos d cos rho,
        // root frozen from the bisection oracle below
        let g = offcenter_cap_graph(SpaceForm::Sphere, 0.3, 0.5, 0.0, &[PI / 2.0]).unwrap();
        let oracle = {
            let f = |rho: f64| 0.3f64.cos() * rho.cos() - 0.5f64.cos();
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        assert!((oracle - 0.40624545419097347).abs() < 1e-12);
        assert!((g.samples()[0].1 - oracle).abs() < 1e-10);
    }

    #[test]
    fn offcenter_graph_misses_ray() {
        // circle of radius 0.2 about (0.5, 0): rays far from theta0 miss it
        let err = offcenter_cap_graph(SpaceForm::Flat, 0.5, 0.2, 0.0, &[PI]).unwrap_err();
        match err {
            Error::RayMissesCircle { theta, .. } => assert!((theta - PI).abs() < 1e-12),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn degenerate_and_antipodal_graphs_rejected() {
        let cone = cone_interior(PI / 3.0);
        assert!(constant_graph(SpaceForm::Flat, &cone, 0.0, 8).is_err());
        assert!(constant_graph(SpaceForm::Sphere, &cone, PI, 8).is_err());
        // a perturbation deep enough to cross zero is rejected as degenerate
        assert!(perturbed_graph(SpaceForm::Flat, &cone, 1.0, 1.5, 1, 8).is_err());
    }

    #[test]
    fn missing_tags_flagged() {
        let mut m = cap_mesh(SpaceForm::Flat, PI / 3.0, 1.0, 2, 2);
        m.boundary_edges.retain(|e| e.tag != BoundaryTag::Gamma0);
        let d = validate_mesh(&m);
        assert!(!d.is_valid());
        assert!(d.flags.iter().any(|f| f.contains("GAMMA0")));
    }

    #[test]
    fn graph_must_cover_active_interval() {
        let cone = cone_interior(PI / 3.0);
        let narrow = ConeSpec::new(0.0, PI / 4.0, Side::Interior).unwrap();
        let graph = constant_graph(SpaceForm::Flat, &narrow, 1.0, 8).unwrap();
        let err = build_sector_mesh(SpaceForm::Flat, &cone, &graph, 4, 4).unwrap_err();
        assert!(err.to_string().contains("does not cover"), "{err}");
    }

    #[test]
    fn cone_validation() {
        assert!(ConeSpec::new(1.0, 1.0, Side::Interior).is_err());
        assert!(ConeSpec::new(1.0, 0.5, Side::Interior).is_err());
        assert!(ConeSpec::new(0.0, 2.0 * PI, Side::Interior).is_err());
        let c = ConeSpec::new(0.0, PI / 2.0, Side::Interior).unwrap();
        assert!(c.is_convex());
        let c = ConeSpec::new(0.0, 1.2 * PI, Side::Interior).unwrap();
        assert!(!c.is_convex());
    }

    #[test]
    fn export_format_is_stable() {
        let m = cap_mesh(SpaceForm::Flat, PI / 3.0, 1.0, 1, 1);
        let mut buf = Vec::new();
        m.write_export(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "spaceform 0");
        assert_eq!(lines[1], "vertices 3");
        assert_eq!(lines[5], "triangles 1");
        assert_eq!(lines[6], "0 1 2");
        assert_eq!(lines[7], "boundary_edges 3");
        assert!(lines[8..].iter().any(|l| l.ends_with("GAMMA0")));
        assert!(lines[8..].iter().any(|l| l.ends_with("GAMMA1")));
    }
}
