//! Curved triangular meshes of the unit sphere and Earth-like ellipsoid.
//!
//! Vertices lie exactly on the target surface. Each element carries a frozen
//! degree-q polynomial geometry map; edge geometry nodes are sampled on the
//! exact surface arcs, interior nodes come from a transfinite blend of the
//! three edge curves. Solution nodes for any p are images of that q-map, so
//! for p > q they leave the surface. That deliberate displacement is the
//! geometric approximation error the rest of the crate studies.

mod geometry;
mod io;

pub use geometry::{exact_sphere_geometry, ElementGeometry, MeshGeometry};
pub use io::{read_mesh, write_mesh};

use crate::error::{Error, Result};
use crate::refelem::{vandermonde, warp_blend_nodes, ReferenceElement};
use nalgebra::Vector3;
use std::collections::BTreeMap;

pub type V3 = Vector3<f64>;

/// Target surface of a mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind {
    Sphere { radius: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
}

impl SurfaceKind {
    /// Signed residual of the surface equation at a point.
    pub fn residual(&self, x: &V3) -> f64 {
        match *self {
            SurfaceKind::Sphere { radius } => x.norm() - radius,
            SurfaceKind::Ellipsoid { a, b, c } => {
                (x.x / a).powi(2) + (x.y / b).powi(2) + (x.z / c).powi(2) - 1.0
            }
        }
    }

    /// Outward unit normal of the exact surface through the radial projection
    /// of `x` onto it.
    pub fn unit_normal(&self, x: &V3) -> V3 {
        match *self {
            SurfaceKind::Sphere { .. } => x / x.norm(),
            SurfaceKind::Ellipsoid { a, b, c } => {
                let n = V3::new(x.x / (a * a), x.y / (b * b), x.z / (c * c));
                n / n.norm()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SurfaceKind::Sphere { .. } => "sphere",
            SurfaceKind::Ellipsoid { .. } => "ellipsoid",
        }
    }
}

/// Adjacency record for one mesh edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeAdjacency {
    /// Vertex pair in the traversal order of the left side.
    pub vertices: (usize, usize),
    /// (element, local edge) that first claimed the edge.
    pub left: (usize, usize),
    /// Neighbor (element, local edge); `None` marks a boundary edge.
    pub right: Option<(usize, usize)>,
    /// Whether the right side traverses the edge in the opposite direction.
    pub reversed: bool,
}

/// Curved triangular surface mesh with degree-q geometry.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub kind: SurfaceKind,
    pub geometric_order_q: usize,
    pub vertices: Vec<V3>,
    /// Vertex triples, counterclockwise seen from outside.
    pub elements: Vec<[usize; 3]>,
    /// Degree-q geometry node coordinates per element.
    pub geom_nodes: Vec<Vec<V3>>,
    pub edges: Vec<EdgeAdjacency>,
    /// Edge index for each element's three local edges.
    pub element_edges: Vec<[usize; 3]>,
}

/// Nodewise distance-to-surface statistics of the solution nodes.
#[derive(Debug, Clone, Copy)]
pub struct MeshStats {
    pub l2: f64,
    pub linf: f64,
    pub node_count: usize,
}

/// Validation report; `ok()` is true for a closed, consistently oriented mesh
/// whose vertices sit on the target surface.
#[derive(Debug, Clone)]
pub struct MeshValidation {
    pub max_vertex_residual: f64,
    pub boundary_edges: usize,
    pub euler_characteristic: i64,
    pub orientation_consistent: bool,
}

impl MeshValidation {
    pub fn ok(&self) -> bool {
        self.max_vertex_residual < 1e-13
            && self.boundary_edges == 0
            && self.euler_characteristic == 2
            && self.orientation_consistent
    }
}

// Fixed orientation of the base icosahedron. Chosen so that no vertex or edge
// midpoint of any refinement sits near the coordinate poles, where several of
// the classical test velocity fields are singular.
const BASE_TILT_Y: f64 = 0.4;
const BASE_TILT_Z: f64 = 0.25;

fn base_icosahedron() -> (Vec<V3>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let (cy, sy) = (BASE_TILT_Y.cos(), BASE_TILT_Y.sin());
    let (cz, sz) = (BASE_TILT_Z.cos(), BASE_TILT_Z.sin());
    let vertices = raw
        .iter()
        .map(|v| {
            let p = V3::new(v[0], v[1], v[2]).normalize();
            // rotate about y, then z
            let p = V3::new(cy * p.x + sy * p.z, p.y, -sy * p.x + cy * p.z);
            V3::new(cz * p.x - sz * p.y, sz * p.x + cz * p.y, p.z)
        })
        .collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (vertices, faces)
}

fn subdivide(vertices: &mut Vec<V3>, faces: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut new_faces = Vec::with_capacity(faces.len() * 4);
    let mut mid = |i: usize, j: usize, verts: &mut Vec<V3>| -> usize {
        let key = (i.min(j), i.max(j));
        if let Some(&k) = midpoint.get(&key) {
            return k;
        }
        let m = (verts[i] + verts[j]).normalize();
        verts.push(m);
        let k = verts.len() - 1;
        midpoint.insert(key, k);
        k
    };
    for &[a, b, c] in faces {
        let ab = mid(a, b, vertices);
        let bc = mid(b, c, vertices);
        let ca = mid(c, a, vertices);
        new_faces.push([a, ab, ca]);
        new_faces.push([b, bc, ab]);
        new_faces.push([c, ca, bc]);
        new_faces.push([ab, bc, ca]);
    }
    new_faces
}

fn slerp(a: &V3, b: &V3, t: f64) -> V3 {
    let cosw = a.dot(b).clamp(-1.0, 1.0);
    let w = cosw.acos();
    if w < 1e-12 {
        return ((1.0 - t) * a + t * b).normalize();
    }
    (((1.0 - t) * w).sin() * a + (t * w).sin() * b) / w.sin()
}

/// Transfinite blend of the three exact great-circle edge arcs of a spherical
/// triangle, evaluated at barycentric coordinates. Edge points land exactly on
/// the sphere; interior points stay slightly inside it.
pub(crate) fn spherical_blend(v: &[V3; 3], lambda: [f64; 3]) -> V3 {
    let mut p = lambda[0] * v[0] + lambda[1] * v[1] + lambda[2] * v[2];
    // edges (a, b) with opposite vertex o
    for (a, b, o) in [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)] {
        let denom = lambda[a] + lambda[b];
        if denom < 1e-14 {
            continue;
        }
        let t = lambda[b] / denom;
        let arc = slerp(&v[a], &v[b], t);
        let lerp = (1.0 - t) * v[a] + t * v[b];
        p += (1.0 - lambda[o]) * (arc - lerp);
    }
    p
}

pub(crate) fn barycentric(r: f64, s: f64) -> [f64; 3] {
    [-(r + s) / 2.0, (1.0 + r) / 2.0, (1.0 + s) / 2.0]
}

fn build_adjacency(
    elements: &[[usize; 3]],
) -> Result<(Vec<EdgeAdjacency>, Vec<[usize; 3]>)> {
    let mut map: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut edges: Vec<EdgeAdjacency> = Vec::new();
    let mut element_edges = vec![[usize::MAX; 3]; elements.len()];
    for (ei, tri) in elements.iter().enumerate() {
        for le in 0..3 {
            let (va, vb) = (tri[le], tri[(le + 1) % 3]);
            let key = (va.min(vb), va.max(vb));
            match map.get(&key) {
                None => {
                    map.insert(key, edges.len());
                    element_edges[ei][le] = edges.len();
                    edges.push(EdgeAdjacency {
                        vertices: (va, vb),
                        left: (ei, le),
                        right: None,
                        reversed: false,
                    });
                }
                Some(&idx) => {
                    let edge = &mut edges[idx];
                    if edge.right.is_some() {
                        return Err(Error::BadAdjacency(format!(
                            "edge {:?} shared by more than two elements",
                            key
                        )));
                    }
                    edge.right = Some((ei, le));
                    edge.reversed = edge.vertices == (vb, va);
                    element_edges[ei][le] = idx;
                }
            }
        }
    }
    Ok((edges, element_edges))
}

fn generate(refine_level: usize, q: usize, kind: SurfaceKind) -> Result<SurfaceMesh> {
    if q < 1 || q > 10 {
        return Err(Error::InvalidParameter(format!("geometric order q={q} outside 1..=10")));
    }
    if refine_level > 6 {
        return Err(Error::InvalidParameter(format!(
            "refine_level={refine_level} too large (max 6)"
        )));
    }
    let (mut vertices, mut faces) = base_icosahedron();
    for _ in 0..refine_level {
        faces = subdivide(&mut vertices, &faces);
    }

    let scale = |p: &V3| -> V3 {
        match kind {
            SurfaceKind::Sphere { radius } => radius * p,
            SurfaceKind::Ellipsoid { a, b, c } => V3::new(a * p.x, b * p.y, c * p.z),
        }
    };

    let geom_ref = warp_blend_nodes(q);
    let geom_nodes = faces
        .iter()
        .map(|tri| {
            let v = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
            geom_ref
                .iter()
                .map(|&(r, s)| scale(&spherical_blend(&v, barycentric(r, s))))
                .collect()
        })
        .collect();

    let scaled_vertices: Vec<V3> = vertices.iter().map(&scale).collect();
    let (edges, element_edges) = build_adjacency(&faces)?;
    Ok(SurfaceMesh {
        kind,
        geometric_order_q: q,
        vertices: scaled_vertices,
        elements: faces,
        geom_nodes,
        edges,
        element_edges,
    })
}

/// Icosahedral unit-sphere mesh, subdivided `refine_level` times
/// (20 * 4^n elements) with frozen degree-q geometry.
pub fn generate_sphere_mesh(refine_level: usize, q: usize) -> Result<SurfaceMesh> {
    generate(refine_level, q, SurfaceKind::Sphere { radius: 1.0 })
}

/// Ellipsoid mesh with semi-axes (ratio, ratio, 1): the unit-sphere sampling
/// is scaled componentwise before the geometry map is frozen.
pub fn generate_ellipsoid_mesh(refine_level: usize, q: usize, ratio: f64) -> Result<SurfaceMesh> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::InvalidParameter(format!("ellipsoid ratio {ratio} must be positive")));
    }
    generate(refine_level, q, SurfaceKind::Ellipsoid { a: ratio, b: ratio, c: 1.0 })
}

impl SurfaceMesh {
    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Positions of the degree-p solution nodes of one element (images of the
    /// reference nodes under the frozen q-map).
    pub fn solution_nodes(&self, elem: usize, p: usize) -> Vec<V3> {
        let pts = warp_blend_nodes(p);
        let q = self.geometric_order_q;
        let vq = vandermonde(q, &warp_blend_nodes(q));
        let vq_inv = vq.lu().try_inverse().expect("geometry Vandermonde invertible");
        let eval = vandermonde(q, &pts) * vq_inv;
        let g = &self.geom_nodes[elem];
        (0..pts.len())
            .map(|i| {
                let mut p = V3::zeros();
                for (j, gj) in g.iter().enumerate() {
                    p += eval[(i, j)] * gj;
                }
                p
            })
            .collect()
    }

    pub fn validate(&self) -> MeshValidation {
        let max_vertex_residual = self
            .vertices
            .iter()
            .map(|v| self.kind.residual(v).abs())
            .fold(0.0, f64::max);
        let boundary_edges = self.edges.iter().filter(|e| e.right.is_none()).count();
        let v = self.vertices.len() as i64;
        let e = self.edges.len() as i64;
        let f = self.elements.len() as i64;
        let orientation_consistent =
            self.edges.iter().all(|e| e.right.is_none() || e.reversed);
        MeshValidation {
            max_vertex_residual,
            boundary_edges,
            euler_characteristic: v - e + f,
            orientation_consistent,
        }
    }
}

/// Distance of the degree-p solution nodes from the exact sphere.
///
/// L2 is sqrt(sum_i (r_exact - r_i)^2 / N) over all N solution nodes; Linf is
/// the largest single deviation. Only defined for sphere meshes.
pub fn mesh_error_stats(mesh: &SurfaceMesh, p: usize) -> Result<MeshStats> {
    let radius = match mesh.kind {
        SurfaceKind::Sphere { radius } => radius,
        SurfaceKind::Ellipsoid { .. } => return Err(Error::UnsupportedSurface),
    };
    let pts = warp_blend_nodes(p);
    let q = mesh.geometric_order_q;
    let vq = vandermonde(q, &warp_blend_nodes(q));
    let vq_inv = vq.lu().try_inverse().expect("geometry Vandermonde invertible");
    let eval = vandermonde(q, &pts) * vq_inv;

    let mut sum_sq = 0.0;
    let mut linf: f64 = 0.0;
    let mut count = 0usize;
    for g in &mesh.geom_nodes {
        for i in 0..pts.len() {
            let mut pos = V3::zeros();
            for (j, gj) in g.iter().enumerate() {
                pos += eval[(i, j)] * gj;
            }
            let d = radius - pos.norm();
            sum_sq += d * d;
            linf = linf.max(d.abs());
            count += 1;
        }
    }
    Ok(MeshStats { l2: (sum_sq / count as f64).sqrt(), linf, node_count: count })
}

/// Total surface area by quadrature over the curved elements.
pub fn surface_area(geom: &MeshGeometry) -> f64 {
    geom.elements.iter().map(|e| e.quad_wj.iter().sum::<f64>()).sum()
}

/// Sum over all elements of the conormal line integral; a discrete
/// closed-surface identity puts this near zero.
pub fn boundary_normal_sum(geom: &MeshGeometry) -> V3 {
    let mut total = V3::zeros();
    for e in &geom.elements {
        for edge in &e.edges {
            for (i, n) in edge.conormal.iter().enumerate() {
                total += edge.wj[i] * n;
            }
        }
    }
    total
}

pub(crate) use self::geometry::q_map_eval_matrices;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refelem::build_reference_element;

    #[test]
    fn icosahedron_counts() {
        let m = generate_sphere_mesh(0, 1).unwrap();
        assert_eq!(m.element_count(), 20);
        assert_eq!(m.vertices.len(), 12);
        let m2 = generate_sphere_mesh(2, 3).unwrap();
        assert_eq!(m2.element_count(), 320);
    }

    #[test]
    fn vertices_on_surface_and_closed() {
        for (refine, q) in [(0, 1), (1, 3), (2, 3)] {
            let m = generate_sphere_mesh(refine, q).unwrap();
            let v = m.validate();
            assert!(v.max_vertex_residual < 1e-13, "residual {}", v.max_vertex_residual);
            assert_eq!(v.boundary_edges, 0);
            assert_eq!(v.euler_characteristic, 2);
            assert!(v.orientation_consistent);
            assert!(v.ok());
        }
    }

    #[test]
    fn no_nodes_near_coordinate_poles() {
        // the static test fields carry 1/sin(theta); the generator's fixed
        // tilt must keep every solution node away from the poles
        let m = generate_sphere_mesh(2, 3).unwrap();
        let mut min_sin = f64::MAX;
        for e in 0..m.element_count() {
            for pos in m.solution_nodes(e, 8) {
                let sin_theta = (pos.x * pos.x + pos.y * pos.y).sqrt() / pos.norm();
                min_sin = min_sin.min(sin_theta);
            }
        }
        assert!(min_sin > 0.02, "min sin(theta) = {min_sin}");
    }

    #[test]
    fn mesh_error_in_expected_band() {
        let m = generate_sphere_mesh(2, 3).unwrap();
        let s5 = mesh_error_stats(&m, 5).unwrap();
        assert!(s5.l2 >= 1e-6 && s5.l2 <= 1e-4, "L2 = {}", s5.l2);
        assert!(s5.linf >= s5.l2);
        // stagnation with p at fixed q
        let s4 = mesh_error_stats(&m, 4).unwrap();
        let s6 = mesh_error_stats(&m, 6).unwrap();
        let ratio = s6.l2 / s4.l2;
        assert!(ratio > 0.5 && ratio < 2.0, "ratio {ratio}");
    }

    #[test]
    fn vertices_only_nodes_sit_on_sphere() {
        let m = generate_sphere_mesh(1, 3).unwrap();
        let s1 = mesh_error_stats(&m, 1).unwrap();
        assert!(s1.l2 < 1e-13, "p=1 L2 = {}", s1.l2);
    }

    #[test]
    fn mesh_error_at_q_not_larger_than_above_q() {
        let m = generate_sphere_mesh(1, 3).unwrap();
        let sq = mesh_error_stats(&m, 3).unwrap();
        let sq2 = mesh_error_stats(&m, 5).unwrap();
        assert!(sq.l2 <= sq2.l2 * (1.0 + 1e-12), "{} vs {}", sq.l2, sq2.l2);
    }

    #[test]
    fn ellipsoid_unit_ratio_matches_sphere_bitwise() {
        let s = generate_sphere_mesh(1, 3).unwrap();
        let e = generate_ellipsoid_mesh(1, 3, 1.0).unwrap();
        for (a, b) in s.vertices.iter().zip(&e.vertices) {
            assert_eq!(a, b);
        }
        for (ga, gb) in s.geom_nodes.iter().zip(&e.geom_nodes) {
            for (a, b) in ga.iter().zip(gb) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn ellipsoid_vertices_satisfy_surface_equation() {
        let m = generate_ellipsoid_mesh(1, 3, 1.003364).unwrap();
        let v = m.validate();
        assert!(v.max_vertex_residual < 1e-13, "residual {}", v.max_vertex_residual);
    }

    #[test]
    fn ellipsoid_area_exceeds_sphere_area() {
        let elem = build_reference_element(4, 10).unwrap();
        let m = generate_ellipsoid_mesh(1, 3, 1.003364).unwrap();
        let geom = MeshGeometry::build(&m, &elem).unwrap();
        assert!(surface_area(&geom) > 4.0 * std::f64::consts::PI);
    }

    #[test]
    fn sphere_area_within_mesh_error_bound() {
        let elem = build_reference_element(5, 12).unwrap();
        let m = generate_sphere_mesh(2, 3).unwrap();
        let geom = MeshGeometry::build(&m, &elem).unwrap();
        let area = surface_area(&geom);
        let stats = mesh_error_stats(&m, 5).unwrap();
        let bound = 10.0 * stats.linf * 4.0 * std::f64::consts::PI;
        assert!((area - 4.0 * std::f64::consts::PI).abs() <= bound);
    }

    #[test]
    fn closed_surface_normal_sum_vanishes() {
        let elem = build_reference_element(4, 10).unwrap();
        let m = generate_sphere_mesh(2, 3).unwrap();
        let geom = MeshGeometry::build(&m, &elem).unwrap();
        let total = boundary_normal_sum(&geom);
        assert!(total.norm() < 1e-10, "sum = {}", total.norm());
    }
}
