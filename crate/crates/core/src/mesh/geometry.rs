//! Pointwise geometry of curved elements: positions, tangents, jacobians and
//! edge conormals at the evaluation sets of a reference element.

use super::{barycentric, SurfaceMesh, V3};
use crate::error::{Error, Result};
use crate::refelem::{grad_vandermonde, vandermonde, warp_blend_nodes, ReferenceElement};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Geometry data sampled along one local edge at its quadrature points.
#[derive(Debug, Clone)]
pub struct EdgeGeometry {
    pub pos: Vec<V3>,
    /// Unit tangent along the edge traversal direction.
    pub tangent: Vec<V3>,
    /// Outward in-surface conormal n = tangent x e3.
    pub conormal: Vec<V3>,
    /// Line jacobian |dc/dt|.
    pub jac: Vec<f64>,
    /// Quadrature weight times line jacobian.
    pub wj: Vec<f64>,
    pub a1: Vec<V3>,
    pub a2: Vec<V3>,
}

/// Geometry of one curved element evaluated at the solution nodes, volume
/// quadrature points and edge quadrature points of a reference element.
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub node_pos: Vec<V3>,
    pub node_a1: Vec<V3>,
    pub node_a2: Vec<V3>,
    pub quad_pos: Vec<V3>,
    pub quad_a1: Vec<V3>,
    pub quad_a2: Vec<V3>,
    /// |a1 x a2| at quadrature points.
    pub quad_jac: Vec<f64>,
    /// Quadrature weight times jacobian.
    pub quad_wj: Vec<f64>,
    /// Contravariant tangent vectors: grad f = (df/ds1) g1 + (df/ds2) g2.
    pub quad_g1: Vec<V3>,
    pub quad_g2: Vec<V3>,
    /// Contravariant tangents at the solution nodes.
    pub node_g1: Vec<V3>,
    pub node_g2: Vec<V3>,
    pub edges: [EdgeGeometry; 3],
}

/// Per-element geometry for a whole mesh/reference-element pair.
#[derive(Debug, Clone)]
pub struct MeshGeometry {
    pub elements: Vec<ElementGeometry>,
}

/// Evaluation matrices mapping degree-q geometry nodal values to values and
/// reference derivatives at arbitrary points.
pub(crate) fn q_map_eval_matrices(
    q: usize,
    pts: &[(f64, f64)],
) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let vq = vandermonde(q, &warp_blend_nodes(q));
    let vq_inv = vq.lu().try_inverse().expect("geometry Vandermonde invertible");
    let e = vandermonde(q, pts) * &vq_inv;
    let (vr, vs) = grad_vandermonde(q, pts);
    (e, vr * &vq_inv, vs * &vq_inv)
}

struct MapSample {
    pos: Vec<V3>,
    a1: Vec<V3>,
    a2: Vec<V3>,
}

fn eval_map(
    geom_nodes: &[V3],
    e: &DMatrix<f64>,
    er: &DMatrix<f64>,
    es: &DMatrix<f64>,
) -> MapSample {
    let n = e.nrows();
    let mut pos = vec![V3::zeros(); n];
    let mut a1 = vec![V3::zeros(); n];
    let mut a2 = vec![V3::zeros(); n];
    for i in 0..n {
        for (j, g) in geom_nodes.iter().enumerate() {
            pos[i] += e[(i, j)] * g;
            a1[i] += er[(i, j)] * g;
            a2[i] += es[(i, j)] * g;
        }
    }
    MapSample { pos, a1, a2 }
}

fn contravariant(a1: &V3, a2: &V3, element: usize) -> Result<(V3, V3, f64)> {
    let g11 = a1.dot(a1);
    let g12 = a1.dot(a2);
    let g22 = a2.dot(a2);
    let det = g11 * g22 - g12 * g12;
    if det <= 0.0 || !det.is_finite() {
        return Err(Error::DegenerateElement { element, norm: det });
    }
    let g1 = (g22 * a1 - g12 * a2) / det;
    let g2 = (-g12 * a1 + g11 * a2) / det;
    Ok((g1, g2, det.sqrt()))
}

fn assemble_element(
    element: usize,
    geom_nodes: &[V3],
    elem: &ReferenceElement,
    mats: &EvalMats,
) -> Result<ElementGeometry> {
    let nodes = eval_map(geom_nodes, &mats.node.0, &mats.node.1, &mats.node.2);
    let quad = eval_map(geom_nodes, &mats.quad.0, &mats.quad.1, &mats.quad.2);

    let nq = quad.pos.len();
    let mut quad_jac = vec![0.0; nq];
    let mut quad_wj = vec![0.0; nq];
    let mut quad_g1 = vec![V3::zeros(); nq];
    let mut quad_g2 = vec![V3::zeros(); nq];
    for q in 0..nq {
        let (g1, g2, jac) = contravariant(&quad.a1[q], &quad.a2[q], element)?;
        quad_g1[q] = g1;
        quad_g2[q] = g2;
        quad_jac[q] = jac;
        quad_wj[q] = elem.quad.weights[q] * jac;
    }

    let nn = nodes.pos.len();
    let mut node_g1 = vec![V3::zeros(); nn];
    let mut node_g2 = vec![V3::zeros(); nn];
    for k in 0..nn {
        let (g1, g2, _) = contravariant(&nodes.a1[k], &nodes.a2[k], element)?;
        node_g1[k] = g1;
        node_g2[k] = g2;
    }

    let mut edges: Vec<EdgeGeometry> = Vec::with_capacity(3);
    for (le, mats_e) in mats.edge.iter().enumerate() {
        let smp = eval_map(geom_nodes, &mats_e.0, &mats_e.1, &mats_e.2);
        let ops = &elem.edges[le];
        let (drdt, dsdt) = ops.dref_dt;
        let ne = smp.pos.len();
        let mut tangent = vec![V3::zeros(); ne];
        let mut conormal = vec![V3::zeros(); ne];
        let mut jac = vec![0.0; ne];
        let mut wj = vec![0.0; ne];
        for i in 0..ne {
            let dcdt = drdt * smp.a1[i] + dsdt * smp.a2[i];
            let len = dcdt.norm();
            if len <= 0.0 || !len.is_finite() {
                return Err(Error::DegenerateElement { element, norm: len });
            }
            let that = dcdt / len;
            let e3 = smp.a1[i].cross(&smp.a2[i]);
            let e3n = e3.norm();
            if e3n <= 0.0 {
                return Err(Error::DegenerateElement { element, norm: e3n });
            }
            let n = that.cross(&(e3 / e3n));
            tangent[i] = that;
            conormal[i] = n / n.norm();
            jac[i] = len;
            wj[i] = ops.quad_w[i] * len;
        }
        edges.push(EdgeGeometry {
            pos: smp.pos,
            tangent,
            conormal,
            jac,
            wj,
            a1: smp.a1,
            a2: smp.a2,
        });
    }
    let edges: [EdgeGeometry; 3] = edges.try_into().expect("three edges");

    Ok(ElementGeometry {
        node_pos: nodes.pos,
        node_a1: nodes.a1,
        node_a2: nodes.a2,
        quad_pos: quad.pos,
        quad_a1: quad.a1,
        quad_a2: quad.a2,
        quad_jac,
        quad_wj,
        quad_g1,
        quad_g2,
        node_g1,
        node_g2,
        edges,
    })
}

struct EvalMats {
    node: (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>),
    quad: (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>),
    edge: [(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>); 3],
}

impl MeshGeometry {
    /// Evaluate the frozen q-map of every element at the evaluation sets of
    /// `elem`.
    pub fn build(mesh: &SurfaceMesh, elem: &ReferenceElement) -> Result<Self> {
        let q = mesh.geometric_order_q;
        let mats = EvalMats {
            node: q_map_eval_matrices(q, &elem.nodes),
            quad: q_map_eval_matrices(q, &elem.quad.points),
            edge: std::array::from_fn(|e| q_map_eval_matrices(q, &elem.edges[e].quad_rs)),
        };
        let elements: Result<Vec<ElementGeometry>> = mesh
            .geom_nodes
            .par_iter()
            .enumerate()
            .map(|(i, g)| assemble_element(i, g, elem, &mats))
            .collect();
        Ok(MeshGeometry { elements: elements? })
    }
}

/// Analytic geometry of a single exact-sphere element: the gnomonic (radial)
/// projection of the flat triangle onto the sphere, with exact tangents. The
/// surface normal of this geometry is the radial direction to machine
/// precision, which makes it a reference for frame construction and
/// differential tests.
pub fn exact_sphere_geometry(
    verts: &[V3; 3],
    radius: f64,
    elem: &ReferenceElement,
) -> ElementGeometry {
    let eval = |pts: &[(f64, f64)]| -> MapSample {
        let n = pts.len();
        let mut pos = vec![V3::zeros(); n];
        let mut a1 = vec![V3::zeros(); n];
        let mut a2 = vec![V3::zeros(); n];
        // linear map derivatives in barycentric form
        let dp_dr = (verts[1] - verts[0]) / 2.0;
        let dp_ds = (verts[2] - verts[0]) / 2.0;
        for (i, &(r, s)) in pts.iter().enumerate() {
            let lam = barycentric(r, s);
            let p = lam[0] * verts[0] + lam[1] * verts[1] + lam[2] * verts[2];
            let norm = p.norm();
            let phat = p / norm;
            pos[i] = radius * phat;
            // d(radius * p/|p|)[v] = radius * (v - (v . phat) phat)/|p|
            a1[i] = radius * (dp_dr - dp_dr.dot(&phat) * phat) / norm;
            a2[i] = radius * (dp_ds - dp_ds.dot(&phat) * phat) / norm;
        }
        MapSample { pos, a1, a2 }
    };

    let nodes = eval(&elem.nodes);
    let quad = eval(&elem.quad.points);
    let nq = quad.pos.len();
    let mut quad_jac = vec![0.0; nq];
    let mut quad_wj = vec![0.0; nq];
    let mut quad_g1 = vec![V3::zeros(); nq];
    let mut quad_g2 = vec![V3::zeros(); nq];
    for qi in 0..nq {
        let (g1, g2, jac) = contravariant(&quad.a1[qi], &quad.a2[qi], 0).unwrap();
        quad_g1[qi] = g1;
        quad_g2[qi] = g2;
        quad_jac[qi] = jac;
        quad_wj[qi] = elem.quad.weights[qi] * jac;
    }
    let nn = nodes.pos.len();
    let mut node_g1 = vec![V3::zeros(); nn];
    let mut node_g2 = vec![V3::zeros(); nn];
    for k in 0..nn {
        let (g1, g2, _) = contravariant(&nodes.a1[k], &nodes.a2[k], 0).unwrap();
        node_g1[k] = g1;
        node_g2[k] = g2;
    }
    let edges: [EdgeGeometry; 3] = std::array::from_fn(|le| {
        let ops = &elem.edges[le];
        let smp = eval(&ops.quad_rs);
        let (drdt, dsdt) = ops.dref_dt;
        let ne = smp.pos.len();
        let mut tangent = vec![V3::zeros(); ne];
        let mut conormal = vec![V3::zeros(); ne];
        let mut jac = vec![0.0; ne];
        let mut wj = vec![0.0; ne];
        for i in 0..ne {
            let dcdt = drdt * smp.a1[i] + dsdt * smp.a2[i];
            let len = dcdt.norm();
            let that = dcdt / len;
            let e3 = smp.a1[i].cross(&smp.a2[i]).normalize();
            let n = that.cross(&e3);
            tangent[i] = that;
            conormal[i] = n / n.norm();
            jac[i] = len;
            wj[i] = ops.quad_w[i] * len;
        }
        EdgeGeometry { pos: smp.pos, tangent, conormal, jac, wj, a1: smp.a1, a2: smp.a2 }
    });

    ElementGeometry {
        node_pos: nodes.pos,
        node_a1: nodes.a1,
        node_a2: nodes.a2,
        quad_pos: quad.pos,
        quad_a1: quad.a1,
        quad_a2: quad.a2,
        quad_jac,
        quad_wj,
        quad_g1,
        quad_g2,
        node_g1,
        node_g2,
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_sphere_mesh;
    use crate::refelem::build_reference_element;

    #[test]
    fn jacobians_positive_and_conormals_orthonormal() {
        let elem = build_reference_element(4, 10).unwrap();
        let mesh = generate_sphere_mesh(1, 3).unwrap();
        let geom = MeshGeometry::build(&mesh, &elem).unwrap();
        for eg in &geom.elements {
            for &j in &eg.quad_jac {
                assert!(j > 0.0);
            }
            for edge in &eg.edges {
                for i in 0..edge.pos.len() {
                    let n = edge.conormal[i];
                    assert!((n.norm() - 1.0).abs() < 1e-12);
                    assert!(n.dot(&edge.tangent[i]).abs() < 1e-12);
                    let e3 = edge.a1[i].cross(&edge.a2[i]).normalize();
                    assert!(n.dot(&e3).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn contravariant_duality() {
        let elem = build_reference_element(3, 8).unwrap();
        let mesh = generate_sphere_mesh(1, 3).unwrap();
        let geom = MeshGeometry::build(&mesh, &elem).unwrap();
        let eg = &geom.elements[7];
        for q in 0..eg.quad_pos.len() {
            assert!((eg.quad_g1[q].dot(&eg.quad_a1[q]) - 1.0).abs() < 1e-11);
            assert!(eg.quad_g1[q].dot(&eg.quad_a2[q]).abs() < 1e-11);
            assert!(eg.quad_g2[q].dot(&eg.quad_a2[q]) - 1.0 < 1e-11);
            assert!(eg.quad_g2[q].dot(&eg.quad_a1[q]).abs() < 1e-11);
        }
    }

    #[test]
    fn exact_sphere_geometry_has_radial_normal() {
        let elem = build_reference_element(4, 10).unwrap();
        let mesh = generate_sphere_mesh(0, 1).unwrap();
        let tri = mesh.elements[3];
        let verts = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
        let eg = exact_sphere_geometry(&verts, 1.0, &elem);
        for q in 0..eg.quad_pos.len() {
            let e3 = eg.quad_a1[q].cross(&eg.quad_a2[q]).normalize();
            let radial = eg.quad_pos[q].normalize();
            assert!((e3 - radial).norm() < 1e-13, "normal deviates: {}", (e3 - radial).norm());
            assert!((eg.quad_pos[q].norm() - 1.0).abs() < 1e-14);
        }
    }
}
