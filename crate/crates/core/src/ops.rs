//! Small shared element kernels: interpolation and tangential gradients at
//! quadrature points.

use crate::mesh::{ElementGeometry, V3};
use crate::refelem::ReferenceElement;
use nalgebra::DMatrix;

pub(crate) fn apply(m: &DMatrix<f64>, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(m.ncols(), x.len());
    debug_assert_eq!(m.nrows(), out.len());
    for i in 0..m.nrows() {
        let mut acc = 0.0;
        for j in 0..m.ncols() {
            acc += m[(i, j)] * x[j];
        }
        out[i] = acc;
    }
}

pub(crate) fn interp_to_quad(elem: &ReferenceElement, nodal: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; elem.quad_count()];
    apply(&elem.interp_q, nodal, &mut out);
    out
}

pub(crate) fn interp_to_edge(elem: &ReferenceElement, le: usize, nodal: &[f64]) -> Vec<f64> {
    let e = &elem.edges[le];
    let mut out = vec![0.0; e.quad_t.len()];
    apply(&e.interp, nodal, &mut out);
    out
}

/// Tangential surface gradient of a nodal scalar at the quadrature points:
/// grad f = (df/ds1) g1 + (df/ds2) g2.
pub(crate) fn scalar_gradient_at_quad(
    elem: &ReferenceElement,
    eg: &ElementGeometry,
    nodal: &[f64],
) -> Vec<V3> {
    let nq = elem.quad_count();
    let mut d1 = vec![0.0; nq];
    let mut d2 = vec![0.0; nq];
    apply(&elem.dr_q, nodal, &mut d1);
    apply(&elem.ds_q, nodal, &mut d2);
    (0..nq).map(|q| d1[q] * eg.quad_g1[q] + d2[q] * eg.quad_g2[q]).collect()
}

/// Tangential gradients of the three Cartesian components of a nodal vector
/// field at the quadrature points. `out[q][c]` is the gradient of component c.
pub(crate) fn vector_gradients_at_quad(
    elem: &ReferenceElement,
    eg: &ElementGeometry,
    nodal: &[V3],
) -> Vec<[V3; 3]> {
    let nq = elem.quad_count();
    let nn = elem.node_count();
    debug_assert_eq!(nodal.len(), nn);
    let mut comp = vec![0.0; nn];
    let mut d1 = vec![0.0; nq];
    let mut d2 = vec![0.0; nq];
    let mut out = vec![[V3::zeros(); 3]; nq];
    for c in 0..3 {
        for (k, v) in nodal.iter().enumerate() {
            comp[k] = v[c];
        }
        apply(&elem.dr_q, &comp, &mut d1);
        apply(&elem.ds_q, &comp, &mut d2);
        for q in 0..nq {
            out[q][c] = d1[q] * eg.quad_g1[q] + d2[q] * eg.quad_g2[q];
        }
    }
    out
}

/// Interpolate a nodal vector field (Cartesian components) to quadrature points.
pub(crate) fn interp_vec_to_quad(elem: &ReferenceElement, nodal: &[V3]) -> Vec<V3> {
    let nq = elem.quad_count();
    let mut out = vec![V3::zeros(); nq];
    for q in 0..nq {
        let mut acc = V3::zeros();
        for (k, v) in nodal.iter().enumerate() {
            acc += elem.interp_q[(q, k)] * v;
        }
        out[q] = acc;
    }
    out
}
