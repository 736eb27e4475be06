//! The spurious-divergence functional and its two-term diagnostic split.
//!
//! For unit fields k the functional k.(k.grad)v - k.(v.grad)k measures the
//! divergence contribution attributable to geometric approximation error.
//! Gradients are the tangential derivatives of the element map, regardless of
//! which k is passed.

use crate::analytic::StaticField;
use crate::error::Result;
use crate::frames::{
    build_local_frames, build_locsph_frames, frame_differentials, FrameField, FrameKind,
    NormalRule,
};
use crate::mesh::{ElementGeometry, MeshGeometry, SurfaceMesh, V3};
use crate::ops;
use crate::refelem::{build_reference_element, ReferenceElement};

/// Quadrature-weighted L2 and nodal max norms of the split.
#[derive(Debug, Clone, Copy, Default)]
pub struct SplitNorms {
    pub term1_l2: f64,
    pub term2_l2: f64,
    pub total_l2: f64,
    pub term1_linf: f64,
    pub term2_linf: f64,
    pub total_linf: f64,
}

/// Nodal fields of the split: term1 = k.(k.grad)v, term2 = k.(v.grad)k,
/// total = term1 - term2.
#[derive(Debug, Clone)]
pub struct SpuriousSplit {
    pub term1: Vec<Vec<f64>>,
    pub term2: Vec<Vec<f64>>,
    pub total: Vec<Vec<f64>>,
    pub norms: SplitNorms,
}

/// C.(A.grad)B at the quadrature points of one element, with nodal Cartesian
/// data for B and pointwise values for A and C.
fn contraction_at_quad(
    elem: &ReferenceElement,
    eg: &ElementGeometry,
    c_quad: &[V3],
    a_quad: &[V3],
    b_nodal: &[V3],
) -> Vec<f64> {
    let grads = ops::vector_gradients_at_quad(elem, eg, b_nodal);
    (0..elem.quad_count())
        .map(|q| {
            let g = &grads[q];
            c_quad[q].x * a_quad[q].dot(&g[0])
                + c_quad[q].y * a_quad[q].dot(&g[1])
                + c_quad[q].z * a_quad[q].dot(&g[2])
        })
        .collect()
}

fn contraction_at_nodes(
    elem: &ReferenceElement,
    eg: &ElementGeometry,
    c_nodal: &[V3],
    a_nodal: &[V3],
    b_nodal: &[V3],
) -> Vec<f64> {
    let nn = elem.node_count();
    let mut comp = vec![0.0; nn];
    let mut d1 = vec![0.0; nn];
    let mut d2 = vec![0.0; nn];
    let mut grads = vec![[V3::zeros(); 3]; nn];
    for c in 0..3 {
        for (k, v) in b_nodal.iter().enumerate() {
            comp[k] = v[c];
        }
        ops::apply(&elem.dr, &comp, &mut d1);
        ops::apply(&elem.ds, &comp, &mut d2);
        for k in 0..nn {
            grads[k][c] = d1[k] * eg.node_g1[k] + d2[k] * eg.node_g2[k];
        }
    }
    (0..nn)
        .map(|k| {
            let g = &grads[k];
            c_nodal[k].x * a_nodal[k].dot(&g[0])
                + c_nodal[k].y * a_nodal[k].dot(&g[1])
                + c_nodal[k].z * a_nodal[k].dot(&g[2])
        })
        .collect()
}

/// Total spurious divergence at the quadrature points of one element; this is
/// the volume density the weak operators integrate against test functions.
pub(crate) fn g_total_at_quad(
    elem: &ReferenceElement,
    eg: &ElementGeometry,
    k_nodal: &[V3],
    k_quad: &[V3],
    w_nodal: &[V3],
    w_quad: &[V3],
) -> Vec<f64> {
    let t1 = contraction_at_quad(elem, eg, k_quad, k_quad, w_nodal);
    let t2 = contraction_at_quad(elem, eg, k_quad, w_quad, k_nodal);
    t1.iter().zip(&t2).map(|(a, b)| a - b).collect()
}

/// Compute the spurious-divergence split of two Cartesian vector fields given
/// at the solution nodes of every element.
pub fn spurious_divergence(
    k: &[Vec<V3>],
    v: &[Vec<V3>],
    geom: &MeshGeometry,
    elem: &ReferenceElement,
) -> SpuriousSplit {
    let ne = geom.elements.len();
    assert_eq!(k.len(), ne);
    assert_eq!(v.len(), ne);

    let mut term1 = Vec::with_capacity(ne);
    let mut term2 = Vec::with_capacity(ne);
    let mut total = Vec::with_capacity(ne);
    let mut sq = [0.0f64; 3];
    let mut linf = [0.0f64; 3];

    for (ei, eg) in geom.elements.iter().enumerate() {
        let t1n = contraction_at_nodes(elem, eg, &k[ei], &k[ei], &v[ei]);
        let t2n = contraction_at_nodes(elem, eg, &k[ei], &v[ei], &k[ei]);
        let totn: Vec<f64> = t1n.iter().zip(&t2n).map(|(a, b)| a - b).collect();

        let k_quad = ops::interp_vec_to_quad(elem, &k[ei]);
        let v_quad = ops::interp_vec_to_quad(elem, &v[ei]);
        let t1q = contraction_at_quad(elem, eg, &k_quad, &k_quad, &v[ei]);
        let t2q = contraction_at_quad(elem, eg, &k_quad, &v_quad, &k[ei]);
        for q in 0..elem.quad_count() {
            let wj = eg.quad_wj[q];
            sq[0] += wj * t1q[q] * t1q[q];
            sq[1] += wj * t2q[q] * t2q[q];
            let tot = t1q[q] - t2q[q];
            sq[2] += wj * tot * tot;
        }
        for kx in 0..elem.node_count() {
            linf[0] = linf[0].max(t1n[kx].abs());
            linf[1] = linf[1].max(t2n[kx].abs());
            linf[2] = linf[2].max(totn[kx].abs());
        }

        term1.push(t1n);
        term2.push(t2n);
        total.push(totn);
    }

    SpuriousSplit {
        term1,
        term2,
        total,
        norms: SplitNorms {
            term1_l2: sq[0].sqrt(),
            term2_l2: sq[1].sqrt(),
            total_l2: sq[2].sqrt(),
            term1_linf: linf[0],
            term2_linf: linf[1],
            total_linf: linf[2],
        },
    }
}

/// One row of a p-convergence sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub p: usize,
    pub term1_l2: f64,
    pub term2_l2: f64,
    pub term1_linf: f64,
    pub term2_linf: f64,
}

/// Build frames of the requested kind for a mesh/element pair.
pub fn build_frames(
    mesh: &SurfaceMesh,
    geom: &MeshGeometry,
    elem: &ReferenceElement,
    kind: FrameKind,
) -> Result<FrameField> {
    let mut frames = match kind {
        FrameKind::Local => build_local_frames(geom, elem)?,
        FrameKind::Locsph => build_locsph_frames(mesh, geom, elem, NormalRule::RadialSphere)?,
    };
    frame_differentials(&mut frames, geom, elem)?;
    Ok(frames)
}

/// Evaluate a static test field at the element solution nodes.
pub fn sample_field(
    geom: &MeshGeometry,
    field: StaticField,
) -> Vec<Vec<V3>> {
    geom.elements
        .iter()
        .map(|eg| eg.node_pos.iter().map(|x| field.eval(x)).collect())
        .collect()
}

/// Norms of the split of G(e3, field) for each requested degree p.
pub fn g_convergence_sweep(
    mesh: &SurfaceMesh,
    field: StaticField,
    k_rule: FrameKind,
    p_list: &[usize],
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(p_list.len());
    for &p in p_list {
        let elem = build_reference_element(p, 2 * p + 2)?;
        let geom = MeshGeometry::build(mesh, &elem)?;
        let frames = build_frames(mesh, &geom, &elem, k_rule)?;
        let k: Vec<Vec<V3>> = frames.elements.iter().map(|ef| ef.node[2].clone()).collect();
        let v = sample_field(&geom, field);
        let split = spurious_divergence(&k, &v, &geom, &elem);
        rows.push(SweepRow {
            p,
            term1_l2: split.norms.term1_l2,
            term2_l2: split.norms.term2_l2,
            term1_linf: split.norms.term1_linf,
            term2_linf: split.norms.term2_linf,
        });
    }
    Ok(rows)
}
