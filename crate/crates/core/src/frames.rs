//! Per-element orthonormal moving frames and their pointwise differential
//! quantities.
//!
//! LOCAL frames come from orthonormalizing the element map's tangent vectors,
//! so e3 is the discrete surface normal. LOCSPH frames replace e3 with the
//! exact target-surface normal (radial for the sphere) and re-orthonormalize
//! e1, e2 by projection. Both are discontinuous across element interfaces.

use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, MeshGeometry, SurfaceKind, SurfaceMesh, V3};
use crate::ops;
use crate::refelem::ReferenceElement;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Local,
    Locsph,
}

impl FrameKind {
    pub fn label(&self) -> &'static str {
        match self {
            FrameKind::Local => "local",
            FrameKind::Locsph => "locsph",
        }
    }
}

/// How the aligned normal of LOCSPH frames is prescribed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalRule {
    /// e3 = x/|x|; the paper keeps this rule even on the ellipsoid.
    RadialSphere,
    /// e3 = analytic outward ellipsoid normal.
    AnalyticEllipsoid,
}

/// Triads (e1, e2, e3) of one element at the solution nodes, volume quadrature
/// points and edge quadrature points, plus frame differentials at quadrature
/// points once [`frame_differentials`] has run.
#[derive(Debug, Clone)]
pub struct ElementFrames {
    pub node: [Vec<V3>; 3],
    pub quad: [Vec<V3>; 3],
    /// `edge[local_edge][frame_index][quad_point]`
    pub edge: [[Vec<V3>; 3]; 3],
    /// Divergence of e_i at volume quadrature points (empty until computed).
    pub div_quad: [Vec<f64>; 3],
    /// Curl of e_i at volume quadrature points (empty until computed).
    pub curl_quad: [Vec<V3>; 3],
}

#[derive(Debug, Clone)]
pub struct FrameField {
    pub kind: FrameKind,
    pub elements: Vec<ElementFrames>,
}

fn local_triad(a1: &V3, a2: &V3, element: usize) -> Result<[V3; 3]> {
    let n1 = a1.norm();
    if n1 < 1e-14 {
        return Err(Error::DegenerateElement { element, norm: n1 });
    }
    let e1 = a1 / n1;
    let raw2 = a2 - a2.dot(&e1) * e1;
    let n2 = raw2.norm();
    if n2 < 1e-14 {
        return Err(Error::DegenerateElement { element, norm: n2 });
    }
    let e2 = raw2 / n2;
    let e3 = e1.cross(&e2);
    Ok([e1, e2, e3])
}

fn local_triads(a1s: &[V3], a2s: &[V3], element: usize) -> Result<[Vec<V3>; 3]> {
    let n = a1s.len();
    let mut e1 = Vec::with_capacity(n);
    let mut e2 = Vec::with_capacity(n);
    let mut e3 = Vec::with_capacity(n);
    for k in 0..n {
        let t = local_triad(&a1s[k], &a2s[k], element)?;
        e1.push(t[0]);
        e2.push(t[1]);
        e3.push(t[2]);
    }
    Ok([e1, e2, e3])
}

fn build_local_element(eg: &ElementGeometry, element: usize) -> Result<ElementFrames> {
    let node = local_triads(&eg.node_a1, &eg.node_a2, element)?;
    let quad = local_triads(&eg.quad_a1, &eg.quad_a2, element)?;
    let mut edge: Vec<[Vec<V3>; 3]> = Vec::with_capacity(3);
    for e in &eg.edges {
        edge.push(local_triads(&e.a1, &e.a2, element)?);
    }
    Ok(ElementFrames {
        node,
        quad,
        edge: edge.try_into().expect("three edges"),
        div_quad: Default::default(),
        curl_quad: Default::default(),
    })
}

/// Frames aligned with each element's own tangent plane.
pub fn build_local_frames(geom: &MeshGeometry, _elem: &ReferenceElement) -> Result<FrameField> {
    let elements: Result<Vec<ElementFrames>> = geom
        .elements
        .par_iter()
        .enumerate()
        .map(|(i, eg)| build_local_element(eg, i))
        .collect();
    Ok(FrameField { kind: FrameKind::Local, elements: elements? })
}

fn aligned_triads(
    positions: &[V3],
    local: &[Vec<V3>; 3],
    rule: NormalRule,
    kind: &SurfaceKind,
    element: usize,
) -> Result<[Vec<V3>; 3]> {
    let n = positions.len();
    let mut e1 = Vec::with_capacity(n);
    let mut e2 = Vec::with_capacity(n);
    let mut e3 = Vec::with_capacity(n);
    for k in 0..n {
        let normal = match rule {
            NormalRule::RadialSphere => positions[k] / positions[k].norm(),
            NormalRule::AnalyticEllipsoid => kind.unit_normal(&positions[k]),
        };
        let seed = local[0][k];
        let raw1 = seed - seed.dot(&normal) * normal;
        let n1 = raw1.norm();
        if n1 < 1e-8 {
            return Err(Error::ProjectionDegenerate { element });
        }
        let d1 = raw1 / n1;
        e1.push(d1);
        e2.push(normal.cross(&d1));
        e3.push(normal);
    }
    Ok([e1, e2, e3])
}

/// Geometry-aligned frames: e3 follows the prescribed surface normal exactly;
/// e1 is the projection of the LOCAL e1, e2 = e3 x e1.
pub fn build_locsph_frames(
    mesh: &SurfaceMesh,
    geom: &MeshGeometry,
    elem: &ReferenceElement,
    rule: NormalRule,
) -> Result<FrameField> {
    if rule == NormalRule::AnalyticEllipsoid {
        if let SurfaceKind::Sphere { .. } = mesh.kind {
            return Err(Error::NormalRuleMismatch {
                rule: "analytic_ellipsoid".into(),
                surface: "sphere".into(),
            });
        }
    }
    let local = build_local_frames(geom, elem)?;
    let elements: Result<Vec<ElementFrames>> = geom
        .elements
        .par_iter()
        .zip(local.elements.par_iter())
        .enumerate()
        .map(|(i, (eg, lf))| {
            let node = aligned_triads(&eg.node_pos, &lf.node, rule, &mesh.kind, i)?;
            let quad = aligned_triads(&eg.quad_pos, &lf.quad, rule, &mesh.kind, i)?;
            let mut edge: Vec<[Vec<V3>; 3]> = Vec::with_capacity(3);
            for (le, egde) in eg.edges.iter().enumerate() {
                edge.push(aligned_triads(&egde.pos, &lf.edge[le], rule, &mesh.kind, i)?);
            }
            Ok(ElementFrames {
                node,
                quad,
                edge: edge.try_into().expect("three edges"),
                div_quad: Default::default(),
                curl_quad: Default::default(),
            })
        })
        .collect();
    Ok(FrameField { kind: FrameKind::Locsph, elements: elements? })
}

/// Fill in the pointwise divergence and curl of each frame vector at the
/// volume quadrature points. Each Cartesian component is treated as a nodal
/// polynomial and differentiated tangentially through the element map.
pub fn frame_differentials(
    frames: &mut FrameField,
    geom: &MeshGeometry,
    elem: &ReferenceElement,
) -> Result<()> {
    frames
        .elements
        .par_iter_mut()
        .zip(geom.elements.par_iter())
        .for_each(|(ef, eg)| {
            let nq = eg.quad_pos.len();
            for i in 0..3 {
                let grads = ops::vector_gradients_at_quad(elem, eg, &ef.node[i]);
                let mut div = vec![0.0; nq];
                let mut curl = vec![V3::zeros(); nq];
                for q in 0..nq {
                    let g = &grads[q];
                    div[q] = g[0].x + g[1].y + g[2].z;
                    curl[q] = V3::new(
                        g[2].y - g[1].z,
                        g[0].z - g[2].x,
                        g[1].x - g[0].y,
                    );
                }
                ef.div_quad[i] = div;
                ef.curl_quad[i] = curl;
            }
        });
    Ok(())
}

/// Pointwise misalignment angle between the e3 axes of two frame fields, at
/// the solution nodes. Zero when the frames agree.
pub fn frame_angle_error(local: &FrameField, aligned: &FrameField) -> Vec<Vec<f64>> {
    local
        .elements
        .iter()
        .zip(&aligned.elements)
        .map(|(a, b)| {
            a.node[2]
                .iter()
                .zip(&b.node[2])
                .map(|(x, y)| x.dot(y).clamp(-1.0, 1.0).acos())
                .collect()
        })
        .collect()
}

/// Largest orthonormality / handedness residual over every stored triad.
pub fn max_orthonormality_residual(frames: &FrameField) -> f64 {
    let mut worst: f64 = 0.0;
    for ef in &frames.elements {
        let mut sets: Vec<&[Vec<V3>; 3]> = vec![&ef.node, &ef.quad];
        for e in &ef.edge {
            sets.push(e);
        }
        for set in sets {
            for k in 0..set[0].len() {
                let (e1, e2, e3) = (&set[0][k], &set[1][k], &set[2][k]);
                for (a, b, expect) in [
                    (e1, e1, 1.0),
                    (e2, e2, 1.0),
                    (e3, e3, 1.0),
                    (e1, e2, 0.0),
                    (e1, e3, 0.0),
                    (e2, e3, 0.0),
                ] {
                    worst = worst.max((a.dot(b) - expect).abs());
                }
                worst = worst.max((e1.cross(e2) - e3).norm());
            }
        }
    }
    worst
}
