//! Reference-triangle nodal machinery: interpolation nodes, quadrature,
//! differentiation, edge traces and local integration.
//!
//! The standard triangle has vertices (-1,-1), (1,-1), (-1,1). Everything else
//! in the crate works through the operators assembled here.

mod jacobi;
mod nodes;

pub use jacobi::{gauss_lobatto, jacobi_gauss};
pub use nodes::{grad_vandermonde, node_count, vandermonde, warp_blend_nodes};

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Differentiation axis on the reference triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    S1,
    S2,
}

/// Volume quadrature rule on the reference triangle.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

/// Trace operators for one edge of the reference triangle.
#[derive(Debug, Clone)]
pub struct EdgeOps {
    /// Indices of the interpolation nodes lying on this edge, ordered along it.
    pub node_ids: Vec<usize>,
    /// 1D quadrature parameters t in [-1, 1] along the edge.
    pub quad_t: Vec<f64>,
    /// 1D quadrature weights.
    pub quad_w: Vec<f64>,
    /// Reference coordinates of the edge quadrature points.
    pub quad_rs: Vec<(f64, f64)>,
    /// Interpolation matrix: nodal values -> values at edge quadrature points.
    pub interp: DMatrix<f64>,
    /// d(r,s)/dt of the edge parameterization (constant per edge).
    pub dref_dt: (f64, f64),
}

/// Nodal reference element of degree `p` with quadrature exact to `quad_order`.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub order_p: usize,
    pub quad_order: usize,
    pub nodes: Vec<(f64, f64)>,
    pub quad: QuadRule,
    /// Nodal differentiation matrices (nodal values -> nodal derivative values).
    pub dr: DMatrix<f64>,
    pub ds: DMatrix<f64>,
    /// Interpolation from nodal values to volume quadrature points.
    pub interp_q: DMatrix<f64>,
    /// Derivative evaluation at volume quadrature points.
    pub dr_q: DMatrix<f64>,
    pub ds_q: DMatrix<f64>,
    pub edges: [EdgeOps; 3],
    vandermonde_inv: DMatrix<f64>,
}

/// Reference area of the standard triangle.
pub const REFERENCE_AREA: f64 = 2.0;

// Edge parameterizations, t in [-1,1], traversing the boundary
// counterclockwise: (t,-1), (-t,t), (-1,-t).
fn edge_point(edge: usize, t: f64) -> (f64, f64) {
    match edge {
        0 => (t, -1.0),
        1 => (-t, t),
        2 => (-1.0, -t),
        _ => unreachable!(),
    }
}

fn edge_dref_dt(edge: usize) -> (f64, f64) {
    match edge {
        0 => (1.0, 0.0),
        1 => (-1.0, 1.0),
        2 => (0.0, -1.0),
        _ => unreachable!(),
    }
}

fn edge_param_of_node(edge: usize, r: f64, s: f64) -> f64 {
    match edge {
        0 => r,
        1 => s,
        2 => -s,
        _ => unreachable!(),
    }
}

fn node_on_edge(edge: usize, r: f64, s: f64) -> bool {
    let tol = 1e-9;
    match edge {
        0 => (s + 1.0).abs() < tol,
        1 => (r + s).abs() < tol,
        2 => (r + 1.0).abs() < tol,
        _ => unreachable!(),
    }
}

/// Collapsed-coordinate Gauss rule on the triangle, exact for total degree
/// <= 2*n1d - 1 in each factor of the Duffy transform.
fn duffy_quadrature(order: usize) -> QuadRule {
    let n1d = order / 2 + 1;
    let (xi, wi) = jacobi_gauss(0, 0, n1d);
    let (eta, we) = jacobi_gauss(1, 0, n1d);
    let mut points = Vec::with_capacity(n1d * n1d);
    let mut weights = Vec::with_capacity(n1d * n1d);
    for (b, wb) in eta.iter().zip(&we) {
        for (a, wa) in xi.iter().zip(&wi) {
            let r = (1.0 + a) * (1.0 - b) / 2.0 - 1.0;
            points.push((r, *b));
            weights.push(wa * wb / 2.0);
        }
    }
    QuadRule { points, weights }
}

/// Build a reference element.
///
/// `quad_order` must be at least 2p+2; products of discrete fields and curved
/// jacobians otherwise alias into the error floors of the surface operators.
pub fn build_reference_element(p: usize, quad_order: usize) -> Result<ReferenceElement> {
    if p < 1 || p > 10 {
        return Err(Error::UnsupportedDegree(p));
    }
    if quad_order < 2 * p + 2 {
        return Err(Error::QuadratureTooWeak { order: quad_order, p, min: 2 * p + 2 });
    }

    let nodes = warp_blend_nodes(p);
    let nn = nodes.len();
    let v = vandermonde(p, &nodes);
    let v_inv = v
        .clone()
        .lu()
        .try_inverse()
        .expect("nodal Vandermonde is invertible for p <= 10");

    let (vr, vs) = grad_vandermonde(p, &nodes);
    let dr = &vr * &v_inv;
    let ds = &vs * &v_inv;

    let quad = duffy_quadrature(quad_order);
    let interp_q = vandermonde(p, &quad.points) * &v_inv;
    let (vrq, vsq) = grad_vandermonde(p, &quad.points);
    let dr_q = vrq * &v_inv;
    let ds_q = vsq * &v_inv;

    let n_edge_q = quad_order / 2 + 1;
    let (tq, wq) = jacobi_gauss(0, 0, n_edge_q);
    let edges: [EdgeOps; 3] = std::array::from_fn(|e| {
        let mut ids: Vec<usize> = (0..nn)
            .filter(|&k| node_on_edge(e, nodes[k].0, nodes[k].1))
            .collect();
        ids.sort_by(|&a, &b| {
            let ta = edge_param_of_node(e, nodes[a].0, nodes[a].1);
            let tb = edge_param_of_node(e, nodes[b].0, nodes[b].1);
            ta.partial_cmp(&tb).unwrap()
        });
        debug_assert_eq!(ids.len(), p + 1);
        let quad_rs: Vec<(f64, f64)> = tq.iter().map(|&t| edge_point(e, t)).collect();
        let interp = vandermonde(p, &quad_rs) * &v_inv;
        EdgeOps {
            node_ids: ids,
            quad_t: tq.clone(),
            quad_w: wq.clone(),
            quad_rs,
            interp,
            dref_dt: edge_dref_dt(e),
        }
    });

    Ok(ReferenceElement {
        order_p: p,
        quad_order,
        nodes,
        quad,
        dr,
        ds,
        interp_q,
        dr_q,
        ds_q,
        edges,
        vandermonde_inv: v_inv,
    })
}

impl ReferenceElement {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn quad_count(&self) -> usize {
        self.quad.points.len()
    }

    /// Interpolation matrix from nodal values to arbitrary points.
    pub fn interpolation_to(&self, pts: &[(f64, f64)]) -> DMatrix<f64> {
        vandermonde(self.order_p, pts) * &self.vandermonde_inv
    }

    /// Derivative-evaluation matrices at arbitrary points.
    pub fn derivatives_to(&self, pts: &[(f64, f64)]) -> (DMatrix<f64>, DMatrix<f64>) {
        let (vr, vs) = grad_vandermonde(self.order_p, pts);
        (vr * &self.vandermonde_inv, vs * &self.vandermonde_inv)
    }

    /// Differentiate nodal samples along a reference axis; exact for
    /// polynomials of total degree <= p.
    pub fn differentiate(&self, u: &[f64], axis: Axis) -> Result<Vec<f64>> {
        if u.len() != self.node_count() {
            return Err(Error::SizeMismatch { expected: self.node_count(), got: u.len() });
        }
        let m = match axis {
            Axis::S1 => &self.dr,
            Axis::S2 => &self.ds,
        };
        let mut out = vec![0.0; u.len()];
        for i in 0..u.len() {
            let mut acc = 0.0;
            for j in 0..u.len() {
                acc += m[(i, j)] * u[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Integrate nodal samples against a nodal jacobian field over the element.
    pub fn integrate(&self, u: &[f64], jacobian: &[f64]) -> Result<f64> {
        let nn = self.node_count();
        if u.len() != nn {
            return Err(Error::SizeMismatch { expected: nn, got: u.len() });
        }
        if jacobian.len() != nn {
            return Err(Error::SizeMismatch { expected: nn, got: jacobian.len() });
        }
        let mut total = 0.0;
        for (q, w) in self.quad.weights.iter().enumerate() {
            let mut uq = 0.0;
            let mut jq = 0.0;
            for j in 0..nn {
                uq += self.interp_q[(q, j)] * u[j];
                jq += self.interp_q[(q, j)] * jacobian[j];
            }
            if jq <= 0.0 {
                return Err(Error::InvertedElement { index: q, value: jq });
            }
            total += w * uq * jq;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exact integral of r^a s^b over the standard triangle.
    ///
    /// Independent oracle: substitute u=(r+1)/2, v=(s+1)/2 onto the unit
    /// simplex and expand binomially; simplex moments are i!j!/(i+j+2)!.
    fn monomial_integral(a: usize, b: usize) -> f64 {
        fn binom(n: usize, k: usize) -> f64 {
            let mut acc = 1.0;
            for t in 0..k {
                acc = acc * (n - t) as f64 / (t + 1) as f64;
            }
            acc
        }
        fn simplex_moment(i: usize, j: usize) -> f64 {
            // i! j! / (i+j+2)! computed as a product of factors <= 1
            let mut acc = 1.0;
            for k in 1..=j {
                acc *= k as f64 / (i + k) as f64;
            }
            acc / ((i + j + 1) as f64 * (i + j + 2) as f64)
        }
        let mut total = 0.0;
        for i in 0..=a {
            for j in 0..=b {
                let sign = if (a - i + b - j) % 2 == 0 { 1.0 } else { -1.0 };
                total += binom(a, i)
                    * binom(b, j)
                    * 2f64.powi((i + j) as i32)
                    * sign
                    * simplex_moment(i, j);
            }
        }
        4.0 * total
    }

    fn eval_poly(coeffs: &[(usize, usize, f64)], r: f64, s: f64) -> f64 {
        coeffs.iter().map(|&(a, b, c)| c * r.powi(a as i32) * s.powi(b as i32)).sum()
    }

    #[test]
    fn node_counts_match_degree() {
        assert_eq!(build_reference_element(1, 4).unwrap().node_count(), 3);
        assert_eq!(build_reference_element(5, 12).unwrap().node_count(), 21);
    }

    #[test]
    fn rejects_out_of_range_degree() {
        assert!(matches!(build_reference_element(0, 4), Err(Error::UnsupportedDegree(0))));
        assert!(matches!(build_reference_element(11, 40), Err(Error::UnsupportedDegree(11))));
        assert!(matches!(
            build_reference_element(4, 8),
            Err(Error::QuadratureTooWeak { .. })
        ));
    }

    #[test]
    fn quadrature_of_constant_is_reference_area() {
        for p in [1, 3, 6, 9] {
            let e = build_reference_element(p, 2 * p + 2).unwrap();
            let total: f64 = e.quad.weights.iter().sum();
            assert!((total - REFERENCE_AREA).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn quadrature_matches_monomial_oracle() {
        // covers the s1*s2 example and the full declared order
        let e = build_reference_element(4, 10).unwrap();
        for a in 0..=10usize {
            for b in 0..=(10 - a) {
                let num: f64 = e
                    .quad
                    .points
                    .iter()
                    .zip(&e.quad.weights)
                    .map(|(&(r, s), w)| w * r.powi(a as i32) * s.powi(b as i32))
                    .sum();
                let exact = monomial_integral(a, b);
                assert!(
                    (num - exact).abs() < 1e-12,
                    "monomial r^{a} s^{b}: {num} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn differentiate_constant_and_linear() {
        let e = build_reference_element(3, 8).unwrap();
        let ones = vec![1.0; e.node_count()];
        for d in e.differentiate(&ones, Axis::S1).unwrap() {
            assert!(d.abs() < 1e-12);
        }
        let r_vals: Vec<f64> = e.nodes.iter().map(|&(r, _)| r).collect();
        for d in e.differentiate(&r_vals, Axis::S1).unwrap() {
            assert!((d - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn differentiate_analytic_oracle() {
        // d/ds2 of s1^2 s2 = s1^2 at p >= 3
        let e = build_reference_element(3, 8).unwrap();
        let u: Vec<f64> = e.nodes.iter().map(|&(r, s)| r * r * s).collect();
        let d = e.differentiate(&u, Axis::S2).unwrap();
        for (k, &(r, _)) in e.nodes.iter().enumerate() {
            assert!((d[k] - r * r).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_exactness_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for p in [2, 5, 8] {
            let e = build_reference_element(p, 2 * p + 2).unwrap();
            for _ in 0..20 {
                let coeffs: Vec<(usize, usize, f64)> = (0..=p)
                    .flat_map(|a| (0..=(p - a)).map(move |b| (a, b)))
                    .map(|(a, b)| (a, b, rng.gen_range(-1.0..1.0)))
                    .collect();
                let u: Vec<f64> = e.nodes.iter().map(|&(r, s)| eval_poly(&coeffs, r, s)).collect();
                let scale: f64 = coeffs.iter().map(|c| c.2.abs()).sum();
                let dr = e.differentiate(&u, Axis::S1).unwrap();
                let ds = e.differentiate(&u, Axis::S2).unwrap();
                for (k, &(r, s)) in e.nodes.iter().enumerate() {
                    let exact_r: f64 = coeffs
                        .iter()
                        .filter(|&&(a, _, _)| a > 0)
                        .map(|&(a, b, c)| c * a as f64 * r.powi(a as i32 - 1) * s.powi(b as i32))
                        .sum();
                    let exact_s: f64 = coeffs
                        .iter()
                        .filter(|&&(_, b, _)| b > 0)
                        .map(|&(a, b, c)| c * b as f64 * r.powi(a as i32) * s.powi(b as i32 - 1))
                        .sum();
                    assert!((dr[k] - exact_r).abs() / scale < 1e-11, "p={p}");
                    assert!((ds[k] - exact_s).abs() / scale < 1e-11, "p={p}");
                }
            }
        }
    }

    #[test]
    fn differentiate_rejects_size_mismatch() {
        let e = build_reference_element(2, 6).unwrap();
        assert!(matches!(
            e.differentiate(&[1.0, 2.0], Axis::S1),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn integrate_constant_unit_jacobian() {
        let e = build_reference_element(4, 10).unwrap();
        let ones = vec![1.0; e.node_count()];
        let area = e.integrate(&ones, &ones).unwrap();
        assert!((area - REFERENCE_AREA).abs() < 1e-13);
    }

    #[test]
    fn integrate_degree_2p_polynomial_exact() {
        let p = 3;
        let e = build_reference_element(p, 2 * p + 2).unwrap();
        // u of degree p and J of degree p: the product has degree 2p <= 2p+2
        let u: Vec<f64> = e.nodes.iter().map(|&(r, s)| r * r * s + 0.5 * r).collect();
        let j: Vec<f64> = e.nodes.iter().map(|&(r, s)| 2.0 + r * s * s).collect();
        let num = e.integrate(&u, &j).unwrap();
        // oracle: expand the product into monomials
        let mut exact = 0.0;
        for (a1, b1, c1) in [(2usize, 1usize, 1.0), (1, 0, 0.5)] {
            for (a2, b2, c2) in [(0usize, 0usize, 2.0), (1, 2, 1.0)] {
                exact += c1 * c2 * monomial_integral(a1 + a2, b1 + b2);
            }
        }
        assert!((num - exact).abs() < 1e-12, "{num} vs {exact}");
    }

    #[test]
    fn integrate_rejects_nonpositive_jacobian() {
        let e = build_reference_element(2, 6).unwrap();
        let u = vec![1.0; e.node_count()];
        let mut j = vec![1.0; e.node_count()];
        j[0] = -5.0;
        assert!(matches!(e.integrate(&u, &j), Err(Error::InvertedElement { .. })));
    }

    #[test]
    fn edge_nodes_and_trace_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2, 5, 8] {
            let e = build_reference_element(p, 2 * p + 2).unwrap();
            let coeffs: Vec<(usize, usize, f64)> = (0..=p)
                .flat_map(|a| (0..=(p - a)).map(move |b| (a, b)))
                .map(|(a, b)| (a, b, rng.gen_range(-1.0..1.0)))
                .collect();
            let u: Vec<f64> = e.nodes.iter().map(|&(r, s)| eval_poly(&coeffs, r, s)).collect();
            for (k, edge) in e.edges.iter().enumerate() {
                assert_eq!(edge.node_ids.len(), p + 1, "edge {k} node count");
                // trace at edge quadrature points vs analytic restriction
                for (qi, &t) in edge.quad_t.iter().enumerate() {
                    let (r, s) = edge.quad_rs[qi];
                    let exact = eval_poly(&coeffs, r, s);
                    let mut traced = 0.0;
                    for j in 0..e.node_count() {
                        traced += edge.interp[(qi, j)] * u[j];
                    }
                    assert!((traced - exact).abs() < 1e-12, "p={p} edge={k} t={t}");
                }
            }
        }
    }
}
