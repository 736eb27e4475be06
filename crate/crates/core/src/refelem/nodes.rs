//! Warp-and-blend interpolation nodes and the orthonormal modal basis on the
//! standard triangle with vertices (-1,-1), (1,-1), (-1,1).

use super::jacobi::{gauss_lobatto, grad_jacobi_p, jacobi_p};
use nalgebra::DMatrix;

/// Blend-optimized warp parameters indexed by degree (1-based).
const ALPHA_OPT: [f64; 15] = [
    0.0, 0.0, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832, 1.3648, 1.4773, 1.4959, 1.5743,
    1.5770, 1.6223, 1.6258,
];

pub fn node_count(p: usize) -> usize {
    (p + 1) * (p + 2) / 2
}

/// Collapsed coordinates (a, b) from triangle coordinates (r, s).
pub fn rs_to_ab(r: f64, s: f64) -> (f64, f64) {
    let a = if (1.0 - s).abs() > 1e-14 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    (a, s)
}

/// Orthonormal modal basis member (i, j) at collapsed coordinates.
pub fn simplex_p(a: f64, b: f64, i: usize, j: usize) -> f64 {
    let h1 = jacobi_p(a, 0, 0, i);
    let h2 = jacobi_p(b, 2 * i + 1, 0, j);
    2f64.sqrt() * h1 * h2 * (1.0 - b).powi(i as i32)
}

/// (d/dr, d/ds) of the modal basis member (i, j).
pub fn grad_simplex_p(a: f64, b: f64, i: usize, j: usize) -> (f64, f64) {
    let fa = jacobi_p(a, 0, 0, i);
    let dfa = grad_jacobi_p(a, 0, 0, i);
    let gb = jacobi_p(b, 2 * i + 1, 0, j);
    let dgb = grad_jacobi_p(b, 2 * i + 1, 0, j);

    // r-derivative: d/dr = (2/(1-b)) d/da
    let mut dr = dfa * gb;
    if i >= 1 {
        dr *= (0.5 * (1.0 - b)).powi(i as i32 - 1);
    }
    // s-derivative: d/ds = ((1+a)/2)/((1-b)/2) d/da + d/db
    let mut ds = dfa * gb * 0.5 * (1.0 + a);
    if i >= 1 {
        ds *= (0.5 * (1.0 - b)).powi(i as i32 - 1);
    }
    let mut tmp = dgb * (0.5 * (1.0 - b)).powi(i as i32);
    if i >= 1 {
        tmp -= 0.5 * i as f64 * gb * (0.5 * (1.0 - b)).powi(i as i32 - 1);
    }
    ds += fa * tmp;

    (2f64.sqrt() * dr * 2f64.powi(i as i32), 2f64.sqrt() * ds * 2f64.powi(i as i32))
}

/// Generalized Vandermonde matrix of the modal basis at the given points.
pub fn vandermonde(p: usize, pts: &[(f64, f64)]) -> DMatrix<f64> {
    let nn = node_count(p);
    let mut v = DMatrix::zeros(pts.len(), nn);
    for (row, &(r, s)) in pts.iter().enumerate() {
        let (a, b) = rs_to_ab(r, s);
        let mut col = 0;
        for i in 0..=p {
            for j in 0..=(p - i) {
                v[(row, col)] = simplex_p(a, b, i, j);
                col += 1;
            }
        }
    }
    v
}

/// Vandermonde matrices of the basis gradients at the given points.
pub fn grad_vandermonde(p: usize, pts: &[(f64, f64)]) -> (DMatrix<f64>, DMatrix<f64>) {
    let nn = node_count(p);
    let mut vr = DMatrix::zeros(pts.len(), nn);
    let mut vs = DMatrix::zeros(pts.len(), nn);
    for (row, &(r, s)) in pts.iter().enumerate() {
        let (a, b) = rs_to_ab(r, s);
        let mut col = 0;
        for i in 0..=p {
            for j in 0..=(p - i) {
                let (dr, ds) = grad_simplex_p(a, b, i, j);
                vr[(row, col)] = dr;
                vs[(row, col)] = ds;
                col += 1;
            }
        }
    }
    (vr, vs)
}

/// One-dimensional warp factor mapping equispaced nodes toward Gauss-Lobatto.
fn warp_factor(p: usize, rout: &[f64]) -> Vec<f64> {
    let n = p;
    let lgl = gauss_lobatto(n);
    let req: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();

    // 1D Vandermonde on the equispaced nodes
    let mut veq = DMatrix::zeros(n + 1, n + 1);
    for (row, &x) in req.iter().enumerate() {
        for col in 0..=n {
            veq[(row, col)] = jacobi_p(x, 0, 0, col);
        }
    }
    let veq_t_inv = veq
        .transpose()
        .lu()
        .try_inverse()
        .expect("equispaced 1D Vandermonde is invertible");

    let nr = rout.len();
    let mut pmat = DMatrix::zeros(n + 1, nr);
    for i in 0..=n {
        for (j, &x) in rout.iter().enumerate() {
            pmat[(i, j)] = jacobi_p(x, 0, 0, i);
        }
    }
    let lmat = veq_t_inv * pmat; // (n+1) x nr Lagrange values

    let mut warp = vec![0.0; nr];
    for j in 0..nr {
        let mut w = 0.0;
        for i in 0..=n {
            w += lmat[(i, j)] * (lgl[i] - req[i]);
        }
        warp[j] = w;
    }
    // scale: avoid the endpoint singularity of the blend
    for (j, &x) in rout.iter().enumerate() {
        let zerof = if x.abs() < 1.0 - 1e-10 { 1.0 } else { 0.0 };
        let sf = 1.0 - (zerof * x) * (zerof * x);
        warp[j] = warp[j] / sf + warp[j] * (zerof - 1.0);
    }
    warp
}

/// Warp-and-blend nodes on the standard triangle, degree `p`.
pub fn warp_blend_nodes(p: usize) -> Vec<(f64, f64)> {
    let np = node_count(p);
    if p == 0 {
        return vec![(-1.0 / 3.0, -1.0 / 3.0)];
    }
    let alpha = if p < 16 { ALPHA_OPT[p - 1] } else { 5.0 / 3.0 };

    // equidistributed barycentric coordinates
    let mut l1 = Vec::with_capacity(np);
    let mut l3 = Vec::with_capacity(np);
    for n in 0..=p {
        for m in 0..=(p - n) {
            l1.push(n as f64 / p as f64);
            l3.push(m as f64 / p as f64);
        }
    }
    let l2: Vec<f64> = (0..np).map(|k| 1.0 - l1[k] - l3[k]).collect();

    // equilateral-triangle coordinates
    let mut x: Vec<f64> = (0..np).map(|k| -l2[k] + l3[k]).collect();
    let mut y: Vec<f64> = (0..np).map(|k| (-l2[k] - l3[k] + 2.0 * l1[k]) / 3f64.sqrt()).collect();

    let warp_dir = |la: &Vec<f64>, lb: &Vec<f64>, lc: &Vec<f64>| -> Vec<f64> {
        let diff: Vec<f64> = (0..np).map(|k| lc[k] - lb[k]).collect();
        let wf = warp_factor(p, &diff);
        (0..np)
            .map(|k| {
                let blend = 4.0 * lb[k] * lc[k];
                blend * wf[k] * (1.0 + (alpha * la[k]) * (alpha * la[k]))
            })
            .collect()
    };

    let w1 = warp_dir(&l1, &l2, &l3);
    let w2 = warp_dir(&l2, &l3, &l1);
    let w3 = warp_dir(&l3, &l1, &l2);

    for k in 0..np {
        x[k] += w1[k] + (2.0 * std::f64::consts::PI / 3.0).cos() * w2[k]
            + (4.0 * std::f64::consts::PI / 3.0).cos() * w3[k];
        y[k] += (2.0 * std::f64::consts::PI / 3.0).sin() * w2[k]
            + (4.0 * std::f64::consts::PI / 3.0).sin() * w3[k];
    }

    // equilateral -> (r, s)
    (0..np)
        .map(|k| {
            let lam1 = (3f64.sqrt() * y[k] + 1.0) / 3.0;
            let lam2 = (-3.0 * x[k] - 3f64.sqrt() * y[k] + 2.0) / 6.0;
            let lam3 = (3.0 * x[k] - 3f64.sqrt() * y[k] + 2.0) / 6.0;
            (-lam2 + lam3 - lam1, -lam2 - lam3 + lam1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts() {
        assert_eq!(warp_blend_nodes(1).len(), 3);
        assert_eq!(warp_blend_nodes(5).len(), 21);
        assert_eq!(warp_blend_nodes(8).len(), 45);
    }

    #[test]
    fn degree_one_nodes_are_vertices() {
        let n = warp_blend_nodes(1);
        let verts = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)];
        for v in verts {
            assert!(
                n.iter().any(|&(r, s)| (r - v.0).abs() < 1e-12 && (s - v.1).abs() < 1e-12),
                "missing vertex {v:?}"
            );
        }
    }

    #[test]
    fn nodes_inside_reference_triangle() {
        for p in 1..=10 {
            for &(r, s) in &warp_blend_nodes(p) {
                assert!(r >= -1.0 - 1e-10 && s >= -1.0 - 1e-10 && r + s <= 1e-10);
            }
        }
    }

    #[test]
    fn vandermonde_well_conditioned() {
        for p in [4, 8, 10] {
            let nodes = warp_blend_nodes(p);
            let v = vandermonde(p, &nodes);
            let vinv = v.clone().lu().try_inverse().expect("invertible");
            let id = &v * &vinv;
            let nn = node_count(p);
            for i in 0..nn {
                for j in 0..nn {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((id[(i, j)] - expect).abs() < 1e-9, "p={p} ({i},{j})");
                }
            }
        }
    }
}
