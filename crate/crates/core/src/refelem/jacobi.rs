//! Jacobi polynomials and Gauss-type quadrature rules on [-1, 1].

use nalgebra::DMatrix;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Gamma(n) for positive integer arguments.
fn gamma_int(n: usize) -> f64 {
    factorial(n - 1)
}

/// Evaluate the orthonormal Jacobi polynomial P_n^{(alpha,beta)} at `x`.
///
/// Normalized so that the polynomials are orthonormal with respect to the
/// weight (1-x)^alpha (1+x)^beta. Integer alpha, beta only.
pub fn jacobi_p(x: f64, alpha: usize, beta: usize, n: usize) -> f64 {
    let (a, b) = (alpha as f64, beta as f64);
    let gamma0 = 2f64.powf(a + b + 1.0) / (a + b + 1.0) * gamma_int(alpha + 1)
        * gamma_int(beta + 1)
        / gamma_int(alpha + beta + 1);
    let p0 = 1.0 / gamma0.sqrt();
    if n == 0 {
        return p0;
    }
    let gamma1 = (a + 1.0) * (b + 1.0) / (a + b + 3.0) * gamma0;
    let p1 = ((a + b + 2.0) * x / 2.0 + (a - b) / 2.0) / gamma1.sqrt();
    if n == 1 {
        return p1;
    }
    let mut aold = 2.0 / (2.0 + a + b) * ((a + 1.0) * (b + 1.0) / (a + b + 3.0)).sqrt();
    let (mut pm2, mut pm1) = (p0, p1);
    for i in 1..n {
        let i = i as f64;
        let h1 = 2.0 * i + a + b;
        let anew = 2.0 / (h1 + 2.0)
            * ((i + 1.0) * (i + 1.0 + a + b) * (i + 1.0 + a) * (i + 1.0 + b)
                / ((h1 + 1.0) * (h1 + 3.0)))
                .sqrt();
        let bnew = -(a * a - b * b) / (h1 * (h1 + 2.0));
        let pnew = ((x - bnew) * pm1 - aold * pm2) / anew;
        pm2 = pm1;
        pm1 = pnew;
        aold = anew;
    }
    pm1
}

/// d/dx of the orthonormal Jacobi polynomial.
pub fn grad_jacobi_p(x: f64, alpha: usize, beta: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    (nf * (nf + alpha as f64 + beta as f64 + 1.0)).sqrt()
        * jacobi_p(x, alpha + 1, beta + 1, n - 1)
}

/// Gauss quadrature nodes and weights for the Jacobi weight (1-x)^alpha (1+x)^beta,
/// exact for polynomials of degree <= 2n-1 (n points). Golub-Welsch on the
/// symmetric tridiagonal recurrence matrix.
pub fn jacobi_gauss(alpha: usize, beta: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let (a, b) = (alpha as f64, beta as f64);
    if n == 1 {
        let x = (b - a) / (a + b + 2.0);
        let w = 2f64.powf(a + b + 1.0) * gamma_int(alpha + 1) * gamma_int(beta + 1)
            / gamma_int(alpha + beta + 2);
        return (vec![x], vec![w]);
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let h1 = 2.0 * i as f64 + a + b;
        // diagonal
        m[(i, i)] = if i == 0 && alpha + beta == 0 {
            0.0
        } else {
            -(a * a - b * b) / (h1 * (h1 + 2.0))
        };
        if i + 1 < n {
            let i1 = (i + 1) as f64;
            let off = 2.0 / (h1 + 2.0)
                * (i1 * (i1 + a + b) * (i1 + a) * (i1 + b) / ((h1 + 1.0) * (h1 + 3.0))).sqrt();
            m[(i, i + 1)] = off;
            m[(i + 1, i)] = off;
        }
    }
    let eig = m.symmetric_eigen();
    let mu0 = 2f64.powf(a + b + 1.0) * gamma_int(alpha + 1) * gamma_int(beta + 1)
        / gamma_int(alpha + beta + 2);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let x = eig.eigenvalues[j];
            let v0 = eig.eigenvectors[(0, j)];
            (x, v0 * v0 * mu0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    pairs.into_iter().unzip()
}

/// Gauss-Lobatto points for the Legendre weight: endpoints plus the interior
/// Gauss-Jacobi(1,1) points. n+1 points for polynomial degree n.
pub fn gauss_lobatto(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![-1.0, 1.0];
    }
    let (interior, _) = jacobi_gauss(1, 1, n - 1);
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(-1.0);
    pts.extend(interior);
    pts.push(1.0);
    pts
}
