//! Analytic velocity fields on the sphere used by the static experiments,
//! plus spherical-coordinate helpers.

use crate::mesh::V3;

/// Rossby-Haurwitz parameters shared by the static divergence and curl tests.
pub const RH_OMEGA: f64 = 7.848e-6;
pub const RH_K: f64 = 7.848e-6;

/// Colatitude/longitude unit vectors at the angular position of `x`.
pub fn spherical_basis(x: &V3) -> (V3, V3) {
    let r = x.norm();
    let rho = (x.x * x.x + x.y * x.y).sqrt();
    let (sin_t, cos_t) = (rho / r, x.z / r);
    let (sin_p, cos_p) = if rho > 0.0 { (x.y / rho, x.x / rho) } else { (0.0, 1.0) };
    let theta_hat = V3::new(cos_t * cos_p, cos_t * sin_p, -sin_t);
    let phi_hat = V3::new(-sin_p, cos_p, 0.0);
    (theta_hat, phi_hat)
}

/// Colatitude theta and longitude phi of a point.
pub fn angles(x: &V3) -> (f64, f64) {
    let r = x.norm();
    ((x.z / r).clamp(-1.0, 1.0).acos(), x.y.atan2(x.x))
}

fn from_components(x: &V3, v_theta: f64, v_phi: f64) -> V3 {
    let (th, ph) = spherical_basis(x);
    v_theta * th + v_phi * ph
}

/// First static divergence test: v_theta = 1/sin(theta), v_phi = 1.
pub fn div_test1(x: &V3) -> V3 {
    let (theta, _) = angles(x);
    from_components(x, 1.0 / theta.sin(), 1.0)
}

/// Second static divergence test: the Rossby-Haurwitz flow.
pub fn div_test2(x: &V3) -> V3 {
    let (theta, phi) = angles(x);
    let (st, ct) = (theta.sin(), theta.cos());
    let v_phi = RH_OMEGA * st + RH_K * st.powi(3) * (4.0 * ct * ct - st * st) * (4.0 * phi).cos();
    let v_theta = -4.0 * RH_K * st.powi(3) * ct * (4.0 * phi).sin();
    from_components(x, v_theta, v_phi)
}

/// First static curl test: v_theta = 1, v_phi = 1/sin(theta).
pub fn curl_test1(x: &V3) -> V3 {
    let (theta, _) = angles(x);
    from_components(x, 1.0, 1.0 / theta.sin())
}

/// Second static curl test: Rossby-Haurwitz with the theta and phi roles
/// exchanged.
pub fn curl_test2(x: &V3) -> V3 {
    let (theta, phi) = angles(x);
    let (st, ct) = (theta.sin(), theta.cos());
    let v_theta = RH_OMEGA * st + RH_K * st.powi(3) * (4.0 * ct * ct - st * st) * (4.0 * phi).cos();
    let v_phi = 4.0 * RH_K * st.powi(3) * ct * (4.0 * phi).sin();
    from_components(x, v_theta, v_phi)
}

/// Named static test fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaticField {
    DivTest1,
    DivTest2,
    CurlTest1,
    CurlTest2,
}

impl StaticField {
    pub fn eval(&self, x: &V3) -> V3 {
        match self {
            StaticField::DivTest1 => div_test1(x),
            StaticField::DivTest2 => div_test2(x),
            StaticField::CurlTest1 => curl_test1(x),
            StaticField::CurlTest2 => curl_test2(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_basis_is_orthonormal_and_tangent() {
        let x = V3::new(0.3, -0.5, 0.8).normalize();
        let (th, ph) = spherical_basis(&x);
        assert!((th.norm() - 1.0).abs() < 1e-14);
        assert!((ph.norm() - 1.0).abs() < 1e-14);
        assert!(th.dot(&ph).abs() < 1e-14);
        assert!(th.dot(&x).abs() < 1e-14);
        assert!(ph.dot(&x).abs() < 1e-14);
    }

    #[test]
    fn test_fields_are_tangent_to_the_sphere() {
        let pts = [
            V3::new(0.6, 0.4, 0.7).normalize(),
            V3::new(-0.2, 0.9, -0.4).normalize(),
            V3::new(0.1, -0.1, 0.99).normalize(),
        ];
        for x in pts {
            for f in [
                StaticField::DivTest1,
                StaticField::DivTest2,
                StaticField::CurlTest1,
                StaticField::CurlTest2,
            ] {
                assert!(f.eval(&x).dot(&x).abs() < 1e-12, "{f:?} at {x:?}");
            }
        }
    }
}
