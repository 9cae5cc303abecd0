//! Jacobi elliptic functions and the complete elliptic integral of the
//! first kind, via arithmetic-geometric mean iteration.
//!
//! Convention: the argument `k` is the elliptic modulus (not the parameter
//! m = k^2), matching the wave formulas that consume these.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative agreement of the arithmetic/geometric pair at which the AGM
/// iteration stops.
const AGM_TOL: f64 = 1e-15;
const AGM_MAX_ITER: usize = 32;

/// Elliptic modulus constrained to the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0 && k < 1.0) {
            return Err(Error::domain(format!(
                "elliptic modulus must lie strictly in (0, 1), got {k}"
            )));
        }
        Ok(EllipticModulus(k))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Complete elliptic integral K(k) for this modulus.
    pub fn complete_k(&self) -> f64 {
        complete_elliptic_k(self.0).expect("modulus invariant guarantees domain")
    }
}

/// Complete elliptic integral of the first kind,
/// K(k) = integral over [0, pi/2] of dtheta / sqrt(1 - k^2 sin^2 theta).
///
/// Computed as pi / (2 AGM(1, k')) with k' = sqrt(1 - k^2). Requires
/// 0 <= k < 1; K diverges at k = 1.
pub fn complete_elliptic_k(k: f64) -> Result<f64> {
    if !(k.is_finite() && (0.0..1.0).contains(&k)) {
        return Err(Error::domain(format!(
            "complete_elliptic_k requires 0 <= k < 1, got {k}"
        )));
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - k * k).sqrt();
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        a = an;
        b = bn;
    }
    Ok(std::f64::consts::PI / (a + b))
}

/// The triple (sn, cn, dn) at a common argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Jacobi elliptic functions sn(u, k), cn(u, k), dn(u, k) by descending
/// Landen transformation (AGM with backward recursion).
///
/// Accepts the degenerate endpoints: k = 0 gives the trigonometric limit
/// (sin, cos, 1), k = 1 the hyperbolic limit (tanh, sech, sech).
pub fn jacobi_elliptic(u: f64, k: f64) -> Result<JacobiTriple> {
    if !u.is_finite() {
        return Err(Error::domain(format!("jacobi_elliptic requires finite u, got {u}")));
    }
    if !(k.is_finite() && (0.0..=1.0).contains(&k)) {
        return Err(Error::domain(format!(
            "jacobi_elliptic requires 0 <= k <= 1, got {k}"
        )));
    }

    let mc = 1.0 - k * k; // complementary parameter
    if mc == 0.0 {
        let cn = 1.0 / u.cosh();
        return Ok(JacobiTriple { sn: u.tanh(), cn, dn: cn });
    }
    if mc == 1.0 {
        return Ok(JacobiTriple { sn: u.sin(), cn: u.cos(), dn: 1.0 });
    }

    // AGM descent: a_i arithmetic means, with the geometric partner stored
    // through em/en for the backward pass.
    let mut em = [0.0_f64; AGM_MAX_ITER];
    let mut en = [0.0_f64; AGM_MAX_ITER];
    let mut a = 1.0_f64;
    let mut emc = mc;
    let mut c = 0.0;
    let mut depth = 0;
    for i in 0..AGM_MAX_ITER {
        depth = i;
        em[i] = a;
        emc = emc.sqrt();
        en[i] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= AGM_TOL * a {
            break;
        }
        emc *= a;
        a = c;
    }

    let scaled = c * u;
    let mut sn = scaled.sin();
    let mut cn = scaled.cos();
    let mut dn = 1.0;
    if sn != 0.0 {
        let mut aa = cn / sn;
        let mut cc = c * aa;
        for i in (0..=depth).rev() {
            let b = em[i];
            aa *= cc;
            cc *= dn;
            dn = (en[i] + aa) / (b + aa);
            aa = cc / b;
        }
        let norm = 1.0 / (cc * cc + 1.0).sqrt();
        sn = if sn >= 0.0 { norm } else { -norm };
        cn = cc * sn;
    }
    Ok(JacobiTriple { sn, cn, dn })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn k_at_zero_is_half_pi() {
        assert_abs_diff_eq!(
            complete_elliptic_k(0.0).unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn k_rejects_out_of_domain() {
        assert!(complete_elliptic_k(1.0).is_err());
        assert!(complete_elliptic_k(-0.1).is_err());
        assert!(complete_elliptic_k(f64::NAN).is_err());
    }

    #[test]
    fn k_is_strictly_increasing() {
        let k1 = complete_elliptic_k(0.2).unwrap();
        let k2 = complete_elliptic_k(0.5).unwrap();
        let k3 = complete_elliptic_k(0.8).unwrap();
        assert!(k3 > k2 && k2 > k1);
    }

    #[test]
    fn jacobi_origin_values() {
        for &k in &[0.0, 0.3, 0.7, 0.99, 1.0] {
            let t = jacobi_elliptic(0.0, k).unwrap();
            assert_eq!(t.sn, 0.0);
            assert_abs_diff_eq!(t.cn, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(t.dn, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn jacobi_trigonometric_limit() {
        for &u in &[-2.0, 0.7, 3.9] {
            let t = jacobi_elliptic(u, 0.0).unwrap();
            assert_abs_diff_eq!(t.sn, u.sin(), epsilon = 1e-14);
            assert_abs_diff_eq!(t.cn, u.cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(t.dn, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn jacobi_hyperbolic_limit() {
        for &u in &[-1.5, 0.4, 2.2] {
            let t = jacobi_elliptic(u, 1.0).unwrap();
            assert_abs_diff_eq!(t.sn, u.tanh(), epsilon = 1e-14);
            assert_abs_diff_eq!(t.cn, 1.0 / u.cosh(), epsilon = 1e-14);
            assert_abs_diff_eq!(t.dn, 1.0 / u.cosh(), epsilon = 1e-14);
        }
    }

    #[test]
    fn jacobi_rejects_non_finite() {
        assert!(jacobi_elliptic(f64::INFINITY, 0.5).is_err());
        assert!(jacobi_elliptic(f64::NAN, 0.5).is_err());
        assert!(jacobi_elliptic(1.0, 1.5).is_err());
    }

    #[test]
    fn sn_at_quarter_period_is_one() {
        for &k in &[0.2, 0.5, 0.9, 0.99] {
            let kk = complete_elliptic_k(k).unwrap();
            let t = jacobi_elliptic(kk, k).unwrap();
            assert_abs_diff_eq!(t.sn, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn periodicity_in_four_k() {
        for &k in &[0.2, 0.5, 0.9] {
            let kk = complete_elliptic_k(k).unwrap();
            for i in 0..30 {
                let u = i as f64 * 4.0 * kk / 30.0;
                let a = jacobi_elliptic(u, k).unwrap();
                let b = jacobi_elliptic(u + 4.0 * kk, k).unwrap();
                assert_abs_diff_eq!(a.sn, b.sn, epsilon = 1e-10);
                assert_abs_diff_eq!(a.cn, b.cn, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn modulus_rejects_endpoints() {
        assert!(EllipticModulus::new(0.0).is_err());
        assert!(EllipticModulus::new(1.0).is_err());
        assert!(EllipticModulus::new(0.5).is_ok());
    }
}
