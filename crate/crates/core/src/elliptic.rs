//! Complete elliptic integral of the first kind and the Jacobi elliptic
//! functions `sn`, `cn`, `dn` for real argument.
//!
//! `K(k)` comes from the arithmetic-geometric mean, and the functions from
//! the descending Landen (AGM) scale with a trigonometric base case. Both
//! converge quadratically, so a cap of 32 steps is never reached for
//! `0 <= k < 1`; hitting the cap is reported as an error.

use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Error, Result};

const MAX_AGM_STEPS: usize = 32;

/// Elliptic modulus `k` with `0 <= k <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(domain(format!("elliptic modulus must lie in [0, 1], got {k}")));
        }
        Ok(Self(k))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Complementary modulus `k' = sqrt(1 - k^2)`, computed without cancellation.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

/// Arithmetic-geometric mean of two non-negative numbers.
pub fn agm(a: f64, b: f64) -> Result<f64> {
    if a < 0.0 || b < 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!("agm needs finite non-negative inputs, got ({a}, {b})")));
    }
    let (mut a, mut b) = (a, b);
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            return Ok(0.5 * (a + b));
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Err(Error::Convergence(format!("agm did not settle in {MAX_AGM_STEPS} steps")))
}

/// Complete elliptic integral of the first kind, `K(k) = pi / (2 agm(1, k'))`.
pub fn complete_k(k: EllipticModulus) -> Result<f64> {
    if k.value() >= 1.0 {
        return Err(domain("K(k) diverges at k = 1"));
    }
    Ok(FRAC_PI_2 / agm(1.0, k.complement())?)
}

/// The triple `(sn, cn, dn)` at a common argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Jacobi elliptic functions of real argument `u` and modulus `k`.
///
/// At `k = 1` the hyperbolic limit `(tanh u, sech u, sech u)` is returned.
pub fn jacobi_scd(u: f64, k: EllipticModulus) -> Result<JacobiTriple> {
    if !u.is_finite() {
        return Err(domain(format!("argument must be finite, got {u}")));
    }
    let k = k.value();
    if k == 0.0 {
        let (sn, cn) = u.sin_cos();
        return Ok(JacobiTriple { sn, cn, dn: 1.0 });
    }
    if k == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok(JacobiTriple { sn: u.tanh(), cn: sech, dn: sech });
    }

    let kp2 = (1.0 - k) * (1.0 + k);
    // ratios c_n / a_n of the AGM scale
    let mut ratios = [0.0_f64; MAX_AGM_STEPS];
    let mut a = 1.0_f64;
    let mut b = kp2.sqrt();
    let mut steps = 0;
    loop {
        if steps == MAX_AGM_STEPS {
            return Err(Error::Convergence(format!(
                "Landen scale did not settle in {MAX_AGM_STEPS} steps (k = {k})"
            )));
        }
        let c = 0.5 * (a - b);
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
        ratios[steps] = c / a;
        steps += 1;
        if c.abs() <= f64::EPSILON * a {
            break;
        }
    }

    let mut phi = (1u64 << steps) as f64 * a * u;
    for &ratio in ratios[..steps].iter().rev() {
        phi = 0.5 * (phi + (ratio * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (cn * cn + kp2 * sn * sn).sqrt();
    Ok(JacobiTriple { sn, cn, dn })
}

/// Inverse of `cn(., k)` on `[0, K(k)]` by bisection; `value` must lie in `[0, 1]`.
pub fn inverse_cn(value: f64, k: EllipticModulus) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(domain(format!("cn^-1 needs a value in [0, 1], got {value}")));
    }
    let quarter = complete_k(k)?;
    if value == 1.0 {
        return Ok(0.0);
    }
    if value == 0.0 {
        return Ok(quarter);
    }
    // cn decreases monotonically from 1 to 0 on [0, K]
    let (mut lo, mut hi) = (0.0, quarter);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if jacobi_scd(mid, k)?.cn > value {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::rk4;
    use crate::quadrature::integrate;
    use approx::assert_abs_diff_eq;

    fn modulus(k: f64) -> EllipticModulus {
        EllipticModulus::new(k).unwrap()
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        assert_eq!(complete_k(modulus(0.0)).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn k_rejects_unit_and_negative_modulus() {
        assert!(matches!(complete_k(modulus(1.0)), Err(Error::Domain(_))));
        assert!(EllipticModulus::new(-0.1).is_err());
        assert!(EllipticModulus::new(1.5).is_err());
    }

    #[test]
    fn k_matches_quadrature() {
        // K(k) = int_0^{pi/2} dθ / sqrt(1 - k² sin²θ), smooth after t = sin θ
        for &k in &[0.1, 0.5, 0.8, 0.95] {
            let quad = integrate(|t: f64| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-14)
                .unwrap();
            let agm_value = complete_k(modulus(k)).unwrap();
            assert!((agm_value - quad).abs() <= 1e-12 * quad, "k = {k}: {agm_value} vs {quad}");
        }
    }

    #[test]
    fn k_grows_logarithmically_near_one() {
        let k = 1.0 - 1e-12;
        let kp = modulus(k).complement();
        let value = complete_k(modulus(k)).unwrap();
        assert_abs_diff_eq!(value, (4.0 / kp).ln(), epsilon = 1e-6);
    }

    #[test]
    fn initial_values() {
        for &k in &[0.0, 0.3, 0.99, 1.0] {
            let t = jacobi_scd(0.0, modulus(k)).unwrap();
            assert_eq!((t.sn, t.cn, t.dn), (0.0, 1.0, 1.0));
        }
    }

    #[test]
    fn circular_and_hyperbolic_limits() {
        for &u in &[-2.0, 0.3, 1.7, 10.0] {
            let t = jacobi_scd(u, modulus(0.0)).unwrap();
            assert_eq!((t.sn, t.cn, t.dn), (f64::sin(u), f64::cos(u), 1.0));
            let h = jacobi_scd(u, modulus(1.0)).unwrap();
            assert_abs_diff_eq!(h.sn, u.tanh(), epsilon = 1e-15);
            assert_abs_diff_eq!(h.dn, 1.0 / u.cosh(), epsilon = 1e-15);
        }
    }

    #[test]
    fn matches_ode_integration() {
        let k = 0.8;
        let m = k * k;
        let rhs = |_: f64, y: &[f64; 3]| [y[1] * y[2], -y[0] * y[2], -m * y[0] * y[1]];
        let y = rk4(rhs, [0.0, 1.0, 1.0], 0.0, 0.7, 7000);
        let t = jacobi_scd(0.7, modulus(k)).unwrap();
        assert_abs_diff_eq!(t.sn, y[0], epsilon = 1e-10);
        assert_abs_diff_eq!(t.cn, y[1], epsilon = 1e-10);
        assert_abs_diff_eq!(t.dn, y[2], epsilon = 1e-10);
    }

    #[test]
    fn real_period_is_four_k() {
        for &k in &[0.2, 0.7, 0.999] {
            let period = 4.0 * complete_k(modulus(k)).unwrap();
            for &u in &[0.1, 1.3, -2.9] {
                let a = jacobi_scd(u, modulus(k)).unwrap();
                let b = jacobi_scd(u + period, modulus(k)).unwrap();
                assert_abs_diff_eq!(a.sn, b.sn, epsilon = 1e-10);
                assert_abs_diff_eq!(a.cn, b.cn, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn inverse_cn_roundtrip() {
        let k = modulus(0.6);
        for &v in &[0.05, 0.3, 0.9, 0.999] {
            let x = inverse_cn(v, k).unwrap();
            assert_abs_diff_eq!(jacobi_scd(x, k).unwrap().cn, v, epsilon = 1e-14);
        }
        assert_eq!(inverse_cn(0.0, k).unwrap(), complete_k(k).unwrap());
    }
}
