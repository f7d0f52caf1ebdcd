//! Generalized Jacobi functions `s, c, d1, d2`.
//!
//! `s(u)` inverts the pseudo-hyperelliptic integral
//!
//! ```text
//! u(y) = ∫₀^y dt / sqrt((1 - t²)(1 - k1² t²)(1 - k2² t²))
//! ```
//!
//! and the companions satisfy `c² = 1 - s²`, `d_i² = 1 - k_i² s²`. The
//! substitution `t = sqrt(τ)` reduces the integral to an elliptic one, which
//! gives closed forms in `sn, cn, dn` of argument `k2' u` and modulus
//! `κ = sqrt((k1² - k2²) / (1 - k2²))`:
//!
//! ```text
//! s  = sn / r,   c = k2' cn / r,   d1 = k2' dn / r,   d2 = k2' / r,
//! r  = sqrt(k2'² + k2² sn²)
//! ```
//!
//! which is the quotient representation with the common denominator pulled
//! out (no cancellation when `k1 ≈ k2`). Evaluation is restricted to the real
//! axis: the four branch points all sit off it, so the functions are
//! real-analytic there and `c` takes the sign of `cn`.
//!
//! Along the real axis `s, c` repeat after `4K(κ)/k2'` and `d1, d2` after
//! `2K(κ)/k2'`. Imaginary quasi-periods and the sign picked up when a
//! continuation path crosses a cut are not modelled; in particular the
//! printed pairing of `d1` and `d2` under the imaginary shifts is ambiguous
//! and is not relied on anywhere.

use num_complex::Complex64;

use crate::elliptic::{complete_k, inverse_cn, jacobi_scd, EllipticModulus};
use crate::error::{domain, Result};
use crate::ode::{dopri5, rk4, Tolerance};
use crate::quadrature::integrate;

/// The two moduli `0 <= k2 <= k1 <= 1` (with `k2 < 1`) and the derived `κ`, `k2'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusPair {
    k1: f64,
    k2: f64,
    kappa: f64,
    k2p: f64,
}

impl ModulusPair {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1.is_finite() && k2.is_finite()) {
            return Err(domain("moduli must be finite"));
        }
        if !(0.0 <= k2 && k2 <= k1 && k1 <= 1.0) {
            return Err(domain(format!("moduli must satisfy 0 <= k2 <= k1 <= 1, got k1 = {k1}, k2 = {k2}")));
        }
        if k2 == 1.0 {
            return Err(domain("k2 = 1 collapses the pair (k2' = 0)"));
        }
        let k2p2 = (1.0 - k2) * (1.0 + k2);
        let kappa = ((k1 - k2) * (k1 + k2) / k2p2).sqrt().min(1.0);
        Ok(Self { k1, k2, kappa, k2p: k2p2.sqrt() })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn k1_sq(&self) -> f64 {
        self.k1 * self.k1
    }

    pub fn k2_sq(&self) -> f64 {
        self.k2 * self.k2
    }

    /// `κ` with `κ² (1 - k2²) = k1² - k2²`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `k2' = sqrt(1 - k2²)`.
    pub fn k2_prime(&self) -> f64 {
        self.k2p
    }

    /// `κ' = sqrt(1 - κ²) = k1' / k2'`.
    pub fn kappa_prime(&self) -> f64 {
        ((1.0 - self.k1) * (1.0 + self.k1)).sqrt() / self.k2p
    }

    fn kappa_modulus(&self) -> EllipticModulus {
        EllipticModulus::new(self.kappa).expect("κ lies in [0, 1] by construction")
    }

    /// `K(κ)`; needs `k1 < 1`.
    pub fn quarter_period_k(&self) -> Result<f64> {
        if self.k1 >= 1.0 {
            return Err(domain("real periods are infinite at k1 = 1"));
        }
        complete_k(self.kappa_modulus())
    }

    /// Real period of `s` and `c`: `4K(κ)/k2'`.
    pub fn period_sc(&self) -> Result<f64> {
        Ok(4.0 * self.quarter_period_k()? / self.k2p)
    }

    /// Real period of `d1`, `d2` and of the potential: `2K(κ)/k2'`.
    pub fn period_d(&self) -> Result<f64> {
        Ok(2.0 * self.quarter_period_k()? / self.k2p)
    }
}

/// Values of `s, c, d1, d2` at one real argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenJacobiPoint {
    pub s: f64,
    pub c: f64,
    pub d1: f64,
    pub d2: f64,
}

impl GenJacobiPoint {
    /// Largest violation of the six quadratic identities tying the functions together.
    pub fn identity_defect(&self, m: &ModulusPair) -> f64 {
        let (s2, c2, d12, d22) = (self.s * self.s, self.c * self.c, self.d1 * self.d1, self.d2 * self.d2);
        let (q1, q2) = (m.k1_sq(), m.k2_sq());
        [
            s2 + c2 - 1.0,
            d12 + q1 * s2 - 1.0,
            d22 + q2 * s2 - 1.0,
            d12 - q1 * c2 - (1.0 - q1),
            d22 - q2 * c2 - (1.0 - q2),
            q1 * d22 - q2 * d12 - (q1 - q2),
        ]
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// First derivatives `(s', c', d1', d2')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstDerivatives {
    pub s: f64,
    pub c: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Second derivatives of `s, c, d1` as quintic polynomials in the function itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDerivatives {
    pub s: f64,
    pub c: f64,
    pub d1: f64,
}

/// Evaluates `s, c, d1, d2` at real `u`.
pub fn eval_all(u: f64, m: &ModulusPair) -> Result<GenJacobiPoint> {
    let t = jacobi_scd(m.k2p * u, m.kappa_modulus())?;
    let r = (m.k2p * m.k2p + m.k2_sq() * t.sn * t.sn).sqrt();
    Ok(GenJacobiPoint {
        s: t.sn / r,
        c: m.k2p * t.cn / r,
        d1: m.k2p * t.dn / r,
        d2: m.k2p / r,
    })
}

/// The closed forms exactly as quotients of Jacobi functions, kept for
/// cross-checking [`eval_all`]. `d1` and `d2` lose accuracy as `k1 → k2` and
/// are undefined (`0/0`) at `k1 = k2`.
pub fn eval_quotient_form(u: f64, m: &ModulusPair) -> Result<GenJacobiPoint> {
    let t = jacobi_scd(m.k2p * u, m.kappa_modulus())?;
    let (q1, q2) = (m.k1_sq(), m.k2_sq());
    let gap = (q1 - q2).sqrt();
    let dn_den = (q1 - q2 * t.dn * t.dn).sqrt();
    Ok(GenJacobiPoint {
        s: t.sn / (1.0 - q2 + q2 * t.sn * t.sn).sqrt(),
        c: m.k2p * t.cn / (1.0 - q2 * t.cn * t.cn).sqrt(),
        d1: gap * t.dn / dn_den,
        d2: gap / dn_den,
    })
}

pub fn derivatives_at(p: &GenJacobiPoint, m: &ModulusPair) -> FirstDerivatives {
    FirstDerivatives {
        s: p.c * p.d1 * p.d2,
        c: -p.s * p.d1 * p.d2,
        d1: -m.k1_sq() * p.s * p.c * p.d2,
        d2: -m.k2_sq() * p.s * p.c * p.d1,
    }
}

pub fn eval_derivatives(u: f64, m: &ModulusPair) -> Result<FirstDerivatives> {
    Ok(derivatives_at(&eval_all(u, m)?, m))
}

pub fn second_derivatives_at(p: &GenJacobiPoint, m: &ModulusPair) -> SecondDerivatives {
    let (q1, q2) = (m.k1_sq(), m.k2_sq());
    let qq = q1 * q2;
    let quintic = |x: f64, a5: f64, a3: f64, a1: f64| x * (a1 + x * x * (a3 + a5 * x * x));
    let s = quintic(p.s, -3.0 * qq, 2.0 * (q1 + q2 + qq), -(1.0 + q1 + q2));
    let c = quintic(p.c, -3.0 * qq, -2.0 * (q1 + q2 - 3.0 * qq), -1.0 + 2.0 * q1 + 2.0 * q2 - 3.0 * qq);
    // the d1 form carries k2²/k1², which is bounded by one; d1 ≡ 1 when k1 = 0
    let d1 = if q1 == 0.0 {
        0.0
    } else {
        let r = q2 / q1;
        quintic(p.d1, -3.0 * r, -2.0 * (1.0 + q2 - 3.0 * r), 2.0 - q1 + 2.0 * q2 - 3.0 * r)
    };
    SecondDerivatives { s, c, d1 }
}

pub fn eval_second_derivatives(u: f64, m: &ModulusPair) -> Result<SecondDerivatives> {
    Ok(second_derivatives_at(&eval_all(u, m)?, m))
}

/// Branch points of the cuts and the real-axis periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchData {
    pub u1: Complex64,
    pub u2: Complex64,
    pub u3: Complex64,
    pub u4: Complex64,
    pub real_period_s: f64,
    pub real_period_c: f64,
    pub real_period_d: f64,
}

/// Branch points `u1..u4` and real periods; needs `0 < k2 < k1 < 1`.
pub fn branch_data(m: &ModulusPair) -> Result<BranchData> {
    if !(0.0 < m.k2 && m.k2 < m.k1 && m.k1 < 1.0) {
        return Err(domain(format!(
            "branch data needs 0 < k2 < k1 < 1, got k1 = {}, k2 = {}",
            m.k1, m.k2
        )));
    }
    let kappa_p = EllipticModulus::new(m.kappa_prime().min(1.0))?;
    let big_k = m.quarter_period_k()?;
    let big_k_p = complete_k(kappa_p)?;
    let u1 = Complex64::new(0.0, inverse_cn(m.k2, kappa_p)? / m.k2p);
    let u2 = -u1 + Complex64::new(0.0, 2.0 * big_k_p / m.k2p);
    let shift = Complex64::new(2.0 * big_k / m.k2p, 0.0);
    Ok(BranchData {
        u1,
        u2,
        u3: u1 + shift,
        u4: u2 + shift,
        real_period_s: 4.0 * big_k / m.k2p,
        real_period_c: 4.0 * big_k / m.k2p,
        real_period_d: 2.0 * big_k / m.k2p,
    })
}

fn amplitude_rate(t: f64, m: &ModulusPair) -> f64 {
    let s2 = t.sin().powi(2);
    ((1.0 - m.k1_sq() * s2) * (1.0 - m.k2_sq() * s2)).sqrt()
}

/// Generalized amplitude `a(z)`: the solution of
/// `dt/dz = sqrt((1 - k1² sin²t)(1 - k2² sin²t))`, `t(0) = 0`.
/// `sin(a(z)) = s(z)` on the real axis.
pub fn amplitude(z: f64, m: &ModulusPair) -> Result<f64> {
    if !z.is_finite() {
        return Err(domain(format!("argument must be finite, got {z}")));
    }
    if z < 0.0 {
        return Ok(-amplitude(-z, m)?);
    }
    let tol = Tolerance { relative: 1e-13, absolute: 1e-13, ..Tolerance::default() };
    let [t] = dopri5(|_, y: &[f64; 1]| [amplitude_rate(y[0], m)], [0.0], 0.0, z, tol)?;
    Ok(t)
}

/// `u(y)`, the integral whose inverse is `s`; `-1 < y < 1`.
///
/// Evaluated after `t = sin θ`, which removes the endpoint factor
/// `sqrt(1 - t²)` and leaves a smooth integrand.
pub fn invert_hyperelliptic(y: f64, m: &ModulusPair) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(domain(format!("hyperelliptic inversion needs |y| < 1, got {y}")));
    }
    integrate(|theta| 1.0 / amplitude_rate(theta, m), 0.0, y.asin(), 1e-14)
}

/// Integrates the first-order system
/// `s' = c d1 d2, c' = -s d1 d2, d1' = -k1² s c d2, d2' = -k2² s c d1`
/// from `(0, 1, 1, 1)` with classical RK4 of the given step.
///
/// Independent of the closed forms; used as a reference in tests and by the CLI.
pub fn integrate_first_order_system(u: f64, m: &ModulusPair, step: f64) -> GenJacobiPoint {
    let (q1, q2) = (m.k1_sq(), m.k2_sq());
    let steps = (u.abs() / step).ceil().max(1.0) as usize;
    let y = rk4(
        |_, y: &[f64; 4]| {
            let [s, c, d1, d2] = *y;
            [c * d1 * d2, -s * d1 * d2, -q1 * s * c * d2, -q2 * s * c * d1]
        },
        [0.0, 1.0, 1.0, 1.0],
        0.0,
        u,
        steps,
    );
    GenJacobiPoint { s: y[0], c: y[1], d1: y[2], d2: y[3] }
}
