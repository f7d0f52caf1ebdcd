//! The generalized Lamé operator and its fifteen exact eigenpairs.
//!
//! Jacobian form, on the real axis:
//!
//! ```text
//! f'' + V(z) f = -E f,
//! V(z) = (α k1² k2² + β k2²) s⁴ - (γ k1² + δ k2² + λ k1² k2²) s²
//! ```
//!
//! Under `x = s²(z)` this becomes a Fuchsian equation with singular points
//! `0, 1, k1⁻², k2⁻², ∞`; see [`algebraic_residual`].
//!
//! The catalog lists every eigenfunction that is a product of distinct
//! factors from `{s, c, d1, d2}`. Two rows, `(3,0,2,2,2)` with `f = s` and
//! `(15,0,6,6,6)` with `f = c d1 d2`, share `E = 1 + k1² + k2²`; they belong
//! to different potentials, so nothing is degenerate.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gen_jacobi::{derivatives_at, eval_all, second_derivatives_at, GenJacobiPoint, ModulusPair};

/// Potential parameters `(α, β, γ, δ, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamVector {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
}

impl ParamVector {
    pub const fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, lambda: f64) -> Self {
        Self { alpha, beta, gamma, delta, lambda }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.alpha, self.beta, self.gamma, self.delta, self.lambda]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Coefficient of `s⁴` in the potential.
    pub fn quartic(&self, m: &ModulusPair) -> f64 {
        (self.alpha * m.k1_sq() + self.beta) * m.k2_sq()
    }

    /// Coefficient of `-s²` in the potential.
    pub fn quadratic(&self, m: &ModulusPair) -> f64 {
        self.gamma * m.k1_sq() + self.delta * m.k2_sq() + self.lambda * m.k1_sq() * m.k2_sq()
    }
}

impl fmt::Display for ParamVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{},{})", self.alpha, self.beta, self.gamma, self.delta, self.lambda)
    }
}

impl FromStr for ParamVector {
    type Err = Error;

    /// Parses five comma-separated numbers, optionally in parentheses.
    fn from_str(text: &str) -> Result<Self> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let values = inner
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad parameter list {text:?}: {e}")))?;
        match values[..] {
            [a, b, g, d, l] => {
                let p = Self::new(a, b, g, d, l);
                if p.is_finite() {
                    Ok(p)
                } else {
                    Err(Error::InvalidArgument(format!("parameters must be finite, got {text:?}")))
                }
            }
            _ => Err(Error::InvalidArgument(format!("expected five parameters, got {}", values.len()))),
        }
    }
}

/// `E = e0 + e1 k1² + e2 k2² + e12 k1² k2²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyCoeffs {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    #[serde(default)]
    pub e12: f64,
}

impl EnergyCoeffs {
    pub const fn new(e0: f64, e1: f64, e2: f64) -> Self {
        Self { e0, e1, e2, e12: 0.0 }
    }

    pub fn energy(&self, m: &ModulusPair) -> f64 {
        self.e0 + self.e1 * m.k1_sq() + self.e2 * m.k2_sq() + self.e12 * m.k1_sq() * m.k2_sq()
    }
}

impl fmt::Display for EnergyCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}k1² + {}k2²", self.e0, self.e1, self.e2)?;
        if self.e12 != 0.0 {
            write!(f, " + {}k1²k2²", self.e12)?;
        }
        Ok(())
    }
}

/// A subset of `{s, c, d1, d2}`; the eigenfunction is the product of its members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FactorMask(u8);

impl FactorMask {
    pub const ONE: FactorMask = FactorMask(0);
    pub const S: FactorMask = FactorMask(1);
    pub const C: FactorMask = FactorMask(2);
    pub const D1: FactorMask = FactorMask(4);
    pub const D2: FactorMask = FactorMask(8);

    const NAMES: [(FactorMask, &'static str); 4] =
        [(Self::S, "s"), (Self::C, "c"), (Self::D1, "d1"), (Self::D2, "d2")];

    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits < 16).then_some(Self(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// All sixteen subsets, in bit order.
    pub fn all() -> impl Iterator<Item = FactorMask> {
        (0..16).map(FactorMask)
    }

    pub fn contains(self, other: FactorMask) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn union(self, other: FactorMask) -> Self {
        Self(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Product of the selected factors.
    pub fn value(self, p: &GenJacobiPoint) -> f64 {
        factor_values(p).iter().filter(|(f, _)| self.contains(*f)).map(|(_, v)| v).product()
    }

    /// Real period of the product: `4K(κ)/k2'` with an odd number of `s, c`
    /// factors, `2K(κ)/k2'` otherwise.
    pub fn period(self, m: &ModulusPair) -> Result<f64> {
        if self.contains(Self::S) ^ self.contains(Self::C) {
            m.period_sc()
        } else {
            m.period_d()
        }
    }
}

impl fmt::Display for FactorMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let names: Vec<&str> = Self::NAMES.iter().filter(|(m, _)| self.contains(*m)).map(|(_, n)| *n).collect();
        write!(f, "{}", names.join("·"))
    }
}

impl FromStr for FactorMask {
    type Err = Error;

    /// Accepts names separated by `·`, `*` or whitespace; `1` is the empty product.
    fn from_str(text: &str) -> Result<Self> {
        let mut mask = Self::ONE;
        for name in text.split(|ch: char| ch == '·' || ch == '*' || ch.is_whitespace()).filter(|t| !t.is_empty()) {
            let factor = match name {
                "1" => Self::ONE,
                _ => Self::NAMES
                    .iter()
                    .find(|(_, n)| *n == name)
                    .map(|(m, _)| *m)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown factor {name:?}")))?,
            };
            mask = mask.union(factor);
        }
        Ok(mask)
    }
}

impl Serialize for FactorMask {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FactorMask {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn factor_values(p: &GenJacobiPoint) -> [(FactorMask, f64); 4] {
    [(FactorMask::S, p.s), (FactorMask::C, p.c), (FactorMask::D1, p.d1), (FactorMask::D2, p.d2)]
}

/// One exact eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub params: ParamVector,
    pub energy: EnergyCoeffs,
    pub factors: FactorMask,
}

impl CatalogEntry {
    pub fn energy_at(&self, m: &ModulusPair) -> f64 {
        self.energy.energy(m)
    }
}

const fn row(p: [f64; 5], e: [f64; 3], bits: u8) -> CatalogEntry {
    CatalogEntry {
        params: ParamVector::new(p[0], p[1], p[2], p[3], p[4]),
        energy: EnergyCoeffs::new(e[0], e[1], e[2]),
        factors: FactorMask(bits),
    }
}

const S: u8 = 1;
const C: u8 = 2;
const D1: u8 = 4;
const D2: u8 = 8;

static CATALOG: [CatalogEntry; 15] = [
    row([3.0, 0.0, 2.0, 2.0, 2.0], [1.0, 1.0, 1.0], S),
    row([3.0, 0.0, 2.0, 2.0, 0.0], [1.0, 0.0, 0.0], C),
    row([3.0, 0.0, 2.0, 0.0, 2.0], [0.0, 1.0, 0.0], D1),
    row([3.0, 0.0, 0.0, 2.0, 2.0], [0.0, 0.0, 1.0], D2),
    row([8.0, 0.0, 6.0, 6.0, 2.0], [4.0, 1.0, 1.0], S | C),
    row([8.0, 0.0, 2.0, 2.0, 6.0], [0.0, 1.0, 1.0], D1 | D2),
    row([8.0, 0.0, 6.0, 2.0, 6.0], [1.0, 4.0, 1.0], S | D1),
    row([8.0, 0.0, 2.0, 6.0, 6.0], [1.0, 1.0, 4.0], S | D2),
    row([8.0, 0.0, 6.0, 2.0, 2.0], [1.0, 1.0, 0.0], C | D1),
    row([8.0, 0.0, 2.0, 6.0, 2.0], [1.0, 0.0, 1.0], C | D2),
    row([15.0, 0.0, 6.0, 6.0, 6.0], [1.0, 1.0, 1.0], C | D1 | D2),
    row([15.0, 0.0, 12.0, 6.0, 6.0], [4.0, 4.0, 1.0], S | C | D1),
    row([15.0, 0.0, 6.0, 12.0, 6.0], [4.0, 1.0, 4.0], S | C | D2),
    row([15.0, 0.0, 6.0, 6.0, 12.0], [1.0, 4.0, 4.0], S | D1 | D2),
    row([24.0, 0.0, 12.0, 12.0, 12.0], [4.0, 4.0, 4.0], S | C | D1 | D2),
];

/// The fifteen eigenpairs whose eigenfunctions are products of `s, c, d1, d2`.
pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

/// `V(z)`.
pub fn potential(z: f64, p: &ParamVector, m: &ModulusPair) -> Result<f64> {
    Ok(potential_at_s(eval_all(z, m)?.s, p, m))
}

/// The potential as a function of `s`.
pub fn potential_at_s(s: f64, p: &ParamVector, m: &ModulusPair) -> f64 {
    let s2 = s * s;
    s2 * (p.quartic(m) * s2 - p.quadratic(m))
}

/// A function whose second derivative can be evaluated on the real axis.
pub trait TrialFunction {
    /// `(f(z), f''(z))`.
    fn value_and_second(&self, z: f64, m: &ModulusPair) -> Result<(f64, f64)>;
}

/// Products of `s, c, d1, d2` are differentiated exactly: product rule over the
/// first-order system and the quintic second-derivative forms.
impl TrialFunction for FactorMask {
    fn value_and_second(&self, z: f64, m: &ModulusPair) -> Result<(f64, f64)> {
        let (value, _, second) = product_derivatives(*self, &eval_all(z, m)?, m);
        Ok((value, second))
    }
}

/// `(f, f', f'')` for a factor product at a given point.
pub fn product_derivatives(mask: FactorMask, p: &GenJacobiPoint, m: &ModulusPair) -> (f64, f64, f64) {
    let d = derivatives_at(p, m);
    let dd = second_derivatives_at(p, m);
    // d2'' = -k2² d2 (c² d1² - s² d1² - k1² s² c²)
    let d2pp = -m.k2_sq() * p.d2 * ((p.c * p.c - p.s * p.s) * p.d1 * p.d1 - m.k1_sq() * p.s * p.s * p.c * p.c);
    let all = [(FactorMask::S, p.s, d.s, dd.s), (FactorMask::C, p.c, d.c, dd.c), (FactorMask::D1, p.d1, d.d1, dd.d1), (FactorMask::D2, p.d2, d.d2, d2pp)];
    let chosen: Vec<(f64, f64, f64)> =
        all.iter().filter(|(f, ..)| mask.contains(*f)).map(|&(_, v, v1, v2)| (v, v1, v2)).collect();
    let others = |skip: &[usize]| -> f64 {
        chosen.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, t)| t.0).product()
    };
    let value = others(&[]);
    let mut first = 0.0;
    let mut second = 0.0;
    for i in 0..chosen.len() {
        first += chosen[i].1 * others(&[i]);
        second += chosen[i].2 * others(&[i]);
        for j in i + 1..chosen.len() {
            second += 2.0 * chosen[i].1 * chosen[j].1 * others(&[i, j]);
        }
    }
    (value, first, second)
}

/// An arbitrary function differentiated by central differences.
pub struct Sampled<F> {
    pub f: F,
    pub step: f64,
}

impl<F: Fn(f64) -> f64> Sampled<F> {
    pub fn new(f: F) -> Self {
        Self { f, step: 1e-4 }
    }
}

impl<F: Fn(f64) -> f64> TrialFunction for Sampled<F> {
    fn value_and_second(&self, z: f64, _: &ModulusPair) -> Result<(f64, f64)> {
        let h = self.step;
        let (lo, mid, hi) = ((self.f)(z - h), (self.f)(z), (self.f)(z + h));
        Ok((mid, (hi - 2.0 * mid + lo) / (h * h)))
    }
}

/// `max |f'' + V f + E f| / max |f|` over the grid.
pub fn schrodinger_residual<T: TrialFunction + ?Sized>(
    f: &T,
    p: &ParamVector,
    energy: f64,
    m: &ModulusPair,
    grid: &[f64],
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &z in grid {
        let (value, second) = f.value_and_second(z, m)?;
        let v = potential(z, p, m)?;
        worst = worst.max((second + (v + energy) * value).abs());
        scale = scale.max(value.abs());
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidArgument("trial function vanishes on the whole grid".into()));
    }
    Ok(worst / scale)
}

/// `count` evenly spaced points covering `[0, period]` inclusive.
pub fn period_grid(period: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| period * i as f64 / (count - 1) as f64).collect(),
    }
}

/// `(A, B) = (α + β k1⁻², γ k2⁻² + δ k1⁻² + λ)`; needs `k1, k2 > 0`.
pub fn shape_constants(p: &ParamVector, m: &ModulusPair) -> Result<(f64, f64)> {
    if m.k2() == 0.0 {
        return Err(domain("A and B need k1, k2 > 0"));
    }
    Ok((p.alpha + p.beta / m.k1_sq(), p.gamma / m.k2_sq() + p.delta / m.k1_sq() + p.lambda))
}

/// Left side of the algebraic form at `x`, given `f(x), f'(x), f''(x)`:
///
/// ```text
/// f'' + ½(1/x + 1/(x-1) + 1/(x-k1⁻²) + 1/(x-k2⁻²)) f'
///     - (E k1⁻² k2⁻² + A x² - B x) / (4x(x-1)(x-k1⁻²)(x-k2⁻²)) f
/// ```
///
/// Evaluated after multiplying the singular factors through by `k1² k2²`, so
/// it stays finite for vanishing moduli:
/// `f'' + (1/(2x) + P'/(2P)) f' + (E + V(x)) / (4xP) f` with
/// `P = (1-x)(1-k1²x)(1-k2²x)` and `V(x)` the potential at `s² = x`.
pub fn algebraic_residual(x: f64, p: &ParamVector, energy: f64, m: &ModulusPair, f: f64, fp: f64, fpp: f64) -> Result<f64> {
    let (q1, q2) = (m.k1_sq(), m.k2_sq());
    let factors = [1.0 - x, 1.0 - q1 * x, 1.0 - q2 * x];
    let singular = x == 0.0 || factors.iter().any(|v| v.abs() <= 1e-14 * x.abs().max(1.0));
    if !x.is_finite() || singular {
        return Err(domain(format!("x = {x} is a singular point")));
    }
    let big_p: f64 = factors.iter().product();
    let log_deriv = -1.0 / factors[0] - q1 / factors[1] - q2 / factors[2];
    let v = x * (p.quartic(m) * x - p.quadratic(m));
    Ok(fpp + (0.5 / x + 0.5 * log_deriv) * fp + (energy + v) / (4.0 * x * big_p) * f)
}

#[derive(Serialize)]
struct CsvRow {
    alpha: String,
    beta: String,
    gamma: String,
    delta: String,
    lambda: String,
    e0: String,
    e1: String,
    e2: String,
    factors: String,
}

/// Writes entries as CSV with columns `alpha,beta,gamma,delta,lambda,e0,e1,e2,factors`.
pub fn write_catalog_csv<W: Write>(entries: &[CatalogEntry], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output failed: {e}"));
    let mut writer = csv::Writer::from_writer(out);
    for e in entries {
        let p = e.params;
        writer
            .serialize(CsvRow {
                alpha: p.alpha.to_string(),
                beta: p.beta.to_string(),
                gamma: p.gamma.to_string(),
                delta: p.delta.to_string(),
                lambda: p.lambda.to_string(),
                e0: e.energy.e0.to_string(),
                e1: e.energy.e1.to_string(),
                e2: e.energy.e2.to_string(),
                factors: e.factors.to_string(),
            })
            .map_err(io)?;
    }
    writer.flush().map_err(|e| Error::InvalidArgument(format!("csv output failed: {e}")))
}

pub fn catalog_json(entries: &[CatalogEntry]) -> String {
    serde_json::to_string_pretty(entries).expect("catalog entries serialize")
}
