//! The generalized Ince equation and its Fourier recurrences.
//!
//! With `t = a(z)` the generalized amplitude, the Schrödinger form becomes
//!
//! ```text
//! (1 + a1 cos 2t + a2 cos 4t) f'' + (b1 sin 2t + b2 sin 4t) f'
//!     + (cc + p1 cos 2t + p2 cos 4t) f = 0
//! ```
//!
//! where every coefficient is a polynomial in `k1², k2²` divided by
//! `den = 2 - k1² - k2² + ¾ k1² k2²` and `E` enters only through `cc`.
//! Writing `f = d1 g` or `f = d2 g` gives Ince equations for `g` with
//! different coefficients ([`Transform`]).
//!
//! Expanding in one of the four Fourier classes gives a pentadiagonal
//! recurrence. Its entries are obtained here by projecting the operator onto
//! `cos(mt)` / `sin(mt)`; with `Q_i(μ) = 2 a_i μ² - b_i μ - p_i/2` the entry
//! coupling frequency `m` to `m ± 2i` is `Q_i(∓m/2)`, negative frequencies
//! fold back with sign `+1` (cosines) or `-1` (sines), and the diagonal is
//! `m² - cc`. The period-2π classes are scaled by two so that their entries
//! read in `Q*_i(μ) = a_i (2μ-1)² - b_i (2μ-1) - p_i`, using
//! `2 Q_i(x/2) = Q*_i((x+1)/2)`.
//!
//! This differs from the commonly printed tables in three places: the
//! first column of the even period-π matrix carries `2 Q_i(0)` (the constant
//! mode folds twice), the `(0,0)` entry of the even period-2π matrix is
//! `2 - 2cc + Q*_1(0)`, and the fourth diagonal entry of both period-2π
//! matrices is `98 - 2cc`. None of these changes which rows or columns can
//! vanish, but all of them matter for truncated spectra.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen_jacobi::ModulusPair;
use crate::lame::{period_grid, schrodinger_residual, EnergyCoeffs, FactorMask, ParamVector};
use crate::symbolic::{
    integer_points, solve_identities, Assignment, EntryAlgebra, LinForm, Rational, SearchBox, Unknown,
    NUM_UNKNOWNS,
};

/// Which function the Ince equation is written for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    /// `f` itself.
    Standard,
    /// `g` with `f = d1 g`.
    D1Shifted,
    /// `g` with `f = d2 g`.
    D2Shifted,
}

impl Transform {
    pub const ALL: [Transform; 3] = [Transform::Standard, Transform::D1Shifted, Transform::D2Shifted];

    /// The factor pulled out of `f`.
    pub fn prefactor(self) -> FactorMask {
        match self {
            Transform::Standard => FactorMask::ONE,
            Transform::D1Shifted => FactorMask::D1,
            Transform::D2Shifted => FactorMask::D2,
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::Standard => "standard",
            Transform::D1Shifted => "d1-shifted",
            Transform::D2Shifted => "d2-shifted",
        })
    }
}

impl FromStr for Transform {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Transform::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown transform {s:?}")))
    }
}

/// Fourier ansatz: `cos 2nt`, `sin 2nt`, `sin (2n+1)t`, `cos (2n+1)t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FourierClass {
    EvenPi,
    OddPi,
    Odd2Pi,
    Even2Pi,
}

impl FourierClass {
    pub const ALL: [FourierClass; 4] =
        [FourierClass::EvenPi, FourierClass::OddPi, FourierClass::Odd2Pi, FourierClass::Even2Pi];

    /// Frequency of the `index`-th basis function.
    pub fn frequency(self, index: usize) -> usize {
        match self {
            FourierClass::EvenPi => 2 * index,
            FourierClass::OddPi => 2 * index + 2,
            FourierClass::Odd2Pi | FourierClass::Even2Pi => 2 * index + 1,
        }
    }

    pub fn is_cosine(self) -> bool {
        matches!(self, FourierClass::EvenPi | FourierClass::Even2Pi)
    }

    /// Scale applied to the rows: 1 for period π, 2 for period 2π.
    pub fn weight(self) -> i64 {
        match self {
            FourierClass::EvenPi | FourierClass::OddPi => 1,
            FourierClass::Odd2Pi | FourierClass::Even2Pi => 2,
        }
    }

    /// Class of a product of `s = sin t`, `c = cos t` and the even π-periodic `d1, d2`.
    pub fn of_mask(mask: FactorMask) -> Self {
        match (mask.contains(FactorMask::S), mask.contains(FactorMask::C)) {
            (false, false) => FourierClass::EvenPi,
            (true, true) => FourierClass::OddPi,
            (true, false) => FourierClass::Odd2Pi,
            (false, true) => FourierClass::Even2Pi,
        }
    }
}

impl fmt::Display for FourierClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FourierClass::EvenPi => "even-pi",
            FourierClass::OddPi => "odd-pi",
            FourierClass::Odd2Pi => "odd-2pi",
            FourierClass::Even2Pi => "even-2pi",
        })
    }
}

impl FromStr for FourierClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FourierClass::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown Fourier class {s:?}")))
    }
}

/// Coefficients of the Ince equation. `p1, p2` are the coefficients of
/// `cos 2t, cos 4t` in the zeroth-order term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InceCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub cc: f64,
    pub p1: f64,
    pub p2: f64,
    pub denom: f64,
}

/// Ince coefficients over an arbitrary entry algebra, scaled so that `unit`
/// plays the role of the leading `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InceForm<T> {
    pub a1: T,
    pub a2: T,
    pub b1: T,
    pub b2: T,
    pub cc: T,
    pub p1: T,
    pub p2: T,
    pub unit: T,
}

impl From<&InceCoefficients> for InceForm<f64> {
    fn from(co: &InceCoefficients) -> Self {
        InceForm { a1: co.a1, a2: co.a2, b1: co.b1, b2: co.b2, cc: co.cc, p1: co.p1, p2: co.p2, unit: 1.0 }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

/// Numerators of the coefficients (common denominator in `unit`), exact in
/// the moduli, the parameters and the energy ansatz.
pub fn ince_numerators(transform: Transform) -> InceForm<LinForm> {
    use Unknown::*;
    let u = LinForm::unknown;
    let (k1, k2, kk) = (LinForm::k1sq(), LinForm::k2sq(), LinForm::k1k2sq());
    let den = LinForm::int(2) - k1.clone() - k2.clone() + kk.scale(q(3, 4));
    let a1 = k1.clone() + k2.clone() - kk.clone();
    let a2 = kk.scale(q(1, 4));
    let two_e = LinForm::energy().scale(q(2, 1));
    let common_cc = two_e - u(Gamma).times_monomial(1, 0) + (u(Beta).scale(q(3, 4)) - u(Delta)).times_monomial(0, 1);
    let (b1, b2, cc, p1, p2) = match transform {
        Transform::Standard => (
            -a1.clone(),
            kk.scale(q(-1, 2)),
            common_cc + (u(Alpha).scale(q(3, 4)) - u(Lambda)).times_monomial(1, 1),
            u(Gamma).times_monomial(1, 0)
                + (u(Delta) - u(Beta)).times_monomial(0, 1)
                + (u(Lambda) - u(Alpha)).times_monomial(1, 1),
            (u(Alpha).times_monomial(1, 1) + u(Beta).times_monomial(0, 1)).scale(q(1, 4)),
        ),
        Transform::D1Shifted | Transform::D2Shifted => {
            let shifted_cc = common_cc
                + (LinForm::int(2) - u(Lambda) + (u(Alpha) - LinForm::int(3)).scale(q(3, 4))).times_monomial(1, 1);
            let p2 = (u(Beta).times_monomial(0, 1) + (u(Alpha) - LinForm::int(3)).times_monomial(1, 1)).scale(q(1, 4));
            let tail = (u(Lambda) - u(Alpha) + LinForm::int(1)).times_monomial(1, 1);
            let (b1, p1) = if transform == Transform::D1Shifted {
                (
                    k1.scale(q(-3, 1)) - k2.clone() + kk.scale(q(2, 1)),
                    (u(Gamma) - LinForm::int(2)).times_monomial(1, 0)
                        + (u(Delta) - u(Beta)).times_monomial(0, 1)
                        + tail,
                )
            } else {
                (
                    -k1.clone() - k2.scale(q(3, 1)) + kk.scale(q(2, 1)),
                    u(Gamma).times_monomial(1, 0)
                        + (u(Delta) - LinForm::int(2) - u(Beta)).times_monomial(0, 1)
                        + tail,
                )
            };
            (b1, kk.scale(q(-1, 1)), shifted_cc, p1, p2)
        }
    };
    InceForm { a1, a2, b1, b2, cc, p1, p2, unit: den }
}

fn assignment(p: &ParamVector, energy: f64) -> [f64; NUM_UNKNOWNS] {
    [p.alpha, p.beta, p.gamma, p.delta, p.lambda, energy, 0.0, 0.0, 0.0]
}

pub fn ince_coefficients(p: &ParamVector, energy: f64, m: &ModulusPair, transform: Transform) -> Result<InceCoefficients> {
    let form = ince_numerators(transform);
    let values = assignment(p, energy);
    let ev = |f: &LinForm| f.eval(m.k1_sq(), m.k2_sq(), &values);
    let denom = ev(&form.unit);
    if !(denom > 0.0) {
        return Err(Error::Domain(format!("Ince denominator is not positive: {denom}")));
    }
    Ok(InceCoefficients {
        a1: ev(&form.a1) / denom,
        a2: ev(&form.a2) / denom,
        b1: ev(&form.b1) / denom,
        b2: ev(&form.b2) / denom,
        cc: ev(&form.cc) / denom,
        p1: ev(&form.p1) / denom,
        p2: ev(&form.p2) / denom,
        denom,
    })
}

/// Inverts the `cc`-formula: the energy at which the coefficient equals `cc`.
pub fn c_to_energy(cc: f64, p: &ParamVector, m: &ModulusPair, transform: Transform) -> Result<f64> {
    let at_zero = ince_coefficients(p, 0.0, m, transform)?;
    Ok((cc - at_zero.cc) * at_zero.denom / 2.0)
}

/// `Q_i(μ) = 2 a_i μ² - b_i μ - p_i/2`.
pub fn q_poly(i: u8, mu: f64, co: &InceCoefficients) -> f64 {
    let (a, b, p) = pick(i, co);
    2.0 * a * mu * mu - b * mu - p / 2.0
}

/// `Q*_i(μ) = a_i (2μ-1)² - b_i (2μ-1) - p_i`.
pub fn qstar_poly(i: u8, mu: f64, co: &InceCoefficients) -> f64 {
    let (a, b, p) = pick(i, co);
    let x = 2.0 * mu - 1.0;
    a * x * x - b * x - p
}

fn pick(i: u8, co: &InceCoefficients) -> (f64, f64, f64) {
    match i {
        1 => (co.a1, co.b1, co.p1),
        2 => (co.a2, co.b2, co.p2),
        _ => panic!("Q index must be 1 or 2, got {i}"),
    }
}

/// `Q_j(x/2)` in the algebra of `form`.
fn q_half<T: EntryAlgebra>(form: &InceForm<T>, j: usize, x: i64) -> T {
    let (a, b, p) = if j == 1 { (&form.a1, &form.b1, &form.p1) } else { (&form.a2, &form.b2, &form.p2) };
    a.scaled(q(x * x, 2)) - b.scaled(q(x, 2)) - p.scaled(q(1, 2))
}

/// Entry `(row, col)` of the recurrence matrix of `class`.
pub fn recurrence_entry<T: EntryAlgebra>(class: FourierClass, form: &InceForm<T>, row: usize, col: usize) -> T {
    let n = class.frequency(row) as i64;
    let m = class.frequency(col) as i64;
    let fold = if class.is_cosine() { 1 } else { -1 };
    let mut entry = T::zero();
    if m == n {
        entry = entry + form.unit.scaled(q(n * n, 1)) - form.cc.clone();
    }
    for j in 1..=2usize {
        let shift = 2 * j as i64;
        if m + shift == n {
            entry = entry + q_half(form, j, m);
        }
        if m - shift == n {
            entry = entry + q_half(form, j, -m);
        }
        if m - shift < 0 && shift - m == n {
            entry = entry + q_half(form, j, -m).scaled(q(fold, 1));
        }
    }
    entry.scaled(q(class.weight(), 1))
}

/// The `size × size` truncation of the recurrence matrix.
pub fn recurrence_matrix(class: FourierClass, co: &InceCoefficients, size: usize) -> Result<DMatrix<f64>> {
    if size < 5 {
        return Err(Error::InvalidArgument(format!("recurrence matrix needs size >= 5, got {size}")));
    }
    let form = InceForm::from(co);
    Ok(DMatrix::from_fn(size, size, |r, c| {
        if r.abs_diff(c) > 2 {
            0.0
        } else {
            recurrence_entry(class, &form, r, c)
        }
    }))
}

const MAX_TRUNCATION: usize = 512;
const SPECTRUM_TOLERANCE: f64 = 1e-8;

fn lowest_energies(
    class: FourierClass,
    p: &ParamVector,
    m: &ModulusPair,
    transform: Transform,
    size: usize,
    count: usize,
) -> Result<Vec<f64>> {
    // the matrix is M0 - w cc I, so its characteristic values are eig(M0) / w
    let base = ince_coefficients(p, 0.0, m, transform)?;
    let zero_c = InceCoefficients { cc: 0.0, ..base };
    let matrix = recurrence_matrix(class, &zero_c, size)?;
    let w = class.weight() as f64;
    let mut values: Vec<(f64, f64)> = matrix
        .complex_eigenvalues()
        .iter()
        .map(|z| ((z.re / w - base.cc) * base.denom / 2.0, z.im / w * base.denom / 2.0))
        .collect();
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    values.truncate(count);
    if let Some((re, im)) = values.iter().find(|(re, im)| im.abs() > 1e-9 * re.abs().max(1.0)) {
        return Err(Error::Convergence(format!("complex characteristic energy {re} + {im}i in class {class}")));
    }
    Ok(values.into_iter().map(|(re, _)| re).collect())
}

/// The `count` lowest energies with eigenfunctions in `class`, from truncated
/// recurrence matrices of size `size, 2 size, 4 size, …` until successive
/// truncations agree to `1e-8`.
pub fn hill_eigen_energies(
    class: FourierClass,
    p: &ParamVector,
    m: &ModulusPair,
    transform: Transform,
    size: usize,
    count: usize,
) -> Result<Vec<f64>> {
    if size < 2 * count + 8 {
        return Err(Error::InvalidArgument(format!("truncation {size} too small for {count} energies")));
    }
    if size > MAX_TRUNCATION {
        return Err(Error::InvalidArgument(format!("truncation {size} exceeds the cap {MAX_TRUNCATION}")));
    }
    let mut size = size;
    let mut previous = lowest_energies(class, p, m, transform, size, count)?;
    while 2 * size <= MAX_TRUNCATION {
        size *= 2;
        let next = lowest_energies(class, p, m, transform, size, count)?;
        let settled = previous.len() == next.len()
            && previous.iter().zip(&next).all(|(a, b)| (a - b).abs() < SPECTRUM_TOLERANCE * a.abs().max(1.0));
        if settled {
            return Ok(next);
        }
        previous = next;
    }
    Err(Error::Convergence(format!("{class} spectrum unsettled at truncation {size}")))
}

/// Outcome of the coexistence test for one class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoexistenceReport {
    pub class: FourierClass,
    /// Root of `b2 = 2 a2 (2μ - 1)` (period π) or `b2 = 4 a2 (μ - 1)` (period 2π);
    /// `None` when `a2 = 0`.
    pub mu: Option<f64>,
    /// Whether that root is an integer.
    pub integral: bool,
    /// Whether all three conditions `Q_1(μ) = Q_2(μ) = Q_2(μ-1) = 0` (or their
    /// starred versions) hold, i.e. two independent solutions of the class
    /// could coexist.
    pub coexistence_possible: bool,
    /// `a2 = 0`: the five-term recurrence has collapsed to three terms.
    pub degenerate: bool,
}

pub fn coexistence_conditions(class: FourierClass, co: &InceCoefficients) -> CoexistenceReport {
    let pi_class = class.weight() == 1;
    if co.a2 == 0.0 {
        return CoexistenceReport { class, mu: None, integral: false, coexistence_possible: false, degenerate: true };
    }
    let mu = if pi_class { (co.b2 / (2.0 * co.a2) + 1.0) / 2.0 } else { co.b2 / (4.0 * co.a2) + 1.0 };
    let integral = (mu - mu.round()).abs() < 1e-12;
    let coexistence_possible = integral && {
        let m = mu.round();
        let scale = 1e-12 * (co.a1.abs() + co.b1.abs() + co.p1.abs() + co.a2.abs() + co.b2.abs() + co.p2.abs()).max(1.0);
        let conditions = if pi_class {
            [q_poly(1, m, co), q_poly(2, m, co), q_poly(2, m - 1.0, co)]
        } else {
            [qstar_poly(1, m, co), qstar_poly(2, m, co), qstar_poly(2, m - 1.0, co)]
        };
        conditions.iter().all(|v| v.abs() < scale)
    };
    CoexistenceReport { class, mu: Some(mu), integral, coexistence_possible, degenerate: false }
}

/// A row or a column of a recurrence matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Line {
    Row(usize),
    Column(usize),
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::Row(i) => write!(f, "row {i}"),
            Line::Column(i) => write!(f, "column {i}"),
        }
    }
}

/// Parameters for which a whole row or column of a recurrence matrix
/// vanishes identically in the moduli.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingSolution {
    pub params: ParamVector,
    pub energy: EnergyCoeffs,
    pub class: FourierClass,
    pub line: Line,
    pub transform: Transform,
    /// Product of generalized Jacobi functions that solves the Schrödinger
    /// form, when one exists.
    pub factors: Option<FactorMask>,
}

/// Symbolic entries of a row or column (the band part; everything else is zero).
pub fn line_entries(class: FourierClass, transform: Transform, line: Line) -> Vec<LinForm> {
    let form = ince_numerators(transform);
    let (fixed, is_row) = match line {
        Line::Row(i) => (i, true),
        Line::Column(i) => (i, false),
    };
    (fixed.saturating_sub(2)..=fixed + 2)
        .map(|other| {
            let (r, c) = if is_row { (fixed, other) } else { (other, fixed) };
            recurrence_entry(class, &form, r, c)
        })
        .collect()
}

/// Options for [`enumerate_vanishing_solutions`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub bounds: SearchBox,
    /// Rows and columns `0..=max_index` are examined.
    pub max_index: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { bounds: SearchBox::default(), max_index: 4 }
    }
}

fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn split_assignment(a: &Assignment) -> (ParamVector, EnergyCoeffs) {
    let v = |u: Unknown| rational_to_f64(a[u.index()]);
    (
        ParamVector::new(v(Unknown::Alpha), v(Unknown::Beta), v(Unknown::Gamma), v(Unknown::Delta), v(Unknown::Lambda)),
        EnergyCoeffs { e0: v(Unknown::E0), e1: v(Unknown::E1), e2: v(Unknown::E2), e12: v(Unknown::E12) },
    )
}

/// Every row and column vanishing for one transform, over all four classes.
///
/// Conditions are solved as polynomial identities in `k1², k2²`, so the
/// results hold for every modulus pair. The zero potential is excluded.
pub fn enumerate_vanishing_solutions(transform: Transform, options: &EnumerationOptions) -> Vec<VanishingSolution> {
    let mut found = Vec::new();
    for class in FourierClass::ALL {
        for index in 0..=options.max_index {
            for line in [Line::Row(index), Line::Column(index)] {
                let outcome = solve_identities(&line_entries(class, transform, line));
                for point in integer_points(&outcome, &options.bounds) {
                    let (params, energy) = split_assignment(&point);
                    if params == ParamVector::default() {
                        continue;
                    }
                    found.push(VanishingSolution {
                        params,
                        energy,
                        class,
                        line,
                        transform,
                        factors: identify_factors(&params, &energy),
                    });
                }
            }
        }
    }
    found
}

/// The product of `s, c, d1, d2` solving the Schrödinger form with these
/// parameters and energy, if any; checked at two modulus pairs.
pub fn identify_factors(params: &ParamVector, energy: &EnergyCoeffs) -> Option<FactorMask> {
    let pairs = [(0.8, 0.3), (0.6, 0.5)].map(|(a, b)| ModulusPair::new(a, b).expect("valid moduli"));
    FactorMask::all().find(|mask| {
        pairs.iter().all(|m| {
            let grid = period_grid(m.period_sc().expect("k1 < 1"), 97);
            schrodinger_residual(mask, params, energy.energy(m), m, &grid).is_ok_and(|r| r < 1e-9)
        })
    })
}

/// Distinct `(params, energy)` pairs, first occurrence kept, in input order.
pub fn distinct_solutions(solutions: &[VanishingSolution]) -> Vec<VanishingSolution> {
    let mut out: Vec<VanishingSolution> = Vec::new();
    for s in solutions {
        if !out.iter().any(|o| o.params == s.params && o.energy == s.energy) {
            out.push(s.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lame::catalog;
    use crate::quadrature::integrate;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn pair(k1: f64, k2: f64) -> ModulusPair {
        ModulusPair::new(k1, k2).unwrap()
    }

    fn pv(a: f64, b: f64, g: f64, d: f64, l: f64) -> ParamVector {
        ParamVector::new(a, b, g, d, l)
    }

    #[test]
    fn standard_coefficients_by_hand() {
        let co = ince_coefficients(&pv(3.0, 0.0, 2.0, 2.0, 2.0), 1.73, &pair(0.8, 0.3), Transform::Standard).unwrap();
        let den = 2.0 - 0.64 - 0.09 + 0.75 * 0.0576;
        assert_abs_diff_eq!(co.denom, den, epsilon = 1e-15);
        assert_abs_diff_eq!(co.a1, (0.64 + 0.09 - 0.0576) / den, epsilon = 1e-15);
        assert_abs_diff_eq!(co.a1, 0.6724 / 1.3132, epsilon = 1e-15);
        assert_abs_diff_eq!(co.a2, 0.0144 / 1.3132, epsilon = 1e-15);
        assert_eq!(co.b1, -co.a1);
        assert_eq!(co.b2, -2.0 * co.a2);
        let zero = ince_coefficients(&ParamVector::default(), 0.0, &pair(0.8, 0.3), Transform::Standard).unwrap();
        assert_eq!((zero.cc, zero.p1, zero.p2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn shifted_coefficients_by_hand() {
        let co = ince_coefficients(&pv(3.0, 0.0, 2.0, 0.0, 2.0), 0.64, &pair(0.8, 0.3), Transform::D1Shifted).unwrap();
        assert_abs_diff_eq!(co.b1, (-3.0 * 0.64 - 0.09 + 2.0 * 0.0576) / 1.3132, epsilon = 1e-15);
        assert_abs_diff_eq!(co.b2, -4.0 * co.a2, epsilon = 1e-16);
        let co2 = ince_coefficients(&pv(3.0, 0.0, 2.0, 0.0, 2.0), 0.64, &pair(0.8, 0.3), Transform::D2Shifted).unwrap();
        assert_abs_diff_eq!(co2.b1, (-0.64 - 3.0 * 0.09 + 2.0 * 0.0576) / 1.3132, epsilon = 1e-15);
    }

    #[test]
    fn energy_round_trip() {
        let m = pair(0.8, 0.3);
        let p = pv(8.0, 0.0, 2.0, 2.0, 6.0);
        for t in Transform::ALL {
            let co = ince_coefficients(&p, 1.73, &m, t).unwrap();
            assert_abs_diff_eq!(c_to_energy(co.cc, &p, &m, t).unwrap(), 1.73, epsilon = 1e-13);
            // slope 2 / den
            let co2 = ince_coefficients(&p, 2.73, &m, t).unwrap();
            assert_abs_diff_eq!(co2.cc - co.cc, 2.0 / co.denom, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(c_to_energy(0.0, &p, &m, Transform::Standard).unwrap(), 0.73, epsilon = 1e-14);
        assert_eq!(c_to_energy(0.0, &ParamVector::default(), &m, Transform::Standard).unwrap(), 0.0);
    }

    #[test]
    fn first_row_conditions_of_d1_d2() {
        let m = pair(0.8, 0.3);
        let co = ince_coefficients(&pv(8.0, 0.0, 2.0, 2.0, 6.0), 0.73, &m, Transform::Standard).unwrap();
        assert_abs_diff_eq!(q_poly(1, -1.0, &co), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q_poly(2, -2.0, &co), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(co.cc, 0.0, epsilon = 1e-15);
        let mu = 0.37;
        assert_abs_diff_eq!(q_poly(1, mu, &co) - q_poly(1, -mu, &co), -2.0 * co.b1 * mu, epsilon = 1e-15);
    }

    #[test]
    fn first_column_conditions_of_s() {
        let m = pair(0.8, 0.3);
        let co = ince_coefficients(&pv(3.0, 0.0, 2.0, 2.0, 2.0), 1.73, &m, Transform::Standard).unwrap();
        assert_abs_diff_eq!(2.0 - 2.0 * co.cc - qstar_poly(1, 0.0, &co), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(qstar_poly(1, 1.0, &co) - qstar_poly(2, 0.0, &co), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(qstar_poly(2, 1.0, &co), 0.0, epsilon = 1e-14);
        let zero = ince_coefficients(&ParamVector::default(), 0.0, &m, Transform::Standard).unwrap();
        assert_eq!(qstar_poly(1, 0.5, &zero), 0.0);
        assert_abs_diff_eq!(qstar_poly(1, 1.0, &co) - qstar_poly(1, 0.0, &co), -2.0 * co.b1, epsilon = 1e-15);
    }

    #[test]
    fn printed_entries_that_agree() {
        let co = ince_coefficients(&pv(3.0, 0.0, 2.0, 2.0, 2.0), 1.73, &pair(0.8, 0.3), Transform::Standard).unwrap();
        let even = recurrence_matrix(FourierClass::EvenPi, &co, 6).unwrap();
        assert_eq!(even[(0, 0)], -co.cc);
        assert_abs_diff_eq!(even[(0, 1)], q_poly(1, -1.0, &co), epsilon = 1e-15);
        assert_abs_diff_eq!(even[(1, 1)], 4.0 - co.cc + q_poly(2, -1.0, &co), epsilon = 1e-15);
        let odd = recurrence_matrix(FourierClass::OddPi, &co, 6).unwrap();
        assert_abs_diff_eq!(odd[(0, 0)], 4.0 - co.cc - q_poly(2, -1.0, &co), epsilon = 1e-15);
        let odd2 = recurrence_matrix(FourierClass::Odd2Pi, &co, 6).unwrap();
        assert_abs_diff_eq!(odd2[(1, 1)], 18.0 - 2.0 * co.cc, epsilon = 1e-14);
        assert_abs_diff_eq!(odd2[(0, 1)], qstar_poly(1, -1.0, &co) - qstar_poly(2, -1.0, &co), epsilon = 1e-15);
        let even2 = recurrence_matrix(FourierClass::Even2Pi, &co, 6).unwrap();
        assert_abs_diff_eq!(even2[(1, 0)], qstar_poly(1, 1.0, &co) + qstar_poly(2, 0.0, &co), epsilon = 1e-15);
        for mat in [&even, &odd, &odd2, &even2] {
            for r in 0..6usize {
                for c in 0..6usize {
                    if r.abs_diff(c) > 2 {
                        assert_eq!(mat[(r, c)], 0.0);
                    }
                }
            }
        }
        assert!(recurrence_matrix(FourierClass::EvenPi, &co, 4).is_err());
    }

    #[test]
    fn corrected_entries() {
        let co = ince_coefficients(&pv(3.0, 0.0, 2.0, 2.0, 2.0), 1.73, &pair(0.8, 0.3), Transform::Standard).unwrap();
        let even = recurrence_matrix(FourierClass::EvenPi, &co, 6).unwrap();
        assert_abs_diff_eq!(even[(1, 0)], 2.0 * q_poly(1, 0.0, &co), epsilon = 1e-15);
        assert_abs_diff_eq!(even[(2, 0)], 2.0 * q_poly(2, 0.0, &co), epsilon = 1e-15);
        let even2 = recurrence_matrix(FourierClass::Even2Pi, &co, 6).unwrap();
        assert_abs_diff_eq!(even2[(0, 0)], 2.0 - 2.0 * co.cc + qstar_poly(1, 0.0, &co), epsilon = 1e-14);
        assert_abs_diff_eq!(even2[(3, 3)], 98.0 - 2.0 * co.cc, epsilon = 1e-13);
    }

    /// Projects the Ince operator applied to one basis function onto another by quadrature.
    fn projected(class: FourierClass, co: &InceCoefficients, row: usize, col: usize) -> f64 {
        let (n, m) = (class.frequency(row) as f64, class.frequency(col) as f64);
        let basis = |k: f64, t: f64| if class.is_cosine() { (k * t).cos() } else { (k * t).sin() };
        let dbasis = |k: f64, t: f64| if class.is_cosine() { -k * (k * t).sin() } else { k * (k * t).cos() };
        let apply = |t: f64| {
            let f = basis(m, t);
            (1.0 + co.a1 * (2.0 * t).cos() + co.a2 * (4.0 * t).cos()) * (-m * m * f)
                + (co.b1 * (2.0 * t).sin() + co.b2 * (4.0 * t).sin()) * dbasis(m, t)
                + (co.cc + co.p1 * (2.0 * t).cos() + co.p2 * (4.0 * t).cos()) * f
        };
        let norm = if n == 0.0 { 2.0 * PI } else { PI };
        let coefficient = integrate(|t| apply(t) * basis(n, t), 0.0, 2.0 * PI, 1e-13).unwrap() / norm;
        -(class.weight() as f64) * coefficient
    }

    #[test]
    fn entries_match_projection() {
        for t in Transform::ALL {
            let co = ince_coefficients(&pv(7.0, 1.5, 3.0, 2.0, 5.0), 0.9, &pair(0.8, 0.3), t).unwrap();
            for class in FourierClass::ALL {
                let mat = recurrence_matrix(class, &co, 7).unwrap();
                for r in 0..7 {
                    for c in 0..7 {
                        assert_abs_diff_eq!(mat[(r, c)], projected(class, &co, r, c), epsilon = 1e-11);
                    }
                }
            }
        }
    }

    #[test]
    fn hill_recovers_first_row() {
        let m = pair(0.8, 0.3);
        let e = hill_eigen_energies(FourierClass::Odd2Pi, &pv(3.0, 0.0, 2.0, 2.0, 2.0), &m, Transform::Standard, 16, 3)
            .unwrap();
        assert_abs_diff_eq!(e[0], 1.73, epsilon = 1e-8);
        let e = hill_eigen_energies(FourierClass::OddPi, &pv(8.0, 0.0, 6.0, 6.0, 2.0), &m, Transform::Standard, 16, 2)
            .unwrap();
        assert_abs_diff_eq!(e[0], 4.73, epsilon = 1e-8);
        assert!(hill_eigen_energies(FourierClass::OddPi, &ParamVector::default(), &m, Transform::Standard, 9, 1).is_err());
    }

    #[test]
    fn free_particle() {
        let m = pair(0.0, 0.0);
        let p = ParamVector::default();
        let expect = |class: FourierClass| -> Vec<f64> {
            (0..4).map(|i| (class.frequency(i) as f64).powi(2)).collect()
        };
        for class in FourierClass::ALL {
            let e = hill_eigen_energies(class, &p, &m, Transform::Standard, 16, 4).unwrap();
            for (a, b) in e.iter().zip(expect(class)) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn classical_lame_band_edges() {
        let k: f64 = 0.7;
        let q = k * k;
        let m = pair(k, 0.0);
        let p = pv(0.0, 0.0, 6.0, 0.0, 0.0);
        let root = (1.0 - q + q * q).sqrt();
        let cases = [
            (FourierClass::EvenPi, 2.0 * (1.0 + q) - 2.0 * root),
            (FourierClass::EvenPi, 2.0 * (1.0 + q) + 2.0 * root),
            (FourierClass::OddPi, 4.0 + q),
            (FourierClass::Odd2Pi, 1.0 + 4.0 * q),
            (FourierClass::Even2Pi, 1.0 + q),
        ];
        for (class, energy) in cases {
            let e = hill_eigen_energies(class, &p, &m, Transform::Standard, 16, 2).unwrap();
            assert!(e.iter().any(|v| (v - energy).abs() < 1e-9), "{class}: {e:?} vs {energy}");
        }
    }

    #[test]
    fn transforms_share_spectra() {
        let m = pair(0.8, 0.3);
        let p = pv(9.0, 0.5, 4.0, 3.0, 5.0);
        for class in FourierClass::ALL {
            let base = hill_eigen_energies(class, &p, &m, Transform::Standard, 16, 4).unwrap();
            for t in [Transform::D1Shifted, Transform::D2Shifted] {
                let other = hill_eigen_energies(class, &p, &m, t, 16, 4).unwrap();
                for (a, b) in base.iter().zip(&other) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn coexistence_verdicts() {
        let m = pair(0.8, 0.3);
        let p = pv(8.0, 0.0, 2.0, 2.0, 6.0);
        let co = ince_coefficients(&p, 0.73, &m, Transform::Standard).unwrap();
        let r = coexistence_conditions(FourierClass::EvenPi, &co);
        assert_eq!(r.mu, Some(0.0));
        assert!(r.integral && !r.coexistence_possible);
        let r = coexistence_conditions(FourierClass::Odd2Pi, &co);
        assert_eq!(r.mu, Some(0.5));
        assert!(!r.integral);
        let shifted = ince_coefficients(&p, 0.73, &m, Transform::D1Shifted).unwrap();
        let r = coexistence_conditions(FourierClass::OddPi, &shifted);
        assert_abs_diff_eq!(2.0 * r.mu.unwrap() - 1.0, -2.0, epsilon = 1e-14);
        assert!(!r.integral);
        let free = ince_coefficients(&ParamVector::default(), 0.0, &m, Transform::Standard).unwrap();
        assert!(coexistence_conditions(FourierClass::EvenPi, &free).coexistence_possible);
        let lame = ince_coefficients(&p, 0.73, &pair(0.8, 0.0), Transform::Standard).unwrap();
        assert!(coexistence_conditions(FourierClass::OddPi, &lame).degenerate);
    }

    #[test]
    fn even_pi_lines() {
        let opts = EnumerationOptions::default();
        let found = enumerate_vanishing_solutions(Transform::Standard, &opts);
        let even: Vec<_> = found.iter().filter(|s| s.class == FourierClass::EvenPi).collect();
        assert_eq!(even.len(), 1);
        assert_eq!(even[0].line, Line::Row(0));
        assert_eq!(even[0].params, pv(8.0, 0.0, 2.0, 2.0, 6.0));
        assert_eq!(even[0].energy, EnergyCoeffs::new(0.0, 1.0, 1.0));
        assert_eq!(even[0].factors, Some("d1·d2".parse().unwrap()));
        let odd_row = found.iter().find(|s| s.class == FourierClass::OddPi && s.line == Line::Row(0)).unwrap();
        assert_eq!(odd_row.params, pv(24.0, 0.0, 12.0, 12.0, 12.0));
        assert_eq!(odd_row.energy, EnergyCoeffs::new(4.0, 4.0, 4.0));
    }

    #[test]
    fn empty_box_finds_nothing() {
        let opts = EnumerationOptions { bounds: SearchBox { alpha: 1..=0, ..SearchBox::default() }, max_index: 2 };
        assert!(enumerate_vanishing_solutions(Transform::Standard, &opts).is_empty());
    }

    #[test]
    fn vanishing_lines_are_numerically_zero() {
        let found = enumerate_vanishing_solutions(Transform::D1Shifted, &EnumerationOptions::default());
        assert!(!found.is_empty());
        for s in &found {
            for &(k1, k2) in &[(0.8, 0.3), (0.5, 0.2), (0.95, 0.9)] {
                let m = pair(k1, k2);
                let co = ince_coefficients(&s.params, s.energy.energy(&m), &m, s.transform).unwrap();
                let mat = recurrence_matrix(s.class, &co, 8).unwrap();
                let values: Vec<f64> = match s.line {
                    Line::Row(i) => mat.row(i).iter().copied().collect(),
                    Line::Column(i) => mat.column(i).iter().copied().collect(),
                };
                assert!(values.iter().all(|v| v.abs() < 1e-13), "{s:?}: {values:?}");
            }
        }
    }

    #[test]
    fn catalog_classes() {
        assert_eq!(catalog().iter().filter(|e| FourierClass::of_mask(e.factors) == FourierClass::EvenPi).count(), 3);
        assert_eq!("odd-2pi".parse::<FourierClass>().unwrap(), FourierClass::Odd2Pi);
        assert_eq!("d2-shifted".parse::<Transform>().unwrap(), Transform::D2Shifted);
        assert!("x".parse::<Transform>().is_err());
    }
}
