//! Power series in `s` and their four-term recurrences.
//!
//! Substituting `f = w · Σ a_n s^{2n+ε}` with a prefactor `w ⊆ {c, d1, d2}`
//! and parity `ε ∈ {0, 1}` into `f'' + (V + E) f = 0` gives
//!
//! ```text
//! M2(n) a_{n-2} + M1(n) a_{n-1} + D(n) a_n + f(n) a_{n+1} = 0,
//! ```
//!
//! a lower Hessenberg band with the positive superdiagonal `f(n)`. The
//! series is a polynomial exactly when the chain breaks: when the leading
//! column `D(0) = M1(1) = M2(2) = 0` vanishes, or when
//! `M1(μ) = M2(μ) = M2(μ+1) = 0` for some `μ ≥ 2`.
//!
//! Band entries come in three flavours:
//!
//! - [`printed_band_form`]: the twelve commonly tabulated kinds, transcribed
//!   as they are usually printed;
//! - [`derive_band_form`]: generated from the operator itself, for any of the
//!   sixteen kinds;
//! - [`band_form`]: the forms used everywhere else — the tabulated ones with
//!   their misprints corrected, and the generated ones for the four kinds
//!   with `d2` but no `d1` in the prefactor, which are not tabulated.
//!
//! [`transcription_audit`] lists every place where the tabulated forms
//! disagree with the generated ones.

use std::fmt;

use serde::Serialize;

use crate::gen_jacobi::{eval_all, ModulusPair};
use crate::lame::{EnergyCoeffs, FactorMask, ParamVector};
use crate::symbolic::{integer_points, solve_identities, LinForm, Rational, SearchBox, Unknown, NUM_UNKNOWNS};

/// Prefactor and parity of a series ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AnsatzKind {
    /// Subset of `{c, d1, d2}`.
    pub prefactor: FactorMask,
    /// Odd powers `s^{2n+1}` when true, even powers `s^{2n}` otherwise.
    pub odd: bool,
}

impl AnsatzKind {
    /// The twelve tabulated kinds, in their customary order.
    pub fn printed() -> [AnsatzKind; 12] {
        let c = FactorMask::C;
        let d1 = FactorMask::D1;
        let d2 = FactorMask::D2;
        let one = FactorMask::ONE;
        [
            AnsatzKind { prefactor: one, odd: true },
            AnsatzKind { prefactor: one, odd: false },
            AnsatzKind { prefactor: c, odd: false },
            AnsatzKind { prefactor: c, odd: true },
            AnsatzKind { prefactor: d1, odd: false },
            AnsatzKind { prefactor: d1, odd: true },
            AnsatzKind { prefactor: c.union(d1), odd: false },
            AnsatzKind { prefactor: c.union(d1), odd: true },
            AnsatzKind { prefactor: d1.union(d2), odd: false },
            AnsatzKind { prefactor: d1.union(d2), odd: true },
            AnsatzKind { prefactor: c.union(d1).union(d2), odd: false },
            AnsatzKind { prefactor: c.union(d1).union(d2), odd: true },
        ]
    }

    /// The four kinds with `d2` but not `d1` in the prefactor.
    pub fn d2_only() -> [AnsatzKind; 4] {
        let c = FactorMask::C;
        let d2 = FactorMask::D2;
        [
            AnsatzKind { prefactor: d2, odd: false },
            AnsatzKind { prefactor: d2, odd: true },
            AnsatzKind { prefactor: c.union(d2), odd: false },
            AnsatzKind { prefactor: c.union(d2), odd: true },
        ]
    }

    /// All sixteen kinds: the tabulated ones first.
    pub fn all() -> Vec<AnsatzKind> {
        Self::printed().into_iter().chain(Self::d2_only()).collect()
    }

    pub fn is_printed(self) -> bool {
        Self::printed().contains(&self)
    }

    /// The eigenfunction when the series stops after its first term.
    pub fn leading_factors(self) -> FactorMask {
        if self.odd {
            self.prefactor.union(FactorMask::S)
        } else {
            self.prefactor
        }
    }

    fn parity(self) -> i64 {
        i64::from(self.odd)
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let power = if self.odd { "s^(2n+1)" } else { "s^(2n)" };
        if self.prefactor.is_empty() {
            write!(f, "{power}")
        } else {
            write!(f, "{}·{power}", self.prefactor)
        }
    }
}

/// The four band entries at one index, exact in the moduli and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BandForm {
    pub d: LinForm,
    pub f: LinForm,
    pub m1: LinForm,
    pub m2: LinForm,
}

impl BandForm {
    pub fn entry(&self, which: BandEntry) -> &LinForm {
        match which {
            BandEntry::D => &self.d,
            BandEntry::F => &self.f,
            BandEntry::M1 => &self.m1,
            BandEntry::M2 => &self.m2,
        }
    }

    fn evaluate(&self, p: &ParamVector, energy: f64, m: &ModulusPair) -> BandRow {
        let values: [f64; NUM_UNKNOWNS] = [p.alpha, p.beta, p.gamma, p.delta, p.lambda, energy, 0.0, 0.0, 0.0];
        let ev = |form: &LinForm| form.eval(m.k1_sq(), m.k2_sq(), &values);
        BandRow { d: ev(&self.d), f: ev(&self.f), m1: ev(&self.m1), m2: ev(&self.m2) }
    }
}

/// Names of the band entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BandEntry {
    D,
    F,
    M1,
    M2,
}

impl BandEntry {
    pub const ALL: [BandEntry; 4] = [BandEntry::D, BandEntry::F, BandEntry::M1, BandEntry::M2];
}

/// Numerical band entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandRow {
    pub d: f64,
    pub f: f64,
    pub m1: f64,
    pub m2: f64,
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn int(n: i64) -> LinForm {
    LinForm::int(n)
}

fn u(x: Unknown) -> LinForm {
    LinForm::unknown(x)
}

/// `x k1² + y k2² + z k1² k2²`.
fn spread(x: LinForm, y: LinForm, z: LinForm) -> LinForm {
    x.times_monomial(1, 0) + y.times_monomial(0, 1) + z.times_monomial(1, 1)
}

fn energy() -> LinForm {
    LinForm::energy()
}

/// Polynomials in `s` with affine coefficients, lowest power first.
#[derive(Debug, Clone, Default)]
struct SPoly(Vec<LinForm>);

impl SPoly {
    fn from_terms(terms: &[(usize, LinForm)]) -> Self {
        let mut out = SPoly::default();
        for (power, coeff) in terms {
            out.add_at(*power, coeff.clone());
        }
        out
    }

    fn add_at(&mut self, power: usize, coeff: LinForm) {
        if self.0.len() <= power {
            self.0.resize(power + 1, LinForm::zero());
        }
        self.0[power] = std::mem::take(&mut self.0[power]) + coeff;
    }

    fn coeff(&self, power: usize) -> LinForm {
        self.0.get(power).cloned().unwrap_or_default()
    }

    fn add(&self, other: &SPoly) -> SPoly {
        let mut out = self.clone();
        for (i, c) in other.0.iter().enumerate() {
            out.add_at(i, c.clone());
        }
        out
    }

    fn scale(&self, factor: Rational) -> SPoly {
        SPoly(self.0.iter().map(|c| c.scale(factor)).collect())
    }

    fn mul(&self, other: &SPoly) -> SPoly {
        let mut out = SPoly::default();
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                if !a.is_zero() && !b.is_zero() {
                    out.add_at(i + j, a.times(b));
                }
            }
        }
        out
    }

    fn derivative(&self) -> SPoly {
        SPoly(self.0.iter().enumerate().skip(1).map(|(i, c)| c.scale(r(i as i64))).collect())
    }
}

/// `P G'' + R G' + (U + E) G = 0` for `f = w G(s)`.
struct ReducedOperator {
    p: SPoly,
    r: SPoly,
    u: SPoly,
}

fn reduced_operator(prefactor: FactorMask) -> ReducedOperator {
    let (k1, k2, kk) = (LinForm::k1sq(), LinForm::k2sq(), LinForm::k1k2sq());
    let one = int(1);
    // c², d1², d2² as polynomials in s
    let c2 = SPoly::from_terms(&[(0, one.clone()), (2, int(-1))]);
    let dd1 = SPoly::from_terms(&[(0, one.clone()), (2, -k1.clone())]);
    let dd2 = SPoly::from_terms(&[(0, one.clone()), (2, -k2.clone())]);
    let s1 = SPoly::from_terms(&[(1, one.clone())]);
    let s2 = SPoly::from_terms(&[(2, one.clone())]);
    let constant = |form: &LinForm| SPoly::from_terms(&[(0, form.clone())]);

    let p = c2.mul(&dd1).mul(&dd2);
    let mut rr = p.derivative().scale(Rational::new(1, 2));
    let mut uu = SPoly::from_terms(&[
        (4, spread(LinForm::zero(), u(Unknown::Beta), u(Unknown::Alpha))),
        (2, -spread(u(Unknown::Gamma), u(Unknown::Delta), u(Unknown::Lambda))),
    ]);

    // w'/w · s' and w''/w for each factor, as polynomials in s
    let slope = |f: FactorMask| -> SPoly {
        if f == FactorMask::C {
            s1.mul(&dd1).mul(&dd2).scale(r(-1))
        } else if f == FactorMask::D1 {
            constant(&k1).mul(&s1).mul(&c2).mul(&dd2).scale(r(-1))
        } else {
            constant(&k2).mul(&s1).mul(&c2).mul(&dd1).scale(r(-1))
        }
    };
    let curvature = |f: FactorMask| -> SPoly {
        if f == FactorMask::C {
            dd1.mul(&dd2).add(&s2.mul(&dd2).mul(&constant(&k1)).scale(r(-1))).add(&s2.mul(&dd1).mul(&constant(&k2)).scale(r(-1))).scale(r(-1))
        } else if f == FactorMask::D1 {
            c2.mul(&dd2)
                .add(&s2.mul(&dd2).scale(r(-1)))
                .add(&s2.mul(&c2).mul(&constant(&k2)).scale(r(-1)))
                .mul(&constant(&k1))
                .scale(r(-1))
        } else {
            c2.mul(&dd1)
                .add(&s2.mul(&dd1).scale(r(-1)))
                .add(&s2.mul(&c2).mul(&constant(&k1)).scale(r(-1)))
                .mul(&constant(&k2))
                .scale(r(-1))
        }
    };
    // (w_i'/w_i)(w_j'/w_j) s'²
    let cross = |a: FactorMask, b: FactorMask| -> SPoly {
        let pair = a.union(b);
        if pair == FactorMask::C.union(FactorMask::D1) {
            s2.mul(&dd2).mul(&constant(&k1))
        } else if pair == FactorMask::C.union(FactorMask::D2) {
            s2.mul(&dd1).mul(&constant(&k2))
        } else {
            s2.mul(&c2).mul(&constant(&kk))
        }
    };

    let factors: Vec<FactorMask> =
        [FactorMask::C, FactorMask::D1, FactorMask::D2].into_iter().filter(|f| prefactor.contains(*f)).collect();
    for (i, &a) in factors.iter().enumerate() {
        rr = rr.add(&slope(a).scale(r(2)));
        uu = uu.add(&curvature(a));
        for &b in &factors[i + 1..] {
            uu = uu.add(&cross(a, b).scale(r(2)));
        }
    }
    ReducedOperator { p, r: rr, u: uu }
}

/// Band entries generated from the operator.
pub fn derive_band_form(kind: AnsatzKind, n: i64) -> BandForm {
    let op = reduced_operator(kind.prefactor);
    let m = 2 * n + kind.parity();
    let falling = |x: i64| r(x * (x - 1));
    BandForm {
        d: op.p.coeff(2).scale(falling(m)) + op.r.coeff(1).scale(r(m)) + op.u.coeff(0) + energy(),
        f: op.p.coeff(0).scale(falling(m + 2)),
        m1: op.p.coeff(4).scale(falling(m - 2)) + op.r.coeff(3).scale(r(m - 2)) + op.u.coeff(2),
        m2: op.p.coeff(6).scale(falling(m - 4)) + op.r.coeff(5).scale(r(m - 4)) + op.u.coeff(4),
    }
}

fn mask(names: &str) -> FactorMask {
    names.parse().expect("static factor list")
}

/// `(α + shift) k1² k2² + β k2²`.
fn quartic_band(shift: i64) -> LinForm {
    (u(Unknown::Alpha) + int(shift)).times_monomial(1, 1) + u(Unknown::Beta).times_monomial(0, 1)
}

/// `(x - γ) k1² + (y - δ) k2² + (z - λ) k1² k2²`.
fn quadratic_band(x: i64, y: i64, z: i64) -> LinForm {
    spread(int(x) - u(Unknown::Gamma), int(y) - u(Unknown::Delta), int(z) - u(Unknown::Lambda))
}

/// `E - x - y k1² - z k2²`.
fn diagonal_band(x: i64, y: i64, z: i64) -> LinForm {
    energy() - int(x) - spread(int(y), int(z), int(0))
}

/// The tabulated forms, verbatim (misprints included); `None` for the
/// untabulated kinds.
pub fn printed_band_form(kind: AnsatzKind, n: i64) -> Option<BandForm> {
    let sq = |x: i64| x * x;
    let (odd_f, even_f) = (2 * (n + 1) * (2 * n + 3), 2 * (n + 1) * (2 * n + 1));
    let (a, b) = (sq(2 * n + 1), 4 * sq(n)); // (2n+1)², 4n²
    let (a1, b1) = (4 * sq(n + 1), sq(2 * n + 1)); // 4(n+1)², (2n+1)²
    let p = kind.prefactor;
    let form = match (p, kind.odd) {
        (x, true) if x == FactorMask::ONE => {
            let t = 2 * n * (2 * n - 1);
            (diagonal_band(a, a, a), odd_f, quadratic_band(t, t, t), quartic_band(-(2 * n - 3) * (2 * n - 1)))
        }
        (x, false) if x == FactorMask::ONE => {
            let t = 2 * (n - 1) * (2 * n - 1);
            (diagonal_band(b, b, b), even_f, quadratic_band(t, t, t), quartic_band(-4 * (n - 1) * (n - 2)))
        }
        (x, false) if x == mask("c") => {
            let t = 2 + 2 * (n - 1) * (2 * n + 1);
            (diagonal_band(a, b, b), even_f, quadratic_band(t, t, 2 * (2 * n - 1) * (n - 1)), quartic_band(-3 - 4 * n * (n - 2)))
        }
        (x, true) if x == mask("c") => {
            let t = 2 + 2 * (2 * n - 1) * (n + 1);
            (diagonal_band(a1, b1, b1), odd_f, quadratic_band(t, t, 2 * n * (2 * n - 1)), quartic_band(-3 - (2 * n - 3) * (2 * n + 1)))
        }
        (x, false) if x == mask("d1") => {
            let t = 2 + 2 * (n - 1) * (2 * n + 1);
            // printed with k1² k1² in place of k1² k2²
            let m2 = (u(Unknown::Alpha) + int(-3 - 4 * n * (n - 2))).times_monomial(2, 0)
                + u(Unknown::Beta).times_monomial(0, 1);
            (diagonal_band(b, a, b), even_f, quadratic_band(t, 2 * (n - 1) * (2 * n - 1), t), m2)
        }
        (x, true) if x == mask("d1") => {
            let t = 2 + 2 * (2 * n - 1) * (n + 1);
            // printed without the γ term
            let m1 = spread(int(t), int(2 * n * (2 * n - 1)) - u(Unknown::Delta), int(t) - u(Unknown::Lambda));
            (diagonal_band(b1, a1, b1), odd_f, m1, quartic_band(-3 - (2 * n - 3) * (2 * n + 1)))
        }
        (x, false) if x == mask("c d1") => {
            let t = 2 + 2 * (n - 1) * (2 * n + 1);
            (diagonal_band(a, a, b), even_f, quadratic_band(6 + 2 * (n - 1) * (2 * n + 3), t, t), quartic_band(-8 - 4 * (n - 2) * (n + 2)))
        }
        (x, true) if x == mask("c d1") => {
            let t = 2 + 2 * (2 * n - 1) * (n + 1);
            (diagonal_band(a1, a1, b1), odd_f, quadratic_band(6 + 2 * (2 * n - 1) * (n + 2), t, t), quartic_band(-8 - (2 * n - 3) * (2 * n + 3)))
        }
        (x, false) if x == mask("d1 d2") => {
            let t = 2 + 2 * (n - 1) * (2 * n + 1);
            (diagonal_band(b, a, a), even_f, quadratic_band(t, t, 6 + 2 * (n - 1) * (2 * n - 3)), quartic_band(-8 - 4 * n * (n - 2)))
        }
        (x, true) if x == mask("d1 d2") => {
            let t = 2 + 2 * (n + 1) * (2 * n - 1);
            (diagonal_band(b1, a1, a1), odd_f, quadratic_band(t, t, 6 + 2 * (n + 2) * (2 * n - 1)), quartic_band(-8 + (2 * n - 3) * (2 * n + 3)))
        }
        (x, false) if x == mask("c d1 d2") => {
            let t = 6 + 2 * (n - 1) * (2 * n + 3);
            (diagonal_band(a, a, a), even_f, quadratic_band(t, t, t), quartic_band(-15 - 4 * (n - 2) * (n + 2)))
        }
        (x, true) if x == mask("c d1 d2") => {
            let t = 6 + 2 * (2 * n - 1) * (n + 2);
            (diagonal_band(a1, a1, a1), odd_f, quadratic_band(t, t, t), quartic_band(-15 - (2 * n - 3) * (2 * n + 5)))
        }
        _ => return None,
    };
    let (d, f, m1, m2) = form;
    Some(BandForm { d, f: int(f), m1, m2 })
}

/// A tabulated entry that disagrees with the operator, and the form used instead.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Misprint {
    pub kind: AnsatzKind,
    pub entry: BandEntry,
    pub printed: &'static str,
    pub resolved: &'static str,
}

fn known_misprints() -> Vec<Misprint> {
    let c = |names: &str, odd: bool| AnsatzKind { prefactor: mask(names), odd };
    vec![
        Misprint {
            kind: c("d1", false),
            entry: BandEntry::M2,
            printed: "(α-3-4n(n-2)) k1²k1² + β k2²",
            resolved: "(α-3-4n(n-2)) k1²k2² + β k2²",
        },
        Misprint {
            kind: c("d1", true),
            entry: BandEntry::M1,
            printed: "(2+2(2n-1)(n+1)) k1² + (2n(2n-1)-δ) k2² + (2+2(2n-1)(n+1)-λ) k1²k2²",
            resolved: "(2+2(2n-1)(n+1)-γ) k1² + (2n(2n-1)-δ) k2² + (2+2(2n-1)(n+1)-λ) k1²k2²",
        },
        Misprint {
            kind: c("c d1", false),
            entry: BandEntry::M2,
            printed: "(α-8-4(n-2)(n+2)) k1²k2² + β k2²",
            resolved: "(α-4n(n-1)) k1²k2² + β k2²",
        },
        Misprint {
            kind: c("d1 d2", false),
            entry: BandEntry::M1,
            printed: "(2+2(n-1)(2n+1)-γ) k1² + (2+2(n-1)(2n+1)-δ) k2² + (6+2(n-1)(2n-3)-λ) k1²k2²",
            resolved: "(2+2(n-1)(2n+1)-γ) k1² + (2+2(n-1)(2n+1)-δ) k2² + (2n(2n+1)-λ) k1²k2²",
        },
        Misprint {
            kind: c("d1 d2", false),
            entry: BandEntry::M2,
            printed: "(α-8-4n(n-2)) k1²k2² + β k2²",
            resolved: "(α-4n(n-1)) k1²k2² + β k2²",
        },
        Misprint {
            kind: c("d1 d2", true),
            entry: BandEntry::M2,
            printed: "(α-8+(2n-3)(2n+3)) k1²k2² + β k2²",
            resolved: "(α-8-(2n-3)(2n+3)) k1²k2² + β k2²",
        },
    ]
}

/// The resolved transcription of a misprinted entry.
fn corrected_entry(kind: AnsatzKind, entry: BandEntry, n: i64) -> Option<LinForm> {
    let t_odd = 2 + 2 * (2 * n - 1) * (n + 1);
    let t_even = 2 + 2 * (n - 1) * (2 * n + 1);
    match (kind.prefactor.to_string().as_str(), kind.odd, entry) {
        ("d1", false, BandEntry::M2) => Some(quartic_band(-3 - 4 * n * (n - 2))),
        ("d1", true, BandEntry::M1) => Some(quadratic_band(t_odd, 2 * n * (2 * n - 1), t_odd)),
        ("c·d1", false, BandEntry::M2) | ("d1·d2", false, BandEntry::M2) => Some(quartic_band(-4 * n * (n - 1))),
        ("d1·d2", false, BandEntry::M1) => Some(quadratic_band(t_even, t_even, 2 * n * (2 * n + 1))),
        ("d1·d2", true, BandEntry::M2) => Some(quartic_band(-8 - (2 * n - 3) * (2 * n + 3))),
        _ => None,
    }
}

/// The band entries in use: tabulated forms with misprints corrected, or the
/// generated forms for untabulated kinds.
pub fn band_form(kind: AnsatzKind, n: i64) -> BandForm {
    let Some(mut form) = printed_band_form(kind, n) else {
        return derive_band_form(kind, n);
    };
    for entry in BandEntry::ALL {
        if let Some(fixed) = corrected_entry(kind, entry, n) {
            match entry {
                BandEntry::D => form.d = fixed,
                BandEntry::F => form.f = fixed,
                BandEntry::M1 => form.m1 = fixed,
                BandEntry::M2 => form.m2 = fixed,
            }
        }
    }
    form
}

pub fn band_row(kind: AnsatzKind, n: i64, p: &ParamVector, energy: f64, m: &ModulusPair) -> BandRow {
    band_form(kind, n).evaluate(p, energy, m)
}

pub fn printed_band_row(kind: AnsatzKind, n: i64, p: &ParamVector, energy: f64, m: &ModulusPair) -> Option<BandRow> {
    printed_band_form(kind, n).map(|f| f.evaluate(p, energy, m))
}

/// One disagreement between a tabulated entry and the generated one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditFinding {
    pub kind: AnsatzKind,
    pub entry: BandEntry,
    /// Indices (within the audited range) at which the forms differ.
    pub differing_at: Vec<i64>,
    /// Human-readable printed and resolved forms, if the discrepancy is known.
    pub misprint: Option<Misprint>,
    /// Whether the resolved form agrees with the generated one everywhere.
    pub resolved_matches: bool,
}

/// Compares every tabulated entry with the generated one for `n ∈ 0..=max_n`.
pub fn transcription_audit(max_n: i64) -> Vec<AuditFinding> {
    let known = known_misprints();
    let mut findings = Vec::new();
    for kind in AnsatzKind::printed() {
        for entry in BandEntry::ALL {
            let mut differing_at = Vec::new();
            let mut resolved_matches = true;
            for n in 0..=max_n {
                let derived = derive_band_form(kind, n);
                let printed = printed_band_form(kind, n).expect("tabulated kind");
                if printed.entry(entry) != derived.entry(entry) {
                    differing_at.push(n);
                }
                if band_form(kind, n).entry(entry) != derived.entry(entry) {
                    resolved_matches = false;
                }
            }
            if !differing_at.is_empty() || !resolved_matches {
                let misprint = known.iter().find(|m| m.kind == kind && m.entry == entry).cloned();
                findings.push(AuditFinding { kind, entry, differing_at, misprint, resolved_matches });
            }
        }
    }
    findings
}

/// A terminating series: the eigenfunction is `prefactor · s^ε · (polynomial in s²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSolution {
    pub kind: AnsatzKind,
    pub params: ParamVector,
    pub energy: EnergyCoeffs,
}

/// Result of [`termination_search`] for one kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TerminationReport {
    pub kind: AnsatzKind,
    /// Vanishing columns, by column index.
    pub columns: Vec<(usize, SeriesSolution)>,
    /// Solutions of `M1(μ) = M2(μ) = M2(μ+1) = 0`, by `μ`.
    pub chain: Vec<(usize, SeriesSolution)>,
}

impl TerminationReport {
    pub fn leading_column(&self) -> impl Iterator<Item = &SeriesSolution> {
        self.columns.iter().filter(|(i, _)| *i == 0).map(|(_, s)| s)
    }
}

/// How far [`termination_search`] looks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminationOptions {
    pub bounds: SearchBox,
    /// Columns `0..=max_column` are tested for vanishing.
    pub max_column: usize,
    /// Chain conditions are tested for `μ ∈ 2..=max_mu`.
    pub max_mu: usize,
}

impl Default for TerminationOptions {
    fn default() -> Self {
        Self { bounds: SearchBox::default(), max_column: 4, max_mu: 16 }
    }
}

fn solutions_of(kind: AnsatzKind, forms: &[LinForm], bounds: &SearchBox) -> Vec<SeriesSolution> {
    let outcome = solve_identities(forms);
    integer_points(&outcome, bounds)
        .into_iter()
        .map(|a| {
            let v = |x: Unknown| {
                let q = a[x.index()];
                *q.numer() as f64 / *q.denom() as f64
            };
            SeriesSolution {
                kind,
                params: ParamVector::new(v(Unknown::Alpha), v(Unknown::Beta), v(Unknown::Gamma), v(Unknown::Delta), v(Unknown::Lambda)),
                energy: EnergyCoeffs { e0: v(Unknown::E0), e1: v(Unknown::E1), e2: v(Unknown::E2), e12: v(Unknown::E12) },
            }
        })
        .filter(|s| s.params != ParamVector::default())
        .collect()
}

/// Parameters for which the recurrence of `kind` terminates, solved as
/// identities in `k1², k2²`. The zero potential is excluded.
///
/// Column `j` of the band matrix holds `f(j-1), D(j), M1(j+1), M2(j+2)`;
/// since `f > 0` only the leading column can vanish, which the search
/// confirms rather than assumes. The chain condition needs `M2` to vanish
/// at two consecutive indices, which a single quadratic in `n` cannot do
/// for `n ≥ 2`.
pub fn termination_search(kind: AnsatzKind, options: &TerminationOptions) -> TerminationReport {
    let mut columns = Vec::new();
    for j in 0..=options.max_column {
        let j = j as i64;
        let mut forms = vec![band_form(kind, j).d, band_form(kind, j + 1).m1, band_form(kind, j + 2).m2];
        if j > 0 {
            forms.push(band_form(kind, j - 1).f);
        }
        columns.extend(solutions_of(kind, &forms, &options.bounds).into_iter().map(|s| (j as usize, s)));
    }
    let mut chain = Vec::new();
    for mu in 2..=options.max_mu {
        let mu_i = mu as i64;
        let forms = [band_form(kind, mu_i).m1, band_form(kind, mu_i).m2, band_form(kind, mu_i + 1).m2];
        // the energy never enters these conditions; pin it so the solution set is finite
        let pinned: Vec<LinForm> = forms
            .into_iter()
            .chain([Unknown::E0, Unknown::E1, Unknown::E2, Unknown::E12].map(LinForm::unknown))
            .collect();
        chain.extend(solutions_of(kind, &pinned, &options.bounds).into_iter().map(|s| (mu, s)));
    }
    TerminationReport { kind, columns, chain }
}

/// First `count` coefficients `a_0 = 1, a_1, …` of the series, by forward recurrence.
pub fn series_coefficients(kind: AnsatzKind, p: &ParamVector, energy: f64, m: &ModulusPair, count: usize) -> Vec<f64> {
    let mut a: Vec<f64> = Vec::with_capacity(count);
    if count == 0 {
        return a;
    }
    a.push(1.0);
    let mut n = 0;
    while a.len() < count {
        let row = band_row(kind, n as i64, p, energy, m);
        let at = |i: isize| if i >= 0 { a[i as usize] } else { 0.0 };
        let ni = n as isize;
        let next = -(row.d * at(ni) + row.m1 * at(ni - 1) + row.m2 * at(ni - 2)) / row.f;
        a.push(next);
        n += 1;
    }
    a
}

/// `w(z) · Σ a_n s(z)^{2n+ε}`.
pub fn evaluate_series(kind: AnsatzKind, coefficients: &[f64], z: f64, m: &ModulusPair) -> crate::Result<f64> {
    let point = eval_all(z, m)?;
    let s2 = point.s * point.s;
    let sum = coefficients.iter().rev().fold(0.0, |acc, a| acc * s2 + a);
    let lead = if kind.odd { point.s } else { 1.0 };
    Ok(kind.prefactor.value(&point) * lead * sum)
}

/// Estimate of the radius of convergence in `s²`, from the last ratio of
/// nonzero coefficients; `None` if the tail vanishes (a polynomial).
pub fn radius_estimate(coefficients: &[f64]) -> Option<f64> {
    let tail: Vec<f64> = coefficients.iter().rev().take(2).copied().collect();
    match tail[..] {
        [last, before] if last != 0.0 && before != 0.0 => Some((before / last).abs()),
        _ => None,
    }
}
