//! Exact affine forms over polynomials in `k1²`, `k2²`.
//!
//! Every recurrence entry this crate manipulates is, after clearing the
//! common Ince denominator, a polynomial in `k1²` and `k2²` whose
//! coefficients are affine in the unknowns `(α, β, γ, δ, λ)` and in the
//! energy coefficients of the ansatz `E = e0 + e1 k1² + e2 k2² + e12 k1² k2²`.
//! Requiring an entry to vanish for all moduli means every monomial
//! coefficient vanishes, which is a linear system over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, RangeInclusive, Sub};

use num_rational::Ratio;

pub type Rational = Ratio<i64>;

/// Unknowns of the vanishing conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unknown {
    Alpha,
    Beta,
    Gamma,
    Delta,
    Lambda,
    E0,
    E1,
    E2,
    E12,
}

impl Unknown {
    pub const ALL: [Unknown; 9] = [
        Unknown::Alpha,
        Unknown::Beta,
        Unknown::Gamma,
        Unknown::Delta,
        Unknown::Lambda,
        Unknown::E0,
        Unknown::E1,
        Unknown::E2,
        Unknown::E12,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

pub const NUM_UNKNOWNS: usize = 9;

/// A value for every unknown.
pub type Assignment = [Rational; NUM_UNKNOWNS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Term {
    k1: u8,
    k2: u8,
    // None is the constant slot
    slot: Option<Unknown>,
}

/// `Σ_{i,j} k1^{2i} k2^{2j} (c_ij + Σ_u a_iju · u)` with rational coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinForm {
    terms: BTreeMap<Term, Rational>,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(n)
}

impl LinForm {
    pub fn zero() -> Self {
        Self::default()
    }

    fn single(k1: u8, k2: u8, slot: Option<Unknown>, coeff: Rational) -> Self {
        let mut form = Self::zero();
        form.accumulate(Term { k1, k2, slot }, coeff);
        form
    }

    pub fn constant(value: Rational) -> Self {
        Self::single(0, 0, None, value)
    }

    pub fn int(value: i64) -> Self {
        Self::constant(rat(value))
    }

    pub fn unknown(u: Unknown) -> Self {
        Self::single(0, 0, Some(u), rat(1))
    }

    /// `(k1²)^i (k2²)^j`.
    pub fn monomial(i: u8, j: u8) -> Self {
        Self::single(i, j, None, rat(1))
    }

    pub fn k1sq() -> Self {
        Self::monomial(1, 0)
    }

    pub fn k2sq() -> Self {
        Self::monomial(0, 1)
    }

    pub fn k1k2sq() -> Self {
        Self::monomial(1, 1)
    }

    /// The energy ansatz `e0 + e1 k1² + e2 k2² + e12 k1² k2²`.
    pub fn energy() -> Self {
        Self::unknown(Unknown::E0)
            + Self::unknown(Unknown::E1).times_monomial(1, 0)
            + Self::unknown(Unknown::E2).times_monomial(0, 1)
            + Self::unknown(Unknown::E12).times_monomial(1, 1)
    }

    fn accumulate(&mut self, term: Term, coeff: Rational) {
        if coeff == rat(0) {
            return;
        }
        let entry = self.terms.entry(term).or_insert_with(|| rat(0));
        *entry += coeff;
        if *entry == rat(0) {
            self.terms.remove(&term);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no unknown appears.
    pub fn is_known(&self) -> bool {
        self.terms.keys().all(|t| t.slot.is_none())
    }

    pub fn mentions(&self, u: Unknown) -> bool {
        self.terms.keys().any(|t| t.slot == Some(u))
    }

    pub fn scale(&self, factor: Rational) -> Self {
        let mut out = Self::zero();
        for (term, coeff) in &self.terms {
            out.accumulate(*term, *coeff * factor);
        }
        out
    }

    pub fn times_monomial(&self, i: u8, j: u8) -> Self {
        let mut out = Self::zero();
        for (term, coeff) in &self.terms {
            out.accumulate(Term { k1: term.k1 + i, k2: term.k2 + j, slot: term.slot }, *coeff);
        }
        out
    }

    /// Product with a form that has no unknowns (the result stays affine).
    ///
    /// # Panics
    /// If both factors mention unknowns.
    pub fn times(&self, other: &LinForm) -> Self {
        let (known, general) = if other.is_known() {
            (other, self)
        } else {
            assert!(self.is_known(), "product of two forms with unknowns is not affine");
            (self, other)
        };
        let mut out = Self::zero();
        for (kt, kc) in &known.terms {
            for (gt, gc) in &general.terms {
                out.accumulate(Term { k1: kt.k1 + gt.k1, k2: kt.k2 + gt.k2, slot: gt.slot }, *kc * *gc);
            }
        }
        out
    }

    /// Substitutes exact values for every unknown, leaving a polynomial in the moduli.
    pub fn substitute(&self, values: &Assignment) -> Self {
        let mut out = Self::zero();
        for (term, coeff) in &self.terms {
            let factor = term.slot.map_or(rat(1), |u| values[u.index()]);
            out.accumulate(Term { slot: None, ..*term }, *coeff * factor);
        }
        out
    }

    /// Numerical value at given `k1²`, `k2²` and unknowns.
    pub fn eval(&self, k1sq: f64, k2sq: f64, values: &[f64; NUM_UNKNOWNS]) -> f64 {
        self.terms
            .iter()
            .map(|(term, coeff)| {
                let c = *coeff.numer() as f64 / *coeff.denom() as f64;
                let slot = term.slot.map_or(1.0, |u| values[u.index()]);
                c * slot * k1sq.powi(term.k1 as i32) * k2sq.powi(term.k2 as i32)
            })
            .sum()
    }

    /// One linear equation per monomial: `Σ a_u u = −c`.
    fn monomial_equations(&self) -> Vec<([Rational; NUM_UNKNOWNS], Rational)> {
        let mut rows: BTreeMap<(u8, u8), ([Rational; NUM_UNKNOWNS], Rational)> = BTreeMap::new();
        for (term, coeff) in &self.terms {
            let row = rows.entry((term.k1, term.k2)).or_insert(([rat(0); NUM_UNKNOWNS], rat(0)));
            match term.slot {
                Some(u) => row.0[u.index()] += *coeff,
                None => row.1 -= *coeff,
            }
        }
        rows.into_values().collect()
    }
}

impl Add for LinForm {
    type Output = LinForm;
    fn add(mut self, rhs: LinForm) -> LinForm {
        for (term, coeff) in rhs.terms {
            self.accumulate(term, coeff);
        }
        self
    }
}

impl Sub for LinForm {
    type Output = LinForm;
    fn sub(self, rhs: LinForm) -> LinForm {
        self + (-rhs)
    }
}

impl Neg for LinForm {
    type Output = LinForm;
    fn neg(self) -> LinForm {
        self.scale(rat(-1))
    }
}

impl Mul<Rational> for LinForm {
    type Output = LinForm;
    fn mul(self, rhs: Rational) -> LinForm {
        self.scale(rhs)
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (term, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({coeff})")?;
            if let Some(u) = term.slot {
                write!(f, "·{u:?}")?;
            }
            if term.k1 > 0 {
                write!(f, "·k1^{}", 2 * term.k1)?;
            }
            if term.k2 > 0 {
                write!(f, "·k2^{}", 2 * term.k2)?;
            }
        }
        Ok(())
    }
}

/// Algebra shared by numeric (`f64`) and exact ([`LinForm`]) matrix entries.
pub trait EntryAlgebra: Clone + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    fn zero() -> Self;
    fn scaled(&self, factor: Rational) -> Self;
}

impl EntryAlgebra for f64 {
    fn zero() -> Self {
        0.0
    }
    fn scaled(&self, factor: Rational) -> Self {
        self * (*factor.numer() as f64 / *factor.denom() as f64)
    }
}

impl EntryAlgebra for LinForm {
    fn zero() -> Self {
        LinForm::zero()
    }
    fn scaled(&self, factor: Rational) -> Self {
        self.scale(factor)
    }
}

/// Solution set of a linear system: empty, or `particular + span(directions)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Inconsistent,
    Affine { particular: Assignment, free: Vec<(Unknown, Assignment)> },
}

/// Solves "every form vanishes identically in `k1²`, `k2²`".
pub fn solve_identities(forms: &[LinForm]) -> SolveOutcome {
    let mut rows: Vec<([Rational; NUM_UNKNOWNS], Rational)> =
        forms.iter().flat_map(LinForm::monomial_equations).collect();

    // reduced row echelon form
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..NUM_UNKNOWNS {
        let Some(found) = (rank..rows.len()).find(|&r| rows[r].0[col] != rat(0)) else {
            continue;
        };
        rows.swap(rank, found);
        let lead = rows[rank].0[col];
        for v in rows[rank].0.iter_mut() {
            *v /= lead;
        }
        rows[rank].1 /= lead;
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.0[col] != rat(0) {
                let factor = row.0[col];
                for c in 0..NUM_UNKNOWNS {
                    row.0[c] -= factor * pivot_row.0[c];
                }
                row.1 -= factor * pivot_row.1;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|row| row.1 != rat(0)) {
        return SolveOutcome::Inconsistent;
    }

    let mut particular = [rat(0); NUM_UNKNOWNS];
    for (r, &col) in pivots.iter().enumerate() {
        particular[col] = rows[r].1;
    }
    let free = (0..NUM_UNKNOWNS)
        .filter(|c| !pivots.contains(c))
        .map(|c| {
            let mut direction = [rat(0); NUM_UNKNOWNS];
            direction[c] = rat(1);
            for (r, &col) in pivots.iter().enumerate() {
                direction[col] = -rows[r].0[c];
            }
            (Unknown::ALL[c], direction)
        })
        .collect();
    SolveOutcome::Affine { particular, free }
}

/// Integer ranges searched for the potential parameters.
///
/// `α, γ, δ, λ` must come out as integers inside their ranges. `β` is real
/// and normally fixed by the conditions; its range is only used when the
/// conditions leave it undetermined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBox {
    pub alpha: RangeInclusive<i64>,
    pub beta: RangeInclusive<i64>,
    pub gamma: RangeInclusive<i64>,
    pub delta: RangeInclusive<i64>,
    pub lambda: RangeInclusive<i64>,
}

impl Default for SearchBox {
    fn default() -> Self {
        Self { alpha: 0..=30, beta: -30..=30, gamma: 0..=30, delta: 0..=30, lambda: 0..=30 }
    }
}

impl SearchBox {
    fn range(&self, u: Unknown) -> Option<&RangeInclusive<i64>> {
        match u {
            Unknown::Alpha => Some(&self.alpha),
            Unknown::Beta => Some(&self.beta),
            Unknown::Gamma => Some(&self.gamma),
            Unknown::Delta => Some(&self.delta),
            Unknown::Lambda => Some(&self.lambda),
            _ => None,
        }
    }

    fn admits(&self, values: &Assignment) -> bool {
        [Unknown::Alpha, Unknown::Gamma, Unknown::Delta, Unknown::Lambda].iter().all(|&u| {
            let v = values[u.index()];
            v.is_integer() && self.range(u).is_some_and(|r| r.contains(v.numer()))
        })
    }

    pub fn is_empty(&self) -> bool {
        [&self.alpha, &self.gamma, &self.delta, &self.lambda].iter().any(|r| r.is_empty())
    }
}

/// Points of the solution set whose parameters fall in the box.
///
/// Free directions along a potential parameter are enumerated over its range;
/// a free energy coefficient leaves the eigenvalue undetermined and such sets
/// yield nothing.
pub fn integer_points(outcome: &SolveOutcome, bounds: &SearchBox) -> Vec<Assignment> {
    let SolveOutcome::Affine { particular, free } = outcome else {
        return Vec::new();
    };
    if bounds.is_empty() || free.iter().any(|(u, _)| bounds.range(*u).is_none()) {
        return Vec::new();
    }
    let mut points = vec![*particular];
    for (u, direction) in free {
        let range = bounds.range(*u).expect("checked above").clone();
        points = points
            .into_iter()
            .flat_map(|p| {
                range.clone().map(move |v| {
                    let mut q = p;
                    for (qi, di) in q.iter_mut().zip(direction.iter()) {
                        *qi += *di * rat(v);
                    }
                    q
                })
            })
            .collect();
    }
    points.retain(|p| bounds.admits(p));
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn arithmetic_and_display() {
        let a = LinForm::unknown(Unknown::Gamma).times_monomial(1, 0) + LinForm::int(2);
        let b = a.clone() - a.clone();
        assert!(b.is_zero());
        assert_eq!(b.to_string(), "0");
        let prod = LinForm::k1sq().times(&(LinForm::int(3) - LinForm::unknown(Unknown::Alpha)));
        assert!(prod.mentions(Unknown::Alpha));
        assert_eq!(prod.eval(0.5, 0.0, &[2.0; NUM_UNKNOWNS]), 0.5);
    }

    #[test]
    #[should_panic]
    fn nonaffine_product_panics() {
        let _ = LinForm::unknown(Unknown::Alpha).times(&LinForm::unknown(Unknown::Beta));
    }

    #[test]
    fn solves_monomial_matching() {
        // (2 - γ) k1² + (2 - δ + β) k2² + (α - λ - 2) k1²k2² ≡ 0 and (8 - α) k1²k2² - β k2² ≡ 0
        use Unknown::*;
        let u = LinForm::unknown;
        let first = (LinForm::int(2) - u(Gamma)).times_monomial(1, 0)
            + (LinForm::int(2) - u(Delta) + u(Beta)).times_monomial(0, 1)
            + (u(Alpha) - u(Lambda) - LinForm::int(2)).times_monomial(1, 1);
        let second = (LinForm::int(8) - u(Alpha)).times_monomial(1, 1) - u(Beta).times_monomial(0, 1);
        let outcome = solve_identities(&[first, second]);
        let SolveOutcome::Affine { particular, free } = &outcome else { panic!("inconsistent") };
        assert_eq!(particular[Alpha.index()], r(8, 1));
        assert_eq!(particular[Beta.index()], r(0, 1));
        assert_eq!(particular[Gamma.index()], r(2, 1));
        assert_eq!(particular[Delta.index()], r(2, 1));
        assert_eq!(particular[Lambda.index()], r(6, 1));
        // energies never appear, so they stay free and no admissible point results
        assert_eq!(free.len(), 4);
        assert!(integer_points(&outcome, &SearchBox::default()).is_empty());
    }

    #[test]
    fn inconsistent_system() {
        let form = LinForm::int(1) + LinForm::unknown(Unknown::Alpha).times_monomial(1, 1);
        let other = LinForm::int(1) - LinForm::unknown(Unknown::Alpha);
        assert_eq!(solve_identities(&[form, other]), SolveOutcome::Inconsistent);
    }

    #[test]
    fn free_parameter_is_enumerated_over_box() {
        use Unknown::*;
        let forms: Vec<LinForm> = [Beta, Delta, Lambda, E0, E1, E2, E12]
            .iter()
            .map(|&u| LinForm::unknown(u))
            .chain([LinForm::unknown(Alpha) - LinForm::unknown(Gamma) - LinForm::int(1)])
            .collect();
        let outcome = solve_identities(&forms);
        let bounds = SearchBox { alpha: 0..=5, gamma: 0..=3, ..SearchBox::default() };
        let points = integer_points(&outcome, &bounds);
        // α = γ + 1 with γ ∈ 0..=3 and α ≤ 5
        assert_eq!(points.len(), 4);
        assert!(points.iter().all(|p| p[Alpha.index()] == p[Gamma.index()] + r(1, 1)));
    }

    #[test]
    fn numeric_algebra_scales() {
        assert_eq!(<f64 as EntryAlgebra>::scaled(&3.0, r(1, 2)), 1.5);
        assert!(LinForm::zero().scaled(r(3, 1)).is_zero());
    }
}
