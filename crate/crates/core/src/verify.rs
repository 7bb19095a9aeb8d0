//! Black-box checks for Lie algebra automorphisms.
//!
//! The verifiers take a map as a closure together with sample elements,
//! and either pass or return the first counterexample they find. They never
//! error; a failure is a result.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::index::MultiIndex;
use crate::symbol::PhaseSymbol;
use crate::weyl::DiffOp;
use crate::{ratio, Rational};

/// Linear structure plus a Lie bracket, with coordinates for rank tests.
pub trait LieElement: Clone + PartialEq + fmt::Display {
    fn bracket(&self, other: &Self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, c: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    /// Coordinates in the monomial basis `x^β ∂^α` (or `x^β ξ^α`).
    fn coordinates(&self) -> Vec<((MultiIndex, MultiIndex), Rational)>;
}

impl LieElement for DiffOp {
    fn bracket(&self, other: &Self) -> Self {
        self.commutator(other).expect("sample dimensions agree")
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, c: &Rational) -> Self {
        self.scale(c)
    }
    fn is_zero(&self) -> bool {
        DiffOp::is_zero(self)
    }
    fn coordinates(&self) -> Vec<((MultiIndex, MultiIndex), Rational)> {
        self.terms()
            .flat_map(|(a, p)| {
                p.terms()
                    .map(move |(b, c)| ((a.clone(), b.clone()), c.clone()))
            })
            .collect()
    }
}

impl LieElement for PhaseSymbol {
    fn bracket(&self, other: &Self) -> Self {
        self.poisson_bracket(other).expect("sample dimensions agree")
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, c: &Rational) -> Self {
        self.scale(c)
    }
    fn is_zero(&self) -> bool {
        PhaseSymbol::is_zero(self)
    }
    fn coordinates(&self) -> Vec<((MultiIndex, MultiIndex), Rational)> {
        self.terms()
            .flat_map(|(a, p)| {
                p.terms()
                    .map(move |(b, c)| ((a.clone(), b.clone()), c.clone()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    Linearity,
    Bracket,
    Injectivity,
    OrderBound,
    LeadingPart,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Linearity => "linearity",
            Property::Bracket => "bracket",
            Property::Injectivity => "injectivity",
            Property::OrderBound => "order-bound",
            Property::LeadingPart => "leading-part",
        })
    }
}

/// A failed check, with every input in canonical text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub property: Property,
    pub inputs: Vec<String>,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed on [", self.property)?;
        for (i, s) in self.inputs.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            f.write_str(s)?;
        }
        write!(f, "]: expected {}, got {}", self.expected, self.actual)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    /// Number of individual identities checked before stopping.
    pub checks: usize,
    pub failure: Option<Counterexample>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Number of sample pairs whose span is used for the injectivity check.
pub const INJECTIVITY_WINDOW: usize = 12;

/// Checks that `phi` is linear, preserves brackets on every sample pair,
/// and is injective on the span of the first [`INJECTIVITY_WINDOW`] pairs.
pub fn verify_lie_automorphism<T, F>(phi: F, samples: &[(T, T)]) -> VerificationReport
where
    T: LieElement,
    F: Fn(&T) -> T,
{
    let mut checks = 0;
    for (k, (a, b)) in samples.iter().enumerate() {
        let (pa, pb) = (phi(a), phi(b));

        // Scalars cycle through ±1/2, ±2, ±3/5, … so no check uses c = 0.
        let c = ratio(
            if k % 2 == 0 { 1 } else { -1 } * (k as i64 % 5 + 1),
            (k as i64 % 3) + 1,
        );
        let lhs = phi(&a.plus(&b.times(&c)));
        let rhs = pa.plus(&pb.times(&c));
        checks += 1;
        if lhs != rhs {
            return fail(
                checks,
                Property::Linearity,
                alloc::vec![a.to_string(), b.to_string(), c.to_string()],
                rhs.to_string(),
                lhs.to_string(),
            );
        }

        let lhs = phi(&a.bracket(b));
        let rhs = pa.bracket(&pb);
        checks += 1;
        if lhs != rhs {
            return fail(
                checks,
                Property::Bracket,
                alloc::vec![a.to_string(), b.to_string()],
                rhs.to_string(),
                lhs.to_string(),
            );
        }
    }

    let window: Vec<&T> = samples
        .iter()
        .take(INJECTIVITY_WINDOW)
        .flat_map(|(a, b)| [a, b])
        .collect();
    let images: Vec<T> = window.iter().map(|x| phi(x)).collect();
    let before = rank(window.iter().copied());
    let after = rank(images.iter());
    checks += 1;
    if before != after {
        return fail(
            checks,
            Property::Injectivity,
            window.iter().map(|x| x.to_string()).collect(),
            alloc::format!("rank {before}"),
            alloc::format!("rank {after}"),
        );
    }
    VerificationReport {
        checks,
        failure: None,
    }
}

/// Checks `ord Φ(D) ≤ i` and `ord(Φ(D) − κ^{1−i} L(D)) ≤ i − 1` for every
/// sample `D` of order `i`, where `L` is the order-preserving `leading` map
/// (the identity for reduced automorphisms, `φ_*` for the full family).
pub fn verify_filtration_respect<F, L>(
    phi: F,
    kappa: &Rational,
    leading: L,
    samples: &[DiffOp],
) -> VerificationReport
where
    F: Fn(&DiffOp) -> DiffOp,
    L: Fn(&DiffOp) -> DiffOp,
{
    let mut checks = 0;
    if kappa.is_zero() {
        return fail(
            0,
            Property::LeadingPart,
            alloc::vec![kappa.to_string()],
            "nonzero kappa".into(),
            "0".into(),
        );
    }
    for d in samples {
        let Some(i) = d.order().value() else {
            continue;
        };
        let image = phi(d);
        checks += 1;
        if !image.order().at_most(i64::from(i)) {
            return fail(
                checks,
                Property::OrderBound,
                alloc::vec![d.to_string()],
                alloc::format!("order <= {i}"),
                alloc::format!("order {} ({image})", image.order()),
            );
        }
        let factor = kappa.pow(1 - i as i32);
        let expected = leading(d).scale(&factor);
        let remainder = &image - &expected;
        checks += 1;
        if !remainder.order().at_most(i64::from(i) - 1) {
            return fail(
                checks,
                Property::LeadingPart,
                alloc::vec![d.to_string(), kappa.to_string()],
                alloc::format!("{expected} + lower order"),
                image.to_string(),
            );
        }
    }
    VerificationReport {
        checks,
        failure: None,
    }
}

fn fail(
    checks: usize,
    property: Property,
    inputs: Vec<String>,
    expected: String,
    actual: String,
) -> VerificationReport {
    VerificationReport {
        checks,
        failure: Some(Counterexample {
            property,
            inputs,
            expected,
            actual,
        }),
    }
}

type Key = (MultiIndex, MultiIndex);

/// Rank over ℚ of the coordinate vectors, by sparse elimination.
pub fn rank<'a, T, I>(elements: I) -> usize
where
    T: LieElement + 'a,
    I: IntoIterator<Item = &'a T>,
{
    // Reduced rows keyed by their pivot (largest key).
    let mut basis: BTreeMap<Key, BTreeMap<Key, Rational>> = BTreeMap::new();
    for e in elements {
        let mut row: BTreeMap<Key, Rational> = e.coordinates().into_iter().collect();
        while let Some((pivot, lead)) = row.iter().next_back().map(|(k, v)| (k.clone(), v.clone())) {
            match basis.get(&pivot) {
                Some(b) => {
                    let factor = lead / &b[&pivot];
                    for (k, v) in b {
                        let entry = row.entry(k.clone()).or_insert_with(Rational::zero);
                        *entry -= v * &factor;
                        if entry.is_zero() {
                            row.remove(k);
                        }
                    }
                }
                None => {
                    basis.insert(pivot, row);
                    break;
                }
            }
        }
    }
    basis.len()
}
