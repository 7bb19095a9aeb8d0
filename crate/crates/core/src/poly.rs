//! Sparse multivariate polynomials over ℚ.
//!
//! These are the coefficient algebra of every operator and symbol in the
//! crate. The zero polynomial is the empty term map and has no degree.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{AlgebraError, Result};
use crate::fmt_util::{push_monomial, write_sum};
use crate::index::{falling_product, MultiIndex};
use crate::int;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    /// The coordinate function `x_{i+1}` (0-based `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, i), Rational::one())
    }

    pub fn monomial(idx: MultiIndex, c: Rational) -> Self {
        let mut p = Polynomial::zero(idx.dim());
        p.add_term(idx, c);
        p
    }

    /// From nonzero terms with distinct indices.
    pub(crate) fn from_distinct<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        Polynomial {
            dim,
            terms: terms.into_iter().collect(),
        }
    }

    /// Builds a polynomial from possibly repeated or zero terms.
    ///
    /// Panics if an index has the wrong length.
    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Polynomial::zero(dim);
        for (idx, c) in terms {
            assert_eq!(idx.dim(), dim, "multi-index length must equal the dimension");
            p.add_term(idx, c);
        }
        p
    }

    pub(crate) fn add_assign_ref(&mut self, other: &Polynomial) {
        for (i, c) in &other.terms {
            self.add_term(i.clone(), c.clone());
        }
    }

    pub(crate) fn add_term(&mut self, idx: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(MultiIndex::total)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Rational {
        self.terms.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.degree() {
            None => Some(Rational::zero()),
            Some(0) => Some(self.constant_term()),
            Some(_) => None,
        }
    }

    pub(crate) fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(AlgebraError::DimensionMismatch {
                left: self.dim,
                right: other,
            })
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other.dim)?;
        if let Some(p) = self.small_integer_mul(other) {
            return Ok(p);
        }
        let mut out = Polynomial::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        Ok(out)
    }

    /// Product in machine integers; `None` on overflow.
    fn small_integer_mul(&self, other: &Polynomial) -> Option<Polynomial> {
        if self.terms.len() < 2 || other.terms.len() < 2 {
            return None;
        }
        let (da, na) = int::from_poly(self)?;
        let (db, nb) = int::from_poly(other)?;
        Some(int::to_poly(self.dim, int::mul(&na, &nb)?, da.checked_mul(db)?))
    }

    /// Substitution in machine integers over the common denominator
    /// `den(self) · Π den(subs_i)^{max exponent of x_i}`; `None` on overflow.
    fn small_integer_substitute(&self, subs: &[Polynomial], target_dim: usize) -> Option<Polynomial> {
        let (dp, nums) = int::from_poly(self)?;
        let forms: Vec<(i128, int::IntPoly)> = subs.iter().map(int::from_poly).collect::<Option<_>>()?;
        let (den, acc) = int::substitute_over(dp, nums, &forms)?;
        Some(int::to_poly(target_dim, acc, den))
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(i, v)| (i.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂p/∂x_{i+1}` (0-based `i`).
    pub fn partial_derive(&self, i: usize) -> Result<Polynomial> {
        if i >= self.dim {
            return Err(AlgebraError::IndexOutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        Ok(self.derive(&MultiIndex::unit(self.dim, i)))
    }

    /// `∂^α p`. Panics if `alpha` has the wrong length.
    pub fn derive(&self, alpha: &MultiIndex) -> Polynomial {
        assert_eq!(alpha.dim(), self.dim);
        if alpha.is_zero() {
            return self.clone();
        }
        let mut out = Polynomial::zero(self.dim);
        for (beta, c) in &self.terms {
            if let Some(rest) = beta.checked_sub(alpha) {
                let factor = falling_product(beta, alpha);
                out.add_term(rest, c * Rational::from_integer(factor.into()));
            }
        }
        out
    }

    /// Substitutes `x_i ↦ subs[i]`. The result lives in the dimension of
    /// the substituted polynomials.
    pub fn substitute(&self, subs: &[Polynomial], target_dim: usize) -> Result<Polynomial> {
        self.check_dim(subs.len())?;
        for s in subs {
            s.check_dim(target_dim)?;
        }
        if let Some(p) = self.small_integer_substitute(subs, target_dim) {
            return Ok(p);
        }
        let mut powers: Vec<Vec<Polynomial>> =
            subs.iter().map(|s| alloc::vec![Polynomial::one(s.dim), s.clone()]).collect();
        let mut out = Polynomial::zero(target_dim);
        for (idx, c) in &self.terms {
            let mut term = Polynomial::constant(target_dim, c.clone());
            for (i, &e) in idx.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * &subs[i];
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            out.add_assign_ref(&term);
        }
        Ok(out)
    }

    /// Value at a rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        self.check_dim(point.len())?;
        let mut acc = Rational::zero();
        for (idx, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(idx.exponents()) {
                for _ in 0..e {
                    v *= x;
                }
            }
            acc += v;
        }
        Ok(acc)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(
            f,
            self.terms.iter().rev().map(|(idx, c)| {
                let mut m = String::new();
                push_monomial(&mut m, "x", idx);
                (c, m)
            }),
        )
    }
}

// Operator impls panic on a dimension mismatch; use the `checked_*`
// methods where the dimensions are not known to agree.

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial dimensions differ")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial dimensions differ")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial dimensions differ")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
