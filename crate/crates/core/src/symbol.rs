//! Polynomial functions on `T*ℝⁿ`, graded by degree in the fiber
//! variables `ξ`.
//!
//! A [`PhaseSymbol`] is `Σ_α a_α(x) ξ^α`. The grade-`i` part collects the
//! terms with `|α| = i`. The canonical Poisson bracket is
//! `{P, Q} = Σ_i (∂_{ξ_i}P ∂_{x_i}Q − ∂_{x_i}P ∂_{ξ_i}Q)`.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use crate::affine::AffineMap;
use crate::error::{AlgebraError, Result};
use crate::fmt_util::{push_monomial, write_sum};
use crate::form::{ClosedOneForm, OneForm};
use crate::index::MultiIndex;
use crate::int;
use crate::poly::Polynomial;
use crate::weyl::DiffOp;
use crate::Rational;

fn concat(base: &MultiIndex, fiber: &MultiIndex) -> MultiIndex {
    MultiIndex::from_exponents(base.exponents().iter().chain(fiber.exponents()).copied().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseSymbol {
    dim: usize,
    terms: BTreeMap<MultiIndex, Polynomial>,
}

impl PhaseSymbol {
    pub fn zero(dim: usize) -> Self {
        PhaseSymbol {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::function(Polynomial::one(dim))
    }

    /// A grade-0 symbol.
    pub fn function(f: Polynomial) -> Self {
        Self::monomial(MultiIndex::zero(f.dim()), f)
    }

    /// The fiber coordinate `ξ_{i+1}` (0-based `i`).
    pub fn fiber(dim: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, i), Polynomial::one(dim))
    }

    /// `a(x) ξ^α`.
    pub fn monomial(alpha: MultiIndex, a: Polynomial) -> Self {
        assert_eq!(alpha.dim(), a.dim());
        let mut s = PhaseSymbol::zero(a.dim());
        s.add_term(alpha, a);
        s
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Polynomial)>,
    {
        let mut s = PhaseSymbol::zero(dim);
        for (alpha, a) in terms {
            a.check_dim(dim)?;
            if alpha.dim() != dim {
                return Err(AlgebraError::DimensionMismatch {
                    left: dim,
                    right: alpha.dim(),
                });
            }
            s.add_term(alpha, a);
        }
        Ok(s)
    }

    fn add_term(&mut self, alpha: MultiIndex, a: Polynomial) {
        if a.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            btree_map::Entry::Vacant(v) => {
                v.insert(a);
            }
            btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&a);
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Polynomial)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Polynomial {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.dim))
    }

    /// Highest fiber degree present; `None` for zero.
    pub fn top_grade(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::total).max()
    }

    /// The component in `S_i`.
    pub fn grade(&self, i: u32) -> PhaseSymbol {
        PhaseSymbol {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.total() == i)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut grades = self.terms.keys().map(MultiIndex::total);
        match grades.next() {
            None => true,
            Some(g) => grades.all(|h| h == g),
        }
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(AlgebraError::DimensionMismatch {
                left: self.dim,
                right: other,
            })
        }
    }

    pub fn checked_add(&self, other: &PhaseSymbol) -> Result<PhaseSymbol> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &PhaseSymbol) -> Result<PhaseSymbol> {
        self.checked_add(&-other)
    }

    /// Commutative product.
    pub fn checked_mul(&self, other: &PhaseSymbol) -> Result<PhaseSymbol> {
        self.check_dim(other.dim)?;
        if let Some(p) = self.integer_mul(other) {
            return Ok(p);
        }
        Ok(PhaseSymbol::from_joint(self.dim, &(&self.joint() * &other.joint())))
    }

    fn integer_mul(&self, other: &PhaseSymbol) -> Option<PhaseSymbol> {
        let (dp, p) = self.integer_joint()?;
        let (dq, q) = other.integer_joint()?;
        Some(PhaseSymbol::from_integer_joint(self.dim, int::mul(&p, &q)?, dp.checked_mul(dq)?))
    }

    /// The joint polynomial as integers over a common denominator.
    fn integer_joint(&self) -> Option<(i128, int::IntPoly)> {
        int::from_poly(&self.joint())
    }

    fn from_integer_joint(n: usize, nums: int::IntPoly, den: i128) -> PhaseSymbol {
        let mut grouped: BTreeMap<int::Key, Vec<(MultiIndex, Rational)>> = BTreeMap::new();
        for (k, v) in nums.into_iter().filter(|(_, v)| *v != 0) {
            let (base, fiber) = int::split(k, n);
            grouped
                .entry(fiber)
                .or_default()
                .push((int::unpack(base, n), int::rational(v, den)));
        }
        PhaseSymbol {
            dim: n,
            terms: grouped
                .into_iter()
                .map(|(fiber, cs)| (int::unpack_range(fiber, n, n), Polynomial::from_distinct(n, cs)))
                .collect(),
        }
    }

    /// The same polynomial in the `2n` variables `(x, ξ)`.
    fn joint(&self) -> Polynomial {
        Polynomial::from_terms(
            2 * self.dim,
            self.terms.iter().flat_map(|(alpha, a)| {
                a.terms().map(move |(beta, c)| (concat(beta, alpha), c.clone()))
            }),
        )
    }

    fn from_joint(n: usize, p: &Polynomial) -> PhaseSymbol {
        let mut grouped: BTreeMap<MultiIndex, Vec<(MultiIndex, Rational)>> = BTreeMap::new();
        for (idx, c) in p.terms() {
            let (base, fiber) = idx.exponents().split_at(n);
            grouped
                .entry(MultiIndex::from_exponents(fiber.to_vec()))
                .or_default()
                .push((MultiIndex::from_exponents(base.to_vec()), c.clone()));
        }
        PhaseSymbol {
            dim: n,
            terms: grouped
                .into_iter()
                .map(|(alpha, cs)| (alpha, Polynomial::from_terms(n, cs)))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    /// Poisson bracket in machine integers; `None` on overflow or when
    /// `2n` variables do not pack.
    fn integer_poisson(&self, other: &PhaseSymbol) -> Option<PhaseSymbol> {
        let n = self.dim;
        let (dp, p) = self.integer_joint()?;
        let (dq, q) = other.integer_joint()?;
        let mut acc = int::IntPoly::new();
        for i in 0..n {
            let kx = int::pack(&MultiIndex::unit(2 * n, i))?;
            let kxi = int::pack(&MultiIndex::unit(2 * n, n + i))?;
            let lhs = int::mul(&int::derive(&p, kxi, 2 * n)?, &int::derive(&q, kx, 2 * n)?)?;
            let rhs = int::mul(&int::derive(&p, kx, 2 * n)?, &int::derive(&q, kxi, 2 * n)?)?;
            int::add_scaled(&mut acc, &lhs, 1)?;
            int::add_scaled(&mut acc, &rhs, -1)?;
        }
        let den = dp.checked_mul(dq)?;
        Some(PhaseSymbol::from_integer_joint(n, acc, den))
    }

    pub fn scale(&self, c: &Rational) -> PhaseSymbol {
        if c.is_zero() {
            return PhaseSymbol::zero(self.dim);
        }
        self.map_grades(|_| c.clone())
    }

    fn map_grades(&self, factor: impl Fn(u32) -> Rational) -> PhaseSymbol {
        PhaseSymbol {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(a, p)| (a.clone(), p.scale(&factor(a.total()))))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> PhaseSymbol {
        let mut acc = PhaseSymbol::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂P/∂x_{i+1}`.
    pub fn derive_base(&self, i: usize) -> Result<PhaseSymbol> {
        let mut out = PhaseSymbol::zero(self.dim);
        for (a, p) in &self.terms {
            out.add_term(a.clone(), p.partial_derive(i)?);
        }
        Ok(out)
    }

    /// `∂P/∂ξ_{i+1}`.
    pub fn derive_fiber(&self, i: usize) -> Result<PhaseSymbol> {
        if i >= self.dim {
            return Err(AlgebraError::IndexOutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        let mut out = PhaseSymbol::zero(self.dim);
        for (a, p) in &self.terms {
            let e = a.get(i);
            if e > 0 {
                out.add_term(a.with(i, e - 1), p.scale(&Rational::from_integer(e.into())));
            }
        }
        Ok(out)
    }

    /// Canonical Poisson bracket.
    pub fn poisson_bracket(&self, other: &PhaseSymbol) -> Result<PhaseSymbol> {
        self.check_dim(other.dim)?;
        if let Some(b) = self.integer_poisson(other) {
            return Ok(b);
        }
        let mut out = PhaseSymbol::zero(self.dim);
        for i in 0..self.dim {
            let lhs = &self.derive_fiber(i)? * &other.derive_base(i)?;
            let rhs = &self.derive_base(i)? * &other.derive_fiber(i)?;
            out = &(&out + &lhs) - &rhs;
        }
        Ok(out)
    }

    /// The derivation `P ↦ (i−1)P` on `S_i`.
    pub fn degree_derivation(&self) -> PhaseSymbol {
        self.map_grades(|i| Rational::from_integer((i64::from(i) - 1).into()))
    }

    /// `U_κ: P ↦ κ^{1−i} P` on `S_i`.
    pub fn u_kappa(&self, kappa: &Rational) -> Result<PhaseSymbol> {
        if kappa.is_zero() {
            return Err(AlgebraError::ZeroKappa);
        }
        Ok(self.map_grades(|i| kappa.pow(1 - i as i32)))
    }

    /// `c · Σ_α a_α(s(x)) Π_i ℓ_i(x, ξ)^{α_i}`: replaces base coordinates by
    /// the polynomials `base` and fiber coordinates by the symbols `fiber`.
    pub(crate) fn substitute(&self, base: Option<&AffineMap>, fiber: &[PhaseSymbol], c: &Rational) -> Result<PhaseSymbol> {
        let n = self.dim;
        let mut subs: Vec<Polynomial> = match base {
            Some(phi) => phi
                .components()
                .iter()
                .map(|c| PhaseSymbol::function(c.clone()).joint())
                .collect(),
            None => (0..n).map(|i| Polynomial::var(2 * n, i)).collect(),
        };
        subs.extend(fiber.iter().map(PhaseSymbol::joint));
        if let Some(p) = self.integer_substitute(&subs, c) {
            return Ok(p);
        }
        let joint = self.joint().substitute(&subs, 2 * n)?;
        Ok(PhaseSymbol::from_joint(n, &joint).scale(c))
    }

    fn integer_substitute(&self, subs: &[Polynomial], c: &Rational) -> Option<PhaseSymbol> {
        let (dp, nums) = self.integer_joint()?;
        let forms: Vec<(i128, int::IntPoly)> = subs.iter().map(int::from_poly).collect::<Option<_>>()?;
        let (den, mut acc) = int::substitute_over(dp, nums, &forms)?;
        let (p, q) = (c.numer().to_i128()?, c.denom().to_i128()?);
        for (_, v) in acc.iter_mut() {
            *v = v.checked_mul(p)?;
        }
        Some(PhaseSymbol::from_integer_joint(self.dim, acc, den.checked_mul(q)?))
    }

    /// Phase lift of `φ(x) = Ax + b`: the substitution
    /// `(x, ξ) ↦ (φ⁻¹(x), Aᵀξ)`.
    pub fn phase_lift(&self, phi: &AffineMap) -> Result<PhaseSymbol> {
        self.check_dim(phi.dim())?;
        let n = self.dim;
        let a = phi.matrix();
        let fiber: Vec<PhaseSymbol> = (0..n)
            .map(|i| {
                PhaseSymbol::from_terms(
                    n,
                    (0..n).map(|j| {
                        (
                            MultiIndex::unit(n, j),
                            Polynomial::constant(n, a[j][i].clone()),
                        )
                    }),
                )
            })
            .collect::<Result<_>>()?;
        self.substitute(Some(&phi.inverse()), &fiber, &Rational::one())
    }

    /// `ξ_i ↦ ξ_i + ω_i(x)` without checking closedness.
    pub fn translate_fibers(&self, omega: &OneForm) -> Result<PhaseSymbol> {
        self.check_dim(omega.dim())?;
        let fiber: Vec<PhaseSymbol> = omega
            .components()
            .iter()
            .enumerate()
            .map(|(i, w)| &PhaseSymbol::fiber(self.dim, i) + &PhaseSymbol::function(w.clone()))
            .collect();
        self.substitute(None, &fiber, &Rational::one())
    }

    /// Vertical translation by a closed 1-form, a Poisson automorphism.
    pub fn vertical_translation(&self, omega: &ClosedOneForm) -> Result<PhaseSymbol> {
        self.translate_fibers(omega.form())
    }

    /// Replaces `ξ^α` by `∂^α`, coefficients on the left.
    pub fn quantize(&self) -> DiffOp {
        DiffOp::from_terms(self.dim, self.terms.iter().map(|(a, p)| (a.clone(), p.clone())))
            .expect("dimensions agree by construction")
    }

    /// Full normal-ordered symbol `a_α ∂^α ↦ a_α ξ^α`.
    pub fn total_symbol(op: &DiffOp) -> PhaseSymbol {
        PhaseSymbol {
            dim: op.dim(),
            terms: op.terms().map(|(a, p)| (a.clone(), p.clone())).collect(),
        }
    }

    /// Principal symbol `σ(D)`, the top-grade part of the total symbol.
    pub fn principal(op: &DiffOp) -> Result<PhaseSymbol> {
        match op.order().value() {
            None => Err(AlgebraError::ZeroOperator),
            Some(k) => Ok(PhaseSymbol::total_symbol(&op.homogeneous_part(k))),
        }
    }

    /// `σ_i(D)`: `σ(D)` when `i = deg D`, zero when `i > deg D`.
    pub fn principal_of_order(op: &DiffOp, i: i64) -> Result<PhaseSymbol> {
        match op.order().value() {
            None => Ok(PhaseSymbol::zero(op.dim())),
            Some(k) if i > i64::from(k) => Ok(PhaseSymbol::zero(op.dim())),
            Some(k) if i == i64::from(k) => PhaseSymbol::principal(op),
            Some(k) => Err(AlgebraError::OrderBelowDegree {
                requested: i,
                order: k,
            }),
        }
    }
}

impl fmt::Display for PhaseSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(&Rational, String)> = Vec::new();
        for (alpha, a) in self.terms.iter().rev() {
            for (beta, c) in a.terms().rev() {
                let mut m = String::new();
                push_monomial(&mut m, "x", beta);
                push_monomial(&mut m, "xi", alpha);
                parts.push((c, m));
            }
        }
        write_sum(f, parts)
    }
}

impl Add for &PhaseSymbol {
    type Output = PhaseSymbol;
    fn add(self, rhs: &PhaseSymbol) -> PhaseSymbol {
        self.checked_add(rhs).expect("symbol dimensions differ")
    }
}

impl Sub for &PhaseSymbol {
    type Output = PhaseSymbol;
    fn sub(self, rhs: &PhaseSymbol) -> PhaseSymbol {
        self.checked_sub(rhs).expect("symbol dimensions differ")
    }
}

impl Mul for &PhaseSymbol {
    type Output = PhaseSymbol;
    fn mul(self, rhs: &PhaseSymbol) -> PhaseSymbol {
        self.checked_mul(rhs).expect("symbol dimensions differ")
    }
}

impl Neg for &PhaseSymbol {
    type Output = PhaseSymbol;
    fn neg(self) -> PhaseSymbol {
        self.scale(&-Rational::one())
    }
}

impl Neg for PhaseSymbol {
    type Output = PhaseSymbol;
    fn neg(self) -> PhaseSymbol {
        -&self
    }
}
