//! Differential operators with polynomial coefficients.
//!
//! A [`DiffOp`] is stored in normal order, coefficients to the left:
//! `D = Σ_α a_α ∂^α`, acting by `D(f) = Σ_α a_α · ∂^α f`. Every operator has
//! exactly one such representation, so structural equality is operator
//! equality.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{AlgebraError, Result};
use crate::fmt_util::{push_monomial, write_sum};
use crate::index::{binomial_product, MultiIndex};
use crate::int;
use crate::poly::Polynomial;
use crate::Rational;

/// Normal-ordered operator as packed index and integer coefficient
/// numerators over a shared denominator.
type IntOp = BTreeMap<int::Key, int::IntPoly>;

/// Adds `sign · Σ_{α,β} Σ_γ C(α,γ) a_α (∂^γ b_β) ∂^{α+β−γ}` to `out`.
fn integer_leibniz_into(a: &IntOp, b: &IntOp, dim: usize, skip_zero: bool, sign: i128, out: &mut IntOp) -> Option<()> {
    for (ka, pa) in a {
        let alpha = int::unpack(*ka, dim);
        for gamma in alpha.divisors() {
            if skip_zero && gamma.is_zero() {
                continue;
            }
            let kg = int::pack(&gamma)?;
            let weight = i128::from(binomial_product(&alpha, &gamma)).checked_mul(sign)?;
            for (kb, pb) in b {
                let db = int::derive(pb, kg, dim)?;
                if db.is_empty() {
                    continue;
                }
                let product = int::mul(pa, &db)?;
                int::add_scaled(out.entry(ka - kg + kb).or_default(), &product, weight)?;
            }
        }
    }
    out.retain(|_, p| !p.is_empty());
    Some(())
}

/// Order of an operator: the largest `|α|` with `a_α ≠ 0`, or `none` for the
/// zero operator. `none` compares below every finite order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Order(Option<u32>);

impl Order {
    pub const NONE: Order = Order(None);

    pub fn finite(k: u32) -> Self {
        Order(Some(k))
    }

    pub fn value(self) -> Option<u32> {
        self.0
    }

    pub fn is_none(self) -> bool {
        self.0.is_none()
    }

    /// `self ≤ bound`, with `none` below everything.
    pub fn at_most(self, bound: i64) -> bool {
        self.0.is_none_or(|k| i64::from(k) <= bound)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(k) => write!(f, "{k}"),
            None => f.write_str("none"),
        }
    }
}

/// Which side a multiplication operator acts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `ℓ_f(D) = m_f ∘ D`
    Left,
    /// `r_f(D) = D ∘ m_f`
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiffOp {
    dim: usize,
    terms: BTreeMap<MultiIndex, Polynomial>,
}

impl DiffOp {
    pub fn zero(dim: usize) -> Self {
        DiffOp {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::multiplication(Polynomial::one(dim))
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::multiplication(Polynomial::constant(dim, c))
    }

    /// `m_f`.
    pub fn multiplication(f: Polynomial) -> Self {
        let mut d = DiffOp::zero(f.dim());
        d.add_term(MultiIndex::zero(f.dim()), f);
        d
    }

    /// `∂_{i+1}` (0-based `i`).
    pub fn derivation(dim: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, i), Polynomial::one(dim))
    }

    /// `a ∂^α`.
    pub fn monomial(alpha: MultiIndex, a: Polynomial) -> Self {
        assert_eq!(alpha.dim(), a.dim());
        let mut d = DiffOp::zero(a.dim());
        d.add_term(alpha, a);
        d
    }

    /// `Σ_α a_α ∂^α`; repeated indices are summed.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Polynomial)>,
    {
        let mut d = DiffOp::zero(dim);
        for (alpha, a) in terms {
            a.check_dim(dim)?;
            if alpha.dim() != dim {
                return Err(AlgebraError::DimensionMismatch {
                    left: dim,
                    right: alpha.dim(),
                });
            }
            d.add_term(alpha, a);
        }
        Ok(d)
    }

    /// `Σ_i X^i ∂_i`.
    pub fn vector_field(components: &[Polynomial]) -> Result<Self> {
        let n = components.len();
        DiffOp::from_terms(
            n,
            components
                .iter()
                .enumerate()
                .map(|(i, c)| (MultiIndex::unit(n, i), c.clone())),
        )
    }

    pub(crate) fn add_term(&mut self, alpha: MultiIndex, a: Polynomial) {
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

    /// `(α, a_α)` in ascending graded-lex order of `α`.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Polynomial)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Polynomial {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.dim))
    }

    pub fn order(&self) -> Order {
        Order(self.terms.keys().map(MultiIndex::total).max())
    }

    /// The zero-order coefficient `D(1)`.
    pub fn zeroth_part(&self) -> Polynomial {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Terms with `|α| = k` only.
    pub fn homogeneous_part(&self, k: u32) -> DiffOp {
        DiffOp {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.total() == k)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    /// First order with no zero-order term.
    pub fn is_vector_field(&self) -> bool {
        self.terms.keys().all(|a| a.total() == 1)
    }

    /// `(X^1, …, X^n)` when `self` is a vector field.
    pub fn vector_components(&self) -> Result<Vec<Polynomial>> {
        if !self.is_vector_field() {
            return Err(AlgebraError::NotVectorField);
        }
        Ok((0..self.dim)
            .map(|i| self.coeff(&MultiIndex::unit(self.dim, i)))
            .collect())
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

    pub fn checked_add(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &DiffOp) -> Result<DiffOp> {
        self.checked_add(&-other)
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero(self.dim);
        }
        DiffOp {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(a, p)| (a.clone(), p.scale(c)))
                .collect(),
        }
    }

    /// `Σ_α a_α ∂^α f`.
    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        f.check_dim(self.dim)?;
        let mut out = Polynomial::zero(self.dim);
        for (alpha, a) in &self.terms {
            let df = f.derive(alpha);
            if !df.is_zero() {
                out = &out + &(a * &df);
            }
        }
        Ok(out)
    }

    /// Normal-ordered `self ∘ other`, using
    /// `∂^α ∘ b = Σ_{γ≤α} C(α,γ) (∂^γ b) ∂^{α−γ}`.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_dim(other.dim)?;
        if let Some(op) = self.integer_leibniz(other, false) {
            return Ok(op);
        }
        let mut out = DiffOp::zero(self.dim);
        for (alpha, a) in &self.terms {
            let divisors = alpha.divisors();
            for (beta, b) in &other.terms {
                for gamma in &divisors {
                    let db = b.derive(gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let rest = alpha.checked_sub(gamma).expect("γ ≤ α");
                    let weight = Rational::from_integer(binomial_product(alpha, gamma).into());
                    out.add_term(rest.add(beta), a * &db.scale(&weight));
                }
            }
        }
        Ok(out)
    }

    /// `[self, other] = self∘other − other∘self`. The `γ = 0` terms of the
    /// two products cancel, so only the others are formed.
    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        self.check_dim(other.dim)?;
        if let Some(op) = self.integer_commutator(other) {
            return Ok(op);
        }
        let mut out = DiffOp::zero(self.dim);
        self.leibniz_tail(other, &Rational::one(), &mut out);
        other.leibniz_tail(self, &-Rational::one(), &mut out);
        Ok(out)
    }

    /// Adds `sign · Σ_{γ≠0} C(α,γ) a_α (∂^γ b_β) ∂^{α+β−γ}` to `out`.
    fn leibniz_tail(&self, other: &DiffOp, sign: &Rational, out: &mut DiffOp) {
        for (alpha, a) in &self.terms {
            let divisors = alpha.divisors();
            for (beta, b) in &other.terms {
                for gamma in divisors.iter().filter(|g| !g.is_zero()) {
                    let db = b.derive(gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let rest = alpha.checked_sub(gamma).expect("γ ≤ α");
                    let weight = Rational::from_integer(binomial_product(alpha, gamma).into()) * sign;
                    out.add_term(rest.add(beta), a * &db.scale(&weight));
                }
            }
        }
    }

    /// `[self, m_f] = Σ_α Σ_{0<γ≤α} C(α,γ) a_α (∂^γ f) ∂^{α−γ}`, the
    /// commutator with a multiplication operator without forming both
    /// products.
    pub fn bracket_function(&self, f: &Polynomial) -> Result<DiffOp> {
        f.check_dim(self.dim)?;
        let m = DiffOp::multiplication(f.clone());
        if let Some(op) = self.integer_leibniz(&m, true) {
            return Ok(op);
        }
        let mut out = DiffOp::zero(self.dim);
        for (alpha, a) in &self.terms {
            for gamma in alpha.divisors() {
                if gamma.is_zero() {
                    continue;
                }
                let df = f.derive(&gamma);
                if df.is_zero() {
                    continue;
                }
                let rest = alpha.checked_sub(&gamma).expect("γ ≤ α");
                let weight = Rational::from_integer(binomial_product(alpha, &gamma).into());
                out.add_term(rest, (a * &df).scale(&weight));
            }
        }
        Ok(out)
    }

    /// Coefficients as integers over a common denominator, keyed by packed
    /// index.
    fn integer_form(&self) -> Option<(i128, IntOp)> {
        let (den, polys) = int::from_polys(self.terms.values())?;
        let rows = self
            .terms
            .keys()
            .zip(polys)
            .map(|(alpha, p)| int::pack(alpha).map(|k| (k, p)))
            .collect::<Option<_>>()?;
        Some((den, rows))
    }

    /// `e^{ad}` series `Σ_k [⋯[self, m_f], …, m_f]/k!` in machine integers;
    /// `None` on overflow.
    pub(crate) fn integer_exp_bracket(&self, f: &Polynomial) -> Option<DiffOp> {
        let (d0, rows) = self.integer_form()?;
        let (df, fp) = int::from_poly(f)?;
        let m: IntOp = [(0, fp)].into_iter().filter(|(_, p)| !p.is_empty()).collect();
        // terms[k] = ad^k(self) · k! · df^k, as numerators over d0.
        let mut terms = alloc::vec![rows];
        loop {
            let mut next = IntOp::new();
            integer_leibniz_into(terms.last().expect("nonempty"), &m, self.dim, true, 1, &mut next)?;
            if next.is_empty() {
                break;
            }
            terms.push(next);
        }
        // Σ_k terms[k] / (d0 · k! · df^k) over d0 · K! · df^K.
        let top = terms.len() - 1;
        let mut den = d0;
        for k in 1..=top {
            den = den.checked_mul(i128::try_from(k).ok()?)?.checked_mul(df)?;
        }
        let mut acc = IntOp::new();
        let mut factor = 1i128;
        for (k, t) in terms.iter().enumerate().rev() {
            for (key, p) in t {
                int::add_scaled(acc.entry(*key).or_default(), p, factor)?;
            }
            if k > 0 {
                factor = factor.checked_mul(i128::try_from(k).ok()?)?.checked_mul(df)?;
            }
        }
        acc.retain(|_, p| !p.is_empty());
        Some(DiffOp::from_integer_terms(self.dim, acc, den))
    }

    fn integer_commutator(&self, other: &DiffOp) -> Option<DiffOp> {
        let (da, a) = self.integer_form()?;
        let (db, b) = other.integer_form()?;
        let mut out = BTreeMap::new();
        integer_leibniz_into(&a, &b, self.dim, true, 1, &mut out)?;
        integer_leibniz_into(&b, &a, self.dim, true, -1, &mut out)?;
        Some(DiffOp::from_integer_terms(self.dim, out, da.checked_mul(db)?))
    }

    /// `self∘other`, with the `γ = 0` Leibniz terms left out when
    /// `skip_zero`; `None` on overflow.
    fn integer_leibniz(&self, other: &DiffOp, skip_zero: bool) -> Option<DiffOp> {
        let (da, a) = self.integer_form()?;
        let (db, b) = other.integer_form()?;
        let mut out = BTreeMap::new();
        integer_leibniz_into(&a, &b, self.dim, skip_zero, 1, &mut out)?;
        Some(DiffOp::from_integer_terms(self.dim, out, da.checked_mul(db)?))
    }

    /// `Σ_k Σ_β c_{kβ} g_k ∂^β` for pairs `(g_k, Σ_β c_{kβ} ξ^β)`, in
    /// machine integers; `None` on overflow.
    pub(crate) fn from_products(dim: usize, parts: &[(Polynomial, Polynomial)]) -> Option<DiffOp> {
        let (dg, gs) = int::from_polys(parts.iter().map(|(g, _)| g))?;
        let (dc, cs) = int::from_polys(parts.iter().map(|(_, c)| c))?;
        let mut out = IntOp::new();
        for (g, c) in gs.iter().zip(&cs) {
            for (beta, weight) in c {
                int::add_scaled(out.entry(*beta).or_default(), g, *weight)?;
            }
        }
        Some(DiffOp::from_integer_terms(dim, out, dg.checked_mul(dc)?))
    }

    fn from_integer_terms(dim: usize, terms: IntOp, den: i128) -> DiffOp {
        let mut op = DiffOp::zero(dim);
        for (k, p) in terms {
            op.add_term(int::unpack(k, dim), int::to_poly(dim, p, den));
        }
        op
    }

    /// `ℓ_f(self)` or `r_f(self)`.
    pub fn multiply(&self, side: Side, f: &Polynomial) -> Result<DiffOp> {
        let m = DiffOp::multiplication(f.clone());
        match side {
            Side::Left => m.compose(self),
            Side::Right => self.compose(&m),
        }
    }

    /// Formal adjoint for the standard density:
    /// `D*(g) = Σ_α (−1)^{|α|} ∂^α(a_α g)`.
    pub fn formal_adjoint(&self) -> DiffOp {
        if let Some(out) = self.integer_adjoint(1) {
            return out;
        }
        let mut out = DiffOp::zero(self.dim);
        for (alpha, a) in &self.terms {
            let sign = if alpha.total().is_multiple_of(2) {
                Rational::one()
            } else {
                -Rational::one()
            };
            for gamma in alpha.divisors() {
                let rest = alpha.checked_sub(&gamma).expect("γ ≤ α");
                let weight = Rational::from_integer(binomial_product(alpha, &gamma).into());
                out.add_term(gamma, a.derive(&rest).scale(&(&weight * &sign)));
            }
        }
        out
    }

    /// `C(D) = −D*`, an involutive Lie automorphism.
    pub fn conjugate(&self) -> DiffOp {
        self.integer_adjoint(-1).unwrap_or_else(|| -self.formal_adjoint())
    }

    /// `sign · D*` in machine integers; `None` on overflow.
    fn integer_adjoint(&self, sign: i128) -> Option<DiffOp> {
        let (den, rows) = self.integer_form()?;
        let mut out = IntOp::new();
        for (ka, pa) in &rows {
            let alpha = int::unpack(*ka, self.dim);
            let parity = if alpha.total().is_multiple_of(2) { sign } else { -sign };
            for gamma in alpha.divisors() {
                let kg = int::pack(&gamma)?;
                let weight = i128::from(binomial_product(&alpha, &gamma)).checked_mul(parity)?;
                let part = int::derive(pa, ka - kg, self.dim)?;
                int::add_scaled(out.entry(kg).or_default(), &part, weight)?;
            }
        }
        out.retain(|_, p| !p.is_empty());
        Some(DiffOp::from_integer_terms(self.dim, out, den))
    }

    /// Inductive (Grothendieck) filtration test against a finite probe set:
    /// level `−1` is `{0}`, level `0` holds operators acting as `m_{D(1)}` on
    /// every probe, and `D` is in level `i+1` when `[D, m_f]` is in level `i`
    /// for every probe `f`.
    pub fn grothendieck_member(&self, level: i64, probes: &[Polynomial]) -> Result<bool> {
        for p in probes {
            p.check_dim(self.dim)?;
        }
        Ok(self.grothendieck_rec(level, probes, 0))
    }

    // [[D, f], g] = [[D, g], f] for functions f, g, so the nested commutator
    // depends only on the multiset of probes used; visiting non-decreasing
    // probe sequences covers every case.
    fn grothendieck_rec(&self, level: i64, probes: &[Polynomial], start: usize) -> bool {
        if self.is_zero() {
            return level >= -1;
        }
        match level {
            i if i < 0 => false,
            0 => {
                // D(p) = D(1)·p  ⇔  (D − m_{D(1)})(p) = 0
                let rest = self - &DiffOp::multiplication(self.zeroth_part());
                probes
                    .iter()
                    .all(|p| rest.apply(p).expect("dimension checked").is_zero())
            }
            _ => (start..probes.len()).all(|k| {
                self.bracket_function(&probes[k])
                    .expect("dimension checked")
                    .grothendieck_rec(level - 1, probes, k)
            }),
        }
    }

    /// Least `k ≤ max_steps` with `(ad_D)^k (m_f) = 0`, if any.
    pub fn ad_nilpotency_witness(&self, f: &Polynomial, max_steps: u32) -> Result<Option<u32>> {
        f.check_dim(self.dim)?;
        let mut current = DiffOp::multiplication(f.clone());
        for k in 1..=max_steps {
            current = self.commutator(&current)?;
            if current.is_zero() {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// `div X = Σ_i ∂_i X^i` for the standard density.
    pub fn divergence(&self) -> Result<Polynomial> {
        let comps = self.vector_components()?;
        let mut out = Polynomial::zero(self.dim);
        for (i, c) in comps.iter().enumerate() {
            out = &out + &c.partial_derive(i)?;
        }
        Ok(out)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(&Rational, String)> = Vec::new();
        for (alpha, a) in self.terms.iter().rev() {
            for (beta, c) in a.terms().rev() {
                let mut m = String::new();
                push_monomial(&mut m, "x", beta);
                push_monomial(&mut m, "d", alpha);
                parts.push((c, m));
            }
        }
        write_sum(f, parts)
    }
}

impl Add for &DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &DiffOp) -> DiffOp {
        self.checked_add(rhs).expect("operator dimensions differ")
    }
}

impl Sub for &DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &DiffOp) -> DiffOp {
        self.checked_sub(rhs).expect("operator dimensions differ")
    }
}

impl Mul for &DiffOp {
    type Output = DiffOp;
    /// Composition.
    fn mul(self, rhs: &DiffOp) -> DiffOp {
        self.compose(rhs).expect("operator dimensions differ")
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.scale(&-Rational::one())
    }
}

impl Neg for DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        -&self
    }
}
