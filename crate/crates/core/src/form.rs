//! Polynomial 1-forms, closedness, and potentials.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{AlgebraError, Result};
use crate::poly::Polynomial;
use crate::Rational;

/// `ω = Σ ω_i dx_i` with polynomial components.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OneForm {
    components: Vec<Polynomial>,
}

impl OneForm {
    /// Each component must have dimension equal to the number of components.
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len();
        for c in &components {
            c.check_dim(n)?;
        }
        Ok(OneForm { components })
    }

    pub fn zero(dim: usize) -> Self {
        OneForm {
            components: (0..dim).map(|_| Polynomial::zero(dim)).collect(),
        }
    }

    /// `df`.
    pub fn exact(f: &Polynomial) -> Self {
        OneForm {
            components: (0..f.dim())
                .map(|i| f.partial_derive(i).expect("index within dimension"))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Polynomial::is_zero)
    }

    /// `∂_j ω_i = ∂_i ω_j` for all `i < j`.
    pub fn is_closed(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                self.components[i].partial_derive(j).ok() == self.components[j].partial_derive(i).ok()
            })
        })
    }

    pub fn into_closed(self) -> Result<ClosedOneForm> {
        ClosedOneForm::new(self)
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// A 1-form known to be closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosedOneForm(OneForm);

impl ClosedOneForm {
    pub fn new(form: OneForm) -> Result<Self> {
        if form.is_closed() {
            Ok(ClosedOneForm(form))
        } else {
            Err(AlgebraError::NotClosed)
        }
    }

    pub fn zero(dim: usize) -> Self {
        ClosedOneForm(OneForm::zero(dim))
    }

    pub fn exact(f: &Polynomial) -> Self {
        ClosedOneForm(OneForm::exact(f))
    }

    pub fn form(&self) -> &OneForm {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn components(&self) -> &[Polynomial] {
        self.0.components()
    }

    /// The potential `f` with `df = ω` and `f(0) = 0`, by radial
    /// integration: a monomial `m` of total degree `d` in `ω_i`
    /// contributes `x_i·m/(d+1)`.
    pub fn potential(&self) -> Polynomial {
        let n = self.dim();
        let mut f = Polynomial::zero(n);
        for (i, comp) in self.components().iter().enumerate() {
            let xi = crate::MultiIndex::unit(n, i);
            for (idx, c) in comp.terms() {
                let weight = Rational::new(1.into(), (idx.total() + 1).into());
                f.add_term(idx.add(&xi), c * weight);
            }
        }
        f
    }
}

impl fmt::Display for ClosedOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Potential of `ω`; rejects forms that are not closed.
pub fn poincare_potential(form: &OneForm) -> Result<Polynomial> {
    Ok(ClosedOneForm::new(form.clone())?.potential())
}
