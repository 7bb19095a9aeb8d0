//! Invertible affine maps `x ↦ Ax + b` of ℚⁿ.
//!
//! These stand in for diffeomorphisms: polynomial coefficients stay
//! polynomial under affine pullback in both directions.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{AlgebraError, Result};
use crate::index::MultiIndex;
use crate::poly::Polynomial;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    matrix: Vec<Vec<Rational>>,
    offset: Vec<Rational>,
}

impl AffineMap {
    /// Rejects non-square or singular linear parts.
    pub fn new(matrix: Vec<Vec<Rational>>, offset: Vec<Rational>) -> Result<Self> {
        let n = offset.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(AlgebraError::MalformedAffine(format!(
                "expected a {n}x{n} matrix"
            )));
        }
        if n == 0 {
            return Err(AlgebraError::MalformedAffine("empty map".into()));
        }
        if invert(&matrix).is_none() {
            return Err(AlgebraError::SingularMatrix);
        }
        Ok(AffineMap { matrix, offset })
    }

    pub fn identity(dim: usize) -> Self {
        AffineMap {
            matrix: identity_matrix(dim),
            offset: alloc::vec![Rational::zero(); dim],
        }
    }

    pub fn translation(offset: Vec<Rational>) -> Self {
        AffineMap {
            matrix: identity_matrix(offset.len()),
            offset,
        }
    }

    /// Reads the map off its coordinate polynomials `φ_i(x) = Σ_j A_ij x_j + b_i`.
    pub fn from_components(components: &[Polynomial]) -> Result<Self> {
        let n = components.len();
        let mut matrix = Vec::with_capacity(n);
        let mut offset = Vec::with_capacity(n);
        for p in components {
            p.check_dim(n)?;
            if p.degree().is_some_and(|d| d > 1) {
                return Err(AlgebraError::MalformedAffine(format!(
                    "component {p} is not affine"
                )));
            }
            matrix.push((0..n).map(|j| p.coeff(&MultiIndex::unit(n, j))).collect());
            offset.push(p.constant_term());
        }
        AffineMap::new(matrix, offset)
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn offset(&self) -> &[Rational] {
        &self.offset
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == identity_matrix(self.dim()) && self.offset.iter().all(Zero::is_zero)
    }

    pub fn apply(&self, point: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| {
                row.iter()
                    .zip(point)
                    .fold(b.clone(), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = invert(&self.matrix).expect("linear part is invertible by construction");
        let offset = inv
            .iter()
            .map(|row| {
                -row.iter()
                    .zip(&self.offset)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect();
        AffineMap {
            matrix: inv,
            offset,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap> {
        if self.dim() != inner.dim() {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim(),
                right: inner.dim(),
            });
        }
        let n = self.dim();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(Rational::zero(), |acc, k| {
                            acc + &self.matrix[i][k] * &inner.matrix[k][j]
                        })
                    })
                    .collect()
            })
            .collect();
        let offset = self.apply(&inner.offset);
        Ok(AffineMap { matrix, offset })
    }

    /// Coordinate polynomials `φ_1, …, φ_n`.
    pub fn components(&self) -> Vec<Polynomial> {
        let n = self.dim();
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| {
                Polynomial::from_terms(
                    n,
                    row.iter()
                        .enumerate()
                        .map(|(j, a)| (MultiIndex::unit(n, j), a.clone()))
                        .chain(core::iter::once((MultiIndex::zero(n), b.clone()))),
                )
            })
            .collect()
    }

    /// `p ∘ φ`.
    pub fn pullback(&self, p: &Polynomial) -> Result<Polynomial> {
        p.check_dim(self.dim())?;
        p.substitute(&self.components(), self.dim())
    }
}

fn identity_matrix(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

/// Gauss–Jordan inverse over ℚ; `None` when singular.
fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv = identity_matrix(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                let (t1, t2) = (&a[col][j] * &factor, &inv[col][j] * &factor);
                a[r][j] -= t1;
                inv[r][j] -= t2;
            }
        }
    }
    Some(inv)
}
