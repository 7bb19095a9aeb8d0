//! Exponent vectors.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

/// Exponent vector `(α¹, …, αⁿ)`, used both for monomials `x^α` and for
/// derivatives `∂^α`.
///
/// Ordered graded-lexicographically: first by total degree, then by the
/// exponent of the first variable, then the second, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// Unit index `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` unless `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    pub fn with(&self, i: usize, value: u32) -> MultiIndex {
        let mut e = self.0.clone();
        e[i] = value;
        MultiIndex(e)
    }

    /// All `γ` with `γ ≤ self` componentwise.
    pub fn divisors(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.dim())];
        for (i, &e) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for g in &out {
                for k in 0..=e {
                    next.push(g.with(i, k));
                }
            }
            out = next;
        }
        out
    }

    /// All indices of total degree exactly `degree` in `dim` variables.
    pub fn all_of_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        fn fill(dim: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if i + 1 == dim {
                cur[i] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for k in (0..=left).rev() {
                cur[i] = k;
                fill(dim, i + 1, left - k, cur, out);
            }
            cur[i] = 0;
        }
        let mut out = Vec::new();
        if dim == 0 {
            if degree == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        fill(dim, 0, degree, &mut vec![0; dim], &mut out);
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multinomial `Π_i C(α_i, γ_i)`, assuming `γ ≤ α`.
pub(crate) fn binomial_product(alpha: &MultiIndex, gamma: &MultiIndex) -> u64 {
    alpha
        .0
        .iter()
        .zip(&gamma.0)
        .map(|(&a, &g)| binomial(a, g))
        .product()
}

/// Falling factorial product `Π_i β_i (β_i − 1) … (β_i − α_i + 1)`.
pub(crate) fn falling_product(beta: &MultiIndex, alpha: &MultiIndex) -> u64 {
    beta.0
        .iter()
        .zip(&alpha.0)
        .map(|(&b, &a)| (0..a).map(|k| u64::from(b - k)).product::<u64>())
        .product()
}

fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for j in 0..k {
        acc = acc * u64::from(n - j) / u64::from(j + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let a = MultiIndex::from_exponents(vec![2, 0]);
        let b = MultiIndex::from_exponents(vec![1, 1]);
        let c = MultiIndex::from_exponents(vec![0, 2]);
        let d = MultiIndex::from_exponents(vec![3, 0]);
        assert!(c < b && b < a && a < d);
        assert!(MultiIndex::zero(2) < MultiIndex::unit(2, 1));
        assert!(MultiIndex::unit(2, 1) < MultiIndex::unit(2, 0));
    }

    #[test]
    fn divisors_count() {
        let a = MultiIndex::from_exponents(vec![2, 1, 0]);
        assert_eq!(a.divisors().len(), 6);
    }

    #[test]
    fn degree_enumeration() {
        assert_eq!(MultiIndex::all_of_degree(3, 2).len(), 6);
        assert_eq!(MultiIndex::all_of_degree(1, 4).len(), 1);
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(5, 0), 1);
        let b = MultiIndex::from_exponents(vec![3, 2]);
        let a = MultiIndex::from_exponents(vec![2, 1]);
        assert_eq!(falling_product(&b, &a), 6 * 2);
        assert_eq!(binomial_product(&b, &a), 3 * 2);
    }
}
