#![allow(dead_code)]

use opcalc_core::{
    rat, AffineMap, ClosedOneForm, DiffOp, MultiIndex, PhaseSymbol, Polynomial, Rational,
};
use proptest::collection::vec;
use proptest::prelude::*;

pub fn coefficient() -> impl Strategy<Value = Rational> {
    (-9i64..=9).prop_map(rat)
}

fn index(n: usize, max_total: u32) -> impl Strategy<Value = MultiIndex> {
    vec(0..=max_total, n).prop_map(move |mut e| {
        // Trim to the total-degree bound from the back.
        let mut total: u32 = e.iter().sum();
        for x in e.iter_mut().rev() {
            while total > max_total && *x > 0 {
                *x -= 1;
                total -= 1;
            }
        }
        MultiIndex::from_exponents(e)
    })
}

pub fn polynomial(n: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    vec((index(n, max_deg), coefficient()), 0..=3)
        .prop_map(move |terms| Polynomial::from_terms(n, terms))
}

pub fn diff_op(n: usize, max_order: u32, max_deg: u32) -> impl Strategy<Value = DiffOp> {
    vec((index(n, max_order), polynomial(n, max_deg)), 0..=3)
        .prop_map(move |terms| DiffOp::from_terms(n, terms).unwrap())
}

pub fn vector_field(n: usize, max_deg: u32) -> impl Strategy<Value = DiffOp> {
    vec(polynomial(n, max_deg), n).prop_map(|c| DiffOp::vector_field(&c).unwrap())
}

pub fn symbol(n: usize, max_grade: u32, max_deg: u32) -> impl Strategy<Value = PhaseSymbol> {
    diff_op(n, max_grade, max_deg).prop_map(|d| PhaseSymbol::total_symbol(&d))
}

pub fn closed_form(n: usize, max_deg: u32) -> impl Strategy<Value = ClosedOneForm> {
    polynomial(n, max_deg + 1).prop_map(|f| ClosedOneForm::exact(&f))
}

/// Invertible affine maps `x ↦ (L U) x + b` with unit-triangular factors
/// scaled by a nonzero diagonal.
pub fn affine(n: usize) -> impl Strategy<Value = AffineMap> {
    (
        vec(-2i64..=2, n * n),
        vec(-2i64..=2, n * n),
        vec(prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)], n),
        vec(-3i64..=3, n),
    )
        .prop_map(move |(l, u, diag, b)| {
            let mut m = vec![vec![Rational::from_integer(0.into()); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0i64;
                    for k in 0..n {
                        let lik = if i == k { 1 } else if i > k { l[i * n + k] } else { 0 };
                        let ukj = if k == j { diag[k] } else if k < j { u[k * n + j] } else { 0 };
                        acc += lik * ukj;
                    }
                    m[i][j] = rat(acc);
                }
            }
            AffineMap::new(m, b.into_iter().map(rat).collect()).unwrap()
        })
}

pub fn dimension() -> impl Strategy<Value = usize> {
    1usize..=3
}
