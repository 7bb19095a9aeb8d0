//! Seeded random elements for the verification suites.

use opcalc_core::{
    rat, ratio, AffineMap, ClosedOneForm, D1AutoSpec, DAutoSpec, DiffOp, MultiIndex, OneForm,
    PhaseSymbol, Polynomial, Rational, SAutoSpec,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Expr, VarKind};

/// Size limits for generated elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_dim: usize,
    pub max_order: u32,
    pub max_degree: u32,
    /// Coefficients are drawn from `-coeff..=coeff`.
    pub coeff: i64,
    /// Polynomials and operators have between 1 and `max_terms` terms.
    pub max_terms: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_dim: 3,
            max_order: 4,
            max_degree: 4,
            coeff: 9,
            max_terms: 3,
        }
    }
}

pub struct Gen {
    rng: ChaCha8Rng,
    pub bounds: Bounds,
}

impl Gen {
    /// Independent streams for the same seed are told apart by `stream`.
    pub fn new(seed: u64, stream: u64, bounds: Bounds) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Gen { rng, bounds }
    }

    pub fn dim(&mut self) -> usize {
        self.rng.gen_range(1..=self.bounds.max_dim.max(1))
    }

    pub fn dim_at_least(&mut self, min: usize) -> usize {
        self.rng.gen_range(min..=self.bounds.max_dim.max(min))
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn coefficient(&mut self) -> Rational {
        let c = self.bounds.coeff;
        rat(self.rng.gen_range(-c..=c))
    }

    pub fn nonzero_coefficient(&mut self) -> Rational {
        let c = self.bounds.coeff.max(1);
        let k = self.rng.gen_range(1..=c);
        rat(if self.rng.gen() { k } else { -k })
    }

    /// A nonzero scalar from a small set that includes fractions.
    pub fn scalar(&mut self) -> Rational {
        let (p, q) = *[(1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (1, 2), (-1, 3)]
            .choose(&mut self.rng)
            .expect("nonempty");
        ratio(p, q)
    }

    /// A multi-index with total degree at most `max_total`.
    pub fn index(&mut self, n: usize, max_total: u32) -> MultiIndex {
        let total = self.rng.gen_range(0..=max_total);
        let mut e = vec![0u32; n];
        for _ in 0..total {
            e[self.rng.gen_range(0..n)] += 1;
        }
        MultiIndex::from_exponents(e)
    }

    /// Sparse polynomial with 1 to `max_terms` terms. Cancellation can make
    /// it zero.
    pub fn polynomial(&mut self, n: usize, max_deg: u32) -> Polynomial {
        let k = self.rng.gen_range(1..=self.bounds.max_terms.max(1));
        let terms: Vec<_> = (0..k)
            .map(|_| (self.index(n, max_deg), self.nonzero_coefficient()))
            .collect();
        Polynomial::from_terms(n, terms)
    }

    pub fn nonzero_polynomial(&mut self, n: usize, max_deg: u32) -> Polynomial {
        loop {
            let p = self.polynomial(n, max_deg);
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// Every monomial of degree `≤ deg` with an independent coefficient.
    pub fn dense_polynomial(&mut self, n: usize, deg: u32) -> Polynomial {
        let terms: Vec<_> = (0..=deg)
            .flat_map(|k| MultiIndex::all_of_degree(n, k))
            .map(|idx| (idx, self.coefficient()))
            .collect();
        Polynomial::from_terms(n, terms)
    }

    pub fn diff_op_with(&mut self, n: usize, max_order: u32, max_deg: u32) -> DiffOp {
        let k = self.rng.gen_range(1..=self.bounds.max_terms.max(1));
        let terms: Vec<_> = (0..k)
            .map(|_| (self.index(n, max_order), self.nonzero_polynomial(n, max_deg)))
            .collect();
        DiffOp::from_terms(n, terms).expect("indices have length n")
    }

    pub fn diff_op(&mut self, n: usize) -> DiffOp {
        self.diff_op_with(n, self.bounds.max_order, self.bounds.max_degree)
    }

    /// An operator whose order is exactly `order`.
    pub fn diff_op_of_order(&mut self, n: usize, order: u32) -> DiffOp {
        loop {
            let top_index = {
                let mut e = vec![0u32; n];
                for _ in 0..order {
                    e[self.rng.gen_range(0..n)] += 1;
                }
                MultiIndex::from_exponents(e)
            };
            let top = DiffOp::monomial(top_index, self.nonzero_polynomial(n, self.bounds.max_degree));
            let rest = if order == 0 {
                DiffOp::zero(n)
            } else {
                self.diff_op_with(n, order - 1, self.bounds.max_degree)
            };
            let d = &top + &rest;
            if d.order().value() == Some(order) {
                return d;
            }
        }
    }

    pub fn vector_field(&mut self, n: usize) -> DiffOp {
        let comps: Vec<_> = (0..n).map(|_| self.polynomial(n, self.bounds.max_degree)).collect();
        DiffOp::vector_field(&comps).expect("components share the dimension")
    }

    /// `f + X` in `𝒟¹`.
    pub fn first_order(&mut self, n: usize) -> DiffOp {
        let f = self.polynomial(n, self.bounds.max_degree);
        &DiffOp::multiplication(f) + &self.vector_field(n)
    }

    pub fn symbol(&mut self, n: usize) -> PhaseSymbol {
        PhaseSymbol::total_symbol(&self.diff_op(n))
    }

    /// `df` for a random `f` of degree at most `max_deg`.
    pub fn closed_form(&mut self, n: usize, max_deg: u32) -> ClosedOneForm {
        ClosedOneForm::exact(&self.polynomial(n, max_deg))
    }

    /// A 1-form that is not closed; needs `n ≥ 2`.
    pub fn non_closed_form(&mut self, n: usize) -> OneForm {
        assert!(n >= 2, "every 1-form on a line is closed");
        loop {
            let comps = (0..n).map(|_| self.polynomial(n, 2)).collect();
            let w = OneForm::new(comps).expect("components share the dimension");
            if !w.is_closed() {
                return w;
            }
        }
    }

    /// `x ↦ LUx + b` with unit lower triangular `L` and upper triangular `U`
    /// whose diagonal is drawn from `±1, ±2`, so the map is invertible.
    pub fn affine(&mut self, n: usize) -> AffineMap {
        let mut l = vec![vec![0i64; n]; n];
        let mut u = vec![vec![0i64; n]; n];
        for i in 0..n {
            l[i][i] = 1;
            u[i][i] = *[1, -1, 2, -2].choose(&mut self.rng).expect("nonempty");
            for j in 0..i {
                l[i][j] = self.rng.gen_range(-1..=1);
            }
            for j in i + 1..n {
                u[i][j] = self.rng.gen_range(-1..=1);
            }
        }
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| rat((0..n).map(|k| l[i][k] * u[k][j]).sum()))
                    .collect()
            })
            .collect();
        let offset = (0..n).map(|_| rat(self.rng.gen_range(-3..=3))).collect();
        AffineMap::new(matrix, offset).expect("triangular factors are invertible")
    }

    pub fn d1_spec(&mut self, n: usize) -> D1AutoSpec {
        let kappa = self.scalar();
        let lambda = rat(self.rng.gen_range(-3..=3));
        let omega = self.closed_form(n, 3);
        let phi = self.affine(n);
        D1AutoSpec::new(kappa, lambda, omega, phi).expect("kappa is nonzero")
    }

    pub fn d_spec(&mut self, n: usize) -> DAutoSpec {
        let phi = self.affine(n);
        let a = self.rng.gen_range(0..=1);
        let omega = self.closed_form(n, 2);
        DAutoSpec::new(phi, a, omega).expect("a is 0 or 1")
    }

    pub fn s_spec(&mut self, n: usize) -> SAutoSpec {
        let kappa = self.scalar();
        let phi = self.affine(n);
        let omega = self.closed_form(n, 3);
        SAutoSpec::new(kappa, phi, omega).expect("kappa is nonzero")
    }

    /// A random expression tree over `x`, `d` and small rationals.
    pub fn expression(&mut self, n: usize, depth: u32) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return match self.rng.gen_range(0..3) {
                0 => Expr::Num(ratio(self.rng.gen_range(0..=5), self.rng.gen_range(1..=3))),
                1 => Expr::Var {
                    kind: VarKind::Coord,
                    index: self.rng.gen_range(0..n),
                    offset: 0,
                },
                _ => Expr::Var {
                    kind: VarKind::Deriv,
                    index: self.rng.gen_range(0..n),
                    offset: 0,
                },
            };
        }
        let sub = |g: &mut Gen| Box::new(g.expression(n, depth - 1));
        match self.rng.gen_range(0..6) {
            0 => Expr::Add(sub(self), sub(self)),
            1 => Expr::Sub(sub(self), sub(self)),
            2 | 3 => Expr::Mul(sub(self), sub(self)),
            4 => Expr::Pow(sub(self), self.rng.gen_range(0..=2)),
            _ => Expr::Neg(sub(self)),
        }
    }
}
