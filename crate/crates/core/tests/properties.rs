mod common;

use common::*;
use opcalc_core::auto::{self, pushforward};
use opcalc_core::{
    rat, AffineMap, DiffOp, OneForm, PhaseSymbol, Polynomial, Side,
};
use proptest::prelude::*;

fn with_dim<T: std::fmt::Debug, S: Strategy<Value = T>>(
    f: impl Fn(usize) -> S,
) -> impl Strategy<Value = (usize, T)> {
    dimension().prop_flat_map(move |n| (Just(n), f(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms((_, (p, q, r)) in with_dim(|n| (polynomial(n, 4), polynomial(n, 4), polynomial(n, 4)))) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn partials_commute((n, p) in with_dim(|n| polynomial(n, 5)), i in 0usize..3, j in 0usize..3) {
        let (i, j) = (i % n, j % n);
        let a = p.partial_derive(i).unwrap().partial_derive(j).unwrap();
        let b = p.partial_derive(j).unwrap().partial_derive(i).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pullback_respects_composition((_, (phi, psi, p)) in with_dim(|n| (affine(n), affine(n), polynomial(n, 3)))) {
        let lhs = phi.compose(&psi).unwrap().pullback(&p).unwrap();
        let rhs = psi.pullback(&phi.pullback(&p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(phi.pullback(&p).unwrap().degree(), p.degree());
    }

    #[test]
    fn potential_of_exact_form((_, f) in with_dim(|n| polynomial(n, 5))) {
        let w = OneForm::exact(&f);
        let g = opcalc_core::form::poincare_potential(&w).unwrap();
        prop_assert_eq!(OneForm::exact(&g), w);
        prop_assert!((&f - &g).as_constant().is_some());
    }

    #[test]
    fn composition_matches_action((_, (a, b, f)) in with_dim(|n| (diff_op(n, 3, 3), diff_op(n, 3, 3), polynomial(n, 6)))) {
        let lhs = a.compose(&b).unwrap().apply(&f).unwrap();
        let rhs = a.apply(&b.apply(&f).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_with_a_function((_, (d, f)) in with_dim(|n| (diff_op(n, 4, 3), polynomial(n, 4)))) {
        let direct = d.bracket_function(&f).unwrap();
        prop_assert_eq!(direct, d.commutator(&DiffOp::multiplication(f)).unwrap());
    }

    #[test]
    fn filtration_law((_, (a, b)) in with_dim(|n| (diff_op(n, 4, 4), diff_op(n, 4, 4)))) {
        let c = a.commutator(&b).unwrap();
        if let (Some(p), Some(q)) = (a.order().value(), b.order().value()) {
            prop_assert!(c.order().at_most(i64::from(p + q) - 1));
            prop_assert!(a.compose(&b).unwrap().order().at_most(i64::from(p + q)));
        } else {
            prop_assert!(c.is_zero());
        }
    }

    #[test]
    fn jacobi((_, (a, b, c)) in with_dim(|n| (diff_op(n, 2, 2), diff_op(n, 2, 2), diff_op(n, 2, 2)))) {
        let br = |x: &DiffOp, y: &DiffOp| x.commutator(y).unwrap();
        let total = &(&br(&a, &br(&b, &c)) + &br(&b, &br(&c, &a))) + &br(&c, &br(&a, &b));
        prop_assert!(total.is_zero());
    }

    #[test]
    fn adjoint_laws((_, (a, b)) in with_dim(|n| (diff_op(n, 3, 3), diff_op(n, 3, 3)))) {
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(ab.formal_adjoint(), b.formal_adjoint().compose(&a.formal_adjoint()).unwrap());
        prop_assert_eq!(a.formal_adjoint().formal_adjoint(), a.clone());
        prop_assert_eq!(a.conjugate().conjugate(), a.clone());
        let c = a.commutator(&b).unwrap();
        prop_assert_eq!(c.conjugate(), a.conjugate().commutator(&b.conjugate()).unwrap());
    }

    #[test]
    fn centralizer((_, (f, g, d)) in with_dim(|n| (polynomial(n, 3), polynomial(n, 3), diff_op(n, 3, 3)))) {
        let mf = DiffOp::multiplication(f.clone());
        let mg = DiffOp::multiplication(g.clone());
        let l = d.multiply(Side::Left, &f).unwrap();
        let r = d.multiply(Side::Right, &f).unwrap();
        prop_assert_eq!(&l - &r, mf.commutator(&d).unwrap());
        let ad_g = |x: &DiffOp| mg.commutator(x).unwrap();
        for side in [Side::Left, Side::Right] {
            prop_assert_eq!(
                ad_g(&d).multiply(side, &f).unwrap(),
                ad_g(&d.multiply(side, &f).unwrap())
            );
        }
    }

    #[test]
    fn divergence_cocycle((_, (x, y)) in with_dim(|n| (vector_field(n, 3), vector_field(n, 3)))) {
        let lhs = x.commutator(&y).unwrap().divergence().unwrap();
        let rhs = &x.apply(&y.divergence().unwrap()).unwrap() - &y.apply(&x.divergence().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symbol_compatibility((_, (a, b)) in with_dim(|n| (diff_op(n, 4, 3), diff_op(n, 4, 3)))) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (p, q) = (a.order().value().unwrap(), b.order().value().unwrap());
        let sa = PhaseSymbol::principal(&a).unwrap();
        let sb = PhaseSymbol::principal(&b).unwrap();
        let bracket = PhaseSymbol::principal_of_order(&a.commutator(&b).unwrap(), i64::from(p + q) - 1).unwrap();
        prop_assert_eq!(sa.poisson_bracket(&sb).unwrap(), bracket);
        let product = PhaseSymbol::principal_of_order(&a.compose(&b).unwrap(), i64::from(p + q)).unwrap();
        prop_assert_eq!(&sa * &sb, product);
    }

    #[test]
    fn poisson_axioms((_, (p, q, r)) in with_dim(|n| (symbol(n, 2, 2), symbol(n, 2, 2), symbol(n, 2, 2)))) {
        let br = |x: &PhaseSymbol, y: &PhaseSymbol| x.poisson_bracket(y).unwrap();
        prop_assert_eq!(br(&p, &q), -br(&q, &p));
        let jac = &(&br(&p, &br(&q, &r)) + &br(&q, &br(&r, &p))) + &br(&r, &br(&p, &q));
        prop_assert!(jac.is_zero());
        prop_assert_eq!(br(&p, &(&q * &r)), &(&br(&p, &q) * &r) + &(&q * &br(&p, &r)));
        prop_assert!(br(&p, &PhaseSymbol::one(p.dim()).scale(&rat(7))).is_zero());
    }

    #[test]
    fn degree_is_a_derivation((_, (p, q)) in with_dim(|n| (symbol(n, 3, 3), symbol(n, 3, 3)))) {
        let lhs = p.poisson_bracket(&q).unwrap().degree_derivation();
        let rhs = &p.degree_derivation().poisson_bracket(&q).unwrap() + &p.poisson_bracket(&q.degree_derivation()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quantization_round_trip((_, d) in with_dim(|n| diff_op(n, 4, 4))) {
        let s = PhaseSymbol::total_symbol(&d);
        prop_assert_eq!(s.quantize(), d);
        prop_assert_eq!(PhaseSymbol::total_symbol(&s.quantize()), s);
    }

    #[test]
    fn point_maps_are_symplectic((_, (phi, w, p, q)) in with_dim(|n| (affine(n), closed_form(n, 2), symbol(n, 2, 2), symbol(n, 2, 2)))) {
        let lift = |s: &PhaseSymbol| s.phase_lift(&phi).unwrap();
        prop_assert_eq!(lift(&p.poisson_bracket(&q).unwrap()), lift(&p).poisson_bracket(&lift(&q)).unwrap());
        let tr = |s: &PhaseSymbol| s.vertical_translation(&w).unwrap();
        prop_assert_eq!(tr(&p.poisson_bracket(&q).unwrap()), tr(&p).poisson_bracket(&tr(&q)).unwrap());
    }

    #[test]
    fn pushforward_matches_action((_, (phi, d, f)) in with_dim(|n| (affine(n), diff_op(n, 3, 3), polynomial(n, 4)))) {
        let pushed = pushforward(&phi, &d).unwrap();
        let oracle = phi.inverse().pullback(&d.apply(&phi.pullback(&f).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(pushed.apply(&f).unwrap(), oracle);
        prop_assert_eq!(pushed.order(), d.order());
        prop_assert_eq!(PhaseSymbol::total_symbol(&pushed), PhaseSymbol::total_symbol(&d).phase_lift(&phi).unwrap());
    }

    #[test]
    fn exp_omega_is_conjugation_by_exponential((_, (w, d, f)) in with_dim(|n| (closed_form(n, 1), diff_op(n, 2, 2), polynomial(n, 3)))) {
        // e^{−g}·D·e^{g} applied to f: expand D(e^g f) = e^g Σ … via the
        // identity ∂_i(e^g h) = e^g (∂_i + ∂_i g) h, i.e. D ↦ D with ∂_i ↦ ∂_i + ω_i.
        let n = d.dim();
        let shifted = |h: &Polynomial, i: usize| &h.partial_derive(i).unwrap() + &(&w.components()[i] * h);
        let mut oracle = Polynomial::zero(n);
        for (alpha, a) in d.terms() {
            let mut h = f.clone();
            for (i, &e) in alpha.exponents().iter().enumerate() {
                for _ in 0..e {
                    h = shifted(&h, i);
                }
            }
            oracle = &oracle + &(a * &h);
        }
        prop_assert_eq!(auto::exp_omega(&w, &d).unwrap().apply(&f).unwrap(), oracle);
    }

    #[test]
    fn grothendieck_agrees_with_order((n, (d, extra)) in with_dim(|n| (diff_op(n, 3, 2), proptest::collection::vec(polynomial(n, 3), 5)))) {
        let mut probes: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
        probes.extend(extra.into_iter().filter(|p| !p.is_zero()));
        // Sparse random probes can miss; the dense probe below cannot.
        probes.push(opcalc_core::Polynomial::from_terms(n, (0..=3).flat_map(|k| opcalc_core::MultiIndex::all_of_degree(n, k)).enumerate().map(|(j, idx)| (idx, rat(j as i64 + 1)))));
        for level in -1..=4i64 {
            let member = d.grothendieck_member(level, &probes).unwrap();
            prop_assert_eq!(member, d.order().at_most(level), "level {} for {}", level, d);
        }
    }

    #[test]
    fn d1_extraction_round_trip((n, (k, l, w, phi)) in with_dim(|n| (prop_oneof![-3i64..=-1, 1i64..=3], -3i64..=3, closed_form(n, 2), affine(n)))) {
        let spec = auto::D1AutoSpec::new(rat(k), rat(l), w, phi).unwrap();
        let got = auto::extract_d1_params(n, |op| spec.apply(op).unwrap()).unwrap();
        prop_assert_eq!(got, spec);
    }
}

#[test]
fn affine_identity_pushforward_is_identity() {
    let d = DiffOp::derivation(2, 1);
    assert_eq!(pushforward(&AffineMap::identity(2), &d).unwrap(), d);
}
