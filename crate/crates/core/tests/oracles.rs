//! Independent action oracle for one-variable examples.
//!
//! Operators are modelled here as plain closures on dense coefficient
//! vectors, so composition is closure composition and never touches the
//! normal-ordering code. Each expected normal form is checked by acting on
//! `1, x, …, x^6`, which pins down any operator of order ≤ 6 in one variable.

use opcalc_core::{auto, rat, AffineMap, ClosedOneForm, DiffOp, MultiIndex, Polynomial, Rational};

type Dense = Vec<Rational>;
type Op = Box<dyn Fn(&Dense) -> Dense>;

fn trim(mut p: Dense) -> Dense {
    while p.last().is_some_and(|c| *c == rat(0)) {
        p.pop();
    }
    p
}

fn add(a: &Dense, b: &Dense) -> Dense {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| a.get(i).cloned().unwrap_or(rat(0)) + b.get(i).cloned().unwrap_or(rat(0)))
            .collect(),
    )
}

fn scale(a: &Dense, c: &Rational) -> Dense {
    trim(a.iter().map(|x| x * c).collect())
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![rat(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn deriv(a: &Dense) -> Dense {
    trim(a.iter().enumerate().skip(1).map(|(k, c)| c * rat(k as i64)).collect())
}

fn d() -> Op {
    Box::new(deriv)
}
fn m(f: Dense) -> Op {
    Box::new(move |g| mul(&f, g))
}
fn then(outer: Op, inner: Op) -> Op {
    Box::new(move |g| outer(&inner(g)))
}
fn sum(a: Op, b: Op) -> Op {
    Box::new(move |g| add(&a(g), &b(g)))
}
fn times(a: Op, c: Rational) -> Op {
    Box::new(move |g| scale(&a(g), &c))
}
fn x() -> Dense {
    vec![rat(0), rat(1)]
}
fn xk(k: usize) -> Dense {
    let mut v = vec![rat(0); k + 1];
    v[k] = rat(1);
    v
}

fn to_dense(p: &Polynomial) -> Dense {
    let mut out = Vec::new();
    for (idx, c) in p.terms() {
        let k = idx.get(0) as usize;
        if out.len() <= k {
            out.resize(k + 1, rat(0));
        }
        out[k] = c.clone();
    }
    trim(out)
}

/// Evaluates a normal-form operator with the oracle's own arithmetic.
fn evaluate(op: &DiffOp, g: &Dense) -> Dense {
    let mut out = Vec::new();
    for (alpha, a) in op.terms() {
        let mut dg = g.clone();
        for _ in 0..alpha.get(0) {
            dg = deriv(&dg);
        }
        out = add(&out, &mul(&to_dense(a), &dg));
    }
    out
}

fn assert_same_action(expected: &DiffOp, oracle: &Op) {
    for k in 0..=6 {
        assert_eq!(
            evaluate(expected, &xk(k)),
            oracle(&xk(k)),
            "action differs on x^{k} for {expected}"
        );
    }
}

fn op(text_terms: &[(u32, &[(u32, i64)])]) -> DiffOp {
    DiffOp::from_terms(
        1,
        text_terms.iter().map(|(order, coeff)| {
            (
                MultiIndex::from_exponents(vec![*order]),
                Polynomial::from_terms(
                    1,
                    coeff
                        .iter()
                        .map(|(e, c)| (MultiIndex::from_exponents(vec![*e]), rat(*c))),
                ),
            )
        }),
    )
    .unwrap()
}

#[test]
fn composition_examples() {
    // ∂ ∘ m_x = x∂ + 1
    let expected = op(&[(1, &[(1, 1)]), (0, &[(0, 1)])]);
    assert_same_action(&expected, &then(d(), m(x())));
    let lib = DiffOp::derivation(1, 0).compose(&DiffOp::multiplication(Polynomial::var(1, 0)));
    assert_eq!(lib.unwrap(), expected);

    // (x∂)∘(x∂) = x²∂² + x∂
    let expected = op(&[(2, &[(2, 1)]), (1, &[(1, 1)])]);
    let euler = || then(m(x()), d());
    assert_same_action(&expected, &then(euler(), euler()));
    let e = op(&[(1, &[(1, 1)])]);
    assert_eq!(e.compose(&e).unwrap(), expected);
}

#[test]
fn commutator_examples() {
    let comm = |a: fn() -> Op, b: fn() -> Op| sum(then(a(), b()), times(then(b(), a()), rat(-1)));
    // [x∂, ∂] = −∂
    let expected = op(&[(1, &[(0, -1)])]);
    assert_same_action(&expected, &comm(|| then(m(x()), d()), d));
    let e = op(&[(1, &[(1, 1)])]);
    assert_eq!(e.commutator(&DiffOp::derivation(1, 0)).unwrap(), expected);

    // [∂², m_x] = 2∂
    let expected = op(&[(1, &[(0, 2)])]);
    assert_same_action(&expected, &comm(|| then(d(), d()), || m(x())));
    let dd = op(&[(2, &[(0, 1)])]);
    let mx = DiffOp::multiplication(Polynomial::var(1, 0));
    assert_eq!(dd.commutator(&mx).unwrap(), expected);
}

#[test]
fn adjoint_examples() {
    // (x∂)*(g) = −(x g)' = −x∂g − g
    let oracle: Op = Box::new(|g| scale(&deriv(&mul(&x(), g)), &rat(-1)));
    let expected = op(&[(1, &[(1, -1)]), (0, &[(0, -1)])]);
    assert_same_action(&expected, &oracle);
    let e = op(&[(1, &[(1, 1)])]);
    assert_eq!(e.formal_adjoint(), expected);
    // C(x∂) = −(x∂)* = x∂ + 1, and C(∂) = ∂
    assert_eq!(e.conjugate(), op(&[(1, &[(1, 1)]), (0, &[(0, 1)])]));
    assert_eq!(DiffOp::derivation(1, 0).conjugate(), DiffOp::derivation(1, 0));
}

#[test]
fn multiplication_operator_examples() {
    // r_x(∂) = ∂ ∘ m_x; (ℓ_x − r_x)(∂) = [m_x, ∂] = −1
    let lhs = sum(then(m(x()), d()), times(then(d(), m(x())), rat(-1)));
    assert_same_action(&DiffOp::constant(1, rat(-1)), &lhs);
}

#[test]
fn nilpotency_example() {
    // ad_∂ on x³: 3x², 6x, 6, 0, so the witness is 4.
    let mut f = xk(3);
    let mut steps = 0;
    while !f.is_empty() {
        f = deriv(&f);
        steps += 1;
    }
    assert_eq!(steps, 4);
    let lib = DiffOp::derivation(1, 0)
        .ad_nilpotency_witness(&Polynomial::var(1, 0).pow(3), 8)
        .unwrap();
    assert_eq!(lib, Some(steps));
}

#[test]
fn exp_omega_examples() {
    // With ω = dx, f = x: ad-by-x series of ∂² is ∂² + [∂²,x] + [[∂²,x],x]/2.
    let dd: fn() -> Op = || then(d(), d());
    let comm_x = |a: Op| -> Op {
        let a = std::rc::Rc::new(a);
        let a2 = a.clone();
        Box::new(move |g: &Dense| add(&a(&mul(&x(), g)), &scale(&mul(&x(), &a2(g)), &rat(-1))))
    };
    let first = comm_x(dd());
    let second = comm_x(comm_x(dd()));
    let series = sum(sum(dd(), first), times(second, Rational::new(1.into(), 2.into())));
    let expected = op(&[(2, &[(0, 1)]), (1, &[(0, 2)]), (0, &[(0, 1)])]);
    assert_same_action(&expected, &series);
    let w = ClosedOneForm::exact(&Polynomial::var(1, 0));
    assert_eq!(auto::exp_omega(&w, &op(&[(2, &[(0, 1)])])).unwrap(), expected);
}

#[test]
fn pushforward_example() {
    // φ(x) = x + 1: (φ_* m_x)(f) = ((x·f(x+1)))∘φ⁻¹ = (x − 1) f(x).
    let phi = AffineMap::translation(vec![rat(1)]);
    let expected = op(&[(0, &[(1, 1), (0, -1)])]);
    assert_same_action(&expected, &m(vec![rat(-1), rat(1)]));
    let mx = DiffOp::multiplication(Polynomial::var(1, 0));
    assert_eq!(auto::pushforward(&phi, &mx).unwrap(), expected);
}
