//! Verification suites: each one draws random cases from a seeded
//! generator and checks an identity of the operator calculus exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use opcalc_core::auto::{self, pushforward};
use opcalc_core::form::poincare_potential;
use opcalc_core::verify::{verify_filtration_respect, verify_lie_automorphism};
use opcalc_core::{
    rat, AffineMap, ClosedOneForm, D1AutoSpec, DAutoSpec, DiffOp, OneForm,
    PhaseSymbol, Polynomial, Property, Rational, Side, VerificationReport,
};
use serde::Serialize;

use crate::expr::{self, Expr};
use crate::gen::{Bounds, Gen};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Filtration,
    SymbolCompat,
    Grothendieck,
    Nilpotency,
    Centralizer,
    Adjoint,
    Cocycle,
    AutD1,
    AutD,
    AutS,
    Roundtrip,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Filtration,
        Suite::SymbolCompat,
        Suite::Grothendieck,
        Suite::Nilpotency,
        Suite::Centralizer,
        Suite::Adjoint,
        Suite::Cocycle,
        Suite::AutD1,
        Suite::AutD,
        Suite::AutS,
        Suite::Roundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Filtration => "filtration",
            Suite::SymbolCompat => "symbol-compat",
            Suite::Grothendieck => "grothendieck",
            Suite::Nilpotency => "nilpotency",
            Suite::Centralizer => "centralizer",
            Suite::Adjoint => "adjoint",
            Suite::Cocycle => "cocycle",
            Suite::AutD1 => "aut-d1",
            Suite::AutD => "aut-d",
            Suite::AutS => "aut-s",
            Suite::Roundtrip => "roundtrip",
        }
    }

    fn stream(self) -> u64 {
        match self {
            // Both suites check the same operator pairs.
            Suite::Filtration | Suite::SymbolCompat => 0,
            other => Suite::ALL.iter().position(|s| *s == other).expect("listed") as u64,
        }
    }

    pub fn run(self, seed: u64, knobs: &Knobs) -> SuiteReport {
        let start = Instant::now();
        let mut run = Run {
            report: SuiteReport {
                suite: self.name().to_string(),
                seed,
                cases: 0,
                checks: 0,
                tally: BTreeMap::new(),
                failures: Vec::new(),
                notes: Vec::new(),
                elapsed: Duration::ZERO,
            },
            knobs: *knobs,
        };
        let mut gen = Gen::new(seed, self.stream(), knobs.bounds);
        match self {
            Suite::Filtration => filtration(&mut run, &mut gen),
            Suite::SymbolCompat => symbol_compat(&mut run, &mut gen),
            Suite::Grothendieck => grothendieck(&mut run, &mut gen),
            Suite::Nilpotency => nilpotency(&mut run, &mut gen),
            Suite::Centralizer => centralizer(&mut run, &mut gen),
            Suite::Adjoint => adjoint(&mut run, &mut gen),
            Suite::Cocycle => cocycle(&mut run, &mut gen),
            Suite::AutD1 => aut_d1(&mut run, &mut gen),
            Suite::AutD => aut_d(&mut run, &mut gen),
            Suite::AutS => aut_s(&mut run, &mut gen),
            Suite::Roundtrip => roundtrip(&mut run, &mut gen),
        }
        run.report.elapsed = start.elapsed();
        run.report
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSuite(pub String);

impl fmt::Display for UnknownSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown suite {:?}; expected one of ", self.0)?;
        for s in Suite::ALL {
            write!(f, "{s}, ")?;
        }
        f.write_str("all")
    }
}

impl std::error::Error for UnknownSuite {}

impl FromStr for Suite {
    type Err = UnknownSuite;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

/// `all` or a single suite.
pub fn resolve(name: &str) -> Result<Vec<Suite>, UnknownSuite> {
    if name == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        Ok(vec![name.parse()?])
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Knobs {
    pub bounds: Bounds,
    /// Replaces every per-check case count of a suite.
    pub cases: Option<usize>,
    /// Replaces the number of random automorphism specs.
    pub specs: Option<usize>,
    /// Replaces the number of sample pairs per automorphism spec.
    pub pairs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: String,
    pub inputs: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    /// Random cases drawn.
    pub cases: usize,
    /// Individual identities checked.
    pub checks: usize,
    /// Passing checks per check name.
    pub tally: BTreeMap<String, usize>,
    pub failures: Vec<Failure>,
    /// Observations that are not pass/fail, such as which pair broke a
    /// negative control.
    pub notes: Vec<String>,
    #[serde(rename = "elapsed_ms", serialize_with = "millis")]
    pub elapsed: Duration,
}

fn millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn count(&self, check: &str) -> usize {
        self.tally.get(check).copied().unwrap_or(0)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} cases, {} checks, {:.2} s, seed {})",
            self.suite,
            if self.passed() { "pass" } else { "FAIL" },
            self.cases,
            self.checks,
            self.elapsed.as_secs_f64(),
            self.seed
        )?;
        for (name, n) in &self.tally {
            writeln!(f, "  {name}: {n}")?;
        }
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        for fail in &self.failures {
            writeln!(f, "  failed {}: {}", fail.check, fail.detail)?;
            for input in &fail.inputs {
                writeln!(f, "    input: {input}")?;
            }
        }
        Ok(())
    }
}

struct Run {
    report: SuiteReport,
    knobs: Knobs,
}

impl Run {
    fn cases(&self, default: usize) -> usize {
        self.knobs.cases.unwrap_or(default)
    }

    fn specs(&self, default: usize) -> usize {
        self.knobs.specs.unwrap_or(default)
    }

    fn pairs(&self, default: usize) -> usize {
        self.knobs.pairs.unwrap_or(default)
    }

    fn case(&mut self) {
        self.report.cases += 1;
    }

    fn check<I, D>(&mut self, name: &str, ok: bool, inputs: I, detail: D)
    where
        I: FnOnce() -> Vec<String>,
        D: FnOnce() -> String,
    {
        self.report.checks += 1;
        if ok {
            *self.report.tally.entry(name.to_string()).or_insert(0) += 1;
        } else {
            self.report.failures.push(Failure {
                check: name.to_string(),
                inputs: inputs(),
                detail: detail(),
            });
        }
    }

    fn check_eq<T: PartialEq + fmt::Display>(
        &mut self,
        name: &str,
        actual: &T,
        expected: &T,
        inputs: impl FnOnce() -> Vec<String>,
    ) {
        self.check(name, actual == expected, inputs, || {
            format!("expected {expected}, got {actual}")
        });
    }

    fn verification(&mut self, name: &str, r: &VerificationReport, context: impl FnOnce() -> Vec<String>) {
        // Count the whole report as one check so tallies stay per sample set.
        self.report.checks += r.checks.saturating_sub(1);
        let detail = r.failure.as_ref().map(|c| c.to_string());
        self.check(
            name,
            r.passed(),
            || {
                let mut inputs = context();
                if let Some(c) = &r.failure {
                    inputs.extend(c.inputs.iter().cloned());
                }
                inputs
            },
            || detail.unwrap_or_default(),
        );
    }

    fn note(&mut self, text: String) {
        self.report.notes.push(text);
    }
}

fn texts<T: fmt::Display>(items: &[&T]) -> Vec<String> {
    items.iter().map(|x| x.to_string()).collect()
}

fn operator_pairs(gen: &mut Gen, count: usize) -> Vec<(DiffOp, DiffOp)> {
    (0..count)
        .map(|_| {
            let n = gen.dim();
            (gen.diff_op(n), gen.diff_op(n))
        })
        .collect()
}

fn filtration(run: &mut Run, gen: &mut Gen) {
    for (d, e) in operator_pairs(gen, run.cases(500)) {
        run.case();
        let inputs = || texts(&[&d, &e]);
        let c = d.commutator(&e).expect("same dimension");
        let comp = d.compose(&e).expect("same dimension");
        match (d.order().value(), e.order().value()) {
            (Some(p), Some(q)) => {
                let bound = i64::from(p + q) - 1;
                run.check("filtration law", c.order().at_most(bound), inputs, || {
                    format!("order of [D, E] is {}, bound {bound}", c.order())
                });
                run.check("composition order", comp.order().value() == Some(p + q), inputs, || {
                    format!("order of D∘E is {}, expected {}", comp.order(), p + q)
                });
            }
            _ => run.check("filtration law", c.is_zero(), inputs, || format!("[D, E] = {c}")),
        }
    }
}

fn symbol_compat(run: &mut Run, gen: &mut Gen) {
    for (d, e) in operator_pairs(gen, run.cases(500)) {
        run.case();
        let (Some(p), Some(q)) = (d.order().value(), e.order().value()) else {
            continue;
        };
        let inputs = || texts(&[&d, &e]);
        let sd = PhaseSymbol::principal(&d).expect("nonzero");
        let se = PhaseSymbol::principal(&e).expect("nonzero");
        let c = d.commutator(&e).expect("same dimension");
        let bracket = PhaseSymbol::principal_of_order(&c, i64::from(p + q) - 1).expect("filtration law");
        run.check_eq("bracket symbol", &bracket, &sd.poisson_bracket(&se).expect("same dimension"), inputs);
        let comp = d.compose(&e).expect("same dimension");
        let product = PhaseSymbol::principal_of_order(&comp, i64::from(p + q)).expect("order bound");
        run.check_eq("product symbol", &product, &(&sd * &se), inputs);
    }
    for _ in 0..run.cases(200) {
        run.case();
        let n = gen.dim();
        let (phi, d) = (gen.affine(n), gen.diff_op(n));
        let lhs = PhaseSymbol::total_symbol(&pushforward(&phi, &d).expect("same dimension"));
        let rhs = PhaseSymbol::total_symbol(&d).phase_lift(&phi).expect("same dimension");
        run.check_eq("pushforward symbol", &lhs, &rhs, || vec![d.to_string(), affine_text(&phi)]);
    }
}

fn affine_text(phi: &AffineMap) -> String {
    let comps: Vec<String> = phi.components().iter().map(ToString::to_string).collect();
    format!("x ↦ ({})", comps.join(", "))
}

/// Probes for the inductive filtration: the coordinates plus five random
/// polynomials with every monomial of degree at most 3 present.
pub fn grothendieck_probes(gen: &mut Gen, n: usize) -> Vec<Polynomial> {
    let mut probes: Vec<Polynomial> = (0..n).map(|i| Polynomial::var(n, i)).collect();
    probes.extend((0..5).map(|_| gen.dense_polynomial(n, 3)));
    probes
}

fn grothendieck(run: &mut Run, gen: &mut Gen) {
    let max_order = run.knobs.bounds.max_order.min(3);
    for _ in 0..run.cases(200) {
        run.case();
        let n = gen.dim();
        let d = gen.diff_op_with(n, max_order, run.knobs.bounds.max_degree);
        let probes = grothendieck_probes(gen, n);
        for level in -1..=i64::from(max_order) + 1 {
            let member = d.grothendieck_member(level, &probes).expect("same dimension");
            let expected = d.order().at_most(level);
            run.check("inductive order", member == expected, || vec![d.to_string(), level.to_string()], || {
                format!("member at level {level} is {member}, order is {}", d.order())
            });
        }
    }
    let zero = DiffOp::zero(1);
    let probes = [Polynomial::var(1, 0)];
    run.check("inductive order", zero.grothendieck_member(-1, &probes) == Ok(true), || vec!["0".into()], || {
        "zero operator is not in level -1".into()
    });
}

/// Least `k` with `Dᵏ f = 0`, by repeated application.
fn annihilation_steps(d: &DiffOp, f: &Polynomial, max: u32) -> Option<u32> {
    let mut g = f.clone();
    for k in 0..=max {
        if g.is_zero() {
            return Some(k);
        }
        g = d.apply(&g).expect("same dimension");
    }
    None
}

fn nilpotency(run: &mut Run, gen: &mut Gen) {
    let d1 = DiffOp::derivation(1, 0);
    let x = Polynomial::var(1, 0);
    for k in 0..=6u32 {
        run.case();
        let f = x.pow(k);
        let w = d1.ad_nilpotency_witness(&f, 8).expect("same dimension");
        run.check("witness of d1 on monomials", w == Some(k + 1), || vec![f.to_string()], || format!("{w:?}"));
    }
    run.case();
    let euler = DiffOp::multiplication(x.clone()).compose(&d1).expect("same dimension");
    let w = euler.ad_nilpotency_witness(&x, 20).expect("same dimension");
    run.check("euler field is not nilpotent", w.is_none(), || vec![euler.to_string()], || format!("{w:?}"));

    for _ in 0..run.cases(200) {
        run.case();
        let n = gen.dim();
        let field = DiffOp::vector_field(
            &(0..n)
                .map(|_| Polynomial::constant(n, gen.coefficient()))
                .collect::<Vec<_>>(),
        )
        .expect("same dimension");
        let f = gen.nonzero_polynomial(n, run.knobs.bounds.max_degree);
        let max = run.knobs.bounds.max_degree + 2;
        let w = field.ad_nilpotency_witness(&f, max).expect("same dimension");
        let expected = annihilation_steps(&field, &f, max);
        run.check(
            "constant field witness",
            w == expected,
            || vec![field.to_string(), f.to_string()],
            || format!("witness {w:?}, expected {expected:?}"),
        );
        let g = DiffOp::multiplication(gen.nonzero_polynomial(n, 3));
        let w = g.ad_nilpotency_witness(&f, 4).expect("same dimension");
        run.check("functions commute", w == Some(1), || vec![g.to_string(), f.to_string()], || format!("{w:?}"));
    }
}

/// `F` with `∂₁F = f`.
fn antiderivative(f: &Polynomial) -> Polynomial {
    Polynomial::from_terms(
        f.dim(),
        f.terms().map(|(idx, c)| {
            let e = idx.get(0);
            (idx.with(0, e + 1), c / rat(i64::from(e) + 1))
        }),
    )
}

fn centralizer(run: &mut Run, gen: &mut Gen) {
    run.case();
    let one = DiffOp::derivation(1, 0)
        .commutator(&DiffOp::multiplication(Polynomial::var(1, 0)))
        .expect("same dimension");
    run.check_eq("non-singularity", &one, &DiffOp::identity(1), || vec!["[d1, x1]".into()]);
    for i in 0..3 {
        for j in 0..3 {
            let c = DiffOp::derivation(3, i)
                .commutator(&DiffOp::multiplication(Polynomial::var(3, j)))
                .expect("same dimension");
            let expected = if i == j { DiffOp::identity(3) } else { DiffOp::zero(3) };
            run.check_eq("canonical pairs", &c, &expected, || vec![format!("[d{}, x{}]", i + 1, j + 1)]);
        }
    }

    for _ in 0..run.cases(200) {
        run.case();
        let n = gen.dim();
        let deg = run.knobs.bounds.max_degree;
        let (f, g, d) = (gen.polynomial(n, deg), gen.polynomial(n, deg), gen.diff_op(n));
        let inputs = || vec![f.to_string(), g.to_string(), d.to_string()];
        let mf = DiffOp::multiplication(f.clone());
        let mg = DiffOp::multiplication(g.clone());
        let left = |e: &DiffOp| e.multiply(Side::Left, &f).expect("same dimension");
        let right = |e: &DiffOp| e.multiply(Side::Right, &f).expect("same dimension");
        let ad_g = |e: &DiffOp| mg.commutator(e).expect("same dimension");
        run.check_eq("left minus right", &(&left(&d) - &right(&d)), &mf.commutator(&d).expect("same dimension"), inputs);
        run.check_eq("left multiplication commutes with ad", &left(&ad_g(&d)), &ad_g(&left(&d)), inputs);
        run.check_eq("right multiplication commutes with ad", &right(&ad_g(&d)), &ad_g(&right(&d)), inputs);

        let h = &f + &g;
        let sum = DiffOp::derivation(n, 0)
            .commutator(&DiffOp::multiplication(antiderivative(&h)))
            .expect("same dimension");
        run.check_eq("function as a bracket", &sum, &DiffOp::multiplication(h.clone()), || vec![h.to_string()]);
    }
}

fn adjoint(run: &mut Run, gen: &mut Gen) {
    let pairs = operator_pairs(gen, run.cases(200));
    for (d, e) in &pairs {
        run.case();
        let inputs = || texts(&[d, e]);
        let de = d.compose(e).expect("same dimension");
        let rhs = e.formal_adjoint().compose(&d.formal_adjoint()).expect("same dimension");
        run.check_eq("adjoint reverses products", &de.formal_adjoint(), &rhs, inputs);
        run.check_eq("adjoint is an involution", &d.formal_adjoint().formal_adjoint(), d, inputs);
        run.check_eq("conjugation is an involution", &d.conjugate().conjugate(), d, inputs);
        let c = d.commutator(e).expect("same dimension");
        let rhs = d.conjugate().commutator(&e.conjugate()).expect("same dimension");
        run.check_eq("conjugation preserves brackets", &c.conjugate(), &rhs, inputs);
    }
    let report = verify_lie_automorphism(DiffOp::conjugate, &pairs);
    run.verification("conjugation is a lie automorphism", &report, Vec::new);

    let branch = |n: usize| {
        D1AutoSpec::new(-Rational::one(), Rational::one(), ClosedOneForm::zero(n), AffineMap::identity(n))
            .expect("kappa is nonzero")
    };
    for _ in 0..run.cases(200) {
        run.case();
        let n = gen.dim();
        let d = gen.first_order(n);
        let expected = branch(n).apply(&d).expect("first order");
        run.check_eq("conjugation on first-order operators", &d.conjugate(), &expected, || vec![d.to_string()]);
    }
}

fn cocycle(run: &mut Run, gen: &mut Gen) {
    for _ in 0..run.cases(200) {
        run.case();
        let n = gen.dim();
        let (x, y) = (gen.vector_field(n), gen.vector_field(n));
        let div = |v: &DiffOp| v.divergence().expect("vector field");
        let lhs = div(&x.commutator(&y).expect("same dimension"));
        let rhs = &x.apply(&div(&y)).expect("same dimension") - &y.apply(&div(&x)).expect("same dimension");
        run.check_eq("divergence cocycle", &lhs, &rhs, || texts(&[&x, &y]));

        let f = gen.polynomial(n, run.knobs.bounds.max_degree);
        let fx = x.multiply(Side::Left, &f).expect("same dimension");
        let rhs = &(&f * &div(&x)) + &x.apply(&f).expect("same dimension");
        run.check_eq("divergence of f X", &div(&fx), &rhs, || vec![f.to_string(), x.to_string()]);
    }
}

fn d1_pairs(gen: &mut Gen, n: usize, count: usize) -> Vec<(DiffOp, DiffOp)> {
    (0..count).map(|_| (gen.first_order(n), gen.first_order(n))).collect()
}

fn d1_text(spec: &D1AutoSpec) -> String {
    format!(
        "kappa {}, lambda {}, omega {}, phi {}",
        spec.kappa(),
        spec.lambda(),
        spec.omega().form(),
        affine_text(spec.phi())
    )
}

fn aut_d1(run: &mut Run, gen: &mut Gen) {
    let pairs_per_spec = run.pairs(200);
    for _ in 0..run.specs(20) {
        run.case();
        let n = gen.dim();
        let spec = gen.d1_spec(n);
        let phi = |d: &DiffOp| spec.apply(d).expect("first order");
        let pairs = d1_pairs(gen, n, pairs_per_spec);
        let report = verify_lie_automorphism(phi, &pairs);
        run.verification("lie automorphism", &report, || vec![d1_text(&spec)]);

        let got = auto::extract_d1_params(n, phi);
        run.check(
            "extraction round trip",
            got.as_ref() == Ok(&spec),
            || vec![d1_text(&spec)],
            || match &got {
                Ok(s) => format!("recovered {}", d1_text(s)),
                Err(e) => e.to_string(),
            },
        );

        let exp_branch = D1AutoSpec::new(Rational::one(), Rational::zero(), spec.omega().clone(), AffineMap::identity(n))
            .expect("kappa is nonzero");
        for (d, _) in pairs.iter().take(20) {
            let lhs = auto::exp_omega(spec.omega(), d).expect("same dimension");
            let rhs = exp_branch.apply(d).expect("first order");
            run.check_eq("exp omega on first-order operators", &lhs, &rhs, || {
                vec![spec.omega().form().to_string(), d.to_string()]
            });
        }
    }
}

fn d_text(spec: &DAutoSpec) -> String {
    format!("a {}, omega {}, phi {}", spec.a(), spec.omega().form(), affine_text(spec.phi()))
}

fn aut_d(run: &mut Run, gen: &mut Gen) {
    let pairs_per_spec = run.pairs(200);
    let max_order = run.knobs.bounds.max_order;
    let specs: Vec<(usize, DAutoSpec)> = (0..run.specs(12))
        .map(|_| {
            let n = gen.dim();
            (n, gen.d_spec(n))
        })
        .collect();
    for (k, (n, spec)) in specs.iter().enumerate() {
        let n = *n;
        run.case();
        let phi = |d: &DiffOp| spec.apply(d).expect("same dimension");
        let pairs: Vec<_> = (0..pairs_per_spec).map(|_| (gen.diff_op(n), gen.diff_op(n))).collect();
        let report = verify_lie_automorphism(phi, &pairs);
        run.verification("lie automorphism", &report, || vec![d_text(spec)]);

        let samples: Vec<DiffOp> = (0..=max_order)
            .flat_map(|i| (0..4).map(move |_| i))
            .map(|i| gen.diff_op_of_order(n, i))
            .collect();
        let kappa = spec.kappa();
        let push = |d: &DiffOp| pushforward(spec.phi(), d).expect("same dimension");
        let report = verify_filtration_respect(phi, &kappa, push, &samples);
        run.verification("filtration respect", &report, || vec![d_text(spec)]);

        // The reduced automorphism φ_*⁻¹∘Φ has leading part κ^{1−i}·id.
        let back = spec.phi().inverse();
        let reduced = |d: &DiffOp| pushforward(&back, &phi(d)).expect("same dimension");
        let report = verify_filtration_respect(reduced, &kappa, DiffOp::clone, &samples);
        run.verification("reduced filtration respect", &report, || vec![d_text(spec)]);

        for _ in 0..20 {
            let f = gen.polynomial(n, run.knobs.bounds.max_degree);
            let image = phi(&DiffOp::multiplication(f.clone()));
            let expected = DiffOp::multiplication(back.pullback(&f).expect("same dimension").scale(&kappa));
            run.check_eq("restriction to functions", &image, &expected, || vec![d_text(spec), f.to_string()]);
        }

        if let Some((_, other)) = specs[k + 1..].iter().find(|(m, _)| *m == n) {
            let composite = |d: &DiffOp| other.apply(&phi(d)).expect("same dimension");
            let report = verify_lie_automorphism(composite, &pairs[..pairs.len().min(20)]);
            run.verification("group closure", &report, || vec![d_text(spec), d_text(other)]);
        }
    }
}

fn s_text(spec: &opcalc_core::SAutoSpec) -> String {
    format!("kappa {}, omega {}, phi {}", spec.kappa(), spec.omega().form(), affine_text(spec.phi()))
}

fn aut_s(run: &mut Run, gen: &mut Gen) {
    let pairs_per_spec = run.pairs(200);
    for _ in 0..run.specs(20) {
        run.case();
        let n = gen.dim();
        let spec = gen.s_spec(n);
        let pairs: Vec<_> = (0..pairs_per_spec).map(|_| (gen.symbol(n), gen.symbol(n))).collect();
        let report = verify_lie_automorphism(|p: &PhaseSymbol| spec.apply(p).expect("same dimension"), &pairs);
        run.verification("poisson automorphism", &report, || vec![s_text(&spec)]);
    }

    // Translating fibers by a form that is not closed is not symplectic.
    let w = OneForm::new(vec![Polynomial::var(2, 1), Polynomial::zero(2)]).expect("same dimension");
    let (xi1, xi2) = (PhaseSymbol::fiber(2, 0), PhaseSymbol::fiber(2, 1));
    let shift = |p: &PhaseSymbol| p.translate_fibers(&w).expect("same dimension");
    let lhs = shift(&xi1).poisson_bracket(&shift(&xi2)).expect("same dimension");
    let before = xi1.poisson_bracket(&xi2).expect("same dimension");
    run.check("non-closed translation breaks the canonical pair", lhs != shift(&before), || vec![w.to_string()], || {
        format!("{{xi1 + x2, xi2}} = {lhs}")
    });
    let n = gen.dim_at_least(2);
    let w = gen.non_closed_form(n);
    let pairs: Vec<_> = (0..run.cases(200)).map(|_| (gen.symbol(n), gen.symbol(n))).collect();
    let report = verify_lie_automorphism(|p: &PhaseSymbol| p.translate_fibers(&w).expect("same dimension"), &pairs);
    let broke = report.failure.as_ref().is_some_and(|c| c.property == Property::Bracket);
    run.check("non-closed translation is rejected", broke, || vec![w.to_string()], || {
        "bracket preserved on every sample".into()
    });
    if let Some(c) = &report.failure {
        run.note(format!("negative control with omega {w}: {c}"));
    }

    for _ in 0..run.cases(200) {
        run.case();
        let n = gen.dim();
        let (p, q) = (gen.symbol(n), gen.symbol(n));
        let lhs = p.poisson_bracket(&q).expect("same dimension").degree_derivation();
        let rhs = &p.degree_derivation().poisson_bracket(&q).expect("same dimension")
            + &p.poisson_bracket(&q.degree_derivation()).expect("same dimension");
        run.check_eq("degree derivation", &lhs, &rhs, || texts(&[&p, &q]));
    }

    // U_κ is not multiplicative: grade-one symbols multiply into grade two.
    let two = rat(2);
    let (p, q) = (xi1.clone(), &xi2 + &PhaseSymbol::function(Polynomial::var(2, 0)).checked_mul(&xi1).expect("same dimension"));
    let u = |s: &PhaseSymbol| s.u_kappa(&two).expect("kappa is nonzero");
    let lhs = u(&(&p * &q));
    let rhs = &u(&p) * &u(&q);
    run.check("u_2 is not multiplicative", lhs != rhs, || texts(&[&p, &q]), || format!("U_2(PQ) = U_2(P)U_2(Q) = {lhs}"));
    run.note(format!("U_2({p} * {q}) = {lhs}, U_2({p}) * U_2({q}) = {rhs}"));
}

fn roundtrip(run: &mut Run, gen: &mut Gen) {
    for _ in 0..run.cases(200) {
        run.case();
        let n = gen.dim();
        let d = gen.diff_op(n);
        let sym = PhaseSymbol::total_symbol(&d);
        run.check_eq("quantize after symbol", &sym.quantize(), &d, || vec![d.to_string()]);
        let p = gen.symbol(n);
        run.check_eq("symbol after quantize", &PhaseSymbol::total_symbol(&p.quantize()), &p, || vec![p.to_string()]);

        let text = d.to_string();
        let back = Expr::parse_operator(&text, n).map(|e| e.to_string());
        run.check("operator text fixed point", back.as_deref() == Ok(text.as_str()), || vec![text.clone()], || {
            format!("{back:?}")
        });
        let text = p.to_string();
        let back = Expr::parse_symbol(&text, n).map(|e| e.to_string());
        run.check("symbol text fixed point", back.as_deref() == Ok(text.as_str()), || vec![text.clone()], || {
            format!("{back:?}")
        });
    }

    for _ in 0..run.cases(100) {
        run.case();
        let n = gen.dim();
        let f = gen.polynomial(n, run.knobs.bounds.max_degree + 1);
        let w = OneForm::exact(&f);
        match poincare_potential(&w) {
            Ok(g) => {
                run.check_eq("potential differential", &OneForm::exact(&g), &w, || vec![w.to_string()]);
                let zero = vec![Rational::zero(); n];
                let at_origin = g.evaluate(&zero).expect("same dimension");
                let shift = (&f - &g).as_constant();
                run.check(
                    "potential normalization",
                    at_origin.is_zero() && shift.is_some(),
                    || vec![f.to_string()],
                    || format!("potential {g}"),
                );
            }
            Err(e) => run.check("potential differential", false, || vec![w.to_string()], || e.to_string()),
        }
    }

    for _ in 0..run.cases(100) {
        run.case();
        let n = gen.dim();
        let e = gen.expression(n, 4);
        let f = gen.polynomial(n, 5);
        let normal = e.to_operator(n).expect("no fiber variables");
        let direct = e.act(&f).expect("no fiber variables");
        run.check_eq("normal order matches action", &normal.apply(&f).expect("same dimension"), &direct, || {
            vec![e.to_string(), f.to_string()]
        });
        let reparsed = expr::parse(&e.to_string(), n).map(|x| x.without_offsets());
        run.check("expression text round trip", reparsed.as_ref() == Ok(&e), || vec![e.to_string()], || {
            format!("{reparsed:?}")
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
        assert_eq!(resolve("all").unwrap().len(), 11);
        assert!(resolve("bogus").is_err());
    }

    #[test]
    fn small_runs_pass_and_are_deterministic() {
        let knobs = Knobs {
            cases: Some(4),
            specs: Some(2),
            pairs: Some(4),
            ..Knobs::default()
        };
        for s in Suite::ALL {
            let a = s.run(3, &knobs);
            assert!(a.passed(), "{a}");
            let b = s.run(3, &knobs);
            assert_eq!((a.cases, a.checks, &a.tally), (b.cases, b.checks, &b.tally));
        }
    }

    #[test]
    fn antiderivative_inverts_the_partial() {
        let f = Polynomial::var(2, 0).pow(2);
        assert_eq!(antiderivative(&f).partial_derive(0).unwrap(), f);
    }
}
