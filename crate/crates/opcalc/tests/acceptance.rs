//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails. All comparisons are exact; the
//! only tolerances are the wall-clock limits below.

use std::cell::OnceCell;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use opcalc::gen::{Bounds, Gen};
use opcalc::suites::{grothendieck_probes, Knobs, Suite, SuiteReport};
use opcalc_core::{DiffOp, PhaseSymbol, Polynomial};

const SEED: u64 = 7;
/// Criterion 1 budget for 500 filtration checks.
const FILTRATION_LIMIT: Duration = Duration::from_secs(10);
/// Criterion 13 budget for `verify all --seed 7`.
const END_TO_END_LIMIT: Duration = Duration::from_secs(60);

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn pairs(count: usize) -> Vec<(DiffOp, DiffOp)> {
    let mut g = Gen::new(SEED, 1000, Bounds::default());
    (0..count)
        .map(|_| {
            let n = g.dim();
            (g.diff_op(n), g.diff_op(n))
        })
        .collect()
}

fn filtration_law(pairs: &[(DiffOp, DiffOp)]) -> Verdict {
    let start = Instant::now();
    for (d, e) in pairs {
        let c = d.commutator(e).map_err(|err| err.to_string())?;
        let ok = match (d.order().value(), e.order().value()) {
            (Some(p), Some(q)) => c.order().at_most(i64::from(p + q) - 1),
            _ => c.is_zero(),
        };
        if !ok {
            return Err(format!("order of [{d}, {e}] is {}", c.order()));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= FILTRATION_LIMIT {
        return Err(format!("{} pairs took {elapsed:.2?}, limit {FILTRATION_LIMIT:?}", pairs.len()));
    }
    Ok(format!("{} pairs in {elapsed:.2?}", pairs.len()))
}

fn symbol_compatibility(pairs: &[(DiffOp, DiffOp)]) -> Verdict {
    let mut checked = 0;
    for (d, e) in pairs {
        let (Some(p), Some(q)) = (d.order().value(), e.order().value()) else {
            continue;
        };
        let (sd, se) = (PhaseSymbol::principal(d).unwrap(), PhaseSymbol::principal(e).unwrap());
        let c = d.commutator(e).unwrap();
        let lhs = sd.poisson_bracket(&se).unwrap();
        let rhs = PhaseSymbol::principal_of_order(&c, i64::from(p + q) - 1).map_err(|err| err.to_string())?;
        if lhs != rhs {
            return Err(format!("bracket symbol differs on [{d}, {e}]: {lhs} vs {rhs}"));
        }
        let comp = d.compose(e).unwrap();
        let rhs = PhaseSymbol::principal_of_order(&comp, i64::from(p + q)).map_err(|err| err.to_string())?;
        if &sd * &se != rhs {
            return Err(format!("product symbol differs on {d} and {e}"));
        }
        checked += 1;
    }
    Ok(format!("{checked} nonzero pairs, bracket and product"))
}

fn grothendieck() -> Verdict {
    let mut g = Gen::new(SEED, 1001, Bounds::default());
    let mut checks = 0;
    for _ in 0..200 {
        let n = g.dim();
        let d = g.diff_op_with(n, 3, 4);
        let probes = grothendieck_probes(&mut g, n);
        if probes.len() != n + 5 {
            return Err(format!("{} probes for n = {n}", probes.len()));
        }
        for level in -1..=4 {
            let member = d.grothendieck_member(level, &probes).unwrap();
            if member != d.order().at_most(level) {
                return Err(format!("{d} at level {level}: member {member}, order {}", d.order()));
            }
            checks += 1;
        }
    }
    Ok(format!("200 operators, {checks} levels"))
}

fn distinguishing_counterexample() -> Verdict {
    let d1 = DiffOp::derivation(1, 0);
    let x1 = Polynomial::var(1, 0);
    for k in 0..=6u32 {
        let witness = d1.ad_nilpotency_witness(&x1.pow(k), 8).unwrap();
        if witness != Some(k + 1) {
            return Err(format!("witness for x1^{k} is {witness:?}"));
        }
    }
    let euler = DiffOp::monomial(opcalc_core::MultiIndex::unit(1, 0), x1.clone());
    match euler.ad_nilpotency_witness(&x1, 20).unwrap() {
        None => Ok("d1 on x1^0..x1^6 gives 1..7; x1*d1 on x1 gives none".into()),
        Some(k) => Err(format!("x1*d1 on x1 has witness {k}")),
    }
}

fn non_singularity() -> Verdict {
    let c = DiffOp::derivation(1, 0)
        .commutator(&DiffOp::multiplication(Polynomial::var(1, 0)))
        .unwrap();
    if c == DiffOp::identity(1) {
        Ok("[d1, x1] = 1".into())
    } else {
        Err(format!("[d1, x1] = {c}"))
    }
}

/// Runs `suite` at the default knobs and requires every listed check to
/// have passed at least the given number of times.
fn suite(suite: Suite, required: &[(&str, usize)]) -> Verdict {
    let report = suite.run(SEED, &Knobs::default());
    tallies(&report, required)
}

fn tallies(report: &SuiteReport, required: &[(&str, usize)]) -> Verdict {
    if let Some(f) = report.failures.first() {
        return Err(format!("{}: {} on {:?}", report.suite, f.detail, f.inputs));
    }
    let mut seen = Vec::new();
    for (check, min) in required {
        let got = report.count(check);
        if got < *min {
            return Err(format!("{}: {check} passed {got} times, need {min}", report.suite));
        }
        seen.push(format!("{check} {got}"));
    }
    Ok(format!("{}: {}", report.suite, seen.join(", ")))
}

fn all_of(parts: Vec<Verdict>) -> Verdict {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join("; "))
}

fn end_to_end() -> Verdict {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_opcalc"))
        .args(["verify", "all", "--seed", "7"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    match out.status.code() {
        Some(0) if elapsed < END_TO_END_LIMIT => Ok(format!("exit 0 in {elapsed:.1?}")),
        Some(0) => Err(format!("exit 0 but took {elapsed:.1?}, limit {END_TO_END_LIMIT:?}")),
        code => Err(format!("exit {code:?}: {}", String::from_utf8_lossy(&out.stdout))),
    }
}

fn main() -> ExitCode {
    let sample = pairs(500);
    let symbols: OnceCell<SuiteReport> = OnceCell::new();
    let aut_s = || symbols.get_or_init(|| Suite::AutS.run(SEED, &Knobs::default()));
    let criteria: Vec<Criterion> = vec![
        ("filtration law", Box::new(|| filtration_law(&sample))),
        ("symbol compatibility", Box::new(|| symbol_compatibility(&sample))),
        ("grothendieck filtration", Box::new(grothendieck)),
        ("distinguishing counterexample", Box::new(distinguishing_counterexample)),
        ("non-singularity", Box::new(non_singularity)),
        (
            "centralizer identities",
            Box::new(|| {
                suite(Suite::Centralizer, &[("left minus right", 200), ("left multiplication commutes with ad", 200)])
            }),
        ),
        (
            "conjugation",
            Box::new(|| {
                suite(
                    Suite::Adjoint,
                    &[
                        ("adjoint reverses products", 200),
                        ("conjugation is an involution", 200),
                        ("conjugation preserves brackets", 200),
                        ("conjugation on first-order operators", 200),
                    ],
                )
            }),
        ),
        (
            "first-order automorphisms",
            Box::new(|| suite(Suite::AutD1, &[("lie automorphism", 20), ("extraction round trip", 20)])),
        ),
        (
            "operator automorphisms",
            Box::new(|| suite(Suite::AutD, &[("lie automorphism", 12), ("filtration respect", 12)])),
        ),
        (
            "symbol automorphisms",
            Box::new(|| tallies(aut_s(), &[("poisson automorphism", 20), ("non-closed translation is rejected", 1)])),
        ),
        (
            "degree derivation",
            Box::new(|| tallies(aut_s(), &[("degree derivation", 200), ("u_2 is not multiplicative", 1)])),
        ),
        (
            "round trips",
            Box::new(|| {
                all_of(vec![
                    suite(
                        Suite::Roundtrip,
                        &[("quantize after symbol", 200), ("symbol after quantize", 200), ("potential differential", 100)],
                    ),
                    suite(Suite::Cocycle, &[("divergence cocycle", 200)]),
                ])
            }),
        ),
        ("end to end", Box::new(end_to_end)),
    ];

    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({detail}) [{secs:.1} s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{secs:.1} s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
