//! Command-line front end.
//!
//! Exit codes: 0 on success or a passing verification, 1 when a
//! verification suite fails, 2 for usage, parse and invalid-input errors.

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use opcalc_core::{auto, DiffOp, OneForm, PhaseSymbol, Polynomial};
use serde_json::{json, Map, Value};

use crate::expr::{self, Expr, ParseError};
use crate::gen::Bounds;
use crate::spec_file::{self, AutoSpec};
use crate::suites::{self, Knobs};

#[derive(Debug, Parser)]
#[command(name = "opcalc", version, about = "Exact calculus of differential operators with polynomial coefficients")]
pub struct Cli {
    /// Dimension n of the ambient space (variables x1..xn). Defaults to the
    /// largest index used by the operands.
    #[arg(short = 'n', long = "dim", global = true, value_parser = clap::value_parser!(u8).range(1..=8))]
    dim: Option<u8>,

    /// Print a single JSON record instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    D1,
    D,
    S,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Commutator [A, B] = A∘B − B∘A.
    Bracket {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Composition A∘B in normal order.
    Compose {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Order of an operator, or `none` for zero.
    Order {
        #[arg(allow_hyphen_values = true)]
        op: String,
    },
    /// Total symbol of an operator.
    Symbol {
        #[arg(allow_hyphen_values = true)]
        op: String,
    },
    /// Principal symbol, or the symbol of a given order.
    Psymbol {
        #[arg(long, allow_hyphen_values = true)]
        order: Option<i64>,
        #[arg(allow_hyphen_values = true)]
        op: String,
    },
    /// Formal adjoint D*.
    Adjoint {
        #[arg(allow_hyphen_values = true)]
        op: String,
    },
    /// Conjugation C(D) = −D*.
    Conjugate {
        #[arg(allow_hyphen_values = true)]
        op: String,
    },
    /// Poisson bracket of two symbols in x and xi.
    Poisson {
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
    /// Least k with ad_D^k(m_f) = 0, or `none`.
    Nilpotency {
        #[arg(long = "op", allow_hyphen_values = true)]
        op: String,
        #[arg(long = "fn", allow_hyphen_values = true)]
        function: String,
        #[arg(long, default_value_t = 16)]
        max: u32,
    },
    /// Divergence of a vector field.
    Divergence {
        #[arg(allow_hyphen_values = true)]
        field: String,
    },
    /// Potential f with df = ω and f(0) = 0, from the components of ω.
    Potential {
        #[arg(required = true, allow_hyphen_values = true)]
        components: Vec<String>,
    },
    /// Applies an automorphism described by a spec file.
    ApplyAuto {
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long)]
        spec: PathBuf,
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Recovers the parameters of a first-order automorphism from its
    /// action, using the map described by a d1 spec file as the black box.
    ExtractD1 {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Runs a verification suite, or `all` of them.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per check (overrides every suite default).
        #[arg(long)]
        cases: Option<usize>,
        /// Random automorphism specs per family.
        #[arg(long)]
        specs: Option<usize>,
        /// Sample pairs per automorphism spec.
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=8))]
        max_dim: u8,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
        /// Coefficients are drawn from -COEFF..=COEFF.
        #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(i64).range(1..))]
        coeff: i64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bracket { .. } => "bracket",
            Command::Compose { .. } => "compose",
            Command::Order { .. } => "order",
            Command::Symbol { .. } => "symbol",
            Command::Psymbol { .. } => "psymbol",
            Command::Adjoint { .. } => "adjoint",
            Command::Conjugate { .. } => "conjugate",
            Command::Poisson { .. } => "poisson",
            Command::Nilpotency { .. } => "nilpotency",
            Command::Divergence { .. } => "divergence",
            Command::Potential { .. } => "potential",
            Command::ApplyAuto { .. } => "apply-auto",
            Command::ExtractD1 { .. } => "extract-d1",
            Command::Verify { .. } => "verify",
        }
    }
}

/// What a run printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Parse { operand: String, error: ParseError },
    Input(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Parse { operand, error } => {
                writeln!(f, "parse error: {error}")?;
                writeln!(f, "  {operand}")?;
                write!(f, "  {}^", " ".repeat(operand[..error.offset().min(operand.len())].chars().count()))
            }
            Failure::Input(msg) => write!(f, "error: {msg}"),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

enum Output {
    Text(String),
    Report { passed: bool, text: String, json: Value, seed: u64 },
}

/// Operands after `-` has been replaced by standard input.
struct Operands<'a> {
    stdin: &'a mut dyn Read,
    used: bool,
}

impl Operands<'_> {
    fn resolve(&mut self, text: &str) -> Result<String, Failure> {
        if text != "-" {
            return Ok(text.to_string());
        }
        if self.used {
            return Err(Failure::Input("standard input can be used for one operand only".into()));
        }
        self.used = true;
        let mut buf = String::new();
        self.stdin
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Input(format!("reading standard input: {e}")))?;
        Ok(buf.trim().to_string())
    }
}

struct Ctx {
    dim: usize,
}

impl Ctx {
    fn operator(&self, text: &str) -> Result<DiffOp, Failure> {
        Expr::parse_operator(text, self.dim).map_err(|error| Failure::Parse {
            operand: text.to_string(),
            error,
        })
    }

    fn symbol(&self, text: &str) -> Result<PhaseSymbol, Failure> {
        Expr::parse_symbol(text, self.dim).map_err(|error| Failure::Parse {
            operand: text.to_string(),
            error,
        })
    }

    fn function(&self, text: &str) -> Result<Polynomial, Failure> {
        let op = self.operator(text)?;
        if !op.order().at_most(0) {
            return Err(Failure::Input(format!("{text:?} is not a function")));
        }
        Ok(op.zeroth_part())
    }
}

fn choose_dim(explicit: Option<u8>, texts: &[&str], spec_text: Option<&str>) -> Result<usize, Failure> {
    if let Some(n) = explicit {
        return Ok(usize::from(n));
    }
    if let Some(n) = spec_text.and_then(spec_file::declared_dim) {
        return Ok(n);
    }
    let from_spec = spec_text.map_or(0, spec_file::omega_max_index);
    let n = texts.iter().map(|t| expr::max_index(t)).max().unwrap_or(0).max(from_spec).max(1);
    if n > 8 {
        return Err(Failure::Input(format!("dimension {n} exceeds 8; pass -n explicitly")));
    }
    Ok(n)
}

fn read_spec(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("reading {}: {e}", path.display())))
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<(Map<String, Value>, Output), Failure> {
    let mut ops = Operands { stdin, used: false };
    let mut inputs = Map::new();
    let record = |inputs: &mut Map<String, Value>, key: &str, value: &str| {
        inputs.insert(key.to_string(), Value::String(value.to_string()));
    };

    macro_rules! operands {
        ($($key:literal => $val:expr),*) => {{
            let vals = [$(ops.resolve($val)?),*];
            let keys = [$($key),*];
            for (k, v) in keys.iter().zip(&vals) {
                record(&mut inputs, k, v);
            }
            vals
        }};
    }

    let text = |s: String| Output::Text(s);
    let output = match &cli.command {
        Command::Bracket { a, b } | Command::Compose { a, b } => {
            let [a, b] = operands!("a" => a, "b" => b);
            let ctx = Ctx { dim: choose_dim(cli.dim, &[&a, &b], None)? };
            let (a, b) = (ctx.operator(&a)?, ctx.operator(&b)?);
            let result = if matches!(cli.command, Command::Bracket { .. }) {
                a.commutator(&b)
            } else {
                a.compose(&b)
            };
            text(result.map_err(input)?.to_string())
        }
        Command::Order { op } => {
            let [op] = operands!("op" => op);
            let ctx = Ctx { dim: choose_dim(cli.dim, &[&op], None)? };
            text(ctx.operator(&op)?.order().to_string())
        }
        Command::Symbol { op } => {
            let [op] = operands!("op" => op);
            let ctx = Ctx { dim: choose_dim(cli.dim, &[&op], None)? };
            text(PhaseSymbol::total_symbol(&ctx.operator(&op)?).to_string())
        }
        Command::Psymbol { order, op } => {
            let [op] = operands!("op" => op);
            if let Some(i) = order {
                record(&mut inputs, "order", &i.to_string());
            }
            let ctx = Ctx { dim: choose_dim(cli.dim, &[&op], None)? };
            let d = ctx.operator(&op)?;
            let s = match order {
                Some(i) => PhaseSymbol::principal_of_order(&d, *i),
                None => PhaseSymbol::principal(&d),
            };
            text(s.map_err(input)?.to_string())
        }
        Command::Adjoint { op } | Command::Conjugate { op } => {
            let [op] = operands!("op" => op);
            let ctx = Ctx { dim: choose_dim(cli.dim, &[&op], None)? };
            let d = ctx.operator(&op)?;
            text(if matches!(cli.command, Command::Adjoint { .. }) {
                d.formal_adjoint()
            } else {
                d.conjugate()
            }
            .to_string())
        }
        Command::Poisson { p, q } => {
            let [p, q] = operands!("p" => p, "q" => q);
            let ctx = Ctx { dim: choose_dim(cli.dim, &[&p, &q], None)? };
            let (p, q) = (ctx.symbol(&p)?, ctx.symbol(&q)?);
            text(p.poisson_bracket(&q).map_err(input)?.to_string())
        }
        Command::Nilpotency { op, function, max } => {
            let [op, f] = operands!("op" => op, "fn" => function);
            record(&mut inputs, "max", &max.to_string());
            let ctx = Ctx { dim: choose_dim(cli.dim, &[&op, &f], None)? };
            let (d, f) = (ctx.operator(&op)?, ctx.function(&f)?);
            let w = d.ad_nilpotency_witness(&f, *max).map_err(input)?;
            text(w.map_or("none".to_string(), |k| k.to_string()))
        }
        Command::Divergence { field } => {
            let [field] = operands!("field" => field);
            let ctx = Ctx { dim: choose_dim(cli.dim, &[&field], None)? };
            text(ctx.operator(&field)?.divergence().map_err(input)?.to_string())
        }
        Command::Potential { components } => {
            let mut comps = Vec::with_capacity(components.len());
            for (i, c) in components.iter().enumerate() {
                let c = ops.resolve(c)?;
                record(&mut inputs, &format!("omega{}", i + 1), &c);
                comps.push(c);
            }
            let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
            let n = match cli.dim {
                Some(n) => usize::from(n),
                None => choose_dim(None, &refs, None)?.max(comps.len()),
            };
            if comps.len() != n {
                return Err(Failure::Input(format!("expected {n} components for dimension {n}, got {}", comps.len())));
            }
            let ctx = Ctx { dim: n };
            let comps = comps.iter().map(|c| ctx.function(c)).collect::<Result<Vec<_>, _>>()?;
            let w = OneForm::new(comps).map_err(input)?;
            let w = w.into_closed().map_err(|_| Failure::Input("the form is not closed".into()))?;
            text(w.potential().to_string())
        }
        Command::ApplyAuto { family, spec, input: operand } => {
            let [operand] = operands!("input" => operand);
            record(&mut inputs, "spec", &spec.display().to_string());
            let spec_text = read_spec(spec)?;
            let n = choose_dim(cli.dim, &[&operand], Some(&spec_text))?;
            let auto = AutoSpec::parse(&spec_text, Some(n)).map_err(|e| Failure::Input(format!("{}: {e}", spec.display())))?;
            let wanted = family.map(|f| match f {
                Family::D1 => "d1",
                Family::D => "d",
                Family::S => "s",
            });
            if let Some(w) = wanted.filter(|w| *w != auto.family()) {
                return Err(Failure::Input(format!("--family {w} does not match the spec's family {}", auto.family())));
            }
            let ctx = Ctx { dim: n };
            text(match &auto {
                AutoSpec::D1(s) => s.apply(&ctx.operator(&operand)?).map_err(input)?.to_string(),
                AutoSpec::D(s) => s.apply(&ctx.operator(&operand)?).map_err(input)?.to_string(),
                AutoSpec::S(s) => s.apply(&ctx.symbol(&operand)?).map_err(input)?.to_string(),
            })
        }
        Command::ExtractD1 { spec } => {
            record(&mut inputs, "spec", &spec.display().to_string());
            let spec_text = read_spec(spec)?;
            let n = choose_dim(cli.dim, &[], Some(&spec_text))?;
            let auto = AutoSpec::parse(&spec_text, Some(n)).map_err(|e| Failure::Input(format!("{}: {e}", spec.display())))?;
            let AutoSpec::D1(s) = auto else {
                return Err(Failure::Input(format!("extract-d1 needs a d1 spec, got family {}", auto.family())));
            };
            let got = auto::extract_d1_params(n, |d| s.apply(d).expect("first-order probes")).map_err(input)?;
            text(AutoSpec::D1(got).to_string().trim_end().to_string())
        }
        Command::Verify {
            suite,
            seed,
            cases,
            specs,
            pairs,
            max_dim,
            max_order,
            max_degree,
            coeff,
        } => {
            let list = suites::resolve(suite).map_err(input)?;
            let knobs = Knobs {
                bounds: Bounds {
                    max_dim: usize::from(*max_dim),
                    max_order: *max_order,
                    max_degree: *max_degree,
                    coeff: *coeff,
                    ..Bounds::default()
                },
                cases: *cases,
                specs: *specs,
                pairs: *pairs,
            };
            inputs.insert("suite".into(), json!(suite));
            inputs.insert(
                "bounds".into(),
                json!({
                    "max_dim": max_dim, "max_order": max_order, "max_degree": max_degree,
                    "coeff": coeff, "cases": cases, "specs": specs, "pairs": pairs,
                }),
            );
            let reports: Vec<_> = list.into_iter().map(|s| s.run(*seed, &knobs)).collect();
            let passed = reports.iter().all(|r| r.passed());
            let mut body: String = reports.iter().map(ToString::to_string).collect();
            let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.as_str()).collect();
            body.push_str(&if passed {
                format!("{suite}: pass")
            } else {
                format!("{suite}: FAIL ({})", failed.join(", "))
            });
            Output::Report {
                passed,
                text: body,
                json: json!({ "passed": passed, "suites": reports }),
                seed: *seed,
            }
        }
    };
    Ok((inputs, output))
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (rendered, String::new()) } else { (String::new(), rendered) };
            return Outcome { code, stdout, stderr };
        }
    };
    let command = cli.command.name();
    match execute(&cli, stdin) {
        Ok((inputs, Output::Text(result))) => Outcome {
            code: 0,
            stdout: if cli.json {
                json!({ "command": command, "inputs": inputs, "result": result, "seed": null }).to_string() + "\n"
            } else {
                result + "\n"
            },
            stderr: String::new(),
        },
        Ok((inputs, Output::Report { passed, text, json, seed })) => Outcome {
            code: if passed { 0 } else { 1 },
            stdout: if cli.json {
                json!({ "command": command, "inputs": inputs, "report": json, "seed": seed }).to_string() + "\n"
            } else {
                text + "\n"
            },
            stderr: String::new(),
        },
        Err(failure) => Outcome {
            code: 2,
            stdout: if cli.json {
                json!({ "command": command, "error": failure.to_string(), "seed": null }).to_string() + "\n"
            } else {
                String::new()
            },
            stderr: failure.to_string() + "\n",
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(args: &[&str]) -> Outcome {
        let mut argv = vec!["opcalc"];
        argv.extend_from_slice(args);
        run(argv, &mut std::io::empty())
    }

    fn ok(args: &[&str]) -> String {
        let out = sh(args);
        assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
        out.stdout.trim_end().to_string()
    }

    #[test]
    fn documented_examples() {
        assert_eq!(ok(&["bracket", "-n", "1", "d1", "x1"]), "1");
        assert_eq!(ok(&["symbol", "-n", "2", "d1^2 + x1*d2"]), "xi1^2 + x1*xi2");
        assert_eq!(ok(&["nilpotency", "-n", "1", "--op", "d1", "--fn", "x1^3", "--max", "10"]), "4");
    }

    #[test]
    fn operator_commands() {
        assert_eq!(ok(&["compose", "d1", "x1"]), "x1*d1 + 1");
        assert_eq!(ok(&["order", "x1^2*d1*d2 + d3"]), "2");
        assert_eq!(ok(&["order", "x1*d1 - d1*x1 + 1"]), "none");
        assert_eq!(ok(&["psymbol", "d1^2 + d2"]), "xi1^2");
        assert_eq!(ok(&["psymbol", "--order", "3", "d1^2"]), "0");
        assert_eq!(ok(&["adjoint", "x1*d1"]), "-x1*d1 - 1");
        assert_eq!(ok(&["conjugate", "x1*d1"]), "x1*d1 + 1");
        assert_eq!(ok(&["poisson", "xi1^2", "x1"]), "2*xi1");
        assert_eq!(ok(&["nilpotency", "--op", "x1*d1", "--fn", "x1", "--max", "20"]), "none");
        assert_eq!(ok(&["divergence", "x2*d1 + x1*d2"]), "0");
        assert_eq!(ok(&["potential", "x2", "x1"]), "x1*x2");
        assert_eq!(ok(&["potential", "-n", "2", "2*x1*x2^2", "2*x1^2*x2"]), "x1^2*x2^2");
        assert_eq!(ok(&["bracket", "-x1", "d1"]), "1");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(sh(&["bracket", "d0", "x1"]).code, 2);
        assert_eq!(sh(&["bracket", "-n", "2", "x3", "x1"]).code, 2);
        assert_eq!(sh(&["frobnicate"]).code, 2);
        assert_eq!(sh(&["bracket", "x1"]).code, 2);
        assert_eq!(sh(&["-n", "9", "order", "x1"]).code, 2);
        assert_eq!(sh(&["divergence", "d1^2"]).code, 2);
        assert_eq!(sh(&["potential", "x2", "0"]).code, 2);
        assert_eq!(sh(&["psymbol", "--order", "1", "d1^2"]).code, 2);
        assert_eq!(sh(&["nilpotency", "--op", "d1", "--fn", "d1"]).code, 2);
        assert_eq!(sh(&["verify", "nonsense"]).code, 2);
        assert_eq!(sh(&["apply-auto", "--spec", "/nonexistent/spec", "d1"]).code, 2);
    }

    #[test]
    fn parse_errors_point_at_the_offset() {
        let out = sh(&["order", "-n", "2", "x1 + x3"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("offset 5"), "{}", out.stderr);
        assert!(out.stderr.contains("       ^"), "{}", out.stderr);
    }

    #[test]
    fn stdin_operand() {
        let mut input = "x1*d1\n".as_bytes();
        let out = run(["opcalc", "bracket", "-", "d1"], &mut input);
        assert_eq!(out.stdout, "-d1\n");
        let mut input = "x1".as_bytes();
        assert_eq!(run(["opcalc", "bracket", "-", "-"], &mut input).code, 2);
    }

    #[test]
    fn json_records() {
        let out = ok(&["--json", "bracket", "d1", "x1"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "bracket");
        assert_eq!(v["inputs"]["a"], "d1");
        assert_eq!(v["result"], "1");
        assert!(v["seed"].is_null());

        let out = sh(&["verify", "nilpotency", "--seed", "5", "--cases", "3", "--json"]);
        assert_eq!(out.code, 0);
        let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
        assert_eq!(v["seed"], 5);
        assert_eq!(v["report"]["passed"], true);
        assert_eq!(v["report"]["suites"][0]["suite"], "nilpotency");
        assert_eq!(v["report"]["suites"][0]["seed"], 5);
    }
}
