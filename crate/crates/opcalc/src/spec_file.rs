//! Text format for automorphism parameters.
//!
//! One `key = value` pair per line; `#` starts a comment. Keys:
//!
//! ```text
//! family = d1 | d | s        required
//! dim    = n                 required unless supplied by the caller
//! kappa  = p/q               d1, s   (default 1)
//! lambda = p/q               d1      (default 0)
//! a      = 0 | 1             d       (default 0)
//! omega1 … omegaN = f        components of the closed 1-form (default 0)
//! row1 … rowN = a b …        rows of the linear part (default identity)
//! offset = b1 b2 …           translation (default 0)
//! ```
//!
//! Omega components are function expressions in `x1..xn`, so `2*x1` and
//! `x2^2 - 1/3` are both accepted.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::{One, Zero};
use opcalc_core::{
    AffineMap, ClosedOneForm, D1AutoSpec, DAutoSpec, OneForm, Polynomial, Rational, SAutoSpec,
};
use thiserror::Error;

use crate::expr::{self, Expr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutoSpec {
    D1(D1AutoSpec),
    D(DAutoSpec),
    S(SAutoSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SpecError {
    /// 1-based; 0 for problems that are not tied to a line.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError {
        line,
        message: message.into(),
    })
}

pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let ok = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let value = match body.split_once('/') {
        Some((p, q)) if ok(p) && ok(q) => {
            let q: num_bigint::BigInt = q.parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Rational::new(p.parse().ok()?, q)
        }
        None if ok(body) => Rational::from_integer(body.parse().ok()?),
        _ => return None,
    };
    Some(if neg { -value } else { value })
}

impl AutoSpec {
    pub fn family(&self) -> &'static str {
        match self {
            AutoSpec::D1(_) => "d1",
            AutoSpec::D(_) => "d",
            AutoSpec::S(_) => "s",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AutoSpec::D1(s) => s.dim(),
            AutoSpec::D(s) => s.dim(),
            AutoSpec::S(s) => s.dim(),
        }
    }

    /// Parses a spec. `default_dim` is used when the text has no `dim` key;
    /// if both are present they must agree.
    pub fn parse(text: &str, default_dim: Option<usize>) -> Result<AutoSpec, SpecError> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return err(line, format!("expected `key = value`, found {content:?}"));
            };
            let key = key.trim().to_string();
            if entries.contains_key(&key) {
                return err(line, format!("duplicate key {key:?}"));
            }
            entries.insert(key, (line, value.trim().to_string()));
        }

        let take = |entries: &mut BTreeMap<String, (usize, String)>, key: &str| entries.remove(key);
        let Some((fline, family)) = take(&mut entries, "family") else {
            return err(0, "missing key \"family\"");
        };
        let dim = match take(&mut entries, "dim") {
            Some((line, v)) => {
                let n: usize = v.parse().ok().filter(|n| (1..=8).contains(n)).ok_or_else(|| SpecError {
                    line,
                    message: format!("dim must be an integer in 1..=8, found {v:?}"),
                })?;
                if let Some(d) = default_dim.filter(|&d| d != n) {
                    return err(line, format!("dim {n} disagrees with the requested dimension {d}"));
                }
                n
            }
            None => match default_dim {
                Some(d) => d,
                None => return err(0, "missing key \"dim\""),
            },
        };

        let rational = |entry: Option<(usize, String)>, default: Rational| -> Result<Rational, SpecError> {
            match entry {
                None => Ok(default),
                Some((line, v)) => parse_rational(&v).ok_or_else(|| SpecError {
                    line,
                    message: format!("expected a rational p or p/q, found {v:?}"),
                }),
            }
        };
        let vector = |line: usize, v: &str| -> Result<Vec<Rational>, SpecError> {
            let vals: Option<Vec<Rational>> = v.split_whitespace().map(parse_rational).collect();
            match vals {
                Some(vals) if vals.len() == dim => Ok(vals),
                _ => err(line, format!("expected {dim} rationals separated by spaces, found {v:?}")),
            }
        };

        let mut omega_line = 0;
        let mut components = Vec::with_capacity(dim);
        for i in 1..=dim {
            components.push(match take(&mut entries, &format!("omega{i}")) {
                None => Polynomial::zero(dim),
                Some((line, v)) => {
                    omega_line = omega_line.max(line);
                    function(&v, dim).map_err(|message| SpecError { line, message })?
                }
            });
        }
        let omega = OneForm::new(components)
            .and_then(OneForm::into_closed)
            .map_err(|e| SpecError {
                line: omega_line,
                message: format!("omega: {e}"),
            })?;

        let mut matrix = Vec::with_capacity(dim);
        let mut matrix_line = 0;
        for i in 1..=dim {
            matrix.push(match take(&mut entries, &format!("row{i}")) {
                None => (0..dim)
                    .map(|j| if j + 1 == i { Rational::one() } else { Rational::zero() })
                    .collect(),
                Some((line, v)) => {
                    matrix_line = matrix_line.max(line);
                    vector(line, &v)?
                }
            });
        }
        let offset = match take(&mut entries, "offset") {
            None => vec![Rational::zero(); dim],
            Some((line, v)) => vector(line, &v)?,
        };
        let phi = AffineMap::new(matrix, offset).map_err(|e| SpecError {
            line: matrix_line,
            message: format!("affine map: {e}"),
        })?;

        let kappa_entry = take(&mut entries, "kappa");
        let lambda_entry = take(&mut entries, "lambda");
        let a_entry = take(&mut entries, "a");
        let unexpected = |entry: &Option<(usize, String)>, key: &str| -> Result<(), SpecError> {
            match entry {
                Some((line, _)) => err(*line, format!("key {key:?} does not apply to family {family:?}")),
                None => Ok(()),
            }
        };
        let build = |e: opcalc_core::AlgebraError| SpecError {
            line: 0,
            message: e.to_string(),
        };
        let spec = match family.as_str() {
            "d1" => {
                unexpected(&a_entry, "a")?;
                let kappa = rational(kappa_entry, Rational::one())?;
                let lambda = rational(lambda_entry, Rational::zero())?;
                AutoSpec::D1(D1AutoSpec::new(kappa, lambda, omega, phi).map_err(build)?)
            }
            "d" => {
                unexpected(&kappa_entry, "kappa")?;
                unexpected(&lambda_entry, "lambda")?;
                let a = match a_entry {
                    None => 0,
                    Some((line, v)) => match v.as_str() {
                        "0" => 0,
                        "1" => 1,
                        _ => return err(line, format!("a must be 0 or 1, found {v:?}")),
                    },
                };
                AutoSpec::D(DAutoSpec::new(phi, a, omega).map_err(build)?)
            }
            "s" => {
                unexpected(&lambda_entry, "lambda")?;
                unexpected(&a_entry, "a")?;
                let kappa = rational(kappa_entry, Rational::one())?;
                AutoSpec::S(SAutoSpec::new(kappa, phi, omega).map_err(build)?)
            }
            other => return err(fline, format!("unknown family {other:?}; expected d1, d or s")),
        };
        if let Some((key, (line, _))) = entries.into_iter().min_by_key(|(_, (line, _))| *line) {
            return err(line, format!("unknown key {key:?}"));
        }
        Ok(spec)
    }
}

fn function(text: &str, dim: usize) -> Result<Polynomial, String> {
    let op = Expr::parse_operator(text, dim).map_err(|e| e.to_string())?;
    if !op.order().at_most(0) {
        return Err(format!("{text:?} is not a function of x1..x{dim}"));
    }
    Ok(op.zeroth_part())
}

fn write_affine(out: &mut String, phi: &AffineMap) {
    let join = |v: &[Rational]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    for (i, row) in phi.matrix().iter().enumerate() {
        let _ = writeln!(out, "row{} = {}", i + 1, join(row));
    }
    let _ = writeln!(out, "offset = {}", join(phi.offset()));
}

fn write_omega(out: &mut String, omega: &ClosedOneForm) {
    for (i, w) in omega.components().iter().enumerate() {
        let _ = writeln!(out, "omega{} = {}", i + 1, w);
    }
}

impl fmt::Display for AutoSpec {
    /// Canonical text with every key written out.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = format!("family = {}\ndim = {}\n", self.family(), self.dim());
        match self {
            AutoSpec::D1(s) => {
                let _ = writeln!(out, "kappa = {}\nlambda = {}", s.kappa(), s.lambda());
                write_omega(&mut out, s.omega());
                write_affine(&mut out, s.phi());
            }
            AutoSpec::D(s) => {
                let _ = writeln!(out, "a = {}", s.a());
                write_omega(&mut out, s.omega());
                write_affine(&mut out, s.phi());
            }
            AutoSpec::S(s) => {
                let _ = writeln!(out, "kappa = {}", s.kappa());
                write_omega(&mut out, s.omega());
                write_affine(&mut out, s.phi());
            }
        }
        f.write_str(&out)
    }
}

/// Dimension a spec text asks for, if it names one.
pub fn declared_dim(text: &str) -> Option<usize> {
    text.lines()
        .filter_map(|l| l.split('#').next()?.split_once('='))
        .find(|(k, _)| k.trim() == "dim")
        .and_then(|(_, v)| v.trim().parse().ok())
}

/// Largest variable index used by the spec's omega components.
pub fn omega_max_index(text: &str) -> usize {
    text.lines()
        .filter_map(|l| l.split('#').next()?.split_once('='))
        .filter(|(k, _)| k.trim().starts_with("omega"))
        .map(|(_, v)| expr::max_index(v))
        .max()
        .unwrap_or(0)
}
