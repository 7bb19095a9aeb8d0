//! Operator and symbol expressions.
//!
//! The grammar is
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nat)?
//! atom   := rational | 'x' nat | 'd' nat | 'xi' nat | '(' expr ')'
//! ```
//!
//! where a rational is `p` or `p/q`. Products keep their written order, so
//! `d1*x1` and `x1*d1` are different trees; [`Expr::to_operator`] turns a
//! tree into the normal-ordered operator it denotes.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use opcalc_core::{DiffOp, MultiIndex, PhaseSymbol, Polynomial, Rational};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// `x_i`, a coordinate function.
    Coord,
    /// `d_i`, the partial derivative.
    Deriv,
    /// `xi_i`, a fiber coordinate of a symbol.
    Fiber,
}

impl VarKind {
    fn prefix(self) -> &'static str {
        match self {
            VarKind::Coord => "x",
            VarKind::Deriv => "d",
            VarKind::Fiber => "xi",
        }
    }
}

/// Parsed expression. Variable indices are 0-based; `offset` is the byte
/// position of the variable in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    Var {
        kind: VarKind,
        index: usize,
        offset: usize,
    },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character {found:?} at offset {offset}")]
    UnexpectedChar { offset: usize, found: char },
    #[error("expected {expected} at offset {offset}, found {found}")]
    Expected {
        offset: usize,
        expected: &'static str,
        found: String,
    },
    #[error("index {index} of {name} at offset {offset} is outside 1..={dim}")]
    IndexOutOfRange {
        offset: usize,
        name: &'static str,
        index: u64,
        dim: usize,
    },
    #[error("malformed number at offset {offset}")]
    BadNumber { offset: usize },
    #[error("fiber variable at offset {offset} is not allowed in an operator")]
    FiberInOperator { offset: usize },
    #[error("derivation at offset {offset} is not allowed in a symbol")]
    DerivInSymbol { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match *self {
            ParseError::UnexpectedChar { offset, .. }
            | ParseError::Expected { offset, .. }
            | ParseError::IndexOutOfRange { offset, .. }
            | ParseError::BadNumber { offset }
            | ParseError::FiberInOperator { offset }
            | ParseError::DerivInSymbol { offset } => offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(Rational),
    Var(VarKind, usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(r) => write!(f, "number {r}"),
            Tok::Var(k, i) => write!(f, "{}{}", k.prefix(), i + 1),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str, dim: usize) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    let digits = |mut p: usize| {
        let start = p;
        while p < bytes.len() && bytes[p].is_ascii_digit() {
            p += 1;
        }
        (start, p)
    };
    while pos < bytes.len() {
        let c = bytes[pos];
        let start = pos;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let (s, e) = digits(pos);
                let num: BigInt = text[s..e].parse().map_err(|_| ParseError::BadNumber { offset: start })?;
                pos = e;
                let value = if pos < bytes.len() && bytes[pos] == b'/' {
                    let (s, e) = digits(pos + 1);
                    if s == e {
                        return Err(ParseError::BadNumber { offset: start });
                    }
                    let den: BigInt = text[s..e].parse().map_err(|_| ParseError::BadNumber { offset: start })?;
                    if den.is_zero() {
                        return Err(ParseError::BadNumber { offset: start });
                    }
                    pos = e;
                    Rational::new(num, den)
                } else {
                    Rational::from_integer(num)
                };
                out.push((start, Tok::Num(value)));
                continue;
            }
            b'x' | b'd' => {
                let (kind, name_len) = if c == b'x' && bytes.get(pos + 1) == Some(&b'i') {
                    (VarKind::Fiber, 2)
                } else if c == b'x' {
                    (VarKind::Coord, 1)
                } else {
                    (VarKind::Deriv, 1)
                };
                let (s, e) = digits(pos + name_len);
                if s == e {
                    let found = text[s..].chars().next().map_or("end of input".to_string(), |ch| format!("{ch:?}"));
                    return Err(ParseError::Expected {
                        offset: s,
                        expected: "a variable index",
                        found,
                    });
                }
                let index: u64 = text[s..e].parse().unwrap_or(u64::MAX);
                if index == 0 || index > dim as u64 {
                    return Err(ParseError::IndexOutOfRange {
                        offset: start,
                        name: kind.prefix(),
                        index,
                        dim,
                    });
                }
                pos = e;
                out.push((start, Tok::Var(kind, index as usize - 1)));
                continue;
            }
            _ => {
                let found = text[pos..].chars().next().expect("inside the text");
                return Err(ParseError::UnexpectedChar { offset: pos, found });
            }
        };
        pos += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expected(&self, what: &'static str) -> ParseError {
        ParseError::Expected {
            offset: self.offset(),
            expected: what,
            found: self.peek().to_string(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = if *self.peek() == Tok::Minus {
            self.bump();
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let offset = self.offset();
        match self.bump().1 {
            Tok::Num(r) if r.is_integer() => {
                let k = u32::try_from(r.to_integer()).map_err(|_| ParseError::BadNumber { offset })?;
                Ok(Expr::Pow(Box::new(base), k))
            }
            Tok::Num(_) => Err(ParseError::BadNumber { offset }),
            other => Err(ParseError::Expected {
                offset,
                expected: "an exponent",
                found: other.to_string(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(r) => {
                self.bump();
                Ok(Expr::Num(r))
            }
            Tok::Var(kind, index) => {
                let (offset, _) = self.bump();
                Ok(Expr::Var { kind, index, offset })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.expected("')'"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.expected("a number, variable or '('")),
        }
    }
}

/// Parses `text` with variable indices limited to `1..=dim`.
pub fn parse(text: &str, dim: usize) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text, dim)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.expected("an operator or end of input"));
    }
    Ok(e)
}

/// Largest variable index (1-based) appearing in `text`, ignoring anything
/// that does not lex. Used to pick a dimension when none is given.
pub fn max_index(text: &str) -> usize {
    lex(text, usize::MAX)
        .map(|toks| {
            toks.iter()
                .filter_map(|(_, t)| match t {
                    Tok::Var(_, i) => Some(i + 1),
                    _ => None,
                })
                .max()
                .unwrap_or(0)
        })
        .unwrap_or(0)
}

impl Expr {
    pub fn parse_operator(text: &str, dim: usize) -> Result<DiffOp, ParseError> {
        parse(text, dim)?.to_operator(dim)
    }

    pub fn parse_symbol(text: &str, dim: usize) -> Result<PhaseSymbol, ParseError> {
        parse(text, dim)?.to_symbol(dim)
    }

    /// The normal-ordered operator, composing products in written order.
    pub fn to_operator(&self, dim: usize) -> Result<DiffOp, ParseError> {
        Ok(match self {
            Expr::Num(r) => DiffOp::constant(dim, r.clone()),
            Expr::Var { kind, index, offset } => match kind {
                VarKind::Coord => DiffOp::multiplication(Polynomial::var(dim, *index)),
                VarKind::Deriv => DiffOp::derivation(dim, *index),
                VarKind::Fiber => return Err(ParseError::FiberInOperator { offset: *offset }),
            },
            Expr::Neg(a) => -&a.to_operator(dim)?,
            Expr::Add(a, b) => &a.to_operator(dim)? + &b.to_operator(dim)?,
            Expr::Sub(a, b) => &a.to_operator(dim)? - &b.to_operator(dim)?,
            Expr::Mul(a, b) => &a.to_operator(dim)? * &b.to_operator(dim)?,
            Expr::Pow(a, k) => {
                let base = a.to_operator(dim)?;
                (0..*k).fold(DiffOp::identity(dim), |acc, _| &acc * &base)
            }
        })
    }

    /// The symbol denoted by the expression; products commute.
    pub fn to_symbol(&self, dim: usize) -> Result<PhaseSymbol, ParseError> {
        Ok(match self {
            Expr::Num(r) => PhaseSymbol::function(Polynomial::constant(dim, r.clone())),
            Expr::Var { kind, index, offset } => match kind {
                VarKind::Coord => PhaseSymbol::function(Polynomial::var(dim, *index)),
                VarKind::Fiber => PhaseSymbol::fiber(dim, *index),
                VarKind::Deriv => return Err(ParseError::DerivInSymbol { offset: *offset }),
            },
            Expr::Neg(a) => -&a.to_symbol(dim)?,
            Expr::Add(a, b) => &a.to_symbol(dim)? + &b.to_symbol(dim)?,
            Expr::Sub(a, b) => &a.to_symbol(dim)? - &b.to_symbol(dim)?,
            Expr::Mul(a, b) => &a.to_symbol(dim)? * &b.to_symbol(dim)?,
            Expr::Pow(a, k) => a.to_symbol(dim)?.pow(*k),
        })
    }

    /// Applies the written expression to `f` directly, one factor at a
    /// time, without normal ordering.
    pub fn act(&self, f: &Polynomial) -> Result<Polynomial, ParseError> {
        let dim = f.dim();
        Ok(match self {
            Expr::Num(r) => f.scale(r),
            Expr::Var { kind, index, offset } => match kind {
                VarKind::Coord => &Polynomial::var(dim, *index) * f,
                VarKind::Deriv => f.derive(&MultiIndex::unit(dim, *index)),
                VarKind::Fiber => return Err(ParseError::FiberInOperator { offset: *offset }),
            },
            Expr::Neg(a) => -a.act(f)?,
            Expr::Add(a, b) => &a.act(f)? + &b.act(f)?,
            Expr::Sub(a, b) => &a.act(f)? - &b.act(f)?,
            Expr::Mul(a, b) => a.act(&b.act(f)?)?,
            Expr::Pow(a, k) => {
                let mut g = f.clone();
                for _ in 0..*k {
                    g = a.act(&g)?;
                }
                g
            }
        })
    }

    /// Same tree with every variable offset reset to 0, for comparing
    /// trees parsed from different texts.
    pub fn without_offsets(&self) -> Expr {
        let b = |e: &Expr| Box::new(e.without_offsets());
        match self {
            Expr::Num(r) => Expr::Num(r.clone()),
            Expr::Var { kind, index, .. } => Expr::Var {
                kind: *kind,
                index: *index,
                offset: 0,
            },
            Expr::Neg(a) => Expr::Neg(b(a)),
            Expr::Add(x, y) => Expr::Add(b(x), b(y)),
            Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
            Expr::Pow(a, k) => Expr::Pow(b(a), *k),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(self, Expr::Num(_) | Expr::Var { .. })
    }

    fn is_sum_like(&self) -> bool {
        matches!(self, Expr::Neg(_) | Expr::Add(..) | Expr::Sub(..))
    }
}

struct Paren<'a>(&'a Expr, bool);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Var { kind, index, .. } => write!(f, "{}{}", kind.prefix(), index + 1),
            Expr::Neg(a) => write!(f, "-{}", Paren(a, a.is_sum_like())),
            Expr::Add(a, b) => write!(f, "{} + {}", a, Paren(b, b.is_sum_like())),
            Expr::Sub(a, b) => write!(f, "{} - {}", a, Paren(b, b.is_sum_like())),
            Expr::Mul(a, b) => write!(
                f,
                "{}*{}",
                Paren(a, a.is_sum_like()),
                Paren(b, b.is_sum_like() || matches!(**b, Expr::Mul(..)))
            ),
            Expr::Pow(a, k) => write!(f, "{}^{k}", Paren(a, !a.is_atom() || is_fraction(a))),
        }
    }
}

// `1/2^3` would read back as `(1/2)^3` anyway, but the parentheses make the
// printed form unambiguous to a human.
fn is_fraction(e: &Expr) -> bool {
    matches!(e, Expr::Num(r) if !r.denom().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use opcalc_core::rat;

    fn op(text: &str, n: usize) -> String {
        Expr::parse_operator(text, n).unwrap().to_string()
    }

    #[test]
    fn normal_ordering_examples() {
        assert_eq!(op("d1*x1", 1), "x1*d1 + 1");
        assert_eq!(op("x1*d1", 1), "x1*d1");
        assert_eq!(op("x1*d1*x1*d1", 1), "x1^2*d1^2 + x1*d1");
        assert_eq!(op("(x1*d1)^2", 1), "x1^2*d1^2 + x1*d1");
        assert_eq!(op("x1^2*d1*d2 + d3", 3), "x1^2*d1*d2 + d3");
    }

    #[test]
    fn products_keep_written_order() {
        let e = parse("d1*x1", 1).unwrap();
        let Expr::Mul(a, b) = e else { panic!("not a product") };
        assert!(matches!(*a, Expr::Var { kind: VarKind::Deriv, index: 0, .. }));
        assert!(matches!(*b, Expr::Var { kind: VarKind::Coord, index: 0, .. }));
        let two = parse("x1^2*d1*d2 + d3", 3).unwrap();
        assert!(matches!(two, Expr::Add(..)));
    }

    #[test]
    fn index_errors_carry_offsets() {
        assert_eq!(parse("d0", 1).unwrap_err().offset(), 0);
        let e = parse("x1 + x3", 2).unwrap_err();
        assert_eq!(e.offset(), 5);
        assert!(matches!(e, ParseError::IndexOutOfRange { index: 3, dim: 2, .. }));
        assert_eq!(parse("x", 2).unwrap_err().offset(), 1);
    }

    #[test]
    fn syntax_errors() {
        assert_eq!(parse("x1 +", 1).unwrap_err().offset(), 4);
        assert_eq!(parse("(x1", 1).unwrap_err().offset(), 3);
        assert_eq!(parse("x1 x1", 1).unwrap_err().offset(), 3);
        assert_eq!(parse("x1 % 2", 1).unwrap_err().offset(), 3);
        assert_eq!(parse("x1^1/2", 1).unwrap_err().offset(), 3);
        assert_eq!(parse("1/0", 1).unwrap_err().offset(), 0);
        assert_eq!(parse("x1*-x1", 1).unwrap_err().offset(), 3);
        assert!(parse("", 1).is_err());
    }

    #[test]
    fn rationals_and_signs() {
        assert_eq!(op("-1/2*x1 + 3/6", 1), "-1/2*x1 + 1/2");
        assert_eq!(op("-(x1 - 1)", 1), "-x1 + 1");
        assert_eq!(op("2^3", 1), "8");
        assert_eq!(op("d1^0", 1), "1");
    }

    #[test]
    fn symbols_commute() {
        let s = Expr::parse_symbol("xi1*x1 - x1*xi1 + xi1^2", 1).unwrap();
        assert_eq!(s.to_string(), "xi1^2");
        assert_eq!(Expr::parse_symbol("xi1^2 + x1*xi2", 2).unwrap().to_string(), "xi1^2 + x1*xi2");
        assert_eq!(Expr::parse_symbol("d1", 1), Err(ParseError::DerivInSymbol { offset: 0 }));
        assert_eq!(Expr::parse_operator("x1 + xi1", 1), Err(ParseError::FiberInOperator { offset: 5 }));
    }

    #[test]
    fn direct_action() {
        let e = parse("d1*x1", 1).unwrap();
        let f = Polynomial::var(1, 0).pow(2);
        assert_eq!(e.act(&f).unwrap(), f.scale(&rat(3)));
    }

    #[test]
    fn printing_reparses() {
        for text in ["-(x1 + d1)*d1^2", "x1 - (d1 - 1)", "(x1*d1)^3 + 1/2", "x1*(d1*x1)", "-(-x1)", "(1/2)^2"] {
            let e = parse(text, 1).unwrap();
            assert_eq!(parse(&e.to_string(), 1).unwrap().without_offsets(), e.without_offsets(), "{text}");
        }
        assert_eq!(parse("x1*(d1*x1)", 1).unwrap().to_string(), "x1*(d1*x1)");
    }

    #[test]
    fn max_index_scans_variables() {
        assert_eq!(max_index("x1*d3 + xi2"), 3);
        assert_eq!(max_index("7"), 0);
    }
}
