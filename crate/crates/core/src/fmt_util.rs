use alloc::string::String;
use core::fmt::{self, Write};

use num_traits::{One, Signed};

use crate::index::MultiIndex;
use crate::Rational;

/// Writes `c1*m1 + c2*m2 - …` with unit coefficients elided; `0` when empty.
pub(crate) fn write_sum<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: IntoIterator<Item = (&'a Rational, String)>,
{
    let mut first = true;
    for (c, mono) in terms {
        let negative = c.is_negative();
        if first {
            if negative {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if negative { " - " } else { " + " })?;
        }
        first = false;
        let abs = c.abs();
        if mono.is_empty() {
            write!(f, "{abs}")?;
        } else if abs.is_one() {
            f.write_str(&mono)?;
        } else {
            write!(f, "{abs}*{mono}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Appends `name1^a*name2^b…` for the nonzero exponents of `idx`.
pub(crate) fn push_monomial(out: &mut String, name: &str, idx: &MultiIndex) {
    for (i, &e) in idx.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !out.is_empty() {
            out.push('*');
        }
        let _ = write!(out, "{name}{}", i + 1);
        if e > 1 {
            let _ = write!(out, "^{e}");
        }
    }
}
