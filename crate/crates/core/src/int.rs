//! Machine-integer fast paths for polynomial and operator arithmetic.
//!
//! A polynomial with rational coefficients is stored as integer numerators
//! over one common denominator, with monomials packed into a `u128`, 16 bits
//! per variable and the first variable most significant. Adding two packed
//! exponent vectors is then integer addition. Every operation is checked and
//! returns `None` when a value leaves the machine range, so callers fall
//! back to the arbitrary-precision path.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::index::MultiIndex;
use crate::poly::Polynomial;
use crate::Rational;

const FIELD: u32 = 16;
const MAX_DIM: usize = 8;
/// Exponents stay below this so a sum of two never carries.
const MAX_EXP: u32 = 1 << (FIELD - 1);

pub(crate) type Key = u128;
/// Nonzero numerators sorted by key, one entry per key.
pub(crate) type IntPoly = Vec<(Key, i128)>;

pub(crate) fn pack(idx: &MultiIndex) -> Option<Key> {
    let e = idx.exponents();
    if e.len() > MAX_DIM {
        return None;
    }
    let mut key = 0u128;
    for (i, &x) in e.iter().enumerate() {
        if x >= MAX_EXP {
            return None;
        }
        key |= u128::from(x) << shift(i);
    }
    Some(key)
}

pub(crate) fn unpack(key: Key, dim: usize) -> MultiIndex {
    MultiIndex::from_exponents((0..dim).map(|i| field(key, i)).collect())
}

/// Exponents `offset..offset + len` of `key` as a multi-index.
pub(crate) fn unpack_range(key: Key, offset: usize, len: usize) -> MultiIndex {
    MultiIndex::from_exponents((offset..offset + len).map(|i| field(key, i)).collect())
}

/// Splits `key` into its first `n` fields and the rest.
pub(crate) fn split(key: Key, n: usize) -> (Key, Key) {
    let low = if n == 0 { Key::MAX } else { (1u128 << shift(n - 1)) - 1 };
    (key & !low, key & low)
}

/// `v / den` in lowest terms.
pub(crate) fn rational(v: i128, den: i128) -> Rational {
    let g = v.gcd(&den);
    Rational::new_raw(BigInt::from(v / g), BigInt::from(den / g))
}

fn shift(i: usize) -> u32 {
    FIELD * (MAX_DIM - 1 - i) as u32
}

fn field(key: Key, i: usize) -> u32 {
    ((key >> shift(i)) & 0xffff) as u32
}

/// `Σ x_k · y_l` over all pairs; keys add because exponents do.
pub(crate) fn mul(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    if a.is_empty() || b.is_empty() {
        return Some(IntPoly::new());
    }
    match dense_mul(a, b) {
        Dense::Done(p) => Some(p),
        Dense::Overflow => None,
        Dense::TooLarge => sparse_mul(a, b),
    }
}

fn sparse_mul(a: &IntPoly, b: &IntPoly) -> Option<IntPoly> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a {
        for (j, y) in b {
            out.push((i + j, x.checked_mul(*y)?));
        }
    }
    normalize(out)
}

/// Sorts, merges repeated keys and drops zeros.
pub(crate) fn normalize(mut terms: Vec<(Key, i128)>) -> Option<IntPoly> {
    terms.sort_unstable_by_key(|(k, _)| *k);
    let mut out: IntPoly = Vec::with_capacity(terms.len());
    for (k, v) in terms {
        match out.last_mut() {
            Some((last, acc)) if *last == k => *acc = acc.checked_add(v)?,
            _ => out.push((k, v)),
        }
    }
    out.retain(|(_, v)| *v != 0);
    Some(out)
}

enum Dense {
    Done(IntPoly),
    Overflow,
    TooLarge,
}

/// Accumulates into an array over the box of possible product exponents,
/// when that box is not much larger than the number of products.
fn dense_mul(a: &IntPoly, b: &IntPoly) -> Dense {
    let extent = |p: &IntPoly| {
        let mut e = [0usize; MAX_DIM];
        for (k, _) in p {
            for (i, x) in e.iter_mut().enumerate() {
                *x = (*x).max(field(*k, i) as usize);
            }
        }
        e
    };
    let (ea, eb) = (extent(a), extent(b));
    let mut stride = [0usize; MAX_DIM];
    let mut size = 1usize;
    for i in (0..MAX_DIM).rev() {
        stride[i] = size;
        size = match size.checked_mul(ea[i] + eb[i] + 1) {
            Some(s) => s,
            None => return Dense::TooLarge,
        };
    }
    let products = a.len().saturating_mul(b.len());
    if size > (1 << 22) || size > products.saturating_mul(4).max(64) {
        return Dense::TooLarge;
    }
    let offset = |k: Key| (0..MAX_DIM).map(|i| field(k, i) as usize * stride[i]).sum::<usize>();
    let rhs: Vec<(usize, i128)> = b.iter().map(|(k, v)| (offset(*k), *v)).collect();
    let mut acc = alloc::vec![0i128; size];
    for (k, x) in a {
        let base = offset(*k);
        for (o, y) in &rhs {
            let slot = &mut acc[base + o];
            match x.checked_mul(*y).and_then(|m| slot.checked_add(m)) {
                Some(v) => *slot = v,
                None => return Dense::Overflow,
            }
        }
    }
    let out = acc
        .into_iter()
        .enumerate()
        .filter(|(_, v)| *v != 0)
        .map(|(mut o, v)| {
            let mut key = 0u128;
            for i in 0..MAX_DIM {
                key |= ((o / stride[i]) as u128) << shift(i);
                o %= stride[i];
            }
            (key, v)
        })
        .collect();
    Dense::Done(out)
}

/// `Σ_α c_α Π_i t_i^{α_i} q_i^{T_i − α_i}` for `subs[i] = (q_i, t_i)` and
/// `T_i ≥` every exponent of variable `i`, by nested Horner evaluation
/// starting at variable `var`.
pub(crate) fn substitute(terms: &[(Key, i128)], var: usize, subs: &[(i128, IntPoly)], tops: &[u32]) -> Option<IntPoly> {
    if terms.is_empty() {
        return Some(IntPoly::new());
    }
    if var == subs.len() {
        let mut c = 0i128;
        for (_, v) in terms {
            c = c.checked_add(*v)?;
        }
        return Some(if c == 0 { Vec::new() } else { alloc::vec![(0, c)] });
    }
    let mut groups: BTreeMap<u32, Vec<(Key, i128)>> = BTreeMap::new();
    for (k, v) in terms {
        groups.entry(field(*k, var)).or_default().push((*k, *v));
    }
    let (q, t) = &subs[var];
    let unit: Key = 1 << shift(var);
    let mut acc = IntPoly::new();
    if *q == 1 && t.as_slice() == [(unit, 1)] {
        // x_i ↦ x_i: shift the inner results instead of multiplying.
        let mut shifted = Vec::new();
        for (k, g) in &groups {
            for (key, v) in substitute(g, var + 1, subs, tops)? {
                shifted.push((key + Key::from(*k) * unit, v));
            }
        }
        return normalize(shifted);
    }
    let top = tops[var];
    for k in (0..=top).rev() {
        if !acc.is_empty() {
            acc = mul(&acc, t)?;
        }
        if let Some(g) = groups.get(&k) {
            let inner = substitute(g, var + 1, subs, tops)?;
            add_scaled(&mut acc, &inner, q.checked_pow(top - k)?)?;
        }
    }
    Some(acc)
}

/// `p(t_1/q_1, …)` as numerators over the returned denominator, for `p`
/// given as numerators over `den`.
pub(crate) fn substitute_over(den: i128, nums: IntPoly, subs: &[(i128, IntPoly)]) -> Option<(i128, IntPoly)> {
    let mut tops = alloc::vec![0u32; subs.len()];
    for (k, _) in &nums {
        for (i, t) in tops.iter_mut().enumerate() {
            *t = (*t).max(field(*k, i));
        }
    }
    let mut d = den;
    for ((q, _), &t) in subs.iter().zip(&tops) {
        d = d.checked_mul(q.checked_pow(t)?)?;
    }
    Some((d, substitute(&nums, 0, subs, &tops)?))
}

/// `acc += weight · p`.
pub(crate) fn add_scaled(acc: &mut IntPoly, p: &IntPoly, weight: i128) -> Option<()> {
    let mut out = Vec::with_capacity(acc.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() || j < p.len() {
        let take_left = j == p.len() || (i < acc.len() && acc[i].0 < p[j].0);
        let take_right = i == acc.len() || (j < p.len() && p[j].0 < acc[i].0);
        if take_left {
            out.push(acc[i]);
            i += 1;
        } else if take_right {
            out.push((p[j].0, p[j].1.checked_mul(weight)?));
            j += 1;
        } else {
            let v = acc[i].1.checked_add(p[j].1.checked_mul(weight)?)?;
            if v != 0 {
                out.push((acc[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out.retain(|(_, v)| *v != 0);
    *acc = out;
    Some(())
}

/// `∂^γ p` for a packed `γ` of dimension `dim`.
pub(crate) fn derive(p: &IntPoly, gamma: Key, dim: usize) -> Option<IntPoly> {
    let mut out = IntPoly::new();
    'terms: for (k, v) in p {
        let mut c = *v;
        for i in 0..dim {
            let (e, g) = (field(*k, i), field(gamma, i));
            if e < g {
                continue 'terms;
            }
            for m in 0..g {
                c = c.checked_mul(i128::from(e - m))?;
            }
        }
        out.push((k - gamma, c));
    }
    Some(out)
}

/// Common denominator and packed integer numerators.
pub(crate) fn from_poly(p: &Polynomial) -> Option<(i128, IntPoly)> {
    let mut den = 1i128;
    for (_, c) in p.terms() {
        den = den.lcm(&i128::try_from(c.denom()).ok()?);
    }
    let mut nums = Vec::with_capacity(p.terms().count());
    for (i, c) in p.terms() {
        let n = i128::try_from(c.numer()).ok()?;
        let d = i128::try_from(c.denom()).ok()?;
        nums.push((pack(i)?, n.checked_mul(den / d)?));
    }
    nums.sort_unstable_by_key(|(k, _)| *k);
    Some((den, nums))
}

/// Common denominator of several polynomials, and each one's numerators
/// over it.
pub(crate) fn from_polys<'a, I>(polys: I) -> Option<(i128, Vec<IntPoly>)>
where
    I: IntoIterator<Item = &'a Polynomial>,
{
    let parts: Vec<(i128, IntPoly)> = polys.into_iter().map(from_poly).collect::<Option<_>>()?;
    let mut den = 1i128;
    for (d, _) in &parts {
        den = den.lcm(d);
    }
    let scaled = parts
        .into_iter()
        .map(|(d, p)| {
            let f = den / d;
            p.into_iter()
                .map(|(k, v)| v.checked_mul(f).map(|v| (k, v)))
                .collect::<Option<IntPoly>>()
        })
        .collect::<Option<_>>()?;
    Some((den, scaled))
}

pub(crate) fn to_poly(dim: usize, nums: IntPoly, den: i128) -> Polynomial {
    Polynomial::from_distinct(dim, to_rationals(dim, nums, den))
}

/// Reduced coefficients, one per nonzero key.
pub(crate) fn to_rationals(dim: usize, nums: IntPoly, den: i128) -> impl Iterator<Item = (MultiIndex, Rational)> {
    debug_assert!(den > 0);
    nums.into_iter().filter(|(_, v)| *v != 0).map(move |(k, v)| (unpack(k, dim), rational(v, den)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trips_and_adds() {
        let a = MultiIndex::from_exponents(alloc::vec![3, 0, 7]);
        let b = MultiIndex::from_exponents(alloc::vec![1, 2, 0]);
        let (ka, kb) = (pack(&a).unwrap(), pack(&b).unwrap());
        assert_eq!(unpack(ka, 3), a);
        assert_eq!(unpack(ka + kb, 3), a.add(&b));
        assert!(pack(&MultiIndex::zero(9)).is_none());
        assert!(pack(&MultiIndex::from_exponents(alloc::vec![MAX_EXP])).is_none());
    }

    #[test]
    fn dense_and_sparse_products_agree() {
        let poly = |terms: &[(&[u32], i128)]| -> IntPoly {
            normalize(
                terms
                    .iter()
                    .map(|(e, c)| (pack(&MultiIndex::from_exponents(e.to_vec())).unwrap(), *c))
                    .collect(),
            )
            .unwrap()
        };
        let a = poly(&[(&[0, 0], 1), (&[1, 0], -2), (&[0, 3], 5), (&[2, 1], 7)]);
        let b = poly(&[(&[0, 0], 3), (&[0, 1], 1), (&[4, 0], -1)]);
        let dense = match dense_mul(&a, &b) {
            Dense::Done(p) => p,
            _ => panic!("small box"),
        };
        assert_eq!(dense, sparse_mul(&a, &b).unwrap());
        let r = to_poly(2, dense, 6);
        assert_eq!(r.terms().count(), 12);
    }

    #[test]
    fn overflow_is_reported() {
        let big: IntPoly = alloc::vec![(0, i128::MAX / 2)];
        assert!(mul(&big, &big).is_none());
        let mut acc = big.clone();
        assert!(add_scaled(&mut acc, &big, 4).is_none());
    }
}
