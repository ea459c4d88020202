//! Ground field plumbing: exact rationals and sparse linear combinations.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// The ground field: arbitrary-precision rationals, always in lowest terms
/// with positive denominator (maintained by `num_rational`).
pub type Q = BigRational;

/// Sparse vector over an indexed basis. Invariant: no explicit zeros.
pub type LinComb = BTreeMap<usize, Q>;

/// Rational from an integer.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational from numerator and denominator.
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Parse "p" or "p/q" with optional sign, exact, no whitespace.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::Parse(format!("bad rational literal {s:?}"));
    if s.is_empty() || s.chars().any(|c| c.is_whitespace()) {
        return Err(bad());
    }
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
        Some((p, q)) => {
            let n: BigInt = p.parse().map_err(|_| bad())?;
            let d: BigInt = q.parse().map_err(|_| bad())?;
            if d.is_zero() || d.is_negative() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Canonical text form: "p" for integers, "p/q" otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// dst += c * src over any ordered key type, pruning zeros.
pub fn sv_axpy<K: Ord + Clone>(dst: &mut BTreeMap<K, Q>, c: &Q, src: &BTreeMap<K, Q>) {
    if c.is_zero() {
        return;
    }
    for (k, v) in src {
        let entry = dst.entry(k.clone()).or_insert_with(Q::zero);
        *entry += c * v;
        if entry.is_zero() {
            dst.remove(k);
        }
    }
}

/// dst += c at one key, pruning zeros.
pub fn sv_add_term<K: Ord + Clone>(dst: &mut BTreeMap<K, Q>, k: K, c: Q) {
    if c.is_zero() {
        return;
    }
    let new = match dst.get(&k) {
        None => c,
        Some(old) => old + c,
    };
    if new.is_zero() {
        dst.remove(&k);
    } else {
        dst.insert(k, new);
    }
}

/// dst += c * src, pruning zeros.
pub fn lc_axpy(dst: &mut LinComb, c: &Q, src: &LinComb) {
    sv_axpy(dst, c, src);
}

/// dst += src.
pub fn lc_add(dst: &mut LinComb, src: &LinComb) {
    lc_axpy(dst, &Q::one(), src);
}

/// dst -= src.
pub fn lc_sub(dst: &mut LinComb, src: &LinComb) {
    lc_axpy(dst, &-Q::one(), src);
}

/// dst *= c (c = 0 empties the vector).
pub fn lc_scale(dst: &mut LinComb, c: &Q) {
    if c.is_zero() {
        dst.clear();
        return;
    }
    for v in dst.values_mut() {
        *v *= c;
    }
}

/// Single-term combination, or empty when the coefficient is zero.
pub fn lc_single(idx: usize, c: Q) -> LinComb {
    let mut m = LinComb::new();
    if !c.is_zero() {
        m.insert(idx, c);
    }
    m
}

/// Coefficient at an index (zero when absent).
pub fn lc_coeff(v: &LinComb, idx: usize) -> Q {
    v.get(&idx).cloned().unwrap_or_else(Q::zero)
}

/// Reindex through a function; panics on index collisions, which would mean
/// the reindexing is not injective on the support.
pub fn lc_map_indices(v: &LinComb, f: impl Fn(usize) -> usize) -> LinComb {
    let mut out = LinComb::new();
    for (k, c) in v {
        let nk = f(*k);
        assert!(out.insert(nk, c.clone()).is_none(), "index collision at {nk}");
    }
    out
}
