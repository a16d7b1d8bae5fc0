//! Exact continued fractions of rational words and the Schubert classification
//! of unoriented rational links up to mirror image.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::conway::RationalWord;
use crate::error::{Error, Result};

/// A projective fraction `p/q` in lowest terms.
///
/// Stored with `q >= 0`; the point at infinity is `1/0`. `p = 0` is the
/// two-component unlink and `|p| = 1` the unknot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinkFraction {
    p: BigInt,
    q: BigInt,
}

impl LinkFraction {
    /// Reduces `p/q`. Panics on `0/0`.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        let (mut p, mut q) = (p.into(), q.into());
        assert!(!(p.is_zero() && q.is_zero()), "0/0 is not a link fraction");
        let g = p.gcd(&q);
        p /= &g;
        q /= &g;
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        if q.is_zero() {
            p = BigInt::one();
        }
        LinkFraction { p, q }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn key(&self) -> CanonicalKey {
        canonical_key(self)
    }
}

impl fmt::Display for LinkFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Schubert class of an unoriented rational link with mirror images identified.
///
/// Ordering is by `(p_abs, q_star)`, which is what the deterministic witness
/// choices elsewhere rely on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    p_abs: BigInt,
    q_star: BigInt,
}

impl CanonicalKey {
    /// Builds a key from raw parts, re-canonicalising `q`.
    pub fn from_parts(p_abs: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        let p: BigInt = p_abs.into();
        if p.is_zero() {
            return canonical_key(&LinkFraction::new(0, 1));
        }
        if p.abs().is_one() {
            return canonical_key(&LinkFraction::new(1, 0));
        }
        canonical_key(&LinkFraction::new(p, q))
    }

    pub fn p_abs(&self) -> &BigInt {
        &self.p_abs
    }

    pub fn q_star(&self) -> &BigInt {
        &self.q_star
    }

    pub fn component_count(&self) -> u8 {
        if self.p_abs.is_even() {
            2
        } else {
            1
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.p_abs <= BigInt::one()
    }

    /// The fraction `p_abs / q_star` (or `1/0`, `0/1` for trivial keys).
    pub fn fraction(&self) -> LinkFraction {
        if self.p_abs.is_zero() {
            LinkFraction::new(0, 1)
        } else if self.p_abs.is_one() {
            LinkFraction::new(1, 0)
        } else {
            LinkFraction::new(self.p_abs.clone(), self.q_star.clone())
        }
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p_abs, self.q_star)
    }
}

pub(crate) fn serialize_bigint<S: Serializer>(
    v: &BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Big<'a>(&'a BigInt);
        impl Serialize for Big<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_bigint(self.0, s)
            }
        }
        let mut st = s.serialize_struct("CanonicalKey", 3)?;
        st.serialize_field("p_abs", &Big(&self.p_abs))?;
        st.serialize_field("q_star", &Big(&self.q_star))?;
        st.serialize_field("component_count", &self.component_count())?;
        st.end()
    }
}

/// One step of the left-to-right evaluation: `(p, q) -> (a p + q, p)`.
///
/// Starting from `(1, 0)` this computes `a_q + 1/(a_{q-1} + ... + 1/a_1)`
/// projectively, so zero partial quotients never divide by zero.
#[inline]
pub(crate) fn cf_step(a: i64, (p, q): (BigInt, BigInt)) -> (BigInt, BigInt) {
    (BigInt::from(a) * &p + q, p)
}

/// Exact value of the continued fraction of `word`.
pub fn cf_eval(word: &RationalWord) -> LinkFraction {
    let (p, q) = word
        .entries()
        .iter()
        .fold((BigInt::one(), BigInt::zero()), |acc, &a| cf_step(a, acc));
    LinkFraction::new(p, q)
}

fn mod_inverse(q: &BigInt, p: &BigInt) -> BigInt {
    let eg = q.extended_gcd(p);
    debug_assert!(eg.gcd.is_one());
    eg.x.mod_floor(p)
}

/// Mirror-quotiented Schubert normal form.
pub fn canonical_key(f: &LinkFraction) -> CanonicalKey {
    let p_abs = f.p.abs();
    if p_abs <= BigInt::one() {
        return CanonicalKey {
            p_abs,
            q_star: BigInt::zero(),
        };
    }
    let q = f.q.mod_floor(&p_abs);
    let inv = mod_inverse(&q, &p_abs);
    let q_star = [&p_abs - &q, &p_abs - &inv, q, inv]
        .into_iter()
        .min()
        .expect("non-empty orbit");
    CanonicalKey { p_abs, q_star }
}

/// Isotopy of unoriented rational links. With `mirror_identified` a link and
/// its mirror image also count as equivalent.
pub fn equivalent(f1: &LinkFraction, f2: &LinkFraction, mirror_identified: bool) -> bool {
    if mirror_identified {
        return canonical_key(f1) == canonical_key(f2);
    }
    // Represent both with a positive numerator; the sign moves to q.
    let norm = |f: &LinkFraction| -> (BigInt, BigInt) {
        if f.p.is_negative() {
            (-f.p.clone(), -f.q.clone())
        } else {
            (f.p.clone(), f.q.clone())
        }
    };
    let (p1, q1) = norm(f1);
    let (p2, q2) = norm(f2);
    if p1 != p2 {
        return false;
    }
    if p1 <= BigInt::one() {
        return true;
    }
    let q1 = q1.mod_floor(&p1);
    let q2 = q2.mod_floor(&p1);
    q1 == q2 || (&q1 * &q2).mod_floor(&p1).is_one()
}

pub fn component_count(f: &LinkFraction) -> u8 {
    if f.p.is_even() {
        2
    } else {
        1
    }
}

pub fn is_trivial(f: &LinkFraction) -> bool {
    f.p.abs() <= BigInt::one()
}

/// Regular continued fraction `[c0; c1, ..., ct]` of `p/q` with `p, q > 0`.
fn regular_cf(p: &BigInt, q: &BigInt) -> Vec<i64> {
    let (mut a, mut b) = (p.clone(), q.clone());
    let mut out = Vec::new();
    while !b.is_zero() {
        let (d, r) = a.div_rem(&b);
        out.push(d.to_i64().expect("partial quotient fits in i64"));
        a = b;
        b = r;
    }
    out
}

/// The lexicographically smallest reduced alternating word of the class.
///
/// Its entry sum is the crossing number of the link.
pub fn canonical_word(key: &CanonicalKey) -> Result<RationalWord> {
    if key.is_trivial() {
        return Err(Error::TrivialLink);
    }
    let p = &key.p_abs;
    let q = &key.q_star;
    let inv = mod_inverse(q, p);
    let two: BigInt = BigInt::from(2);
    let mut best: Option<Vec<i64>> = None;
    for cand in [q.clone(), inv.clone(), p - q, p - &inv] {
        if cand.is_zero() || &cand * &two > *p {
            continue;
        }
        let mut w = regular_cf(p, &cand);
        w.reverse();
        if best.as_ref().is_none_or(|b| w < *b) {
            best = Some(w);
        }
    }
    let w = best.expect("some orbit member lies in [1, p/2]");
    RationalWord::new(w)
}

/// Word used to display any class: `[0]` for the unlink, `[1]` for the
/// unknot, the canonical word otherwise.
pub fn representative_word(key: &CanonicalKey) -> RationalWord {
    if key.p_abs.is_zero() {
        RationalWord::new(vec![0]).unwrap()
    } else if key.p_abs.is_one() {
        RationalWord::new(vec![1]).unwrap()
    } else {
        canonical_word(key).expect("non-trivial key")
    }
}

/// Minimal crossing number of the link.
pub fn crossing_number(key: &CanonicalKey) -> Result<u64> {
    Ok(canonical_word(key)?.crossing_sum())
}

/// Key of the link drawn by `word`.
pub fn key_of(word: &RationalWord) -> CanonicalKey {
    canonical_key(&cf_eval(word))
}
