//! Unlinking number `u(D)` of a fixed rational diagram.
//!
//! Crossings inside one twist region are interchangeable, so a set of
//! simultaneous crossing changes is described by how many crossings of each
//! region are switched. Switching `k` crossings of a region with `a` crossings
//! leaves `a - 2k sign(a)` crossings.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::conway::RationalWord;
use crate::error::{Error, Result};
use crate::rational::{canonical_word, CanonicalKey};

/// Per-region crossing change counts aligned with a [`RationalWord`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ChangeVector(pub Vec<u64>);

impl ChangeVector {
    pub fn zeros(len: usize) -> Self {
        ChangeVector(vec![0; len])
    }

    pub fn weight(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }
}

impl std::fmt::Display for ChangeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str(")")
    }
}

pub const DEFAULT_WEIGHT_CEILING: u64 = 64;

#[inline]
fn changed_entry(a: i64, k: u64) -> i64 {
    a - 2 * (k as i64) * a.signum()
}

/// The word drawn after switching `v[i]` crossings in region `i`.
pub fn apply_changes(word: &RationalWord, v: &ChangeVector) -> Result<RationalWord> {
    if v.0.len() != word.len() {
        return Err(Error::Misaligned {
            vector: v.0.len(),
            word: word.len(),
        });
    }
    let entries = word
        .entries()
        .iter()
        .zip(&v.0)
        .enumerate()
        .map(|(region, (&a, &k))| {
            if k > a.unsigned_abs() {
                Err(Error::CountExceedsRegion {
                    region,
                    available: a.unsigned_abs(),
                    requested: k,
                })
            } else {
                Ok(changed_entry(a, k))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    RationalWord::new(entries)
}

/// Result of [`diagram_unlink_number`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramUnlink {
    pub u_d: u64,
    pub witness: ChangeVector,
}

/// Projective continued-fraction state used by the depth-first search.
trait CfState: Sized + Clone {
    fn start() -> Self;
    fn step(&self, a: i64) -> Option<Self>;
    fn trivial(&self) -> bool;
}

impl CfState for (i128, i128) {
    fn start() -> Self {
        (1, 0)
    }
    #[inline]
    fn step(&self, a: i64) -> Option<Self> {
        let (p, q) = *self;
        let np = (a as i128).checked_mul(p)?.checked_add(q)?;
        Some((np, p))
    }
    #[inline]
    fn trivial(&self) -> bool {
        self.0.abs() <= 1
    }
}

impl CfState for (BigInt, BigInt) {
    fn start() -> Self {
        (BigInt::one(), BigInt::zero())
    }
    fn step(&self, a: i64) -> Option<Self> {
        Some((BigInt::from(a) * &self.0 + &self.1, self.0.clone()))
    }
    fn trivial(&self) -> bool {
        self.0.abs() <= BigInt::one()
    }
}

enum Outcome {
    Found,
    NotFound,
    Overflow,
}

struct Dfs<'a> {
    entries: &'a [i64],
    /// `suffix_caps[i]` = total crossings in regions `i..`.
    suffix_caps: Vec<u64>,
    counts: Vec<u64>,
}

impl Dfs<'_> {
    fn run<S: CfState>(&mut self, i: usize, state: &S, remaining: u64) -> Outcome {
        if i == self.entries.len() {
            return if remaining == 0 && state.trivial() {
                Outcome::Found
            } else {
                Outcome::NotFound
            };
        }
        if remaining > self.suffix_caps[i] {
            return Outcome::NotFound;
        }
        let a = self.entries[i];
        let cap = a.unsigned_abs().min(remaining);
        for k in 0..=cap {
            let Some(next) = state.step(changed_entry(a, k)) else {
                return Outcome::Overflow;
            };
            self.counts[i] = k;
            match self.run(i + 1, &next, remaining - k) {
                Outcome::NotFound => {}
                other => return other,
            }
        }
        self.counts[i] = 0;
        Outcome::NotFound
    }
}

/// Exact `u(D)` for the standard diagram of `word`, with the
/// lexicographically least witness among those of minimal weight.
pub fn diagram_unlink_number(word: &RationalWord) -> Result<DiagramUnlink> {
    diagram_unlink_number_with_ceiling(word, DEFAULT_WEIGHT_CEILING)
}

pub fn diagram_unlink_number_with_ceiling(
    word: &RationalWord,
    weight_ceiling: u64,
) -> Result<DiagramUnlink> {
    let entries = word.entries();
    let mut suffix_caps = vec![0u64; entries.len() + 1];
    for i in (0..entries.len()).rev() {
        suffix_caps[i] = suffix_caps[i + 1] + entries[i].unsigned_abs();
    }
    let total = suffix_caps[0];
    let mut dfs = Dfs {
        entries,
        suffix_caps,
        counts: vec![0; entries.len()],
    };
    let mut big = false;
    for w in 0..=total {
        if w > weight_ceiling {
            return Err(Error::WeightCeilingExceeded(weight_ceiling));
        }
        dfs.counts.iter_mut().for_each(|c| *c = 0);
        let outcome = if big {
            dfs.run(0, &<(BigInt, BigInt)>::start(), w)
        } else {
            match dfs.run(0, &<(i128, i128)>::start(), w) {
                Outcome::Overflow => {
                    big = true;
                    dfs.counts.iter_mut().for_each(|c| *c = 0);
                    dfs.run(0, &<(BigInt, BigInt)>::start(), w)
                }
                o => o,
            }
        };
        if let Outcome::Found = outcome {
            return Ok(DiagramUnlink {
                u_d: w,
                witness: ChangeVector(dfs.counts.clone()),
            });
        }
    }
    Err(Error::InternalExhaustion)
}

/// `u_M` of a rational link: `u(D)` of its canonical minimal diagram. All
/// minimal diagrams of a prime alternating link share this value.
pub fn u_min_diagram(key: &CanonicalKey) -> Result<u64> {
    Ok(diagram_unlink_number(&canonical_word(key)?)?.u_d)
}
