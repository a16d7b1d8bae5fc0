//! BJ-unlinking numbers of rational links and the gap `u_M - u_BJ`.
//!
//! `u_BJ` is a shortest path in the graph whose vertices are link classes and
//! whose edges are "switch one crossing of the minimal diagram, then pass to a
//! minimal diagram of the result". Rational links are prime and alternating,
//! so the canonical word stands in for every minimal diagram, and crossings of
//! one twist region all lead to the same class.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::io::{BufRead, Write};
use std::sync::RwLock;

use log::warn;
use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::conway::RationalWord;
use crate::error::{Error, Result};
use crate::rational::{canonical_word, key_of, representative_word, CanonicalKey};
use crate::search::{apply_changes, diagram_unlink_number, ChangeVector};

/// Everything known about one rational link class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub key: CanonicalKey,
    pub word: RationalWord,
    pub u_m: u64,
    pub u_bj: u64,
    pub delta_bj: u64,
    /// Canonical words from the link down to a trivial link, one per switch.
    pub bj_witness: Vec<RationalWord>,
    pub diagram_witness: ChangeVector,
}

impl GapReport {
    /// Re-checks both witnesses: the switch chain with [`replay_witness`], and
    /// the diagram change vector by applying it to the canonical word.
    pub fn replay(&self) -> bool {
        let chain = self.bj_witness.len() as u64 == self.u_bj + 1
            && key_of(&self.bj_witness[0]) == self.key
            && replay_witness(&self.bj_witness);
        let diagram = self.diagram_witness.weight() == self.u_m
            && apply_changes(&self.word, &self.diagram_witness)
                .is_ok_and(|w| key_of(&w).is_trivial());
        chain && diagram
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BjResult {
    pub value: u64,
    pub witness: Vec<RationalWord>,
}

fn switch_region(word: &RationalWord, region: usize) -> RationalWord {
    let mut e = word.entries().to_vec();
    e[region] -= 2 * e[region].signum();
    RationalWord::new(e).expect("non-empty")
}

/// Classes reached by switching one crossing of the canonical diagram,
/// without the descent check.
fn raw_children(key: &CanonicalKey) -> Result<BTreeSet<CanonicalKey>> {
    let word = canonical_word(key)?;
    Ok((0..word.len())
        .map(|i| key_of(&switch_region(&word, i)))
        .collect())
}

/// Children of `key`, checking that each has strictly fewer crossings.
pub fn bj_children(key: &CanonicalKey) -> Result<BTreeSet<CanonicalKey>> {
    let parent = canonical_word(key)?;
    let n = parent.crossing_sum();
    let children = raw_children(key)?;
    for c in &children {
        let m = if c.is_trivial() {
            0
        } else {
            canonical_word(c)?.crossing_sum()
        };
        if m >= n {
            return Err(Error::DescentViolation {
                parent: parent.to_string(),
                child: representative_word(c).to_string(),
            });
        }
    }
    Ok(children)
}

/// Memoising BJ engine. Safe to share between threads: values are
/// deterministic, so concurrent insertion of the same key is idempotent.
#[derive(Debug, Default)]
pub struct BjEngine {
    memo: RwLock<HashMap<CanonicalKey, u64>>,
}

impl BjEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cached(&self, key: &CanonicalKey) -> Option<u64> {
        self.memo.read().unwrap().get(key).copied()
    }

    pub fn cache_len(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    fn store(&self, key: CanonicalKey, value: u64) {
        self.memo.write().unwrap().insert(key, value);
    }

    /// `u_BJ` by memoised recursion, falling back to a breadth-first search
    /// over the class graph if a child ever fails to descend.
    pub fn value(&self, key: &CanonicalKey) -> Result<u64> {
        match self.value_recursive(key) {
            Err(Error::DescentViolation { parent, child }) => {
                warn!("descent violated ({parent} -> {child}); using breadth-first search");
                Ok(uniform_cost_search(key)?.len() as u64 - 1)
            }
            other => other,
        }
    }

    fn value_recursive(&self, key: &CanonicalKey) -> Result<u64> {
        if key.is_trivial() {
            return Ok(0);
        }
        if let Some(v) = self.cached(key) {
            return Ok(v);
        }
        let mut best = u64::MAX;
        for child in bj_children(key)? {
            best = best.min(self.value_recursive(&child)?);
            if best == 0 {
                break;
            }
        }
        let v = best + 1;
        self.store(key.clone(), v);
        Ok(v)
    }

    /// The least child (by key order) achieving `value(key) - 1`.
    fn next_on_chain(&self, key: &CanonicalKey, value: u64) -> Result<CanonicalKey> {
        for child in raw_children(key)? {
            if self.value(&child)? + 1 == value {
                return Ok(child);
            }
        }
        Err(Error::InternalExhaustion)
    }

    pub fn u_bj(&self, key: &CanonicalKey) -> Result<BjResult> {
        let value = self.value(key)?;
        let mut witness = vec![representative_word(key)];
        let mut cur = key.clone();
        let mut v = value;
        while v > 0 {
            cur = self.next_on_chain(&cur, v)?;
            v -= 1;
            witness.push(representative_word(&cur));
        }
        Ok(BjResult { value, witness })
    }

    pub fn gap(&self, key: &CanonicalKey) -> Result<GapReport> {
        let word = canonical_word(key)?;
        let diag = diagram_unlink_number(&word)?;
        let bj = self.u_bj(key)?;
        debug_assert!(bj.value <= diag.u_d);
        Ok(GapReport {
            key: key.clone(),
            word,
            u_m: diag.u_d,
            u_bj: bj.value,
            delta_bj: diag.u_d.saturating_sub(bj.value),
            bj_witness: bj.witness,
            diagram_witness: diag.witness,
        })
    }

    /// Writes `p_abs q_star u_bj` lines, sorted by key.
    pub fn save_cache<W: Write>(&self, mut out: W) -> Result<()> {
        let memo = self.memo.read().unwrap();
        let mut entries: Vec<_> = memo.iter().collect();
        entries.sort();
        for (k, v) in entries {
            writeln!(out, "{} {} {}", k.p_abs(), k.q_star(), v)?;
        }
        Ok(())
    }

    /// Loads a cache snapshot, skipping malformed or non-canonical lines.
    /// Returns the number of entries accepted.
    pub fn load_cache<R: BufRead>(&self, input: R) -> Result<usize> {
        let mut accepted = 0;
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match parse_cache_line(&line) {
                Some((key, v)) => {
                    self.store(key, v);
                    accepted += 1;
                }
                None => warn!("cache line {}: discarded `{}`", lineno + 1, line.trim()),
            }
        }
        Ok(accepted)
    }
}

fn parse_cache_line(line: &str) -> Option<(CanonicalKey, u64)> {
    let mut it = line.split_whitespace();
    let p: BigInt = it.next()?.parse().ok()?;
    let q: BigInt = it.next()?.parse().ok()?;
    let v: u64 = it.next()?.parse().ok()?;
    if it.next().is_some() || p < BigInt::from(2) || q < BigInt::from(1) || q >= p {
        return None;
    }
    if !p.gcd(&q).eq(&BigInt::from(1)) {
        return None;
    }
    let key = CanonicalKey::from_parts(p.clone(), q.clone());
    if key.p_abs() != &p || key.q_star() != &q || v == 0 {
        return None;
    }
    Some((key, v))
}

/// Breadth-first search from `key` to the nearest trivial class. Returns the
/// chain of keys, starting at `key`.
pub fn uniform_cost_search(key: &CanonicalKey) -> Result<Vec<CanonicalKey>> {
    if key.is_trivial() {
        return Ok(vec![key.clone()]);
    }
    let mut parent: HashMap<CanonicalKey, CanonicalKey> = HashMap::new();
    let mut queue = VecDeque::from([key.clone()]);
    parent.insert(key.clone(), key.clone());
    while let Some(cur) = queue.pop_front() {
        for child in raw_children(&cur)? {
            if parent.contains_key(&child) {
                continue;
            }
            parent.insert(child.clone(), cur.clone());
            if child.is_trivial() {
                let mut chain = vec![child.clone()];
                let mut at = child;
                while &at != key {
                    at = parent[&at].clone();
                    chain.push(at.clone());
                }
                chain.reverse();
                return Ok(chain);
            }
            queue.push_back(child);
        }
    }
    Err(Error::InternalExhaustion)
}

/// Checks that each consecutive pair of a BJ witness differs by one switch
/// followed by canonicalisation, and that the chain ends at a trivial link.
pub fn replay_witness(witness: &[RationalWord]) -> bool {
    let Some(last) = witness.last() else {
        return false;
    };
    if !key_of(last).is_trivial() {
        return false;
    }
    witness.windows(2).all(|pair| {
        let target = key_of(&pair[1]);
        (0..pair[0].len()).any(|i| key_of(&switch_region(&pair[0], i)) == target)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conway::parse_rational;
    use crate::rational::{canonical_key, LinkFraction};

    fn key(s: &str) -> CanonicalKey {
        key_of(&parse_rational(s).unwrap())
    }

    #[test]
    fn children_examples() {
        let c = bj_children(&key("5 1 4")).unwrap();
        for s in ["3 1 4", "5 1 2", "5 -1 4"] {
            assert!(c.contains(&key(s)), "{s}");
        }
        let engine = BjEngine::new();
        let least = c.iter().map(|k| engine.value(k).unwrap()).min();
        assert_eq!(least, Some(1));
        let t = bj_children(&key("3")).unwrap();
        assert_eq!(t, BTreeSet::from([canonical_key(&LinkFraction::new(1, 1))]));
        for (m, n) in [(2, 3), (3, 3), (4, 2)] {
            let c = bj_children(&key(&format!("{} {}", 2 * m, 2 * n))).unwrap();
            let expect = BTreeSet::from([
                key(&format!("{} {}", 2 * m - 2, 2 * n)),
                key(&format!("{} {}", 2 * m, 2 * n - 2)),
            ]);
            assert_eq!(c, expect);
        }
        assert_eq!(bj_children(&key("1")), Err(Error::TrivialLink));
    }

    #[test]
    fn u_bj_examples() {
        let e = BjEngine::new();
        assert_eq!(e.u_bj(&key("5 1 4")).unwrap().value, 2);
        assert_eq!(e.u_bj(&key("5 1 7")).unwrap().value, 3);
        assert_eq!(
            e.u_bj(&canonical_key(&LinkFraction::new(0, 1)))
                .unwrap()
                .value,
            0
        );
        assert_eq!(e.u_bj(&key("6 1 6")).unwrap().value, 3);
    }

    #[test]
    fn gap_examples() {
        let e = BjEngine::new();
        for (s, um, ubj) in [("5 1 4", 3, 2), ("4 1 4", 3, 2), ("6 1 6", 5, 3)] {
            let g = e.gap(&key(s)).unwrap();
            assert_eq!((g.u_m, g.u_bj, g.delta_bj), (um, ubj, um - ubj), "{s}");
            assert_eq!(g.bj_witness.len() as u64, g.u_bj + 1);
            assert!(replay_witness(&g.bj_witness));
        }
        assert_eq!(e.gap(&key("0")), Err(Error::TrivialLink));
    }

    #[test]
    fn bfs_agrees_with_recursion() {
        let e = BjEngine::new();
        for s in [
            "5 1 4",
            "6 1 6",
            "4 1 4 2",
            "8 1 5 2",
            "7 1 1 1 5",
            "2 3 1 4 1 2",
        ] {
            let k = key(s);
            let chain = uniform_cost_search(&k).unwrap();
            assert_eq!(chain.len() as u64 - 1, e.value(&k).unwrap(), "{s}");
        }
    }

    #[test]
    fn cache_round_trip() {
        let e = BjEngine::new();
        e.value(&key("6 1 6 3")).unwrap();
        let mut buf = Vec::new();
        e.save_cache(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().count() > 5);

        let fresh = BjEngine::new();
        let garbage = format!("{text}not a line\n7 3 2\n7 2\n9 3 1\n1 0 0\n");
        let n = fresh.load_cache(garbage.as_bytes()).unwrap();
        assert_eq!(n, e.cache_len());
        assert_eq!(
            fresh.value(&key("6 1 6 3")).unwrap(),
            e.value(&key("6 1 6 3")).unwrap()
        );
    }

    #[test]
    fn witness_replay_rejects_bad_chains() {
        let w = |s: &str| parse_rational(s).unwrap();
        assert!(replay_witness(&[w("3"), w("1")]));
        assert!(!replay_witness(&[w("5 1 4"), w("1")]));
        assert!(!replay_witness(&[w("3")]));
        assert!(!replay_witness(&[]));
    }

    #[test]
    fn gap_reports_replay() {
        let e = BjEngine::new();
        for s in ["5 1 4", "6 1 6", "7 1 1 1 5", "3", "2 2"] {
            let mut r = e.gap(&key(s)).unwrap();
            assert!(r.replay(), "{s}");
            if r.u_m > 0 {
                r.diagram_witness.0.iter_mut().for_each(|c| *c = 0);
                assert!(!r.replay(), "{s}");
            }
        }
    }
}
