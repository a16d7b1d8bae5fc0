//! Three-column pretzels `P(a,b,c)`.
//!
//! A pretzel with a `±1` column is a rational link and one with a `0` column
//! is a connected sum of two `(2, n)` torus links. Everything else is handled
//! by the determinant, the odd-column recursion, or closed-form predictions.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use serde::Serialize;

use crate::bj::BjEngine;
use crate::conway::{PretzelWord, RationalWord};
use crate::error::{Error, Result};
use crate::rational::{key_of, representative_word, LinkFraction};
use crate::search::ChangeVector;

/// What a pretzel reduces to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PretzelState {
    /// Every column has at least two crossings.
    Pretzel(PretzelWord),
    Rational(RationalWord),
    /// Connected sum of the `(2, a)` and `(2, b)` torus links.
    Composite([i64; 2]),
}

/// `|ab + bc + ca|`.
pub fn pretzel_det(w: &PretzelWord) -> u64 {
    let [a, b, c] = w.columns();
    (a * b + b * c + c * a).unsigned_abs()
}

/// One component when at most one column is even, else one per even column.
pub fn pretzel_components(w: &PretzelWord) -> u8 {
    let evens = w.columns().iter().filter(|a| *a % 2 == 0).count() as u8;
    evens.max(1)
}

/// Fraction of `P(a, b, e)` for `e = ±1`.
fn unit_column_fraction(a: i64, b: i64, e: i64) -> LinkFraction {
    let p = BigInt::from(a) * b + BigInt::from(e) * (a + b);
    LinkFraction::new(p, b + e)
}

/// Rewrites a pretzel with a `0` or `±1` column.
pub fn pretzel_reduce(w: &PretzelWord) -> Result<PretzelState> {
    let cols = w.columns();
    if let Some(i) = cols.iter().position(|a| a.abs() == 1) {
        let (a, b) = (cols[(i + 1) % 3], cols[(i + 2) % 3]);
        let key = unit_column_fraction(a, b, cols[i]).key();
        return Ok(PretzelState::Rational(representative_word(&key)));
    }
    if let Some(i) = cols.iter().position(|&a| a == 0) {
        return Ok(PretzelState::Composite([
            cols[(i + 1) % 3],
            cols[(i + 2) % 3],
        ]));
    }
    Err(Error::IrreducibleHere(w.to_string()))
}

/// How to classify a pretzel whose columns all have at least two crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrivialityRule {
    /// Such a pretzel is a Montesinos link with three non-integral tangles.
    /// Its double branched cover is Seifert fibred with three exceptional
    /// fibres, which is neither the sphere nor a sum of `S^1 x S^2`, so it is
    /// never an unlink.
    #[default]
    Montesinos,
    /// Use only the determinant. It cannot separate `w` from an unlink when
    /// it equals the unlink's determinant (1 for knots, 0 for links); those
    /// cases are reported as indeterminate.
    Determinant,
}

/// Decides whether `w` is an unlink.
pub fn pretzel_is_trivial(w: &PretzelWord) -> Result<bool> {
    pretzel_is_trivial_with(w, TrivialityRule::default())
}

pub fn pretzel_is_trivial_with(w: &PretzelWord, rule: TrivialityRule) -> Result<bool> {
    match pretzel_reduce(w) {
        Ok(PretzelState::Rational(word)) => Ok(key_of(&word).is_trivial()),
        Ok(PretzelState::Composite([a, b])) => Ok(a.abs() <= 1 && b.abs() <= 1),
        Ok(PretzelState::Pretzel(_)) => unreachable!("reduce never returns a bare pretzel"),
        Err(_) => {
            let unlink_det = if pretzel_components(w) == 1 { 1 } else { 0 };
            if rule == TrivialityRule::Determinant && pretzel_det(w) == unlink_det {
                Err(Error::Indeterminate(w.to_string()))
            } else {
                Ok(false)
            }
        }
    }
}

/// Unlinking number of the standard pretzel diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PretzelUnlink {
    pub u_d: u64,
    pub witness: ChangeVector,
}

fn for_each_vector(caps: [u64; 3], weight: u64, mut f: impl FnMut([u64; 3]) -> bool) -> bool {
    for k0 in 0..=caps[0].min(weight) {
        for k1 in 0..=caps[1].min(weight - k0) {
            let k2 = weight - k0 - k1;
            if k2 <= caps[2] && f([k0, k1, k2]) {
                return true;
            }
        }
    }
    false
}

/// Least number of simultaneous crossing changes turning the standard diagram
/// into an unlink, with the lexicographically least witness.
pub fn pretzel_diagram_unlink(w: &PretzelWord) -> Result<PretzelUnlink> {
    pretzel_diagram_unlink_with(w, TrivialityRule::default())
}

/// As [`pretzel_diagram_unlink`]. Under [`TrivialityRule::Determinant`] it
/// fails with [`Error::Indeterminate`] once a vector no heavier than the
/// answer cannot be classified.
pub fn pretzel_diagram_unlink_with(w: &PretzelWord, rule: TrivialityRule) -> Result<PretzelUnlink> {
    let cols = w.columns();
    let caps = cols.map(|a| a.unsigned_abs());
    let total: u64 = caps.iter().sum();
    for weight in 0..=total {
        let mut found = None;
        let mut undecided = None;
        for_each_vector(caps, weight, |k| {
            let changed = PretzelWord(std::array::from_fn(|i| {
                cols[i] - 2 * k[i] as i64 * cols[i].signum()
            }));
            match pretzel_is_trivial_with(&changed, rule) {
                Ok(true) => {
                    found = Some(k);
                    true
                }
                Ok(false) => false,
                Err(e) => {
                    undecided.get_or_insert(e);
                    false
                }
            }
        });
        if let Some(k) = found {
            return Ok(PretzelUnlink {
                u_d: weight,
                witness: ChangeVector(k.to_vec()),
            });
        }
        // An unclassified vector at this weight might be trivial, so no
        // heavier answer can be trusted.
        if let Some(e) = undecided {
            return Err(e);
        }
    }
    Err(Error::InternalExhaustion)
}

/// Memoised `u_BJ` for pretzels with odd positive columns, by switching one
/// crossing of a column at a time. Pretzels that acquire a `1` column are
/// rational and go to the rational engine.
#[derive(Debug, Default)]
pub struct PretzelEngine {
    bj: BjEngine,
    memo: RwLock<HashMap<PretzelWord, u64>>,
}

impl PretzelEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_engine(bj: BjEngine) -> Self {
        PretzelEngine {
            bj,
            memo: RwLock::default(),
        }
    }

    pub fn rational(&self) -> &BjEngine {
        &self.bj
    }

    pub fn u_bj_odd_pretzel(&self, w: &PretzelWord) -> Result<u64> {
        let cols = w.columns();
        if cols.iter().any(|&a| a <= 0 || a % 2 == 0) {
            return Err(Error::NotOddPositive(w.to_string()));
        }
        self.odd_value(w.sorted())
    }

    fn odd_value(&self, w: PretzelWord) -> Result<u64> {
        if w.columns().contains(&1) {
            let PretzelState::Rational(word) = pretzel_reduce(&w)? else {
                unreachable!("a unit column always reduces to a rational word");
            };
            return self.bj.value(&key_of(&word));
        }
        if let Some(&v) = self.memo.read().unwrap().get(&w) {
            return Ok(v);
        }
        let mut best = u64::MAX;
        for i in 0..3 {
            let mut c = w.columns();
            c[i] -= 2;
            best = best.min(self.odd_value(PretzelWord(c).sorted())?);
        }
        let v = best + 1;
        self.memo.write().unwrap().insert(w, v);
        Ok(v)
    }
}

/// Closed-form values for the alternating three-column families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prediction {
    /// Which parity pattern applied: 1 all odd, 2 all even, 3 odd-even-odd,
    /// 4 even-odd-even.
    pub case: u8,
    pub u_bj: u64,
    pub u_m: u64,
    pub delta: u64,
}

/// Predicted `(u_BJ, u_M, gap)` for positive columns.
///
/// * all odd `2k+1 >= 2l+1 >= 2m+1 >= 3`: `u_BJ = u_M = l + m + 1`, which is
///   `(a + b) / 2` over the two smallest columns
/// * all even `2k, 2l, 2m >= 2`: `k + l + m` for both
/// * `2k+1, 2l, 2m+1` with `k >= m >= 1`, `l >= 1`: `m + k` when `l = 1`;
///   `u_BJ = m + k`, `u_M = m + k + 1` when `k >= l > 1`; `m + k + 1` for both
///   when `l > k`
/// * `2k, 2l+1, 2m` with `k >= m >= 1`: `u_BJ = k + l`, `u_M = k + l + m - 1`
pub fn theorem47_prediction(w: &PretzelWord) -> Result<Prediction> {
    let unsupported = || Error::UnsupportedParityPattern(w.to_string());
    let cols = w.sorted().columns();
    if cols[0] < 1 {
        return Err(unsupported());
    }
    let odd: Vec<u64> = cols
        .iter()
        .filter(|a| *a % 2 != 0)
        .map(|&a| a as u64)
        .collect();
    let even: Vec<u64> = cols
        .iter()
        .filter(|a| *a % 2 == 0)
        .map(|&a| a as u64)
        .collect();
    let (case, u_bj, u_m) = match (odd.as_slice(), even.as_slice()) {
        (&[c, b, _], []) if c >= 3 => {
            let (m, l) = ((c - 1) / 2, (b - 1) / 2);
            (1, l + m + 1, l + m + 1)
        }
        ([], &[a, b, c]) => {
            let s = (a + b + c) / 2;
            (2, s, s)
        }
        (&[small, large], &[e]) if small >= 3 => {
            let (m, k, l) = ((small - 1) / 2, (large - 1) / 2, e / 2);
            if l == 1 {
                (3, m + k, m + k)
            } else if k >= l {
                (3, m + k, m + k + 1)
            } else {
                (3, m + k + 1, m + k + 1)
            }
        }
        (&[o], &[small, large]) => {
            let (m, k, l) = (small / 2, large / 2, (o - 1) / 2);
            (4, k + l, k + l + m - 1)
        }
        _ => return Err(unsupported()),
    };
    Ok(Prediction {
        case,
        u_bj,
        u_m,
        delta: u_m - u_bj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{pretzel_bounds, signature_abs};
    use crate::conway::parse_rational;
    use crate::diagram::Diagram;
    use crate::rational::cf_eval;

    fn p(a: i64, b: i64, c: i64) -> PretzelWord {
        PretzelWord::new(a, b, c)
    }

    fn rational(w: &PretzelWord) -> RationalWord {
        match pretzel_reduce(w).unwrap() {
            PretzelState::Rational(r) => r,
            other => panic!("{w} reduced to {other:?}"),
        }
    }

    #[test]
    fn determinants() {
        assert_eq!(pretzel_det(&p(1, 3, 3)), 15);
        assert_eq!(pretzel_det(&p(2, -3, 2)), 8);
        assert_eq!(pretzel_det(&p(1, 1, 1)), 3);
    }

    #[test]
    fn unit_column_rewrites() {
        let engine = BjEngine::new();
        for c in [1, 3, 5, 7, 9] {
            let word = rational(&p(1, 1, c));
            assert_eq!(engine.value(&key_of(&word)).unwrap(), 1, "1,1,{c}");
        }
        for b in (3..=9).step_by(2) {
            for c in (b..=11).step_by(2) {
                let word = rational(&p(-1, b, c));
                let expected = parse_rational(&format!("{} 1 {}", b - 2, c - 2)).unwrap();
                assert_eq!(key_of(&word), key_of(&expected), "-1,{b},{c}");
            }
        }
        for k in 2..6 {
            let word = rational(&p(2 * k, 1, 2 * k));
            let expected = parse_rational(&format!("{} 1 {}", 2 * k, 2 * k)).unwrap();
            assert_eq!(key_of(&word), key_of(&expected));
        }
        assert_eq!(
            key_of(&rational(&p(1, 3, 3))),
            key_of(&parse_rational("3 1 3").unwrap())
        );
    }

    /// The rewrite agrees with the pretzel's own diagram on determinant,
    /// component count and signature.
    #[test]
    fn unit_column_rewrites_match_diagrams() {
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for e in [-1, 1] {
                    let w = p(a, e, b);
                    let d = Diagram::from_pretzel(&w);
                    let word = rational(&w);
                    let f = cf_eval(&word);
                    assert_eq!(d.determinant(), num_traits::Signed::abs(f.p()), "{w}");
                    assert_eq!(
                        d.orientation().components(),
                        pretzel_components(&w) as usize,
                        "{w}"
                    );
                    assert_eq!(d.max_abs_signature(), signature_abs(&word), "{w}");
                }
            }
        }
    }

    #[test]
    fn zero_columns() {
        assert_eq!(
            pretzel_reduce(&p(3, 0, 4)).unwrap(),
            PretzelState::Composite([4, 3])
        );
        assert!(pretzel_is_trivial(&p(1, 0, -1)).unwrap());
        assert!(pretzel_is_trivial(&p(0, 0, 0)).unwrap());
        assert!(!pretzel_is_trivial(&p(0, 0, 2)).unwrap());
        for (a, b) in [(3, 3), (2, 5), (-3, 4)] {
            let d = Diagram::from_pretzel(&p(a, b, 0));
            assert_eq!(d.determinant(), BigInt::from((a * b).abs()));
        }
        assert!(matches!(
            pretzel_reduce(&p(2, 3, 4)),
            Err(Error::IrreducibleHere(_))
        ));
    }

    #[test]
    fn triviality_of_large_columns() {
        let strict = TrivialityRule::Determinant;
        assert!(!pretzel_is_trivial_with(&p(3, 3, 3), strict).unwrap());
        for w in [p(-2, 3, 5), p(-2, 3, 7), p(5, -2, 3)] {
            assert!(matches!(
                pretzel_is_trivial_with(&w, strict),
                Err(Error::Indeterminate(_))
            ));
            assert!(!pretzel_is_trivial(&w).unwrap());
        }
        // two-component link with determinant 0
        assert!(matches!(
            pretzel_is_trivial_with(&p(6, -3, 6), strict),
            Err(Error::Indeterminate(_))
        ));
        assert!(matches!(
            pretzel_diagram_unlink_with(&p(6, -3, 6), strict),
            Err(Error::Indeterminate(_))
        ));
        assert_eq!(
            pretzel_diagram_unlink_with(&p(1, 1, 1), strict)
                .unwrap()
                .u_d,
            1
        );
    }

    #[test]
    fn odd_recursion_matches_formula() {
        let engine = PretzelEngine::new();
        for a in (1..=13).step_by(2) {
            for b in (a..=13).step_by(2) {
                for c in (b..=13).step_by(2) {
                    let v = engine.u_bj_odd_pretzel(&p(c, a, b)).unwrap();
                    assert_eq!(v, ((a + b) / 2) as u64, "{a},{b},{c}");
                }
            }
        }
        assert_eq!(engine.u_bj_odd_pretzel(&p(1, 3, 3)).unwrap(), 2);
        assert_eq!(engine.u_bj_odd_pretzel(&p(3, 3, 3)).unwrap(), 3);
        assert!(matches!(
            engine.u_bj_odd_pretzel(&p(2, 3, 3)),
            Err(Error::NotOddPositive(_))
        ));
        assert!(matches!(
            engine.u_bj_odd_pretzel(&p(-1, 3, 3)),
            Err(Error::NotOddPositive(_))
        ));
    }

    #[test]
    fn diagram_unlinking() {
        assert_eq!(pretzel_diagram_unlink(&p(4, 3, 4)).unwrap().u_d, 4);
        assert_eq!(pretzel_diagram_unlink(&p(1, 1, 1)).unwrap().u_d, 1);
        for k in 2..=4 {
            assert_eq!(
                pretzel_diagram_unlink(&p(2 * k, -3, 2 * k)).unwrap().u_d,
                2 * k as u64 - 1
            );
        }
        let r = pretzel_diagram_unlink(&p(2, 2, 2)).unwrap();
        assert_eq!((r.u_d, r.witness.0.clone()), (3, vec![1, 1, 1]));
    }

    #[test]
    fn column_symmetry() {
        for w in [p(4, 3, 2), p(5, 2, 3), p(1, 3, 5), p(4, -3, 2)] {
            let [a, b, c] = w.columns();
            let base = pretzel_diagram_unlink(&w).unwrap().u_d;
            for perm in [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                assert_eq!(
                    pretzel_diagram_unlink(&PretzelWord(perm)).unwrap().u_d,
                    base,
                    "{w}"
                );
                assert_eq!(pretzel_det(&PretzelWord(perm)), pretzel_det(&w));
            }
        }
    }

    #[test]
    fn prediction_examples() {
        let pr = theorem47_prediction(&p(4, 3, 4)).unwrap();
        assert_eq!((pr.case, pr.u_bj, pr.delta), (4, 3, 1));
        let pr = theorem47_prediction(&p(5, 2, 3)).unwrap();
        assert_eq!((pr.case, pr.u_bj, pr.u_m, pr.delta), (3, 3, 3, 0));
        let pr = theorem47_prediction(&p(2, 2, 2)).unwrap();
        assert_eq!((pr.case, pr.u_bj, pr.u_m, pr.delta), (2, 3, 3, 0));
        let pr = theorem47_prediction(&p(3, 3, 3)).unwrap();
        assert_eq!((pr.case, pr.u_bj), (1, 3));
        assert!(matches!(
            theorem47_prediction(&p(4, -3, 4)),
            Err(Error::UnsupportedParityPattern(_))
        ));
        assert!(matches!(
            theorem47_prediction(&p(1, 2, 3)),
            Err(Error::UnsupportedParityPattern(_))
        ));
    }

    #[test]
    fn predictions_sit_between_bounds_and_diagrams() {
        for a in 1..=8 {
            for b in a..=8 {
                for c in b..=8 {
                    let w = p(a, b, c);
                    let Ok(pr) = theorem47_prediction(&w) else {
                        continue;
                    };
                    let lower = pretzel_bounds(&w).lower_bound;
                    let u_d = pretzel_diagram_unlink(&w).unwrap().u_d;
                    assert!(
                        lower <= pr.u_bj && pr.u_bj <= u_d,
                        "{w}: {lower} {pr:?} {u_d}"
                    );
                }
            }
        }
    }

    #[test]
    fn predicted_u_m_matches_diagram_search() {
        for a in 2..=9 {
            for b in a..=9 {
                for c in b..=9 {
                    let w = p(a, b, c);
                    if let Ok(pr) = theorem47_prediction(&w) {
                        assert_eq!(pretzel_diagram_unlink(&w).unwrap().u_d, pr.u_m, "{w}");
                    }
                }
            }
        }
    }

    #[test]
    fn even_odd_even_diagram_matches_prediction() {
        for k in 1..=4 {
            for m in 1..=k {
                for l in 1..=4 {
                    let w = p(2 * k, 2 * l + 1, 2 * m);
                    let pr = theorem47_prediction(&w).unwrap();
                    assert_eq!(pretzel_diagram_unlink(&w).unwrap().u_d, pr.u_m, "{w}");
                    // half the signature equals u_BJ
                    let bounds = pretzel_bounds(&w);
                    assert_eq!(bounds.abs_signature.div_ceil(2), pr.u_bj, "{w}");
                }
            }
        }
    }
}
