use proptest::prelude::*;

use unlink_core::bj::BjEngine;
use unlink_core::bounds::certify;
use unlink_core::conway::RationalWord;
use unlink_core::enumerate::enumerate_rational;
use unlink_core::rational::{crossing_number, key_of};
use unlink_core::search::diagram_unlink_number;
use unlink_core::section3::golden_tables;

fn positive_word() -> impl Strategy<Value = RationalWord> {
    prop::collection::vec(1i64..=5, 1..=5).prop_map(|v| RationalWord::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn gap_reports_are_consistent(word in positive_word()) {
        let key = key_of(&word);
        prop_assume!(!key.is_trivial());
        let e = BjEngine::new();
        let g = e.gap(&key).unwrap();
        prop_assert!(g.replay());
        prop_assert_eq!(g.delta_bj, g.u_m - g.u_bj);
        prop_assert!(certify(&key).unwrap().lower_bound <= g.u_bj);
        prop_assert_eq!(e.gap(&key_of(&word.reversed())).unwrap(), g.clone());
        prop_assert_eq!(e.u_bj(&key_of(&word.mirrored())).unwrap().value, g.u_bj);
        // a positive word is a reduced alternating diagram, so when it is
        // also minimal its unlinking number is u_M
        let d = diagram_unlink_number(&word).unwrap().u_d;
        if word.crossing_sum() == crossing_number(&key).unwrap() {
            prop_assert_eq!(d, g.u_m);
        } else {
            prop_assert!(d >= g.u_bj);
        }
    }
}

#[test]
fn golden_words_are_gapful() {
    let e = BjEngine::new();
    for t in golden_tables().unwrap() {
        for entry in &t.entries {
            let g = e.gap(&entry.key).unwrap();
            assert!(g.delta_bj > 0, "[{}] at n = {}", entry.read_as, t.crossings);
            assert_eq!(g.delta_bj == 2, entry.gap2, "[{}]", entry.read_as);
            assert_eq!(g.word.crossing_sum(), t.crossings);
        }
    }
}

#[test]
fn enumeration_records_are_consistent() {
    let e = BjEngine::new();
    for n in 3..=12 {
        let records = enumerate_rational(n, &e).unwrap();
        assert!(records.windows(2).all(|p| p[0].key < p[1].key));
        for r in &records {
            assert_eq!(r.crossings, n);
            assert_eq!(r.word.crossing_sum(), n);
            assert_eq!(key_of(&r.word), r.key);
            assert_eq!(r.delta_bj, r.u_m - r.u_bj);
        }
    }
}
