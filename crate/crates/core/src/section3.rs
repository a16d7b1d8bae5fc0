//! Printed tables of gapful rational knots and links, and their comparison
//! with a fresh enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;

use serde::Deserialize;

use crate::bj::BjEngine;
use crate::conway::parse_rational;
use crate::enumerate::enumerate_rational;
use crate::error::{Error, Result};
use crate::rational::{canonical_word, crossing_number, key_of, CanonicalKey};

pub const GOLDEN_TEXT: &str = include_str!("../data/section3.toml");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    table: Vec<RawTable>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    crossings: u64,
    knots: Vec<String>,
    links: Vec<String>,
    gap2: Vec<String>,
    #[serde(default)]
    readings: BTreeMap<String, String>,
}

/// One printed word and the class it names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenEntry {
    pub printed: String,
    /// Differs from `printed` only when a reading was supplied.
    pub read_as: String,
    pub key: CanonicalKey,
    /// 1 if printed among the knots, 2 among the links.
    pub listed_components: u8,
    pub gap2: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenTable {
    pub crossings: u64,
    pub entries: Vec<GoldenEntry>,
}

impl GoldenTable {
    pub fn keys(&self) -> BTreeSet<CanonicalKey> {
        self.entries.iter().map(|e| e.key.clone()).collect()
    }

    pub fn knots(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.listed_components == 1)
            .count()
    }

    pub fn links(&self) -> usize {
        self.entries.len() - self.knots()
    }
}

fn bad(msg: String) -> Error {
    Error::Registry(msg)
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenTable>> {
    let raw: RawFile = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
    let mut out = Vec::new();
    for t in raw.table {
        let n = t.crossings;
        for printed in t.readings.keys() {
            if !t.knots.contains(printed) && !t.links.contains(printed) {
                return Err(bad(format!(
                    "n = {n}: reading for unlisted word {printed:?}"
                )));
            }
        }
        for w in &t.gap2 {
            if !t.knots.contains(w) && !t.links.contains(w) {
                return Err(bad(format!("n = {n}: bold word {w:?} is not listed")));
            }
        }
        let mut entries = Vec::new();
        let mut seen = BTreeSet::new();
        for (words, listed_components) in [(&t.knots, 1), (&t.links, 2)] {
            for printed in words {
                let read_as = t.readings.get(printed).unwrap_or(printed).clone();
                let key = key_of(&parse_rational(&read_as)?);
                let c = crossing_number(&key)?;
                if c != n {
                    return Err(bad(format!("n = {n}: {read_as:?} has crossing number {c}")));
                }
                if !seen.insert(key.clone()) {
                    return Err(bad(format!("n = {n}: {read_as:?} is listed twice")));
                }
                entries.push(GoldenEntry {
                    gap2: t.gap2.contains(printed),
                    printed: printed.clone(),
                    read_as,
                    key,
                    listed_components,
                });
            }
        }
        out.push(GoldenTable {
            crossings: n,
            entries,
        });
    }
    Ok(out)
}

/// The bundled tables, one per crossing number.
pub fn golden_tables() -> Result<Vec<GoldenTable>> {
    parse_golden(GOLDEN_TEXT)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDiff {
    pub crossings: u64,
    /// Gapful classes as printed.
    pub expected: BTreeSet<CanonicalKey>,
    /// Gapful classes found by enumeration.
    pub computed: BTreeSet<CanonicalKey>,
    pub missing: Vec<CanonicalKey>,
    pub extra: Vec<CanonicalKey>,
    pub expected_delta2: BTreeSet<CanonicalKey>,
    /// Computed classes with gap at least 2.
    pub computed_delta2: BTreeSet<CanonicalKey>,
    /// Printed among knots but a link, or the other way round.
    pub misfiled: Vec<CanonicalKey>,
    pub notes: Vec<String>,
}

impl TableDiff {
    pub fn is_match(&self) -> bool {
        self.missing.is_empty()
            && self.extra.is_empty()
            && self.misfiled.is_empty()
            && self.expected_delta2 == self.computed_delta2
    }
}

fn words(keys: impl IntoIterator<Item = CanonicalKey>) -> String {
    let v: Vec<String> = keys
        .into_iter()
        .map(|k| {
            canonical_word(&k)
                .map(|w| format!("[{w}]"))
                .unwrap_or_else(|_| k.to_string())
        })
        .collect();
    v.join(" ")
}

impl fmt::Display for TableDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n = {}: {} expected, {} computed, {} with gap 2",
            self.crossings,
            self.expected.len(),
            self.computed.len(),
            self.computed_delta2.len()
        )?;
        if self.is_match() {
            write!(f, ", match")?;
        }
        if !self.missing.is_empty() {
            write!(f, "\n  missing: {}", words(self.missing.iter().cloned()))?;
        }
        if !self.extra.is_empty() {
            write!(f, "\n  extra: {}", words(self.extra.iter().cloned()))?;
        }
        if !self.misfiled.is_empty() {
            write!(f, "\n  misfiled: {}", words(self.misfiled.iter().cloned()))?;
        }
        if self.expected_delta2 != self.computed_delta2 {
            let lost = self
                .expected_delta2
                .difference(&self.computed_delta2)
                .cloned();
            let found = self
                .computed_delta2
                .difference(&self.expected_delta2)
                .cloned();
            write!(f, "\n  gap 2 printed only: {}", words(lost))?;
            write!(f, "\n  gap 2 computed only: {}", words(found))?;
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}

pub fn diff_table(golden: &GoldenTable, engine: &BjEngine) -> Result<TableDiff> {
    let records = enumerate_rational(golden.crossings, engine)?;
    let gapful: BTreeMap<CanonicalKey, _> = records
        .into_iter()
        .filter(|r| r.delta_bj > 0)
        .map(|r| (r.key.clone(), r))
        .collect();
    let expected = golden.keys();
    let computed: BTreeSet<CanonicalKey> = gapful.keys().cloned().collect();
    let mut notes = Vec::new();
    for e in &golden.entries {
        if e.read_as != e.printed {
            notes.push(format!("{:?} read as [{}]", e.printed, e.read_as));
        }
    }
    let misfiled = golden
        .entries
        .iter()
        .filter(|e| e.key.component_count() != e.listed_components)
        .map(|e| e.key.clone())
        .collect();
    Ok(TableDiff {
        crossings: golden.crossings,
        missing: expected.difference(&computed).cloned().collect(),
        extra: computed.difference(&expected).cloned().collect(),
        expected_delta2: golden
            .entries
            .iter()
            .filter(|e| e.gap2)
            .map(|e| e.key.clone())
            .collect(),
        computed_delta2: gapful
            .values()
            .filter(|r| r.delta_bj >= 2)
            .map(|r| r.key.clone())
            .collect(),
        expected,
        computed,
        misfiled,
        notes,
    })
}

/// Diffs every bundled table whose crossing number lies in `range`.
pub fn verify_section3(range: RangeInclusive<u64>, engine: &BjEngine) -> Result<Vec<TableDiff>> {
    golden_tables()?
        .iter()
        .filter(|t| range.contains(&t.crossings))
        .map(|t| diff_table(t, engine))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        let tables = golden_tables().unwrap();
        let counts: Vec<(u64, usize, usize, usize)> = tables
            .iter()
            .map(|t| {
                (
                    t.crossings,
                    t.knots(),
                    t.links(),
                    t.entries.iter().filter(|e| e.gap2).count(),
                )
            })
            .collect();
        assert_eq!(
            counts,
            vec![
                (9, 0, 1, 0),
                (10, 1, 0, 0),
                (11, 1, 4, 0),
                (12, 5, 0, 0),
                (13, 7, 16, 1),
                (14, 31, 5, 0),
                (15, 43, 63, 4),
                (16, 138, 42, 2),
            ]
        );
        let read: Vec<&GoldenEntry> = tables
            .iter()
            .flat_map(|t| &t.entries)
            .filter(|e| e.read_as != e.printed)
            .collect();
        assert_eq!(read.len(), 1);
        assert_eq!(
            (read[0].printed.as_str(), read[0].read_as.as_str()),
            ("6 13 3", "6 1 3 3")
        );
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let t = |body: &str| parse_golden(&format!("[[table]]\ncrossings = 9\n{body}"));
        assert!(t("knots = []\nlinks = [\"4 1 4\"]\ngap2 = []").is_ok());
        // wrong crossing number
        assert!(t("knots = []\nlinks = [\"4 1 3\"]\ngap2 = []").is_err());
        // same class twice, once reversed
        assert!(t("knots = []\nlinks = [\"4 1 4\", \"4 1 4\"]\ngap2 = []").is_err());
        assert!(t("knots = []\nlinks = []\ngap2 = [\"4 1 4\"]").is_err());
        assert!(t(
            "knots = []\nlinks = [\"4 1 4\"]\ngap2 = []\nreadings = { \"5 1 4\" = \"4 1 4\" }"
        )
        .is_err());
        assert!(t("knots = []\nlinks = []\ngap2 = []\nextra = 1").is_err());
    }

    #[test]
    fn small_tables_match() {
        let e = BjEngine::new();
        for d in verify_section3(9..=12, &e).unwrap() {
            assert!(d.is_match(), "{d}");
        }
    }
}
