//! All rational link classes of a given crossing number, with their gap data.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::bj::BjEngine;
use crate::conway::RationalWord;
use crate::error::{Error, Result};
use crate::rational::{key_of, serialize_bigint, CanonicalKey};

pub const MIN_CROSSINGS: u64 = 3;
pub const MAX_CROSSINGS: u64 = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumRecord {
    pub key: CanonicalKey,
    /// Canonical word; its entry sum is the crossing number.
    pub word: RationalWord,
    pub crossings: u64,
    pub components: u8,
    pub u_m: u64,
    pub u_bj: u64,
    pub delta_bj: u64,
}

struct Big<'a>(&'a BigInt);

impl Serialize for Big<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_bigint(self.0, s)
    }
}

impl Serialize for EnumRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EnumRecord", 8)?;
        st.serialize_field("word", &self.word.to_string())?;
        st.serialize_field("p", &Big(self.key.p_abs()))?;
        st.serialize_field("q_star", &Big(self.key.q_star()))?;
        st.serialize_field("crossings", &self.crossings)?;
        st.serialize_field("components", &self.components)?;
        st.serialize_field("u_m", &self.u_m)?;
        st.serialize_field("u_bj", &self.u_bj)?;
        st.serialize_field("delta_bj", &self.delta_bj)?;
        st.end()
    }
}

fn check_budget(n: u64) -> Result<()> {
    if (MIN_CROSSINGS..=MAX_CROSSINGS).contains(&n) {
        Ok(())
    } else {
        Err(Error::BudgetExceeded {
            n,
            min: MIN_CROSSINGS,
            max: MAX_CROSSINGS,
        })
    }
}

/// Calls `f` on every positive word with entry sum `n` whose end entries are
/// at least 2, plus `[n]`.
fn for_each_word(n: i64, f: &mut impl FnMut(&[i64])) {
    fn go(prefix: &mut Vec<i64>, left: i64, f: &mut impl FnMut(&[i64])) {
        if left >= 2 && !prefix.is_empty() {
            prefix.push(left);
            f(prefix);
            prefix.pop();
        }
        let first = prefix.is_empty();
        for a in if first { 2 } else { 1 }..=left - 2 {
            prefix.push(a);
            go(prefix, left - a, f);
            prefix.pop();
        }
    }
    f(&[n]);
    go(&mut Vec::new(), n, f);
}

/// The classes of crossing number `n`, in key order.
pub fn enumerate_keys(n: u64) -> Result<BTreeSet<CanonicalKey>> {
    check_budget(n)?;
    let mut keys = BTreeSet::new();
    for_each_word(n as i64, &mut |w| {
        keys.insert(key_of(&RationalWord::new(w.to_vec()).expect("non-empty")));
    });
    Ok(keys)
}

/// One record per class of crossing number `n`, in key order.
pub fn enumerate_rational(n: u64, engine: &BjEngine) -> Result<Vec<EnumRecord>> {
    let keys: Vec<CanonicalKey> = enumerate_keys(n)?.into_iter().collect();
    keys.par_iter()
        .map(|key| {
            let g = engine.gap(key)?;
            Ok(EnumRecord {
                key: key.clone(),
                crossings: g.word.crossing_sum(),
                word: g.word,
                components: key.component_count(),
                u_m: g.u_m,
                u_bj: g.u_bj,
                delta_bj: g.delta_bj,
            })
        })
        .collect()
}

/// Share of gapful classes among all classes of one crossing number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapRatio {
    pub gapful: u64,
    pub total: u64,
}

impl GapRatio {
    pub fn of(records: &[EnumRecord]) -> Self {
        GapRatio {
            gapful: records.iter().filter(|r| r.delta_bj > 0).count() as u64,
            total: records.len() as u64,
        }
    }

    /// Reduced exact value; `None` for an empty enumeration.
    pub fn exact(&self) -> Option<Ratio<u64>> {
        (self.total > 0).then(|| Ratio::new(self.gapful, self.total))
    }

    pub fn value(&self) -> f64 {
        self.gapful as f64 / self.total.max(1) as f64
    }
}

impl fmt::Display for GapRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} = {:.4}", self.gapful, self.total, self.value())
    }
}

pub fn gap_ratio(n: u64, engine: &BjEngine) -> Result<GapRatio> {
    Ok(GapRatio::of(&enumerate_rational(n, engine)?))
}

const CSV_HEADER: [&str; 8] = [
    "word",
    "p",
    "q_star",
    "crossings",
    "components",
    "u_M",
    "u_BJ",
    "delta",
];

fn row(r: &EnumRecord) -> [String; 8] {
    [
        r.word.to_string(),
        r.key.p_abs().to_string(),
        r.key.q_star().to_string(),
        r.crossings.to_string(),
        r.components.to_string(),
        r.u_m.to_string(),
        r.u_bj.to_string(),
        r.delta_bj.to_string(),
    ]
}

pub fn write_csv<W: Write>(records: &[EnumRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record(row(r)).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn write_json<W: Write>(records: &[EnumRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out).map_err(|e| Error::Io(e.to_string()))
}

/// Plain aligned columns with the CSV header.
pub fn write_table<W: Write>(records: &[EnumRecord], mut out: W) -> Result<()> {
    let rows: Vec<[String; 8]> = records.iter().map(row).collect();
    let width: Vec<usize> = (0..8)
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([CSV_HEADER[i].len()])
                .max()
                .unwrap()
        })
        .collect();
    let line = |cells: &[&str]| {
        let mut s = format!("{:<w$}", cells[0], w = width[0]);
        for (i, c) in cells.iter().enumerate().skip(1) {
            s.push_str(&format!("  {:>w$}", c, w = width[i]));
        }
        s
    };
    let io = |e: std::io::Error| Error::Io(e.to_string());
    writeln!(out, "{}", line(&CSV_HEADER)).map_err(io)?;
    for r in &rows {
        let cells: Vec<&str> = r.iter().map(String::as_str).collect();
        writeln!(out, "{}", line(&cells)).map_err(io)?;
    }
    Ok(())
}
