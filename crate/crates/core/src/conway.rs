//! Conway symbols for rational words (`5 1 4`) and three-column pretzels (`1,3,3`).
//!
//! Only integer tangles are understood. Anything that looks like the wider
//! Conway grammar (polyhedra, ramified tangles, products) is refused with
//! [`Error::UnsupportedNotation`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Twist counts of the integer tangles `a1 a2 ... aq`, in textual order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalWord(Vec<i64>);

impl RationalWord {
    /// Builds a word, rejecting the empty sequence.
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(RationalWord(entries))
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of absolute entries: the number of crossings in the standard diagram.
    pub fn crossing_sum(&self) -> u64 {
        self.0.iter().map(|a| a.unsigned_abs()).sum()
    }

    pub fn reversed(&self) -> RationalWord {
        let mut v = self.0.clone();
        v.reverse();
        RationalWord(v)
    }

    /// Mirror image: every twist flips handedness.
    pub fn mirrored(&self) -> RationalWord {
        RationalWord(self.0.iter().map(|a| -a).collect())
    }

    /// True when every entry is positive and both ends are at least 2
    /// (or the word is a single entry of at least 2). Such words are the
    /// reduced alternating diagrams.
    pub fn is_reduced_alternating(&self) -> bool {
        let e = &self.0;
        if e.iter().any(|&a| a < 1) {
            return false;
        }
        match e.len() {
            1 => e[0] >= 2,
            n => e[0] >= 2 && e[n - 1] >= 2,
        }
    }
}

impl From<RationalWord> for Vec<i64> {
    fn from(w: RationalWord) -> Self {
        w.0
    }
}

/// Half-twist counts of the three pretzel columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PretzelWord(pub [i64; 3]);

impl PretzelWord {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        PretzelWord([a, b, c])
    }

    pub fn columns(&self) -> [i64; 3] {
        self.0
    }

    /// Columns in ascending order; the link does not depend on column order.
    pub fn sorted(&self) -> PretzelWord {
        let mut c = self.0;
        c.sort_unstable();
        PretzelWord(c)
    }
}

fn check_supported(text: &str) -> Result<()> {
    if text
        .chars()
        .any(|c| matches!(c, '*' | '(' | ')' | ':' | '.' | '+' | '#'))
    {
        return Err(Error::UnsupportedNotation(text.trim().to_string()));
    }
    Ok(())
}

fn parse_int(token: &str, position: usize) -> Result<i64> {
    token.parse::<i64>().map_err(|_| Error::MalformedToken {
        token: token.to_string(),
        position,
    })
}

/// Parses a whitespace separated list of signed integers.
pub fn parse_rational(text: &str) -> Result<RationalWord> {
    if text.contains(',') {
        return Err(Error::UnsupportedNotation(text.trim().to_string()));
    }
    check_supported(text)?;
    let entries = text
        .split_whitespace()
        .enumerate()
        .map(|(i, tok)| parse_int(tok, i))
        .collect::<Result<Vec<_>>>()?;
    RationalWord::new(entries)
}

/// Parses three comma separated signed integers.
pub fn parse_pretzel(text: &str) -> Result<PretzelWord> {
    check_supported(text)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let cols = text
        .split(',')
        .enumerate()
        .map(|(i, tok)| parse_int(tok.trim(), i))
        .collect::<Result<Vec<_>>>()?;
    match cols.as_slice() {
        [a, b, c] => Ok(PretzelWord([*a, *b, *c])),
        _ => Err(Error::WrongArity { found: cols.len() }),
    }
}

pub fn format_rational(word: &RationalWord) -> String {
    word.to_string()
}

pub fn format_pretzel(word: &PretzelWord) -> String {
    word.to_string()
}

impl fmt::Display for RationalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PretzelWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "{a},{b},{c}")
    }
}

impl FromStr for RationalWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

impl FromStr for PretzelWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_pretzel(s)
    }
}
