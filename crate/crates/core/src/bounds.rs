//! Lower bounds for the unlinking number from the linking number and the
//! signature. Both are read off the standard diagram of the canonical word,
//! and only absolute values are reported.
//!
//! A crossing change moves the signature by at most 2, and the unlink has
//! signature 0, so `ceil(|sigma| / 2)` bounds the unlinking number for every
//! orientation. For two-component links the larger of the two relative
//! orientations is used; it is odd whenever the determinant is nonzero.

use serde::Serialize;

use crate::conway::{PretzelWord, RationalWord};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::rational::{canonical_word, key_of, CanonicalKey};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCertificate {
    pub key: CanonicalKey,
    /// Absent for knots.
    pub abs_linking: Option<u64>,
    pub abs_signature: u64,
    pub lower_bound: u64,
}

fn canonical_diagram(word: &RationalWord) -> Option<Diagram> {
    let key = key_of(word);
    canonical_word(&key).ok().map(|w| Diagram::from_word(&w))
}

/// `|lk|` of a two-component link; `None` for knots.
pub fn linking_number_abs(word: &RationalWord) -> Option<u64> {
    let key = key_of(word);
    if key.component_count() != 2 {
        return None;
    }
    let Some(diagram) = canonical_diagram(word) else {
        return Some(0);
    };
    Some(
        diagram
            .linking_number(&diagram.orientation())
            .unsigned_abs(),
    )
}

/// `|sigma|`, maximised over the relative orientations of a two-component link.
pub fn signature_abs(word: &RationalWord) -> u64 {
    canonical_diagram(word).map_or(0, |d| d.max_abs_signature())
}

pub fn certify(key: &CanonicalKey) -> Result<BoundCertificate> {
    if key.is_trivial() {
        return Err(Error::TrivialLink);
    }
    let word = canonical_word(key)?;
    let abs_linking = linking_number_abs(&word);
    let abs_signature = signature_abs(&word);
    let lower_bound = abs_linking.unwrap_or(0).max(abs_signature.div_ceil(2));
    Ok(BoundCertificate {
        key: key.clone(),
        abs_linking,
        abs_signature,
        lower_bound,
    })
}

/// Bounds for a pretzel read off its standard diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PretzelBounds {
    pub components: usize,
    /// Sum of `|lk|` over pairs of components.
    pub abs_linking: u64,
    pub abs_signature: u64,
    pub lower_bound: u64,
}

pub fn pretzel_bounds(word: &PretzelWord) -> PretzelBounds {
    let diagram = Diagram::from_pretzel(word);
    let o = diagram.orientation();
    let lk = diagram.linking_matrix(&o);
    let k = o.components();
    let abs_linking = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| lk[i][j].unsigned_abs())
        .sum::<u64>();
    let abs_signature = diagram.max_abs_signature();
    PretzelBounds {
        components: k,
        abs_linking,
        abs_signature,
        lower_bound: abs_linking.max(abs_signature.div_ceil(2)),
    }
}
