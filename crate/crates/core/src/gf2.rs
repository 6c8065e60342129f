//! The anchored N₁ embedding of an N₁′ configuration and the minimum weight
//! of the GF(2) code spanned by its rows and the anchor vector.
//!
//! A configuration with `c` columns embeds in length `c + 5`: body columns
//! `0..c`, one anchor column `c + k` per row class `k`, and the shared column
//! `c + 4`. A row of class `k` becomes `body ∪ {c + k, c + 4}` and the anchor
//! vector is `{c, c+1, c+2, c+3, c+4}`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use crate::config::{bits, Configuration, CLASSES};
use crate::error::{Error, Result};
use crate::validity;

/// Generator sets larger than this are refused by the exhaustive span scan.
pub const MAX_GENERATORS: usize = 32;

/// A word of length `len ≤ 128` over GF(2).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct EmbeddedWord {
    pub bits: u128,
    pub len: usize,
}

impl EmbeddedWord {
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&j| self.bits >> j & 1 == 1).collect()
    }
}

impl std::fmt::Debug for EmbeddedWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.support())
    }
}

#[derive(Clone, Debug)]
pub struct Embedding {
    pub rows: Vec<EmbeddedWord>,
    pub anchor: EmbeddedWord,
}

impl Embedding {
    /// Rows followed by the anchor.
    pub fn generators(&self) -> Vec<EmbeddedWord> {
        let mut g = self.rows.clone();
        g.push(self.anchor);
        g
    }
}

pub fn anchor_column(cols: usize, class: usize) -> usize {
    cols + class
}

pub fn shared_column(cols: usize) -> usize {
    cols + CLASSES
}

pub fn embed(cfg: &Configuration) -> Result<Embedding> {
    if let Some(v) = validity::first_violation(cfg) {
        return Err(Error::InvalidConfiguration(v.to_string()));
    }
    let c = cfg.cols();
    let len = c + 5;
    let shared = 1u128 << shared_column(c);
    let rows = cfg
        .classed_rows()
        .map(|(k, r)| EmbeddedWord { bits: r as u128 | 1 << anchor_column(c, k) | shared, len })
        .collect();
    let anchor = EmbeddedWord { bits: 0b1_1111 << c, len };
    Ok(Embedding { rows, anchor })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanReport {
    pub min_weight: u32,
    pub rank: usize,
    pub witness: EmbeddedWord,
}

/// GF(2) rank by elimination on `u128` words.
pub fn rank(words: &[EmbeddedWord]) -> usize {
    let mut basis: Vec<u128> = Vec::new();
    for w in words {
        let mut x = w.bits;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            // keep the basis sorted by leading bit, descending
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Minimum Hamming weight over all nonzero combinations, visited in Gray-code
/// order so each step is a single XOR.
pub fn span_min_weight(generators: &[EmbeddedWord]) -> Result<SpanReport> {
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty generator list".into()))?;
    if generators.len() > MAX_GENERATORS {
        return Err(Error::InvalidArgument(format!(
            "{} generators exceeds the exhaustive limit of {MAX_GENERATORS}",
            generators.len()
        )));
    }
    let len = first.len;
    let mut current = 0u128;
    let mut best: Option<(u32, u128)> = None;
    for step in 1u64..1 << generators.len() {
        current ^= generators[step.trailing_zeros() as usize].bits;
        let w = current.count_ones();
        if w != 0 && best.map_or(true, |(b, _)| w < b) {
            best = Some((w, current));
        }
    }
    let rank = rank(generators);
    // all-dependent generator sets have only the zero codeword
    let (min_weight, witness) = best.unwrap_or((0, 0));
    Ok(SpanReport { min_weight, rank, witness: EmbeddedWord { bits: witness, len } })
}

/// `true` iff the rows and the anchor span a code of minimum weight 5.
pub fn is_n1l(cfg: &Configuration) -> Result<bool> {
    let emb = embed(cfg)?;
    let generators = emb.generators();
    if generators.len() > MAX_GENERATORS {
        return Err(Error::InvalidArgument("too many rows for the exhaustive check".into()));
    }
    let mut current = 0u128;
    for step in 1u64..1 << generators.len() {
        current ^= generators[step.trailing_zeros() as usize].bits;
        if current != 0 && current.count_ones() <= 4 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least number of anchor-block ones in a combination whose rows meet an odd
/// number of classes `o` times, taken over adding or omitting the anchor.
const MIN_ANCHOR_WEIGHT: [u32; CLASSES + 1] = [0, 2, 2, 1, 1];

/// The low-weight part of the span of a parent configuration, used to decide
/// the N₁ₗ property of its one-row extensions.
///
/// A combination of rows is summarized by its body (`u64`) and the 4-bit mask
/// of classes contributing an odd number of rows. Anchor and shared columns
/// are then determined up to whether the anchor vector is added, so only the
/// body and class parity need to be stored. Adding a weight-3 row can lower
/// body weight by at most 3, so only combinations of body weight ≤ 7 can
/// produce a word of weight ≤ 4.
#[derive(Clone, Debug, Default)]
pub struct ParentSpan {
    low: Vec<(u64, u8)>,
}

impl ParentSpan {
    pub fn new(parent: &Configuration) -> Self {
        let rows: Vec<(u64, u8)> = parent.classed_rows().map(|(k, r)| (r, 1u8 << k)).collect();
        let mut low = vec![(0u64, 0u8)];
        let (mut body, mut parity) = (0u64, 0u8);
        for step in 1u64..1 << rows.len() {
            let (r, p) = rows[step.trailing_zeros() as usize];
            body ^= r;
            parity ^= p;
            if body.count_ones() <= 7 {
                low.push((body, parity));
            }
        }
        ParentSpan { low }
    }

    /// Number of stored low-weight combinations (including the empty one).
    pub fn len(&self) -> usize {
        self.low.len()
    }

    pub fn is_empty(&self) -> bool {
        self.low.is_empty()
    }

    /// Whether adding `row` to class `class` keeps minimum weight 5.
    pub fn admits(&self, row: u64, class: usize) -> bool {
        let bit = 1u8 << class;
        self.low.iter().all(|&(body, parity)| {
            let (body, parity) = (body ^ row, parity ^ bit);
            // An empty body with even parity spans only the zero word and the anchor.
            if body == 0 && parity == 0 {
                return true;
            }
            body.count_ones() + MIN_ANCHOR_WEIGHT[parity.count_ones() as usize] > 4
        })
    }
}

/// N₁ₗ test for `parent` plus one new row, given that `parent` itself is
/// N₁ₗ′. Only combinations containing the new row are examined.
pub fn is_n1l_incremental(parent: &Configuration, new_row: u64, new_class: usize) -> Result<bool> {
    if new_class >= CLASSES {
        return Err(Error::InvalidArgument(format!("row class {new_class} out of range")));
    }
    Ok(ParentSpan::new(parent).admits(new_row, new_class))
}

/// `(1 + n + C(n,2)) / 2^(n-k)`, exactly.
pub fn goodness_measure(n: usize, k: usize) -> Result<BigRational> {
    if k > n {
        return Err(Error::InvalidArgument(format!("dimension {k} exceeds length {n}")));
    }
    let n_big = BigUint::from(n);
    let numerator = BigUint::one() + &n_big + &n_big * BigUint::from(n.saturating_sub(1)) / 2u32;
    let denominator = BigUint::one() << (n - k);
    Ok(BigRational::new(numerator.into(), denominator.into()))
}

/// Body columns of a witness word and the anchor/shared columns it touches,
/// for display.
pub fn describe_word(cols: usize, w: &EmbeddedWord) -> String {
    let body: Vec<String> = bits(w.bits as u64 & crate::config::col_mask(cols))
        .map(|j| j.to_string())
        .collect();
    let mut extra = Vec::new();
    for k in 0..CLASSES {
        if w.bits >> anchor_column(cols, k) & 1 == 1 {
            extra.push(format!("a{k}"));
        }
    }
    if w.bits >> shared_column(cols) & 1 == 1 {
        extra.push("i".to_string());
    }
    let mut parts = body;
    parts.extend(extra);
    format!("{{{}}}", parts.join(","))
}
