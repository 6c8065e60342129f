//! Canonicalized signatures: the lexicographically greatest image of a
//! signature under relabeling of the row classes, and the right coset of
//! relabelings that achieve it.

use std::sync::OnceLock;

use crate::config::{Signature, TYPE_COUNT};
use crate::perm::{
    apply_to_signature, right_multiply, CosetHandle, Perm4, PermMask, SubgroupTable, FULL_MASK,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignatureCanonResult {
    pub canonical: Signature,
    pub coset: CosetHandle,
    /// Every `α` with `σ_α = σ^c`.
    pub achievers: PermMask,
}

fn finish(canonical: Signature, achievers: PermMask) -> SignatureCanonResult {
    let coset = SubgroupTable::get()
        .identify_coset(achievers)
        .expect("achiever sets are right cosets of a stabilizer");
    SignatureCanonResult { canonical, coset, achievers }
}

/// Tries all 24 relabelings.
pub fn canonicalize_signature(s: &Signature) -> SignatureCanonResult {
    let mut best = *s;
    let mut achievers: PermMask = 1;
    for a in Perm4::all().skip(1) {
        let image = apply_to_signature(a, s);
        match image.cmp(&best) {
            std::cmp::Ordering::Greater => {
                best = image;
                achievers = a.bit();
            }
            std::cmp::Ordering::Equal => achievers |= a.bit(),
            std::cmp::Ordering::Less => {}
        }
    }
    finish(best, achievers)
}

/// Position ranges of the weight groups in signature order.
const WEIGHT4: std::ops::Range<usize> = 0..1;
const WEIGHT3: std::ops::Range<usize> = 1..5;
const WEIGHT2: std::ops::Range<usize> = 5..11;
const WEIGHT1: std::ops::Range<usize> = 11..15;

/// Young subgroups of S₄ for the eight `</=` patterns among four sorted
/// values. Bit `i` of the pattern is set when sorted entries `i` and `i+1`
/// are equal; sorted position `q` corresponds to class `3 - q`.
fn young_subgroups() -> &'static [PermMask; 8] {
    static YOUNG: OnceLock<[PermMask; 8]> = OnceLock::new();
    YOUNG.get_or_init(|| {
        std::array::from_fn(|pattern| {
            let mut block = [0usize; 4];
            for q in 1..4 {
                block[q] = block[q - 1] + usize::from(pattern >> (q - 1) & 1 == 0);
            }
            let block_of_class = |c: usize| block[3 - c];
            let mask = Perm4::all()
                .filter(|y| (0..4).all(|c| block_of_class(y.apply(c)) == block_of_class(c)))
                .fold(0, |m, y| m | y.bit());
            debug_assert!(SubgroupTable::get().subgroup_index(mask).is_some());
            mask
        })
    })
}

/// Keeps the elements of `candidates` whose image is greatest on `range`.
fn restrict(s: &Signature, candidates: PermMask, range: std::ops::Range<usize>) -> PermMask {
    let mut best: Option<[u32; TYPE_COUNT]> = None;
    let mut keep = 0;
    for a in Perm4::in_mask(candidates) {
        let image = apply_to_signature(a, s).0;
        let part = &image[range.clone()];
        match best.as_ref().map(|b| part.cmp(&b[range.clone()])) {
            None | Some(std::cmp::Ordering::Greater) => {
                best = Some(image);
                keep = a.bit();
            }
            Some(std::cmp::Ordering::Equal) => keep |= a.bit(),
            Some(std::cmp::Ordering::Less) => {}
        }
    }
    keep
}

/// Same result as [`canonicalize_signature`], computed one weight group at a
/// time. Weight 4 is fixed by every relabeling; the weight-3 step sorts the
/// four counts and reads the candidate coset off the sorted pattern; weights
/// 2 and 1 search within the surviving candidates.
pub fn canonicalize_signature_grouped(s: &Signature) -> SignatureCanonResult {
    debug_assert_eq!(WEIGHT4.len(), 1);
    // count of the weight-3 type that misses class m
    let missing = |m: usize| s.0[WEIGHT3.start + 3 - m];
    let mut classes = [0usize, 1, 2, 3];
    classes.sort_by(|&a, &b| missing(b).cmp(&missing(a)).then(a.cmp(&b)));
    let sorted = classes.map(missing);
    let pattern = (0..3).fold(0, |p, i| p | usize::from(sorted[i] == sorted[i + 1]) << i);

    // α0 sends the class with the q-th largest count to 3 - q
    let mut images = [0u8; 4];
    for (q, &m) in classes.iter().enumerate() {
        images[m] = (3 - q) as u8;
    }
    let base = Perm4::from_images(images).unwrap();
    let mut candidates = right_multiply(young_subgroups()[pattern], base);
    debug_assert_ne!(candidates & FULL_MASK, 0);

    candidates = restrict(s, candidates, WEIGHT2);
    candidates = restrict(s, candidates, WEIGHT1);

    let first = Perm4::from_index(candidates.trailing_zeros() as usize);
    finish(apply_to_signature(first, s), candidates)
}

/// Runs the grouped or the baseline method.
pub fn canonicalize(s: &Signature, grouped: bool) -> SignatureCanonResult {
    if grouped {
        canonicalize_signature_grouped(s)
    } else {
        canonicalize_signature(s)
    }
}
