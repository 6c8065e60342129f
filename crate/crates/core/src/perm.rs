//! Table-driven arithmetic in the symmetric group on the four row classes.
//!
//! Elements are numbered 0..24 in a recursive order: the first six fix class
//! 3 (a copy of S₃, itself ordered with the two elements fixing class 2
//! first), and index 0 is the identity. All tables are generated once by
//! exhaustive closure.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::config::{ColumnType, Signature, TYPE_COUNT, TYPE_ORDER, TYPE_POSITION};
use crate::error::{Error, Result};

pub const ORDER: usize = 24;

/// A 24-bit set of element indices.
pub type PermMask = u32;

pub const FULL_MASK: PermMask = (1 << ORDER) - 1;

/// A permutation of `{0,1,2,3}`; `images[i]` is where class `i` moves.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Perm4 {
    images: [u8; 4],
    index: u8,
}

struct Tables {
    elems: [[u8; 4]; ORDER],
    index_of: [u8; 256],
    compose: [[u8; ORDER]; ORDER],
    inverse: [u8; ORDER],
    type_image: [[u8; 16]; ORDER],
    sig_position: [[u8; TYPE_COUNT]; ORDER],
}

fn encode(images: [u8; 4]) -> usize {
    images.iter().rev().fold(0, |acc, &x| acc * 4 + x as usize)
}

fn recursive_order(n: usize) -> Vec<[u8; 4]> {
    if n <= 1 {
        return vec![[0, 1, 2, 3]];
    }
    let prev = recursive_order(n - 1);
    let mut out = Vec::with_capacity(prev.len() * n);
    for j in (0..n).rev() {
        for s in &prev {
            // transposition (j, n-1) after s
            let mut img = *s;
            for x in img.iter_mut() {
                if *x as usize == j {
                    *x = (n - 1) as u8;
                } else if *x as usize == n - 1 {
                    *x = j as u8;
                }
            }
            out.push(img);
        }
    }
    out
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let order = recursive_order(4);
        let mut elems = [[0u8; 4]; ORDER];
        let mut index_of = [u8::MAX; 256];
        for (i, p) in order.iter().enumerate() {
            elems[i] = *p;
            index_of[encode(*p)] = i as u8;
        }
        let mut compose = [[0u8; ORDER]; ORDER];
        let mut inverse = [0u8; ORDER];
        let mut type_image = [[0u8; 16]; ORDER];
        let mut sig_position = [[0u8; TYPE_COUNT]; ORDER];
        for a in 0..ORDER {
            for b in 0..ORDER {
                let ab = std::array::from_fn(|i| elems[a][elems[b][i] as usize]);
                compose[a][b] = index_of[encode(ab)];
            }
            let mut inv = [0u8; 4];
            for i in 0..4 {
                inv[elems[a][i] as usize] = i as u8;
            }
            inverse[a] = index_of[encode(inv)];
            for t in 0..16u8 {
                type_image[a][t as usize] = (0..4)
                    .filter(|&i| t >> i & 1 == 1)
                    .fold(0, |acc, i| acc | 1 << elems[a][i]);
            }
            for p in 0..TYPE_COUNT {
                sig_position[a][p] = TYPE_POSITION[type_image[a][TYPE_ORDER[p] as usize] as usize] as u8;
            }
        }
        Tables { elems, index_of, compose, inverse, type_image, sig_position }
    })
}

impl Perm4 {
    pub fn identity() -> Self {
        Perm4 { images: [0, 1, 2, 3], index: 0 }
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < ORDER, "S4 index {index} out of range");
        Perm4 { images: tables().elems[index], index: index as u8 }
    }

    /// `None` unless `images` is a bijection on `{0,1,2,3}`.
    pub fn from_images(images: [u8; 4]) -> Option<Self> {
        if images.iter().any(|&x| x > 3) {
            return None;
        }
        let index = tables().index_of[encode(images)];
        (index != u8::MAX).then_some(Perm4 { images, index })
    }

    pub fn transposition(a: u8, b: u8) -> Self {
        let mut images = [0, 1, 2, 3];
        images.swap(a as usize, b as usize);
        Perm4::from_images(images).unwrap()
    }

    /// All 24 elements in index order.
    pub fn all() -> impl Iterator<Item = Perm4> {
        (0..ORDER).map(Perm4::from_index)
    }

    /// Elements whose index bit is set in `mask`.
    pub fn in_mask(mask: PermMask) -> impl Iterator<Item = Perm4> {
        (0..ORDER).filter(move |&i| mask >> i & 1 == 1).map(Perm4::from_index)
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn images(self) -> [u8; 4] {
        self.images
    }

    pub fn apply(self, i: usize) -> usize {
        self.images[i] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Perm4) -> Perm4 {
        Perm4::from_index(tables().compose[self.index()][other.index()] as usize)
    }

    pub fn inverse(self) -> Perm4 {
        Perm4::from_index(tables().inverse[self.index()] as usize)
    }

    pub fn bit(self) -> PermMask {
        1 << self.index
    }

    /// Image of a raw 4-bit type mask (0 maps to 0).
    pub fn apply_to_type_bits(self, t: u8) -> u8 {
        tables().type_image[self.index()][t as usize & 15]
    }

    /// Position in signature order that the type at position `p` moves to.
    pub fn apply_to_position(self, p: usize) -> usize {
        tables().sig_position[self.index()][p] as usize
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Perm4#{}[{} {} {} {}]",
            self.index, self.images[0], self.images[1], self.images[2], self.images[3]
        )
    }
}

pub fn compose(a: Perm4, b: Perm4) -> Perm4 {
    a.compose(b)
}

/// Bit `a(i)` of the result is set iff bit `i` of `t` is set.
pub fn apply_to_type(a: Perm4, t: ColumnType) -> ColumnType {
    ColumnType::new(a.apply_to_type_bits(t.bits())).expect("nonzero types map to nonzero types")
}

/// `result(a[T]) = s(T)` for every type `T`.
pub fn apply_to_signature(a: Perm4, s: &Signature) -> Signature {
    let mut out = Signature::default();
    let row = &tables().sig_position[a.index()];
    for p in 0..TYPE_COUNT {
        out.0[row[p] as usize] = s.0[p];
    }
    out
}

/// `{h ∘ g : h ∈ mask}`.
pub fn right_multiply(mask: PermMask, g: Perm4) -> PermMask {
    let t = tables();
    Perm4::in_mask(mask).fold(0, |acc, h| acc | 1 << t.compose[h.index()][g.index()])
}

/// A right coset `H g`, identified by the index of `H` in [`SubgroupTable`]
/// and its least-index element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CosetHandle {
    pub subgroup: usize,
    pub representative: Perm4,
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    pub mask: PermMask,
    pub order: usize,
}

/// All subgroups of S₄ and all their right cosets.
#[derive(Debug)]
pub struct SubgroupTable {
    subgroups: Vec<Subgroup>,
    cosets: HashMap<PermMask, CosetHandle>,
}

fn closure(gens: PermMask) -> PermMask {
    let t = tables();
    let mut set = gens | 1;
    loop {
        let mut next = set;
        for a in Perm4::in_mask(set) {
            for b in Perm4::in_mask(set) {
                next |= 1 << t.compose[a.index()][b.index()];
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

impl SubgroupTable {
    pub fn get() -> &'static SubgroupTable {
        static TABLE: OnceLock<SubgroupTable> = OnceLock::new();
        TABLE.get_or_init(SubgroupTable::build)
    }

    fn build() -> SubgroupTable {
        // every subgroup of S4 is generated by at most two elements
        let mut masks: Vec<PermMask> = Vec::new();
        for a in 0..ORDER {
            for b in a..ORDER {
                let h = closure(1 << a | 1 << b);
                if !masks.contains(&h) {
                    masks.push(h);
                }
            }
        }
        masks.sort_by_key(|&m| (m.count_ones(), m));
        let subgroups: Vec<Subgroup> = masks
            .iter()
            .map(|&mask| Subgroup { mask, order: mask.count_ones() as usize })
            .collect();
        let mut cosets = HashMap::new();
        for (i, h) in subgroups.iter().enumerate() {
            for g in Perm4::all() {
                let coset = right_multiply(h.mask, g);
                let representative = Perm4::from_index(coset.trailing_zeros() as usize);
                cosets.entry(coset).or_insert(CosetHandle { subgroup: i, representative });
            }
        }
        SubgroupTable { subgroups, cosets }
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn subgroup_count(&self) -> usize {
        self.subgroups.len()
    }

    pub fn coset_count(&self) -> usize {
        self.cosets.len()
    }

    /// Index of the subgroup with exactly this element mask.
    pub fn subgroup_index(&self, mask: PermMask) -> Option<usize> {
        self.subgroups.iter().position(|h| h.mask == mask)
    }

    pub fn identify_coset(&self, mask: PermMask) -> Result<CosetHandle> {
        self.cosets.get(&mask).copied().ok_or(Error::NotACoset(mask))
    }

    /// Order histogram `(order, number of subgroups)`, ascending by order.
    pub fn census(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for h in &self.subgroups {
            match out.last_mut() {
                Some((o, n)) if *o == h.order => *n += 1,
                _ => out.push((h.order, 1)),
            }
        }
        out
    }
}

pub fn identify_coset(mask: PermMask) -> Result<CosetHandle> {
    SubgroupTable::get().identify_coset(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(images: [u8; 4]) -> Perm4 {
        Perm4::from_images(images).unwrap()
    }

    #[test]
    fn order_is_recursive() {
        assert_eq!(Perm4::from_index(0), Perm4::identity());
        for i in 0..6 {
            assert_eq!(Perm4::from_index(i).apply(3), 3);
        }
        for i in 0..2 {
            assert_eq!(Perm4::from_index(i).apply(2), 2);
        }
        for i in 6..24 {
            assert_ne!(Perm4::from_index(i).apply(3), 3);
        }
        let all: std::collections::HashSet<_> = Perm4::all().map(|a| a.images()).collect();
        assert_eq!(all.len(), 24);
    }

    #[test]
    fn compose_examples() {
        let id = Perm4::identity();
        for b in Perm4::all() {
            assert_eq!(compose(id, b), b);
            assert_eq!(compose(b, b.inverse()), id);
        }
        // (0 1) after (1 2): 0 -> 0 -> 1, 1 -> 2 -> 2, 2 -> 1 -> 0
        let c = compose(Perm4::transposition(0, 1), Perm4::transposition(1, 2));
        assert_eq!(c.images(), [1, 2, 0, 3]);
    }

    #[test]
    fn type_action() {
        let t1 = ColumnType::new(1).unwrap();
        assert_eq!(apply_to_type(Perm4::identity(), t1), t1);
        assert_eq!(apply_to_type(Perm4::transposition(0, 1), t1).bits(), 2);
        let f = ColumnType::new(0xF).unwrap();
        for a in Perm4::all() {
            assert_eq!(apply_to_type(a, f), f);
            for w in 1..=4 {
                let mut image: Vec<u8> = (1..16u8)
                    .filter(|t| t.count_ones() == w)
                    .map(|t| a.apply_to_type_bits(t))
                    .collect();
                image.sort();
                let class: Vec<u8> = (1..16u8).filter(|t| t.count_ones() == w).collect();
                assert_eq!(image, class);
            }
        }
        // 3-cycle 0->1->2->0 sends {0,3} to {1,3}
        assert_eq!(p([1, 2, 0, 3]).apply_to_type_bits(0b1001), 0b1010);
    }

    #[test]
    fn signature_action() {
        let mut s = Signature::default();
        s.0[TYPE_POSITION[3]] = 1;
        s.0[TYPE_POSITION[1]] = 2;
        s.0[TYPE_POSITION[2]] = 2;
        assert_eq!(apply_to_signature(Perm4::identity(), &s), s);
        assert_eq!(apply_to_signature(Perm4::transposition(0, 1), &s), s);
        let moved = apply_to_signature(p([2, 3, 0, 1]), &s);
        assert_eq!(moved.0[TYPE_POSITION[0xC]], 1);
        assert_eq!(moved.0[TYPE_POSITION[4]], 2);
        assert_eq!(moved.0[TYPE_POSITION[8]], 2);
    }

    #[test]
    fn census() {
        let table = SubgroupTable::get();
        assert_eq!(table.subgroup_count(), 30);
        assert_eq!(table.coset_count(), 234);
        assert_eq!(
            table.census(),
            vec![(1, 1), (2, 9), (3, 4), (4, 7), (6, 4), (8, 3), (12, 1), (24, 1)]
        );
        let index_sum: usize = table.subgroups().iter().map(|h| ORDER / h.order).sum();
        assert_eq!(index_sum, 234);
    }

    #[test]
    fn identify_examples() {
        let table = SubgroupTable::get();
        let trivial = table.identify_coset(1).unwrap();
        assert_eq!(table.subgroups()[trivial.subgroup].order, 1);
        assert_eq!(trivial.representative, Perm4::identity());
        let all = table.identify_coset(FULL_MASK).unwrap();
        assert_eq!(table.subgroups()[all.subgroup].order, 24);
        assert_eq!(all.representative, Perm4::identity());
        assert!(matches!(table.identify_coset(0b110), Err(Error::NotACoset(_))));
        assert!(matches!(table.identify_coset(0), Err(Error::NotACoset(_))));
    }

    #[test]
    fn coset_masks_match_handles() {
        let table = SubgroupTable::get();
        let mut accepted = 0;
        for mask in 1..=FULL_MASK {
            if mask.count_ones() as usize > 24 || 24 % mask.count_ones() != 0 {
                continue;
            }
            if let Ok(h) = table.identify_coset(mask) {
                accepted += 1;
                let sub = table.subgroups()[h.subgroup].mask;
                assert_eq!(right_multiply(sub, h.representative), mask);
                assert_eq!(h.representative.index(), mask.trailing_zeros() as usize);
            }
        }
        assert_eq!(accepted, 234);
    }

    #[test]
    fn action_axiom() {
        let mut rng = 0x1234_5678_u64;
        for _ in 0..50 {
            let mut s = Signature::default();
            for slot in s.0.iter_mut() {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *slot = (rng >> 60) as u32;
            }
            for a in Perm4::all() {
                for b in Perm4::all() {
                    let lhs = apply_to_signature(a, &apply_to_signature(b, &s));
                    let rhs = apply_to_signature(compose(a, b), &s);
                    assert_eq!(lhs, rhs);
                }
                assert_eq!(apply_to_signature(a, &s).total(), s.total());
            }
        }
    }
}
