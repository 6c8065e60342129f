//! Canonical representatives.
//!
//! The canonical form of a configuration is the lexicographically greatest
//! matrix reachable by
//!
//! 1. relabeling row classes with a permutation that sends the signature to
//!    its canonicalized form,
//! 2. permuting rows within each class, and
//! 3. permuting columns within each column-type block,
//!
//! where the matrix is read row-major (class 0 first, columns in type order)
//! as one big-endian bit string.
//!
//! The search builds the matrix one row at a time. Columns carry an ordered
//! partition that starts as the type blocks; a row placed at the current level
//! puts its ones at the front of each cell it touches, which splits that cell.
//! The candidate rows at a level are the unplaced rows of the class being
//! filled, and only those producing the greatest bit string survive. Branches
//! whose prefix falls below the best matrix found so far are cut.

use std::cmp::Ordering;

use crate::config::{
    bits, CanonicalKey, Configuration, RowPartition, Signature, CLASSES, TYPE_COUNT, TYPE_ORDER,
    TYPE_POSITION,
};
use crate::error::{Error, Result};
use crate::perm::Perm4;
use crate::sigcanon::{self, SignatureCanonResult};
use crate::validity;

/// Row and column intervals of the 4 × 15 block grid of a normalized
/// configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    pub row_blocks: [std::ops::Range<usize>; CLASSES],
    pub col_blocks: [std::ops::Range<usize>; TYPE_COUNT],
}

impl BlockPartition {
    pub fn of(partition: &RowPartition, signature: &Signature) -> Self {
        let row_blocks = std::array::from_fn(|k| partition.class_range(k));
        let mut start = 0;
        let col_blocks = std::array::from_fn(|p| {
            let n = signature.0[p] as usize;
            start += n;
            start - n..start
        });
        BlockPartition { row_blocks, col_blocks }
    }
}

/// Ordered column partition at one search level. `order[pos]` is the column
/// at position `pos`, and bit `pos` of `starts` marks the first position of a
/// cell.
#[derive(Clone, Copy)]
struct Cells {
    order: [u8; 64],
    pos_of: [u8; 64],
    starts: u64,
}

#[inline]
fn upto(pos: usize) -> u64 {
    u64::MAX >> (63 - pos)
}

impl Cells {
    #[inline]
    fn cell_start(&self, pos: usize) -> usize {
        63 - (self.starts & upto(pos)).leading_zeros() as usize
    }

    #[inline]
    fn cell_end(&self, start: usize, cols: usize) -> usize {
        let after = if start >= 63 { 0 } else { self.starts & !upto(start) };
        if after == 0 {
            cols
        } else {
            after.trailing_zeros() as usize
        }
    }

    /// The row's bit string under this partition: bit `63 - pos` set when
    /// position `pos` holds a one. Ones fill each cell from its start.
    #[inline]
    fn value(&self, row: u64) -> u64 {
        let mut v = 0u64;
        for j in bits(row) {
            let mut pos = self.cell_start(self.pos_of[j] as usize);
            while v >> (63 - pos) & 1 == 1 {
                pos += 1;
            }
            v |= 1 << (63 - pos);
        }
        v
    }

    /// Moves the row's columns to the front of their cells and splits.
    fn refine(&mut self, row: u64, cols: usize) {
        let mut placed = 0u64;
        let mut touched = 0u64;
        for j in bits(row) {
            let pos = self.pos_of[j] as usize;
            let s = self.cell_start(pos);
            let mut target = s;
            while placed >> target & 1 == 1 {
                target += 1;
            }
            placed |= 1 << target;
            touched |= 1 << s;
            let other = self.order[target] as usize;
            self.order.swap(pos, target);
            self.pos_of[j] = target as u8;
            self.pos_of[other] = pos as u8;
        }
        for s in bits(touched) {
            let end = self.cell_end(s, cols);
            let mut split = s;
            while split < end && placed >> split & 1 == 1 {
                split += 1;
            }
            if split < end {
                self.starts |= 1 << split;
            }
        }
    }
}

/// Reusable canonical-labeling state.
pub struct Canonicalizer {
    grouped: bool,
    rows: Vec<u64>,
    cols: usize,
    level_class: Vec<u8>,
    class_rows: [u64; CLASSES],
    best: Vec<u64>,
    current: Vec<u64>,
    have_best: bool,
    used: u64,
    leaves: u64,
}

impl Default for Canonicalizer {
    fn default() -> Self {
        Canonicalizer::new(false)
    }
}

impl Canonicalizer {
    /// `grouped` selects the weight-grouped signature canonicalization.
    pub fn new(grouped: bool) -> Self {
        Canonicalizer {
            grouped,
            rows: Vec::new(),
            cols: 0,
            level_class: Vec::new(),
            class_rows: [0; CLASSES],
            best: Vec::new(),
            current: Vec::new(),
            have_best: false,
            used: 0,
            leaves: 0,
        }
    }

    /// Leaves reached since construction; a measure of search effort.
    pub fn leaves(&self) -> u64 {
        self.leaves
    }

    pub fn canonical_form(&mut self, cfg: &Configuration) -> Result<Configuration> {
        check(cfg)?;
        Ok(self.run(cfg, None).0)
    }

    pub fn canonical_key(&mut self, cfg: &Configuration) -> Result<CanonicalKey> {
        check(cfg)?;
        Ok(self.key_unchecked(cfg))
    }

    /// Canonical key of a configuration already known to be valid N₁′.
    pub fn key_unchecked(&mut self, cfg: &Configuration) -> CanonicalKey {
        let (_, partition) = self.search(cfg, None);
        self.best_key(&partition)
    }

    /// Greatest matrix under block-preserving permutations only, with the
    /// class order as given.
    pub fn canonical_form_fixed_classes(&mut self, cfg: &Configuration) -> Configuration {
        self.run(cfg, Some(Perm4::identity().bit())).0
    }

    fn run(&mut self, cfg: &Configuration, achievers: Option<u32>) -> (Configuration, RowPartition) {
        let (_, partition) = self.search(cfg, achievers);
        let rows = self.best[..cfg.row_count()].iter().map(|v| v.reverse_bits()).collect();
        let out = Configuration::new(cfg.cols(), partition, rows).expect("same shape as input");
        (out, partition)
    }

    fn best_key(&self, partition: &RowPartition) -> CanonicalKey {
        let rows: Vec<u64> = self.rows.iter().enumerate().map(|(i, _)| self.best[i].reverse_bits()).collect();
        CanonicalKey::encode(self.cols, partition, &rows)
    }

    /// Fills `self.best`; returns the signature result (if computed) and the
    /// canonical partition.
    fn search(
        &mut self,
        cfg: &Configuration,
        achievers: Option<u32>,
    ) -> (Option<SignatureCanonResult>, RowPartition) {
        let cols = cfg.cols();
        let r = cfg.row_count();
        assert!(r <= 64, "at most 64 rows are supported");
        let supports = cfg.class_supports();
        let mut type_cols = [0u64; 16];
        for j in 0..cols {
            let t = (0..CLASSES).fold(0usize, |t, k| t | ((supports[k] >> j & 1) as usize) << k);
            type_cols[t] |= 1 << j;
        }
        let (sig_result, achievers) = match achievers {
            Some(a) => (None, a),
            None => {
                let mut sig = Signature::default();
                for (t, &m) in type_cols.iter().enumerate().skip(1) {
                    sig.0[TYPE_POSITION[t]] = m.count_ones();
                }
                let res = sigcanon::canonicalize(&sig, self.grouped);
                (Some(res), res.achievers)
            }
        };

        self.rows.clear();
        self.rows.extend_from_slice(cfg.rows());
        self.cols = cols;
        self.best.resize(r, 0);
        self.current.resize(r, 0);
        self.have_best = false;
        let old_partition = *cfg.partition();
        let mut partition = RowPartition::default();

        for alpha in Perm4::in_mask(achievers) {
            let inv = alpha.inverse();
            let sizes: [usize; CLASSES] = std::array::from_fn(|j| old_partition.size(inv.apply(j)));
            partition = RowPartition(sizes);
            self.level_class.clear();
            for (j, &s) in sizes.iter().enumerate() {
                self.level_class.extend(std::iter::repeat(j as u8).take(s));
            }
            for j in 0..CLASSES {
                let range = old_partition.class_range(inv.apply(j));
                self.class_rows[j] = range.fold(0u64, |m, i| m | 1 << i);
            }
            let mut cells = Cells { order: [0; 64], pos_of: [0; 64], starts: 0 };
            let mut pos = 0usize;
            for &t in TYPE_ORDER.iter() {
                let m = type_cols[inv.apply_to_type_bits(t) as usize];
                if m == 0 {
                    continue;
                }
                cells.starts |= 1 << pos;
                for j in bits(m) {
                    cells.order[pos] = j as u8;
                    cells.pos_of[j] = pos as u8;
                    pos += 1;
                }
            }
            debug_assert_eq!(pos, cols, "configuration has an all-zero column");
            self.used = 0;
            let greater = !self.have_best;
            self.descend(0, &cells, greater);
        }
        (sig_result, partition)
    }

    fn descend(&mut self, level: usize, cells: &Cells, mut greater: bool) {
        let r = self.rows.len();
        if level == r {
            self.leaves += 1;
            if greater {
                self.best.copy_from_slice(&self.current);
                self.have_best = true;
            }
            return;
        }
        let candidates = self.class_rows[self.level_class[level] as usize] & !self.used;
        let mut values = [0u64; 64];
        let mut max = 0u64;
        for i in bits(candidates) {
            let v = cells.value(self.rows[i]);
            values[i] = v;
            max = max.max(v);
        }
        if !greater {
            match max.cmp(&self.best[level]) {
                Ordering::Less => return,
                Ordering::Greater => greater = true,
                Ordering::Equal => {}
            }
        }
        self.current[level] = max;
        for i in bits(candidates) {
            if values[i] != max {
                continue;
            }
            let mut child = *cells;
            child.refine(self.rows[i], self.cols);
            self.used |= 1 << i;
            self.descend(level + 1, &child, greater);
            self.used &= !(1 << i);
            greater = false;
        }
    }
}

fn check(cfg: &Configuration) -> Result<()> {
    match validity::first_violation(cfg) {
        Some(v) => Err(Error::InvalidConfiguration(v.to_string())),
        None => Ok(()),
    }
}

pub fn canonical_form(cfg: &Configuration) -> Result<Configuration> {
    Canonicalizer::default().canonical_form(cfg)
}

pub fn canonical_key(cfg: &Configuration) -> Result<CanonicalKey> {
    Canonicalizer::default().canonical_key(cfg)
}

pub fn canonical_form_fixed_classes(cfg: &Configuration) -> Configuration {
    Canonicalizer::default().canonical_form_fixed_classes(cfg)
}

/// Largest configuration accepted by [`brute_force_canonical`].
pub const BRUTE_FORCE_MAX_ROWS: usize = 5;
pub const BRUTE_FORCE_MAX_COLS: usize = 9;

/// Exhaustive oracle for [`canonical_form`]: every class relabeling that
/// maximizes the signature (found by direct comparison of all 24), every
/// row order within classes, and for each row order the column order that
/// maximizes the matrix, which is the within-block descending sort of the
/// column vectors.
pub fn brute_force_canonical(cfg: &Configuration) -> Result<Configuration> {
    if cfg.row_count() > BRUTE_FORCE_MAX_ROWS || cfg.cols() > BRUTE_FORCE_MAX_COLS {
        return Err(Error::TooLarge { rows: cfg.row_count(), cols: cfg.cols() });
    }
    check(cfg)?;
    let images: Vec<(Configuration, Signature)> = Perm4::all()
        .map(|a| {
            let p = cfg.permute_classes(a).normalize_layout();
            let s = p.signature().expect("valid configurations have no zero column");
            (p, s)
        })
        .collect();
    let top = images.iter().map(|(_, s)| *s).max().unwrap();

    let mut best: Option<(Vec<u64>, RowPartition)> = None;
    for (p, s) in images.iter().filter(|(_, s)| *s == top) {
        let blocks = BlockPartition::of(p.partition(), s);
        let orders: Vec<Vec<Vec<usize>>> =
            (0..CLASSES).map(|k| permutations(p.partition().size(k))).collect();
        let mut idx = [0usize; CLASSES];
        loop {
            let order: [Vec<usize>; CLASSES] = std::array::from_fn(|k| orders[k][idx[k]].clone());
            let m = matrix_with_sorted_columns(&p.reorder_rows(&order), &blocks);
            if best.as_ref().map_or(true, |(b, _)| m > *b) {
                best = Some((m, *p.partition()));
            }
            // odometer over the per-class permutation lists
            let mut k = 0;
            while k < CLASSES {
                idx[k] += 1;
                if idx[k] < orders[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == CLASSES {
                break;
            }
        }
    }
    let (values, partition) = best.unwrap();
    let rows = values.iter().map(|v| v.reverse_bits()).collect();
    Configuration::new(cfg.cols(), partition, rows)
}

/// Row strings (bit `63 - pos`) after sorting each column block by column
/// vector, greatest first.
fn matrix_with_sorted_columns(cfg: &Configuration, blocks: &BlockPartition) -> Vec<u64> {
    let r = cfg.row_count();
    let colvec = |j: usize| -> u64 {
        (0..r).fold(0u64, |acc, i| acc | ((cfg.rows()[i] >> j & 1) << (63 - i)))
    };
    let mut arranged: Vec<u64> = Vec::with_capacity(cfg.cols());
    for block in &blocks.col_blocks {
        let mut vs: Vec<u64> = block.clone().map(colvec).collect();
        vs.sort_unstable_by(|a, b| b.cmp(a));
        arranged.extend(vs);
    }
    (0..r)
        .map(|i| {
            arranged
                .iter()
                .enumerate()
                .fold(0u64, |acc, (pos, &v)| acc | ((v >> (63 - i) & 1) << (63 - pos)))
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(n);
    fn go(n: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for x in 0..n {
            if !current.contains(&x) {
                current.push(x);
                go(n, current, out);
                current.pop();
            }
        }
    }
    go(n, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(cols: usize, rows: &[(usize, [usize; 3])]) -> Configuration {
        Configuration::from_class_rows(cols, rows.iter().map(|&(k, r)| (k, r))).unwrap()
    }

    #[test]
    fn single_row() {
        let seed = Configuration::seed();
        assert_eq!(canonical_form_fixed_classes(&seed), seed);
        assert_eq!(canonical_form(&seed).unwrap(), seed);
        assert_eq!(brute_force_canonical(&seed).unwrap(), seed);
    }

    #[test]
    fn two_row_example_under_column_relabeling() {
        let base = cfg(5, &[(0, [0, 1, 2]), (1, [2, 3, 4])]);
        let expected = canonical_form_fixed_classes(&base.normalize_layout());
        let perms: [[usize; 5]; 3] = [[1, 0, 2, 3, 4], [0, 1, 2, 4, 3], [1, 0, 2, 4, 3]];
        for p in perms {
            let moved = base.map_columns(&p).normalize_layout();
            assert_eq!(canonical_form_fixed_classes(&moved), expected);
        }
        assert_eq!(canonical_form(&base).unwrap(), brute_force_canonical(&base).unwrap());
    }

    #[test]
    fn row_swap_within_class() {
        let a = cfg(6, &[(0, [0, 1, 2]), (0, [3, 4, 5])]);
        let b = cfg(6, &[(0, [3, 4, 5]), (0, [0, 1, 2])]);
        assert_eq!(canonical_form_fixed_classes(&a), canonical_form_fixed_classes(&b));
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn three_classes_at_two_rows() {
        let keys = [
            canonical_key(&cfg(5, &[(0, [0, 1, 2]), (1, [2, 3, 4])])).unwrap(),
            canonical_key(&cfg(6, &[(0, [0, 1, 2]), (0, [3, 4, 5])])).unwrap(),
            canonical_key(&cfg(6, &[(0, [0, 1, 2]), (1, [3, 4, 5])])).unwrap(),
        ];
        assert_ne!(keys[0], keys[1]);
        assert_ne!(keys[1], keys[2]);
        assert_ne!(keys[0], keys[2]);
        // the same shapes placed in other classes give the same keys
        assert_eq!(canonical_key(&cfg(5, &[(3, [4, 0, 2]), (2, [2, 3, 1])])).unwrap(), keys[0]);
        assert_eq!(canonical_key(&cfg(6, &[(2, [0, 4, 5]), (2, [1, 2, 3])])).unwrap(), keys[1]);
    }

    #[test]
    fn canonical_form_is_normalized_and_idempotent() {
        let c = cfg(9, &[(0, [0, 1, 2]), (1, [0, 3, 4]), (2, [1, 5, 6]), (1, [2, 7, 8])]);
        let f = canonical_form(&c).unwrap();
        assert!(f.is_normalized());
        assert_eq!(canonical_form(&f).unwrap(), f);
        assert_eq!(f.signature().unwrap(), sigcanon::canonicalize_signature(&c.signature().unwrap()).canonical);
        assert_eq!(brute_force_canonical(&c).unwrap(), f);
    }

    #[test]
    fn grouped_canonicalizer_agrees() {
        let c = cfg(9, &[(0, [0, 1, 2]), (1, [0, 3, 4]), (2, [1, 5, 6]), (1, [2, 7, 8])]);
        let a = Canonicalizer::new(false).canonical_form(&c).unwrap();
        let b = Canonicalizer::new(true).canonical_form(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_guard_and_validation() {
        let big = cfg(
            12,
            &[(0, [0, 1, 2]), (0, [3, 4, 5]), (0, [6, 7, 8]), (0, [9, 10, 11]), (1, [0, 3, 6]), (1, [1, 4, 9])],
        );
        assert!(matches!(brute_force_canonical(&big), Err(Error::TooLarge { .. })));
        let bad = cfg(4, &[(0, [0, 1, 2]), (1, [1, 2, 3])]);
        assert!(matches!(canonical_form(&bad), Err(Error::InvalidConfiguration(_))));
        assert!(matches!(brute_force_canonical(&bad), Err(Error::InvalidConfiguration(_))));
    }

    #[test]
    fn block_partition_shape() {
        let c = cfg(5, &[(0, [0, 1, 2]), (1, [2, 3, 4])]).normalize_layout();
        let b = BlockPartition::of(c.partition(), &c.signature().unwrap());
        assert_eq!(b.row_blocks[0], 0..1);
        assert_eq!(b.row_blocks[2], 2..2);
        // type 3 is at position 5; types 1 and 2 at 11 and 12
        assert_eq!(b.col_blocks[5], 0..1);
        assert_eq!(b.col_blocks[11], 1..3);
        assert_eq!(b.col_blocks[12], 3..5);
    }
}
