//! Configurations: a 0/1 incidence matrix whose rows are split into four
//! ordered row classes, together with column types, signatures and the
//! canonical key serialization.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::perm::Perm4;

/// Number of row classes.
pub const CLASSES: usize = 4;

/// Columns are stored as bits of a `u64`.
pub const MAX_COLS: usize = 64;

/// Number of nonzero column types.
pub const TYPE_COUNT: usize = 15;

/// Nonzero column types in signature order.
pub const TYPE_ORDER: [u8; TYPE_COUNT] = [
    0xF, 0x7, 0xB, 0xD, 0xE, 0x3, 0x5, 0x9, 0x6, 0xA, 0xC, 0x1, 0x2, 0x4, 0x8,
];

/// `TYPE_POSITION[t]` is the index of type `t` in [`TYPE_ORDER`]; type 0 maps
/// past the end.
pub const TYPE_POSITION: [usize; 16] = {
    let mut pos = [TYPE_COUNT; 16];
    let mut i = 0;
    while i < TYPE_COUNT {
        pos[TYPE_ORDER[i] as usize] = i;
        i += 1;
    }
    pos
};

/// The set of row classes a column meets, as a 4-bit mask (bit `k` for class
/// `k`). Never zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnType(u8);

impl ColumnType {
    pub fn new(bits: u8) -> Option<Self> {
        (bits != 0 && bits < 16).then_some(ColumnType(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn meets(self, class: usize) -> bool {
        self.0 >> class & 1 == 1
    }

    /// Index of this type in [`TYPE_ORDER`].
    pub fn position(self) -> usize {
        TYPE_POSITION[self.0 as usize]
    }

    pub fn at_position(position: usize) -> Self {
        ColumnType(TYPE_ORDER[position])
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:X}", self.0)
    }
}

/// Sizes of the four row classes. Rows of class `k` are stored consecutively,
/// class 0 first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowPartition(pub [usize; CLASSES]);

impl RowPartition {
    pub fn new(sizes: [usize; CLASSES]) -> Self {
        RowPartition(sizes)
    }

    pub fn sizes(&self) -> [usize; CLASSES] {
        self.0
    }

    pub fn size(&self, class: usize) -> usize {
        self.0[class]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn start(&self, class: usize) -> usize {
        self.0[..class].iter().sum()
    }

    pub fn class_range(&self, class: usize) -> Range<usize> {
        let start = self.start(class);
        start..start + self.0[class]
    }

    /// Class of row `row`. Panics if `row` is out of range.
    pub fn class_of(&self, row: usize) -> usize {
        let mut end = 0;
        for (k, &s) in self.0.iter().enumerate() {
            end += s;
            if row < end {
                return k;
            }
        }
        panic!("row {row} out of range for partition {:?}", self.0)
    }
}

/// Counts of columns of each nonzero type, indexed by position in
/// [`TYPE_ORDER`]. The derived `Ord` is the lexicographic order used for
/// signature canonicalization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(pub [u32; TYPE_COUNT]);

impl Signature {
    pub fn counts(&self) -> &[u32; TYPE_COUNT] {
        &self.0
    }

    pub fn count(&self, t: ColumnType) -> u32 {
        self.0[t.position()]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of rows in each class implied by the signature, assuming every
    /// row has weight 3.
    pub fn class_incidences(&self) -> [u32; CLASSES] {
        let mut inc = [0; CLASSES];
        for (pos, &n) in self.0.iter().enumerate() {
            let t = TYPE_ORDER[pos];
            for (k, slot) in inc.iter_mut().enumerate() {
                if t >> k & 1 == 1 {
                    *slot += n;
                }
            }
        }
        inc
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Byte serialization of a configuration: a 6-byte header
/// `[rows, cols, s0, s1, s2, s3]` followed by each row packed into
/// `ceil(cols / 8)` bytes, column `j` at bit `j % 8` of byte `j / 8`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Box<[u8]>);

impl CanonicalKey {
    pub const HEADER_LEN: usize = 2 + CLASSES;

    pub fn from_bytes(bytes: impl Into<Box<[u8]>>) -> Result<Self> {
        let bytes = bytes.into();
        Self::check(&bytes)?;
        Ok(CanonicalKey(bytes))
    }

    /// Builds a key from rows given as column masks.
    pub fn encode(cols: usize, partition: &RowPartition, rows: &[u64]) -> Self {
        let row_bytes = cols.div_ceil(8);
        let mut out = Vec::with_capacity(Self::HEADER_LEN + rows.len() * row_bytes);
        out.push(rows.len() as u8);
        out.push(cols as u8);
        out.extend(partition.0.iter().map(|&s| s as u8));
        for &row in rows {
            out.extend_from_slice(&row.to_le_bytes()[..row_bytes]);
        }
        CanonicalKey(out.into_boxed_slice())
    }

    fn check(bytes: &[u8]) -> Result<()> {
        if bytes.len() < Self::HEADER_LEN {
            return Err(Error::Archive("key shorter than its header".into()));
        }
        let rows = bytes[0] as usize;
        let cols = bytes[1] as usize;
        let parts: usize = bytes[2..6].iter().map(|&b| b as usize).sum();
        if cols > MAX_COLS || parts != rows {
            return Err(Error::Archive("inconsistent key header".into()));
        }
        if bytes.len() != Self::HEADER_LEN + rows * cols.div_ceil(8) {
            return Err(Error::Archive("key length does not match its header".into()));
        }
        Ok(())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0[0] as usize
    }

    pub fn cols(&self) -> usize {
        self.0[1] as usize
    }

    pub fn to_configuration(&self) -> Configuration {
        decode_key(&self.0)
    }

    /// 64-bit FNV-1a digest, printed by the `canon` subcommand.
    pub fn digest(&self) -> u64 {
        self.0.iter().fold(0xcbf2_9ce4_8422_2325_u64, |h, &b| {
            (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }

    pub fn hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.hex())
    }
}

/// Decodes key bytes already known to be well formed.
pub(crate) fn decode_key(bytes: &[u8]) -> Configuration {
    let rows = bytes[0] as usize;
    let cols = bytes[1] as usize;
    let partition = RowPartition([
        bytes[2] as usize,
        bytes[3] as usize,
        bytes[4] as usize,
        bytes[5] as usize,
    ]);
    let row_bytes = cols.div_ceil(8);
    let body = &bytes[CanonicalKey::HEADER_LEN..];
    let rows = (0..rows)
        .map(|i| {
            let mut buf = [0u8; 8];
            buf[..row_bytes].copy_from_slice(&body[i * row_bytes..(i + 1) * row_bytes]);
            u64::from_le_bytes(buf)
        })
        .collect();
    Configuration { cols, partition, rows }
}

/// An incidence matrix with rows grouped into four classes.
///
/// Each row is a `u64` column mask. Row weights and other N₁′ conditions are
/// not enforced here; see [`crate::validity`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    cols: usize,
    partition: RowPartition,
    rows: Vec<u64>,
}

impl Configuration {
    pub fn new(cols: usize, partition: RowPartition, rows: Vec<u64>) -> Result<Self> {
        if cols > MAX_COLS {
            return Err(Error::InvalidArgument(format!(
                "{cols} columns exceeds the maximum of {MAX_COLS}"
            )));
        }
        if partition.total() != rows.len() {
            return Err(Error::InvalidArgument(format!(
                "partition {:?} does not cover {} rows",
                partition.0,
                rows.len()
            )));
        }
        let limit = col_mask(cols);
        if let Some(row) = rows.iter().position(|&r| r & !limit != 0) {
            return Err(Error::InvalidArgument(format!(
                "row {row} has a column index >= {cols}"
            )));
        }
        Ok(Configuration { cols, partition, rows })
    }

    /// Builds a configuration from `(class, columns)` pairs in any order.
    /// Rows are grouped by class, keeping their relative order.
    pub fn from_class_rows<I, C>(cols: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, C)>,
        C: IntoIterator<Item = usize>,
    {
        let mut by_class: [Vec<u64>; CLASSES] = Default::default();
        for (class, columns) in rows {
            if class >= CLASSES {
                return Err(Error::InvalidArgument(format!("row class {class} out of range")));
            }
            let mut mask = 0u64;
            for j in columns {
                if j >= cols {
                    return Err(Error::InvalidArgument(format!(
                        "column {j} out of range for {cols} columns"
                    )));
                }
                mask |= 1 << j;
            }
            by_class[class].push(mask);
        }
        let partition = RowPartition(std::array::from_fn(|k| by_class[k].len()));
        Configuration::new(cols, partition, by_class.concat())
    }

    /// The single-row configuration `{0,1,2}` in class 0.
    pub fn seed() -> Self {
        Configuration { cols: 3, partition: RowPartition([1, 0, 0, 0]), rows: vec![0b111] }
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn partition(&self) -> &RowPartition {
        &self.partition
    }

    /// Rows of class `class`.
    pub fn class_rows(&self, class: usize) -> &[u64] {
        &self.rows[self.partition.class_range(class)]
    }

    /// `(class, row)` pairs in storage order.
    pub fn classed_rows(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        (0..CLASSES).flat_map(move |k| self.class_rows(k).iter().map(move |&r| (k, r)))
    }

    /// Column indices of row `row`, ascending.
    pub fn row_columns(&self, row: usize) -> Vec<usize> {
        bits(self.rows[row]).collect()
    }

    /// Union of the rows of each class.
    pub fn class_supports(&self) -> [u64; CLASSES] {
        std::array::from_fn(|k| self.class_rows(k).iter().fold(0, |acc, &r| acc | r))
    }

    /// Type mask of every column; 0 for all-zero columns.
    pub fn column_type_bits(&self) -> Vec<u8> {
        let supports = self.class_supports();
        (0..self.cols)
            .map(|j| {
                (0..CLASSES).fold(0u8, |t, k| t | (((supports[k] >> j & 1) as u8) << k))
            })
            .collect()
    }

    /// Type of column `j`.
    pub fn column_type_of(&self, j: usize) -> Result<ColumnType> {
        if j >= self.cols {
            return Err(Error::InvalidArgument(format!(
                "column {j} out of range for {} columns",
                self.cols
            )));
        }
        let supports = self.class_supports();
        let bits = (0..CLASSES).fold(0u8, |t, k| t | (((supports[k] >> j & 1) as u8) << k));
        ColumnType::new(bits).ok_or(Error::ZeroColumn { column: j })
    }

    pub fn signature(&self) -> Result<Signature> {
        let mut sig = Signature::default();
        for (j, t) in self.column_type_bits().into_iter().enumerate() {
            if t == 0 {
                return Err(Error::ZeroColumn { column: j });
            }
            sig.0[TYPE_POSITION[t as usize]] += 1;
        }
        Ok(sig)
    }

    /// Reorders columns so that new column `new_of_old[j]` holds old column `j`.
    pub fn map_columns(&self, new_of_old: &[usize]) -> Configuration {
        assert_eq!(new_of_old.len(), self.cols);
        let rows = self
            .rows
            .iter()
            .map(|&r| bits(r).fold(0u64, |acc, j| acc | 1 << new_of_old[j]))
            .collect();
        Configuration { cols: self.cols, partition: self.partition, rows }
    }

    /// Stably reorders the columns into type-group order (`F,7,B,...,8`);
    /// all-zero columns, if any, go last. Rows are unchanged.
    pub fn normalize_layout(&self) -> Configuration {
        let types = self.column_type_bits();
        let mut order: Vec<usize> = (0..self.cols).collect();
        order.sort_by_key(|&j| TYPE_POSITION[types[j] as usize]);
        let mut new_of_old = vec![0; self.cols];
        for (new, &old) in order.iter().enumerate() {
            new_of_old[old] = new;
        }
        self.map_columns(&new_of_old)
    }

    pub fn is_normalized(&self) -> bool {
        let types = self.column_type_bits();
        types.windows(2).all(|w| TYPE_POSITION[w[0] as usize] <= TYPE_POSITION[w[1] as usize])
    }

    /// Moves class `k` to class `alpha(k)`, keeping row order within classes.
    pub fn permute_classes(&self, alpha: Perm4) -> Configuration {
        let inv = alpha.inverse();
        let mut rows = Vec::with_capacity(self.rows.len());
        let mut sizes = [0; CLASSES];
        for (new, size) in sizes.iter_mut().enumerate() {
            let old = inv.apply(new);
            rows.extend_from_slice(self.class_rows(old));
            *size = self.partition.size(old);
        }
        Configuration { cols: self.cols, partition: RowPartition(sizes), rows }
    }

    /// Reorders rows within each class; `order[k]` lists the old positions
    /// (relative to the class start) in their new order.
    pub fn reorder_rows(&self, order: &[Vec<usize>; CLASSES]) -> Configuration {
        let mut rows = Vec::with_capacity(self.rows.len());
        for (k, ord) in order.iter().enumerate() {
            let class = self.class_rows(k);
            assert_eq!(ord.len(), class.len());
            rows.extend(ord.iter().map(|&i| class[i]));
        }
        Configuration { cols: self.cols, partition: self.partition, rows }
    }

    /// `m` diagonal copies of every class. Copy `t` of class `k` sits at row
    /// offset `start(k) + t * s_k` and column offset `t * cols`.
    pub fn replicate(&self, m: usize) -> Result<Configuration> {
        if m == 0 {
            return Err(Error::InvalidArgument("replication factor must be at least 1".into()));
        }
        let cols = self.cols * m;
        if cols > MAX_COLS {
            return Err(Error::InvalidArgument(format!(
                "replicated configuration would have {cols} columns (max {MAX_COLS})"
            )));
        }
        let mut rows = Vec::with_capacity(self.rows.len() * m);
        for k in 0..CLASSES {
            for t in 0..m {
                rows.extend(self.class_rows(k).iter().map(|&r| r << (t * self.cols)));
            }
        }
        let partition = RowPartition(self.partition.0.map(|s| s * m));
        Ok(Configuration { cols, partition, rows })
    }

    pub fn key(&self) -> CanonicalKey {
        CanonicalKey::encode(self.cols, &self.partition, &self.rows)
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration(cols={}, parts={:?}, rows=[", self.cols, self.partition.0)?;
        for (i, (k, r)) in self.classed_rows().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}:{:?}", bits(r).collect::<Vec<_>>())?;
        }
        f.write_str("])")
    }
}

/// Mask with the low `cols` bits set.
pub fn col_mask(cols: usize) -> u64 {
    if cols >= 64 {
        u64::MAX
    } else {
        (1u64 << cols) - 1
    }
}

/// Iterates the set bit indices of `mask`, ascending.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let j = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(j)
        }
    })
}
