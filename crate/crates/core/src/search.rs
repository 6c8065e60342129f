//! Staged, isomorph-free generation.
//!
//! Stage `r` unpacks every stored `(r-1)`-row representative, adds one row in
//! every possible way, keeps the extensions that pass the N₁ₗ test, and
//! inserts their canonical keys into a deduplicating store. The finished
//! store is sorted and packed into a [`StageArchive`], which is the input of
//! the next stage.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use dashmap::DashSet;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::archive::StageArchive;
use crate::canon::Canonicalizer;
use crate::config::{col_mask, CanonicalKey, Configuration, RowPartition, CLASSES, MAX_COLS};
use crate::error::{Error, Result};
use crate::gf2::ParentSpan;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Full,
    Bounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundedParams {
    /// Fresh columns a single extension may introduce.
    pub max_new_cols_per_step: usize,
    /// Number of distinct smallest column counts kept as parents; `None`
    /// keeps everything.
    pub keep_c_min_count: Option<usize>,
}

impl Default for BoundedParams {
    fn default() -> Self {
        BoundedParams { max_new_cols_per_step: 2, keep_c_min_count: Some(2) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_rows: usize,
    pub max_cols: usize,
    pub n1l_filter: bool,
    pub mode: SearchMode,
    pub bounded: BoundedParams,
    /// Use the weight-grouped signature canonicalization.
    pub grouped_signatures: bool,
    /// Largest number of classes a single stage may hold.
    pub stage_capacity: Option<usize>,
}

impl SearchLimits {
    pub fn new(max_rows: usize, max_cols: usize) -> Self {
        SearchLimits {
            max_rows,
            max_cols,
            n1l_filter: true,
            mode: SearchMode::Full,
            bounded: BoundedParams::default(),
            grouped_signatures: false,
            stage_capacity: None,
        }
    }

    pub fn bounded(max_rows: usize, max_cols: usize, params: BoundedParams) -> Self {
        SearchLimits { mode: SearchMode::Bounded, bounded: params, ..SearchLimits::new(max_rows, max_cols) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_rows < 1 {
            return Err(Error::InvalidArgument("max_rows must be at least 1".into()));
        }
        if self.max_cols < 3 || self.max_cols > MAX_COLS {
            return Err(Error::InvalidArgument(format!(
                "max_cols must be between 3 and {MAX_COLS}"
            )));
        }
        if self.mode == SearchMode::Bounded && self.bounded.max_new_cols_per_step == 0 && self.max_rows > 1 {
            // still valid: extensions then reuse existing columns only
        }
        if self.bounded.keep_c_min_count == Some(0) {
            return Err(Error::InvalidArgument("keep_c_min_count must be positive".into()));
        }
        Ok(())
    }

    fn max_new_cols(&self) -> usize {
        match self.mode {
            SearchMode::Full => 3,
            SearchMode::Bounded => self.bounded.max_new_cols_per_step.min(3),
        }
    }
}

/// Number of isomorphism classes per `(rows, cols)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountsTable {
    pub max_rows: usize,
    pub max_cols: usize,
    counts: BTreeMap<(usize, usize), u64>,
}

impl CountsTable {
    pub fn new(max_rows: usize, max_cols: usize) -> Self {
        CountsTable { max_rows, max_cols, counts: BTreeMap::new() }
    }

    pub fn get(&self, rows: usize, cols: usize) -> u64 {
        self.counts.get(&(rows, cols)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, rows: usize, cols: usize, n: u64) {
        if n == 0 {
            self.counts.remove(&(rows, cols));
        } else {
            self.counts.insert((rows, cols), n);
        }
    }

    /// Nonzero entries.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn row_total(&self, rows: usize) -> u64 {
        self.counts.range((rows, 0)..(rows + 1, 0)).map(|(_, &v)| v).sum()
    }

    /// Smallest column count with a nonzero entry for `rows`.
    pub fn c_min(&self, rows: usize) -> Option<usize> {
        self.counts.range((rows, 0)..(rows + 1, 0)).next().map(|(&(_, c), _)| c)
    }

    /// Tab-separated grid: header `r c5 c6 ...`, one line per `r ≥ 2`,
    /// zero-filled.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("r");
        for c in 5..=self.max_cols {
            write!(out, "\tc{c}").unwrap();
        }
        out.push('\n');
        for r in 2..=self.max_rows {
            write!(out, "{r}").unwrap();
            for c in 5..=self.max_cols {
                write!(out, "\t{}", self.get(r, c)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`CountsTable::to_tsv`].
    pub fn from_tsv(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("counts table: {m}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let mut fields = header.split('\t');
        if fields.next() != Some("r") {
            return Err(bad("header must start with `r`"));
        }
        let cols: Vec<usize> = fields
            .map(|f| f.strip_prefix('c').and_then(|n| n.parse().ok()).ok_or_else(|| bad("bad column header")))
            .collect::<Result<_>>()?;
        let mut table = CountsTable::new(1, cols.last().copied().unwrap_or(4));
        for line in lines.filter(|l| !l.is_empty()) {
            let mut fields = line.split('\t');
            let r: usize = fields.next().and_then(|f| f.parse().ok()).ok_or_else(|| bad("bad row label"))?;
            table.max_rows = table.max_rows.max(r);
            for (&c, f) in cols.iter().zip(fields) {
                let n: u64 = f.parse().map_err(|_| bad("bad count"))?;
                table.set(r, c, n);
            }
        }
        Ok(table)
    }
}

/// Smallest column count and `r / c_min` for each row count with any class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioEntry {
    pub rows: usize,
    pub c_min: usize,
    pub ratio: Ratio<u64>,
}

pub fn report_ratio(table: &CountsTable) -> Vec<RatioEntry> {
    (1..=table.max_rows)
        .filter_map(|r| {
            table.c_min(r).map(|c| RatioEntry { rows: r, c_min: c, ratio: Ratio::new(r as u64, c as u64) })
        })
        .collect()
}

/// Per-stage statistics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageReport {
    pub rows: usize,
    pub parents: usize,
    pub extensions: u64,
    pub classes: usize,
    pub counts_by_cols: BTreeMap<usize, u64>,
    pub duration: Duration,
}

/// Concurrent insert-if-absent set of canonical keys for one stage.
pub struct StageStore {
    rows: usize,
    keys: DashSet<CanonicalKey>,
    len: AtomicUsize,
}

impl StageStore {
    pub fn new(rows: usize) -> Self {
        StageStore { rows, keys: DashSet::new(), len: AtomicUsize::new(0) }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// `true` if the key was not already present.
    pub fn insert(&self, key: CanonicalKey) -> bool {
        let fresh = self.keys.insert(key);
        if fresh {
            self.len.fetch_add(1, Ordering::Relaxed);
        }
        fresh
    }

    pub fn contains(&self, key: &CanonicalKey) -> bool {
        self.keys.contains(key)
    }

    pub fn len(&self) -> usize {
        self.len.load(Ordering::Relaxed)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorts and packs the keys.
    pub fn into_archive(self, max_cols: usize) -> StageArchive {
        let mut keys: Vec<CanonicalKey> = self.keys.into_iter().collect();
        keys.par_sort_unstable();
        StageArchive::from_sorted_keys(self.rows, max_cols, keys.iter())
    }
}

/// Calls `f(row, class, new_cols)` for every one-row extension of `parent`:
/// the row goes into `class` and uses `new_cols` fresh columns numbered from
/// `parent.cols()`. Old columns are chosen in ascending order, never from the
/// class's own support, and never two columns already sharing a row.
pub fn for_each_extension(
    parent: &Configuration,
    max_cols: usize,
    max_new_cols: usize,
    mut f: impl FnMut(u64, usize, usize),
) {
    let c = parent.cols();
    let mut conflict = [0u64; 64];
    for &r in parent.rows() {
        let mut m = r;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            conflict[j] |= r;
            m &= m - 1;
        }
    }
    let supports = parent.class_supports();
    let fresh_limit = max_new_cols.min(3).min(max_cols.saturating_sub(c));
    for class in 0..CLASSES {
        let avail = col_mask(c) & !supports[class];
        for fresh in 0..=fresh_limit {
            let fresh_bits = col_mask(c + fresh) & !col_mask(c);
            match 3 - fresh {
                0 => f(fresh_bits, class, fresh),
                1 => {
                    for a in crate::config::bits(avail) {
                        f(fresh_bits | 1 << a, class, fresh);
                    }
                }
                2 => {
                    for a in crate::config::bits(avail) {
                        let rest = avail & !conflict[a] & !col_mask(a + 1);
                        for b in crate::config::bits(rest) {
                            f(fresh_bits | 1 << a | 1 << b, class, fresh);
                        }
                    }
                }
                _ => {
                    for a in crate::config::bits(avail) {
                        let after_a = avail & !conflict[a] & !col_mask(a + 1);
                        for b in crate::config::bits(after_a) {
                            let after_b = after_a & !conflict[b] & !col_mask(b + 1);
                            for d in crate::config::bits(after_b) {
                                f(1 << a | 1 << b | 1 << d, class, 0);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// `parent` with `row` appended to `class`.
pub fn extend(parent: &Configuration, row: u64, class: usize, cols: usize) -> Configuration {
    let p = parent.partition();
    let at = p.start(class) + p.size(class);
    let mut rows = Vec::with_capacity(parent.row_count() + 1);
    rows.extend_from_slice(&parent.rows()[..at]);
    rows.push(row);
    rows.extend_from_slice(&parent.rows()[at..]);
    let mut sizes = p.sizes();
    sizes[class] += 1;
    Configuration::new(cols, RowPartition(sizes), rows).expect("extension stays in range")
}

/// All one-row extensions of `parent` within the column limits.
pub fn enumerate_extensions(parent: &Configuration, limits: &SearchLimits) -> Vec<Configuration> {
    let mut out = Vec::new();
    for_each_extension(parent, limits.max_cols, limits.max_new_cols(), |row, class, fresh| {
        out.push(extend(parent, row, class, parent.cols() + fresh));
    });
    out
}

/// Output of one stage.
pub struct StageOutput {
    pub archive: StageArchive,
    pub report: StageReport,
}

/// Builds stage `previous.rows() + 1` from the packed previous stage.
pub fn run_stage(previous: &StageArchive, limits: &SearchLimits) -> Result<StageOutput> {
    let start = Instant::now();
    let rows = previous.rows() + 1;
    let store = StageStore::new(rows);
    let overflow = AtomicBool::new(false);
    let examined = AtomicU64::new(0);
    let max_new = limits.max_new_cols();
    let parents: Vec<&[u8]> = previous.iter().collect();

    parents.par_iter().for_each_init(
        || Canonicalizer::new(limits.grouped_signatures),
        |canon, bytes| {
            if overflow.load(Ordering::Relaxed) {
                return;
            }
            let parent = crate::config::decode_key(bytes);
            let span = limits.n1l_filter.then(|| ParentSpan::new(&parent));
            let mut local = 0u64;
            for_each_extension(&parent, limits.max_cols, max_new, |row, class, fresh| {
                local += 1;
                if let Some(span) = &span {
                    if !span.admits(row, class) {
                        return;
                    }
                }
                let child = extend(&parent, row, class, parent.cols() + fresh);
                store.insert(canon.key_unchecked(&child));
            });
            examined.fetch_add(local, Ordering::Relaxed);
            if let Some(cap) = limits.stage_capacity {
                if store.len() > cap {
                    overflow.store(true, Ordering::Relaxed);
                }
            }
        },
    );

    if overflow.load(Ordering::Relaxed) {
        return Err(Error::StageOverflow {
            rows,
            capacity: limits.stage_capacity.unwrap_or(usize::MAX),
            completed: Box::default(),
        });
    }
    let archive = store.into_archive(limits.max_cols);
    let counts_by_cols = archive.counts_by_cols();
    let report = StageReport {
        rows,
        parents: parents.len(),
        extensions: examined.into_inner(),
        classes: archive.len(),
        counts_by_cols,
        duration: start.elapsed(),
    };
    log::info!(
        "stage r={rows}: {} parents, {} extensions, {} classes in {:.2?}",
        report.parents,
        report.extensions,
        report.classes,
        report.duration
    );
    Ok(StageOutput { archive, report })
}

/// The stage holding only the single-row configuration.
pub fn seed_stage(max_cols: usize) -> StageArchive {
    let key = Configuration::seed().key();
    StageArchive::from_sorted_keys(1, max_cols, std::iter::once(&key))
}

/// Result of a full search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub table: CountsTable,
    pub stages: Vec<StageReport>,
}

pub fn run_search(limits: &SearchLimits) -> Result<CountsTable> {
    Ok(run_search_with(limits, |_, _| Ok(()))?.table)
}

/// Full search; `observer` sees every completed stage archive (including the
/// seed stage) before it is discarded.
pub fn run_search_with(
    limits: &SearchLimits,
    mut observer: impl FnMut(&StageArchive, &StageReport) -> Result<()>,
) -> Result<SearchOutcome> {
    limits.validate()?;
    let mut table = CountsTable::new(limits.max_rows, limits.max_cols);
    let mut stages = Vec::new();
    let mut previous = seed_stage(limits.max_cols);
    let seed_report = StageReport {
        rows: 1,
        parents: 0,
        extensions: 0,
        classes: 1,
        counts_by_cols: previous.counts_by_cols(),
        duration: Duration::ZERO,
    };
    table.set(1, 3, 1);
    observer(&previous, &seed_report)?;
    stages.push(seed_report);

    for _ in 2..=limits.max_rows {
        if previous.is_empty() {
            break;
        }
        let out = match run_stage(&previous, limits) {
            Ok(out) => out,
            Err(Error::StageOverflow { rows, capacity, .. }) => {
                return Err(Error::StageOverflow { rows, capacity, completed: Box::new(table) })
            }
            Err(e) => return Err(e),
        };
        for (&c, &n) in &out.report.counts_by_cols {
            table.set(out.report.rows, c, n);
        }
        observer(&out.archive, &out.report)?;
        stages.push(out.report);
        previous = out.archive;
    }
    Ok(SearchOutcome { table, stages })
}

/// Result of a bounded search.
#[derive(Clone, Debug, Default)]
pub struct BoundedOutcome {
    /// Smallest column count found at each row count: an upper bound on
    /// `c_min`.
    pub bounds: BTreeMap<usize, usize>,
    pub stages: Vec<StageReport>,
    /// Set when a stage exceeded its capacity; bounds cover the stages
    /// completed before it.
    pub aborted: Option<String>,
}

impl BoundedOutcome {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("r\tcMinUpperBound\n");
        for (r, c) in &self.bounds {
            writeln!(out, "{r}\t{c}").unwrap();
        }
        out
    }
}

/// Keeps the keys whose column count is among the `keep` smallest present.
pub fn retain_smallest_cols(archive: &StageArchive, keep: Option<usize>) -> StageArchive {
    let Some(keep) = keep else {
        return archive.clone();
    };
    let cols: Vec<usize> = archive.counts_by_cols().keys().copied().take(keep).collect();
    archive.filter(|bytes| cols.contains(&(bytes[1] as usize)))
}

/// Extends `seed` stage by stage up to `limits.max_rows`, introducing at most
/// `max_new_cols_per_step` fresh columns per row and keeping only the
/// smallest `keep_c_min_count` column counts as parents.
pub fn run_bounded_search(limits: &SearchLimits, seed: &StageArchive) -> Result<BoundedOutcome> {
    limits.validate()?;
    let mut outcome = BoundedOutcome::default();
    let mut parents = retain_smallest_cols(seed, limits.bounded.keep_c_min_count);
    while !parents.is_empty() && parents.rows() < limits.max_rows {
        let out = match run_stage(&parents, limits) {
            Ok(out) => out,
            Err(Error::StageOverflow { rows, capacity, .. }) => {
                outcome.aborted =
                    Some(format!("stage r={rows} exceeded its capacity of {capacity} classes"));
                log::warn!("bounded search stopped: {}", outcome.aborted.as_deref().unwrap());
                break;
            }
            Err(e) => return Err(e),
        };
        if let Some((&c, _)) = out.report.counts_by_cols.iter().next() {
            outcome.bounds.insert(out.report.rows, c);
        }
        parents = retain_smallest_cols(&out.archive, limits.bounded.keep_c_min_count);
        outcome.stages.push(out.report);
    }
    Ok(outcome)
}
