//! Structural checks for N₁′ configurations: weight-3 rows, no empty column,
//! rows disjoint within each class, and no two rows sharing two columns.

use crate::config::{col_mask, Configuration, CLASSES};

/// Which check rejected a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    RowWeight { row: usize, weight: u32 },
    ZeroColumn { column: usize },
    ClassOverlap { class: usize, first: usize, second: usize },
    Rectangle { first: usize, second: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Violation::RowWeight { row, weight } => write!(f, "row {row} has weight {weight}"),
            Violation::ZeroColumn { column } => write!(f, "column {column} is all-zero"),
            Violation::ClassOverlap { class, first, second } => {
                write!(f, "rows {first} and {second} of class {class} intersect")
            }
            Violation::Rectangle { first, second } => {
                write!(f, "rows {first} and {second} share two or more columns")
            }
        }
    }
}

pub fn check_partial_linear_space(cfg: &Configuration) -> bool {
    find_rectangle(cfg).is_none()
}

fn find_rectangle(cfg: &Configuration) -> Option<Violation> {
    let rows = cfg.rows();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if (rows[i] & rows[j]).count_ones() > 1 {
                return Some(Violation::Rectangle { first: i, second: j });
            }
        }
    }
    None
}

/// Column-pair form of the partial-linear-space condition: no two columns
/// are both incident to two common rows.
pub fn check_partial_linear_space_by_columns(cfg: &Configuration) -> bool {
    let cols: Vec<u64> = (0..cfg.cols())
        .map(|j| {
            cfg.rows()
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &r)| acc | ((r >> j & 1) << i))
        })
        .collect();
    (0..cols.len()).all(|a| (a + 1..cols.len()).all(|b| (cols[a] & cols[b]).count_ones() <= 1))
}

pub fn check_part_disjointness(cfg: &Configuration) -> bool {
    find_class_overlap(cfg).is_none()
}

fn find_class_overlap(cfg: &Configuration) -> Option<Violation> {
    for class in 0..CLASSES {
        let range = cfg.partition().class_range(class);
        let mut seen = 0u64;
        for i in range.clone() {
            let r = cfg.rows()[i];
            if seen & r != 0 {
                let first = range.clone().find(|&p| cfg.rows()[p] & r != 0).unwrap();
                return Some(Violation::ClassOverlap { class, first, second: i });
            }
            seen |= r;
        }
    }
    None
}

/// First failed check, cheapest first.
pub fn first_violation(cfg: &Configuration) -> Option<Violation> {
    for (row, &r) in cfg.rows().iter().enumerate() {
        if r.count_ones() != 3 {
            return Some(Violation::RowWeight { row, weight: r.count_ones() });
        }
    }
    let used = cfg.rows().iter().fold(0u64, |acc, &r| acc | r);
    let missing = col_mask(cfg.cols()) & !used;
    if missing != 0 {
        return Some(Violation::ZeroColumn { column: missing.trailing_zeros() as usize });
    }
    find_class_overlap(cfg).or_else(|| find_rectangle(cfg))
}

/// All four structural conditions of an N₁′ configuration.
pub fn is_valid_n1_prime(cfg: &Configuration) -> bool {
    first_violation(cfg).is_none()
}
