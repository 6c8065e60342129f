//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use n1l::search::{run_search_with, SearchLimits};
use n1l::{brute_force_canonical, CanonicalKey, Configuration, Perm4};
use rand::seq::SliceRandom;
use rand::Rng;

/// A configuration as plain row triples with a class label each.
pub type Plain = Vec<(usize, [usize; 3])>;

/// Row weight, class disjointness, at most one shared column per row pair,
/// and every column in `0..cols` used.
pub fn plain_is_n1_prime(cols: usize, rows: &Plain) -> bool {
    let mut used = vec![false; cols];
    for (_, r) in rows {
        if r[0] == r[1] || r[1] == r[2] || r[0] == r[2] || r.iter().any(|&j| j >= cols) {
            return false;
        }
        for &j in r {
            used[j] = true;
        }
    }
    if used.contains(&false) {
        return false;
    }
    for (a, (ka, ra)) in rows.iter().enumerate() {
        for (kb, rb) in &rows[a + 1..] {
            let shared = ra.iter().filter(|j| rb.contains(j)).count();
            if shared > 1 || (ka == kb && shared > 0) {
                return false;
            }
        }
    }
    true
}

/// Minimum nonzero weight of the span of the embedded rows and the anchor,
/// by direct subset sums over `Vec<bool>` words.
pub fn plain_min_weight(cols: usize, rows: &Plain) -> usize {
    let len = cols + 5;
    let mut gens: Vec<Vec<bool>> = rows
        .iter()
        .map(|(k, r)| {
            let mut w = vec![false; len];
            for &j in r {
                w[j] = true;
            }
            w[cols + k] = true;
            w[cols + 4] = true;
            w
        })
        .collect();
    gens.push((0..len).map(|j| j >= cols).collect());
    let mut best = usize::MAX;
    for subset in 1u32..1 << gens.len() {
        let mut acc = vec![false; len];
        for (g, gen) in gens.iter().enumerate() {
            if subset >> g & 1 == 1 {
                for (a, &b) in acc.iter_mut().zip(gen) {
                    *a ^= b;
                }
            }
        }
        let w = acc.iter().filter(|&&b| b).count();
        if w > 0 {
            best = best.min(w);
        }
    }
    best
}

pub fn to_configuration(cols: usize, rows: &Plain) -> Configuration {
    Configuration::from_class_rows(cols, rows.iter().map(|&(k, r)| (k, r))).unwrap()
}

pub fn to_plain(cfg: &Configuration) -> Plain {
    cfg.classed_rows()
        .map(|(k, r)| {
            let cols: Vec<usize> = (0..64).filter(|&j| r >> j & 1 == 1).collect();
            (k, [cols[0], cols[1], cols[2]])
        })
        .collect()
}

/// Every N₁ₗ′ configuration with exactly `rows` rows and `cols` columns, up
/// to isomorphism, built from scratch: strictly increasing row triples, class
/// labels as restricted-growth strings, deduplicated by the brute-force
/// canonical form.
pub fn scratch_classes(rows: usize, cols: usize) -> BTreeSet<CanonicalKey> {
    let mut triples = Vec::new();
    for a in 0..cols {
        for b in a + 1..cols {
            for c in b + 1..cols {
                triples.push([a, b, c]);
            }
        }
    }
    let mut labelings = Vec::new();
    restricted_growth(rows, &mut Vec::new(), &mut labelings);
    let mut out = BTreeSet::new();
    let mut chosen = Vec::new();
    choose(&triples, rows, 0, &mut chosen, &mut |sel: &[[usize; 3]]| {
        for labels in &labelings {
            let plain: Plain = labels.iter().copied().zip(sel.iter().copied()).collect();
            if plain_is_n1_prime(cols, &plain) && plain_min_weight(cols, &plain) == 5 {
                let canon = brute_force_canonical(&to_configuration(cols, &plain)).unwrap();
                out.insert(canon.key());
            }
        }
    });
    out
}

fn restricted_growth(n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == n {
        out.push(prefix.clone());
        return;
    }
    let next = prefix.iter().max().map_or(0, |m| m + 1).min(3);
    for k in 0..=next {
        prefix.push(k);
        restricted_growth(n, prefix, out);
        prefix.pop();
    }
}

fn choose(
    items: &[[usize; 3]],
    k: usize,
    from: usize,
    chosen: &mut Vec<[usize; 3]>,
    f: &mut impl FnMut(&[[usize; 3]]),
) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    for i in from..items.len() {
        chosen.push(items[i]);
        choose(items, k, i + 1, chosen, f);
        chosen.pop();
    }
}

/// Stored classes of a full search, indexed by row count.
pub fn stored_classes(max_rows: usize, max_cols: usize, n1l_filter: bool) -> Vec<Vec<Configuration>> {
    let limits = SearchLimits { n1l_filter, ..SearchLimits::new(max_rows, max_cols) };
    let mut stages = vec![Vec::new(); max_rows + 1];
    run_search_with(&limits, |archive, _| {
        stages[archive.rows()] = archive.configurations().collect();
        Ok(())
    })
    .unwrap();
    stages
}

/// `cfg` under a random column permutation, random row orders within
/// classes and a random relabeling of the classes.
pub fn random_isomorph(cfg: &Configuration, rng: &mut impl Rng) -> Configuration {
    let mut cols: Vec<usize> = (0..cfg.cols()).collect();
    cols.shuffle(rng);
    let mut order: [Vec<usize>; 4] = Default::default();
    for (k, ord) in order.iter_mut().enumerate() {
        *ord = (0..cfg.partition().size(k)).collect();
        ord.shuffle(rng);
    }
    let alpha = Perm4::from_index(rng.gen_range(0..24));
    cfg.map_columns(&cols).reorder_rows(&order).permute_classes(alpha)
}

/// A random valid N₁′ configuration with at most `max_rows` rows and
/// `max_cols` columns, by rejection sampling.
pub fn random_valid(rng: &mut impl Rng, max_rows: usize, max_cols: usize) -> Configuration {
    loop {
        let rows = rng.gen_range(1..=max_rows);
        let width = rng.gen_range(3..=max_cols);
        let mut plain: Plain = Vec::new();
        for _ in 0..rows {
            let mut pool: Vec<usize> = (0..width).collect();
            pool.shuffle(rng);
            let mut r = [pool[0], pool[1], pool[2]];
            r.sort_unstable();
            plain.push((rng.gen_range(0..4), r));
        }
        let mut used: Vec<usize> = plain.iter().flat_map(|(_, r)| r.iter().copied()).collect();
        used.sort_unstable();
        used.dedup();
        let relabel = |j: usize| used.binary_search(&j).unwrap();
        let plain: Plain = plain.iter().map(|&(k, r)| (k, r.map(relabel))).collect();
        if plain_is_n1_prime(used.len(), &plain) {
            return to_configuration(used.len(), &plain);
        }
    }
}
