mod common;

use std::collections::BTreeSet;

use common::{plain_min_weight, random_valid, scratch_classes, stored_classes, to_plain};
use n1l::gf2::{self, ParentSpan};
use n1l::search::{extend, for_each_extension};
use n1l::{brute_force_canonical, canonical_form, is_n1l, CanonicalKey, Configuration};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn search_matches_scratch_generator_up_to_three_rows() {
    let stages = stored_classes(3, 9, true);
    for rows in 1..=3 {
        for cols in 3..=9 {
            let found: BTreeSet<CanonicalKey> =
                stages[rows].iter().filter(|c| c.cols() == cols).map(Configuration::key).collect();
            let scratch = scratch_classes(rows, cols);
            assert_eq!(found, scratch, "r={rows} c={cols}");
        }
    }
}

#[test]
fn stored_classes_are_canonical_and_pairwise_distinct() {
    let stages = stored_classes(4, 8, true);
    for stage in &stages[1..] {
        let mut seen = BTreeSet::new();
        for cfg in stage {
            let oracle = brute_force_canonical(cfg).unwrap();
            assert_eq!(&oracle, cfg, "stored form is not the oracle's canonical form");
            assert!(seen.insert(oracle.key()), "duplicate class {cfg:?}");
        }
    }
}

#[test]
fn canonical_form_matches_oracle_on_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let cfg = random_valid(&mut rng, 5, 9);
        assert_eq!(canonical_form(&cfg).unwrap(), brute_force_canonical(&cfg).unwrap(), "{cfg:?}");
    }
}

#[test]
fn incremental_check_matches_full_check() {
    let stages = stored_classes(4, 10, true);
    let mut compared = 0;
    for parent in stages[1..].iter().flatten() {
        let span = ParentSpan::new(parent);
        for_each_extension(parent, 10, 3, |row, class, fresh| {
            let child = extend(parent, row, class, parent.cols() + fresh);
            assert_eq!(span.admits(row, class), is_n1l(&child).unwrap(), "{child:?}");
            compared += 1;
        });
    }
    // every one-row extension of every stored class with r <= 4
    assert_eq!(compared, 2288);
}

#[test]
fn full_check_matches_plain_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let cfg = random_valid(&mut rng, 8, 14);
        let plain = plain_min_weight(cfg.cols(), &to_plain(&cfg));
        let report = gf2::span_min_weight(&gf2::embed(&cfg).unwrap().generators()).unwrap();
        assert_eq!(report.min_weight as usize, plain, "{cfg:?}");
        assert_eq!(is_n1l(&cfg).unwrap(), plain == 5, "{cfg:?}");
    }
}

fn cube() -> Configuration {
    let edges: Vec<(usize, usize)> =
        (0..8).flat_map(|a| (0..3).map(move |b| (a, a ^ 1 << b))).filter(|&(a, c)| a < c).collect();
    let rows = [(0, 7), (1, 6), (2, 5), (3, 4)].into_iter().enumerate().flat_map(|(k, (x, y))| {
        let edges = &edges;
        [x, y].map(move |v| (k, (0..12).filter(move |&e| edges[e].0 == v || edges[e].1 == v)))
    });
    Configuration::from_class_rows(12, rows).unwrap()
}

#[test]
fn dependent_rows_do_not_count_as_zero_weight() {
    let cube = cube();
    // 8 rows and the anchor are dependent, so the span contains the zero word
    let report = gf2::span_min_weight(&gf2::embed(&cube).unwrap().generators()).unwrap();
    assert_eq!((report.min_weight, report.rank), (5, 8));
    assert!(is_n1l(&cube).unwrap());
    let parent = Configuration::new(12, n1l::RowPartition([2, 2, 2, 1]), cube.rows()[..7].to_vec()).unwrap();
    assert!(ParentSpan::new(&parent).admits(cube.rows()[7], 3));
}
