mod common;

use common::{random_isomorph, random_valid, stored_classes};
use n1l::search::{run_search, SearchLimits};
use n1l::{canonical_key, is_n1l, is_valid_n1_prime, StageArchive};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn keys_survive_random_isomorphisms() {
    let stages = stored_classes(4, 12, true);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for cfg in stages[1..].iter().flatten() {
        let key = cfg.key();
        for _ in 0..100 {
            let image = random_isomorph(cfg, &mut rng);
            assert_eq!(canonical_key(&image).unwrap(), key, "{image:?}");
        }
    }
}

#[test]
fn replication_preserves_structure() {
    let stages = stored_classes(4, 12, true);
    for cfg in stages[1..].iter().flatten() {
        let sig = cfg.signature().unwrap();
        for m in 1..=3u32 {
            let rep = cfg.replicate(m as usize).unwrap();
            assert_eq!(rep.signature().unwrap().0, sig.0.map(|n| n * m));
            assert!(is_valid_n1_prime(&rep));
            assert!(is_n1l(&rep).unwrap(), "m={m} {cfg:?}");
        }
    }
}

#[test]
fn row_count_is_bounded_by_column_triples() {
    let stages = stored_classes(7, 12, false);
    for cfg in stages.iter().flatten() {
        assert!(cfg.row_count() <= 4 * (cfg.cols() / 3), "{cfg:?}");
    }
}

#[test]
fn counts_do_not_depend_on_thread_count() {
    let limits = SearchLimits::new(8, 13);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_search(&limits)).unwrap();
    let b = four.install(|| run_search(&limits)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn unfiltered_search_stores_at_least_as_much() {
    let on = run_search(&SearchLimits::new(6, 10)).unwrap();
    let off = run_search(&SearchLimits { n1l_filter: false, ..SearchLimits::new(6, 10) }).unwrap();
    for ((r, c), n) in on.entries() {
        assert!(off.get(r, c) >= n);
    }
}

#[test]
fn archives_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let limits = SearchLimits::new(5, 10);
    let mut written = Vec::new();
    n1l::search::run_search_with(&limits, |archive, _| {
        let path = dir.path().join(format!("stage-{}.n1la", archive.rows()));
        archive.save(&path)?;
        written.push((path, archive.clone()));
        Ok(())
    })
    .unwrap();
    for (path, archive) in written {
        assert_eq!(StageArchive::load(&path).unwrap(), archive);
    }
}

proptest! {
    #[test]
    fn validity_is_isomorphism_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_valid(&mut rng, 6, 12);
        let image = random_isomorph(&cfg, &mut rng);
        prop_assert!(is_valid_n1_prime(&image));
        prop_assert_eq!(is_n1l(&cfg).unwrap(), is_n1l(&image).unwrap());
        prop_assert_eq!(cfg.signature().unwrap().counts().iter().sum::<u32>(), cfg.cols() as u32);
    }

    #[test]
    fn canonical_key_is_idempotent_and_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_valid(&mut rng, 7, 14);
        let key = canonical_key(&cfg).unwrap();
        prop_assert_eq!(canonical_key(&key.to_configuration()).unwrap(), key.clone());
        prop_assert_eq!(canonical_key(&random_isomorph(&cfg, &mut rng)).unwrap(), key);
    }

    #[test]
    fn text_format_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_valid(&mut rng, 8, 16);
        prop_assert_eq!(n1l::parse_text(&n1l::serialize_text(&cfg)).unwrap(), cfg);
    }
}
