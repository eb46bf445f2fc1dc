mod common;

use std::path::PathBuf;

use clc_core::dataset::{build_balanced, stats, validate};
use clc_core::synthetic::{dataset_from_shape, random_dataset, DatasetShape};
use clc_core::Dataset;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn shipped_fixture_is_valid_and_round_trips() {
    let path = fixture("valid.bmlama.jsonl");
    let ds = Dataset::read_jsonl(&path).unwrap();
    assert_eq!(ds.name, "valid");
    assert!(validate(&ds).is_valid(), "{:?}", validate(&ds));
    assert_eq!(
        ds.to_jsonl_string(),
        std::fs::read_to_string(&path).unwrap()
    );
}

#[test]
fn corrupted_variants_are_rejected_by_category() {
    for kind in [
        "missing_language",
        "candidate_count_mismatch",
        "answer_index_mismatch",
        "duplicate_candidate",
        "prompt_slot",
        "duplicate_fact_id",
    ] {
        let ds = Dataset::read_jsonl(fixture(&format!("corrupt/{kind}.bmlama.jsonl"))).unwrap();
        let report = validate(&ds);
        assert!(!report.is_valid(), "{kind} accepted");
        assert!(
            report.kinds().contains(kind),
            "{kind}: got {:?}",
            report.kinds()
        );
    }
}

#[test]
fn table_shapes_reproduce_reported_statistics() {
    for (file, want) in [
        ("bmlama17.shape.json", (17, 41, 6792, 9.71)),
        ("bmlama53.shape.json", (53, 30, 3070, 9.56)),
    ] {
        let shape: DatasetShape =
            serde_json::from_str(&std::fs::read_to_string(fixture(file)).unwrap()).unwrap();
        let ds = dataset_from_shape(&shape, 0).unwrap();
        assert!(validate(&ds).is_valid());
        let s = stats(&ds).unwrap();
        assert_eq!(
            (
                s.num_languages,
                s.num_relations,
                s.num_queries_per_language,
                s.mean_candidates_rounded()
            ),
            want
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn build_balanced_is_idempotent(seed in any::<u64>(), facts in 1usize..30) {
        let ds = random_dataset(&["en", "fr", "zh"], facts, 2, 6, seed).unwrap();
        let once = build_balanced("x", ds.to_sources()).unwrap();
        prop_assert!(once.dropped.is_empty());
        let twice = build_balanced("x", once.dataset.to_sources()).unwrap();
        prop_assert_eq!(&once.dataset, &twice.dataset);
        prop_assert_eq!(once.dataset.to_jsonl_string(), twice.dataset.to_jsonl_string());
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), facts in 1usize..20) {
        let ds = random_dataset(&["en", "ko"], facts, 2, 5, seed).unwrap();
        let text = ds.to_jsonl_string();
        let back = Dataset::from_reader("synthetic", text.as_bytes(), "mem").unwrap();
        prop_assert_eq!(back.to_jsonl_string(), text);
    }
}
