mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::time::Instant;

use common::fixtures;
use iiconforge::evalsuite::{
    aggregate, build_report, read_annotations, read_scores, score_cr2, score_cr3, score_cr5, AnnotationSheet, CapabilityManifest,
    CriterionScores, EvalError,
};
use proptest::prelude::*;

/// Content, structure and overall as printed in the comparison table.
const PUBLISHED: [(&str, f64, f64, f64); 12] = [
    ("IICONGRAPHglobal", 0.9111, 0.5357, 0.7234),
    ("IICONGRAPHarco", 0.8929, 0.4823, 0.6876),
    ("IICONGRAPHwiki", 0.9734, 0.6065, 0.7899),
    ("ArCo", 0.7839, 0.1790, 0.4815),
    ("Wikidata", 0.8584, 0.4773, 0.6678),
    ("Fondazione Zeri", 0.7521, 0.2356, 0.4939),
    ("Nomisma", 0.7384, 0.2239, 0.4811),
    ("SARI", 0.6136, 0.3364, 0.475),
    ("Europeana", 0.3524, 0.4276, 0.39),
    ("ND_Hungary", 0.3346, 0.037, 0.1858),
    ("DBpedia", 0.6896, 0.3549, 0.5222),
    ("Yago", 0.7362, 0.2705, 0.5034),
];

fn table() -> Vec<(String, CriterionScores)> {
    read_scores(File::open(fixtures().join("evaluation/kg_scores.csv")).unwrap())
        .unwrap()
        .into_iter()
        .map(|r| (r.kg_name, r.scores))
        .collect()
}

#[test]
fn every_published_aggregate_reproduces() {
    let start = Instant::now();
    let rows = table();
    assert_eq!(rows.len(), 12);
    for (name, content, structure, overall) in PUBLISHED {
        let scores = &rows.iter().find(|(n, _)| n == name).unwrap().1;
        let a = aggregate(scores);
        assert!((a.content - content).abs() <= 0.0005, "{name} content {}", a.content);
        assert!((a.structure - structure).abs() <= 0.0005, "{name} structure {}", a.structure);
        assert!((a.overall - overall).abs() <= 0.0005, "{name} overall {}", a.overall);
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn iicongraph_ranks() {
    let report = build_report(&table()).unwrap();
    let ranks = |n: &str| {
        let r = report.row(n).unwrap();
        (r.rank_content, r.rank_structure, r.rank_overall)
    };
    assert_eq!(ranks("IICONGRAPHwiki"), (1, 1, 1));
    assert_eq!(ranks("IICONGRAPHglobal"), (2, 2, 2));
    assert_eq!(ranks("IICONGRAPHarco"), (3, 3, 3));
}

#[test]
fn cr3_anchors() {
    assert_eq!(score_cr3(&CapabilityManifest::all()), 1.0);
    let mut three = [false; 9];
    three[..3].fill(true);
    let mut six = [false; 9];
    six[..6].fill(true);
    assert!((score_cr3(&CapabilityManifest::from_flags(three)) - 0.3333).abs() < 0.00005);
    assert!((score_cr3(&CapabilityManifest::from_flags(six)) - 0.6667).abs() < 0.00005);
}

#[test]
fn cr2_from_fixture_sheets() {
    let sheets = read_annotations(File::open(fixtures().join("evaluation/annotations.csv")).unwrap()).unwrap();
    assert_eq!(sheets.len(), 2);
    let naive: f64 = sheets.iter().map(|s| s.scores.values().sum::<f64>() / s.scores.len() as f64).sum::<f64>() / 2.0;
    assert!((score_cr2(&sheets).unwrap() - naive).abs() < 1e-12);
    assert!((naive - 0.92).abs() < 1e-9);
}

#[test]
fn cr2_rejects_mismatched_sheets() {
    let a = AnnotationSheet { annotator: "a".into(), scores: [("x".to_string(), 1.0)].into() };
    let b = AnnotationSheet { annotator: "b".into(), scores: [("y".to_string(), 1.0)].into() };
    assert!(matches!(score_cr2(&[a, b]), Err(EvalError::MismatchedArtworkSets(..))));
    assert!(matches!(score_cr2(&[]), Err(EvalError::NoAnnotators)));
}

#[test]
fn cr5_counts_multi_artwork_subjects() {
    let mut links: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for s in 0..10u32 {
        for a in 0..(s % 4) {
            links.entry(s).or_default().insert(a);
        }
        links.entry(s).or_default();
    }
    // subjects with remainders 2 and 3 have at least two artworks
    assert_eq!(score_cr5(&links).unwrap(), 0.4);
}

#[test]
fn out_of_range_scores_rejected() {
    assert!(CriterionScores::new([0.5, 1.2, 0.0, 0.0, 0.0, 0.0]).is_err());
    assert!(CriterionScores::new([0.5, f64::NAN, 0.0, 0.0, 0.0, 0.0]).is_err());
}

proptest! {
    #[test]
    fn aggregate_bounded_and_monotone(v in proptest::array::uniform6(0.0f64..=1.0), which in 0usize..6, bump in 0.0f64..=1.0) {
        let base = aggregate(&CriterionScores::new(v).unwrap());
        for x in [base.content, base.structure, base.overall] {
            prop_assert!((0.0..=1.0).contains(&x));
        }
        let mut up = v;
        up[which] = (up[which] + bump).min(1.0);
        let higher = aggregate(&CriterionScores::new(up).unwrap());
        prop_assert!(higher.content >= base.content && higher.structure >= base.structure && higher.overall >= base.overall);
    }
}
