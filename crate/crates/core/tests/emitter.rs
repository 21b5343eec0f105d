mod common;

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::BufReader;

use common::{fixtures, iri, random_interpretations, rng};
use iiconforge::arco_parser::{parse_batch, read_descriptions_tsv, to_recognitions, ParserConfig};
use iiconforge::emitter::{
    emit_full, emit_shortcut, read_full, serialize, EmitError, Format, LogicalRecognition, ProfileKind, VocabularyProfile,
    INTERPRETATION_FOOTPRINT,
};
use iiconforge::enricher::{enrich, load_id_alignment, SymbolicInterpretation};
use iiconforge::harvester::{read_depicts_dump, DumpFormat};
use iiconforge::model::{
    dedupe_recognitions, IconClass, InterpretationLevel, Level, Provenance, QualifierTarget, Recognition, RelationKind, DEFAULT_NAMESPACE,
};
use iiconforge::rdf::{parse_ntriples, to_canonical_ntriples};
use iiconforge::symbolkb::load_kb;
use iiconforge::wd_reengineer::{build_recognitions, load_alignment};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_recognitions(r: &mut ChaCha8Rng) -> BTreeSet<Recognition> {
    let mut out = Vec::new();
    for _ in 0..r.gen_range(0..80) {
        let level = if r.gen_bool(0.2) {
            InterpretationLevel::level_only(Level::ALL[r.gen_range(0..3)])
        } else {
            InterpretationLevel::of_class(IconClass::ALL[r.gen_range(0..IconClass::ALL.len())])
        };
        let mut rec = Recognition::new(
            iri(&format!("http://ex.org/art/{}", r.gen_range(0..15))),
            iri(&format!("http://ex.org/el/{}", r.gen_range(0..25))),
            level,
            Provenance::SourceKG,
        );
        for _ in 0..r.gen_range(0..3) {
            let kind = [RelationKind::Wears, RelationKind::ExpressionGestureOrPose, RelationKind::Symbolizes, RelationKind::Other][r.gen_range(0..4)];
            let target = if r.gen_bool(0.5) {
                QualifierTarget::Element(iri(&format!("http://ex.org/el/{}", r.gen_range(0..25))))
            } else {
                QualifierTarget::Literal(["smiling", "a \"quoted\" word", "line\nbreak", "caffè"][r.gen_range(0..4)].into())
            };
            rec.add_qualifier(kind, target);
        }
        out.push(rec);
    }
    dedupe_recognitions(out)
}

fn random_graph(seed: u64) -> (BTreeSet<Recognition>, BTreeSet<SymbolicInterpretation>) {
    let mut r = rng(seed);
    let recs = random_recognitions(&mut r);
    let interps = random_interpretations(&mut r, 15, 6, 6).into_iter().collect();
    (recs, interps)
}

#[test]
fn full_shape_reads_back() {
    let profile = VocabularyProfile::default();
    for seed in 0..60 {
        let (recs, interps) = random_graph(seed);
        let triples = emit_full(&recs, &interps, &profile).unwrap();
        let parsed = parse_ntriples(&to_canonical_ntriples(&triples)).unwrap();
        assert_eq!(parsed, triples);
        let back = read_full(&parsed, &profile).unwrap();
        assert_eq!(back.recognitions, recs.iter().map(LogicalRecognition::from).collect());
        assert_eq!(back.interpretations, interps);
    }
}

#[test]
fn permuted_input_gives_identical_bytes() {
    let profile = VocabularyProfile::default();
    for seed in 100..130 {
        let (recs, interps) = random_graph(seed);
        let mut r = rng(seed);
        let mut recs_v: Vec<_> = recs.iter().collect();
        let mut interps_v: Vec<_> = interps.iter().collect();
        let full = to_canonical_ntriples(&emit_full(recs_v.iter().copied(), interps_v.iter().copied(), &profile).unwrap());
        let short = to_canonical_ntriples(&emit_shortcut(recs_v.iter().copied(), interps_v.iter().copied(), &profile).unwrap());
        recs_v.shuffle(&mut r);
        interps_v.shuffle(&mut r);
        // feeding duplicates changes nothing either
        recs_v.extend(recs.iter().take(3));
        assert_eq!(to_canonical_ntriples(&emit_full(recs_v.iter().copied(), interps_v.iter().copied(), &profile).unwrap()), full);
        assert_eq!(to_canonical_ntriples(&emit_shortcut(recs_v.iter().copied(), interps_v.iter().copied(), &profile).unwrap()), short);
    }
}

#[test]
fn shortcut_never_larger_on_random_graphs() {
    let profile = VocabularyProfile::default();
    for seed in 200..260 {
        let (recs, interps) = random_graph(seed);
        let s = emit_shortcut(&recs, &interps, &profile).unwrap().len();
        let f = emit_full(&recs, &interps, &profile).unwrap().len();
        assert!(s <= f, "seed {seed}: {s} > {f}");
    }
}

fn wikidata_fixture() -> (BTreeSet<Recognition>, BTreeSet<SymbolicInterpretation>) {
    let table = load_alignment(File::open(fixtures().join("wikidata/alignment.csv")).unwrap()).unwrap();
    let stmts = read_depicts_dump(BufReader::new(File::open(fixtures().join("wikidata/depicts.tsv")).unwrap()), DumpFormat::Tsv)
        .unwrap()
        .collect::<Result<Vec<_>, _>>()
        .unwrap();
    let conv = build_recognitions(stmts, &table);
    let (kb, _) = load_kb(
        BufReader::new(File::open(fixtures().join("kb/simulations.tsv")).unwrap()),
        Some(BufReader::new(File::open(fixtures().join("kb/labels.tsv")).unwrap())),
    )
    .unwrap();
    let ids = load_id_alignment(File::open(fixtures().join("kb/id_alignment.csv")).unwrap()).unwrap();
    let interps = enrich(&conv.recognitions, &conv.elements, &kb, &ids).interpretations;
    (conv.recognitions, interps)
}

fn arco_fixture() -> BTreeSet<Recognition> {
    let descs = read_descriptions_tsv(BufReader::new(File::open(fixtures().join("arco/descriptions.tsv")).unwrap())).unwrap();
    let ns = iri(DEFAULT_NAMESPACE);
    let recs = parse_batch(&descs, &ParserConfig::default()).iter().flat_map(|p| to_recognitions(p, &ns).0).collect::<Vec<_>>();
    dedupe_recognitions(recs)
}

#[test]
fn shortcut_not_larger_on_fixtures() {
    let profile = VocabularyProfile::default();
    let (wd, wd_i) = wikidata_fixture();
    assert!(!wd_i.is_empty());
    let arco = arco_fixture();
    for (recs, interps) in [(&wd, &wd_i), (&arco, &BTreeSet::new())] {
        let s = emit_shortcut(recs, interps, &profile).unwrap().len();
        let f = emit_full(recs, interps, &profile).unwrap().len();
        assert!(s <= f, "{s} > {f}");
    }
}

#[test]
fn arco_shortcut_count_matches_per_record_counter() {
    let profile = VocabularyProfile::default();
    let recs = arco_fixture();
    let interps: BTreeSet<SymbolicInterpretation> = random_interpretations(&mut rng(31), 10, 4, 4).into_iter().collect();
    let mut links = HashSet::new();
    let mut typed = HashSet::new();
    for r in &recs {
        links.insert((r.artwork.as_str(), r.element.as_str(), r.level.level()));
        typed.insert((r.element.as_str(), r.level.tag()));
    }
    let got = emit_shortcut(&recs, &interps, &profile).unwrap().len();
    assert_eq!(got, links.len() + typed.len() + INTERPRETATION_FOOTPRINT * interps.len());
}

#[test]
fn wikidata_fixture_reads_back() {
    let profile = VocabularyProfile::default();
    let (recs, interps) = wikidata_fixture();
    let back = read_full(&emit_full(&recs, &interps, &profile).unwrap(), &profile).unwrap();
    assert_eq!(back.recognitions.len(), recs.len());
    assert_eq!(back.interpretations, interps);
}

#[test]
fn missing_relation_is_reported() {
    let mut profile = VocabularyProfile::default();
    profile.remove("recognized-character");
    assert!(matches!(profile.validate(ProfileKind::Full), Err(EmitError::IncompleteProfile(t)) if t == "recognized-character"));
    assert!(profile.validate(ProfileKind::Shortcut).is_ok());
    let rec = Recognition::new(iri("http://ex.org/a"), iri("http://ex.org/e"), InterpretationLevel::of_class(IconClass::Character), Provenance::SourceKG);
    assert!(emit_full([&rec], [], &profile).is_err());
}

#[test]
fn files_on_disk_are_stable() {
    let profile = VocabularyProfile::default();
    let (recs, interps) = random_graph(7);
    let triples = emit_full(&recs, &interps, &profile).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.nt");
    let b = dir.path().join("b.nt");
    let sa = serialize(&triples, Format::NTriples, &a, &profile).unwrap();
    let mut rev = triples.clone();
    rev.reverse();
    serialize(&rev, Format::NTriples, &b, &profile).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(sa.triples, triples.len());
    let ttl = dir.path().join("a.ttl");
    let st = serialize(&triples, Format::Turtle, &ttl, &profile).unwrap();
    assert_eq!(st.triples, triples.len());
}
