//! Symbolism knowledge base: `(symbol, meaning, context)` simulations indexed
//! in both directions, plus a normalized label table for string matching.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::model::Iri;
use crate::rdf::{self, RdfError, Term, RDFS_LABEL};
use crate::tsv::{self, TsvError};

#[derive(Debug, Error)]
pub enum KbError {
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("no simulations loaded")]
    EmptyKb,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<TsvError> for KbError {
    fn from(e: TsvError) -> Self {
        match e {
            TsvError::MissingHeader => KbError::MalformedRecord { line: 1, reason: "missing header row".into() },
            TsvError::Malformed { line, reason } => KbError::MalformedRecord { line, reason },
            TsvError::Io(e) => KbError::Io(e),
        }
    }
}

impl From<RdfError> for KbError {
    fn from(e: RdfError) -> Self {
        match e {
            RdfError::Syntax { line, reason } => KbError::MalformedRecord { line, reason },
            RdfError::Io(e) => KbError::Io(e),
        }
    }
}

/// A symbol conveying a meaning within a cultural context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Simulation {
    pub symbol: Iri,
    pub meaning: Iri,
    /// Context IRI or free tag such as `Egyptian`.
    pub context: String,
}

pub type MeaningInContext = (Iri, String);

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadSummary {
    pub records: usize,
    pub duplicates: usize,
    pub labels: usize,
    /// Normalized labels claimed by more than one symbol.
    pub label_conflicts: usize,
}

/// A frozen, read-only knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolKb {
    simulations: BTreeSet<Simulation>,
    by_symbol: BTreeMap<Iri, BTreeSet<MeaningInContext>>,
    by_meaning: BTreeMap<Iri, BTreeSet<(Iri, String)>>,
    labels: BTreeMap<String, Iri>,
}

static EMPTY: BTreeSet<(Iri, String)> = BTreeSet::new();

/// NFC, lowercase, trimmed, internal whitespace collapsed to one space.
pub fn normalize_label(label: &str) -> String {
    let nfc: String = label.nfc().collect();
    nfc.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

impl SymbolKb {
    pub fn simulations(&self) -> &BTreeSet<Simulation> {
        &self.simulations
    }

    pub fn len(&self) -> usize {
        self.simulations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simulations.is_empty()
    }

    pub fn by_symbol(&self) -> &BTreeMap<Iri, BTreeSet<MeaningInContext>> {
        &self.by_symbol
    }

    pub fn by_meaning(&self) -> &BTreeMap<Iri, BTreeSet<(Iri, String)>> {
        &self.by_meaning
    }

    pub fn labels(&self) -> &BTreeMap<String, Iri> {
        &self.labels
    }

    /// Exact match on the normalized label (aliases included). Never fuzzy.
    pub fn match_label(&self, label: &str) -> Option<&Iri> {
        let key = normalize_label(label);
        if key.is_empty() {
            return None;
        }
        self.labels.get(&key)
    }

    /// All `(meaning, context)` pairs of a symbol; empty when unknown.
    pub fn meanings_of(&self, symbol: &Iri) -> &BTreeSet<MeaningInContext> {
        self.by_symbol.get(symbol).unwrap_or(&EMPTY)
    }

    /// All `(symbol, context)` pairs conveying a meaning; empty when unknown.
    pub fn symbols_of(&self, meaning: &Iri) -> &BTreeSet<(Iri, String)> {
        self.by_meaning.get(meaning).unwrap_or(&EMPTY)
    }
}

/// Single-writer builder; [`KbBuilder::finish`] freezes the indexes.
#[derive(Debug, Default)]
pub struct KbBuilder {
    simulations: BTreeSet<Simulation>,
    records: usize,
    duplicates: usize,
    labels: BTreeMap<String, BTreeSet<Iri>>,
    label_rows: usize,
}

impl KbBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` when the simulation was already present.
    pub fn add_simulation(&mut self, sim: Simulation) -> bool {
        self.records += 1;
        let fresh = self.simulations.insert(sim);
        if !fresh {
            self.duplicates += 1;
        }
        fresh
    }

    pub fn add_label(&mut self, label: &str, symbol: Iri) {
        let key = normalize_label(label);
        if key.is_empty() {
            return;
        }
        self.label_rows += 1;
        self.labels.entry(key).or_default().insert(symbol);
    }

    /// Reads a `symbol_iri \t meaning_iri \t context_tag` file with header.
    pub fn read_simulations_tsv<R: BufRead>(&mut self, reader: R) -> Result<(), KbError> {
        for row in tsv::Reader::new(reader)? {
            let row = row?;
            let f = &row.fields;
            if f.len() < 3 || f[..3].iter().any(|c| c.trim().is_empty()) {
                return Err(KbError::MalformedRecord { line: row.line, reason: "expected 3 non-empty columns".into() });
            }
            let symbol = parse_iri(&f[0], row.line)?;
            let meaning = parse_iri(&f[1], row.line)?;
            self.add_simulation(Simulation { symbol, meaning, context: f[2].trim().to_string() });
        }
        Ok(())
    }

    /// Reads a `label \t symbol_iri` file with header; aliases are extra rows.
    pub fn read_labels_tsv<R: BufRead>(&mut self, reader: R) -> Result<(), KbError> {
        for row in tsv::Reader::new(reader)? {
            let row = row?;
            let f = &row.fields;
            if f.len() < 2 || f[..2].iter().any(|c| c.trim().is_empty()) {
                return Err(KbError::MalformedRecord { line: row.line, reason: "expected 2 non-empty columns".into() });
            }
            let symbol = parse_iri(&f[1], row.line)?;
            self.add_label(&f[0], symbol);
        }
        Ok(())
    }

    /// Reads simulation nodes from N-Triples. Each node must carry exactly
    /// one symbol, one meaning and one context; `label` triples whose subject
    /// is a symbol of the KB become label rows.
    pub fn read_triples<R: BufRead>(&mut self, reader: R, predicates: &SimulationPredicates) -> Result<(), KbError> {
        #[derive(Default)]
        struct Partial {
            line: usize,
            symbol: Option<Iri>,
            meaning: Option<Iri>,
            context: Option<String>,
        }
        let mut nodes: BTreeMap<Iri, Partial> = BTreeMap::new();
        let mut labels: Vec<(Iri, String)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let Some(t) = rdf::parse_line(&line?, line_no)? else { continue };
            let slot = if t.predicate == predicates.has_simulacrum {
                0
            } else if t.predicate == predicates.has_reality_counterpart {
                1
            } else if t.predicate == predicates.has_context {
                2
            } else if t.predicate == predicates.label {
                if let Term::Literal(l) = &t.object {
                    labels.push((t.subject, l.lexical.clone()));
                }
                continue;
            } else {
                continue;
            };
            let node = nodes.entry(t.subject).or_insert_with(|| Partial { line: line_no, ..Default::default() });
            let dup = |what: &str| KbError::MalformedRecord { line: line_no, reason: format!("second {what} on one simulation") };
            match slot {
                0 | 1 => {
                    let iri = t
                        .object
                        .as_iri()
                        .cloned()
                        .ok_or_else(|| KbError::MalformedRecord { line: line_no, reason: "symbol and meaning must be IRIs".into() })?;
                    let target = if slot == 0 { &mut node.symbol } else { &mut node.meaning };
                    if target.replace(iri).is_some() {
                        return Err(dup(if slot == 0 { "symbol" } else { "meaning" }));
                    }
                }
                _ => {
                    if node.context.replace(t.object.value().to_string()).is_some() {
                        return Err(dup("context"));
                    }
                }
            }
        }
        let mut symbols = BTreeSet::new();
        for (_, p) in nodes {
            match (p.symbol, p.meaning, p.context) {
                (Some(symbol), Some(meaning), Some(context)) => {
                    symbols.insert(symbol.clone());
                    self.add_simulation(Simulation { symbol, meaning, context });
                }
                _ => {
                    return Err(KbError::MalformedRecord {
                        line: p.line,
                        reason: "simulation node lacks symbol, meaning or context".into(),
                    })
                }
            }
        }
        for (subject, label) in labels {
            if symbols.contains(&subject) {
                self.add_label(&label, subject);
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(SymbolKb, LoadSummary), KbError> {
        if self.simulations.is_empty() {
            return Err(KbError::EmptyKb);
        }
        let mut by_symbol: BTreeMap<Iri, BTreeSet<MeaningInContext>> = BTreeMap::new();
        let mut by_meaning: BTreeMap<Iri, BTreeSet<(Iri, String)>> = BTreeMap::new();
        for sim in &self.simulations {
            by_symbol
                .entry(sim.symbol.clone())
                .or_default()
                .insert((sim.meaning.clone(), sim.context.clone()));
            by_meaning
                .entry(sim.meaning.clone())
                .or_default()
                .insert((sim.symbol.clone(), sim.context.clone()));
        }
        let mut conflicts = 0;
        let labels: BTreeMap<String, Iri> = self
            .labels
            .into_iter()
            .filter_map(|(label, symbols)| {
                if symbols.len() > 1 {
                    conflicts += 1;
                    log::warn!("label {label:?} names {} symbols; keeping the first", symbols.len());
                }
                symbols.into_iter().next().map(|s| (label, s))
            })
            .collect();
        let summary = LoadSummary {
            records: self.records,
            duplicates: self.duplicates,
            labels: labels.len(),
            label_conflicts: conflicts,
        };
        Ok((
            SymbolKb { simulations: self.simulations, by_symbol, by_meaning, labels },
            summary,
        ))
    }
}

fn parse_iri(value: &str, line: usize) -> Result<Iri, KbError> {
    Iri::new(value.trim()).map_err(|e| KbError::MalformedRecord { line, reason: e.to_string() })
}

/// Loads a KB from a simulation TSV and an optional label TSV.
pub fn load_kb<R: BufRead, L: BufRead>(simulations: R, labels: Option<L>) -> Result<(SymbolKb, LoadSummary), KbError> {
    let mut b = KbBuilder::new();
    b.read_simulations_tsv(simulations)?;
    if let Some(labels) = labels {
        b.read_labels_tsv(labels)?;
    }
    b.finish()
}

/// Predicate IRIs used by the triple form of the KB. The defaults are
/// placeholders and can be overridden per run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationPredicates {
    pub has_simulacrum: Iri,
    pub has_reality_counterpart: Iri,
    pub has_context: Iri,
    pub label: Iri,
}

impl Default for SimulationPredicates {
    fn default() -> Self {
        let so = |local: &str| Iri::new(format!("https://w3id.org/simulation/ontology/{local}")).unwrap();
        SimulationPredicates {
            has_simulacrum: so("hasSimulacrum"),
            has_reality_counterpart: so("hasRealityCounterpart"),
            has_context: so("hasContext"),
            label: Iri::new(RDFS_LABEL).unwrap(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const HR: &str = "https://w3id.org/simulation/data/";

    fn hr(local: &str) -> Iri {
        Iri::new(format!("{HR}{local}")).unwrap()
    }

    fn cat_kb() -> (SymbolKb, LoadSummary) {
        let sims = format!("symbol\tmeaning\tcontext\n{HR}cat\t{HR}divinity\tEgyptian\n");
        let labels = format!("label\tsymbol\nCat\t{HR}cat\nred rose\t{HR}rose\n");
        load_kb(sims.as_bytes(), Some(labels.as_bytes())).unwrap()
    }

    #[test]
    fn cat_divinity_single_row() {
        let (kb, summary) = cat_kb();
        assert_eq!(kb.len(), 1);
        assert_eq!(summary.records, 1);
        assert_eq!(summary.duplicates, 0);
        let expected: BTreeSet<_> = [(hr("divinity"), "Egyptian".to_string())].into();
        assert_eq!(kb.meanings_of(&hr("cat")), &expected);
        assert_eq!(kb.by_symbol().get(&hr("cat")), Some(&expected));
    }

    #[test]
    fn duplicate_rows_are_counted() {
        let sims = format!("s\tm\tc\n{HR}cat\t{HR}divinity\tEgyptian\n{HR}cat\t{HR}divinity\tEgyptian\n");
        let (kb, summary) = load_kb(sims.as_bytes(), None::<&[u8]>).unwrap();
        assert_eq!(kb.len(), 1);
        assert_eq!(summary.records, 2);
        assert_eq!(summary.duplicates, 1);
    }

    #[test]
    fn malformed_and_empty() {
        let sims = format!("s\tm\tc\n{HR}cat\t{HR}divinity\tEgyptian\n{HR}dog\t\n");
        match load_kb(sims.as_bytes(), None::<&[u8]>) {
            Err(KbError::MalformedRecord { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load_kb("s\tm\tc\n".as_bytes(), None::<&[u8]>), Err(KbError::EmptyKb)));
    }

    #[test]
    fn label_matching() {
        let (kb, _) = cat_kb();
        assert_eq!(kb.match_label("Cat"), Some(&hr("cat")));
        assert_eq!(kb.match_label("CAT"), Some(&hr("cat")));
        assert_eq!(kb.match_label("zzzz-nonexistent"), None);
        assert_eq!(kb.match_label(" red  Rose "), Some(&hr("rose")));
        assert_eq!(kb.match_label("red ros"), None);
        assert_eq!(kb.match_label("   "), None);
        assert!(kb.meanings_of(&hr("unknown")).is_empty());
    }

    #[test]
    fn normalization_applies_nfc() {
        // "é" composed vs decomposed
        assert_eq!(normalize_label("Caf\u{e9}"), normalize_label("CAFE\u{301}"));
        assert_eq!(normalize_label("\tA\u{a0} b  "), "a b");
    }

    #[test]
    fn triple_form() {
        let so = SimulationPredicates::default();
        let text = format!(
            "<{HR}sim1> <{}> <{HR}cat> .\n<{HR}sim1> <{}> <{HR}divinity> .\n<{HR}sim1> <{}> \"Egyptian\" .\n<{HR}cat> <{RDFS_LABEL}> \"Cat\"@en .\n<{HR}divinity> <{RDFS_LABEL}> \"divinity\" .\n",
            so.has_simulacrum, so.has_reality_counterpart, so.has_context
        );
        let mut b = KbBuilder::new();
        b.read_triples(text.as_bytes(), &so).unwrap();
        let (kb, summary) = b.finish().unwrap();
        assert_eq!(kb.len(), 1);
        assert_eq!(summary.labels, 1);
        assert_eq!(kb.match_label("cat"), Some(&hr("cat")));
        assert_eq!(kb.match_label("divinity"), None);

        let partial = format!("<{HR}sim1> <{}> <{HR}cat> .\n", so.has_simulacrum);
        let mut b = KbBuilder::new();
        assert!(matches!(b.read_triples(partial.as_bytes(), &so), Err(KbError::MalformedRecord { line: 1, .. })));
    }

    fn random_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<Simulation> {
        (0..n)
            .map(|_| Simulation {
                symbol: hr(&format!("s{}", rng.gen_range(0..60))),
                meaning: hr(&format!("m{}", rng.gen_range(0..40))),
                context: format!("c{}", rng.gen_range(0..5)),
            })
            .collect()
    }

    fn build(rows: &[Simulation]) -> SymbolKb {
        let mut b = KbBuilder::new();
        for r in rows {
            b.add_simulation(r.clone());
        }
        b.finish().unwrap().0
    }

    #[test]
    fn indexes_are_exact_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rows = random_rows(&mut rng, 1000);
        let kb = build(&rows);
        // exhaustive cross-check over every symbol × meaning × context seen
        let symbols: BTreeSet<_> = rows.iter().map(|r| r.symbol.clone()).collect();
        let meanings: BTreeSet<_> = rows.iter().map(|r| r.meaning.clone()).collect();
        let contexts: BTreeSet<_> = rows.iter().map(|r| r.context.clone()).collect();
        for s in &symbols {
            for m in &meanings {
                for c in &contexts {
                    let in_sims = rows.iter().any(|r| &r.symbol == s && &r.meaning == m && &r.context == c);
                    let fwd = kb.meanings_of(s).contains(&(m.clone(), c.clone()));
                    let back = kb.symbols_of(m).contains(&(s.clone(), c.clone()));
                    assert_eq!(in_sims, fwd);
                    assert_eq!(in_sims, back);
                }
            }
        }
        let fwd_total: usize = kb.by_symbol().values().map(BTreeSet::len).sum();
        let back_total: usize = kb.by_meaning().values().map(BTreeSet::len).sum();
        assert_eq!(fwd_total, kb.len());
        assert_eq!(back_total, kb.len());
    }

    #[test]
    fn meanings_of_matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rows = random_rows(&mut rng, 300);
            let kb = build(&rows);
            for i in 0..60 {
                let s = hr(&format!("s{i}"));
                let scan: BTreeSet<_> = rows
                    .iter()
                    .filter(|r| r.symbol == s)
                    .map(|r| (r.meaning.clone(), r.context.clone()))
                    .collect();
                assert_eq!(kb.meanings_of(&s), &scan);
            }
        }
    }

    #[test]
    fn load_is_order_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rows = random_rows(&mut rng, 500);
        let a = build(&rows);
        rows.shuffle(&mut rng);
        assert_eq!(build(&rows), a);

        let mut b1 = KbBuilder::new();
        let mut b2 = KbBuilder::new();
        b1.add_simulation(rows[0].clone());
        b2.add_simulation(rows[0].clone());
        b1.add_label("x", hr("a"));
        b1.add_label("x", hr("b"));
        b2.add_label("x", hr("b"));
        b2.add_label("x", hr("a"));
        assert_eq!(b1.finish().unwrap().0, b2.finish().unwrap().0);
    }

    proptest::proptest! {
        #[test]
        fn match_label_is_case_insensitive(label in "[A-Za-z ]{1,12}") {
            let mut b = KbBuilder::new();
            b.add_simulation(Simulation { symbol: hr("x"), meaning: hr("y"), context: "c".into() });
            b.add_label(&label, hr("x"));
            let (kb, _) = b.finish().unwrap();
            proptest::prop_assert_eq!(kb.match_label(&label), kb.match_label(&label.to_lowercase()));
        }
    }
}
