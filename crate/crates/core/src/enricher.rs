//! Symbolic enrichment: recognised elements are linked to symbols of the
//! knowledge base and every simulation of a linked symbol yields a
//! creator-agnostic interpretation of the artwork.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ElementTable, InterpretationLevel, Iri, Recognition};
use crate::symbolkb::SymbolKb;
use crate::tsv;

#[derive(Debug, Error)]
pub enum EnrichError {
    #[error("id alignment row {row}: {reason}")]
    MalformedAlignment { row: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Element IRI → symbol IRI alignment made ahead of time.
pub type IdAlignment = BTreeMap<Iri, Iri>;

/// Loads an `element_iri, symbol_iri` CSV.
pub fn load_id_alignment<R: Read>(reader: R) -> Result<IdAlignment, EnrichError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = IdAlignment::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(idx + 2);
        let bad = |reason: String| EnrichError::MalformedAlignment { row, reason };
        if rec.len() != 2 {
            return Err(bad("expected 2 columns".into()));
        }
        let element = Iri::new(&rec[0]).map_err(|e| bad(e.to_string()))?;
        let symbol = Iri::new(&rec[1]).map_err(|e| bad(e.to_string()))?;
        out.insert(element, symbol);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub enum EnrichmentProvenance {
    #[default]
    AutomaticEnrichment,
}

/// One inferred reading; unique per `(artwork, symbol, meaning, context)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolicInterpretation {
    pub artwork: Iri,
    pub symbol: Iri,
    pub meaning: Iri,
    pub context: String,
    /// Smallest element id through which the symbol was reached.
    pub element: Iri,
    #[serde(default)]
    pub provenance: EnrichmentProvenance,
}

impl SymbolicInterpretation {
    pub fn key(&self) -> (&Iri, &Iri, &Iri, &str) {
        (&self.artwork, &self.symbol, &self.meaning, &self.context)
    }
}

/// Per-element trail entry kept before deduplication.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AuditEntry {
    pub artwork: Iri,
    pub element: Iri,
    pub level: InterpretationLevel,
    pub symbol: Iri,
    pub meaning: Iri,
    pub context: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Linking {
    pub links: BTreeMap<Iri, Iri>,
    /// Unlinked element → number of recognitions mentioning it.
    pub unmatched: BTreeMap<Iri, usize>,
    pub via_alignment: usize,
    pub via_label: usize,
}

impl Linking {
    /// Unmatched elements by frequency descending, then IRI.
    pub fn unmatched_sorted(&self) -> Vec<(&Iri, usize)> {
        let mut rows: Vec<_> = self.unmatched.iter().map(|(k, v)| (k, *v)).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        rows
    }

    pub fn write_unmatched_tsv<W: Write>(&self, out: &mut W, elements: &ElementTable) -> std::io::Result<()> {
        tsv::write_row(out, &["element_iri", "label", "occurrence_count"])?;
        for (iri, n) in self.unmatched_sorted() {
            let label = elements.get(iri).map(|e| e.label.as_str()).unwrap_or("");
            tsv::write_row(out, &[iri.as_str(), label, &n.to_string()])?;
        }
        Ok(())
    }
}

fn element_label<'a>(elements: &'a ElementTable, id: &'a Iri) -> &'a str {
    elements.get(id).map(|e| e.label.as_str()).filter(|l| !l.is_empty()).unwrap_or_else(|| id.local_name())
}

/// Links each recognised element to a symbol: the id alignment first, then
/// an exact normalized label match.
pub fn link_elements<'a, I>(recognitions: I, elements: &ElementTable, kb: &SymbolKb, id_alignment: &IdAlignment) -> Linking
where
    I: IntoIterator<Item = &'a Recognition>,
{
    let mut mentions: BTreeMap<&Iri, usize> = BTreeMap::new();
    for r in recognitions {
        *mentions.entry(&r.element).or_default() += 1;
    }
    let mut out = Linking::default();
    for (element, n) in mentions {
        if let Some(symbol) = id_alignment.get(element) {
            out.links.insert(element.clone(), symbol.clone());
            out.via_alignment += 1;
        } else if let Some(symbol) = kb.match_label(element_label(elements, element)) {
            out.links.insert(element.clone(), symbol.clone());
            out.via_label += 1;
        } else {
            out.unmatched.insert(element.clone(), n);
        }
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct Enrichment {
    pub interpretations: BTreeSet<SymbolicInterpretation>,
    pub audit: Vec<AuditEntry>,
    pub linking: Linking,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EnrichmentSummary {
    pub artworks: usize,
    pub artworks_with_interpretations: usize,
    pub interpretations: usize,
    /// Count when deduplicating per element instead of per artwork.
    pub per_element_interpretations: usize,
    pub mean_per_artwork: f64,
    pub linked_elements: usize,
    pub unmatched_elements: usize,
}

impl Enrichment {
    pub fn summary(&self, recognitions: &BTreeSet<Recognition>) -> EnrichmentSummary {
        let artworks: BTreeSet<&Iri> = recognitions.iter().map(|r| &r.artwork).collect();
        let with: BTreeSet<&Iri> = self.interpretations.iter().map(|i| &i.artwork).collect();
        let per_element: BTreeSet<_> = self
            .audit
            .iter()
            .map(|a| (&a.artwork, &a.element, &a.symbol, &a.meaning, &a.context))
            .collect();
        EnrichmentSummary {
            artworks: artworks.len(),
            artworks_with_interpretations: with.len(),
            interpretations: self.interpretations.len(),
            per_element_interpretations: per_element.len(),
            mean_per_artwork: if artworks.is_empty() { 0.0 } else { self.interpretations.len() as f64 / artworks.len() as f64 },
            linked_elements: self.linking.links.len(),
            unmatched_elements: self.linking.unmatched.len(),
        }
    }
}

/// Joins recognitions with the KB: one interpretation per artwork and
/// simulation reachable through any linked element of that artwork.
pub fn enrich(recognitions: &BTreeSet<Recognition>, elements: &ElementTable, kb: &SymbolKb, id_alignment: &IdAlignment) -> Enrichment {
    let linking = link_elements(recognitions, elements, kb, id_alignment);

    let mut by_artwork: BTreeMap<&Iri, Vec<&Recognition>> = BTreeMap::new();
    for r in recognitions {
        by_artwork.entry(&r.artwork).or_default().push(r);
    }
    let groups: Vec<_> = by_artwork.into_iter().collect();
    let partials: Vec<(Vec<SymbolicInterpretation>, Vec<AuditEntry>)> = groups
        .par_iter()
        .map(|(artwork, recs)| {
            let mut best: BTreeMap<(&Iri, &Iri, &str), &Iri> = BTreeMap::new();
            let mut audit = Vec::new();
            for r in recs {
                let Some(symbol) = linking.links.get(&r.element) else { continue };
                for (meaning, context) in kb.meanings_of(symbol) {
                    audit.push(AuditEntry {
                        artwork: (*artwork).clone(),
                        element: r.element.clone(),
                        level: r.level,
                        symbol: symbol.clone(),
                        meaning: meaning.clone(),
                        context: context.clone(),
                    });
                    best.entry((symbol, meaning, context.as_str()))
                        .and_modify(|e| {
                            if &r.element < *e {
                                *e = &r.element;
                            }
                        })
                        .or_insert(&r.element);
                }
            }
            let interps = best
                .into_iter()
                .map(|((symbol, meaning, context), element)| SymbolicInterpretation {
                    artwork: (*artwork).clone(),
                    symbol: symbol.clone(),
                    meaning: meaning.clone(),
                    context: context.to_string(),
                    element: element.clone(),
                    provenance: EnrichmentProvenance::AutomaticEnrichment,
                })
                .collect();
            (interps, audit)
        })
        .collect();

    let mut out = Enrichment { linking, ..Default::default() };
    for (interps, audit) in partials {
        out.interpretations.extend(interps);
        out.audit.extend(audit);
    }
    out.audit.sort();
    out.audit.dedup();
    out
}

pub fn write_interpretations_jsonl<'a, W: Write, I: IntoIterator<Item = &'a SymbolicInterpretation>>(out: &mut W, interps: I) -> std::io::Result<()> {
    for i in interps {
        serde_json::to_writer(&mut *out, i)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_interpretations_jsonl<R: std::io::BufRead>(reader: R) -> Result<BTreeSet<SymbolicInterpretation>, std::io::Error> {
    let mut out = BTreeSet::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.insert(serde_json::from_str(&line).map_err(std::io::Error::other)?);
    }
    Ok(out)
}
