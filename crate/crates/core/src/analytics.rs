//! Corpus analytics: serendipitous connections, symbolic ranking, level
//! distribution and iconological meaning frequency.
//!
//! Two artworks are connected through a meaning when each conveys it and the
//! symbols they use for it are not the very same single symbol. Counting
//! never materializes pairs: per meaning, every pair of conveying artworks is
//! connected except pairs whose symbol sets are the same singleton.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arco_parser::{mint_meaning_id, ParsedDescription};
use crate::enricher::SymbolicInterpretation;
use crate::model::{IconClass, Iri, Level, Recognition};
use crate::tsv;

pub const DEFAULT_PAIR_CAP: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error("top_k must be at least 1")]
    InvalidTopK,
}

/// What a meaning is keyed by: the meaning alone, or with its context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MeaningKey {
    pub meaning: Iri,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeaningEntry {
    pub key: MeaningKey,
    /// `(artwork id, sorted symbol ids)`, by artwork id.
    pub artworks: Vec<(u32, Vec<u32>)>,
}

/// Interpretations grouped by meaning, then artwork. Artworks and symbols
/// are interned as dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MeaningIndex {
    pub artworks: Vec<Iri>,
    pub symbols: Vec<Iri>,
    pub entries: Vec<MeaningEntry>,
}

impl MeaningIndex {
    /// The index spelled out with IRIs, for inspection and tests.
    pub fn groups(&self) -> BTreeMap<MeaningKey, BTreeMap<Iri, BTreeSet<Iri>>> {
        self.entries
            .iter()
            .map(|e| {
                let per_artwork = e
                    .artworks
                    .iter()
                    .map(|(a, syms)| {
                        (self.artworks[*a as usize].clone(), syms.iter().map(|s| self.symbols[*s as usize].clone()).collect())
                    })
                    .collect();
                (e.key.clone(), per_artwork)
            })
            .collect()
    }
}

fn intern<'a>(table: &mut HashMap<&'a Iri, u32>, names: &mut Vec<&'a Iri>, iri: &'a Iri) -> u32 {
    *table.entry(iri).or_insert_with(|| {
        names.push(iri);
        (names.len() - 1) as u32
    })
}

/// Groups interpretations by meaning (or meaning and context).
pub fn build_meaning_index<'a, I>(interps: I, same_context: bool) -> MeaningIndex
where
    I: IntoIterator<Item = &'a SymbolicInterpretation>,
{
    let mut interps: Vec<&SymbolicInterpretation> = interps.into_iter().collect();
    interps.sort();
    let mut artwork_ids = HashMap::new();
    let mut artwork_names = Vec::new();
    let mut symbol_ids = HashMap::new();
    let mut symbol_names = Vec::new();
    let mut grouped: BTreeMap<MeaningKey, BTreeMap<u32, BTreeSet<u32>>> = BTreeMap::new();
    for i in interps {
        let a = intern(&mut artwork_ids, &mut artwork_names, &i.artwork);
        let s = intern(&mut symbol_ids, &mut symbol_names, &i.symbol);
        let key = MeaningKey { meaning: i.meaning.clone(), context: same_context.then(|| i.context.clone()) };
        grouped.entry(key).or_default().entry(a).or_default().insert(s);
    }
    MeaningIndex {
        artworks: artwork_names.into_iter().cloned().collect(),
        symbols: symbol_names.into_iter().cloned().collect(),
        entries: grouped
            .into_iter()
            .map(|(key, arts)| MeaningEntry { key, artworks: arts.into_iter().map(|(a, s)| (a, s.into_iter().collect())).collect() })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SerendipityResult {
    /// Connections counted once per (pair, meaning).
    pub pair_meaning_count: u64,
    /// Distinct connected pairs; `None` when the instance exceeds the cap.
    pub distinct_pair_count: Option<u64>,
    pub pair_cap: u64,
    /// Candidate pairs that distinct counting would have to visit.
    pub candidate_pairs: u64,
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn entry_count(entry: &MeaningEntry) -> u64 {
    let mut singletons: HashMap<u32, u64> = HashMap::new();
    for (_, syms) in &entry.artworks {
        if let [s] = syms.as_slice() {
            *singletons.entry(*s).or_default() += 1;
        }
    }
    choose2(entry.artworks.len() as u64) - singletons.values().map(|q| choose2(*q)).sum::<u64>()
}

fn connected(a: &[u32], b: &[u32]) -> bool {
    !(a.len() == 1 && a == b)
}

fn entry_pairs(entry: &MeaningEntry, sink: &mut HashSet<u64>) {
    let arts = &entry.artworks;
    for (i, (a, sa)) in arts.iter().enumerate() {
        for (b, sb) in &arts[i + 1..] {
            if connected(sa, sb) {
                sink.insert(((*a as u64) << 32) | *b as u64);
            }
        }
    }
}

fn connected_pairs(index: &MeaningIndex) -> HashSet<u64> {
    index
        .entries
        .par_iter()
        .fold(HashSet::new, |mut set, e| {
            entry_pairs(e, &mut set);
            set
        })
        .reduce(HashSet::new, |mut a, b| {
            if a.len() < b.len() {
                return b.into_iter().chain(a).collect();
            }
            a.extend(b);
            a
        })
}

/// Counts connections per (pair, meaning) in closed form, and distinct pairs
/// by enumeration when at most `pair_cap` candidate pairs exist.
pub fn count_serendipity(index: &MeaningIndex, pair_cap: u64) -> SerendipityResult {
    let pair_meaning_count = index.entries.par_iter().map(entry_count).sum();
    let candidate_pairs: u64 = index.entries.iter().map(|e| choose2(e.artworks.len() as u64)).sum();
    let distinct_pair_count = (candidate_pairs <= pair_cap).then(|| connected_pairs(index).len() as u64);
    SerendipityResult { pair_meaning_count, distinct_pair_count, pair_cap, candidate_pairs }
}

/// Connected pairs as IRIs, sorted; `None` beyond the cap.
pub fn serendipitous_pairs(index: &MeaningIndex, pair_cap: u64) -> Option<Vec<(Iri, Iri)>> {
    let candidates: u64 = index.entries.iter().map(|e| choose2(e.artworks.len() as u64)).sum();
    if candidates > pair_cap {
        return None;
    }
    let mut pairs: Vec<(Iri, Iri)> = connected_pairs(index)
        .into_iter()
        .map(|p| {
            let a = index.artworks[(p >> 32) as usize].clone();
            let b = index.artworks[(p & 0xffff_ffff) as usize].clone();
            if a <= b { (a, b) } else { (b, a) }
        })
        .collect();
    pairs.sort();
    Some(pairs)
}

/// Artworks by distinct `(symbol, meaning, context)` count, descending, ties
/// by IRI.
pub fn rank_symbolic<'a, I>(interps: I, top_k: usize) -> Result<Vec<(Iri, usize)>, AnalyticsError>
where
    I: IntoIterator<Item = &'a SymbolicInterpretation>,
{
    if top_k == 0 {
        return Err(AnalyticsError::InvalidTopK);
    }
    let mut per: BTreeMap<&Iri, BTreeSet<(&Iri, &Iri, &str)>> = BTreeMap::new();
    for i in interps {
        per.entry(&i.artwork).or_default().insert((&i.symbol, &i.meaning, &i.context));
    }
    let mut rows: Vec<(Iri, usize)> = per.into_iter().map(|(a, s)| (a.clone(), s.len())).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows.truncate(top_k);
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelRow {
    pub level: Level,
    pub class: Option<IconClass>,
    pub total: usize,
    pub unique: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LevelDistribution {
    pub rows: Vec<LevelRow>,
    pub pre_iconographic_total: usize,
    pub iconographic_total: usize,
    pub iconological_total: usize,
    /// Pre-iconographic total over pre-iconographic plus iconographic.
    pub pre_iconographic_share: f64,
}

impl LevelDistribution {
    pub fn row(&self, class: Option<IconClass>, level: Level) -> Option<&LevelRow> {
        self.rows.iter().find(|r| r.class == class && r.level == level)
    }

    pub fn write_tsv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        tsv::write_row(out, &["level", "class", "total", "unique"])?;
        for r in &self.rows {
            let class = r.class.map(|c| c.tag()).unwrap_or("");
            tsv::write_row(out, &[r.level.tag(), class, &r.total.to_string(), &r.unique.to_string()])?;
        }
        Ok(())
    }
}

/// Recognition totals and distinct elements per (level, class).
pub fn level_distribution<'a, I>(recognitions: I) -> LevelDistribution
where
    I: IntoIterator<Item = &'a Recognition>,
{
    let mut per: BTreeMap<(Level, Option<IconClass>), (usize, BTreeSet<&Iri>)> = BTreeMap::new();
    for r in recognitions {
        let slot = per.entry((r.level.level(), r.level.class())).or_default();
        slot.0 += 1;
        slot.1.insert(&r.element);
    }
    let mut out = LevelDistribution::default();
    for ((level, class), (total, elements)) in per {
        match level {
            Level::PreIconographic => out.pre_iconographic_total += total,
            Level::Iconographic => out.iconographic_total += total,
            Level::Iconological => out.iconological_total += total,
        }
        out.rows.push(LevelRow { level, class, total, unique: elements.len() });
    }
    let denom = out.pre_iconographic_total + out.iconographic_total;
    out.pre_iconographic_share = if denom == 0 { 0.0 } else { out.pre_iconographic_total as f64 / denom as f64 };
    out
}

/// Distinct artworks per minted iconological meaning, descending, ties by id.
pub fn meaning_frequency(parsed: &[ParsedDescription]) -> Vec<(String, usize)> {
    let mut per: BTreeMap<String, BTreeSet<&Iri>> = BTreeMap::new();
    for p in parsed {
        for phrase in &p.iconological {
            if let Ok(id) = mint_meaning_id(phrase) {
                per.entry(id).or_default().insert(&p.artwork);
            }
        }
    }
    let mut rows: Vec<(String, usize)> = per.into_iter().map(|(m, a)| (m, a.len())).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows
}

pub fn write_ranking_tsv<W: Write, S: AsRef<str>>(out: &mut W, header: [&str; 2], rows: &[(S, usize)]) -> std::io::Result<()> {
    tsv::write_row(out, &["rank", header[0], header[1]])?;
    for (i, (name, n)) in rows.iter().enumerate() {
        tsv::write_row(out, &[(i + 1).to_string().as_str(), name.as_ref(), &n.to_string()])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enricher::EnrichmentProvenance;
    use crate::model::{InterpretationLevel, Provenance};

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://x/{s}")).unwrap()
    }

    fn interp(a: &str, s: &str, m: &str) -> SymbolicInterpretation {
        SymbolicInterpretation {
            artwork: iri(a),
            symbol: iri(s),
            meaning: iri(m),
            context: String::new(),
            element: iri(s),
            provenance: EnrichmentProvenance::AutomaticEnrichment,
        }
    }

    fn count(interps: &[SymbolicInterpretation]) -> SerendipityResult {
        count_serendipity(&build_meaning_index(interps, false), DEFAULT_PAIR_CAP)
    }

    #[test]
    fn index_groups_by_meaning() {
        let idx = build_meaning_index(&[interp("A", "heart", "love"), interp("C", "rose", "love")], false);
        let g = idx.groups();
        let love = &g[&MeaningKey { meaning: iri("love"), context: None }];
        assert_eq!(love.len(), 2);
        assert_eq!(love[&iri("A")], [iri("heart")].into());
    }

    #[test]
    fn heart_heart_is_not_serendipitous() {
        let r = count(&[interp("A", "heart", "love"), interp("B", "heart", "love")]);
        assert_eq!(r.pair_meaning_count, 0);
        assert_eq!(r.distinct_pair_count, Some(0));
    }

    #[test]
    fn heart_rose_is() {
        let r = count(&[interp("A", "heart", "love"), interp("C", "rose", "love")]);
        assert_eq!(r.pair_meaning_count, 1);
        assert_eq!(r.distinct_pair_count, Some(1));
    }

    #[test]
    fn shared_symbol_plus_other_connects() {
        let r = count(&[interp("A", "heart", "love"), interp("A", "rose", "love"), interp("B", "heart", "love")]);
        assert_eq!(r.pair_meaning_count, 1);
    }

    #[test]
    fn cap_hides_distinct_count() {
        let interps = [interp("A", "heart", "love"), interp("C", "rose", "love")];
        let r = count_serendipity(&build_meaning_index(&interps, false), 0);
        assert_eq!(r.pair_meaning_count, 1);
        assert_eq!(r.distinct_pair_count, None);
        assert!(serendipitous_pairs(&build_meaning_index(&interps, false), 0).is_none());
        assert_eq!(serendipitous_pairs(&build_meaning_index(&interps, false), 10).unwrap(), vec![(iri("A"), iri("C"))]);
    }

    #[test]
    fn same_context_splits_meanings() {
        let mut a = interp("A", "heart", "love");
        a.context = "Christian".into();
        let mut c = interp("C", "rose", "love");
        c.context = "Greek".into();
        let interps = [a, c];
        assert_eq!(count_serendipity(&build_meaning_index(&interps, false), 10).pair_meaning_count, 1);
        assert_eq!(count_serendipity(&build_meaning_index(&interps, true), 10).pair_meaning_count, 0);
    }

    #[test]
    fn ranking_ties_by_iri() {
        let interps = [interp("B", "s1", "m"), interp("A", "s1", "m"), interp("C", "s1", "m"), interp("C", "s2", "m")];
        let rows = rank_symbolic(&interps, 2).unwrap();
        assert_eq!(rows, vec![(iri("C"), 2), (iri("A"), 1)]);
        assert_eq!(rank_symbolic(&interps, 0), Err(AnalyticsError::InvalidTopK));
    }

    #[test]
    fn level_share() {
        let r = |e: &str, c: IconClass| Recognition::new(iri("a"), iri(e), InterpretationLevel::of_class(c), Provenance::SourceKG);
        let recs = [r("cat", IconClass::NaturalElement), r("dog", IconClass::NaturalElement), r("mary", IconClass::Character)];
        let d = level_distribution(&recs);
        assert!((d.pre_iconographic_share - 2.0 / 3.0).abs() < 1e-12);
        let only_pre = level_distribution(&recs[..2]);
        assert_eq!(only_pre.pre_iconographic_share, 1.0);
        assert_eq!(d.row(Some(IconClass::Character), Level::Iconographic).unwrap().unique, 1);
    }
}
