//! Quality scoring over six criteria and their Content / Structure / Overall
//! aggregation.
//!
//! CR1, CR4 and CR6 are taken as given. CR2 comes from annotation sheets, CR3
//! from a capability manifest and CR5 from subject to artwork links.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("score {name} = {value} is outside [0, 1]")]
    OutOfRange { name: String, value: f64 },
    #[error("annotators scored different artwork sets ({0} vs {1})")]
    MismatchedArtworkSets(String, String),
    #[error("no annotation sheets")]
    NoAnnotators,
    #[error("no subjects")]
    NoSubjects,
    #[error("no rows to report")]
    EmptyReport,
    #[error("row {row}: {reason}")]
    Malformed { row: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const CR_NAMES: [&str; 6] = ["cr1", "cr2", "cr3", "cr4", "cr5", "cr6"];
/// Structure weights for CR3, CR4, CR5 and CR6.
pub const STRUCTURE_WEIGHTS: [f64; 4] = [1.0, 0.6, 0.6, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionScores {
    pub cr1: f64,
    pub cr2: f64,
    pub cr3: f64,
    pub cr4: f64,
    pub cr5: f64,
    pub cr6: f64,
}

impl CriterionScores {
    pub fn new(values: [f64; 6]) -> Result<Self, EvalError> {
        for (name, v) in CR_NAMES.iter().zip(values) {
            if !(0.0..=1.0).contains(&v) {
                return Err(EvalError::OutOfRange { name: name.to_string(), value: v });
            }
        }
        let [cr1, cr2, cr3, cr4, cr5, cr6] = values;
        Ok(CriterionScores { cr1, cr2, cr3, cr4, cr5, cr6 })
    }

    pub fn values(&self) -> [f64; 6] {
        [self.cr1, self.cr2, self.cr3, self.cr4, self.cr5, self.cr6]
    }
}

/// Which criteria were computed here rather than ingested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ComputedFlags {
    pub cr2: bool,
    pub cr3: bool,
    pub cr5: bool,
}

impl ComputedFlags {
    /// `cr2|cr5`-style list; empty means all given.
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut out = ComputedFlags::default();
        for part in s.split(['|', ' ', ';']).filter(|p| !p.is_empty()) {
            match part.trim().to_ascii_lowercase().as_str() {
                "cr2" => out.cr2 = true,
                "cr3" => out.cr3 = true,
                "cr5" => out.cr5 = true,
                other => return Err(format!("`{other}` cannot be computed")),
            }
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.cr2 {
            parts.push("cr2");
        }
        if self.cr3 {
            parts.push("cr3");
        }
        if self.cr5 {
            parts.push("cr5");
        }
        parts.join("|")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CapabilityManifest {
    pub actions: bool,
    pub preiconographical_elements: bool,
    pub stories: bool,
    pub allegories: bool,
    pub iconographical_subjects: bool,
    pub symbols: bool,
    pub iconological_subjects: bool,
    pub cultural_phenomena: bool,
    pub taxonomy_combination: bool,
}

impl CapabilityManifest {
    pub fn all() -> Self {
        Self::from_flags([true; 9])
    }

    pub fn from_flags(f: [bool; 9]) -> Self {
        CapabilityManifest {
            actions: f[0],
            preiconographical_elements: f[1],
            stories: f[2],
            allegories: f[3],
            iconographical_subjects: f[4],
            symbols: f[5],
            iconological_subjects: f[6],
            cultural_phenomena: f[7],
            taxonomy_combination: f[8],
        }
    }

    pub fn flags(&self) -> [bool; 9] {
        [
            self.actions,
            self.preiconographical_elements,
            self.stories,
            self.allegories,
            self.iconographical_subjects,
            self.symbols,
            self.iconological_subjects,
            self.cultural_phenomena,
            self.taxonomy_combination,
        ]
    }
}

/// One annotator's per-artwork completeness scores.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnotationSheet {
    pub annotator: String,
    pub scores: BTreeMap<String, f64>,
}

/// Reads `annotator, artwork_iri, score` rows into one sheet per annotator.
pub fn read_annotations<R: Read>(reader: R) -> Result<Vec<AnnotationSheet>, EvalError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut sheets: BTreeMap<String, AnnotationSheet> = BTreeMap::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(idx + 2);
        if rec.len() != 3 {
            return Err(EvalError::Malformed { row, reason: "expected 3 columns".into() });
        }
        let score: f64 = rec[2].parse().map_err(|_| EvalError::Malformed { row, reason: format!("bad score `{}`", &rec[2]) })?;
        if !(0.0..=1.0).contains(&score) {
            return Err(EvalError::OutOfRange { name: format!("row {row}"), value: score });
        }
        let sheet = sheets
            .entry(rec[0].to_string())
            .or_insert_with(|| AnnotationSheet { annotator: rec[0].to_string(), ..Default::default() });
        sheet.scores.insert(rec[1].to_string(), score);
    }
    Ok(sheets.into_values().collect())
}

/// Mean over annotators of each annotator's mean score.
pub fn score_cr2(sheets: &[AnnotationSheet]) -> Result<f64, EvalError> {
    let first = sheets.first().ok_or(EvalError::NoAnnotators)?;
    let artworks: BTreeSet<&String> = first.scores.keys().collect();
    let mut total = 0.0;
    for s in sheets {
        let mine: BTreeSet<&String> = s.scores.keys().collect();
        if mine != artworks || mine.is_empty() {
            return Err(EvalError::MismatchedArtworkSets(first.annotator.clone(), s.annotator.clone()));
        }
        total += s.scores.values().sum::<f64>() / s.scores.len() as f64;
    }
    Ok(total / sheets.len() as f64)
}

pub fn score_cr3(manifest: &CapabilityManifest) -> f64 {
    manifest.flags().iter().filter(|f| **f).count() as f64 / 9.0
}

/// Share of subjects linked to two or more artworks.
pub fn score_cr5<S, A>(subject_links: &BTreeMap<S, BTreeSet<A>>) -> Result<f64, EvalError> {
    if subject_links.is_empty() {
        return Err(EvalError::NoSubjects);
    }
    let linked = subject_links.values().filter(|a| a.len() >= 2).count();
    Ok(linked as f64 / subject_links.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aggregate {
    pub content: f64,
    pub structure: f64,
    pub overall: f64,
}

pub fn aggregate(s: &CriterionScores) -> Aggregate {
    let content = (s.cr1 + s.cr2) / 2.0;
    let weighted = [s.cr3, s.cr4, s.cr5, s.cr6].iter().zip(STRUCTURE_WEIGHTS).map(|(v, w)| v * w).sum::<f64>();
    let structure = weighted / STRUCTURE_WEIGHTS.iter().sum::<f64>();
    Aggregate { content, structure, overall: (content + structure) / 2.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub kg_name: String,
    pub scores: CriterionScores,
    pub computed: ComputedFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub kg_name: String,
    pub scores: CriterionScores,
    pub aggregate: Aggregate,
    pub rank_content: usize,
    pub rank_structure: usize,
    pub rank_overall: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub rows: Vec<ReportRow>,
}

/// Reads `kg_name, cr1..cr6, computed_flags`.
pub fn read_scores<R: Read>(reader: R) -> Result<Vec<ScoreRow>, EvalError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(idx + 2);
        if rec.len() < 7 || rec.len() > 8 {
            return Err(EvalError::Malformed { row, reason: format!("expected 8 columns, found {}", rec.len()) });
        }
        let mut values = [0.0; 6];
        for (i, v) in values.iter_mut().enumerate() {
            *v = rec[i + 1].parse().map_err(|_| EvalError::Malformed { row, reason: format!("bad {} `{}`", CR_NAMES[i], &rec[i + 1]) })?;
        }
        let computed = ComputedFlags::parse(rec.get(7).unwrap_or("")).map_err(|reason| EvalError::Malformed { row, reason })?;
        out.push(ScoreRow { kg_name: rec[0].to_string(), scores: CriterionScores::new(values)?, computed });
    }
    Ok(out)
}

fn dense_ranks(values: &[f64]) -> Vec<usize> {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    values.iter().map(|v| distinct.iter().position(|d| d == v).expect("present") + 1).collect()
}

/// Aggregates every row and adds dense descending ranks.
pub fn build_report(rows: &[(String, CriterionScores)]) -> Result<EvaluationReport, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptyReport);
    }
    let aggs: Vec<Aggregate> = rows.iter().map(|(_, s)| aggregate(s)).collect();
    let rc = dense_ranks(&aggs.iter().map(|a| a.content).collect::<Vec<_>>());
    let rs = dense_ranks(&aggs.iter().map(|a| a.structure).collect::<Vec<_>>());
    let ro = dense_ranks(&aggs.iter().map(|a| a.overall).collect::<Vec<_>>());
    let rows = rows
        .iter()
        .zip(aggs)
        .enumerate()
        .map(|(i, ((name, scores), aggregate))| ReportRow {
            kg_name: name.clone(),
            scores: *scores,
            aggregate,
            rank_content: rc[i],
            rank_structure: rs[i],
            rank_overall: ro[i],
        })
        .collect();
    Ok(EvaluationReport { rows })
}

const REPORT_HEADER: [&str; 13] = [
    "kg_name", "cr1", "cr2", "cr3", "cr4", "cr5", "cr6", "content", "structure", "overall", "rank_content", "rank_structure", "rank_overall",
];

impl EvaluationReport {
    pub fn row(&self, name: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.kg_name == name)
    }

    fn cells(r: &ReportRow) -> Vec<String> {
        let mut cells = vec![r.kg_name.clone()];
        cells.extend(r.scores.values().iter().map(|v| format!("{v:.4}")));
        cells.extend([r.aggregate.content, r.aggregate.structure, r.aggregate.overall].iter().map(|v| format!("{v:.4}")));
        cells.extend([r.rank_content, r.rank_structure, r.rank_overall].iter().map(|v| v.to_string()));
        cells
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(REPORT_HEADER)?;
        for r in &self.rows {
            w.write_record(Self::cells(r))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Column-aligned plain text table.
    pub fn to_text(&self) -> String {
        let mut table: Vec<Vec<String>> = vec![REPORT_HEADER.iter().map(|s| s.to_string()).collect()];
        table.extend(self.rows.iter().map(Self::cells));
        let widths: Vec<usize> = (0..REPORT_HEADER.len()).map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &table {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, w))| if c == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sheet(name: &str, scores: &[f64]) -> AnnotationSheet {
        AnnotationSheet {
            annotator: name.into(),
            scores: scores.iter().enumerate().map(|(i, s)| (format!("http://a/{i}"), *s)).collect(),
        }
    }

    #[test]
    fn cr2_means() {
        assert_eq!(score_cr2(&[sheet("x", &[1.0; 10]), sheet("y", &[1.0; 10])]).unwrap(), 1.0);
        assert!((score_cr2(&[sheet("x", &[1.0, 0.5, 0.5, 1.0])]).unwrap() - 0.75).abs() < 1e-12);
        assert!(matches!(score_cr2(&[sheet("x", &[1.0; 3]), sheet("y", &[1.0; 4])]), Err(EvalError::MismatchedArtworkSets(..))));
        assert!(matches!(score_cr2(&[]), Err(EvalError::NoAnnotators)));
    }

    #[test]
    fn cr3_fractions() {
        assert_eq!(score_cr3(&CapabilityManifest::all()), 1.0);
        assert_eq!(score_cr3(&CapabilityManifest::default()), 0.0);
    }

    #[test]
    fn cr5_threshold() {
        let links: BTreeMap<&str, BTreeSet<u32>> = [("a", [1, 2].into()), ("b", [1, 3].into()), ("c", [4].into())].into();
        assert!((score_cr5(&links).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let none: BTreeMap<&str, BTreeSet<u32>> = BTreeMap::new();
        assert!(matches!(score_cr5(&none), Err(EvalError::NoSubjects)));
    }

    #[test]
    fn zero_scores() {
        let a = aggregate(&CriterionScores::new([0.0; 6]).unwrap());
        assert_eq!((a.content, a.structure, a.overall), (0.0, 0.0, 0.0));
        assert!(CriterionScores::new([0.0, 0.0, 1.5, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn dense_ranking() {
        let s = CriterionScores::new([0.5; 6]).unwrap();
        let r = build_report(&[("a".into(), s), ("b".into(), s)]).unwrap();
        assert!(r.rows.iter().all(|r| r.rank_overall == 1));
        assert!(build_report(&[]).is_err());
    }

    #[test]
    fn scores_csv() {
        let text = "kg_name,cr1,cr2,cr3,cr4,cr5,cr6,computed_flags\nx,0.1,0.2,0.3,0.4,0.5,0.6,cr2|cr5\n";
        let rows = read_scores(text.as_bytes()).unwrap();
        assert_eq!(rows[0].computed, ComputedFlags { cr2: true, cr3: false, cr5: true });
        assert_eq!(rows[0].computed.render(), "cr2|cr5");
    }

    #[test]
    fn annotations_csv() {
        let text = "annotator,artwork_iri,score\nann1,http://a/1,1\nann1,http://a/2,0.5\nann2,http://a/1,0.5\nann2,http://a/2,0.5\n";
        let sheets = read_annotations(text.as_bytes()).unwrap();
        assert_eq!(sheets.len(), 2);
        assert!((score_cr2(&sheets).unwrap() - 0.625).abs() < 1e-12);
    }
}
