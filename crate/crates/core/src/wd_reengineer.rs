//! Alignment of depicted-entity types with interpretation classes and
//! construction of fully leveled recognitions from depicts statements.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::arco_parser::mint_local_name;
use crate::harvester::{DepictsStatement, QualifierKind};
use crate::model::{
    dedupe_recognitions, Artwork, DepictedElement, ElementTable, IconClass, InterpretationLevel, Iri,
    Level, Provenance, QualifierTarget, Recognition, RelationKind, SourceKind, DEFAULT_NAMESPACE,
};
use crate::tsv;

#[derive(Debug, Error)]
pub enum AlignmentError {
    #[error("type {0} is mapped to more than one class")]
    DuplicateType(Iri),
    #[error("row {0}: unknown or inconsistent interpretation class")]
    UnknownIconClass(usize),
    #[error("row {row}: priority {priority} already used on level {level}")]
    DuplicatePriority { row: usize, level: Level, priority: i64 },
    #[error("row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentRow {
    pub class: InterpretationLevel,
    /// Lower numbers win.
    pub priority: i64,
    pub annotation: Option<String>,
}

/// Type IRI → interpretation class; each type maps to exactly one class and
/// priorities are unique within a level.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignmentTable {
    rows: BTreeMap<Iri, AlignmentRow>,
    pub coverage_note: String,
}

impl AlignmentTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, type_iri: &Iri) -> Option<&AlignmentRow> {
        self.rows.get(type_iri)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Iri, &AlignmentRow)> {
        self.rows.iter()
    }

    /// Inserts a row enforcing both table invariants. `row` is only used for
    /// error reporting.
    pub fn insert(&mut self, type_iri: Iri, entry: AlignmentRow, row: usize) -> Result<(), AlignmentError> {
        if let Some(existing) = self.rows.get(&type_iri) {
            if existing.class != entry.class {
                return Err(AlignmentError::DuplicateType(type_iri));
            }
            if existing.priority <= entry.priority {
                return Ok(());
            }
        }
        let level = entry.class.level();
        if self
            .rows
            .iter()
            .any(|(t, r)| t != &type_iri && r.class.level() == level && r.priority == entry.priority)
        {
            return Err(AlignmentError::DuplicatePriority { row, level, priority: entry.priority });
        }
        self.rows.insert(type_iri, entry);
        Ok(())
    }

    /// Inserts without checking the invariants; for building deliberately
    /// broken tables.
    pub fn insert_unchecked(&mut self, type_iri: Iri, entry: AlignmentRow) {
        self.rows.insert(type_iri, entry);
    }

    pub fn classes(&self) -> BTreeSet<IconClass> {
        self.rows.values().filter_map(|r| r.class.class()).collect()
    }
}

/// Loads the alignment CSV (`type_iri, icon_level, icon_subclass, priority`).
pub fn load_alignment<R: Read>(reader: R) -> Result<AlignmentTable, AlignmentError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| AlignmentError::MalformedRow { row: 1, reason: format!("missing column {name}") })
    };
    let (c_type, c_level, c_class, c_prio) = (col("type_iri")?, col("icon_level")?, col("icon_subclass")?, col("priority")?);
    let mut table = AlignmentTable::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(idx + 2);
        let field = |c: usize| record.get(c).unwrap_or("");
        let type_iri = Iri::new(field(c_type))
            .map_err(|e| AlignmentError::MalformedRow { row, reason: e.to_string() })?;
        let level: Level = field(c_level).parse().map_err(|_| AlignmentError::UnknownIconClass(row))?;
        let (class, annotation) =
            IconClass::parse_annotated(field(c_class)).map_err(|_| AlignmentError::UnknownIconClass(row))?;
        let class = InterpretationLevel::new(level, Some(class)).map_err(|_| AlignmentError::UnknownIconClass(row))?;
        let priority: i64 = field(c_prio)
            .parse()
            .map_err(|_| AlignmentError::MalformedRow { row, reason: format!("bad priority {:?}", field(c_prio)) })?;
        table.insert(type_iri, AlignmentRow { class, priority, annotation: annotation.map(str::to_string) }, row)?;
    }
    log::info!("loaded {} alignment rows", table.len());
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum AssignmentStatus {
    Assigned,
    Unassigned,
    /// Two hits with equal priority map to different classes.
    Conflict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentOutcome {
    pub element: Iri,
    pub assigned: Option<InterpretationLevel>,
    pub matched_type: Option<Iri>,
    pub status: AssignmentStatus,
}

/// Picks the class of the lowest-priority type hit among the element's types.
pub fn assign_icon_class(stmt: &DepictsStatement, table: &AlignmentTable) -> AssignmentOutcome {
    let mut best: Option<(i64, &Iri, &AlignmentRow)> = None;
    let mut tied_conflict = false;
    for t in &stmt.element_types {
        let Some(row) = table.get(t) else { continue };
        match best {
            None => best = Some((row.priority, t, row)),
            Some((p, _, _)) if row.priority < p => {
                best = Some((row.priority, t, row));
                tied_conflict = false;
            }
            Some((p, _, b)) if row.priority == p => {
                // types iterate in IRI order, so the first hit is kept
                if b.class != row.class {
                    tied_conflict = true;
                }
            }
            _ => {}
        }
    }
    match best {
        None => AssignmentOutcome { element: stmt.element.clone(), assigned: None, matched_type: None, status: AssignmentStatus::Unassigned },
        Some(_) if tied_conflict => AssignmentOutcome {
            element: stmt.element.clone(),
            assigned: None,
            matched_type: None,
            status: AssignmentStatus::Conflict,
        },
        Some((_, t, row)) => AssignmentOutcome {
            element: stmt.element.clone(),
            assigned: Some(row.class),
            matched_type: Some(t.clone()),
            status: AssignmentStatus::Assigned,
        },
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnassignedEntry {
    pub labels: BTreeSet<String>,
    pub types: BTreeSet<Iri>,
    pub occurrences: usize,
    pub conflicts: usize,
}

/// Residual elements that received no class, with occurrence counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnassignedReport {
    entries: BTreeMap<Iri, UnassignedEntry>,
}

impl UnassignedReport {
    pub fn record(&mut self, stmt: &DepictsStatement, status: AssignmentStatus) {
        let e = self.entries.entry(stmt.element.clone()).or_default();
        if !stmt.element_label.is_empty() {
            e.labels.insert(stmt.element_label.clone());
        }
        e.types.extend(stmt.element_types.iter().cloned());
        e.occurrences += 1;
        if status == AssignmentStatus::Conflict {
            e.conflicts += 1;
        }
    }

    pub fn merge(&mut self, other: UnassignedReport) {
        for (k, v) in other.entries {
            let e = self.entries.entry(k).or_default();
            e.labels.extend(v.labels);
            e.types.extend(v.types);
            e.occurrences += v.occurrences;
            e.conflicts += v.conflicts;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn distinct_elements(&self) -> usize {
        self.entries.len()
    }

    pub fn total_occurrences(&self) -> usize {
        self.entries.values().map(|e| e.occurrences).sum()
    }

    /// Entries by occurrence count descending, then element IRI.
    pub fn sorted(&self) -> Vec<(&Iri, &UnassignedEntry)> {
        let mut rows: Vec<_> = self.entries.iter().collect();
        rows.sort_by(|a, b| b.1.occurrences.cmp(&a.1.occurrences).then_with(|| a.0.cmp(b.0)));
        rows
    }

    pub fn write_tsv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        tsv::write_row(out, &["element_iri", "labels", "type_iris", "occurrence_count"])?;
        for (iri, e) in self.sorted() {
            let labels = e.labels.iter().cloned().collect::<Vec<_>>().join("|");
            let types = e.types.iter().map(Iri::as_str).collect::<Vec<_>>().join("|");
            tsv::write_row(out, &[iri.as_str(), &labels, &types, &e.occurrences.to_string()])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConversionStats {
    pub statements: usize,
    pub assigned: usize,
    pub unassigned: usize,
    pub conflicts: usize,
}

impl ConversionStats {
    /// Share of statements that received a class, in percent.
    pub fn coverage_percent(&self) -> f64 {
        if self.statements == 0 {
            return 100.0;
        }
        100.0 * self.assigned as f64 / self.statements as f64
    }
}

#[derive(Debug, Clone, Default)]
pub struct Conversion {
    pub recognitions: BTreeSet<Recognition>,
    pub artworks: BTreeMap<Iri, Artwork>,
    pub elements: ElementTable,
    pub report: UnassignedReport,
    pub stats: ConversionStats,
}

/// Converts depicts statements with the default data namespace.
pub fn build_recognitions<I>(stmts: I, table: &AlignmentTable) -> Conversion
where
    I: IntoIterator<Item = DepictsStatement>,
{
    let ns = Iri::new(DEFAULT_NAMESPACE).expect("default namespace is valid");
    build_recognitions_in(stmts, table, &ns)
}

/// Converts depicts statements into recognitions.
///
/// Qualifiers map as follows: `wears` adds a `Wears` relation and, when the
/// worn item is itself a table key, an attribute recognition for it;
/// `expression/gesture/pose` adds the relation plus an expression recognition
/// for the value; `symbolizes` and anything else are kept verbatim.
/// Literal qualifier values that need an element get an id minted under
/// `namespace`.
pub fn build_recognitions_in<I>(stmts: I, table: &AlignmentTable, namespace: &Iri) -> Conversion
where
    I: IntoIterator<Item = DepictsStatement>,
{
    let mut out = Conversion::default();
    let mut recs = Vec::new();
    for stmt in stmts {
        out.stats.statements += 1;
        let outcome = assign_icon_class(&stmt, table);
        let Some(level) = outcome.assigned else {
            match outcome.status {
                AssignmentStatus::Conflict => out.stats.conflicts += 1,
                _ => out.stats.unassigned += 1,
            }
            out.report.record(&stmt, outcome.status);
            continue;
        };
        out.stats.assigned += 1;
        out.artworks.entry(stmt.artwork.clone()).or_insert_with(|| Artwork {
            id: stmt.artwork.clone(),
            label: stmt.artwork_label.clone(),
            source: SourceKind::WikidataLike,
        });
        note_element(&mut out.elements, &stmt.element, &stmt.element_label, &stmt.element_types);

        let mut rec = Recognition::new(stmt.artwork.clone(), stmt.element.clone(), level, Provenance::ManualMapping);
        rec.annotation = outcome
            .matched_type
            .as_ref()
            .and_then(|t| table.get(t))
            .and_then(|r| r.annotation.clone());
        for q in &stmt.qualifiers {
            let target = QualifierTarget::from_value(&q.value);
            match &q.kind {
                QualifierKind::Wears => {
                    rec.add_qualifier(RelationKind::Wears, target.clone());
                    if let QualifierTarget::Element(item) = &target {
                        if table.get(item).is_some() {
                            note_element(&mut out.elements, item, "", &BTreeSet::new());
                            recs.push(Recognition::new(
                                stmt.artwork.clone(),
                                item.clone(),
                                InterpretationLevel::of_class(IconClass::Attribute),
                                Provenance::ManualMapping,
                            ));
                        }
                    }
                }
                QualifierKind::ExpressionGestureOrPose => {
                    let (element, label) = match &target {
                        QualifierTarget::Element(iri) => (Some(iri.clone()), String::new()),
                        QualifierTarget::Literal(text) => (
                            mint_local_name(text)
                                .ok()
                                .and_then(|local| Iri::join(namespace, &format!("element/{local}")).ok()),
                            text.clone(),
                        ),
                    };
                    let Some(element) = element else { continue };
                    rec.add_qualifier(RelationKind::ExpressionGestureOrPose, QualifierTarget::Element(element.clone()));
                    note_element(&mut out.elements, &element, &label, &BTreeSet::new());
                    recs.push(Recognition::new(
                        stmt.artwork.clone(),
                        element,
                        InterpretationLevel::of_class(IconClass::Expression),
                        Provenance::SourceKG,
                    ));
                }
                QualifierKind::Symbolizes => {
                    rec.add_qualifier(RelationKind::Symbolizes, target);
                }
                QualifierKind::Other(_) => {
                    rec.add_qualifier(RelationKind::Other, target);
                }
            }
        }
        recs.push(rec);
    }
    out.recognitions = dedupe_recognitions(recs);
    for e in out.elements.values_mut().filter(|e| e.label.is_empty()) {
        e.label = e.id.local_name().to_string();
    }
    out
}

fn note_element(elements: &mut ElementTable, id: &Iri, label: &str, types: &BTreeSet<Iri>) {
    let e = elements.entry(id.clone()).or_insert_with(|| DepictedElement {
        id: id.clone(),
        label: String::new(),
        type_ids: BTreeSet::new(),
    });
    if e.label.is_empty() {
        e.label = label.to_string();
    }
    e.type_ids.extend(types.iter().cloned());
}
