//! Triple emission for recognitions and interpretations, canonical
//! serialization and the dataset catalogue.
//!
//! Two emission shapes exist. The shortcut shape links an artwork straight to
//! each element with a level-specific predicate and types the element. The
//! full shape reifies every recognition as its own node. Nodes never are
//! blank: their IRIs are minted from a hash of their content.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::enricher::{EnrichmentProvenance, SymbolicInterpretation};
use crate::model::{
    IconClass, InterpretationLevel, Iri, Level, QualifierRelation, QualifierTarget, Recognition, RelationKind,
    DEFAULT_NAMESPACE, DEFAULT_PREFIX,
};
use crate::rdf::{self, Literal, Term, Triple, RDFS_LABEL, RDF_TYPE, XSD_DATE_TIME};

/// The profile shipped with the crate.
pub const DEFAULT_PROFILE_TOML: &str = include_str!("../profiles/default.toml");

/// Triples per recognition in the shortcut shape: link and element type.
pub const SHORTCUT_RECOGNITION_FOOTPRINT: usize = 2;
/// Triples per recognition in the full shape, before qualifiers.
pub const FULL_RECOGNITION_FOOTPRINT: usize = 3;
/// Triples per interpretation in either shape.
pub const INTERPRETATION_FOOTPRINT: usize = 6;

const DCAT: &str = "http://www.w3.org/ns/dcat#";
const DCT: &str = "http://purl.org/dc/terms/";
const PROV: &str = "http://www.w3.org/ns/prov#";
pub const CC_BY_4: &str = "https://creativecommons.org/licenses/by/4.0/";

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("profile has no IRI for `{0}`")]
    IncompleteProfile(String),
    #[error("profile: {0}")]
    InvalidProfile(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("reading triples back: {0}")]
    Reader(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Shortcut,
    Full,
}

/// Namespace plus logical relation tag → IRI map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularyProfile {
    pub namespace: Iri,
    pub prefix: String,
    relations: BTreeMap<String, Iri>,
}

impl Default for VocabularyProfile {
    fn default() -> Self {
        VocabularyProfile::from_toml(DEFAULT_PROFILE_TOML).expect("bundled profile parses")
    }
}

impl VocabularyProfile {
    /// An empty profile, mostly useful in tests.
    pub fn empty() -> Self {
        VocabularyProfile {
            namespace: Iri::new(DEFAULT_NAMESPACE).expect("valid"),
            prefix: DEFAULT_PREFIX.to_string(),
            relations: BTreeMap::new(),
        }
    }

    /// Flat `tag = "iri"` file. `namespace` and `prefix` are reserved keys.
    pub fn from_toml(text: &str) -> Result<Self, EmitError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| EmitError::InvalidProfile(e.to_string()))?;
        let mut out = VocabularyProfile::empty();
        for (key, value) in table {
            let value = value
                .as_str()
                .ok_or_else(|| EmitError::InvalidProfile(format!("`{key}` is not a string")))?;
            match key.as_str() {
                "prefix" => out.prefix = value.to_string(),
                _ => {
                    let iri = Iri::new(value).map_err(|e| EmitError::InvalidProfile(format!("`{key}`: {e}")))?;
                    if key == "namespace" {
                        out.namespace = iri;
                    } else {
                        out.relations.insert(key, iri);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, EmitError> {
        let mut text = String::new();
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|source| EmitError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn set(&mut self, tag: &str, iri: Iri) {
        self.relations.insert(tag.to_string(), iri);
    }

    pub fn remove(&mut self, tag: &str) -> Option<Iri> {
        self.relations.remove(tag)
    }

    pub fn get(&self, tag: &str) -> Result<&Iri, EmitError> {
        self.relations.get(tag).ok_or_else(|| EmitError::IncompleteProfile(tag.to_string()))
    }

    pub fn relations(&self) -> &BTreeMap<String, Iri> {
        &self.relations
    }

    /// Every tag the given shape may need.
    pub fn required_tags(kind: ProfileKind) -> Vec<String> {
        let mut tags: Vec<String> = INTERPRETATION_TAGS.iter().map(|s| s.to_string()).collect();
        match kind {
            ProfileKind::Shortcut => {
                tags.extend(Level::ALL.iter().map(|l| shortcut_tag(*l).to_string()));
                tags.extend(Level::ALL.iter().map(|l| format!("level-{}", l.tag())));
                tags.extend(IconClass::ALL.iter().map(|c| format!("class-{}", c.tag())));
            }
            ProfileKind::Full => {
                tags.extend(Level::ALL.iter().map(|l| format!("recognition-{}", l.tag())));
                tags.push("recognition-artwork".into());
                tags.push("recognized-element".into());
                tags.extend(IconClass::ALL.iter().map(|c| format!("recognized-{}", c.tag())));
                tags.extend(RELATION_KINDS.iter().map(|k| qualifier_tag(*k).to_string()));
            }
        }
        tags
    }

    pub fn validate(&self, kind: ProfileKind) -> Result<(), EmitError> {
        for tag in Self::required_tags(kind) {
            self.get(&tag)?;
        }
        Ok(())
    }
}

const INTERPRETATION_TAGS: [&str; 6] = [
    "interpretation-class",
    "has-interpretation",
    "interpretation-symbol",
    "interpretation-meaning",
    "interpretation-context",
    "interpretation-element",
];

const RELATION_KINDS: [RelationKind; 4] =
    [RelationKind::Wears, RelationKind::ExpressionGestureOrPose, RelationKind::Symbolizes, RelationKind::Other];

fn shortcut_tag(level: Level) -> &'static str {
    match level {
        Level::PreIconographic => "preiconographic-depicts",
        Level::Iconographic => "iconographic-depicts",
        Level::Iconological => "iconological-represents",
    }
}

fn qualifier_tag(kind: RelationKind) -> &'static str {
    match kind {
        RelationKind::Wears => "qualifier-wears",
        RelationKind::ExpressionGestureOrPose => "qualifier-expression-gesture-or-pose",
        RelationKind::Symbolizes => "qualifier-symbolizes",
        RelationKind::Other => "qualifier-other",
    }
}

fn class_tag(level: &InterpretationLevel) -> String {
    match level.class() {
        Some(c) => format!("class-{}", c.tag()),
        None => format!("level-{}", level.level().tag()),
    }
}

fn recognized_tag(level: &InterpretationLevel) -> String {
    match level.class() {
        Some(c) => format!("recognized-{}", c.tag()),
        None => "recognized-element".to_string(),
    }
}

fn digest_hex(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0x1f]);
    }
    let bytes = h.finalize();
    let mut out = String::with_capacity(32);
    for b in &bytes[..16] {
        let _ = write!(out, "{b:02x}");
    }
    out
}

fn mint(namespace: &Iri, kind: &str, parts: &[&str]) -> Iri {
    Iri::new(format!("{}{}/{}", namespace, kind, digest_hex(parts))).expect("hex local names are valid")
}

pub fn recognition_node(namespace: &Iri, r: &Recognition) -> Iri {
    mint(namespace, "recognition", &[r.artwork.as_str(), r.element.as_str(), &r.level.tag()])
}

pub fn interpretation_node(namespace: &Iri, i: &SymbolicInterpretation) -> Iri {
    mint(namespace, "interpretation", &[i.artwork.as_str(), i.symbol.as_str(), i.meaning.as_str(), &i.context])
}

fn context_term(context: &str) -> Term {
    match Iri::new(context) {
        Ok(iri) if context.contains("://") => Term::Iri(iri),
        _ => Term::Literal(Literal::plain(context)),
    }
}

fn emit_interpretations<'a, I>(interps: I, profile: &VocabularyProfile, out: &mut Vec<Triple>) -> Result<(), EmitError>
where
    I: IntoIterator<Item = &'a SymbolicInterpretation>,
{
    let mut iter = interps.into_iter().peekable();
    if iter.peek().is_none() {
        return Ok(());
    }
    let class = profile.get("interpretation-class")?.clone();
    let has = profile.get("has-interpretation")?.clone();
    let symbol = profile.get("interpretation-symbol")?.clone();
    let meaning = profile.get("interpretation-meaning")?.clone();
    let context = profile.get("interpretation-context")?.clone();
    let element = profile.get("interpretation-element")?.clone();
    let rdf_type = Iri::new(RDF_TYPE).expect("valid");
    for i in iter {
        let node = interpretation_node(&profile.namespace, i);
        out.push(Triple::new(node.clone(), rdf_type.clone(), class.clone()));
        out.push(Triple::new(i.artwork.clone(), has.clone(), node.clone()));
        out.push(Triple::new(node.clone(), symbol.clone(), i.symbol.clone()));
        out.push(Triple::new(node.clone(), meaning.clone(), i.meaning.clone()));
        out.push(Triple::new(node.clone(), context.clone(), context_term(&i.context)));
        out.push(Triple::new(node, element.clone(), i.element.clone()));
    }
    Ok(())
}

/// Shortcut shape, sorted and deduplicated.
pub fn emit_shortcut<'a, 'b, R, I>(recs: R, interps: I, profile: &VocabularyProfile) -> Result<Vec<Triple>, EmitError>
where
    R: IntoIterator<Item = &'a Recognition>,
    I: IntoIterator<Item = &'b SymbolicInterpretation>,
{
    let rdf_type = Iri::new(RDF_TYPE).expect("valid");
    let mut out = Vec::new();
    for r in recs {
        let link = profile.get(shortcut_tag(r.level.level()))?;
        let class = profile.get(&class_tag(&r.level))?;
        out.push(Triple::new(r.artwork.clone(), link.clone(), r.element.clone()));
        out.push(Triple::new(r.element.clone(), rdf_type.clone(), class.clone()));
    }
    emit_interpretations(interps, profile, &mut out)?;
    Ok(rdf::canonicalize(out))
}

/// Full shape with reified recognition nodes, sorted and deduplicated.
pub fn emit_full<'a, 'b, R, I>(recs: R, interps: I, profile: &VocabularyProfile) -> Result<Vec<Triple>, EmitError>
where
    R: IntoIterator<Item = &'a Recognition>,
    I: IntoIterator<Item = &'b SymbolicInterpretation>,
{
    let rdf_type = Iri::new(RDF_TYPE).expect("valid");
    let about = profile.get("recognition-artwork")?.clone();
    let mut out = Vec::new();
    for r in recs {
        let node = recognition_node(&profile.namespace, r);
        let class = profile.get(&format!("recognition-{}", r.level.level().tag()))?;
        let recognized = profile.get(&recognized_tag(&r.level))?;
        out.push(Triple::new(node.clone(), rdf_type.clone(), class.clone()));
        out.push(Triple::new(node.clone(), about.clone(), r.artwork.clone()));
        out.push(Triple::new(node.clone(), recognized.clone(), r.element.clone()));
        for q in &r.qualifiers {
            let pred = profile.get(qualifier_tag(q.kind))?;
            let object: Term = match &q.target {
                QualifierTarget::Element(iri) => iri.clone().into(),
                QualifierTarget::Literal(s) => Literal::plain(s.clone()).into(),
            };
            out.push(Triple::new(node.clone(), pred.clone(), object));
        }
    }
    emit_interpretations(interps, profile, &mut out)?;
    Ok(rdf::canonicalize(out))
}

/// A recognition as far as the full shape records it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LogicalRecognition {
    pub artwork: Iri,
    pub element: Iri,
    pub level: InterpretationLevel,
    pub qualifiers: BTreeSet<QualifierRelation>,
}

impl From<&Recognition> for LogicalRecognition {
    fn from(r: &Recognition) -> Self {
        LogicalRecognition {
            artwork: r.artwork.clone(),
            element: r.element.clone(),
            level: r.level,
            qualifiers: r.qualifiers.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FullGraph {
    pub recognitions: BTreeSet<LogicalRecognition>,
    pub interpretations: BTreeSet<SymbolicInterpretation>,
}

#[derive(Default)]
struct NodeParts {
    level: Option<Level>,
    artwork: Option<Iri>,
    element: Option<(Iri, Option<IconClass>)>,
    qualifiers: BTreeSet<QualifierRelation>,
    symbol: Option<Iri>,
    meaning: Option<Iri>,
    context: Option<String>,
    via: Option<Iri>,
    interpretation: bool,
}

/// Reads full-shape triples back into recognitions and interpretations.
pub fn read_full(triples: &[Triple], profile: &VocabularyProfile) -> Result<FullGraph, EmitError> {
    let mut reverse: BTreeMap<&Iri, &str> = BTreeMap::new();
    for (tag, iri) in profile.relations() {
        reverse.insert(iri, tag.as_str());
    }
    let has = profile.get("has-interpretation")?;
    let mut nodes: BTreeMap<&Iri, NodeParts> = BTreeMap::new();
    let mut owner: BTreeMap<&Iri, &Iri> = BTreeMap::new();
    for t in triples {
        if &t.predicate == has {
            if let Term::Iri(node) = &t.object {
                owner.insert(node, &t.subject);
            }
            continue;
        }
        let entry = || NodeParts::default();
        if t.predicate.as_str() == RDF_TYPE {
            let Some(tag) = t.object.as_iri().and_then(|o| reverse.get(o)) else { continue };
            if let Some(level) = tag.strip_prefix("recognition-").and_then(|l| Level::from_str(l).ok()) {
                nodes.entry(&t.subject).or_insert_with(entry).level = Some(level);
            } else if *tag == "interpretation-class" {
                nodes.entry(&t.subject).or_insert_with(entry).interpretation = true;
            }
            continue;
        }
        let Some(tag) = reverse.get(&t.predicate) else { continue };
        let parts = nodes.entry(&t.subject).or_insert_with(entry);
        let iri_object = || {
            t.object.as_iri().cloned().ok_or_else(|| EmitError::Reader(format!("`{tag}` expects an IRI: {}", t.to_ntriples())))
        };
        match *tag {
            "recognition-artwork" => parts.artwork = Some(iri_object()?),
            "recognized-element" => parts.element = Some((iri_object()?, None)),
            "interpretation-symbol" => parts.symbol = Some(iri_object()?),
            "interpretation-meaning" => parts.meaning = Some(iri_object()?),
            "interpretation-element" => parts.via = Some(iri_object()?),
            "interpretation-context" => parts.context = Some(t.object.value().to_string()),
            tag => {
                if let Some(class) = tag.strip_prefix("recognized-") {
                    let class = IconClass::from_str(class).map_err(|e| EmitError::Reader(e.to_string()))?;
                    parts.element = Some((iri_object()?, Some(class)));
                } else if let Some(kind) = RELATION_KINDS.iter().find(|k| qualifier_tag(**k) == tag) {
                    let target = match &t.object {
                        Term::Iri(i) => QualifierTarget::Element(i.clone()),
                        Term::Literal(l) => QualifierTarget::Literal(l.lexical.clone()),
                    };
                    parts.qualifiers.insert(QualifierRelation { kind: *kind, target });
                }
            }
        }
    }

    let mut out = FullGraph::default();
    for (node, parts) in nodes {
        let missing = |what: &str| EmitError::Reader(format!("node {node} has no {what}"));
        if parts.interpretation {
            out.interpretations.insert(SymbolicInterpretation {
                artwork: owner.get(node).map(|a| (*a).clone()).ok_or_else(|| missing("artwork"))?,
                symbol: parts.symbol.ok_or_else(|| missing("symbol"))?,
                meaning: parts.meaning.ok_or_else(|| missing("meaning"))?,
                context: parts.context.ok_or_else(|| missing("context"))?,
                element: parts.via.ok_or_else(|| missing("element"))?,
                provenance: EnrichmentProvenance::AutomaticEnrichment,
            });
        } else if let Some(level) = parts.level {
            let (element, class) = parts.element.ok_or_else(|| missing("element"))?;
            let level = InterpretationLevel::new(level, class).map_err(|e| EmitError::Reader(e.to_string()))?;
            out.recognitions.insert(LogicalRecognition {
                artwork: parts.artwork.ok_or_else(|| missing("artwork"))?,
                element,
                level,
                qualifiers: parts.qualifiers,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    NTriples,
    Turtle,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nt" | "ntriples" | "n-triples" => Ok(Format::NTriples),
            "ttl" | "turtle" => Ok(Format::Turtle),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FileSummary {
    pub triples: usize,
    pub bytes: u64,
}

fn is_simple_local(local: &str) -> bool {
    let mut chars = local.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn turtle_iri(out: &mut String, iri: &Iri, profile: &VocabularyProfile) {
    if let Some(local) = iri.as_str().strip_prefix(profile.namespace.as_str()) {
        if is_simple_local(local) {
            let _ = write!(out, "{}:{}", profile.prefix, local);
            return;
        }
    }
    let _ = write!(out, "<{iri}>");
}

/// Sorted, distinct Turtle, one statement per line.
pub fn to_turtle(triples: &[Triple], profile: &VocabularyProfile) -> String {
    let canonical = rdf::canonicalize(triples.iter().cloned());
    let mut out = format!("@prefix {}: <{}> .\n\n", profile.prefix, profile.namespace);
    for t in &canonical {
        turtle_iri(&mut out, &t.subject, profile);
        out.push(' ');
        if t.predicate.as_str() == RDF_TYPE {
            out.push('a');
        } else {
            turtle_iri(&mut out, &t.predicate, profile);
        }
        out.push(' ');
        match &t.object {
            Term::Iri(i) => turtle_iri(&mut out, i, profile),
            Term::Literal(_) => {
                let line = Triple::new(t.subject.clone(), t.predicate.clone(), t.object.clone()).to_ntriples();
                let start = line.find('"').expect("literal present");
                out.push_str(&line[start..line.len() - 2]);
            }
        }
        out.push_str(" .\n");
    }
    out
}

/// Writes the triples in canonical order to `path`.
pub fn serialize(triples: &[Triple], format: Format, path: &Path, profile: &VocabularyProfile) -> Result<FileSummary, EmitError> {
    let io = |source| EmitError::Io { path: path.to_path_buf(), source };
    let distinct: BTreeSet<&Triple> = triples.iter().collect();
    let text = match format {
        Format::NTriples => rdf::to_canonical_ntriples(triples),
        Format::Turtle => to_turtle(triples, profile),
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(text.as_bytes()).map_err(io)?;
    w.flush().map_err(io)?;
    Ok(FileSummary { triples: distinct.len(), bytes: text.len() as u64 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogueSource {
    pub name: String,
    /// Where the input came from: a path, endpoint or IRI.
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogueDistribution {
    pub path: String,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogueConfig {
    pub title: String,
    pub description: String,
    pub license: Iri,
    pub sources: Vec<CatalogueSource>,
    pub distributions: Vec<CatalogueDistribution>,
    /// `xsd:dateTime` lexical form.
    pub created: String,
}

impl Default for CatalogueConfig {
    fn default() -> Self {
        CatalogueConfig {
            title: "Iconographic and iconological knowledge graph".into(),
            description: "Artwork depictions re-engineered into leveled recognitions, enriched with symbolic interpretations.".into(),
            license: Iri::new(CC_BY_4).expect("valid"),
            sources: Vec::new(),
            distributions: Vec::new(),
            created: "1970-01-01T00:00:00Z".into(),
        }
    }
}

fn term(ns: &str, local: &str) -> Iri {
    Iri::new(format!("{ns}{local}")).expect("vocabulary IRIs are valid")
}

/// A DCAT-shaped description of the dataset.
pub fn emit_catalogue(config: &CatalogueConfig, profile: &VocabularyProfile) -> Vec<Triple> {
    let ns = &profile.namespace;
    let dataset = Iri::new(format!("{ns}dataset")).expect("valid");
    let rdf_type = Iri::new(RDF_TYPE).expect("valid");
    let mut out = vec![
        Triple::new(dataset.clone(), rdf_type.clone(), term(DCAT, "Dataset")),
        Triple::new(dataset.clone(), term(DCT, "title"), Literal::plain(config.title.clone())),
        Triple::new(dataset.clone(), term(DCT, "description"), Literal::plain(config.description.clone())),
        Triple::new(dataset.clone(), term(DCT, "license"), config.license.clone()),
        Triple::new(
            dataset.clone(),
            term(DCT, "created"),
            Literal::typed(config.created.clone(), Iri::new(XSD_DATE_TIME).expect("valid")),
        ),
    ];
    for s in &config.sources {
        let node = mint(ns, "source", &[&s.name, &s.location]);
        out.push(Triple::new(dataset.clone(), term(PROV, "wasDerivedFrom"), node.clone()));
        out.push(Triple::new(node.clone(), rdf_type.clone(), term(PROV, "Entity")));
        out.push(Triple::new(node.clone(), Iri::new(RDFS_LABEL).expect("valid"), Literal::plain(s.name.clone())));
        out.push(Triple::new(node, term(PROV, "atLocation"), Literal::plain(s.location.clone())));
    }
    for d in &config.distributions {
        let node = mint(ns, "distribution", &[&d.path]);
        let media = match d.format {
            Format::NTriples => "application/n-triples",
            Format::Turtle => "text/turtle",
        };
        out.push(Triple::new(dataset.clone(), term(DCAT, "distribution"), node.clone()));
        out.push(Triple::new(node.clone(), rdf_type.clone(), term(DCAT, "Distribution")));
        out.push(Triple::new(node.clone(), term(DCAT, "mediaType"), Literal::plain(media)));
        out.push(Triple::new(node, term(DCT, "title"), Literal::plain(d.path.clone())));
    }
    rdf::canonicalize(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Provenance;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn rec(level: InterpretationLevel) -> Recognition {
        Recognition::new(iri("http://a/1"), iri("http://e/1"), level, Provenance::SourceKG)
    }

    #[test]
    fn default_profile_is_complete() {
        let p = VocabularyProfile::default();
        p.validate(ProfileKind::Shortcut).unwrap();
        p.validate(ProfileKind::Full).unwrap();
        assert_eq!(p.namespace.as_str(), DEFAULT_NAMESPACE);
        assert_eq!(p.prefix, "iig");
    }

    #[test]
    fn one_pre_iconographic_shortcut_is_two_triples() {
        let r = rec(InterpretationLevel::level_only(Level::PreIconographic));
        let out = emit_shortcut([&r], [], &VocabularyProfile::default()).unwrap();
        assert_eq!(out.len(), 2);
        assert!(emit_shortcut([], [], &VocabularyProfile::default()).unwrap().is_empty());
    }

    #[test]
    fn full_recognition_footprint() {
        let p = VocabularyProfile::default();
        let mut r = rec(InterpretationLevel::of_class(IconClass::Character));
        assert_eq!(emit_full([&r], [], &p).unwrap().len(), 3);
        r.add_qualifier(RelationKind::Wears, QualifierTarget::Element(iri("http://e/crown")));
        let out = emit_full([&r], [], &p).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.iter().any(|t| &t.predicate == p.get("qualifier-wears").unwrap()));
    }

    #[test]
    fn missing_tag_is_reported() {
        let mut p = VocabularyProfile::default();
        p.remove("iconographic-depicts");
        let r = rec(InterpretationLevel::of_class(IconClass::Place));
        match emit_shortcut([&r], [], &p) {
            Err(EmitError::IncompleteProfile(tag)) => assert_eq!(tag, "iconographic-depicts"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn full_round_trip() {
        let p = VocabularyProfile::default();
        let mut a = rec(InterpretationLevel::of_class(IconClass::Character));
        a.add_qualifier(RelationKind::ExpressionGestureOrPose, QualifierTarget::Literal("smiling".into()));
        let b = Recognition::new(iri("http://a/2"), iri("http://e/2"), InterpretationLevel::level_only(Level::Iconological), Provenance::ParserHeuristic);
        let i = SymbolicInterpretation {
            artwork: iri("http://a/1"),
            symbol: iri("http://hr/cat"),
            meaning: iri("http://hr/divinity"),
            context: "Egyptian".into(),
            element: iri("http://e/1"),
            provenance: EnrichmentProvenance::AutomaticEnrichment,
        };
        let triples = emit_full([&a, &b], [&i], &p).unwrap();
        let parsed = rdf::parse_ntriples(&rdf::to_canonical_ntriples(&triples)).unwrap();
        let back = read_full(&parsed, &p).unwrap();
        assert_eq!(back.recognitions, [LogicalRecognition::from(&a), LogicalRecognition::from(&b)].into());
        assert_eq!(back.interpretations, [i].into());
    }

    #[test]
    fn turtle_uses_prefix() {
        let p = VocabularyProfile::default();
        let t = Triple::new(iri("https://w3id.org/iicongraph/data/promotionOfTourism"), iri(RDFS_LABEL), Literal::plain("x \"q\""));
        let ttl = to_turtle(&[t], &p);
        assert!(ttl.starts_with("@prefix iig: <https://w3id.org/iicongraph/data/> ."));
        assert!(ttl.contains("iig:promotionOfTourism <http://www.w3.org/2000/01/rdf-schema#label> \"x \\\"q\\\"\" ."));
    }

    #[test]
    fn catalogue_shape() {
        let p = VocabularyProfile::default();
        let mut c = CatalogueConfig::default();
        c.sources.push(CatalogueSource { name: "wikidata".into(), location: "depicts.tsv".into() });
        c.sources.push(CatalogueSource { name: "arco".into(), location: "descriptions.tsv".into() });
        let triples = emit_catalogue(&c, &p);
        let derived = triples.iter().filter(|t| t.predicate.as_str().ends_with("wasDerivedFrom")).count();
        assert_eq!(derived, 2);
        assert!(triples.iter().any(|t| t.object == Term::Iri(iri(CC_BY_4))));
        let text = rdf::to_canonical_ntriples(&triples);
        assert_eq!(rdf::parse_ntriples(&text).unwrap(), triples);
    }
}
