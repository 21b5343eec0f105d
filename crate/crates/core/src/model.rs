//! Shared domain vocabulary: identifiers, interpretation levels, depicted
//! elements and recognitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Namespace of the minted data IRIs (registered prefix `iig`).
pub const DEFAULT_NAMESPACE: &str = "https://w3id.org/iicongraph/data/";
pub const DEFAULT_PREFIX: &str = "iig";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("unknown interpretation level {0:?}")]
    UnknownLevel(String),
    #[error("unknown interpretation class {0:?}")]
    UnknownClass(String),
    #[error("class {class} does not belong to level {level}")]
    InconsistentClass { level: Level, class: IconClass },
}

/// An absolute IRI: non-empty, with a scheme separator and no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        let scheme_ok = match value.find(':') {
            Some(idx) if idx > 0 => {
                let scheme = &value[..idx];
                scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                    && scheme
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
            }
            _ => false,
        };
        if !scheme_ok
            || value
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
        {
            return Err(ModelError::InvalidIri(value));
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Joins a local name onto a namespace IRI.
    pub fn join(namespace: &Iri, local: &str) -> Result<Self, ModelError> {
        Iri::new(format!("{}{}", namespace.0, local))
    }

    /// Trailing segment after the last `/` or `#`.
    pub fn local_name(&self) -> &str {
        self.0
            .rsplit(|c| c == '/' || c == '#')
            .next()
            .unwrap_or(&self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Iri {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Iri::new(s)
    }
}

impl TryFrom<String> for Iri {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// The three interpretation levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    PreIconographic,
    Iconographic,
    Iconological,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::PreIconographic, Level::Iconographic, Level::Iconological];

    pub fn tag(self) -> &'static str {
        match self {
            Level::PreIconographic => "pre-iconographic",
            Level::Iconographic => "iconographic",
            Level::Iconological => "iconological",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Level {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match squash(s).as_str() {
            "preiconographic" | "preiconographical" => Ok(Level::PreIconographic),
            "iconographic" | "iconographical" => Ok(Level::Iconographic),
            "iconological" | "iconologic" => Ok(Level::Iconological),
            _ => Err(ModelError::UnknownLevel(s.to_string())),
        }
    }
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl Serialize for IconClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

/// Class of a recognised element within its level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IconClass {
    NaturalElement,
    Action,
    Expression,
    Character,
    Event,
    /// Stories and allegories alike.
    Story,
    Attribute,
    Place,
    Meaning,
    CulturalPhenomenon,
}

impl IconClass {
    pub const ALL: [IconClass; 10] = [
        IconClass::NaturalElement,
        IconClass::Action,
        IconClass::Expression,
        IconClass::Character,
        IconClass::Event,
        IconClass::Story,
        IconClass::Attribute,
        IconClass::Place,
        IconClass::Meaning,
        IconClass::CulturalPhenomenon,
    ];

    pub fn level(self) -> Level {
        use IconClass::*;
        match self {
            NaturalElement | Action | Expression => Level::PreIconographic,
            Character | Event | Story | Attribute | Place => Level::Iconographic,
            Meaning | CulturalPhenomenon => Level::Iconological,
        }
    }

    pub fn tag(self) -> &'static str {
        use IconClass::*;
        match self {
            NaturalElement => "natural-element",
            Action => "action",
            Expression => "expression",
            Character => "character",
            Event => "event",
            Story => "story",
            Attribute => "attribute",
            Place => "place",
            Meaning => "meaning",
            CulturalPhenomenon => "cultural-phenomenon",
        }
    }

    /// Parses a class name, also returning an annotation when the name is
    /// folded into another class (`allegory` becomes [`IconClass::Story`]).
    pub fn parse_annotated(s: &str) -> Result<(IconClass, Option<&'static str>), ModelError> {
        use IconClass::*;
        let class = match squash(s).trim_end_matches('s') {
            "naturalelement" => NaturalElement,
            "action" => Action,
            "expression" => Expression,
            "character" => Character,
            "event" => Event,
            "story" | "storie" => Story,
            "allegory" | "allegorie" => return Ok((Story, Some("allegory"))),
            "attribute" => Attribute,
            "place" => Place,
            "meaning" => Meaning,
            "culturalphenomenon" | "culturalphenomena" => CulturalPhenomenon,
            _ => return Err(ModelError::UnknownClass(s.to_string())),
        };
        Ok((class, None))
    }
}

impl fmt::Display for IconClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for IconClass {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IconClass::parse_annotated(s).map(|(c, _)| c)
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// A level plus, when known, the class inside that level.
///
/// The shortcut (catalogue text) path only knows the level of an element, so
/// the class is optional; when present it always belongs to the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct InterpretationLevel {
    level: Level,
    class: Option<IconClass>,
}

impl InterpretationLevel {
    pub fn new(level: Level, class: Option<IconClass>) -> Result<Self, ModelError> {
        match class {
            Some(c) if c.level() != level => Err(ModelError::InconsistentClass { level, class: c }),
            _ => Ok(InterpretationLevel { level, class }),
        }
    }

    pub fn of_class(class: IconClass) -> Self {
        InterpretationLevel { level: class.level(), class: Some(class) }
    }

    pub fn level_only(level: Level) -> Self {
        InterpretationLevel { level, class: None }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn class(&self) -> Option<IconClass> {
        self.class
    }

    /// `level` or `level/class`.
    pub fn tag(&self) -> String {
        match self.class {
            Some(c) => format!("{}/{}", self.level.tag(), c.tag()),
            None => self.level.tag().to_string(),
        }
    }
}

impl fmt::Display for InterpretationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for InterpretationLevel {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('/') {
            Some((level, class)) => InterpretationLevel::new(level.parse()?, Some(class.parse()?)),
            None => Ok(InterpretationLevel::level_only(s.parse()?)),
        }
    }
}

impl TryFrom<String> for InterpretationLevel {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<InterpretationLevel> for String {
    fn from(level: InterpretationLevel) -> Self {
        level.tag()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SourceKind {
    WikidataLike,
    ArCoLike,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artwork {
    pub id: Iri,
    pub label: String,
    pub source: SourceKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepictedElement {
    pub id: Iri,
    pub label: String,
    #[serde(default)]
    pub type_ids: BTreeSet<Iri>,
}

/// Element id → element, as collected while converting a corpus.
pub type ElementTable = BTreeMap<Iri, DepictedElement>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    Wears,
    ExpressionGestureOrPose,
    Symbolizes,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualifierTarget {
    Element(Iri),
    Literal(String),
}

impl QualifierTarget {
    /// IRIs become element targets, anything else a literal.
    pub fn from_value(value: &str) -> Self {
        match Iri::new(value) {
            Ok(iri) => QualifierTarget::Element(iri),
            Err(_) => QualifierTarget::Literal(value.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QualifierRelation {
    pub kind: RelationKind,
    pub target: QualifierTarget,
}

/// Trust order: `ParserHeuristic < SourceKG < ManualMapping`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    ParserHeuristic,
    SourceKG,
    ManualMapping,
}

/// A leveled interpretation statement about one element of one artwork.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Recognition {
    pub artwork: Iri,
    pub element: Iri,
    pub level: InterpretationLevel,
    #[serde(default)]
    pub qualifiers: BTreeSet<QualifierRelation>,
    pub provenance: Provenance,
    /// Free annotation, e.g. `allegory` for stories that are allegories.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
}

impl Recognition {
    pub fn new(artwork: Iri, element: Iri, level: InterpretationLevel, provenance: Provenance) -> Self {
        Recognition {
            artwork,
            element,
            level,
            qualifiers: BTreeSet::new(),
            provenance,
            annotation: None,
        }
    }

    /// Adds a qualifier relation. Iconological recognitions never carry
    /// qualifiers, so the relation is ignored for them and `false` returned.
    pub fn add_qualifier(&mut self, kind: RelationKind, target: QualifierTarget) -> bool {
        if self.level.level() == Level::Iconological {
            return false;
        }
        self.qualifiers.insert(QualifierRelation { kind, target })
    }

    pub fn key(&self) -> (&Iri, &Iri, &InterpretationLevel) {
        (&self.artwork, &self.element, &self.level)
    }
}

/// Collapses recognitions sharing `(artwork, element, level)`.
///
/// Qualifiers are unioned, the most trusted provenance wins and the smallest
/// annotation is kept. Qualifiers on iconological recognitions are dropped.
pub fn dedupe_recognitions<I>(recs: I) -> BTreeSet<Recognition>
where
    I: IntoIterator<Item = Recognition>,
{
    let mut merged: BTreeMap<(Iri, Iri, InterpretationLevel), Recognition> = BTreeMap::new();
    for mut rec in recs {
        if rec.level.level() == Level::Iconological {
            rec.qualifiers.clear();
        }
        let key = (rec.artwork.clone(), rec.element.clone(), rec.level);
        match merged.get_mut(&key) {
            Some(existing) => {
                existing.qualifiers.extend(rec.qualifiers);
                existing.provenance = existing.provenance.max(rec.provenance);
                existing.annotation = match (existing.annotation.take(), rec.annotation) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
            }
            None => {
                merged.insert(key, rec);
            }
        }
    }
    merged.into_values().collect()
}
