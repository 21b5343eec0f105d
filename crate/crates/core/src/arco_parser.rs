//! Rule-based parsing of catalogue descriptions into leveled elements and
//! iconological meanings.
//!
//! A description is processed in four steps:
//!
//! 1. the text after the reading marker (`Iconographic Reading:`) is cut out;
//! 2. the reading is segmented into `Category: content` pairs separated by
//!    `;` or `.`;
//! 3. the content of ordinary categories is split into element labels, which
//!    go to the iconographic level when they start with a capital letter and
//!    to the pre-iconographic level otherwise;
//! 4. the content of the iconological category (`Product category/type of
//!    event`) becomes a list of meaning phrases.
//!
//! The capital-letter rule has no exception for sentence-initial words.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Artwork, DepictedElement, IconClass, InterpretationLevel, Iri, Level, Provenance, Recognition, SourceKind,
    DEFAULT_NAMESPACE,
};
use crate::rdf::{self, RdfError};
use crate::tsv::{self, TsvError};

pub const DC_DESCRIPTION: &str = "http://purl.org/dc/elements/1.1/description";

#[derive(Debug, Error)]
pub enum ArcoError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<TsvError> for ArcoError {
    fn from(e: TsvError) -> Self {
        match e {
            TsvError::MissingHeader => ArcoError::MalformedRow { line: 1, reason: "missing header row".into() },
            TsvError::Malformed { line, reason } => ArcoError::MalformedRow { line, reason },
            TsvError::Io(e) => ArcoError::Io(e),
        }
    }
}

impl From<RdfError> for ArcoError {
    fn from(e: RdfError) -> Self {
        match e {
            RdfError::Syntax { line, reason } => ArcoError::MalformedRow { line, reason },
            RdfError::Io(e) => ArcoError::Io(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MintError {
    #[error("phrase has no alphanumeric content")]
    EmptyPhrase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParserConfig {
    /// Markers preceding the reading; the earliest occurrence of any wins.
    pub reading_markers: Vec<String>,
    /// Category names whose content holds iconological meanings.
    pub iconological_categories: Vec<String>,
    /// Categories ignored entirely.
    pub ambiguous_categories: Vec<String>,
    pub namespace: Iri,
}

impl Default for ParserConfig {
    fn default() -> Self {
        ParserConfig {
            reading_markers: vec!["Iconographic Reading:".into(), "Lettura Iconografica:".into()],
            iconological_categories: vec![
                "Product category/type of event".into(),
                "Categoria Merceologica/tipo di evento".into(),
            ],
            ambiguous_categories: Vec::new(),
            namespace: Iri::new(DEFAULT_NAMESPACE).expect("default namespace is valid"),
        }
    }
}

/// Hook for translating descriptions before parsing.
pub trait Translator: Sync {
    fn translate<'a>(&self, text: &'a str) -> Cow<'a, str>;
}

/// Passes text through unchanged; inputs are expected pre-translated.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTranslator;

impl Translator for IdentityTranslator {
    fn translate<'a>(&self, text: &'a str) -> Cow<'a, str> {
        Cow::Borrowed(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDescription {
    pub artwork: Iri,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    NoReadingMarker,
    NoCategoryHeader,
    EmptyCategory,
    UnbalancedHeader,
}

impl DiscardReason {
    pub fn tag(self) -> &'static str {
        match self {
            DiscardReason::NoReadingMarker => "no_reading_marker",
            DiscardReason::NoCategoryHeader => "no_category_header",
            DiscardReason::EmptyCategory => "empty_category",
            DiscardReason::UnbalancedHeader => "unbalanced_header",
        }
    }
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub category: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum ParseStatus {
    Conforming,
    Discarded(DiscardReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    pub segments: Vec<Segment>,
    /// Header-less fragments after a `.`, kept out of every category.
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedDescription {
    pub artwork: Iri,
    #[serde(flatten)]
    pub status: ParseStatus,
    pub segments: Vec<Segment>,
    pub pre_iconographic: Vec<String>,
    pub iconographic: Vec<String>,
    pub iconological: Vec<String>,
    pub warnings: Vec<String>,
}

impl ParsedDescription {
    fn discarded(artwork: Iri, reason: DiscardReason) -> Self {
        ParsedDescription {
            artwork,
            status: ParseStatus::Discarded(reason),
            segments: Vec::new(),
            pre_iconographic: Vec::new(),
            iconographic: Vec::new(),
            iconological: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn is_conforming(&self) -> bool {
        self.status == ParseStatus::Conforming
    }
}

/// Text after the first reading marker, trimmed; `None` when absent or empty.
pub fn extract_reading<'a>(text: &'a str, config: &ParserConfig) -> Option<&'a str> {
    let (pos, marker) = config
        .reading_markers
        .iter()
        .filter(|m| !m.is_empty())
        .filter_map(|m| text.find(m.as_str()).map(|p| (p, m.len())))
        .min_by_key(|(p, _)| *p)?;
    let rest = text[pos + marker..].trim();
    (!rest.is_empty()).then_some(rest)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Terminator {
    Semicolon,
    Period,
    End,
}

fn split_chunks(reading: &str) -> Vec<(&str, Terminator)> {
    let mut chunks = Vec::new();
    let mut start = 0;
    let mut iter = reading.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        let term = match c {
            ';' => Some(Terminator::Semicolon),
            '.' if iter.peek().is_none_or(|(_, n)| n.is_whitespace()) => Some(Terminator::Period),
            _ => None,
        };
        if let Some(term) = term {
            chunks.push((&reading[start..i], term));
            start = i + c.len_utf8();
        }
    }
    chunks.push((&reading[start..], Terminator::End));
    chunks
}

/// Splits a reading into `(category, content)` segments.
///
/// Grammar: `Header: content` chunks separated by `;` or by `.` followed by
/// whitespace. A header-less chunk after `;` continues the previous
/// category; one after `.` is set aside as a warning. The reading is
/// discarded when it does not open with a header, when a category or header
/// is empty, or when a chunk holds more than one `:`.
pub fn segment_categories(reading: &str) -> Result<Segmentation, DiscardReason> {
    let chunks = split_chunks(reading);
    let mut out = Segmentation { segments: Vec::new(), warnings: Vec::new() };
    let mut previous = Terminator::End;
    let mut in_warning = false;
    let last = chunks.len() - 1;
    for (idx, (raw, term)) in chunks.into_iter().enumerate() {
        let chunk = raw.trim();
        if chunk.is_empty() {
            if idx == last || (idx + 1 == last && term == Terminator::Period) {
                previous = term;
                continue;
            }
            return Err(if out.segments.is_empty() { DiscardReason::NoCategoryHeader } else { DiscardReason::EmptyCategory });
        }
        match chunk.split_once(':') {
            Some((header, content)) => {
                let (header, content) = (header.trim(), content.trim());
                if header.is_empty() || content.contains(':') {
                    return Err(DiscardReason::UnbalancedHeader);
                }
                if content.is_empty() {
                    return Err(DiscardReason::EmptyCategory);
                }
                out.segments.push(Segment { category: header.to_string(), content: content.to_string() });
                in_warning = false;
            }
            None => {
                if out.segments.is_empty() {
                    return Err(DiscardReason::NoCategoryHeader);
                }
                if previous == Terminator::Semicolon {
                    if in_warning {
                        let w = out.warnings.last_mut().expect("warning state implies a warning");
                        w.push_str("; ");
                        w.push_str(chunk);
                    } else {
                        let seg = out.segments.last_mut().expect("segments checked non-empty");
                        seg.content.push_str("; ");
                        seg.content.push_str(chunk);
                    }
                } else {
                    out.warnings.push(chunk.to_string());
                    in_warning = true;
                }
            }
        }
        previous = term;
    }
    if out.segments.is_empty() {
        return Err(DiscardReason::NoCategoryHeader);
    }
    Ok(out)
}

static TOKEN_SPLIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s*[,;]\s*|\s+and\s+").unwrap());

fn clean_token(t: &str) -> &str {
    t.trim().trim_matches(|c: char| matches!(c, '"' | '(' | ')' | '[' | ']' | '.') || c.is_whitespace())
}

/// Splits an element list on commas, semicolons and the word `and`; tokens
/// whose first letter is uppercase are iconographic, the rest
/// pre-iconographic. Tokens are never split on whitespace, so runs of
/// capitalised words (`Noah's Ark`) stay one token.
pub fn classify_tokens(content: &str) -> (Vec<String>, Vec<String>) {
    let mut pre = Vec::new();
    let mut icon = Vec::new();
    for token in TOKEN_SPLIT.split(content).map(clean_token).filter(|t| !t.is_empty()) {
        let capital = token.chars().find(|c| c.is_alphabetic()).is_some_and(char::is_uppercase);
        let list = if capital { &mut icon } else { &mut pre };
        if !list.iter().any(|t| t == token) {
            list.push(token.to_string());
        }
    }
    (pre, icon)
}

fn normalize_category(c: &str) -> String {
    c.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn category_in(category: &str, list: &[String]) -> bool {
    let c = normalize_category(category);
    list.iter().any(|l| normalize_category(l) == c)
}

/// Meaning phrases of the iconological category, in order; empty when the
/// category is absent.
pub fn extract_iconological(segments: &[Segment], config: &ParserConfig) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for seg in segments {
        if category_in(&seg.category, &config.ambiguous_categories)
            || !category_in(&seg.category, &config.iconological_categories)
        {
            continue;
        }
        for phrase in seg.content.split(';').map(clean_token).filter(|p| !p.is_empty()) {
            if !out.iter().any(|p| p == phrase) {
                out.push(phrase.to_string());
            }
        }
    }
    out
}

/// camelCase local name: ASCII-transliterated, lowercased, split on
/// non-alphanumerics, words after the first capitalised.
pub fn mint_local_name(phrase: &str) -> Result<String, MintError> {
    let ascii = deunicode::deunicode(phrase).to_lowercase();
    let mut out = String::new();
    for word in ascii.split(|c: char| !c.is_ascii_alphanumeric()).filter(|w| !w.is_empty()) {
        if out.is_empty() {
            out.push_str(word);
        } else {
            let mut chars = word.chars();
            if let Some(first) = chars.next() {
                out.push(first.to_ascii_uppercase());
                out.push_str(chars.as_str());
            }
        }
    }
    if out.is_empty() {
        Err(MintError::EmptyPhrase)
    } else {
        Ok(out)
    }
}

/// Local name for an iconological meaning phrase, e.g.
/// `promotion of tourism` → `promotionOfTourism`.
pub fn mint_meaning_id(phrase: &str) -> Result<String, MintError> {
    mint_local_name(phrase)
}

pub fn meaning_iri(phrase: &str, namespace: &Iri) -> Result<Iri, MintError> {
    let local = mint_meaning_id(phrase)?;
    Ok(Iri::join(namespace, &local).expect("minted names are IRI-safe"))
}

/// Element ids are minted from the label so equal labels share one id.
pub fn element_iri(label: &str, namespace: &Iri) -> Result<Iri, MintError> {
    let local = mint_local_name(label)?;
    Ok(Iri::join(namespace, &format!("element/{local}")).expect("minted names are IRI-safe"))
}

pub fn parse_description(desc: &RawDescription, config: &ParserConfig) -> ParsedDescription {
    parse_description_with(desc, config, &IdentityTranslator)
}

pub fn parse_description_with(desc: &RawDescription, config: &ParserConfig, translator: &dyn Translator) -> ParsedDescription {
    let text = translator.translate(&desc.text);
    let Some(reading) = extract_reading(&text, config) else {
        return ParsedDescription::discarded(desc.artwork.clone(), DiscardReason::NoReadingMarker);
    };
    let seg = match segment_categories(reading) {
        Ok(s) => s,
        Err(reason) => return ParsedDescription::discarded(desc.artwork.clone(), reason),
    };
    let iconological = extract_iconological(&seg.segments, config);
    let mut pre: Vec<String> = Vec::new();
    let mut icon: Vec<String> = Vec::new();
    for s in &seg.segments {
        if category_in(&s.category, &config.ambiguous_categories)
            || category_in(&s.category, &config.iconological_categories)
        {
            continue;
        }
        let (p, i) = classify_tokens(&s.content);
        for t in p {
            if !pre.contains(&t) && !iconological.contains(&t) {
                pre.push(t);
            }
        }
        for t in i {
            if !icon.contains(&t) && !iconological.contains(&t) {
                icon.push(t);
            }
        }
    }
    ParsedDescription {
        artwork: desc.artwork.clone(),
        status: ParseStatus::Conforming,
        segments: seg.segments,
        pre_iconographic: pre,
        iconographic: icon,
        iconological,
        warnings: seg.warnings,
    }
}

/// Parses descriptions in parallel; output order follows input order.
pub fn parse_batch(descs: &[RawDescription], config: &ParserConfig) -> Vec<ParsedDescription> {
    descs.par_iter().map(|d| parse_description(d, config)).collect()
}

/// Recognitions, elements and the artwork record for a conforming parse.
pub fn to_recognitions(parsed: &ParsedDescription, namespace: &Iri) -> (Vec<Recognition>, Vec<DepictedElement>) {
    let mut recs = Vec::new();
    let mut elements = Vec::new();
    if !parsed.is_conforming() {
        return (recs, elements);
    }
    let groups = [
        (&parsed.pre_iconographic, InterpretationLevel::level_only(Level::PreIconographic), true),
        (&parsed.iconographic, InterpretationLevel::level_only(Level::Iconographic), true),
        (&parsed.iconological, InterpretationLevel::of_class(IconClass::Meaning), false),
    ];
    for (labels, level, is_element) in groups {
        for label in labels {
            let id = if is_element { element_iri(label, namespace) } else { meaning_iri(label, namespace) };
            let Ok(id) = id else { continue };
            elements.push(DepictedElement { id: id.clone(), label: label.clone(), type_ids: BTreeSet::new() });
            recs.push(Recognition::new(parsed.artwork.clone(), id, level, Provenance::ParserHeuristic));
        }
    }
    (recs, elements)
}

pub fn artwork_record(parsed: &ParsedDescription) -> Artwork {
    Artwork { id: parsed.artwork.clone(), label: String::new(), source: SourceKind::ArCoLike }
}

/// Reads `artwork_iri \t description_text` rows (header required).
pub fn read_descriptions_tsv<R: BufRead>(reader: R) -> Result<Vec<RawDescription>, ArcoError> {
    let mut out = Vec::new();
    for row in tsv::Reader::new(reader)? {
        let row = row?;
        if row.fields.len() != 2 {
            return Err(ArcoError::MalformedRow { line: row.line, reason: "expected 2 columns".into() });
        }
        let artwork = Iri::new(row.fields[0].trim())
            .map_err(|e| ArcoError::MalformedRow { line: row.line, reason: e.to_string() })?;
        if row.fields[1].trim().is_empty() {
            return Err(ArcoError::MalformedRow { line: row.line, reason: "empty description".into() });
        }
        out.push(RawDescription { artwork, text: row.fields[1].clone() });
    }
    Ok(out)
}

/// Reads descriptions from N-Triples, keeping literals of `predicate`.
pub fn read_descriptions_ntriples<R: BufRead>(reader: R, predicate: &Iri) -> Result<Vec<RawDescription>, ArcoError> {
    let mut out = Vec::new();
    for t in rdf::read_ntriples(reader) {
        let t = t?;
        if &t.predicate != predicate {
            continue;
        }
        if let rdf::Term::Literal(l) = t.object {
            if !l.lexical.trim().is_empty() {
                out.push(RawDescription { artwork: t.subject, text: l.lexical });
            }
        }
    }
    Ok(out)
}

/// One JSON object per line, fields in declaration order.
pub fn write_parsed_jsonl<'a, W: Write, I: IntoIterator<Item = &'a ParsedDescription>>(out: &mut W, parsed: I) -> std::io::Result<()> {
    for p in parsed {
        serde_json::to_writer(&mut *out, p)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_discard_report<'a, W: Write, I: IntoIterator<Item = &'a ParsedDescription>>(out: &mut W, parsed: I) -> std::io::Result<()> {
    tsv::write_row(out, &["artwork_iri", "reason"])?;
    for p in parsed {
        if let ParseStatus::Discarded(reason) = p.status {
            tsv::write_row(out, &[p.artwork.as_str(), reason.tag()])?;
        }
    }
    Ok(())
}
