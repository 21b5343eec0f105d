//! Acquisition of raw depiction statements: dump readers (TSV and a
//! Wikidata-shaped N-Triples subset) and a paginated SPARQL client.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};
use std::thread;
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use crate::model::Iri;
use crate::rdf::{self, RdfError, Term, RDFS_LABEL};
use crate::tsv::{self, TsvError};

pub const ENDPOINT_ENV: &str = "IICONFORGE_ENDPOINT";

pub const WDT: &str = "http://www.wikidata.org/prop/direct/";
pub const WD_P: &str = "http://www.wikidata.org/prop/";
pub const WD_PS: &str = "http://www.wikidata.org/prop/statement/";
pub const WD_PQ: &str = "http://www.wikidata.org/prop/qualifier/";

pub const DEPICTS_TSV_HEADER: [&str; 7] = [
    "artwork_iri",
    "artwork_label",
    "element_iri",
    "element_label",
    "type_iris",
    "qualifier_kind",
    "qualifier_value",
];

#[derive(Debug, Error)]
pub enum HarvestError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("unknown dump format {0:?}")]
    UnknownFormat(String),
    #[error("endpoint unreachable after {attempts} attempts: {last_error}")]
    EndpointUnreachable { attempts: u32, last_error: String },
    #[error("malformed response for page {page}: {reason}")]
    MalformedResponse { page: usize, reason: String },
    #[error("query rejected with HTTP status {status}: {body}")]
    QueryRejected { status: u16, body: String },
    #[error("invalid endpoint configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<TsvError> for HarvestError {
    fn from(e: TsvError) -> Self {
        match e {
            TsvError::MissingHeader => HarvestError::MalformedRow { line: 1, reason: "missing header row".into() },
            TsvError::Malformed { line, reason } => HarvestError::MalformedRow { line, reason },
            TsvError::Io(e) => HarvestError::Io(e),
        }
    }
}

impl From<RdfError> for HarvestError {
    fn from(e: RdfError) -> Self {
        match e {
            RdfError::Syntax { line, reason } => HarvestError::MalformedRow { line, reason },
            RdfError::Io(e) => HarvestError::Io(e),
        }
    }
}

/// Qualifier kinds recognised at ingest. Anything else passes through as
/// [`QualifierKind::Other`] with its original tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QualifierKind {
    /// wears (P3828)
    Wears,
    /// expression, gesture or body pose (P6022)
    ExpressionGestureOrPose,
    /// symbolizes (P4878)
    Symbolizes,
    Other(String),
}

impl QualifierKind {
    pub fn from_tag(tag: &str) -> Self {
        let tag = tag.trim();
        let local = tag.rsplit(['/', '#']).next().unwrap_or(tag);
        match local.to_ascii_lowercase().as_str() {
            "wears" | "p3828" => QualifierKind::Wears,
            "expression_gesture_or_pose" | "expression" | "gesture" | "pose" | "p6022" => {
                QualifierKind::ExpressionGestureOrPose
            }
            "symbolizes" | "p4878" => QualifierKind::Symbolizes,
            _ => QualifierKind::Other(tag.to_string()),
        }
    }

    pub fn tag(&self) -> &str {
        match self {
            QualifierKind::Wears => "wears",
            QualifierKind::ExpressionGestureOrPose => "expression_gesture_or_pose",
            QualifierKind::Symbolizes => "symbolizes",
            QualifierKind::Other(t) => t,
        }
    }

    fn property_id(&self) -> Option<&'static str> {
        match self {
            QualifierKind::Wears => Some("P3828"),
            QualifierKind::ExpressionGestureOrPose => Some("P6022"),
            QualifierKind::Symbolizes => Some("P4878"),
            QualifierKind::Other(_) => None,
        }
    }
}

impl fmt::Display for QualifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Qualifier {
    pub kind: QualifierKind,
    /// IRI or literal value.
    pub value: String,
}

/// One `depicts` statement of an artwork with the depicted element's types.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DepictsStatement {
    pub artwork: Iri,
    pub artwork_label: String,
    pub element: Iri,
    pub element_label: String,
    pub element_types: BTreeSet<Iri>,
    pub qualifiers: BTreeSet<Qualifier>,
}

impl DepictsStatement {
    pub fn new(artwork: Iri, element: Iri) -> Self {
        DepictsStatement {
            artwork,
            artwork_label: String::new(),
            element,
            element_label: String::new(),
            element_types: BTreeSet::new(),
            qualifiers: BTreeSet::new(),
        }
    }

    /// Identity used for stream deduplication.
    pub fn key(&self) -> (Iri, Iri, BTreeSet<Qualifier>) {
        (self.artwork.clone(), self.element.clone(), self.qualifiers.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    Tsv,
    NTriplesSubset,
}

impl std::str::FromStr for DumpFormat {
    type Err = HarvestError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(DumpFormat::Tsv),
            "nt" | "ntriples" | "n-triples" | "ntriples-subset" => Ok(DumpFormat::NTriplesSubset),
            _ => Err(HarvestError::UnknownFormat(s.to_string())),
        }
    }
}

/// Reads a dump in the given format. TSV is streamed lazily; the N-Triples
/// subset has to be grouped by statement node and is materialised first.
pub fn read_depicts_dump<R: BufRead + 'static>(
    reader: R,
    format: DumpFormat,
) -> Result<Box<dyn Iterator<Item = Result<DepictsStatement, HarvestError>>>, HarvestError> {
    Ok(match format {
        DumpFormat::Tsv => Box::new(DepictsTsvReader::new(reader)?),
        DumpFormat::NTriplesSubset => Box::new(read_depicts_ntriples(reader)?.into_iter().map(Ok)),
    })
}

/// Lazy reader for the depicts TSV. Consecutive rows sharing
/// `(artwork, element)` are one statement carrying several qualifiers.
pub struct DepictsTsvReader<R> {
    rows: tsv::Reader<R>,
    pending: Option<(usize, DepictsStatement)>,
    rows_read: usize,
    failed: bool,
}

impl<R: BufRead> DepictsTsvReader<R> {
    pub fn new(reader: R) -> Result<Self, HarvestError> {
        let rows = tsv::Reader::new(reader)?;
        if rows.header().len() < 5 {
            return Err(HarvestError::MalformedRow { line: 1, reason: "header needs at least 5 columns".into() });
        }
        Ok(DepictsTsvReader { rows, pending: None, rows_read: 0, failed: false })
    }

    /// Physical rows consumed so far (header excluded).
    pub fn rows_read(&self) -> usize {
        self.rows_read
    }

    fn parse_row(row: &tsv::Row) -> Result<DepictsStatement, HarvestError> {
        let bad = |reason: &str| HarvestError::MalformedRow { line: row.line, reason: reason.to_string() };
        let f = &row.fields;
        if f.len() < 5 || f.len() > 7 {
            return Err(bad("expected 5 to 7 columns"));
        }
        let iri = |value: &str, what: &str| {
            if value.trim().is_empty() {
                return Err(bad(&format!("empty {what} IRI")));
            }
            Iri::new(value.trim()).map_err(|e| bad(&format!("{what}: {e}")))
        };
        let mut stmt = DepictsStatement::new(iri(&f[0], "artwork")?, iri(&f[2], "element")?);
        stmt.artwork_label = f[1].clone();
        stmt.element_label = f[3].clone();
        for t in f[4].split('|').filter(|t| !t.trim().is_empty()) {
            stmt.element_types.insert(iri(t, "type")?);
        }
        let kind = f.get(5).map(|s| s.trim()).unwrap_or("");
        let value = f.get(6).map(|s| s.as_str()).unwrap_or("");
        match (kind.is_empty(), value.is_empty()) {
            (true, true) => {}
            (false, false) => {
                stmt.qualifiers.insert(Qualifier { kind: QualifierKind::from_tag(kind), value: value.to_string() });
            }
            _ => return Err(bad("qualifier kind and value must both be present or both empty")),
        }
        Ok(stmt)
    }
}

impl<R: BufRead> Iterator for DepictsTsvReader<R> {
    type Item = Result<DepictsStatement, HarvestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let row = match self.rows.next() {
                None => return self.pending.take().map(|(_, s)| Ok(s)),
                Some(Err(e)) => {
                    self.failed = true;
                    return Some(Err(e.into()));
                }
                Some(Ok(row)) => row,
            };
            self.rows_read += 1;
            let stmt = match Self::parse_row(&row) {
                Ok(s) => s,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            };
            match &mut self.pending {
                Some((_, cur)) if cur.artwork == stmt.artwork && cur.element == stmt.element => {
                    cur.element_types.extend(stmt.element_types);
                    cur.qualifiers.extend(stmt.qualifiers);
                }
                _ => {
                    let done = self.pending.replace((row.line, stmt));
                    if let Some((_, s)) = done {
                        return Some(Ok(s));
                    }
                }
            }
        }
    }
}

/// Writes statements in the depicts TSV layout, one row per qualifier.
pub fn write_depicts_tsv<'a, W, I>(out: &mut W, stmts: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a DepictsStatement>,
{
    tsv::write_row(out, &DEPICTS_TSV_HEADER)?;
    for s in stmts {
        let types = s.element_types.iter().map(Iri::as_str).collect::<Vec<_>>().join("|");
        let base = [s.artwork.as_str(), &s.artwork_label, s.element.as_str(), &s.element_label, &types];
        if s.qualifiers.is_empty() {
            let mut row: Vec<&str> = base.to_vec();
            row.extend(["", ""]);
            tsv::write_row(out, &row)?;
        }
        for q in &s.qualifiers {
            let mut row: Vec<&str> = base.to_vec();
            row.extend([q.kind.tag(), q.value.as_str()]);
            tsv::write_row(out, &row)?;
        }
    }
    Ok(())
}

/// Reads the Wikidata-shaped N-Triples subset:
///
/// ```text
/// <artwork> wdt:P180 <element> .                 # statement without qualifiers
/// <artwork> p:P180 <stmt> . <stmt> ps:P180 <element> . <stmt> pq:P3828 <item> .
/// <x> rdfs:label "..." .   <element> wdt:P31|wdt:P279 <type> .
/// ```
///
/// A truthy `wdt:P180` pair is dropped when a statement node covers the same
/// pair. Output order is the order in which statements first appear.
pub fn read_depicts_ntriples<R: BufRead>(reader: R) -> Result<Vec<DepictsStatement>, HarvestError> {
    let depicts = format!("{WDT}P180");
    let p_depicts = format!("{WD_P}P180");
    let ps_depicts = format!("{WD_PS}P180");
    let instance_of = format!("{WDT}P31");
    let subclass_of = format!("{WDT}P279");

    let mut labels: BTreeMap<Iri, String> = BTreeMap::new();
    let mut types: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    // (artwork, element or statement node, is statement node) in file order
    let mut order: Vec<(Iri, Iri, bool)> = Vec::new();
    let mut node_element: BTreeMap<Iri, Iri> = BTreeMap::new();
    let mut node_quals: BTreeMap<Iri, BTreeSet<Qualifier>> = BTreeMap::new();

    for t in rdf::read_ntriples(reader) {
        let t = t?;
        let p = t.predicate.as_str();
        let obj_iri = |line_hint: &str| {
            t.object.as_iri().cloned().ok_or_else(|| HarvestError::MalformedRow {
                line: 0,
                reason: format!("{line_hint} object must be an IRI in {}", t.to_ntriples()),
            })
        };
        if p == RDFS_LABEL {
            if let Term::Literal(l) = &t.object {
                labels.entry(t.subject.clone()).or_insert_with(|| l.lexical.clone());
            }
        } else if p == depicts {
            order.push((t.subject.clone(), obj_iri("depicts")?, false));
        } else if p == p_depicts {
            order.push((t.subject.clone(), obj_iri("statement")?, true));
        } else if p == ps_depicts {
            node_element.entry(t.subject.clone()).or_insert(obj_iri("statement value")?);
        } else if p == instance_of || p == subclass_of {
            types.entry(t.subject.clone()).or_default().insert(obj_iri("type")?);
        } else if let Some(prop) = p.strip_prefix(WD_PQ) {
            node_quals
                .entry(t.subject.clone())
                .or_default()
                .insert(Qualifier { kind: QualifierKind::from_tag(prop), value: t.object.value().to_string() });
        }
    }

    let mut covered: HashSet<(Iri, Iri)> = HashSet::new();
    let mut resolved: Vec<(Iri, Iri, BTreeSet<Qualifier>, bool)> = Vec::new();
    for (artwork, target, is_node) in order {
        if is_node {
            let element = node_element.get(&target).cloned().ok_or_else(|| HarvestError::MalformedRow {
                line: 0,
                reason: format!("statement node {target} has no ps:P180 value"),
            })?;
            covered.insert((artwork.clone(), element.clone()));
            resolved.push((artwork, element, node_quals.remove(&target).unwrap_or_default(), true));
        } else {
            resolved.push((artwork, target, BTreeSet::new(), false));
        }
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (artwork, element, qualifiers, is_node) in resolved {
        if !is_node && covered.contains(&(artwork.clone(), element.clone())) {
            continue;
        }
        let stmt = DepictsStatement {
            artwork_label: labels.get(&artwork).cloned().unwrap_or_default(),
            element_label: labels.get(&element).cloned().unwrap_or_default(),
            element_types: types.get(&element).cloned().unwrap_or_default(),
            artwork,
            element,
            qualifiers,
        };
        if seen.insert(stmt.key()) {
            out.push(stmt);
        }
    }
    Ok(out)
}

/// Writes statements in the N-Triples subset accepted by
/// [`read_depicts_ntriples`]. Statement nodes are minted under `node_base`.
pub fn write_depicts_ntriples<'a, W, I>(out: &mut W, stmts: I, node_base: &str) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a DepictsStatement>,
{
    let iri = |s: String| Iri::new(s).expect("predicate IRIs are valid");
    for (i, s) in stmts.into_iter().enumerate() {
        let mut lines = Vec::new();
        if !s.artwork_label.is_empty() {
            lines.push(rdf::Triple::new(s.artwork.clone(), iri(RDFS_LABEL.into()), rdf::Literal::plain(s.artwork_label.clone())));
        }
        if !s.element_label.is_empty() {
            lines.push(rdf::Triple::new(s.element.clone(), iri(RDFS_LABEL.into()), rdf::Literal::plain(s.element_label.clone())));
        }
        for t in &s.element_types {
            lines.push(rdf::Triple::new(s.element.clone(), iri(format!("{WDT}P31")), t.clone()));
        }
        if s.qualifiers.is_empty() {
            lines.push(rdf::Triple::new(s.artwork.clone(), iri(format!("{WDT}P180")), s.element.clone()));
        } else {
            let node = iri(format!("{node_base}S{i}"));
            lines.push(rdf::Triple::new(s.artwork.clone(), iri(format!("{WD_P}P180")), node.clone()));
            lines.push(rdf::Triple::new(node.clone(), iri(format!("{WD_PS}P180")), s.element.clone()));
            for q in &s.qualifiers {
                let prop = q.kind.property_id().unwrap_or(q.kind.tag());
                let pred = iri(format!("{WD_PQ}{prop}"));
                let obj: Term = match Iri::new(&q.value) {
                    Ok(v) => v.into(),
                    Err(_) => rdf::Literal::plain(q.value.clone()).into(),
                };
                lines.push(rdf::Triple::new(node.clone(), pred, obj));
            }
        }
        for l in lines {
            writeln!(out, "{}", l.to_ntriples())?;
        }
    }
    Ok(())
}

/// Connection settings for a SPARQL endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointConfig {
    pub endpoint_url: String,
    pub page_size: usize,
    pub max_retries: u32,
    pub request_timeout: Duration,
    pub user_agent: String,
    /// First retry delay; doubles on every further attempt.
    pub backoff_base: Duration,
}

impl EndpointConfig {
    pub fn new(endpoint_url: impl Into<String>) -> Self {
        EndpointConfig {
            endpoint_url: endpoint_url.into(),
            page_size: 10_000,
            max_retries: 3,
            request_timeout: Duration::from_secs(60),
            user_agent: format!("iiconforge/{} (depiction harvester)", env!("CARGO_PKG_VERSION")),
            backoff_base: Duration::from_millis(500),
        }
    }

    /// Replaces the endpoint with `IICONFORGE_ENDPOINT` when set.
    pub fn with_env_override(mut self) -> Self {
        if let Ok(url) = std::env::var(ENDPOINT_ENV) {
            if !url.trim().is_empty() {
                self.endpoint_url = url.trim().to_string();
            }
        }
        self
    }

    pub fn validate(&self) -> Result<(), HarvestError> {
        if self.page_size == 0 {
            return Err(HarvestError::InvalidConfig("page_size must be at least 1".into()));
        }
        if self.request_timeout.is_zero() {
            return Err(HarvestError::InvalidConfig("request_timeout must be positive".into()));
        }
        if !(self.endpoint_url.starts_with("http://") || self.endpoint_url.starts_with("https://")) {
            return Err(HarvestError::InvalidConfig(format!("endpoint must be an http(s) URL: {}", self.endpoint_url)));
        }
        Ok(())
    }
}

pub const LIMIT_PLACEHOLDER: &str = "{{limit}}";
pub const OFFSET_PLACEHOLDER: &str = "{{offset}}";

/// Paintings with their depicted elements, element types and the three
/// interpretation qualifiers. A reconstruction; override it per run when the
/// target endpoint differs from Wikidata.
pub const DEFAULT_QUERY_TEMPLATE: &str = r#"PREFIX wd: <http://www.wikidata.org/entity/>
PREFIX wdt: <http://www.wikidata.org/prop/direct/>
PREFIX p: <http://www.wikidata.org/prop/>
PREFIX ps: <http://www.wikidata.org/prop/statement/>
PREFIX pq: <http://www.wikidata.org/prop/qualifier/>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
SELECT ?artwork ?artworkLabel ?element ?elementLabel
       (GROUP_CONCAT(DISTINCT STR(?type); separator="|") AS ?types)
       ?qualKind ?qualValue
WHERE {
  ?artwork wdt:P31 wd:Q3305213 ;
           p:P180 ?stmt .
  ?stmt ps:P180 ?element .
  OPTIONAL { ?artwork rdfs:label ?artworkLabel . FILTER(LANG(?artworkLabel) = "en") }
  OPTIONAL { ?element rdfs:label ?elementLabel . FILTER(LANG(?elementLabel) = "en") }
  OPTIONAL { ?element wdt:P31|wdt:P279 ?type . }
  OPTIONAL {
    VALUES (?qualProp ?qualKind) {
      (pq:P3828 "wears") (pq:P6022 "expression_gesture_or_pose") (pq:P4878 "symbolizes")
    }
    ?stmt ?qualProp ?qualValue .
  }
}
GROUP BY ?artwork ?artworkLabel ?element ?elementLabel ?qualKind ?qualValue
ORDER BY ?artwork ?element ?qualKind ?qualValue
LIMIT {{limit}} OFFSET {{offset}}"#;

#[derive(Debug, Deserialize)]
struct SparqlResults {
    results: SparqlBindings,
}

#[derive(Debug, Deserialize)]
struct SparqlBindings {
    bindings: Vec<BTreeMap<String, SparqlValue>>,
}

#[derive(Debug, Deserialize)]
struct SparqlValue {
    value: String,
}

/// Starts a lazy paginated fetch. Pages are requested with LIMIT/OFFSET until
/// a page returns fewer rows than `page_size`.
pub fn fetch_depicts(cfg: &EndpointConfig, query_template: &str) -> Result<DepictsFetch, HarvestError> {
    cfg.validate()?;
    if !query_template.contains(LIMIT_PLACEHOLDER) || !query_template.contains(OFFSET_PLACEHOLDER) {
        return Err(HarvestError::InvalidConfig(format!(
            "query template must contain {LIMIT_PLACEHOLDER} and {OFFSET_PLACEHOLDER}"
        )));
    }
    let agent = ureq::AgentBuilder::new()
        .timeout(cfg.request_timeout)
        .user_agent(&cfg.user_agent)
        .build();
    Ok(DepictsFetch {
        agent,
        cfg: cfg.clone(),
        template: query_template.to_string(),
        buffer: VecDeque::new(),
        offset: 0,
        page: 0,
        exhausted: false,
        failed: false,
        seen: HashSet::new(),
        retries: 0,
    })
}

/// Iterator over fetched statements; duplicates are suppressed.
pub struct DepictsFetch {
    agent: ureq::Agent,
    cfg: EndpointConfig,
    template: String,
    buffer: VecDeque<DepictsStatement>,
    offset: usize,
    page: usize,
    exhausted: bool,
    failed: bool,
    seen: HashSet<(Iri, Iri, BTreeSet<Qualifier>)>,
    retries: u32,
}

impl DepictsFetch {
    /// Total retried requests so far.
    pub fn retries(&self) -> u32 {
        self.retries
    }

    pub fn pages_fetched(&self) -> usize {
        self.page
    }

    fn request_page(&mut self) -> Result<String, HarvestError> {
        let query = self
            .template
            .replace(LIMIT_PLACEHOLDER, &self.cfg.page_size.to_string())
            .replace(OFFSET_PLACEHOLDER, &self.offset.to_string());
        let mut attempt = 0u32;
        loop {
            let result = self
                .agent
                .get(&self.cfg.endpoint_url)
                .set("Accept", "application/sparql-results+json")
                .query("query", &query)
                .query("format", "json")
                .call();
            let last_error = match result {
                Ok(resp) => return resp.into_string().map_err(HarvestError::Io),
                Err(ureq::Error::Status(status, resp)) if status == 429 || status >= 500 => {
                    format!("HTTP {status} {}", resp.status_text())
                }
                Err(ureq::Error::Status(status, resp)) => {
                    let body = resp.into_string().unwrap_or_default();
                    return Err(HarvestError::QueryRejected { status, body });
                }
                Err(ureq::Error::Transport(t)) => t.to_string(),
            };
            if attempt >= self.cfg.max_retries {
                return Err(HarvestError::EndpointUnreachable { attempts: attempt + 1, last_error });
            }
            let delay = self.cfg.backoff_base.saturating_mul(1u32 << attempt.min(16));
            attempt += 1;
            self.retries += 1;
            log::warn!(
                "page {} (offset {}): {last_error}; retry {attempt}/{} in {delay:?}",
                self.page,
                self.offset,
                self.cfg.max_retries
            );
            thread::sleep(delay);
        }
    }

    fn parse_page(&self, body: &str) -> Result<Vec<DepictsStatement>, HarvestError> {
        let page = self.page;
        let bad = |reason: String| HarvestError::MalformedResponse { page, reason };
        let parsed: SparqlResults = serde_json::from_str(body).map_err(|e| bad(e.to_string()))?;
        parsed
            .results
            .bindings
            .into_iter()
            .map(|row| {
                let get = |k: &str| row.get(k).map(|v| v.value.as_str()).unwrap_or("");
                let iri = |k: &str| Iri::new(get(k)).map_err(|e| bad(format!("{k}: {e}")));
                let mut stmt = DepictsStatement::new(iri("artwork")?, iri("element")?);
                stmt.artwork_label = get("artworkLabel").to_string();
                stmt.element_label = get("elementLabel").to_string();
                for t in get("types").split('|').filter(|t| !t.is_empty()) {
                    stmt.element_types.insert(Iri::new(t).map_err(|e| bad(format!("types: {e}")))?);
                }
                if !get("qualKind").is_empty() && !get("qualValue").is_empty() {
                    stmt.qualifiers.insert(Qualifier {
                        kind: QualifierKind::from_tag(get("qualKind")),
                        value: get("qualValue").to_string(),
                    });
                }
                Ok(stmt)
            })
            .collect()
    }
}

impl Iterator for DepictsFetch {
    type Item = Result<DepictsStatement, HarvestError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(s) = self.buffer.pop_front() {
                return Some(Ok(s));
            }
            if self.exhausted || self.failed {
                return None;
            }
            let rows = match self.request_page().and_then(|body| self.parse_page(&body)) {
                Ok(rows) => rows,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            };
            self.page += 1;
            self.offset += rows.len();
            if rows.len() < self.cfg.page_size {
                self.exhausted = true;
            }
            for s in rows {
                if self.seen.insert(s.key()) {
                    self.buffer.push_back(s);
                }
            }
        }
    }
}
