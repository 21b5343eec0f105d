//! Command-line front end and stage orchestration.
//!
//! Every stage reads its inputs from the run config or from the outputs of an
//! earlier stage under the output directory, and writes deterministic files
//! next to them. A stage's summary is also returned as JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::{self, DEFAULT_PAIR_CAP};
use crate::arco_parser::{self, ParsedDescription, ParserConfig};
use crate::emitter::{self, CatalogueConfig, CatalogueDistribution, CatalogueSource, Format, ProfileKind, VocabularyProfile};
use crate::enricher::{self, IdAlignment, SymbolicInterpretation};
use crate::evalsuite;
use crate::harvester::{self, DumpFormat, EndpointConfig};
use crate::model::{DepictedElement, ElementTable, Iri, Recognition};
use crate::symbolkb::{KbBuilder, SimulationPredicates, SymbolKb};
use crate::wd_reengineer;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

fn input_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn write_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Invariant(format!("writing {}: {e}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Wikidata,
    Arco,
}

impl Source {
    pub const ALL: [Source; 2] = [Source::Wikidata, Source::Arco];

    pub fn dir(self) -> &'static str {
        match self {
            Source::Wikidata => "wikidata",
            Source::Arco => "arco",
        }
    }

    fn profile_kind(self) -> ProfileKind {
        match self {
            Source::Wikidata => ProfileKind::Full,
            Source::Arco => ProfileKind::Shortcut,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    depicts_input: Option<PathBuf>,
    depicts_format: Option<String>,
    alignment: Option<PathBuf>,
    descriptions: Option<PathBuf>,
    description_predicate: Option<String>,
    kb_simulations: Option<PathBuf>,
    kb_labels: Option<PathBuf>,
    kb_triples: Option<PathBuf>,
    id_alignment: Option<PathBuf>,
    profile: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Option<String>,
    interpretations: Option<PathBuf>,
    scores: Option<PathBuf>,
    annotations: Option<PathBuf>,
    top_k: Option<usize>,
    same_context: Option<bool>,
    pair_cap: Option<u64>,
    seed: Option<u64>,
    jobs: Option<usize>,
    created: Option<String>,
    endpoint: Option<String>,
    page_size: Option<usize>,
    max_retries: Option<u32>,
    query_template: Option<PathBuf>,
    reading_markers: Option<Vec<String>>,
    iconological_categories: Option<Vec<String>>,
    ambiguous_categories: Option<Vec<String>>,
}

/// Resolved run configuration. Relative paths are taken from the config
/// file's directory.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub depicts_input: Option<PathBuf>,
    pub depicts_format: DumpFormat,
    pub alignment: Option<PathBuf>,
    pub descriptions: Option<PathBuf>,
    pub description_predicate: Iri,
    pub kb_simulations: Option<PathBuf>,
    pub kb_labels: Option<PathBuf>,
    pub kb_triples: Option<PathBuf>,
    pub id_alignment: Option<PathBuf>,
    pub profile: Option<PathBuf>,
    pub out: PathBuf,
    pub format: Format,
    pub interpretations: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub top_k: usize,
    pub same_context: bool,
    pub pair_cap: u64,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub created: Option<String>,
    pub endpoint: Option<String>,
    pub page_size: Option<usize>,
    pub max_retries: Option<u32>,
    pub query_template: Option<PathBuf>,
    pub parser: ParserConfig,
    /// How inputs are named in summaries and the catalogue.
    names: BTreeMap<PathBuf, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_raw(RawConfig::default(), Path::new(".")).expect("defaults are valid")
    }
}

impl RunConfig {
    fn from_raw(raw: RawConfig, base: &Path) -> Result<Self, CliError> {
        let mut names = BTreeMap::new();
        let mut resolve = |p: Option<PathBuf>| {
            p.map(|p| {
                let full = if p.is_absolute() { p.clone() } else { base.join(&p) };
                names.insert(full.clone(), p.to_string_lossy().into_owned());
                full
            })
        };
        let depicts_input = resolve(raw.depicts_input);
        let depicts_format = match (&raw.depicts_format, &depicts_input) {
            (Some(f), _) => f.parse().map_err(|e: harvester::HarvestError| CliError::Config(e.to_string()))?,
            (None, Some(p)) if p.extension().is_some_and(|e| e == "nt") => DumpFormat::NTriplesSubset,
            _ => DumpFormat::Tsv,
        };
        let mut parser = ParserConfig::default();
        if let Some(m) = raw.reading_markers {
            parser.reading_markers = m;
        }
        if let Some(c) = raw.iconological_categories {
            parser.iconological_categories = c;
        }
        if let Some(c) = raw.ambiguous_categories {
            parser.ambiguous_categories = c;
        }
        let description_predicate = Iri::new(raw.description_predicate.as_deref().unwrap_or(arco_parser::DC_DESCRIPTION))
            .map_err(|e| CliError::Config(format!("description_predicate: {e}")))?;
        let format = match raw.format {
            Some(f) => f.parse().map_err(CliError::Config)?,
            None => Format::NTriples,
        };
        let top_k = raw.top_k.unwrap_or(10);
        if top_k == 0 {
            return Err(CliError::Config("top_k must be at least 1".into()));
        }
        Ok(RunConfig {
            depicts_input,
            depicts_format,
            alignment: resolve(raw.alignment),
            descriptions: resolve(raw.descriptions),
            description_predicate,
            kb_simulations: resolve(raw.kb_simulations),
            kb_labels: resolve(raw.kb_labels),
            kb_triples: resolve(raw.kb_triples),
            id_alignment: resolve(raw.id_alignment),
            profile: resolve(raw.profile),
            out: resolve(raw.out).unwrap_or_else(|| base.join("out")),
            format,
            interpretations: resolve(raw.interpretations),
            scores: resolve(raw.scores),
            annotations: resolve(raw.annotations),
            top_k,
            same_context: raw.same_context.unwrap_or(false),
            pair_cap: raw.pair_cap.unwrap_or(DEFAULT_PAIR_CAP),
            seed: raw.seed.unwrap_or(0),
            jobs: raw.jobs,
            created: raw.created,
            endpoint: raw.endpoint,
            page_size: raw.page_size,
            max_retries: raw.max_retries,
            query_template: resolve(raw.query_template),
            parser,
            names,
        })
    }

    /// Parses a flat `key = value` config; paths are relative to `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_raw(raw, base)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    fn name_of(&self, path: &Path) -> String {
        self.names.get(path).cloned().unwrap_or_else(|| path.to_string_lossy().into_owned())
    }

    /// Checks that every configured input exists.
    pub fn validate(&self) -> Result<(), CliError> {
        let paths = [
            ("depicts_input", &self.depicts_input),
            ("alignment", &self.alignment),
            ("descriptions", &self.descriptions),
            ("kb_simulations", &self.kb_simulations),
            ("kb_labels", &self.kb_labels),
            ("kb_triples", &self.kb_triples),
            ("id_alignment", &self.id_alignment),
            ("profile", &self.profile),
            ("interpretations", &self.interpretations),
            ("scores", &self.scores),
            ("annotations", &self.annotations),
            ("query_template", &self.query_template),
        ];
        for (key, path) in paths {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(CliError::Config(format!("{key}: {} does not exist", p.display())));
                }
            }
        }
        if self.out.exists() && !self.out.is_dir() {
            return Err(CliError::Config(format!("out: {} is not a directory", self.out.display())));
        }
        Ok(())
    }

    fn require<'a>(&self, key: &str, path: &'a Option<PathBuf>) -> Result<&'a Path, CliError> {
        path.as_deref().ok_or_else(|| CliError::Config(format!("`{key}` is not set")))
    }

    pub fn source_dir(&self, source: Source) -> PathBuf {
        self.out.join(source.dir())
    }

    pub fn load_profile(&self) -> Result<VocabularyProfile, CliError> {
        match &self.profile {
            Some(p) => VocabularyProfile::load(p).map_err(|e| CliError::Config(e.to_string())),
            None => Ok(VocabularyProfile::default()),
        }
    }

    fn created(&self) -> String {
        if let Some(c) = &self.created {
            return c.clone();
        }
        std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse::<i64>().ok())
            .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
            .map(|d| d.format("%Y-%m-%dT%H:%M:%SZ").to_string())
            .unwrap_or_else(|| "1970-01-01T00:00:00Z".into())
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| input_err(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("out: cannot create {}: {e}", dir.display())))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| write_err(path, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| write_err(path, e))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    write_with(path, |w| {
        for item in items {
            serde_json::to_writer(&mut *w, &item)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| input_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| input_err(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

fn missing_stage(path: &Path, stage: &str) -> CliError {
    CliError::Input(format!("{} not found; run `{stage}` first", path.display()))
}

fn stage_file(dir: &Path, name: &str, stage: &str) -> Result<PathBuf, CliError> {
    let p = dir.join(name);
    if p.is_file() {
        Ok(p)
    } else {
        Err(missing_stage(&p, stage))
    }
}

fn convert_stage(source: Source) -> &'static str {
    match source {
        Source::Wikidata => "convert-wikidata",
        Source::Arco => "convert-arco",
    }
}

fn write_triples(path: &Path, triples: &[crate::rdf::Triple], format: Format, profile: &VocabularyProfile) -> Result<emitter::FileSummary, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("out: cannot create {}: {e}", dir.display())))?;
    }
    emitter::serialize(triples, format, path, profile).map_err(|e| write_err(path, e))
}

fn triples_name(stem: &str, format: Format) -> String {
    match format {
        Format::NTriples => format!("{stem}.nt"),
        Format::Turtle => format!("{stem}.ttl"),
    }
}

/// Downloads depicts statements into `<out>/harvest/depicts.tsv`.
pub fn cmd_harvest(cfg: &RunConfig, dry_run: bool) -> Result<Value, CliError> {
    cfg.validate()?;
    let url = cfg
        .endpoint
        .clone()
        .or_else(|| std::env::var(harvester::ENDPOINT_ENV).ok())
        .ok_or_else(|| CliError::Config(format!("no endpoint: set `endpoint` or {}", harvester::ENDPOINT_ENV)))?;
    let mut ep = EndpointConfig::new(url).with_env_override();
    if let Some(n) = cfg.page_size {
        ep.page_size = n;
    }
    if let Some(n) = cfg.max_retries {
        ep.max_retries = n;
    }
    ep.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let template = match &cfg.query_template {
        Some(p) => fs::read_to_string(p).map_err(|e| input_err(p, e))?,
        None => harvester::DEFAULT_QUERY_TEMPLATE.to_string(),
    };
    if dry_run {
        return Ok(json!({ "command": "harvest", "dry_run": true, "endpoint": ep.endpoint_url }));
    }
    let mut fetch = harvester::fetch_depicts(&ep, &template).map_err(|e| CliError::Config(e.to_string()))?;
    let mut stmts = Vec::new();
    for s in fetch.by_ref() {
        stmts.push(s.map_err(|e| CliError::Input(format!("{}: {e}", ep.endpoint_url)))?);
    }
    let path = cfg.out.join("harvest").join("depicts.tsv");
    write_with(&path, |w| harvester::write_depicts_tsv(w, &stmts))?;
    let summary = json!({
        "command": "harvest",
        "statements": stmts.len(),
        "pages": fetch.pages_fetched(),
        "retries": fetch.retries(),
    });
    write_json(&cfg.out.join("harvest").join("summary.json"), &summary)?;
    Ok(summary)
}

/// Aligns depicts statements to interpretation classes and writes
/// full-shape triples.
pub fn cmd_convert_wikidata(cfg: &RunConfig, dry_run: bool) -> Result<Value, CliError> {
    cfg.validate()?;
    let input = cfg.require("depicts_input", &cfg.depicts_input)?;
    let alignment_path = cfg.require("alignment", &cfg.alignment)?;
    let profile = cfg.load_profile()?;
    profile.validate(ProfileKind::Full).map_err(|e| CliError::Config(e.to_string()))?;
    let table = wd_reengineer::load_alignment(open(alignment_path)?).map_err(|e| input_err(alignment_path, e))?;
    let stmts: Vec<_> = harvester::read_depicts_dump(open(input)?, cfg.depicts_format)
        .map_err(|e| input_err(input, e))?
        .collect::<Result<_, _>>()
        .map_err(|e| input_err(input, e))?;
    let conv = wd_reengineer::build_recognitions_in(stmts, &table, &profile.namespace);
    let triples = emitter::emit_full(&conv.recognitions, [], &profile).map_err(|e| CliError::Config(e.to_string()))?;
    let mut summary = json!({
        "command": "convert-wikidata",
        "input": cfg.name_of(input),
        "statements": conv.stats.statements,
        "assigned": conv.stats.assigned,
        "unassigned": conv.stats.unassigned,
        "conflicts": conv.stats.conflicts,
        "coverage_percent": conv.stats.coverage_percent(),
        "artworks": conv.artworks.len(),
        "recognitions": conv.recognitions.len(),
        "triples": triples.len(),
    });
    if dry_run {
        summary["dry_run"] = json!(true);
        return Ok(summary);
    }
    let dir = cfg.source_dir(Source::Wikidata);
    write_jsonl(&dir.join("recognitions.jsonl"), &conv.recognitions)?;
    write_jsonl(&dir.join("elements.jsonl"), conv.elements.values())?;
    write_with(&dir.join("unassigned.tsv"), |w| conv.report.write_tsv(w))?;
    write_triples(&dir.join(triples_name("recognitions", cfg.format)), &triples, cfg.format, &profile)?;
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Parses catalogue descriptions and writes shortcut-shape triples.
pub fn cmd_convert_arco(cfg: &RunConfig, dry_run: bool) -> Result<Value, CliError> {
    cfg.validate()?;
    let input = cfg.require("descriptions", &cfg.descriptions)?;
    let profile = cfg.load_profile()?;
    profile.validate(ProfileKind::Shortcut).map_err(|e| CliError::Config(e.to_string()))?;
    let raws = if input.extension().is_some_and(|e| e == "nt") {
        arco_parser::read_descriptions_ntriples(open(input)?, &cfg.description_predicate)
    } else {
        arco_parser::read_descriptions_tsv(open(input)?)
    }
    .map_err(|e| input_err(input, e))?;
    let mut parser = cfg.parser.clone();
    parser.namespace = profile.namespace.clone();
    let parsed = arco_parser::parse_batch(&raws, &parser);
    let mut recognitions = Vec::new();
    let mut elements = ElementTable::new();
    for p in &parsed {
        let (recs, els) = arco_parser::to_recognitions(p, &profile.namespace);
        recognitions.extend(recs);
        for e in els {
            elements.entry(e.id.clone()).or_insert(e);
        }
    }
    let recognitions = crate::model::dedupe_recognitions(recognitions);
    let triples = emitter::emit_shortcut(&recognitions, [], &profile).map_err(|e| CliError::Config(e.to_string()))?;
    let conforming = parsed.iter().filter(|p| p.is_conforming()).count();
    let meanings: BTreeSet<String> =
        parsed.iter().flat_map(|p| &p.iconological).filter_map(|m| arco_parser::mint_meaning_id(m).ok()).collect();
    let mut summary = json!({
        "command": "convert-arco",
        "input": cfg.name_of(input),
        "descriptions": parsed.len(),
        "conforming": conforming,
        "discarded": parsed.len() - conforming,
        "minted_meanings": meanings.len(),
        "recognitions": recognitions.len(),
        "triples": triples.len(),
    });
    if dry_run {
        summary["dry_run"] = json!(true);
        return Ok(summary);
    }
    let dir = cfg.source_dir(Source::Arco);
    write_with(&dir.join("parsed.jsonl"), |w| arco_parser::write_parsed_jsonl(w, &parsed))?;
    write_with(&dir.join("discards.tsv"), |w| arco_parser::write_discard_report(w, &parsed))?;
    write_jsonl(&dir.join("recognitions.jsonl"), &recognitions)?;
    write_jsonl(&dir.join("elements.jsonl"), elements.values())?;
    write_triples(&dir.join(triples_name("recognitions", cfg.format)), &triples, cfg.format, &profile)?;
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Loads the symbol KB named by the config.
pub fn load_kb(cfg: &RunConfig) -> Result<(SymbolKb, crate::symbolkb::LoadSummary), CliError> {
    if cfg.kb_simulations.is_none() && cfg.kb_triples.is_none() {
        return Err(CliError::Config("neither `kb_simulations` nor `kb_triples` is set".into()));
    }
    let mut b = KbBuilder::new();
    if let Some(p) = &cfg.kb_simulations {
        b.read_simulations_tsv(open(p)?).map_err(|e| input_err(p, e))?;
    }
    if let Some(p) = &cfg.kb_labels {
        b.read_labels_tsv(open(p)?).map_err(|e| input_err(p, e))?;
    }
    if let Some(p) = &cfg.kb_triples {
        b.read_triples(open(p)?, &SimulationPredicates::default()).map_err(|e| input_err(p, e))?;
    }
    b.finish().map_err(|e| CliError::Input(format!("symbol KB: {e}")))
}

fn load_stage_recognitions(cfg: &RunConfig, source: Source) -> Result<(BTreeSet<Recognition>, ElementTable), CliError> {
    let dir = cfg.source_dir(source);
    let stage = convert_stage(source);
    let recs: Vec<Recognition> = read_jsonl(&stage_file(&dir, "recognitions.jsonl", stage)?)?;
    let els: Vec<DepictedElement> = read_jsonl(&stage_file(&dir, "elements.jsonl", stage)?)?;
    Ok((recs.into_iter().collect(), els.into_iter().map(|e| (e.id.clone(), e)).collect()))
}

/// Links converted elements to the symbol KB and writes interpretations.
pub fn cmd_enrich(cfg: &RunConfig, source: Source, dry_run: bool) -> Result<Value, CliError> {
    cfg.validate()?;
    let (kb, kb_summary) = load_kb(cfg)?;
    let id_alignment = match &cfg.id_alignment {
        Some(p) => enricher::load_id_alignment(open(p)?).map_err(|e| input_err(p, e))?,
        None => IdAlignment::new(),
    };
    let (recs, elements) = load_stage_recognitions(cfg, source)?;
    let out = enricher::enrich(&recs, &elements, &kb, &id_alignment);
    let mut summary = json!({
        "command": "enrich",
        "source": source,
        "kb": kb_summary,
        "enrichment": out.summary(&recs),
    });
    if dry_run {
        summary["dry_run"] = json!(true);
        return Ok(summary);
    }
    let dir = cfg.source_dir(source);
    write_with(&dir.join("interpretations.jsonl"), |w| enricher::write_interpretations_jsonl(w, &out.interpretations))?;
    write_with(&dir.join("unmatched.tsv"), |w| out.linking.write_unmatched_tsv(w, &elements))?;
    write_jsonl(&dir.join("audit.jsonl"), &out.audit)?;
    write_json(&dir.join("enrich-summary.json"), &summary)?;
    Ok(summary)
}

fn load_interpretations(path: &Path) -> Result<BTreeSet<SymbolicInterpretation>, CliError> {
    enricher::read_interpretations_jsonl(open(path)?).map_err(|e| input_err(path, e))
}

/// Emits recognitions plus interpretations of a source as one graph.
pub fn cmd_emit(cfg: &RunConfig, source: Source, dry_run: bool) -> Result<Value, CliError> {
    cfg.validate()?;
    let profile = cfg.load_profile()?;
    let (recs, _) = load_stage_recognitions(cfg, source)?;
    let dir = cfg.source_dir(source);
    let interps = load_interpretations(&stage_file(&dir, "interpretations.jsonl", "enrich")?)?;
    let emit = match source.profile_kind() {
        ProfileKind::Full => emitter::emit_full(&recs, &interps, &profile),
        ProfileKind::Shortcut => emitter::emit_shortcut(&recs, &interps, &profile),
    };
    let triples = emit.map_err(|e| CliError::Config(e.to_string()))?;
    let name = triples_name("graph", cfg.format);
    let mut summary = json!({
        "command": "emit",
        "source": source,
        "recognitions": recs.len(),
        "interpretations": interps.len(),
        "triples": triples.len(),
        "file": format!("{}/{}", source.dir(), name),
    });
    if dry_run {
        summary["dry_run"] = json!(true);
        return Ok(summary);
    }
    let file = write_triples(&dir.join(&name), &triples, cfg.format, &profile)?;
    summary["bytes"] = json!(file.bytes);
    write_json(&dir.join("emit-summary.json"), &summary)?;
    Ok(summary)
}

/// Serendipity, ranking, level distribution and, for catalogue text,
/// iconological meaning frequency.
pub fn cmd_analyze(cfg: &RunConfig, source: Source, dry_run: bool) -> Result<Value, CliError> {
    cfg.validate()?;
    let dir = cfg.source_dir(source);
    let interps = match &cfg.interpretations {
        Some(p) => load_interpretations(p)?,
        None => load_interpretations(&stage_file(&dir, "interpretations.jsonl", "enrich")?)?,
    };
    let recs: Vec<Recognition> = match dir.join("recognitions.jsonl") {
        p if p.is_file() => read_jsonl(&p)?,
        _ => Vec::new(),
    };
    let index = analytics::build_meaning_index(&interps, cfg.same_context);
    let serendipity = analytics::count_serendipity(&index, cfg.pair_cap);
    let ranking = analytics::rank_symbolic(&interps, cfg.top_k).map_err(|e| CliError::Config(e.to_string()))?;
    let levels = analytics::level_distribution(&recs);
    let parsed: Vec<ParsedDescription> = match (source, dir.join("parsed.jsonl")) {
        (Source::Arco, p) if p.is_file() => read_jsonl(&p)?,
        _ => Vec::new(),
    };
    let meanings = analytics::meaning_frequency(&parsed);
    let top_meanings: Vec<_> = meanings.iter().take(cfg.top_k).collect();
    let mut summary = json!({
        "command": "analyze",
        "source": source,
        "parameters": { "top_k": cfg.top_k, "same_context": cfg.same_context, "pair_cap": cfg.pair_cap },
        "interpretations": interps.len(),
        "meanings": index.entries.len(),
        "serendipity": serendipity,
        "top_symbolic": ranking.iter().map(|(a, n)| json!({ "artwork": a, "simulations": n })).collect::<Vec<_>>(),
        "levels": levels,
        "top_meanings": top_meanings.iter().map(|(m, n)| json!({ "meaning": m, "artworks": n })).collect::<Vec<_>>(),
    });
    if dry_run {
        summary["dry_run"] = json!(true);
        return Ok(summary);
    }
    write_with(&dir.join("ranking.tsv"), |w| {
        let rows: Vec<(&str, usize)> = ranking.iter().map(|(a, n)| (a.as_str(), *n)).collect();
        analytics::write_ranking_tsv(w, ["artwork_iri", "simulations"], &rows)
    })?;
    write_with(&dir.join("levels.tsv"), |w| levels.write_tsv(w))?;
    if source == Source::Arco {
        write_with(&dir.join("meanings.tsv"), |w| analytics::write_ranking_tsv(w, ["meaning", "artworks"], &meanings))?;
    }
    write_json(&dir.join("analytics.json"), &summary)?;
    Ok(summary)
}

/// Aggregates the scores file into the evaluation report.
pub fn cmd_evaluate(cfg: &RunConfig, dry_run: bool) -> Result<Value, CliError> {
    cfg.validate()?;
    let path = cfg.require("scores", &cfg.scores)?;
    let rows = evalsuite::read_scores(open(path)?).map_err(|e| input_err(path, e))?;
    let report = evalsuite::build_report(&rows.iter().map(|r| (r.kg_name.clone(), r.scores)).collect::<Vec<_>>())
        .map_err(|e| input_err(path, e))?;
    let cr2 = match &cfg.annotations {
        Some(p) => {
            let sheets = evalsuite::read_annotations(open(p)?).map_err(|e| input_err(p, e))?;
            Some(evalsuite::score_cr2(&sheets).map_err(|e| input_err(p, e))?)
        }
        None => None,
    };
    let mut cr5 = BTreeMap::new();
    for source in Source::ALL {
        let p = cfg.source_dir(source).join("recognitions.jsonl");
        if !p.is_file() {
            continue;
        }
        let recs: Vec<Recognition> = read_jsonl(&p)?;
        let mut links: BTreeMap<&Iri, BTreeSet<&Iri>> = BTreeMap::new();
        for r in &recs {
            links.entry(&r.element).or_default().insert(&r.artwork);
        }
        if let Ok(v) = evalsuite::score_cr5(&links) {
            cr5.insert(source.dir(), v);
        }
    }
    let mut summary = json!({
        "command": "evaluate",
        "scores": cfg.name_of(path),
        "report": report,
        "computed": { "cr2_from_annotations": cr2, "cr5_by_source": cr5 },
    });
    if dry_run {
        summary["dry_run"] = json!(true);
        return Ok(summary);
    }
    let dir = cfg.out.join("evaluation");
    let csv_path = dir.join("report.csv");
    let w = create(&csv_path)?;
    report.write_csv(w).map_err(|e| write_err(&csv_path, e))?;
    write_with(&dir.join("report.txt"), |w| w.write_all(report.to_text().as_bytes()))?;
    write_json(&dir.join("evaluation.json"), &summary)?;
    Ok(summary)
}

fn catalogue(cfg: &RunConfig, distributions: Vec<CatalogueDistribution>) -> CatalogueConfig {
    let mut c = CatalogueConfig { created: cfg.created(), distributions, ..Default::default() };
    let inputs = [("depicts", &cfg.depicts_input), ("descriptions", &cfg.descriptions), ("symbol-kb", &cfg.kb_simulations), ("symbol-kb", &cfg.kb_triples)];
    for (name, path) in inputs {
        if let Some(p) = path {
            c.sources.push(CatalogueSource { name: name.into(), location: cfg.name_of(p) });
        }
    }
    c
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn list_files(dir: &Path, root: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            list_files(&path, root, out)?;
        } else {
            out.push(path.strip_prefix(root).expect("under root").to_path_buf());
        }
    }
    Ok(())
}

/// Writes `manifest.json` listing every artifact under the output directory.
pub fn write_manifest(cfg: &RunConfig) -> Result<Value, CliError> {
    let mut files = Vec::new();
    list_files(&cfg.out, &cfg.out, &mut files).map_err(|e| write_err(&cfg.out, e))?;
    files.retain(|p| p != Path::new("manifest.json"));
    files.sort();
    let mut entries = Vec::new();
    for rel in files {
        let bytes = fs::read(cfg.out.join(&rel)).map_err(|e| write_err(&rel, e))?;
        let name = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        entries.push(json!({ "path": name, "bytes": bytes.len(), "sha256": sha256_hex(&bytes) }));
    }
    let manifest = json!({ "seed": cfg.seed, "artifacts": entries });
    write_json(&cfg.out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// Runs every stage the config has inputs for, then the catalogue and the
/// manifest.
pub fn cmd_pipeline(cfg: &RunConfig, dry_run: bool) -> Result<Value, CliError> {
    cfg.validate()?;
    let mut stages = Vec::new();
    let mut distributions = Vec::new();
    let enrich = cfg.kb_simulations.is_some() || cfg.kb_triples.is_some();
    let sources: Vec<Source> = Source::ALL
        .into_iter()
        .filter(|s| match s {
            Source::Wikidata => cfg.depicts_input.is_some(),
            Source::Arco => cfg.descriptions.is_some(),
        })
        .collect();
    if sources.is_empty() && cfg.scores.is_none() {
        return Err(CliError::Config("nothing to do: set `depicts_input`, `descriptions` or `scores`".into()));
    }
    for source in sources {
        stages.push(match source {
            Source::Wikidata => cmd_convert_wikidata(cfg, dry_run)?,
            Source::Arco => cmd_convert_arco(cfg, dry_run)?,
        });
        if dry_run {
            continue;
        }
        if enrich {
            stages.push(cmd_enrich(cfg, source, false)?);
            stages.push(cmd_emit(cfg, source, false)?);
            stages.push(cmd_analyze(cfg, source, false)?);
            distributions.push(CatalogueDistribution { path: format!("{}/{}", source.dir(), triples_name("graph", cfg.format)), format: cfg.format });
        } else {
            distributions.push(CatalogueDistribution {
                path: format!("{}/{}", source.dir(), triples_name("recognitions", cfg.format)),
                format: cfg.format,
            });
        }
    }
    if cfg.scores.is_some() {
        stages.push(cmd_evaluate(cfg, dry_run)?);
    }
    if dry_run {
        return Ok(json!({ "command": "pipeline", "dry_run": true, "stages": stages }));
    }
    let profile = cfg.load_profile()?;
    let cat = emitter::emit_catalogue(&catalogue(cfg, distributions), &profile);
    write_triples(&cfg.out.join(triples_name("catalogue", cfg.format)), &cat, cfg.format, &profile)?;
    let manifest = write_manifest(cfg)?;
    Ok(json!({ "command": "pipeline", "stages": stages, "artifacts": manifest["artifacts"].as_array().map(Vec::len) }))
}

#[derive(Debug, Parser)]
#[command(name = "iiconforge", version, about = "Leveled iconographic linked data from artwork depictions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Flat key-value run config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Validate config and inputs without writing anything.
    #[arg(long, global = true)]
    pub dry_run: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    #[arg(long, global = true)]
    pub same_context: bool,
    #[arg(long, global = true)]
    pub pair_cap: Option<u64>,
    /// Endpoint for `harvest`.
    #[arg(long, global = true, env = "IICONFORGE_ENDPOINT")]
    pub endpoint: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Page depicts statements out of a SPARQL endpoint.
    Harvest,
    /// Align a depicts dump and write full-shape triples.
    ConvertWikidata,
    /// Parse catalogue descriptions and write shortcut triples.
    ConvertArco,
    /// Infer symbolic interpretations from the symbol KB.
    Enrich(SourceArg),
    /// Write recognitions and interpretations as one graph.
    Emit(SourceArg),
    /// Connection counts, rankings and distributions.
    Analyze(SourceArg),
    /// Aggregate quality scores into the report.
    Evaluate,
    /// Convert, enrich, emit and analyze every configured source.
    Pipeline,
}

#[derive(Debug, Args)]
pub struct SourceArg {
    #[arg(long, value_enum, default_value = "wikidata")]
    pub source: Source,
}

/// Builds the run config from the file and command-line overrides.
pub fn resolve_config(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &global.out {
        cfg.out = out.clone();
    }
    if let Some(j) = global.jobs {
        cfg.jobs = Some(j);
    }
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(k) = global.top_k {
        if k == 0 {
            return Err(CliError::Config("--top-k must be at least 1".into()));
        }
        cfg.top_k = k;
    }
    if global.same_context {
        cfg.same_context = true;
    }
    if let Some(c) = global.pair_cap {
        cfg.pair_cap = c;
    }
    if global.endpoint.is_some() {
        cfg.endpoint = global.endpoint.clone();
    }
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Value, CliError> {
    let cfg = resolve_config(&cli.global)?;
    let dry = cli.global.dry_run;
    let run = || match &cli.command {
        Command::Harvest => cmd_harvest(&cfg, dry),
        Command::ConvertWikidata => cmd_convert_wikidata(&cfg, dry),
        Command::ConvertArco => cmd_convert_arco(&cfg, dry),
        Command::Enrich(s) => cmd_enrich(&cfg, s.source, dry),
        Command::Emit(s) => cmd_emit(&cfg, s.source, dry),
        Command::Analyze(s) => cmd_analyze(&cfg, s.source, dry),
        Command::Evaluate => cmd_evaluate(&cfg, dry),
        Command::Pipeline => cmd_pipeline(&cfg, dry),
    };
    match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("jobs: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Parses arguments, runs the command, prints its summary and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            0
        }
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
