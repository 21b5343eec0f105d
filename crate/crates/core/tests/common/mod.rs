#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::thread;

use iiconforge::enricher::{EnrichmentProvenance, IdAlignment, SymbolicInterpretation};
use iiconforge::model::{DepictedElement, ElementTable, IconClass, InterpretationLevel, Iri, Provenance, Recognition};
use iiconforge::symbolkb::{KbBuilder, Simulation, SymbolKb};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unicode_normalization::UnicodeNormalization;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn interp(artwork: &str, symbol: &str, meaning: &str, context: &str) -> SymbolicInterpretation {
    SymbolicInterpretation {
        artwork: iri(&format!("http://ex.org/art/{artwork}")),
        symbol: iri(&format!("http://ex.org/sym/{symbol}")),
        meaning: iri(&format!("http://ex.org/mean/{meaning}")),
        context: context.to_string(),
        element: iri(&format!("http://ex.org/el/{symbol}")),
        provenance: EnrichmentProvenance::AutomaticEnrichment,
    }
}

/// Random interpretations over at most the given numbers of artworks,
/// meanings and symbols. Some meanings are tied to one symbol so singleton
/// sets show up often.
pub fn random_interpretations(r: &mut ChaCha8Rng, max_artworks: usize, max_meanings: usize, max_symbols: usize) -> Vec<SymbolicInterpretation> {
    let n_art = r.gen_range(1..=max_artworks);
    let n_mean = r.gen_range(1..=max_meanings);
    let n_sym = r.gen_range(1..=max_symbols);
    let tied: Vec<Option<usize>> = (0..n_mean).map(|_| r.gen_bool(0.4).then(|| r.gen_range(0..n_sym))).collect();
    let mut out = Vec::new();
    for a in 0..n_art {
        for _ in 0..r.gen_range(0..=5) {
            let m = r.gen_range(0..n_mean);
            let s = match tied[m] {
                Some(s) if r.gen_bool(0.8) => s,
                _ => r.gen_range(0..n_sym),
            };
            let ctx = ["Christian", "Greek", "Egyptian"][r.gen_range(0..3)];
            out.push(interp(&format!("a{a:03}"), &format!("s{s}"), &format!("m{m}"), ctx));
        }
    }
    out
}

/// Pairwise oracle: returns (pair-meaning count, distinct pairs).
pub fn brute_force_serendipity(interps: &[SymbolicInterpretation], same_context: bool) -> (u64, u64) {
    let mut per: BTreeMap<&Iri, BTreeMap<(String, String), BTreeSet<&Iri>>> = BTreeMap::new();
    for i in interps {
        let key = (i.meaning.to_string(), if same_context { i.context.clone() } else { String::new() });
        per.entry(&i.artwork).or_default().entry(key).or_default().insert(&i.symbol);
    }
    let arts: Vec<_> = per.keys().copied().collect();
    let (mut pm, mut pairs) = (0u64, 0u64);
    for x in 0..arts.len() {
        for y in x + 1..arts.len() {
            let (a, b) = (&per[arts[x]], &per[arts[y]]);
            let mut any = false;
            for (m, sa) in a {
                let Some(sb) = b.get(m) else { continue };
                if sa.iter().any(|s| sb.iter().any(|t| s != t)) {
                    pm += 1;
                    any = true;
                }
            }
            pairs += any as u64;
        }
    }
    (pm, pairs)
}

pub struct EnrichInstance {
    pub kb: SymbolKb,
    pub sims: Vec<Simulation>,
    pub labels: Vec<(String, Iri)>,
    pub recs: BTreeSet<Recognition>,
    pub elements: ElementTable,
    pub alignment: IdAlignment,
}

const WORDS: [&str; 12] = ["cat", "Rose", "heart", "lily ", "DOVE", "lamb", "skull", "sun", "moon", "apple", "snake", "crown"];

/// At most 50 artworks and 200 simulations.
pub fn random_enrich_instance(r: &mut ChaCha8Rng) -> EnrichInstance {
    let n_sym = r.gen_range(1..=12);
    let n_sim = r.gen_range(1..=200);
    let symbols: Vec<Iri> = (0..n_sym).map(|s| iri(&format!("http://hr.org/sym/{s}"))).collect();
    let mut b = KbBuilder::new();
    let mut sims = Vec::new();
    for _ in 0..n_sim {
        let sim = Simulation {
            symbol: symbols[r.gen_range(0..n_sym)].clone(),
            meaning: iri(&format!("http://hr.org/mean/{}", r.gen_range(0..25))),
            context: ["Christian", "Greek", "Egyptian", "Western"][r.gen_range(0..4)].to_string(),
        };
        b.add_simulation(sim.clone());
        sims.push(sim);
    }
    let mut labels = Vec::new();
    for (i, s) in symbols.iter().enumerate() {
        let word = WORDS[i % WORDS.len()];
        b.add_label(word, s.clone());
        labels.push((word.to_string(), s.clone()));
        if r.gen_bool(0.2) {
            let other = WORDS[r.gen_range(0..WORDS.len())];
            b.add_label(other, s.clone());
            labels.push((other.to_string(), s.clone()));
        }
    }
    let kb = b.finish().unwrap().0;

    let n_el = r.gen_range(1..=30);
    let mut elements = ElementTable::new();
    let mut alignment = IdAlignment::new();
    for e in 0..n_el {
        let id = iri(&format!("http://wd.org/el/{e:02}"));
        let label = match r.gen_range(0..4) {
            0 => format!("unknown thing {e}"),
            1 => WORDS[r.gen_range(0..WORDS.len())].to_uppercase(),
            _ => format!("  {}  ", WORDS[r.gen_range(0..WORDS.len())]),
        };
        if r.gen_bool(0.15) {
            alignment.insert(id.clone(), symbols.choose(r).unwrap().clone());
        }
        elements.insert(id.clone(), DepictedElement { id, label, type_ids: BTreeSet::new() });
    }
    let ids: Vec<Iri> = elements.keys().cloned().collect();
    let mut recs = BTreeSet::new();
    for a in 0..r.gen_range(1..=50) {
        for _ in 0..r.gen_range(0..=6) {
            let class = IconClass::ALL[r.gen_range(0..IconClass::ALL.len())];
            recs.insert(Recognition::new(
                iri(&format!("http://wd.org/art/{a:02}")),
                ids.choose(r).unwrap().clone(),
                InterpretationLevel::of_class(class),
                Provenance::SourceKG,
            ));
        }
    }
    EnrichInstance { kb, sims, labels, recs, elements, alignment }
}

fn oracle_norm(s: &str) -> String {
    let lower: String = s.nfc().collect::<String>().to_lowercase();
    lower.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Nested-loop join: every recognition against every label row, then every
/// simulation row.
pub fn oracle_enrich(inst: &EnrichInstance) -> BTreeSet<SymbolicInterpretation> {
    let mut best: BTreeMap<(Iri, Iri, Iri, String), Iri> = BTreeMap::new();
    for r in &inst.recs {
        let symbol = match inst.alignment.get(&r.element) {
            Some(s) => Some(s.clone()),
            None => {
                let label = oracle_norm(&inst.elements[&r.element].label);
                let mut found: Option<Iri> = None;
                for (l, s) in &inst.labels {
                    if oracle_norm(l) == label && found.as_ref().is_none_or(|f| s < f) {
                        found = Some(s.clone());
                    }
                }
                found
            }
        };
        let Some(symbol) = symbol else { continue };
        for sim in &inst.sims {
            if sim.symbol == symbol {
                let key = (r.artwork.clone(), symbol.clone(), sim.meaning.clone(), sim.context.clone());
                let slot = best.entry(key).or_insert_with(|| r.element.clone());
                if r.element < *slot {
                    *slot = r.element.clone();
                }
            }
        }
    }
    best.into_iter()
        .map(|((artwork, symbol, meaning, context), element)| SymbolicInterpretation {
            artwork,
            symbol,
            meaning,
            context,
            element,
            provenance: EnrichmentProvenance::AutomaticEnrichment,
        })
        .collect()
}

/// A scripted HTTP response.
#[derive(Clone)]
pub struct Scripted {
    pub status: u16,
    pub body: String,
}

pub struct MockServer {
    pub url: String,
    pub requests: Arc<Mutex<Vec<String>>>,
}

/// Serves the scripted responses in order, one per connection, then 404s.
pub fn mock_server(script: Vec<Scripted>) -> MockServer {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/sparql", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let log = requests.clone();
    thread::spawn(move || {
        let mut script = script.into_iter();
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut head = String::new();
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                    break;
                }
                head.push_str(&line);
            }
            log.lock().unwrap().push(head);
            let resp = script.next().unwrap_or(Scripted { status: 404, body: "gone".into() });
            let reason = if resp.status < 400 { "OK" } else { "Error" };
            let _ = write!(
                stream,
                "HTTP/1.1 {} {reason}\r\nContent-Type: application/sparql-results+json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                resp.status,
                resp.body.len(),
                resp.body
            );
            let _ = stream.flush();
        }
    });
    MockServer { url, requests }
}

/// A SPARQL JSON results page with one row per `(artwork, element)`.
pub fn sparql_page(rows: &[(u32, u32)]) -> String {
    let bindings: Vec<String> = rows
        .iter()
        .map(|(a, e)| {
            format!(
                r#"{{"artwork":{{"type":"uri","value":"http://www.wikidata.org/entity/Q{a}"}},"artworkLabel":{{"type":"literal","value":"Art {a}"}},"element":{{"type":"uri","value":"http://www.wikidata.org/entity/Q{e}"}},"elementLabel":{{"type":"literal","value":"El {e}"}},"types":{{"type":"literal","value":"http://www.wikidata.org/entity/Q729"}}}}"#
            )
        })
        .collect();
    format!(r#"{{"head":{{"vars":["artwork","element"]}},"results":{{"bindings":[{}]}}}}"#, bindings.join(","))
}
