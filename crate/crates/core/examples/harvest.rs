//! Reads depicts statements from the bundled dump. With
//! IICONFORGE_ENDPOINT set it pages the live endpoint instead, stopping
//! after the first page.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use iiconforge::harvester::{fetch_depicts, read_depicts_dump, DumpFormat, EndpointConfig, DEFAULT_QUERY_TEMPLATE, ENDPOINT_ENV};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    if let Ok(url) = std::env::var(ENDPOINT_ENV) {
        let mut cfg = EndpointConfig::new(&url);
        cfg.page_size = 20;
        for stmt in fetch_depicts(&cfg, DEFAULT_QUERY_TEMPLATE)?.take(20) {
            let s = stmt?;
            println!("{}\t{}\t{}", s.artwork, s.element, s.element_label);
        }
        return Ok(());
    }

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/wikidata/depicts.tsv");
    let stmts = read_depicts_dump(BufReader::new(File::open(path)?), DumpFormat::Tsv)?.collect::<Result<Vec<_>, _>>()?;
    println!("{} statements", stmts.len());
    for s in stmts.iter().take(5) {
        let types: Vec<&str> = s.element_types.iter().map(|t| t.local_name()).collect();
        println!("{} depicts {} ({}) types={types:?} qualifiers={}", s.artwork_label, s.element_label, s.element.local_name(), s.qualifiers.len());
    }
    Ok(())
}
