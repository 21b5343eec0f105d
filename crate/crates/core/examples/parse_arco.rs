//! Parses one description given on the command line, or the bundled ArCo
//! sample when none is given.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use iiconforge::arco_parser::{mint_meaning_id, parse_batch, parse_description, read_descriptions_tsv, ParserConfig, RawDescription};
use iiconforge::model::Iri;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ParserConfig::default();
    if let Some(text) = std::env::args().nth(1) {
        let desc = RawDescription { artwork: Iri::new("https://example.org/artwork/1")?, text };
        let p = parse_description(&desc, &cfg);
        println!("{}", serde_json::to_string_pretty(&p)?);
        for m in &p.iconological {
            println!("iig:{}", mint_meaning_id(m)?);
        }
        return Ok(());
    }

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/arco/descriptions.tsv");
    let descs = read_descriptions_tsv(BufReader::new(File::open(path)?))?;
    for p in parse_batch(&descs, &cfg) {
        if !p.is_conforming() {
            println!("{} discarded: {:?}", p.artwork.local_name(), p.status);
            continue;
        }
        let meanings: Vec<String> = p.iconological.iter().filter_map(|m| mint_meaning_id(m).ok()).collect();
        println!(
            "{} pre={:?} icon={:?} meanings={meanings:?}",
            p.artwork.local_name(),
            p.pre_iconographic,
            p.iconographic
        );
    }
    Ok(())
}
