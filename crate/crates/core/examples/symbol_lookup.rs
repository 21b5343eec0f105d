//! Loads the bundled symbol KB and prints what a few labels mean.
//!
//! cargo run --example symbol_lookup -- cat "Red Rose" anchor

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use iiconforge::symbolkb::load_kb;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/kb");
    let (kb, summary) = load_kb(
        BufReader::new(File::open(kb_dir.join("simulations.tsv"))?),
        Some(BufReader::new(File::open(kb_dir.join("labels.tsv"))?)),
    )?;
    println!("{} simulations, {} labels", kb.len(), kb.labels().len());
    println!("{summary:?}");

    let mut labels: Vec<String> = std::env::args().skip(1).collect();
    if labels.is_empty() {
        labels = vec!["cat".into(), "Red  Rose".into(), "unicorn".into()];
    }
    for label in labels {
        match kb.match_label(&label) {
            Some(symbol) => {
                println!("{label:?} -> {symbol}");
                for (meaning, context) in kb.meanings_of(symbol) {
                    println!("    {} ({context})", meaning.local_name());
                }
            }
            None => println!("{label:?} -> no symbol"),
        }
    }
    Ok(())
}
