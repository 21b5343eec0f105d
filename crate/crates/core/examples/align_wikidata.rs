//! Assigns levels and classes to the bundled depicts statements and shows
//! coverage plus the most frequent unassigned elements.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use iiconforge::harvester::{read_depicts_dump, DumpFormat};
use iiconforge::wd_reengineer::{build_recognitions, load_alignment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fx = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/wikidata");
    let table = load_alignment(File::open(fx.join("alignment.csv"))?)?;
    let stmts = read_depicts_dump(BufReader::new(File::open(fx.join("depicts.tsv"))?), DumpFormat::Tsv)?.collect::<Result<Vec<_>, _>>()?;
    let conv = build_recognitions(stmts, &table);

    println!("{} alignment rows", table.len());
    println!("{:?}", conv.stats);
    println!("coverage {:.2}%", conv.stats.coverage_percent());

    let mut per_level: BTreeMap<String, usize> = BTreeMap::new();
    for r in &conv.recognitions {
        *per_level.entry(r.level.tag()).or_default() += 1;
    }
    for (tag, n) in per_level {
        println!("{tag:<40} {n}");
    }
    for (element, entry) in conv.report.sorted().into_iter().take(5) {
        println!("unassigned {element} {entry:?}");
    }
    Ok(())
}
