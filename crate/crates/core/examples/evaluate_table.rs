//! Aggregates the bundled quality scores and prints the ranked report.

use std::fs::File;
use std::path::Path;

use iiconforge::evalsuite::{build_report, read_scores, score_cr3, CapabilityManifest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/evaluation/kg_scores.csv");
    let rows: Vec<_> = read_scores(File::open(path)?)?.into_iter().map(|r| (r.kg_name, r.scores)).collect();
    let report = build_report(&rows)?;
    print!("{}", report.to_text());

    let mut flags = [false; 9];
    flags[..6].fill(true);
    println!("cr3 with 6 of 9 capabilities: {:.4}", score_cr3(&CapabilityManifest::from_flags(flags)));
    Ok(())
}
