//! Counts serendipitous connections in the heart/rose example and lists
//! the connected pairs.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use iiconforge::analytics::{build_meaning_index, count_serendipity, serendipitous_pairs, DEFAULT_PAIR_CAP};
use iiconforge::enricher::read_interpretations_jsonl;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/micro");
    for file in ["heart_heart.jsonl", "heart_rose.jsonl"] {
        let interps: Vec<_> = read_interpretations_jsonl(BufReader::new(File::open(dir.join(file))?))?.into_iter().collect();
        for same_context in [false, true] {
            let index = build_meaning_index(&interps, same_context);
            let r = count_serendipity(&index, DEFAULT_PAIR_CAP);
            println!("{file} same_context={same_context}: {} pair-meanings, {:?} distinct pairs", r.pair_meaning_count, r.distinct_pair_count);
            if let Some(pairs) = serendipitous_pairs(&index, 10) {
                for (a, b) in pairs {
                    println!("    {a} <-> {b}");
                }
            }
        }
    }
    Ok(())
}
