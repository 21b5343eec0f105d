//! Runs the whole pipeline over the bundled mini corpus into a temporary
//! directory (or the directory given as first argument) and lists the
//! artifacts.

use std::path::{Path, PathBuf};

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/pipeline.toml");
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("iiconforge-example"));
    let code = iiconforge::cli::run(["iiconforge", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "pipeline"]);
    if code != 0 {
        std::process::exit(code);
    }
    let manifest = std::fs::read_to_string(out.join("manifest.json")).expect("pipeline writes a manifest");
    println!("{manifest}");
}
