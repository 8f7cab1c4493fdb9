//! Development-time fixture assembler: compiles every `.wat` source in the
//! fixture directory to its `.wasm` next to it. The compiled binaries are
//! committed; this tool only needs to run when a fixture source changes.
//!
//! Usage: cargo run --bin build-fixtures --features fixture-build [-- <dir>]

use std::path::PathBuf;

fn main() -> anyhow::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures")));
    let mut built = 0;
    for entry in std::fs::read_dir(&dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("wat") {
            continue;
        }
        let wasm = wat::parse_file(&path)?;
        let out = path.with_extension("wasm");
        std::fs::write(&out, wasm)?;
        println!("assembled {}", out.display());
        built += 1;
    }
    anyhow::ensure!(built > 0, "no .wat sources found in {}", dir.display());
    Ok(())
}
