//! Writes the four figure CSVs for the default configuration and prints
//! their summaries. Output goes to the directory given as the first
//! argument, or `out/`.
//!
//!     cargo run --release --example reproduce_figures -- /tmp/figs

use std::path::PathBuf;

use pt_metrology::config::RunConfig;
use pt_metrology::reproduce::{reproduce, Figure};

fn main() -> pt_metrology::Result<()> {
    let dir: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "out".into()).into();
    let config = RunConfig::default();
    for figure in Figure::ALL {
        let out = reproduce(figure, &config)?;
        let path = out.write_to(&dir)?;
        println!("== {} -> {}\n{}\n", figure, path.display(), out.summary);
    }
    Ok(())
}
