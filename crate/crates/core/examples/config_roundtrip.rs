//! Loads a run configuration, reports validation problems, and prints the
//! fully defaulted document.
//!
//!     cargo run --example config_roundtrip -- run.toml

use pt_metrology::config::{parse_config, RunConfig};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => "[system]\ng1 = 19.0\n\n[sweep]\nspacing = \"log\"\nstart = 0.9\nstop = 3.0\n".into(),
    };
    match parse_config(&text) {
        Ok(config) => {
            print!("{}", config.to_toml());
            assert_eq!(parse_config(&config.to_toml()).unwrap(), config);
        }
        Err(e) => {
            eprintln!("{e}");
            let defaults = RunConfig::default();
            eprintln!("defaults:\n{}", defaults.to_toml());
            std::process::exit(2);
        }
    }
}
