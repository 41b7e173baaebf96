//! Probe transmission of mode 1 with the mechanics switched off: one broad
//! line for the bare cavity, a narrow one in the stable broken phase, a split
//! pair in the symmetric phase.
//!
//!     cargo run --example background_spectrum

use pt_metrology::model::CoupledModeSystem;
use pt_metrology::spectrum::{background_spectrum, peak_analysis, uniform_grid};

fn main() -> pt_metrology::Result<()> {
    let grid = uniform_grid(-60.0, 60.0, 16_001);
    let cases = [
        ("single cavity", CoupledModeSystem::single_cavity(0.0, 20.0, 5.0)?),
        ("broken phase", CoupledModeSystem::pt(0.0, 20.0, 16.0, 17.95, 5.0)?),
        ("symmetric phase", CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0)?),
    ];
    for (name, sys) in cases {
        let spec = background_spectrum(&sys, &grid)?;
        println!("{name} (g1 = {}):", sys.g1);
        for p in peak_analysis(&spec)? {
            let fwhm = p.fwhm.map_or("-".to_string(), |w| format!("{w:.3}"));
            println!("  peak at {:+8.4} MHz  FWHM {fwhm} MHz", p.position);
        }
    }
    Ok(())
}
