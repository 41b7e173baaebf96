//! Mechanical sidebands on the output of the PT transducer, and the same
//! drive on a bare cavity for comparison.
//!
//!     cargo run --example sideband_spectrum

use pt_metrology::model::CoupledModeSystem;
use pt_metrology::spectrum::{composite_spectrum, peak_analysis, uniform_grid, MechanicalMode};
use pt_metrology::sweep::converged_ladder;

fn main() -> pt_metrology::Result<()> {
    let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0)?;
    let mech = MechanicalMode::new(6.0, 0.2, 1.1)?;

    let ladder = converged_ladder(&sys, &mech, 1.0, 5)?;
    println!("ladder order {} (residual {:.1e})", ladder.order, ladder.residual);
    for n in 0..=3 {
        println!("  |a_{n}|^2 = {:.4e}", ladder.line_power(n));
    }

    let grid = uniform_grid(-24.0, 24.0, 16_001);
    let spec = composite_spectrum(&ladder, &sys, &mech, &grid)?;
    println!("peaks (omega/omega_m, height):");
    for p in peak_analysis(&spec)?.iter().filter(|p| p.position >= -1e-9) {
        println!("  {:.3}  {:.3}", p.position / mech.omega_m, p.height);
    }

    let single = converged_ladder(&sys.reference(), &mech, 1.0, ladder.order)?;
    println!(
        "first-sideband contrast: PT {:.3e}, bare cavity {:.3e}",
        ladder.contrast(1),
        single.contrast(1)
    );
    Ok(())
}
