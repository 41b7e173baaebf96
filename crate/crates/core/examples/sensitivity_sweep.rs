//! Displacement sensitivity at the mechanical frequency, relative to a bare
//! cavity, for the gain/loss pair and a lossy pair at the same coupling.
//!
//!     cargo run --example sensitivity_sweep

use pt_metrology::model::{decompose, CoupledModeSystem, DEFAULT_TRANSITION_TOL};
use pt_metrology::sensitivity::{heisenberg_product, sensitivity_ratio_sweep, SensitivityParams};
use pt_metrology::spectrum::MechanicalMode;

fn main() -> pt_metrology::Result<()> {
    let pt = CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0)?;
    let ep = CoupledModeSystem::ep(0.0, 20.0, 16.0, 19.8, 5.0)?;
    let mech = MechanicalMode::new(6.0, 0.2, 0.2)?;
    let sp = SensitivityParams::default();

    let grid = [0.99, 0.999, 1.001, 1.006, 1.01, 1.05, 1.1, 1.5, 3.0];
    let c = sensitivity_ratio_sweep(&pt, &ep, &mech, &sp, &grid)?;
    println!("{:>8} {:>12} {:>12}  status", "g1/thr", "ratio_pt", "ratio_ep");
    for k in 0..grid.len() {
        println!(
            "{:>8} {:>12.4e} {:>12.4e}  {}",
            grid[k],
            c.ratio_pt[k],
            c.ratio_ep[k],
            c.status_pt[k].label()
        );
    }

    let d = decompose(&pt, DEFAULT_TRANSITION_TOL)?;
    let product = heisenberg_product(&d, &sp, mech.omega_m)?;
    println!("S_xx S_FF / (hbar^2/4) = {}", product / (sp.hbar * sp.hbar / 4.0));
    Ok(())
}
