//! Supermode frequencies across the transition of the default gain/loss pair.
//!
//!     cargo run --example supermodes

use pt_metrology::model::{decompose, ep_threshold, CoupledModeSystem, DEFAULT_TRANSITION_TOL};

fn main() -> pt_metrology::Result<()> {
    let base = CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0)?;
    let threshold = ep_threshold(&base);
    println!("threshold coupling {threshold} MHz\n");
    println!("{:>7} {:>16} {:>9} {:>9} {:>9} {:>7} {:>8}", "g1", "phase", "Re w+", "G+", "G-", "stable", "g_eff");
    for g1 in [0.0, 9.0, 17.9, 18.0, 18.1, 19.8, 25.0, 40.0] {
        let d = decompose(&base.with_g1(g1), DEFAULT_TRANSITION_TOL)?;
        println!(
            "{g1:>7.2} {:>16} {:>9.4} {:>9.4} {:>9.4} {:>7} {:>8.4}",
            d.phase.to_string(),
            d.big_omega_plus(),
            d.gamma_plus(),
            d.gamma_minus(),
            d.stable,
            d.g_eff
        );
    }
    Ok(())
}
