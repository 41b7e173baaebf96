//! Amplification factor A from g1 = 0.5 to 1.5 times the threshold.
//! Statically unstable couplings are reported through the formal response.
//!
//!     cargo run --release --example amplification_sweep

use pt_metrology::model::CoupledModeSystem;
use pt_metrology::spectrum::{uniform_grid, MechanicalMode};
use pt_metrology::sweep::{amplification_sweep, formal_amplification_sweep};

fn main() -> pt_metrology::Result<()> {
    let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0)?;
    let mech = MechanicalMode::new(6.0, 0.2, 0.2)?;
    let ratios = uniform_grid(0.5, 1.5, 1001);

    let curve = amplification_sweep(&sys, &mech, 1.0, 5, &ratios)?;
    let formal = formal_amplification_sweep(&sys, &mech, 1.0, 5, &ratios)?;
    for k in (0..ratios.len()).step_by(50) {
        let a = if curve.status[k].is_ok() { format!("{:.4}", curve.values[k]) } else { "-".into() };
        println!("{:.3}  A = {a:>10}  formal {:.4}  {}", ratios[k], formal[k], curve.status[k].label());
    }
    let peak = curve.peak_index().expect("stable points exist");
    println!(
        "peak A = {:.2} at g1/threshold = {:.3}, {:.0}x the formal value at 0.5",
        curve.values[peak],
        ratios[peak],
        curve.values[peak] / formal[0]
    );
    Ok(())
}
