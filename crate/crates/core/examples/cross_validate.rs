//! Integrates the driven equations in time and compares the fitted sideband
//! powers with the ladder solution. Also shows the step-size guard.
//!
//!     cargo run --release --example cross_validate

use pt_metrology::dynamics::{cross_validate, step_bound, CrossValidationConfig, Verdict};
use pt_metrology::model::CoupledModeSystem;
use pt_metrology::spectrum::MechanicalMode;

fn main() -> pt_metrology::Result<()> {
    let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0)?;
    let mech = MechanicalMode::new(6.0, 0.2, 0.2)?;

    let report = cross_validate(&sys, &mech, 1.0, &CrossValidationConfig::default())?;
    for d in &report.deviations {
        println!(
            "n = {}: ladder {:.6e}  oracle {:.6e}  rel. dev {:.2e}",
            d.n, d.ladder_power, d.oracle_power, d.relative_deviation
        );
    }
    println!("fit residual {:.1e}, verdict {:?}", report.fit_residual, report.verdict);
    assert_eq!(report.verdict, Verdict::Pass);

    let coarse = CrossValidationConfig {
        dt: Some(10.0 * step_bound(&sys, &mech)),
        ..Default::default()
    };
    match cross_validate(&sys, &mech, 1.0, &coarse) {
        Ok(r) => println!("coarse step: {:?}", r.verdict),
        Err(e) => println!("coarse step rejected: {e}"),
    }
    Ok(())
}
