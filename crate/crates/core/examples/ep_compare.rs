//! Closed-form amplification ratio of a gain/loss pair over a lossy pair
//! with matched rates, as the gain approaches the loss.
//!
//!     cargo run --example ep_compare

use pt_metrology::model::pt_ep_amplification_ratio;

fn main() {
    let kappa = 20.0;
    for gamma in [4.0, 8.0, 12.0, 16.0, 18.0, 19.0, 19.9, 20.0] {
        match pt_ep_amplification_ratio(kappa, gamma, 16.0) {
            Ok(r) => println!("gamma = {gamma:>5}: ratio {r:.4}"),
            Err(e) => println!("gamma = {gamma:>5}: {e}"),
        }
    }
}
