//! Parameter sweeps evaluated on the rayon pool. Results always come back in
//! grid order, so output does not depend on the number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ep_threshold, CoupledModeSystem};
use crate::sensitivity::PointStatus;
use crate::spectrum::{amplification_factor, formal_amplification_factor, sideband_ladder, MechanicalMode, SidebandLadder};

/// Evaluates `f` on every grid point in parallel, preserving order.
pub fn par_map<T, F>(grid: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    grid.par_iter().map(|&x| f(x)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationCurve {
    /// Coupling in units of the threshold.
    pub ratios: Vec<f64>,
    /// `A` per point; NaN where the status is not ok.
    pub values: Vec<f64>,
    pub status: Vec<PointStatus>,
}

impl AmplificationCurve {
    /// Grid index of the largest valid `A`.
    pub fn peak_index(&self) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(k, v)| self.status[*k].is_ok() && v.is_finite())
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
    }
}

/// `A` along `g1 = r·threshold(sys)` for every `r` in `ratios`. Points with an
/// amplifying supermode are marked, not evaluated.
pub fn amplification_sweep(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    order: usize,
    ratios: &[f64],
) -> Result<AmplificationCurve> {
    let threshold = ep_threshold(sys);
    let results = par_map(ratios, |r| {
        match amplification_factor(&sys.with_g1(r * threshold), mech, eps, order) {
            Ok(a) => Ok((a, PointStatus::Ok)),
            Err(Error::Unstable { decay_rate, .. } | Error::ParametricInstability { decay_rate }) => {
                Ok((f64::NAN, PointStatus::Unstable { decay_rate }))
            }
            Err(e) => Err(e),
        }
    });
    let mut curve = AmplificationCurve {
        ratios: ratios.to_vec(),
        values: Vec::with_capacity(ratios.len()),
        status: Vec::with_capacity(ratios.len()),
    };
    for r in results {
        let (a, s) = r?;
        curve.values.push(a);
        curve.status.push(s);
    }
    Ok(curve)
}

/// Formal (ungated) `A` along the same grid, for points where the steady
/// state does not exist.
pub fn formal_amplification_sweep(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    order: usize,
    ratios: &[f64],
) -> Result<Vec<f64>> {
    let threshold = ep_threshold(sys);
    par_map(ratios, |r| formal_amplification_factor(&sys.with_g1(r * threshold), mech, eps, order))
        .into_iter()
        .collect()
}

/// Raises the ladder order from `min_order` until the truncation flag clears.
pub fn converged_ladder(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    min_order: usize,
) -> Result<SidebandLadder> {
    let mut order = min_order.max(2);
    loop {
        let ladder = sideband_ladder(sys, mech, eps, order)?;
        if !ladder.truncation_warning || order >= 64 {
            return Ok(ladder);
        }
        order += 2;
    }
}

/// Shortest round-trip decimal; empty for NaN.
pub fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:?}")
    }
}
