//! Displacement and back-action force spectral densities of the coupled-cavity
//! optomechanical transducer, and PT/EP/single-cavity comparison sweeps.
//!
//! ```text
//! S_xx(ω) = Γ₋² ħ Ω₋ / (64 g_eff² P_in) · B(ω)
//! S_FF(ω) = 16 ħ g_eff² P_in / (Γ₋² Ω₋) · B(ω)⁻¹
//! ```
//!
//! with `Γ₋` the smallest supermode decay rate, `Ω₋ = omega0 + Re ω` of that
//! supermode, and bracket `B(ω) = 1 + 4ω²/Γ₋²` (dimensional, the default) or
//! `1 + 4ω/Γ₋²` (as printed). The product `S_xx·S_FF` is `ħ²/4` identically.
//!
//! Absolute values carry the formula's units (MHz·J·s/W); only ratios are
//! meaningful.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{decompose, ep_threshold, CoupledModeSystem, SupermodeDecomposition, DEFAULT_TRANSITION_TOL};
use crate::spectrum::MechanicalMode;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Angular carrier frequency of a 1550 nm mode in rad/µs (2πc/λ).
pub const OMEGA0_1550NM: f64 = 2.0 * PI * 299_792_458.0 / 1550e-9 * 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BracketMode {
    /// `1 + 4ω/Γ₋²`, exactly as the closed form is usually quoted.
    AsPrinted,
    /// `1 + 4ω²/Γ₋²`, dimensionally consistent.
    #[default]
    Dimensional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityParams {
    /// Input power, W.
    pub p_in: f64,
    /// Optical carrier, MHz (angular).
    pub omega0: f64,
    pub hbar: f64,
    pub bracket_mode: BracketMode,
}

impl Default for SensitivityParams {
    fn default() -> Self {
        SensitivityParams {
            p_in: 1e-3,
            omega0: OMEGA0_1550NM,
            hbar: HBAR,
            bracket_mode: BracketMode::Dimensional,
        }
    }
}

impl SensitivityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_in > 0.0 && self.p_in.is_finite()) {
            return Err(Error::invalid("p_in", format!("must be > 0, got {}", self.p_in)));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::invalid("omega0", format!("must be > 0, got {}", self.omega0)));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::invalid("hbar", format!("must be > 0, got {}", self.hbar)));
        }
        Ok(())
    }

    fn bracket(&self, omega: f64, decay: f64) -> f64 {
        match self.bracket_mode {
            BracketMode::AsPrinted => 1.0 + 4.0 * omega / (decay * decay),
            BracketMode::Dimensional => 1.0 + 4.0 * omega * omega / (decay * decay),
        }
    }
}

/// `(Γ₋, Ω₋, g_eff)` entering the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransducerRates {
    pub decay: f64,
    pub frequency: f64,
    pub g_eff: f64,
}

impl TransducerRates {
    pub fn from_decomposition(decomp: &SupermodeDecomposition, sp: &SensitivityParams) -> Result<Self> {
        sp.validate()?;
        decomp.require_stable()?;
        if decomp.g_eff.is_infinite() {
            // S_xx → 0 and S_FF → ∞ in this limit; there is no number to report
            return Err(Error::TransitionSingularity {
                g1: decomp.dlt.abs(),
                threshold: decomp.dlt.abs(),
            });
        }
        if !(decomp.g_eff > 0.0) {
            return Err(Error::invalid("g_eff", "effective coupling must be > 0 (is g zero?)"));
        }
        let mode = decomp.least_damped();
        Ok(TransducerRates {
            decay: -mode.im,
            frequency: sp.omega0 + mode.re,
            g_eff: decomp.g_eff,
        })
    }

    /// Single lossy cavity: `Γ₋ → κ`, `Ω₋ → omega0 + Δ`, `g_eff → g/κ`.
    pub fn single_cavity(kappa: f64, delta: f64, g: f64, sp: &SensitivityParams) -> Result<Self> {
        sp.validate()?;
        if !(kappa > 0.0) {
            return Err(Error::invalid("kappa", format!("must be > 0, got {kappa}")));
        }
        if !(g > 0.0) {
            return Err(Error::invalid("g", "must be > 0 for a finite spectral density"));
        }
        Ok(TransducerRates {
            decay: kappa,
            frequency: sp.omega0 + delta,
            g_eff: g / kappa,
        })
    }

    pub fn s_xx(&self, sp: &SensitivityParams, omega: f64) -> f64 {
        let d2 = self.decay * self.decay;
        d2 * sp.hbar * self.frequency / (64.0 * self.g_eff * self.g_eff * sp.p_in) * sp.bracket(omega, self.decay)
    }

    pub fn s_ff(&self, sp: &SensitivityParams, omega: f64) -> f64 {
        let d2 = self.decay * self.decay;
        16.0 * sp.hbar * self.g_eff * self.g_eff * sp.p_in / (d2 * self.frequency) / sp.bracket(omega, self.decay)
    }
}

/// Displacement spectral density `S_xx(ω)`.
pub fn displacement_psd(decomp: &SupermodeDecomposition, sp: &SensitivityParams, omega: f64) -> Result<f64> {
    Ok(TransducerRates::from_decomposition(decomp, sp)?.s_xx(sp, omega))
}

/// Back-action force spectral density `S_FF(ω)`.
pub fn force_psd(decomp: &SupermodeDecomposition, sp: &SensitivityParams, omega: f64) -> Result<f64> {
    Ok(TransducerRates::from_decomposition(decomp, sp)?.s_ff(sp, omega))
}

/// `S_xx·S_FF`; saturates the Heisenberg bound `ħ²/4`.
pub fn heisenberg_product(decomp: &SupermodeDecomposition, sp: &SensitivityParams, omega: f64) -> Result<f64> {
    let rates = TransducerRates::from_decomposition(decomp, sp)?;
    Ok(rates.s_xx(sp, omega) * rates.s_ff(sp, omega))
}

/// Per-point outcome of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointStatus {
    Ok,
    /// A supermode amplifies; no steady state.
    Unstable { decay_rate: f64 },
    /// The point sits on the transition, where `g_eff` diverges.
    Transition,
}

impl PointStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, PointStatus::Ok)
    }

    pub fn label(&self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::Unstable { .. } => "unstable",
            PointStatus::Transition => "transition",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    /// Coupling in units of the base system's threshold.
    pub sweep_values: Vec<f64>,
    pub s_xx_pt: Vec<f64>,
    pub s_xx_single: Vec<f64>,
    pub s_xx_ep: Vec<f64>,
    pub ratio_pt: Vec<f64>,
    pub ratio_ep: Vec<f64>,
    pub status_pt: Vec<PointStatus>,
    pub status_ep: Vec<PointStatus>,
}

fn s_xx_or_status(sys: &CoupledModeSystem, sp: &SensitivityParams, omega: f64) -> Result<(f64, PointStatus)> {
    let decomp = decompose(sys, DEFAULT_TRANSITION_TOL)?;
    match displacement_psd(&decomp, sp, omega) {
        Ok(v) => Ok((v, PointStatus::Ok)),
        Err(Error::Unstable { decay_rate, .. }) => Ok((f64::NAN, PointStatus::Unstable { decay_rate })),
        Err(Error::TransitionSingularity { .. }) => Ok((f64::NAN, PointStatus::Transition)),
        Err(e) => Err(e),
    }
}

/// Evaluates `S_xx(ω_m)` along `grid` for the PT system, the EP system and the
/// single-cavity baseline.
///
/// Grid values are couplings in units of the threshold of `base`; both `base`
/// and `ep_base` are evaluated at the same physical coupling
/// `g1 = r·threshold(base)`. Failed points carry NaN and a status, never a
/// number.
pub fn sensitivity_ratio_sweep(
    base: &CoupledModeSystem,
    ep_base: &CoupledModeSystem,
    mech: &MechanicalMode,
    sp: &SensitivityParams,
    grid: &[f64],
) -> Result<SensitivityCurve> {
    base.validate()?;
    ep_base.validate()?;
    mech.validate()?;
    sp.validate()?;
    if base.d1 != ep_base.d1 || base.g != ep_base.g {
        return Err(Error::invalid("ep_base", "must share d1 and g with the PT system"));
    }
    let threshold = ep_threshold(base);
    if !(threshold > 0.0) {
        return Err(Error::invalid("base", "threshold coupling is zero; cannot normalize the sweep"));
    }
    let omega = mech.omega_m;
    let single = TransducerRates::single_cavity(base.d1, base.delta, base.g, sp)?.s_xx(sp, omega);

    let mut curve = SensitivityCurve {
        sweep_values: grid.to_vec(),
        s_xx_pt: Vec::with_capacity(grid.len()),
        s_xx_single: vec![single; grid.len()],
        s_xx_ep: Vec::with_capacity(grid.len()),
        ratio_pt: Vec::with_capacity(grid.len()),
        ratio_ep: Vec::with_capacity(grid.len()),
        status_pt: Vec::with_capacity(grid.len()),
        status_ep: Vec::with_capacity(grid.len()),
    };
    for &r in grid {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("grid", format!("coupling ratio must be >= 0, got {r}")));
        }
        let g1 = r * threshold;
        let (pt, pt_status) = s_xx_or_status(&base.with_g1(g1), sp, omega)?;
        let (ep, ep_status) = s_xx_or_status(&ep_base.with_g1(g1), sp, omega)?;
        curve.s_xx_pt.push(pt);
        curve.s_xx_ep.push(ep);
        curve.ratio_pt.push(pt / single);
        curve.ratio_ep.push(ep / single);
        curve.status_pt.push(pt_status);
        curve.status_ep.push(ep_status);
    }
    Ok(curve)
}
