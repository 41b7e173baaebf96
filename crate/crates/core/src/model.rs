//! Two-mode non-Hermitian coupled-cavity model and its eigenstructure.
//!
//! Mode 1 is the passive cavity that couples to the device under test; mode 2
//! carries a *signed* damping rate, so a gain cavity (PT pair) is `d2 = -γ`
//! and a second lossy cavity (EP pair) is `d2 = κ₁ ≥ 0`. Every rate is in MHz.
//!
//! The supermodes of `[[Δ − i·d1, g1], [g1, Δ − i·d2]]` are
//!
//! ```text
//! ω± = Δ − i·chi ± β,   β = √(g1² − dlt²),   chi = (d1 + d2)/2,   dlt = (d1 − d2)/2
//! ```
//!
//! and they coalesce when `g1 = |dlt|`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance used to label a system as sitting on the transition.
pub const DEFAULT_TRANSITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledModeSystem {
    /// Common detuning of both modes from the drive.
    pub delta: f64,
    /// Damping of the passive, DUT-coupled cavity (κ).
    pub d1: f64,
    /// Signed damping of the second cavity: `-γ` for gain, `κ₁` for loss.
    pub d2: f64,
    /// Inter-cavity coupling.
    pub g1: f64,
    /// DUT–cavity coupling.
    pub g: f64,
}

impl CoupledModeSystem {
    pub fn new(delta: f64, d1: f64, d2: f64, g1: f64, g: f64) -> Result<Self> {
        let sys = CoupledModeSystem {
            delta,
            d1,
            d2,
            g1,
            g,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Passive cavity (loss `kappa`) coupled to a gain cavity (gain `gamma`).
    pub fn pt(delta: f64, kappa: f64, gamma: f64, g1: f64, g: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::invalid("gamma", format!("gain rate must be >= 0, got {gamma}")));
        }
        Self::new(delta, kappa, -gamma, g1, g)
    }

    /// Two lossy cavities with loss rates `kappa` (DUT side) and `kappa1`.
    pub fn ep(delta: f64, kappa: f64, kappa1: f64, g1: f64, g: f64) -> Result<Self> {
        if !(kappa1 >= 0.0) {
            return Err(Error::invalid("kappa1", format!("loss rate must be >= 0, got {kappa1}")));
        }
        Self::new(delta, kappa, kappa1, g1, g)
    }

    /// Single lossy cavity reference: mode 2 decoupled (`g1 = 0`) and given the
    /// same loss as mode 1 so it never affects stability.
    pub fn single_cavity(delta: f64, kappa: f64, g: f64) -> Result<Self> {
        Self::new(delta, kappa, kappa, 0.0, g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta", self.delta),
            ("d1", self.d1),
            ("d2", self.d2),
            ("g1", self.g1),
            ("g", self.g),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.d1 <= 0.0 {
            return Err(Error::invalid("d1", format!("passive damping must be > 0, got {}", self.d1)));
        }
        if self.g1 < 0.0 {
            return Err(Error::invalid("g1", format!("must be >= 0, got {}", self.g1)));
        }
        if self.g < 0.0 {
            return Err(Error::invalid("g", format!("must be >= 0, got {}", self.g)));
        }
        Ok(())
    }

    /// Mean damping `(d1 + d2)/2`; equals χ = (κ − γ)/2 for a PT pair.
    pub fn chi(&self) -> f64 {
        0.5 * (self.d1 + self.d2)
    }

    /// Damping contrast `(d1 − d2)/2`; equals Γ = (κ + γ)/2 for a PT pair.
    pub fn dlt(&self) -> f64 {
        0.5 * (self.d1 - self.d2)
    }

    /// True when mode 2 carries gain.
    pub fn has_gain(&self) -> bool {
        self.d2 < 0.0
    }

    pub fn with_g1(&self, g1: f64) -> Self {
        CoupledModeSystem { g1, ..*self }
    }

    pub fn with_g(&self, g: f64) -> Self {
        CoupledModeSystem { g, ..*self }
    }

    /// Every rate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        CoupledModeSystem {
            delta: self.delta * s,
            d1: self.d1 * s,
            d2: self.d2 * s,
            g1: self.g1 * s,
            g: self.g * s,
        }
    }

    /// The single-cavity reference sharing this system's `delta`, `d1` and `g`.
    pub fn reference(&self) -> Self {
        CoupledModeSystem {
            d2: self.d1,
            g1: 0.0,
            ..*self
        }
    }

    /// `g1² − dlt²`, evaluated as a product of sum and difference so it stays
    /// accurate next to the transition.
    pub(crate) fn discriminant(&self) -> f64 {
        let t = self.dlt().abs();
        (self.g1 - t) * (self.g1 + t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// `g1 > |dlt|`: split resonances, equal linewidths.
    PtSymmetric,
    /// `g1 < |dlt|`: degenerate resonances, unequal linewidths.
    Broken,
    /// `g1 ≈ |dlt|` within the configured tolerance.
    Transition,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::PtSymmetric => "PT_SYMMETRIC",
            Phase::Broken => "BROKEN",
            Phase::Transition => "TRANSITION",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupermodeDecomposition {
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    /// Principal square root of `g1² − dlt²`.
    pub beta: Complex64,
    pub chi: f64,
    pub dlt: f64,
    pub phase: Phase,
    pub stable: bool,
    pub stability_margin: f64,
    /// Effective supermode–DUT coupling; `+∞` exactly at the transition.
    pub g_eff: f64,
}

impl SupermodeDecomposition {
    /// Resonance frequency Ω₊.
    pub fn big_omega_plus(&self) -> f64 {
        self.omega_plus.re
    }

    pub fn big_omega_minus(&self) -> f64 {
        self.omega_minus.re
    }

    /// Decay rate Γ₊ (negative means amplification).
    pub fn gamma_plus(&self) -> f64 {
        -self.omega_plus.im
    }

    pub fn gamma_minus(&self) -> f64 {
        -self.omega_minus.im
    }

    /// The supermode with the smallest decay rate. On a tie (PT-symmetric
    /// phase) this is ω₋, the lower-frequency one.
    pub fn least_damped(&self) -> Complex64 {
        if self.gamma_plus() < self.gamma_minus() {
            self.omega_plus
        } else {
            self.omega_minus
        }
    }

    /// `β_r`: `|Re β|` in the PT-symmetric phase, `|Im β|` otherwise.
    pub fn beta_r(&self) -> f64 {
        match self.phase {
            Phase::PtSymmetric => self.beta.re.abs(),
            _ => self.beta.im.abs(),
        }
    }

    /// Fails with [`Error::Unstable`] naming the amplifying supermode.
    pub fn require_stable(&self) -> Result<()> {
        if self.stable {
            return Ok(());
        }
        let (mode, decay_rate) = if self.gamma_plus() <= self.gamma_minus() {
            ("omega+", self.gamma_plus())
        } else {
            ("omega-", self.gamma_minus())
        };
        Err(Error::Unstable { mode, decay_rate })
    }
}

/// Principal branch of the square root of a real number: `Re ≥ 0`, and
/// `Im ≥ 0` when the real part vanishes.
fn principal_sqrt(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

pub fn classify(sys: &CoupledModeSystem, tol: f64) -> Phase {
    let threshold = sys.dlt().abs();
    let scale = sys.g1.max(threshold).max(1.0);
    if (sys.g1 - threshold).abs() <= tol * scale {
        Phase::Transition
    } else if sys.g1 > threshold {
        Phase::PtSymmetric
    } else {
        Phase::Broken
    }
}

/// Supermode frequencies, phase label, stability verdict and effective coupling.
pub fn decompose(sys: &CoupledModeSystem, tol: f64) -> Result<SupermodeDecomposition> {
    sys.validate()?;
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::invalid("tol", format!("must lie in (0, 1e-2], got {tol}")));
    }
    let chi = sys.chi();
    let dlt = sys.dlt();
    let centre = Complex64::new(sys.delta, -chi);
    let (beta, omega_plus, omega_minus) = if sys.g1 == 0.0 {
        // bare cavities; avoid the rounding of chi ± |dlt|
        let (lo, hi) = (sys.d1.min(sys.d2), sys.d1.max(sys.d2));
        (
            Complex64::new(0.0, dlt.abs()),
            Complex64::new(sys.delta, -lo),
            Complex64::new(sys.delta, -hi),
        )
    } else {
        let beta = principal_sqrt(sys.discriminant());
        (beta, centre + beta, centre - beta)
    };
    let stability_margin = (-omega_plus.im).min(-omega_minus.im);
    let g_eff = effective_coupling(sys).unwrap_or(f64::INFINITY);

    Ok(SupermodeDecomposition {
        omega_plus,
        omega_minus,
        beta,
        chi,
        dlt,
        phase: classify(sys, tol),
        stable: stability_margin > 0.0,
        stability_margin,
        g_eff,
    })
}

/// `g / (2·√|g1² − dlt²|)`. Dimensionless and invariant under a uniform
/// rescaling of all rates.
pub fn effective_coupling(sys: &CoupledModeSystem) -> Result<f64> {
    let disc = sys.discriminant();
    let dlt = sys.dlt();
    let scale = (sys.g1 * sys.g1).max(dlt * dlt);
    if disc == 0.0 || disc.abs() < f64::EPSILON * scale {
        return Err(Error::TransitionSingularity {
            g1: sys.g1,
            threshold: dlt.abs(),
        });
    }
    Ok(sys.g / (2.0 * disc.abs().sqrt()))
}

/// Coupling at which the two eigenfrequencies coalesce: `(κ − κ₁)/2` for a
/// lossy pair, Γ = `(κ + γ)/2` for a gain–loss pair.
pub fn ep_threshold(sys: &CoupledModeSystem) -> f64 {
    sys.dlt().abs()
}

/// Ratio of the PT amplification factor to that of a two-lossy-cavity system,
/// `4γ²(κ + κ₁)/(κ − γ)³`.
pub fn pt_ep_amplification_ratio(kappa: f64, gamma: f64, kappa1: f64) -> Result<f64> {
    if !(kappa.is_finite() && gamma.is_finite() && kappa1.is_finite()) {
        return Err(Error::invalid("kappa/gamma/kappa1", "must be finite"));
    }
    if !(gamma > 0.0) {
        return Err(Error::invalid("gamma", format!("must be > 0, got {gamma}")));
    }
    if kappa1 < 0.0 {
        return Err(Error::invalid("kappa1", format!("must be >= 0, got {kappa1}")));
    }
    if kappa == gamma {
        return Err(Error::BalancedGain { kappa });
    }
    if kappa < gamma {
        return Err(Error::invalid(
            "gamma",
            format!("gain {gamma} exceeds loss {kappa}; the ratio is defined for kappa > gamma"),
        ));
    }
    Ok(4.0 * gamma * gamma * (kappa + kappa1) / (kappa - gamma).powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn nominal_parameters_are_pt_symmetric() {
        let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0).unwrap();
        let d = decompose(&sys, DEFAULT_TRANSITION_TOL).unwrap();
        assert_eq!(d.chi, 2.0);
        assert_eq!(d.dlt, 18.0);
        assert!((d.beta.re - 8.2486).abs() < 1e-4);
        assert_eq!(d.beta.im, 0.0);
        assert!((d.big_omega_plus() - 8.2486).abs() < 1e-4);
        assert!((d.big_omega_minus() + 8.2486).abs() < 1e-4);
        assert!((d.gamma_plus() - 2.0).abs() < 1e-12);
        assert!((d.gamma_minus() - 2.0).abs() < 1e-12);
        assert_eq!(d.phase, Phase::PtSymmetric);
        assert!(d.stable);
    }

    #[test]
    fn uncoupled_limit_recovers_bare_rates() {
        let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, 0.0, 5.0).unwrap();
        let d = decompose(&sys, DEFAULT_TRANSITION_TOL).unwrap();
        assert_eq!(d.beta, Complex64::new(0.0, 18.0));
        // principal branch: ω₊ carries the smaller decay rate
        assert_eq!(d.gamma_plus(), -16.0);
        assert_eq!(d.gamma_minus(), 20.0);
        assert_eq!(d.phase, Phase::Broken);
        assert!(!d.stable);
        let err = d.require_stable().unwrap_err();
        assert!(err.to_string().contains("omega+"));
    }

    #[test]
    fn transition_point_coalesces() {
        let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, 18.0, 5.0).unwrap();
        let d = decompose(&sys, DEFAULT_TRANSITION_TOL).unwrap();
        assert_eq!(d.beta, Complex64::new(0.0, 0.0));
        assert_eq!(d.omega_plus, Complex64::new(0.0, -2.0));
        assert_eq!(d.omega_minus, d.omega_plus);
        assert_eq!(d.phase, Phase::Transition);
        assert!(d.g_eff.is_infinite());
    }

    #[test]
    fn ep_configuration() {
        let sys = CoupledModeSystem::ep(0.0, 20.0, 16.0, 1.0, 5.0).unwrap();
        let d = decompose(&sys, DEFAULT_TRANSITION_TOL).unwrap();
        assert_eq!(d.chi, 18.0);
        assert_eq!(d.dlt, 2.0);
        assert!((d.beta.im - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(d.big_omega_plus(), 0.0);
        assert_eq!(d.big_omega_minus(), 0.0);
        assert!((d.gamma_plus() - 16.268).abs() < 1e-3);
        assert!((d.gamma_minus() - 19.732).abs() < 1e-3);
        assert!(d.stable);
        assert_eq!(d.phase, Phase::Broken);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CoupledModeSystem::new(0.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(CoupledModeSystem::new(0.0, 1.0, 1.0, -1.0, 1.0).is_err());
        assert!(CoupledModeSystem::new(0.0, 1.0, 1.0, 1.0, -1.0).is_err());
        assert!(CoupledModeSystem::new(f64::NAN, 1.0, 1.0, 1.0, 1.0).is_err());
        let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0).unwrap();
        assert!(decompose(&sys, 0.0).is_err());
        assert!(decompose(&sys, 0.1).is_err());
    }

    #[test]
    fn effective_coupling_values() {
        let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0).unwrap();
        assert!((effective_coupling(&sys).unwrap() - 0.30308).abs() < 1e-5);
        let uncoupled = sys.with_g1(0.0);
        assert!((effective_coupling(&uncoupled).unwrap() - 5.0 / 36.0).abs() < 1e-12);
        let near = sys.with_g1(18.1);
        let v = effective_coupling(&near).unwrap();
        assert!((v - 5.0 / (2.0 * 3.61f64.sqrt())).abs() < 1e-9);
        assert!(v > effective_coupling(&uncoupled).unwrap());
        assert!(matches!(
            effective_coupling(&sys.with_g1(18.0)),
            Err(Error::TransitionSingularity { .. })
        ));
    }

    #[test]
    fn effective_coupling_diverges_monotonically() {
        let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0).unwrap();
        let dlt = sys.dlt();
        for side in [1.0, -1.0] {
            let mut last = 0.0;
            for k in 1..=6 {
                let offset = 10f64.powi(-k) * dlt;
                let v = effective_coupling(&sys.with_g1(dlt + side * offset)).unwrap();
                assert!(v > last, "side {side}, k {k}");
                last = v;
            }
        }
    }

    #[test]
    fn thresholds() {
        let ep = CoupledModeSystem::ep(0.0, 20.0, 16.0, 1.0, 5.0).unwrap();
        assert_eq!(ep_threshold(&ep), 2.0);
        let pt = CoupledModeSystem::pt(0.0, 20.0, 16.0, 1.0, 5.0).unwrap();
        assert_eq!(ep_threshold(&pt), 18.0);
        let twin = CoupledModeSystem::ep(0.0, 20.0, 20.0, 1.0, 5.0).unwrap();
        assert_eq!(ep_threshold(&twin), 0.0);
    }

    #[test]
    fn amplification_ratio_formula() {
        assert_eq!(pt_ep_amplification_ratio(20.0, 16.0, 16.0).unwrap(), 576.0);
        assert!((pt_ep_amplification_ratio(20.0, 10.0, 16.0).unwrap() - 14.4).abs() < 1e-12);
        assert!(matches!(
            pt_ep_amplification_ratio(20.0, 20.0, 16.0),
            Err(Error::BalancedGain { .. })
        ));
        assert!(pt_ep_amplification_ratio(20.0, 21.0, 16.0).is_err());
        assert!(pt_ep_amplification_ratio(20.0, 0.0, 16.0).is_err());
        let near = pt_ep_amplification_ratio(20.0, 20.0 - 1e-6, 16.0).unwrap();
        assert!(near > 1e20);
    }

    proptest! {
        #[test]
        fn trace_and_square_identities(
            delta in -30.0..30.0f64,
            d1 in 0.1..50.0f64,
            d2 in -50.0..50.0f64,
            g1 in 0.0..60.0f64,
        ) {
            let sys = CoupledModeSystem::new(delta, d1, d2, g1, 1.0).unwrap();
            let d = decompose(&sys, DEFAULT_TRANSITION_TOL).unwrap();
            let sum = d.omega_plus + d.omega_minus;
            let expected = Complex64::new(2.0 * delta, -2.0 * d.chi);
            prop_assert!((sum - expected).norm() <= 1e-12 * expected.norm().max(1.0));
            let shifted = d.omega_plus - Complex64::new(delta, -d.chi);
            let sq = shifted * shifted;
            let target = g1 * g1 - d.dlt * d.dlt;
            prop_assert!((sq.re - target).abs() <= 1e-12 * (g1 * g1).max(d.dlt * d.dlt).max(1e-300));
            prop_assert!(sq.im.abs() <= 1e-12 * (g1 * g1).max(d.dlt * d.dlt).max(1e-300));
        }

        #[test]
        fn phase_invariants(
            d1 in 0.1..50.0f64,
            d2 in -50.0..50.0f64,
            g1 in 0.0..60.0f64,
        ) {
            let sys = CoupledModeSystem::new(0.0, d1, d2, g1, 1.0).unwrap();
            let d = decompose(&sys, DEFAULT_TRANSITION_TOL).unwrap();
            match d.phase {
                Phase::PtSymmetric => {
                    prop_assert!((d.gamma_plus() - d.chi).abs() <= 1e-12 * d.chi.abs().max(1.0));
                    prop_assert!((d.gamma_minus() - d.chi).abs() <= 1e-12 * d.chi.abs().max(1.0));
                    prop_assert!(d.big_omega_plus() - d.big_omega_minus() > 0.0);
                }
                Phase::Broken => {
                    prop_assert_eq!(d.big_omega_plus(), 0.0);
                    prop_assert_eq!(d.big_omega_minus(), 0.0);
                    prop_assert!(d.gamma_plus() < d.gamma_minus());
                }
                Phase::Transition => {}
            }
            prop_assert_eq!(d.stable, d.gamma_plus() > 0.0 && d.gamma_minus() > 0.0);
        }

        #[test]
        fn phase_boundary_never_skips(dlt in 0.01..100.0f64, chi in -5.0..5.0f64) {
            let d1 = chi + dlt;
            prop_assume!(d1 > 0.0);
            let base = CoupledModeSystem::new(0.0, d1, chi - dlt, dlt, 1.0).unwrap();
            let above = classify(&base.with_g1(dlt * (1.0 + 1e-6)), DEFAULT_TRANSITION_TOL);
            let below = classify(&base.with_g1(dlt * (1.0 - 1e-6)), DEFAULT_TRANSITION_TOL);
            prop_assert!(matches!(above, Phase::PtSymmetric | Phase::Transition));
            prop_assert!(matches!(below, Phase::Broken | Phase::Transition));
        }

        #[test]
        fn uncoupled_rates_exact(d1 in 0.1..50.0f64, d2 in -50.0..50.0f64) {
            let sys = CoupledModeSystem::new(0.0, d1, d2, 0.0, 1.0).unwrap();
            let d = decompose(&sys, DEFAULT_TRANSITION_TOL).unwrap();
            let mut got = [d.gamma_plus(), d.gamma_minus()];
            got.sort_by(f64::total_cmp);
            let mut want = [d1, d2];
            want.sort_by(f64::total_cmp);
            prop_assert_eq!(got, want);
        }

        #[test]
        fn scale_invariance(
            delta in -30.0..30.0f64,
            d1 in 0.1..50.0f64,
            d2 in -50.0..50.0f64,
            g1 in 0.0..60.0f64,
            g in 0.0..10.0f64,
            s in 1e-3..1e3f64,
        ) {
            let sys = CoupledModeSystem::new(delta, d1, d2, g1, g).unwrap();
            prop_assume!((g1 - sys.dlt().abs()).abs() > 1e-6 * g1.max(1.0));
            let a = decompose(&sys, DEFAULT_TRANSITION_TOL).unwrap();
            let b = decompose(&sys.scaled(s), DEFAULT_TRANSITION_TOL).unwrap();
            let tol = 1e-12 * s * (a.omega_plus.norm() + a.omega_minus.norm()).max(1e-300);
            prop_assert!((b.omega_plus - a.omega_plus * s).norm() <= tol);
            prop_assert!((b.omega_minus - a.omega_minus * s).norm() <= tol);
            prop_assert_eq!(a.phase, b.phase);
            prop_assert_eq!(a.stable, b.stable);
            prop_assert!(close(a.g_eff, b.g_eff, 1e-12));
        }
    }
}
