//! Frequency-domain steady states: background spectra, composite spectra with
//! mechanical sidebands, and the operational amplification factor.
//!
//! Spectra are intracavity `|a|²` of the passive cavity normalized to unit
//! peak. The background is the mode-1 response to a probe offset `ω` from the
//! drive with the DUT decoupled:
//!
//! ```text
//! a₀(ω) = eps / [ i(Δ − ω) + d1 + g1² / (i(Δ − ω) + d2) ]
//! ```

pub mod ladder;
pub mod peaks;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{decompose, CoupledModeSystem, DEFAULT_TRANSITION_TOL};

pub use ladder::{
    formal_sideband_ladder, sideband_ladder, BandMatrix, SidebandLadder, DEFAULT_ORDER, RESIDUAL_TOL, TRUNCATION_WARNING,
};
pub use peaks::{peak_analysis, peak_analysis_with, Peak, PeakOptions};

/// Default number of grid points for rendered spectra (2⁴·10³ + 1).
pub const DEFAULT_GRID_POINTS: usize = 16_001;

/// Mechanical device under test, displaced as `z(t) = z0·cos(ω_m t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalMode {
    pub omega_m: f64,
    pub gamma_m: f64,
    /// Classical displacement amplitude; `g·z0` is a rate in MHz.
    pub z0: f64,
}

impl MechanicalMode {
    pub fn new(omega_m: f64, gamma_m: f64, z0: f64) -> Result<Self> {
        let m = MechanicalMode { omega_m, gamma_m, z0 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0 && self.omega_m.is_finite()) {
            return Err(Error::invalid("omega_m", format!("must be > 0, got {}", self.omega_m)));
        }
        if !(self.gamma_m > 0.0 && self.gamma_m.is_finite()) {
            return Err(Error::invalid("gamma_m", format!("must be > 0, got {}", self.gamma_m)));
        }
        if !(self.z0 >= 0.0 && self.z0.is_finite()) {
            return Err(Error::invalid("z0", format!("must be >= 0, got {}", self.z0)));
        }
        Ok(())
    }

    pub fn with_z0(&self, z0: f64) -> Self {
        MechanicalMode { z0, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentLabel {
    Background,
    Sideband(i32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub label: ComponentLabel,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    PeakUnit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub components: Vec<Component>,
    pub normalization: Normalization,
}

impl SpectrumResult {
    fn from_components(grid: Vec<f64>, components: Vec<Component>) -> Self {
        let mut values = vec![0.0; grid.len()];
        for comp in &components {
            for (v, c) in values.iter_mut().zip(&comp.values) {
                *v += c;
            }
        }
        SpectrumResult {
            grid,
            values,
            components,
            normalization: Normalization::Raw,
        }
    }

    /// Rescales the total and every component so the total peaks at one.
    pub fn peak_normalized(mut self) -> Result<Self> {
        let max = self.values.iter().copied().fold(0.0, f64::max);
        if !(max > 0.0 && max.is_finite()) {
            return Err(Error::invalid("spectrum", "cannot normalize a spectrum without a positive peak"));
        }
        let scale = 1.0 / max;
        self.values.iter_mut().for_each(|v| *v *= scale);
        for comp in &mut self.components {
            comp.values.iter_mut().for_each(|v| *v *= scale);
        }
        self.normalization = Normalization::PeakUnit;
        Ok(self)
    }

    pub fn component(&self, label: ComponentLabel) -> Option<&Component> {
        self.components.iter().find(|c| c.label == label)
    }

    /// Linear interpolation of the total spectrum at `x`.
    pub fn value_at(&self, x: f64) -> f64 {
        interpolate(&self.grid, &self.values, x)
    }
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    match grid.partition_point(|&g| g < x) {
        0 => values[0],
        k if k == grid.len() => values[k - 1],
        k => {
            let (x0, x1) = (grid[k - 1], grid[k]);
            let t = (x - x0) / (x1 - x0);
            values[k - 1] * (1.0 - t) + values[k] * t
        }
    }
}

/// `n` uniformly spaced points spanning `[start, stop]`.
pub fn uniform_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a grid needs at least two points");
    let step = (stop - start) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == n - 1 { stop } else { start + step * k as f64 })
        .collect()
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::invalid("grid", "needs at least two points"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("grid", "contains non-finite values"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid", "must be strictly increasing"));
    }
    Ok(())
}

/// Mode-1 steady-state response to a probe at offset `omega` from the drive,
/// with the DUT decoupled.
pub fn probe_response(sys: &CoupledModeSystem, omega: f64) -> Complex64 {
    let detune = Complex64::new(0.0, sys.delta - omega);
    let mut denom = detune + sys.d1;
    if sys.g1 != 0.0 {
        denom += sys.g1 * sys.g1 / (detune + sys.d2);
    }
    denom.inv()
}

/// Background spectrum `|a₀(ω)|²`, peak-normalized.
pub fn background_spectrum(sys: &CoupledModeSystem, grid: &[f64]) -> Result<SpectrumResult> {
    check_grid(grid)?;
    decompose(sys, DEFAULT_TRANSITION_TOL)?.require_stable()?;
    let values = grid.iter().map(|&w| probe_response(sys, w).norm_sqr()).collect();
    SpectrumResult::from_components(
        grid.to_vec(),
        vec![Component {
            label: ComponentLabel::Background,
            values,
        }],
    )
    .peak_normalized()
}

/// Unit-area Lorentzian with half-width `w` centred at `x0`.
fn lorentzian(x: f64, x0: f64, w: f64) -> f64 {
    w / (PI * ((x - x0).powi(2) + w * w))
}

/// Renders the ladder lines: line `n` is `|a_n|²` times a unit-area
/// Lorentzian at `n·ω_m` with half-width `Γ_bg + |n|·γ_m`, where `Γ_bg` is
/// the decay rate of the least-damped supermode. The grid is in MHz offsets
/// from the drive.
pub fn composite_spectrum(
    ladder: &SidebandLadder,
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    grid: &[f64],
) -> Result<SpectrumResult> {
    check_grid(grid)?;
    mech.validate()?;
    if ladder.omega_m != mech.omega_m {
        return Err(Error::invalid("ladder", "was solved for a different mechanical frequency"));
    }
    let decomp = decompose(sys, DEFAULT_TRANSITION_TOL)?;
    decomp.require_stable()?;
    let base_width = decomp.stability_margin;

    let components = ladder
        .harmonics()
        .map(|n| {
            let power = ladder.line_power(n);
            let centre = n as f64 * mech.omega_m;
            let width = base_width + n.unsigned_abs() as f64 * mech.gamma_m;
            Component {
                label: if n == 0 {
                    ComponentLabel::Background
                } else {
                    ComponentLabel::Sideband(n)
                },
                values: grid.iter().map(|&x| power * lorentzian(x, centre, width)).collect(),
            }
        })
        .collect();
    SpectrumResult::from_components(grid.to_vec(), components).peak_normalized()
}

/// Sideband contrast of `sys` relative to its single-cavity reference:
/// `A = |a₁/a₀|²(sys) / |a₁/a₀|²(reference)`.
pub fn amplification_factor(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    order: usize,
) -> Result<f64> {
    decompose(sys, DEFAULT_TRANSITION_TOL)?.require_stable()?;
    decompose(&sys.reference(), DEFAULT_TRANSITION_TOL)?.require_stable()?;
    formal_amplification_factor(sys, mech, eps, order)
}

/// [`amplification_factor`] without the stability gate on `sys`: the formal
/// Fourier-domain contrast ratio. Only meaningful as a response function when
/// `sys` has an amplifying supermode.
pub fn formal_amplification_factor(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    order: usize,
) -> Result<f64> {
    let reference = sideband_ladder(&sys.reference(), mech, eps, order)?;
    let ref_contrast = reference.contrast(1);
    if !(ref_contrast >= 1e-300) {
        return Err(Error::DivisionDegenerate { power: ref_contrast });
    }
    let ladder = formal_sideband_ladder(sys, mech, eps, order)?;
    Ok(ladder.contrast(1) / ref_contrast)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nominal() -> (CoupledModeSystem, MechanicalMode) {
        (
            CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0).unwrap(),
            MechanicalMode::new(6.0, 0.2, 0.2).unwrap(),
        )
    }

    fn background_grid() -> Vec<f64> {
        uniform_grid(-60.0, 60.0, 12_001)
    }

    #[test]
    fn single_cavity_background_is_lorentzian() {
        let sys = CoupledModeSystem::single_cavity(0.0, 20.0, 5.0).unwrap();
        let spec = background_spectrum(&sys, &background_grid()).unwrap();
        let peaks = peak_analysis(&spec).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].position.abs() < 1e-6);
        assert!((peaks[0].fwhm.unwrap() - 40.0).abs() < 0.01 * 40.0);
        assert_eq!(spec.normalization, Normalization::PeakUnit);
        let max = spec.values.iter().copied().fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pt_symmetric_background_splits() {
        let (sys, _) = nominal();
        let spec = background_spectrum(&sys, &background_grid()).unwrap();
        let d = decompose(&sys, DEFAULT_TRANSITION_TOL).unwrap();
        let peaks = peak_analysis(&spec).unwrap();
        assert_eq!(peaks.len(), 2);
        for (p, omega) in peaks.iter().zip([d.big_omega_minus(), d.big_omega_plus()]) {
            assert!((p.position - omega).abs() < 0.02 * omega.abs());
            assert!((p.fwhm.unwrap() - 2.0 * d.chi).abs() < 0.1 * 2.0 * d.chi);
        }
    }

    #[test]
    fn broken_phase_background_narrows() {
        let (sys, _) = nominal();
        let sys = sys.with_g1(17.95);
        let spec = background_spectrum(&sys, &background_grid()).unwrap();
        let peaks = peak_analysis(&spec).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].position.abs() < 1e-3);
        assert!(peaks[0].fwhm.unwrap() < 40.0);
    }

    #[test]
    fn unstable_background_is_rejected() {
        let (sys, _) = nominal();
        let err = background_spectrum(&sys.with_g1(17.0), &background_grid()).unwrap_err();
        assert!(matches!(err, Error::Unstable { mode: "omega+", .. }));
    }

    #[test]
    fn grid_must_increase() {
        let (sys, _) = nominal();
        assert!(background_spectrum(&sys, &[0.0, 1.0, 1.0]).is_err());
        assert!(background_spectrum(&sys, &[0.0]).is_err());
    }

    #[test]
    fn components_sum_to_total() {
        let (sys, mech) = nominal();
        let mech = mech.with_z0(1.0);
        let l = sideband_ladder(&sys, &mech, 1.0, 8).unwrap();
        let spec = composite_spectrum(&l, &sys, &mech, &uniform_grid(-24.0, 24.0, 4001)).unwrap();
        for (k, &v) in spec.values.iter().enumerate() {
            let s: f64 = spec.components.iter().map(|c| c.values[k]).sum();
            assert!((s - v).abs() <= 1e-12 * v.max(1e-300));
        }
        assert_eq!(spec.components.len(), 17);
        assert!(spec.component(ComponentLabel::Sideband(-8)).is_some());
    }

    #[test]
    fn composite_without_drive_is_background_only() {
        let (sys, mech) = nominal();
        let mech = mech.with_z0(0.0);
        let l = sideband_ladder(&sys, &mech, 1.0, 5).unwrap();
        let spec = composite_spectrum(&l, &sys, &mech, &uniform_grid(-24.0, 24.0, 2001)).unwrap();
        let bg = spec.component(ComponentLabel::Background).unwrap();
        assert_eq!(bg.values, spec.values);
        for c in &spec.components {
            if c.label != ComponentLabel::Background {
                assert!(c.values.iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn composite_shows_first_and_second_sidebands() {
        let (sys, mech) = nominal();
        let mech = mech.with_z0(1.1);
        let l = sideband_ladder(&sys, &mech, 1.0, 12).unwrap();
        assert!(!l.truncation_warning);
        let grid = uniform_grid(-24.0, 24.0, DEFAULT_GRID_POINTS);
        let spec = composite_spectrum(&l, &sys, &mech, &grid).unwrap();
        let peaks = peak_analysis(&spec).unwrap();
        let near = |x: f64| peaks.iter().find(|p| (p.position / 6.0 - x).abs() < 0.1);
        let (p0, p1, p2) = (near(0.0).unwrap(), near(1.0).unwrap(), near(2.0).unwrap());
        assert!(p0.height > 0.0);
        assert!(p1.height > p2.height);
    }

    #[test]
    fn pt_contrast_beats_single_cavity() {
        let (sys, mech) = nominal();
        let pt = sideband_ladder(&sys, &mech, 1.0, 5).unwrap();
        let single = sideband_ladder(&sys.reference(), &mech, 1.0, 5).unwrap();
        assert!(pt.contrast(1) >= 10.0 * single.contrast(1));
    }

    #[test]
    fn amplification_of_uncoupled_system_is_one() {
        let (sys, mech) = nominal();
        let a = amplification_factor(&sys.reference(), &mech, 1.0, 5).unwrap();
        assert!((a - 1.0).abs() < 1e-14);
    }

    #[test]
    fn amplification_is_independent_of_drive() {
        let (sys, mech) = nominal();
        let a1 = amplification_factor(&sys, &mech, 1.0, 5).unwrap();
        let a2 = amplification_factor(&sys, &mech, 2.0, 5).unwrap();
        assert!((a1 - a2).abs() < 1e-10 * a1);
    }

    #[test]
    fn amplification_needs_stability() {
        let (sys, mech) = nominal();
        assert!(matches!(
            amplification_factor(&sys.with_g1(9.0), &mech, 1.0, 5),
            Err(Error::Unstable { .. })
        ));
        assert!(formal_amplification_factor(&sys.with_g1(9.0), &mech, 1.0, 5).is_ok());
    }

    #[test]
    fn amplification_needs_a_reference_sideband() {
        let (sys, mech) = nominal();
        assert!(matches!(
            amplification_factor(&sys, &mech.with_z0(0.0), 1.0, 5),
            Err(Error::DivisionDegenerate { .. })
        ));
    }

    #[test]
    fn interpolation() {
        let g = [0.0, 1.0, 2.0];
        let v = [0.0, 10.0, 20.0];
        assert_eq!(interpolate(&g, &v, 0.5), 5.0);
        assert_eq!(interpolate(&g, &v, -1.0), 0.0);
        assert_eq!(interpolate(&g, &v, 3.0), 20.0);
    }
}
