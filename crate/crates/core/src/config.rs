//! Run configuration: a TOML document with `system`, `mechanics`, `numerics`,
//! `sensitivity`, `sweep` and `output` tables. Every key is optional and
//! unknown keys are rejected. An empty document gives the default transducer
//! (Δ = 0, κ = 20, γ = 16, g1 = 19.8, g = 5, ω_m = 6, γ_m = 0.2, all MHz).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ep_threshold, CoupledModeSystem, DEFAULT_TRANSITION_TOL};
use crate::sensitivity::{BracketMode, SensitivityParams, HBAR, OMEGA0_1550NM};
use crate::spectrum::{MechanicalMode, DEFAULT_GRID_POINTS, DEFAULT_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SystemMode {
    /// Gain cavity: `gamma_or_kappa1` is the gain γ.
    #[default]
    PT,
    /// Second lossy cavity: `gamma_or_kappa1` is the loss κ₁.
    EP,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub mode: SystemMode,
    pub delta: f64,
    pub kappa: f64,
    pub gamma_or_kappa1: f64,
    pub g1: f64,
    pub g: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            mode: SystemMode::PT,
            delta: 0.0,
            kappa: 20.0,
            gamma_or_kappa1: 16.0,
            g1: 19.8,
            g: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MechanicsConfig {
    pub omega_m: f64,
    pub gamma_m: f64,
    /// Weak probe amplitude for the amplification factor and the oracle.
    pub z0: f64,
    /// Amplitude used for rendered transducer spectra.
    pub spectrum_z0: f64,
}

impl Default for MechanicsConfig {
    fn default() -> Self {
        MechanicsConfig {
            omega_m: 6.0,
            gamma_m: 0.2,
            z0: 0.2,
            spectrum_z0: 1.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub ladder_order: usize,
    pub grid_points: usize,
    /// Drive amplitude entering mode 1.
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    pub transition_tol: f64,
    pub oracle_tol: f64,
    pub transient_factor: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            ladder_order: DEFAULT_ORDER,
            grid_points: DEFAULT_GRID_POINTS,
            eps: 1.0,
            dt: None,
            t_end: None,
            transition_tol: DEFAULT_TRANSITION_TOL,
            oracle_tol: crate::dynamics::DEFAULT_ORACLE_TOL,
            transient_factor: crate::dynamics::DEFAULT_TRANSIENT_FACTOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivityConfig {
    pub p_in: f64,
    pub omega0: f64,
    pub hbar: f64,
    pub bracket_mode: BracketMode,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        SensitivityConfig {
            p_in: 1e-3,
            omega0: OMEGA0_1550NM,
            hbar: HBAR,
            bracket_mode: BracketMode::Dimensional,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Inter-cavity coupling in units of the threshold coupling.
    #[default]
    G1OverThreshold,
    /// Inter-cavity coupling in MHz.
    G1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            parameter: SweepParameter::G1OverThreshold,
            start: 0.5,
            stop: 1.5,
            count: 1001,
            spacing: Spacing::Linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { path: "out".into() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub mechanics: MechanicsConfig,
    pub numerics: NumericsConfig,
    pub sensitivity: SensitivityConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig always serializes")
    }

    /// Lists every violated constraint at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                errs.push(msg);
            }
        };
        let finite = |v: f64| v.is_finite();

        let s = &self.system;
        check(finite(s.delta), format!("system.delta must be finite (got {})", s.delta));
        check(s.kappa > 0.0 && finite(s.kappa), format!("system.kappa must be > 0 (got {})", s.kappa));
        check(
            s.gamma_or_kappa1 >= 0.0 && finite(s.gamma_or_kappa1),
            format!("system.gamma_or_kappa1 must be >= 0 (got {})", s.gamma_or_kappa1),
        );
        check(s.g1 >= 0.0 && finite(s.g1), format!("system.g1 must be >= 0 (got {})", s.g1));
        check(s.g >= 0.0 && finite(s.g), format!("system.g must be >= 0 (got {})", s.g));

        let m = &self.mechanics;
        check(m.omega_m > 0.0 && finite(m.omega_m), format!("mechanics.omega_m must be > 0 (got {})", m.omega_m));
        check(m.gamma_m > 0.0 && finite(m.gamma_m), format!("mechanics.gamma_m must be > 0 (got {})", m.gamma_m));
        check(m.z0 >= 0.0 && finite(m.z0), format!("mechanics.z0 must be >= 0 (got {})", m.z0));
        check(
            m.spectrum_z0 >= 0.0 && finite(m.spectrum_z0),
            format!("mechanics.spectrum_z0 must be >= 0 (got {})", m.spectrum_z0),
        );

        let n = &self.numerics;
        check(n.ladder_order >= 2, format!("numerics.ladder_order must be >= 2 (got {})", n.ladder_order));
        check(n.grid_points >= 3, format!("numerics.grid_points must be >= 3 (got {})", n.grid_points));
        check(n.eps > 0.0 && finite(n.eps), format!("numerics.eps must be > 0 (got {})", n.eps));
        if let Some(dt) = n.dt {
            check(dt > 0.0 && finite(dt), format!("numerics.dt must be > 0 (got {dt})"));
        }
        if let Some(t) = n.t_end {
            check(t > 0.0 && finite(t), format!("numerics.t_end must be > 0 (got {t})"));
        }
        check(
            n.transition_tol > 0.0 && n.transition_tol <= 1e-2,
            format!("numerics.transition_tol must lie in (0, 1e-2] (got {})", n.transition_tol),
        );
        check(
            n.oracle_tol > 0.0 && finite(n.oracle_tol),
            format!("numerics.oracle_tol must be > 0 (got {})", n.oracle_tol),
        );
        check(
            n.transient_factor >= 10.0 && finite(n.transient_factor),
            format!("numerics.transient_factor must be >= 10 (got {})", n.transient_factor),
        );

        let p = &self.sensitivity;
        check(p.p_in > 0.0 && finite(p.p_in), format!("sensitivity.p_in must be > 0 (got {})", p.p_in));
        check(p.omega0 > 0.0 && finite(p.omega0), format!("sensitivity.omega0 must be > 0 (got {})", p.omega0));
        check(p.hbar > 0.0 && finite(p.hbar), format!("sensitivity.hbar must be > 0 (got {})", p.hbar));

        let w = &self.sweep;
        check(w.count >= 2, format!("sweep.count must be >= 2 (got {})", w.count));
        check(
            finite(w.start) && finite(w.stop) && w.start < w.stop,
            format!("sweep.start must be < sweep.stop (got {} .. {})", w.start, w.stop),
        );
        check(w.start >= 0.0, format!("sweep.start must be >= 0 (got {})", w.start));
        if w.spacing == Spacing::Log {
            check(
                w.start > 0.0 && w.stop > 0.0,
                format!("sweep.spacing = log needs positive endpoints (got {} .. {})", w.start, w.stop),
            );
        }
        check(!self.output.path.is_empty(), "output.path must not be empty".into());

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(errs))
        }
    }

    /// The configured system, PT or EP according to `system.mode`.
    pub fn system(&self) -> Result<CoupledModeSystem> {
        let s = &self.system;
        match s.mode {
            SystemMode::PT => CoupledModeSystem::pt(s.delta, s.kappa, s.gamma_or_kappa1, s.g1, s.g),
            SystemMode::EP => CoupledModeSystem::ep(s.delta, s.kappa, s.gamma_or_kappa1, s.g1, s.g),
        }
    }

    /// Gain-cavity system with gain `gamma_or_kappa1`, whatever the mode.
    pub fn pt_system(&self) -> Result<CoupledModeSystem> {
        let s = &self.system;
        CoupledModeSystem::pt(s.delta, s.kappa, s.gamma_or_kappa1, s.g1, s.g)
    }

    /// Lossy-pair system with `κ₁ = gamma_or_kappa1`, whatever the mode.
    pub fn ep_system(&self) -> Result<CoupledModeSystem> {
        let s = &self.system;
        CoupledModeSystem::ep(s.delta, s.kappa, s.gamma_or_kappa1, s.g1, s.g)
    }

    pub fn mechanics(&self) -> Result<MechanicalMode> {
        let m = &self.mechanics;
        MechanicalMode::new(m.omega_m, m.gamma_m, m.z0)
    }

    pub fn spectrum_mechanics(&self) -> Result<MechanicalMode> {
        Ok(self.mechanics()?.with_z0(self.mechanics.spectrum_z0))
    }

    pub fn sensitivity_params(&self) -> SensitivityParams {
        let p = &self.sensitivity;
        SensitivityParams {
            p_in: p.p_in,
            omega0: p.omega0,
            hbar: p.hbar,
            bracket_mode: p.bracket_mode,
        }
    }

    /// Sweep points expressed as `g1 / threshold` of `sys`.
    pub fn sweep_ratios(&self, sys: &CoupledModeSystem) -> Result<Vec<f64>> {
        let raw = self.sweep_values();
        match self.sweep.parameter {
            SweepParameter::G1OverThreshold => Ok(raw),
            SweepParameter::G1 => {
                let t = ep_threshold(sys);
                if !(t > 0.0) {
                    return Err(Error::invalid("sweep", "threshold coupling is zero; cannot normalize"));
                }
                Ok(raw.into_iter().map(|g1| g1 / t).collect())
            }
        }
    }

    /// The raw sweep grid.
    pub fn sweep_values(&self) -> Vec<f64> {
        let w = &self.sweep;
        match w.spacing {
            Spacing::Linear => crate::spectrum::uniform_grid(w.start, w.stop, w.count),
            Spacing::Log => crate::spectrum::uniform_grid(w.start.ln(), w.stop.ln(), w.count)
                .into_iter()
                .enumerate()
                .map(|(k, x)| match k {
                    0 => w.start,
                    k if k == w.count - 1 => w.stop,
                    _ => x.exp(),
                })
                .collect(),
        }
    }
}
