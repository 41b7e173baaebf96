//! Self-check run behind `ptcam validate`: the time-domain oracle against the
//! sideband ladder over a matrix of stable systems derived from the config,
//! plus the identities every result relies on.

use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::dynamics::{cross_validate, line_powers, settling_rate, CrossValidationConfig, Integrator, Verdict};
use crate::error::Result;
use crate::model::{decompose, ep_threshold, CoupledModeSystem, DEFAULT_TRANSITION_TOL};
use crate::reproduce::broken_phase_coupling;
use crate::sensitivity::{heisenberg_product, BracketMode, SensitivityParams};
use crate::spectrum::{sideband_ladder, MechanicalMode, RESIDUAL_TOL};

/// Largest allowed relative change of an oracle line power when `dt` halves.
pub const STEP_HALVING_TOL: f64 = 1e-8;

/// Allowed relative mismatch between `decompose` and a direct eigensolve.
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub check: String,
    pub verdict: Verdict,
    pub detail: String,
}

impl Finding {
    fn new(check: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Finding {
            check: check.into(),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.findings.iter().all(|f| f.verdict == Verdict::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.verdict == Verdict::Fail)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            let tag = match finding.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            };
            writeln!(f, "{tag}  {}: {}", finding.check, finding.detail)?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {failed} failed", self.findings.len())
    }
}

/// Eigenfrequencies of the mode matrix from a complex Schur decomposition,
/// sorted by real then imaginary part. Independent of the closed form.
pub fn direct_eigenfrequencies(sys: &CoupledModeSystem) -> [Complex64; 2] {
    let i = Complex64::i();
    let h = Matrix2::new(
        sys.delta - i * sys.d1,
        Complex64::from(sys.g1),
        Complex64::from(sys.g1),
        sys.delta - i * sys.d2,
    );
    let ev = h.schur().eigenvalues().expect("2x2 Schur always converges");
    let mut out = [ev[0], ev[1]];
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// Relative mismatch between `decompose` and [`direct_eigenfrequencies`],
/// scaled by the largest rate in the system.
pub fn eigen_mismatch(sys: &CoupledModeSystem) -> Result<f64> {
    let d = decompose(sys, DEFAULT_TRANSITION_TOL)?;
    let direct = direct_eigenfrequencies(sys);
    let scale = [sys.delta.abs(), sys.d1.abs(), sys.d2.abs(), sys.g1, 1.0]
        .into_iter()
        .fold(0.0, f64::max);
    let pair = |x: Complex64, y: Complex64| (x - direct[0]).norm().max((y - direct[1]).norm());
    let err = pair(d.omega_plus, d.omega_minus).min(pair(d.omega_minus, d.omega_plus));
    Ok(err / scale)
}

/// Largest relative change of the oracle line powers `n = 0, 1, 2` when the
/// step is halved.
pub fn step_halving_change(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    transient_factor: f64,
) -> Result<f64> {
    let mut coarse = Integrator::for_system(sys, mech)?;
    coarse.transient_factor = transient_factor;
    coarse.t_end = transient_factor / settling_rate(sys, mech)? + crate::dynamics::MIN_PERIODS * 2.0 * std::f64::consts::PI / mech.omega_m;
    let fine = Integrator {
        dt: 0.5 * coarse.dt,
        ..coarse
    };
    let order = crate::spectrum::DEFAULT_ORDER;
    let a = line_powers(&coarse.integrate(sys, mech, eps)?, mech.omega_m, order)?;
    let b = line_powers(&fine.integrate(sys, mech, eps)?, mech.omega_m, order)?;
    Ok([0, 1, 2]
        .into_iter()
        .map(|n| {
            let (p, q) = (a.line_power(n), b.line_power(n));
            let scale = p.max(q);
            if scale > 0.0 {
                (p - q).abs() / scale
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max))
}

/// One entry of the cross-validation matrix.
#[derive(Debug, Clone)]
pub struct MatrixCase {
    pub label: String,
    pub system: CoupledModeSystem,
    pub mechanics: MechanicalMode,
}

/// Stable systems around the configured cavity: couplings on both sides of
/// the transition, detuned variants, drive and frequency variants, a lossy
/// pair, the bare cavity and the stable broken-phase window.
pub fn cross_validation_matrix(config: &RunConfig) -> Result<Vec<MatrixCase>> {
    let pt = config.pt_system()?;
    let ep = config.ep_system()?;
    let mech = config.mechanics()?;
    let gamma = ep_threshold(&pt);
    let mut cases = Vec::new();
    let mut push = |label: String, system: CoupledModeSystem, mechanics: MechanicalMode| {
        cases.push(MatrixCase { label, system, mechanics });
    };

    for r in [1.01, 1.05, 1.1, 1.3, 2.0] {
        for delta in [0.0, 2.5] {
            let sys = CoupledModeSystem { delta, ..pt.with_g1(r * gamma) };
            push(format!("PT g1/threshold={r} delta={delta}"), sys, mech);
        }
    }
    let near = pt.with_g1(1.1 * gamma);
    for z0 in [0.05, 0.5] {
        push(format!("PT g1/threshold=1.1 z0={z0}"), near, mech.with_z0(z0));
    }
    for scale in [0.5, 2.0] {
        let m = MechanicalMode::new(scale * mech.omega_m, mech.gamma_m, mech.z0)?;
        push(format!("PT g1/threshold=1.1 omega_m={}", m.omega_m), near, m);
    }
    let ep_gamma = ep_threshold(&ep);
    for r in [0.5, 1.5, 3.0, 10.0] {
        push(format!("EP g1/threshold={r}"), ep.with_g1(r * ep_gamma), mech);
    }
    for delta in [0.0, 5.0] {
        let single = CoupledModeSystem { delta, ..pt.reference() };
        push(format!("single cavity delta={delta}"), single, mech);
    }
    // the broken-phase window is parametrically unstable at ordinary drives
    let g1 = broken_phase_coupling(&pt);
    let weak = mech.with_z0(mech.z0.min(0.05));
    push(format!("PT broken phase g1={g1:.4} z0={}", weak.z0), pt.with_g1(g1), weak);
    if let Ok(configured) = config.system() {
        if settling_rate(&configured, &mech).is_ok() {
            push("configured system".into(), configured, mech);
        }
    }
    Ok(cases)
}

fn cross_validation_config(config: &RunConfig) -> CrossValidationConfig {
    CrossValidationConfig {
        order: config.numerics.ladder_order,
        tolerance: config.numerics.oracle_tol,
        dt: config.numerics.dt,
        t_end: config.numerics.t_end,
        transient_factor: config.numerics.transient_factor,
        enforce_step_bound: true,
    }
}

/// Runs every check. Never fails; problems become FAIL findings.
pub fn validate(config: &RunConfig) -> ValidationReport {
    let mut report = ValidationReport::default();
    if let Err(e) = config.validate() {
        report.findings.push(Finding::new("config", false, e.to_string()));
        return report;
    }

    let configured = config.system().and_then(|sys| {
        let d = decompose(&sys, config.numerics.transition_tol)?;
        settling_rate(&sys, &config.mechanics()?)?;
        Ok(d)
    });
    report.findings.push(match configured {
        Ok(d) => Finding::new(
            "configured system",
            true,
            format!("{} phase, stability margin {:.4} MHz", d.phase, d.stability_margin),
        ),
        Err(e) => Finding::new("configured system", false, e.to_string()),
    });

    let cases = match cross_validation_matrix(config) {
        Ok(c) => c,
        Err(e) => {
            report.findings.push(Finding::new("cross-validation matrix", false, e.to_string()));
            return report;
        }
    };
    let cv = cross_validation_config(config);
    let eps = config.numerics.eps;
    let results: Vec<Finding> = cases
        .par_iter()
        .map(|case| match cross_validate(&case.system, &case.mechanics, eps, &cv) {
            Ok(r) => Finding::new(
                format!("oracle vs ladder [{}]", case.label),
                r.verdict == Verdict::Pass,
                format!("max deviation {:.3e} (tolerance {:.0e})", r.max_deviation, r.tolerance),
            ),
            Err(e) => Finding::new(format!("oracle vs ladder [{}]", case.label), false, e.to_string()),
        })
        .collect();
    report.findings.extend(results);

    report.findings.push(step_halving_finding(config, &cases));
    report.findings.push(eigen_finding());
    report.findings.push(heisenberg_finding(config));
    report.findings.push(residual_finding(&cases, config));
    report
}

fn step_halving_finding(config: &RunConfig, cases: &[MatrixCase]) -> Finding {
    let check = "step halving";
    let worst = cases.iter().take(2).try_fold(0.0f64, |acc, case| {
        step_halving_change(&case.system, &case.mechanics, config.numerics.eps, config.numerics.transient_factor)
            .map(|c| acc.max(c))
    });
    match worst {
        Ok(c) => Finding::new(
            check,
            c < STEP_HALVING_TOL,
            format!("largest line-power change {c:.3e} (tolerance {STEP_HALVING_TOL:.0e})"),
        ),
        Err(e) => Finding::new(check, false, e.to_string()),
    }
}

/// Deterministic spread of systems: detunings, loss/gain mixes and couplings
/// on both sides of the transition.
fn invariant_grid() -> Vec<CoupledModeSystem> {
    let mut out = Vec::new();
    for delta in [-5.0, 0.0, 5.0] {
        for d1 in [1.0, 20.0] {
            for d2 in [-16.0, -5.0, 0.0, 5.0, 16.0] {
                for g1 in [0.0, 3.0, 10.0, 19.8, 40.0] {
                    out.push(CoupledModeSystem::new(delta, d1, d2, g1, 5.0).expect("grid values are valid"));
                }
            }
        }
    }
    out
}

fn eigen_finding() -> Finding {
    let check = "eigenfrequencies vs direct solve";
    let mut worst = 0.0f64;
    for sys in invariant_grid() {
        match eigen_mismatch(&sys) {
            Ok(e) => worst = worst.max(e),
            Err(e) => return Finding::new(check, false, e.to_string()),
        }
    }
    Finding::new(check, worst < EIGEN_TOL, format!("largest mismatch {worst:.3e} (tolerance {EIGEN_TOL:.0e})"))
}

fn heisenberg_finding(config: &RunConfig) -> Finding {
    let check = "Heisenberg product";
    let base = config.sensitivity_params();
    let omegas = [0.0, config.mechanics.omega_m, 5.0 * config.mechanics.omega_m];
    let mut worst = 0.0f64;
    let mut count = 0;
    for sys in invariant_grid() {
        let Ok(d) = decompose(&sys, DEFAULT_TRANSITION_TOL) else { continue };
        if !d.stable || !d.g_eff.is_finite() {
            continue;
        }
        for mode in [BracketMode::AsPrinted, BracketMode::Dimensional] {
            let sp = SensitivityParams { bracket_mode: mode, ..base };
            let bound = sp.hbar * sp.hbar / 4.0;
            for omega in omegas {
                match heisenberg_product(&d, &sp, omega) {
                    Ok(p) => worst = worst.max((p - bound).abs() / bound),
                    Err(e) => return Finding::new(check, false, e.to_string()),
                }
                count += 1;
            }
        }
    }
    Finding::new(
        check,
        worst < 1e-12,
        format!("{count} evaluations, largest deviation from hbar^2/4 {worst:.3e}"),
    )
}

fn residual_finding(cases: &[MatrixCase], config: &RunConfig) -> Finding {
    let check = "ladder residual";
    let mut worst = 0.0f64;
    for case in cases {
        match sideband_ladder(&case.system, &case.mechanics, config.numerics.eps, config.numerics.ladder_order) {
            Ok(l) => worst = worst.max(l.residual),
            Err(e) => return Finding::new(check, false, e.to_string()),
        }
    }
    Finding::new(
        check,
        worst < RESIDUAL_TOL,
        format!("largest relative residual {worst:.3e} (tolerance {RESIDUAL_TOL:.0e})"),
    )
}
