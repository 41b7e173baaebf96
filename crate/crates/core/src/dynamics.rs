//! Time-domain oracle for the sideband ladder.
//!
//! Integrates
//!
//! ```text
//! ȧ = −(iΔ + d1) a − i g1 c − i g z(t) a + eps
//! ċ = −(iΔ + d2) c − i g1 a,        z(t) = z0 cos(ω_m t + φ)
//! ```
//!
//! from `a = c = 0` with fixed-step classical RK4, discards the transient and
//! least-squares fits the remainder to `Σ_{|n|≤N} A_n e^{−i n ω_m t}`. Times
//! are in µs and rates in MHz.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{decompose, CoupledModeSystem, DEFAULT_TRANSITION_TOL};
use crate::spectrum::{sideband_ladder, MechanicalMode};

/// Minimum number of mechanical periods in the fitted segment.
pub const MIN_PERIODS: f64 = 64.0;

/// Fit residual (relative to the signal norm) above which a fit is rejected.
pub const POOR_FIT: f64 = 1e-3;

/// Default oracle/ladder agreement tolerance on line powers.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-3;

/// Line powers below this fraction of the carrier are compared on an
/// absolute scale.
pub const LINE_FLOOR: f64 = 1e-12;

/// Default transient horizon in units of `1/stability_margin`.
pub const DEFAULT_TRANSIENT_FACTOR: f64 = 30.0;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub a_t: Vec<Complex64>,
    pub c_t: Vec<Complex64>,
    pub dt: f64,
    /// Index of the first post-transient sample.
    pub transient_cut: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn steady_times(&self) -> &[f64] {
        &self.times[self.transient_cut..]
    }

    pub fn steady_a(&self) -> &[Complex64] {
        &self.a_t[self.transient_cut..]
    }

    /// CSV with columns `t, Re(a), Im(a), Re(c), Im(c)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "Re(a)", "Im(a)", "Re(c)", "Im(c)"])?;
        for ((t, a), c) in self.times.iter().zip(&self.a_t).zip(&self.c_t) {
            w.write_record([
                t.to_string(),
                a.re.to_string(),
                a.im.to_string(),
                c.re.to_string(),
                c.im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Largest step allowed for `sys` driven by `mech`:
/// `min(1/(20·max rate), 2π/(40·ω_m))`.
pub fn step_bound(sys: &CoupledModeSystem, mech: &MechanicalMode) -> f64 {
    let max_rate = [sys.delta.abs(), sys.d1.abs(), sys.d2.abs(), sys.g1, sys.g * mech.z0]
        .into_iter()
        .fold(0.0, f64::max);
    (1.0 / (20.0 * max_rate)).min(2.0 * PI / (40.0 * mech.omega_m))
}

/// Fixed-step RK4 driver.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub dt: f64,
    /// Requested end time; the run is extended so that the post-transient
    /// segment holds a power-of-two number of samples covering at least
    /// [`MIN_PERIODS`] mechanical periods.
    pub t_end: f64,
    /// Phase `φ` of the prescribed displacement.
    pub drive_phase: f64,
    pub transient_factor: f64,
    /// Reject steps above [`step_bound`]. Disable only for negative controls.
    pub enforce_step_bound: bool,
}

impl Integrator {
    /// Half the step bound (keeps the RK4 error near 1e-9 relative) and the
    /// shortest admissible run.
    pub fn for_system(sys: &CoupledModeSystem, mech: &MechanicalMode) -> Result<Self> {
        let horizon = DEFAULT_TRANSIENT_FACTOR / settling_rate(sys, mech)?;
        Ok(Integrator {
            dt: 0.5 * step_bound(sys, mech),
            t_end: horizon + MIN_PERIODS * 2.0 * PI / mech.omega_m,
            drive_phase: 0.0,
            transient_factor: DEFAULT_TRANSIENT_FACTOR,
            enforce_step_bound: true,
        })
    }

    pub fn integrate(
        &self,
        sys: &CoupledModeSystem,
        mech: &MechanicalMode,
        eps: f64,
    ) -> Result<Trajectory> {
        sys.validate()?;
        mech.validate()?;
        let rate = settling_rate(sys, mech)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.transient_factor >= 10.0) {
            return Err(Error::invalid(
                "transient_factor",
                format!("must be >= 10, got {}", self.transient_factor),
            ));
        }
        let bound = step_bound(sys, mech);
        if self.enforce_step_bound && self.dt > bound * (1.0 + 1e-12) {
            return Err(Error::StepSize { dt: self.dt, bound });
        }
        let horizon = self.transient_factor / rate;
        let period = 2.0 * PI / mech.omega_m;
        if self.t_end < horizon + MIN_PERIODS * period {
            return Err(Error::invalid(
                "t_end",
                format!(
                    "{} us is shorter than the transient horizon plus {MIN_PERIODS} periods ({} us)",
                    self.t_end,
                    horizon + MIN_PERIODS * period
                ),
            ));
        }

        let transient_cut = (horizon / self.dt).ceil() as usize;
        let requested = (self.t_end / self.dt).floor() as usize + 1;
        let min_steady = (MIN_PERIODS * period / self.dt).ceil() as usize;
        let steady = requested
            .saturating_sub(transient_cut)
            .max(min_steady)
            .next_power_of_two();
        let total = transient_cut + steady;


        let limit = 1e12 * eps.abs().max(f64::MIN_POSITIVE) / sys.d1;
        let h = self.dt;
        let mut times = Vec::with_capacity(total);
        let mut a_t = Vec::with_capacity(total);
        let mut c_t = Vec::with_capacity(total);
        let (mut a, mut c) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for k in 0..total {
            let t = k as f64 * h;
            times.push(t);
            a_t.push(a);
            c_t.push(c);
            if !(a.norm() <= limit) {
                return Err(Error::Divergence {
                    time: t,
                    magnitude: a.norm(),
                });
            }
            (a, c) = rk4_step(sys, mech, self.drive_phase, eps, t, h, a, c);
        }

        Ok(Trajectory {
            times,
            a_t,
            c_t,
            dt: h,
            transient_cut,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn rk4_step(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    phase: f64,
    eps: f64,
    t: f64,
    h: f64,
    a: Complex64,
    c: Complex64,
) -> (Complex64, Complex64) {
    let rhs = |t: f64, a: Complex64, c: Complex64| {
        let z = mech.z0 * (mech.omega_m * t + phase).cos();
        let da = -Complex64::new(sys.d1, sys.delta + sys.g * z) * a - Complex64::new(0.0, sys.g1) * c + eps;
        let dc = -Complex64::new(sys.d2, sys.delta) * c - Complex64::new(0.0, sys.g1) * a;
        (da, dc)
    };
    let (k1a, k1c) = rhs(t, a, c);
    let (k2a, k2c) = rhs(t + 0.5 * h, a + 0.5 * h * k1a, c + 0.5 * h * k1c);
    let (k3a, k3c) = rhs(t + 0.5 * h, a + 0.5 * h * k2a, c + 0.5 * h * k2c);
    let (k4a, k4c) = rhs(t + h, a + h * k3a, c + h * k3c);
    (
        a + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
        c + h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c),
    )
}

/// Slowest decay rate of the modulated system, `−ln ρ / T`, where `ρ` is the
/// spectral radius of the one-period propagator. Equals the static stability
/// margin at `z0 = 0`. It can be negative where both static supermodes decay:
/// close to the gain–loss window edge the modulation pumps a growing
/// solution, and then no periodic steady state exists.
pub fn floquet_margin(sys: &CoupledModeSystem, mech: &MechanicalMode) -> Result<f64> {
    sys.validate()?;
    mech.validate()?;
    let period = 2.0 * PI / mech.omega_m;
    let steps = (period / (0.25 * step_bound(sys, mech))).ceil().max(64.0) as usize;
    let h = period / steps as f64;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let propagate = |mut a: Complex64, mut c: Complex64| {
        for k in 0..steps {
            (a, c) = rk4_step(sys, mech, 0.0, 0.0, k as f64 * h, h, a, c);
        }
        (a, c)
    };
    let (m00, m10) = propagate(one, zero);
    let (m01, m11) = propagate(zero, one);
    let half_trace = 0.5 * (m00 + m11);
    let root = (half_trace * half_trace - (m00 * m11 - m01 * m10)).sqrt();
    let radius = (half_trace + root).norm().max((half_trace - root).norm());
    Ok(-radius.ln() / period)
}

/// Decay rate of the slowest transient under modulation: the smaller of the
/// static stability margin and [`floquet_margin`]. Errors when either is not
/// positive.
pub fn settling_rate(sys: &CoupledModeSystem, mech: &MechanicalMode) -> Result<f64> {
    let decomp = decompose(sys, DEFAULT_TRANSITION_TOL)?;
    decomp.require_stable()?;
    if sys.g * mech.z0 == 0.0 {
        return Ok(decomp.stability_margin);
    }
    let floquet = floquet_margin(sys, mech)?;
    if !(floquet > 0.0) {
        return Err(Error::ParametricInstability { decay_rate: floquet });
    }
    Ok(decomp.stability_margin.min(floquet))
}

/// Integrates with the default step and run length.
pub fn integrate(sys: &CoupledModeSystem, mech: &MechanicalMode, eps: f64) -> Result<Trajectory> {
    Integrator::for_system(sys, mech)?.integrate(sys, mech, eps)
}

#[derive(Debug, Clone)]
pub struct HarmonicFit {
    pub order: usize,
    /// `A_n` at index `n + order`.
    pub amplitudes: Vec<Complex64>,
    /// `‖y − fit‖ / ‖y‖` over the fitted samples.
    pub residual: f64,
}

impl HarmonicFit {
    pub fn amplitude(&self, n: i32) -> Complex64 {
        let k = n + self.order as i32;
        if (0..self.amplitudes.len() as i32).contains(&k) {
            self.amplitudes[k as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn line_power(&self, n: i32) -> f64 {
        self.amplitude(n).norm_sqr()
    }
}

/// Least-squares fit of `samples(t)` to `Σ_{|n|≤order} A_n e^{−i n ω_m t}`.
pub fn fit_harmonics(times: &[f64], samples: &[Complex64], omega_m: f64, order: usize) -> Result<HarmonicFit> {
    assert_eq!(times.len(), samples.len());
    let m = 2 * order + 1;
    if times.len() < m {
        return Err(Error::invalid("samples", "fewer samples than fitted harmonics"));
    }
    let mut gram = DMatrix::<Complex64>::zeros(m, m);
    let mut proj = DVector::<Complex64>::zeros(m);
    let mut basis = vec![Complex64::new(0.0, 0.0); m];
    for (&t, &y) in times.iter().zip(samples) {
        fill_basis(&mut basis, t, omega_m, order);
        for (p, bp) in basis.iter().enumerate() {
            let conj = bp.conj();
            proj[p] += conj * y;
            for (q, bq) in basis.iter().enumerate() {
                gram[(p, q)] += conj * bq;
            }
        }
    }
    let amplitudes = gram
        .cholesky()
        .ok_or(Error::Singular {
            context: "harmonic fit normal equations",
        })?
        .solve(&proj);

    let mut r2 = 0.0;
    let mut y2 = 0.0;
    for (&t, &y) in times.iter().zip(samples) {
        fill_basis(&mut basis, t, omega_m, order);
        let model: Complex64 = basis.iter().zip(amplitudes.iter()).map(|(b, a)| b * a).sum();
        r2 += (y - model).norm_sqr();
        y2 += y.norm_sqr();
    }
    let residual = if y2 > 0.0 { (r2 / y2).sqrt() } else { r2.sqrt() };
    Ok(HarmonicFit {
        order,
        amplitudes: amplitudes.iter().copied().collect(),
        residual,
    })
}

fn fill_basis(basis: &mut [Complex64], t: f64, omega_m: f64, order: usize) {
    for (k, b) in basis.iter_mut().enumerate() {
        let n = k as f64 - order as f64;
        *b = Complex64::from_polar(1.0, -n * omega_m * t);
    }
}

/// Line amplitudes of the post-transient mode-1 field.
pub fn line_powers(traj: &Trajectory, omega_m: f64, order: usize) -> Result<HarmonicFit> {
    let times = traj.steady_times();
    let span = times.last().copied().unwrap_or(0.0) - times.first().copied().unwrap_or(0.0);
    let period = 2.0 * PI / omega_m;
    // the segment holds `len` samples, i.e. len·dt of signal
    if (span + traj.dt) < MIN_PERIODS * period * (1.0 - 1e-12) {
        return Err(Error::invalid(
            "trajectory",
            format!("post-transient segment covers {:.1} periods, need {MIN_PERIODS}", (span + traj.dt) / period),
        ));
    }
    let fit = fit_harmonics(times, traj.steady_a(), omega_m, order)?;
    if fit.residual > POOR_FIT {
        return Err(Error::PoorFit { residual: fit.residual });
    }
    Ok(fit)
}

#[derive(Debug, Clone, Copy)]
pub struct CrossValidationConfig {
    pub order: usize,
    pub tolerance: f64,
    /// Step override; `None` uses half of [`step_bound`].
    pub dt: Option<f64>,
    /// End time override; `None` uses the shortest admissible run.
    pub t_end: Option<f64>,
    pub transient_factor: f64,
    pub enforce_step_bound: bool,
}

impl Default for CrossValidationConfig {
    fn default() -> Self {
        CrossValidationConfig {
            order: crate::spectrum::DEFAULT_ORDER,
            tolerance: DEFAULT_ORACLE_TOL,
            dt: None,
            t_end: None,
            transient_factor: DEFAULT_TRANSIENT_FACTOR,
            enforce_step_bound: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderDeviation {
    pub n: i32,
    pub ladder_power: f64,
    pub oracle_power: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone)]
pub struct CrossValidationReport {
    pub deviations: Vec<OrderDeviation>,
    pub max_deviation: f64,
    pub fit_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Compares ladder line powers `|a_n|²`, `n = 0, 1, 2`, with the oracle.
/// A tolerance miss is a [`Verdict::Fail`], not an error.
pub fn cross_validate(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    config: &CrossValidationConfig,
) -> Result<CrossValidationReport> {
    let ladder = sideband_ladder(sys, mech, eps, config.order)?;
    let mut integrator = Integrator::for_system(sys, mech)?;
    integrator.transient_factor = config.transient_factor;
    integrator.enforce_step_bound = config.enforce_step_bound;
    if let Some(dt) = config.dt {
        integrator.dt = dt;
    }
    let minimum = config.transient_factor / settling_rate(sys, mech)? + MIN_PERIODS * 2.0 * PI / mech.omega_m;
    integrator.t_end = config.t_end.unwrap_or(minimum);
    let traj = integrator.integrate(sys, mech, eps)?;
    let fit = line_powers(&traj, mech.omega_m, config.order)?;

    let deviations: Vec<_> = [0, 1, 2]
        .into_iter()
        .map(|n| {
            let ladder_power = ladder.line_power(n);
            let oracle_power = fit.line_power(n);
            // lines far below the carrier are compared on the carrier's scale,
            // where integration noise would otherwise dominate
            let scale = ladder_power.max(oracle_power).max(LINE_FLOOR * ladder.line_power(0));
            let relative_deviation = if scale > 0.0 {
                (ladder_power - oracle_power).abs() / scale
            } else {
                0.0
            };
            OrderDeviation {
                n,
                ladder_power,
                oracle_power,
                relative_deviation,
            }
        })
        .collect();
    let max_deviation = deviations.iter().map(|d| d.relative_deviation).fold(0.0, f64::max);
    Ok(CrossValidationReport {
        verdict: if max_deviation <= config.tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        deviations,
        max_deviation,
        fit_residual: fit.residual,
        tolerance: config.tolerance,
    })
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

    #[test]
    fn single_mode_relaxes_to_eps_over_d1() {
        let sys = CoupledModeSystem::single_cavity(0.0, 20.0, 0.0).unwrap();
        let mech = MechanicalMode::new(6.0, 0.2, 0.0).unwrap();
        let traj = integrate(&sys, &mech, 1.0).unwrap();
        let last = *traj.a_t.last().unwrap();
        assert!((last - 1.0 / 20.0).norm() < 1e-8 / 20.0);
    }

    #[test]
    fn undriven_pt_steady_state_matches_probe_response() {
        let (sys, mech) = nominal();
        let sys = sys.with_g(0.0);
        let traj = integrate(&sys, &mech, 1.0).unwrap();
        let expected = crate::spectrum::probe_response(&sys, 0.0).norm();
        let got = traj.a_t.last().unwrap().norm();
        assert!((got - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn floquet_margin_reduces_to_static_margin() {
        let (sys, mech) = nominal();
        let still = floquet_margin(&sys, &mech.with_z0(0.0)).unwrap();
        assert!((still - 2.0).abs() < 1e-8, "{still}");
        let ep = CoupledModeSystem::ep(0.0, 20.0, 16.0, 1.0, 5.0).unwrap();
        let margin = decompose(&ep, DEFAULT_TRANSITION_TOL).unwrap().stability_margin;
        assert!((floquet_margin(&ep, &mech.with_z0(0.0)).unwrap() - margin).abs() < 1e-8);
    }

    #[test]
    fn modulation_can_pump_a_statically_stable_pair() {
        let (sys, mech) = nominal();
        let window = sys.with_g1(17.95);
        assert!(decompose(&window, DEFAULT_TRANSITION_TOL).unwrap().stable);
        assert!(floquet_margin(&window, &mech).unwrap() < 0.0);
        assert!(matches!(integrate(&window, &mech, 1.0), Err(Error::ParametricInstability { .. })));
        assert!(integrate(&window, &mech.with_z0(0.0), 1.0).is_ok());
    }

    #[test]
    fn segment_layout() {
        let (sys, mech) = nominal();
        let traj = integrate(&sys, &mech, 1.0).unwrap();
        let steady = traj.len() - traj.transient_cut;
        assert!(steady.is_power_of_two());
        assert!(traj.transient_cut < traj.len());
        assert!(traj.transient_cut as f64 * traj.dt >= DEFAULT_TRANSIENT_FACTOR / 2.0);
        for w in traj.times.windows(2) {
            assert!(((w[1] - w[0]) - traj.dt).abs() <= 1e-12 * traj.dt.max(w[1]));
        }
    }

    #[test]
    fn post_transient_energy_is_periodic() {
        let (sys, mech) = nominal();
        let mut integ = Integrator::for_system(&sys, &mech).unwrap();
        // a commensurate step makes each period an integer number of samples
        let period = 2.0 * PI / mech.omega_m;
        let per = (period / integ.dt).ceil() as usize;
        integ.dt = period / per as f64;
        let traj = integ.integrate(&sys, &mech, 1.0).unwrap();
        let a = traj.steady_a();
        let energies: Vec<f64> = a
            .chunks_exact(per)
            .map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .collect();
        for w in energies.windows(2) {
            assert!((w[1] - w[0]).abs() <= 1e-6 * w[0]);
        }
    }

    #[test]
    fn fit_recovers_synthetic_lines() {
        let omega_m = 6.0;
        let times: Vec<f64> = (0..8192).map(|k| k as f64 * 0.013).collect();
        let samples: Vec<Complex64> = times
            .iter()
            .map(|&t| Complex64::new(1.0, 0.0) + 0.1 * Complex64::from_polar(1.0, -omega_m * t))
            .collect();
        let fit = fit_harmonics(&times, &samples, omega_m, 3).unwrap();
        assert!((fit.amplitude(0) - 1.0).norm() < 1e-10);
        assert!((fit.amplitude(1) - 0.1).norm() < 1e-10);
        assert!(fit.amplitude(-1).norm() < 1e-10);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn fit_round_trips_ladder_series() {
        let (sys, mech) = nominal();
        let l = sideband_ladder(&sys, &mech, 1.0, 5).unwrap();
        let times: Vec<f64> = (0..4096).map(|k| k as f64 * 0.011).collect();
        let samples: Vec<Complex64> = times.iter().map(|&t| l.field_at(t)).collect();
        let fit = fit_harmonics(&times, &samples, mech.omega_m, 5).unwrap();
        for n in l.harmonics() {
            assert!((fit.amplitude(n) - l.a(n)).norm() <= 1e-10 * l.a(0).norm());
        }
    }

    #[test]
    fn nominal_parameters_cross_validate() {
        let (sys, mech) = nominal();
        let report = cross_validate(&sys, &mech, 1.0, &CrossValidationConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
        assert!(report.fit_residual < 1e-6);
    }

    #[test]
    fn single_cavity_cross_validates_tightly() {
        let (sys, mech) = nominal();
        let report = cross_validate(&sys.reference(), &mech, 1.0, &CrossValidationConfig::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.max_deviation < 1e-8, "{report:?}");
    }

    #[test]
    fn coarse_step_is_caught() {
        let (sys, mech) = nominal();
        let dt = 10.0 * step_bound(&sys, &mech);
        let strict = CrossValidationConfig {
            dt: Some(dt),
            ..Default::default()
        };
        assert!(matches!(
            cross_validate(&sys, &mech, 1.0, &strict),
            Err(Error::StepSize { .. })
        ));
    }

    #[test]
    fn drive_phase_only_rotates_lines() {
        let (sys, mech) = nominal();
        let base = Integrator::for_system(&sys, &mech).unwrap();
        let shifted = Integrator {
            drive_phase: 0.7,
            ..base
        };
        let f0 = line_powers(&base.integrate(&sys, &mech, 1.0).unwrap(), mech.omega_m, 5).unwrap();
        let f1 = line_powers(&shifted.integrate(&sys, &mech, 1.0).unwrap(), mech.omega_m, 5).unwrap();
        for n in 0..=2 {
            let (p, q) = (f0.amplitude(n).norm(), f1.amplitude(n).norm());
            assert!((p - q).abs() <= 1e-10 * p, "n = {n}: {p} vs {q}");
        }
    }

    #[test]
    fn unstable_system_is_rejected() {
        let (sys, mech) = nominal();
        assert!(matches!(
            integrate(&sys.with_g1(9.0), &mech, 1.0),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn csv_export_header() {
        let (sys, mech) = nominal();
        let traj = integrate(&sys.with_g(0.0), &mech, 1.0).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,Re(a),Im(a),Re(c),Im(c)\n0,0,0,0,0\n"));
        assert_eq!(text.lines().count(), traj.len() + 1);
    }
}
