//! Steady-state sideband ladder under a prescribed periodic displacement.
//!
//! Inserting `a(t) = Σ a_n e^{−i n ω_m t}`, `c(t) = Σ c_n e^{−i n ω_m t}` and
//! `z(t) = z0 cos(ω_m t)` into the coupled-mode equations of motion gives, for
//! every harmonic `n ∈ [−N, N]`,
//!
//! ```text
//! (−i n ω_m + iΔ + d1) a_n + i g1 c_n + i (g z0 / 2)(a_{n−1} + a_{n+1}) = eps δ_{n0}
//! (−i n ω_m + iΔ + d2) c_n + i g1 a_n                                 = 0
//! ```
//!
//! with `a_{±(N+1)} = 0`. Unknowns are interleaved `(a_n, c_n)` so the matrix
//! has two sub- and two super-diagonals.

use num_complex::Complex64;

use super::MechanicalMode;
use crate::error::{Error, Result};
use crate::model::CoupledModeSystem;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 5;

/// `|a_N| / |a_0|` above which the truncation is flagged as too short.
pub const TRUNCATION_WARNING: f64 = 1e-8;

/// Relative residual every accepted ladder solution must satisfy.
pub const RESIDUAL_TOL: f64 = 1e-10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Square banded matrix with `kl` sub- and `ku` super-diagonals, stored row by
/// row with `kl` spare super-diagonals for the fill-in produced by pivoting.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![Complex64::new(0.0, 0.0); n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let k = self.offset(i, j);
        self.data[k] = v;
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Gaussian elimination with partial pivoting, restricted to the band.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let upper = self.kl + self.ku;
        let mut m = self.clone();
        let mut b = rhs.to_vec();

        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let pivot = (k..=last_row)
                .max_by(|&p, &q| m.data[m.offset(p, k)].norm().total_cmp(&m.data[m.offset(q, k)].norm()))
                .unwrap_or(k);
            if m.data[m.offset(pivot, k)].norm() == 0.0 {
                return Err(Error::Singular { context: "banded solve" });
            }
            let last_col = (k + upper).min(n - 1);
            if pivot != k {
                for j in k..=last_col {
                    let (p, q) = (m.offset(k, j), m.offset(pivot, j));
                    m.data.swap(p, q);
                }
                b.swap(k, pivot);
            }
            let diag = m.data[m.offset(k, k)];
            for i in (k + 1)..=last_row {
                let factor = m.data[m.offset(i, k)] / diag;
                if factor.norm() == 0.0 {
                    continue;
                }
                for j in k..=last_col {
                    let v = m.data[m.offset(k, j)];
                    let t = m.offset(i, j);
                    m.data[t] -= factor * v;
                }
                let bk = b[k];
                b[i] -= factor * bk;
            }
        }

        for k in (0..n).rev() {
            let last_col = (k + upper).min(n - 1);
            let mut s = b[k];
            for j in (k + 1)..=last_col {
                s -= m.data[m.offset(k, j)] * b[j];
            }
            b[k] = s / m.data[m.offset(k, k)];
        }
        Ok(b)
    }
}

#[derive(Debug, Clone)]
pub struct SidebandLadder {
    pub order: usize,
    /// Mode-1 coefficients, index `n + order`.
    pub a: Vec<Complex64>,
    /// Mode-2 coefficients, index `n + order`.
    pub c: Vec<Complex64>,
    pub eps: f64,
    pub omega_m: f64,
    /// `‖A x − b‖ / ‖b‖` of the assembled system.
    pub residual: f64,
    /// Set when `|a_N| / |a_0|` exceeds [`TRUNCATION_WARNING`].
    pub truncation_warning: bool,
}

impl SidebandLadder {
    fn index(&self, n: i32) -> Option<usize> {
        let k = n + self.order as i32;
        (0..self.a.len() as i32).contains(&k).then_some(k as usize)
    }

    /// `a_n`, zero outside the truncation.
    pub fn a(&self, n: i32) -> Complex64 {
        self.index(n).map_or(Complex64::new(0.0, 0.0), |k| self.a[k])
    }

    pub fn c(&self, n: i32) -> Complex64 {
        self.index(n).map_or(Complex64::new(0.0, 0.0), |k| self.c[k])
    }

    pub fn line_power(&self, n: i32) -> f64 {
        self.a(n).norm_sqr()
    }

    /// Sideband-to-carrier contrast `|a_n / a_0|²`.
    pub fn contrast(&self, n: i32) -> f64 {
        self.line_power(n) / self.line_power(0)
    }

    pub fn harmonics(&self) -> impl Iterator<Item = i32> {
        let n = self.order as i32;
        -n..=n
    }

    /// Mode-1 field `a(t)` reconstructed from the coefficients.
    pub fn field_at(&self, t: f64) -> Complex64 {
        self.harmonics()
            .map(|n| self.a(n) * Complex64::from_polar(1.0, -(n as f64) * self.omega_m * t))
            .sum()
    }
}

fn check_drive(sys: &CoupledModeSystem, mech: &MechanicalMode, eps: f64, order: usize) -> Result<()> {
    sys.validate()?;
    mech.validate()?;
    if !eps.is_finite() {
        return Err(Error::invalid("eps", "must be finite"));
    }
    if order < 2 {
        return Err(Error::invalid("order", format!("ladder order must be >= 2, got {order}")));
    }
    let bound = sys.g1 + sys.chi().abs();
    if sys.g * mech.z0 >= bound && sys.g * mech.z0 > 0.0 {
        return Err(Error::invalid(
            "z0",
            format!(
                "drive g*z0 = {} is outside the weak-drive regime (must be < g1 + |chi| = {bound})",
                sys.g * mech.z0
            ),
        ));
    }
    Ok(())
}

/// Solves the truncated ladder for a stable system.
pub fn sideband_ladder(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    order: usize,
) -> Result<SidebandLadder> {
    crate::dynamics::settling_rate(sys, mech)?;
    formal_sideband_ladder(sys, mech, eps, order)
}

/// Same linear system without the stability gate.
///
/// For a system with an amplifying supermode this is the formal Fourier-domain
/// response: the coefficients solve the ladder equations, but the time-domain
/// dynamics never settle onto them.
pub fn formal_sideband_ladder(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    order: usize,
) -> Result<SidebandLadder> {
    check_drive(sys, mech, eps, order)?;
    let (matrix, rhs) = assemble(sys, mech, eps, order);
    let x = matrix.solve(&rhs)?;

    let ax = matrix.mul_vec(&x);
    let r_norm = ax.iter().zip(&rhs).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
    let b_norm = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let residual = if b_norm > 0.0 { r_norm / b_norm } else { r_norm };
    if residual >= RESIDUAL_TOL {
        return Err(Error::Singular {
            context: "sideband ladder (residual above 1e-10)",
        });
    }

    let a: Vec<_> = x.iter().step_by(2).copied().collect();
    let c: Vec<_> = x.iter().skip(1).step_by(2).copied().collect();
    let a0 = a[order].norm();
    let edge = a[0].norm().max(a[2 * order].norm());
    let truncation_warning = a0 > 0.0 && edge / a0 > TRUNCATION_WARNING;

    Ok(SidebandLadder {
        order,
        a,
        c,
        eps,
        omega_m: mech.omega_m,
        residual,
        truncation_warning,
    })
}

/// Builds the interleaved `(a_n, c_n)` system and its right-hand side.
pub fn assemble(
    sys: &CoupledModeSystem,
    mech: &MechanicalMode,
    eps: f64,
    order: usize,
) -> (BandMatrix, Vec<Complex64>) {
    let size = 2 * (2 * order + 1);
    let mut m = BandMatrix::zeros(size, 2, 2);
    let mut rhs = vec![Complex64::new(0.0, 0.0); size];
    let hop = I * (0.5 * sys.g * mech.z0);

    for k in 0..=2 * order {
        let n = k as f64 - order as f64;
        let detune = I * (sys.delta - n * mech.omega_m);
        let (ra, rc) = (2 * k, 2 * k + 1);
        m.set(ra, ra, detune + sys.d1);
        m.set(ra, rc, I * sys.g1);
        if k > 0 {
            m.set(ra, ra - 2, hop);
        }
        if k < 2 * order {
            m.set(ra, ra + 2, hop);
        }
        m.set(rc, rc, detune + sys.d2);
        m.set(rc, ra, I * sys.g1);
    }
    rhs[2 * order] = Complex64::new(eps, 0.0);
    (m, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nominal() -> (CoupledModeSystem, MechanicalMode) {
        (
            CoupledModeSystem::pt(0.0, 20.0, 16.0, 19.8, 5.0).unwrap(),
            MechanicalMode::new(6.0, 0.2, 0.2).unwrap(),
        )
    }

    fn dense_solve(m: &BandMatrix, b: &[Complex64]) -> Vec<Complex64> {
        let n = m.dim();
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| m.get(i, j));
        let rhs = nalgebra::DVector::from_column_slice(b);
        dense.lu().solve(&rhs).unwrap().iter().copied().collect()
    }

    #[test]
    fn band_solver_matches_dense_lu() {
        let (sys, mech) = nominal();
        let (m, b) = assemble(&sys, &mech, 1.0, 6);
        let x = m.solve(&b).unwrap();
        let y = dense_solve(&m, &b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() <= 1e-12 * v.norm().max(1e-12));
        }
    }

    #[test]
    fn band_solver_needs_pivoting() {
        // zero leading diagonal forces a row swap
        let mut m = BandMatrix::zeros(3, 1, 1);
        m.set(0, 1, Complex64::new(1.0, 0.0));
        m.set(1, 0, Complex64::new(2.0, 0.0));
        m.set(1, 1, Complex64::new(1.0, 1.0));
        m.set(1, 2, Complex64::new(3.0, 0.0));
        m.set(2, 1, Complex64::new(1.0, 0.0));
        m.set(2, 2, Complex64::new(4.0, 0.0));
        let b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(5.0, 0.0)];
        let x = m.solve(&b).unwrap();
        let ax = m.mul_vec(&x);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn singular_band_is_reported() {
        let m = BandMatrix::zeros(4, 2, 2);
        assert!(matches!(
            m.solve(&[Complex64::new(1.0, 0.0); 4]),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn no_dut_coupling_means_no_sidebands() {
        let (sys, mech) = nominal();
        let sys = sys.with_g(0.0);
        let l = sideband_ladder(&sys, &mech, 1.0, 5).unwrap();
        for n in l.harmonics().filter(|&n| n != 0) {
            assert_eq!(l.a(n), Complex64::new(0.0, 0.0));
            assert_eq!(l.c(n), Complex64::new(0.0, 0.0));
        }
        let expected = -I * sys.g1 * l.a(0) / (I * sys.delta + sys.d2);
        assert!((l.c(0) - expected).norm() < 1e-14 * expected.norm());
        assert!(!l.truncation_warning);
    }

    #[test]
    fn zero_drive_amplitude_has_only_carrier() {
        let (sys, mech) = nominal();
        let l = sideband_ladder(&sys, &mech.with_z0(0.0), 1.0, 5).unwrap();
        assert!(l.harmonics().filter(|&n| n != 0).all(|n| l.a(n).norm() == 0.0));
    }

    #[test]
    fn sideband_is_linear_in_drive_amplitude() {
        let (sys, mech) = nominal();
        let r1 = sideband_ladder(&sys, &mech.with_z0(0.02), 1.0, 5).unwrap();
        let r2 = sideband_ladder(&sys, &mech.with_z0(0.04), 1.0, 5).unwrap();
        let ratio = (r2.a(1) / r2.a(0)).norm() / (r1.a(1) / r1.a(0)).norm();
        assert!((ratio - 2.0).abs() <= 0.05 * 2.0, "ratio {ratio}");
    }

    #[test]
    fn truncation_converges() {
        let (sys, mech) = nominal();
        let l5 = sideband_ladder(&sys, &mech, 1.0, 5).unwrap();
        let l8 = sideband_ladder(&sys, &mech, 1.0, 8).unwrap();
        for n in [1, 2] {
            let (p5, p8) = (l5.line_power(n), l8.line_power(n));
            assert!((p5 - p8).abs() <= 1e-6 * p8, "n = {n}: {p5} vs {p8}");
        }
        assert!(!l8.truncation_warning);
    }

    #[test]
    fn short_truncation_is_flagged() {
        let (sys, mech) = nominal();
        let l = formal_sideband_ladder(&sys, &mech.with_z0(2.0), 1.0, 2).unwrap();
        assert!(l.truncation_warning);
    }

    #[test]
    fn rejects_unstable_and_strong_drive() {
        let (sys, mech) = nominal();
        assert!(matches!(
            sideband_ladder(&sys.with_g1(9.0), &mech, 1.0, 5),
            Err(Error::Unstable { .. })
        ));
        // formal route still solves it
        assert!(formal_sideband_ladder(&sys.with_g1(9.0), &mech, 1.0, 5).is_ok());
        assert!(sideband_ladder(&sys, &mech.with_z0(10.0), 1.0, 5).is_err());
        assert!(sideband_ladder(&sys, &mech, 1.0, 1).is_err());
    }

    #[test]
    fn rejects_parametric_instability() {
        let (sys, mech) = nominal();
        assert!(matches!(
            sideband_ladder(&sys, &mech.with_z0(1.5), 1.0, 12),
            Err(Error::ParametricInstability { .. })
        ));
        assert!(sideband_ladder(&sys, &mech.with_z0(1.1), 1.0, 12).is_ok());
    }

    proptest! {
        #[test]
        fn residual_is_tiny(
            g1 in 18.5..40.0f64,
            z0 in 0.0..1.0f64,
            omega_m in 1.0..20.0f64,
            delta in -5.0..5.0f64,
        ) {
            let sys = CoupledModeSystem::pt(delta, 20.0, 16.0, g1, 5.0).unwrap();
            let mech = MechanicalMode::new(omega_m, 0.2, z0).unwrap();
            let l = formal_sideband_ladder(&sys, &mech, 1.0, 6).unwrap();
            prop_assert!(l.residual < RESIDUAL_TOL);
        }

        #[test]
        fn reciprocal_symmetry_at_zero_detuning(
            g1 in 18.5..40.0f64,
            z0 in 0.01..1.0f64,
            omega_m in 1.0..20.0f64,
            eps in 0.1..10.0f64,
        ) {
            let sys = CoupledModeSystem::pt(0.0, 20.0, 16.0, g1, 5.0).unwrap();
            let mech = MechanicalMode::new(omega_m, 0.2, z0).unwrap();
            let l = formal_sideband_ladder(&sys, &mech, eps, 5).unwrap();
            for n in 1..=5 {
                let (p, m) = (l.a(n).norm(), l.a(-n).norm());
                prop_assert!((p - m).abs() <= 1e-10 * p.max(m).max(1e-300));
            }
        }
    }
}
