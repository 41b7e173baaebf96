//! Figure data: one CSV per figure plus a short summary of the numbers the
//! figure is meant to show.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::model::{decompose, ep_threshold, CoupledModeSystem};
use crate::sensitivity::{sensitivity_ratio_sweep, PointStatus};
use crate::spectrum::{
    background_spectrum, composite_spectrum, formal_amplification_factor, peak_analysis, sideband_ladder,
    uniform_grid, Peak,
};
use crate::sweep::{amplification_sweep, converged_ladder, fmt_value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Amplification factor against coupling.
    Fig1c,
    /// Background spectra: single cavity, broken phase, symmetric phase.
    Fig1d,
    /// Transducer output spectra: PT, single cavity, EP.
    Fig2b,
    /// Displacement sensitivity relative to the single cavity.
    Fig2c,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1c, Figure::Fig1d, Figure::Fig2b, Figure::Fig2c];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig1c => "fig1c",
            Figure::Fig1d => "fig1d",
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.id())
    }

    pub fn header(self) -> &'static [&'static str] {
        match self {
            Figure::Fig1c => &["g1_over_Gamma", "A", "status"],
            Figure::Fig1d => &["omega", "S_single", "S_broken", "S_ptsym"],
            Figure::Fig2b => &["omega_over_omegam", "S_pt", "S_single", "S_ep"],
            Figure::Fig2c => &["g1_over_threshold", "ratio_pt", "ratio_ep", "status"],
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::invalid("figure", format!("unknown figure {s:?}; expected fig1c, fig1d, fig2b or fig2c")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Summary {
    Amplification {
        /// `g1/threshold` of the largest valid `A`.
        peak_ratio: f64,
        peak_value: f64,
        /// First grid point and its formal (ungated) `A`.
        start_ratio: f64,
        start_value: f64,
        growth: f64,
        unstable_points: usize,
    },
    Background {
        ptsym_g1: f64,
        ptsym_peaks: Vec<Peak>,
        broken_g1: f64,
        broken_fwhm: Option<f64>,
        single_fwhm: Option<f64>,
    },
    Sidebands {
        /// PT spectrum maxima as `(ω/ω_m, height)`.
        pt_peaks: Vec<(f64, f64)>,
        contrast_pt: f64,
        contrast_single: f64,
        contrast_ratio: f64,
        ep_g1: f64,
        ladder_order: usize,
    },
    Sensitivity {
        min_ratio_pt: f64,
        min_ratio_pt_at: f64,
        min_ratio_ep: f64,
        min_ratio_ep_at: f64,
        failed_points: usize,
    },
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "unresolved".into(), |w| format!("{w:.4}"))
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summary::Amplification { peak_ratio, peak_value, start_ratio, start_value, growth, unstable_points } => {
                writeln!(f, "A peak: {peak_value:.4} at g1/threshold = {peak_ratio:.4}")?;
                writeln!(f, "formal A at g1/threshold = {start_ratio}: {start_value:.4}")?;
                writeln!(f, "growth to peak: {growth:.1}x")?;
                write!(f, "unstable points: {unstable_points}")
            }
            Summary::Background { ptsym_g1, ptsym_peaks, broken_g1, broken_fwhm, single_fwhm } => {
                writeln!(f, "symmetric phase (g1 = {ptsym_g1}):")?;
                for p in ptsym_peaks {
                    writeln!(f, "  peak at {:+.4} MHz, FWHM {}", p.position, fmt_opt(p.fwhm))?;
                }
                writeln!(f, "broken phase (g1 = {broken_g1:.4}): FWHM {}", fmt_opt(*broken_fwhm))?;
                write!(f, "single cavity: FWHM {}", fmt_opt(*single_fwhm))
            }
            Summary::Sidebands { pt_peaks, contrast_pt, contrast_single, contrast_ratio, ep_g1, ladder_order } => {
                let list: Vec<String> = pt_peaks.iter().map(|(x, h)| format!("{x:.3} ({h:.3})")).collect();
                writeln!(f, "PT peaks at omega/omega_m: {}", list.join(", "))?;
                writeln!(f, "contrast |a1/a0|^2: PT {contrast_pt:.4e}, single {contrast_single:.4e}")?;
                writeln!(f, "contrast ratio PT/single: {contrast_ratio:.2}")?;
                write!(f, "EP curve at g1 = {ep_g1:.4}; ladder order {ladder_order}")
            }
            Summary::Sensitivity { min_ratio_pt, min_ratio_pt_at, min_ratio_ep, min_ratio_ep_at, failed_points } => {
                writeln!(f, "min ratio_pt: {min_ratio_pt:.4e} at g1/threshold = {min_ratio_pt_at}")?;
                writeln!(f, "min ratio_ep: {min_ratio_ep:.4e} at g1/threshold = {min_ratio_ep_at}")?;
                write!(f, "points with a status other than ok: {failed_points}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub figure: Figure,
    pub csv: Vec<u8>,
    pub summary: Summary,
}

impl FigureOutput {
    /// Writes the CSV into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(self.figure.file_name());
        fs::write(&path, &self.csv)?;
        Ok(path)
    }
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(figure: Figure) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(figure.header())?;
        Ok(Table { writer })
    }

    fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) -> Result<()> {
        self.writer.write_record(fields.into_iter().collect::<Vec<_>>())?;
        Ok(())
    }

    fn finish(self) -> Result<Vec<u8>> {
        self.writer.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

/// Runs the pipeline behind `figure`.
pub fn reproduce(figure: Figure, config: &RunConfig) -> Result<FigureOutput> {
    config.validate()?;
    match figure {
        Figure::Fig1c => amplification_figure(config),
        Figure::Fig1d => background_figure(config),
        Figure::Fig2b => sideband_figure(config),
        Figure::Fig2c => sensitivity_figure(config),
    }
}

fn amplification_figure(config: &RunConfig) -> Result<FigureOutput> {
    let sys = config.system()?;
    let mech = config.mechanics()?;
    let eps = config.numerics.eps;
    let order = config.numerics.ladder_order;
    let ratios = config.sweep_ratios(&sys)?;
    let curve = amplification_sweep(&sys, &mech, eps, order, &ratios)?;

    let mut table = Table::new(Figure::Fig1c)?;
    for k in 0..ratios.len() {
        table.row([fmt_value(ratios[k]), fmt_value(curve.values[k]), curve.status[k].label().to_string()])?;
    }

    let peak = curve
        .peak_index()
        .ok_or_else(|| Error::invalid("sweep", "no stable point in the amplification sweep"))?;
    let threshold = ep_threshold(&sys);
    let start_value = formal_amplification_factor(&sys.with_g1(ratios[0] * threshold), &mech, eps, order)?;
    Ok(FigureOutput {
        figure: Figure::Fig1c,
        csv: table.finish()?,
        summary: Summary::Amplification {
            peak_ratio: ratios[peak],
            peak_value: curve.values[peak],
            start_ratio: ratios[0],
            start_value,
            growth: curve.values[peak] / start_value,
            unstable_points: curve.status.iter().filter(|s| !s.is_ok()).count(),
        },
    })
}

/// A stable broken-phase coupling for `sys`. A gain–loss pair is only stable
/// there for `g1 > √(d1·|d2|)`, so the midpoint of that window is used.
pub fn broken_phase_coupling(sys: &CoupledModeSystem) -> f64 {
    let threshold = ep_threshold(sys);
    if sys.has_gain() {
        0.5 * ((sys.d1 * sys.d2.abs()).sqrt() + threshold)
    } else {
        0.5 * threshold
    }
}

fn background_figure(config: &RunConfig) -> Result<FigureOutput> {
    let sys = config.system()?;
    let kappa = sys.d1;
    let grid = uniform_grid(-3.0 * kappa, 3.0 * kappa, config.numerics.grid_points);
    let broken_g1 = broken_phase_coupling(&sys);

    let single = background_spectrum(&sys.reference(), &grid)?;
    let broken = background_spectrum(&sys.with_g1(broken_g1), &grid)?;
    let ptsym = background_spectrum(&sys, &grid)?;

    let mut table = Table::new(Figure::Fig1d)?;
    for k in 0..grid.len() {
        table.row([grid[k], single.values[k], broken.values[k], ptsym.values[k]].map(fmt_value))?;
    }

    let tallest = |peaks: Vec<Peak>| peaks.into_iter().max_by(|a, b| a.height.total_cmp(&b.height));
    Ok(FigureOutput {
        figure: Figure::Fig1d,
        csv: table.finish()?,
        summary: Summary::Background {
            ptsym_g1: sys.g1,
            ptsym_peaks: peak_analysis(&ptsym)?,
            broken_g1,
            broken_fwhm: tallest(peak_analysis(&broken)?).and_then(|p| p.fwhm),
            single_fwhm: tallest(peak_analysis(&single)?).and_then(|p| p.fwhm),
        },
    })
}

/// Lossy-pair coupling at the same distance from its own threshold as the
/// configured gain–loss coupling.
pub fn ep_vicinity_coupling(config: &RunConfig) -> Result<f64> {
    let pt = config.pt_system()?;
    let ep = config.ep_system()?;
    Ok(pt.g1 / ep_threshold(&pt) * ep_threshold(&ep))
}

fn sideband_figure(config: &RunConfig) -> Result<FigureOutput> {
    let pt = config.pt_system()?;
    let ep_g1 = ep_vicinity_coupling(config)?;
    let ep = config.ep_system()?.with_g1(ep_g1);
    let mech = config.spectrum_mechanics()?;
    let eps = config.numerics.eps;
    let min_order = config.numerics.ladder_order;
    let omega_m = mech.omega_m;
    let grid = uniform_grid(-4.0 * omega_m, 4.0 * omega_m, config.numerics.grid_points);

    let pt_ladder = converged_ladder(&pt, &mech, eps, min_order)?;
    let single_ladder = converged_ladder(&pt.reference(), &mech, eps, min_order)?;
    let ep_ladder = converged_ladder(&ep, &mech, eps, min_order)?;
    let s_pt = composite_spectrum(&pt_ladder, &pt, &mech, &grid)?;
    let s_single = composite_spectrum(&single_ladder, &pt.reference(), &mech, &grid)?;
    let s_ep = composite_spectrum(&ep_ladder, &ep, &mech, &grid)?;

    let mut table = Table::new(Figure::Fig2b)?;
    for k in 0..grid.len() {
        table.row([grid[k] / omega_m, s_pt.values[k], s_single.values[k], s_ep.values[k]].map(fmt_value))?;
    }

    // contrast compared at a common truncation order
    let order = pt_ladder.order.max(single_ladder.order);
    let contrast_pt = sideband_ladder(&pt, &mech, eps, order)?.contrast(1);
    let contrast_single = sideband_ladder(&pt.reference(), &mech, eps, order)?.contrast(1);
    Ok(FigureOutput {
        figure: Figure::Fig2b,
        csv: table.finish()?,
        summary: Summary::Sidebands {
            pt_peaks: peak_analysis(&s_pt)?
                .iter()
                .map(|p| (p.position / omega_m, p.height))
                .collect(),
            contrast_pt,
            contrast_single,
            contrast_ratio: contrast_pt / contrast_single,
            ep_g1,
            ladder_order: order,
        },
    })
}

fn combined_status(pt: PointStatus, ep: PointStatus) -> String {
    match (pt.is_ok(), ep.is_ok()) {
        (true, true) => "ok".into(),
        (false, true) => format!("pt_{}", pt.label()),
        (true, false) => format!("ep_{}", ep.label()),
        (false, false) => format!("pt_{}+ep_{}", pt.label(), ep.label()),
    }
}

fn argmin(xs: &[f64], values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .zip(xs)
        .filter(|(v, _)| v.is_finite())
        .min_by(|a, b| a.0.total_cmp(b.0))
        .map_or((f64::NAN, f64::NAN), |(v, x)| (*v, *x))
}

fn sensitivity_figure(config: &RunConfig) -> Result<FigureOutput> {
    let pt = config.pt_system()?;
    let ep = config.ep_system()?;
    let mech = config.mechanics()?;
    let sp = config.sensitivity_params();
    // the transition itself is excluded from the sweep
    let tol = config.numerics.transition_tol;
    let grid = config.sweep_ratios(&pt)?;
    let curve = sensitivity_ratio_sweep(&pt, &ep, &mech, &sp, &grid)?;

    let mut table = Table::new(Figure::Fig2c)?;
    let mut failed = 0;
    let mut ratio_pt_kept = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let near_transition = (grid[k] - 1.0).abs() <= tol;
        let (pt_status, ratio_pt) = if near_transition {
            (PointStatus::Transition, f64::NAN)
        } else {
            (curve.status_pt[k], curve.ratio_pt[k])
        };
        ratio_pt_kept.push(ratio_pt);
        let status = combined_status(pt_status, curve.status_ep[k]);
        if status != "ok" {
            failed += 1;
        }
        table.row([fmt_value(grid[k]), fmt_value(ratio_pt), fmt_value(curve.ratio_ep[k]), status])?;
    }

    let (min_ratio_pt, min_ratio_pt_at) = argmin(&grid, &ratio_pt_kept);
    let (min_ratio_ep, min_ratio_ep_at) = argmin(&grid, &curve.ratio_ep);
    Ok(FigureOutput {
        figure: Figure::Fig2c,
        csv: table.finish()?,
        summary: Summary::Sensitivity {
            min_ratio_pt,
            min_ratio_pt_at,
            min_ratio_ep,
            min_ratio_ep_at,
            failed_points: failed,
        },
    })
}

/// Supermode data for the configured system, as `key,value` CSV.
pub fn supermode_table(config: &RunConfig) -> Result<Vec<u8>> {
    let sys = config.system()?;
    let d = decompose(&sys, config.numerics.transition_tol)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value"])?;
    let rows: [(&str, String); 12] = [
        ("Re_omega_plus", fmt_value(d.omega_plus.re)),
        ("Im_omega_plus", fmt_value(d.omega_plus.im)),
        ("Re_omega_minus", fmt_value(d.omega_minus.re)),
        ("Im_omega_minus", fmt_value(d.omega_minus.im)),
        ("Re_beta", fmt_value(d.beta.re)),
        ("Im_beta", fmt_value(d.beta.im)),
        ("chi", fmt_value(d.chi)),
        ("dlt", fmt_value(d.dlt)),
        ("threshold", fmt_value(ep_threshold(&sys))),
        ("g_eff", if d.g_eff.is_finite() { fmt_value(d.g_eff) } else { String::new() }),
        ("phase", d.phase.to_string()),
        ("stable", d.stable.to_string()),
    ];
    for (k, v) in rows {
        w.write_record([k, v.as_str()])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DEFAULT_TRANSITION_TOL;

    fn small() -> RunConfig {
        let mut c = RunConfig::default();
        c.sweep.count = 101;
        c.numerics.grid_points = 4001;
        c
    }

    fn text(out: &FigureOutput) -> String {
        String::from_utf8(out.csv.clone()).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.id().parse::<Figure>().unwrap(), f);
        }
        assert!("fig3a".parse::<Figure>().is_err());
    }

    #[test]
    fn headers_are_exact() {
        let c = small();
        let want = [
            "g1_over_Gamma,A,status",
            "omega,S_single,S_broken,S_ptsym",
            "omega_over_omegam,S_pt,S_single,S_ep",
            "g1_over_threshold,ratio_pt,ratio_ep,status",
        ];
        for (f, h) in Figure::ALL.into_iter().zip(want) {
            let out = reproduce(f, &c).unwrap();
            assert_eq!(text(&out).lines().next().unwrap(), h);
        }
    }

    #[test]
    fn unstable_rows_carry_no_number() {
        let out = reproduce(Figure::Fig1c, &small()).unwrap();
        let t = text(&out);
        let first = t.lines().nth(1).unwrap();
        assert_eq!(first, "0.5,,unstable");
        assert!(t.lines().skip(1).all(|l| l.ends_with(",ok") || l.ends_with(",,unstable")));
    }

    #[test]
    fn sensitivity_marks_the_transition() {
        let out = reproduce(Figure::Fig2c, &small()).unwrap();
        let t = text(&out);
        let rows: Vec<_> = t.lines().filter(|l| l.contains("transition")).collect();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].starts_with("1.0"), "{}", rows[0]);
        assert!(rows[0].contains(",,"), "{}", rows[0]);
    }

    #[test]
    fn broken_coupling_is_stable() {
        let sys = RunConfig::default().system().unwrap();
        let g1 = broken_phase_coupling(&sys);
        assert!(g1 < ep_threshold(&sys));
        assert!(decompose(&sys.with_g1(g1), DEFAULT_TRANSITION_TOL).unwrap().stable);
        let ep = RunConfig::default().ep_system().unwrap();
        assert_eq!(broken_phase_coupling(&ep), 1.0);
    }

    #[test]
    fn supermodes_table_lists_phase() {
        let t = String::from_utf8(supermode_table(&RunConfig::default()).unwrap()).unwrap();
        assert!(t.contains(&format!("phase,{}", crate::model::Phase::PtSymmetric)), "{t}");
        assert!(t.contains("stable,true"));
    }
}
