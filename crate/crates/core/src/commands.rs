//! What each `ptcam` subcommand computes. Every command returns its files and
//! a text report; the binary only writes them out and picks the exit code.

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::model::{decompose, ep_threshold, pt_ep_amplification_ratio};
use crate::reproduce::{ep_vicinity_coupling, reproduce, supermode_table, Figure};
use crate::sensitivity::sensitivity_ratio_sweep;
use crate::spectrum::{composite_spectrum, peak_analysis, uniform_grid, ComponentLabel};
use crate::sweep::{converged_ladder, fmt_value};
use crate::validate::validate;

#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    /// `(file name, contents)` to place in the output directory.
    pub files: Vec<(String, Vec<u8>)>,
    pub report: String,
    /// False when a check ran to completion but did not pass.
    pub passed: bool,
}

impl CommandOutput {
    fn ok(files: Vec<(String, Vec<u8>)>, report: String) -> Self {
        CommandOutput { files, report, passed: true }
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn supermodes(config: &RunConfig) -> Result<CommandOutput> {
    let table = supermode_table(config)?;
    let report = String::from_utf8_lossy(&table).into_owned();
    Ok(CommandOutput::ok(vec![("supermodes.csv".into(), table)], report))
}

/// Composite output spectrum of the configured system at the spectrum drive.
pub fn spectrum(config: &RunConfig) -> Result<CommandOutput> {
    config.validate()?;
    let sys = config.system()?;
    let mech = config.spectrum_mechanics()?;
    let ladder = converged_ladder(&sys, &mech, config.numerics.eps, config.numerics.ladder_order)?;
    let grid = uniform_grid(-4.0 * mech.omega_m, 4.0 * mech.omega_m, config.numerics.grid_points);
    let spec = composite_spectrum(&ladder, &sys, &mech, &grid)?;
    let carrier = spec
        .component(ComponentLabel::Background)
        .map(|c| c.values.clone())
        .unwrap_or_default();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["omega", "omega_over_omegam", "S", "S_carrier"])?;
    for k in 0..grid.len() {
        w.write_record([grid[k], grid[k] / mech.omega_m, spec.values[k], carrier[k]].map(fmt_value))?;
    }

    let mut report = format!("ladder order {}, residual {:.2e}\n", ladder.order, ladder.residual);
    for p in peak_analysis(&spec)? {
        report += &format!("peak at omega/omega_m = {:+.4}, height {:.4}\n", p.position / mech.omega_m, p.height);
    }
    report += &format!("sideband contrast |a1/a0|^2 = {:.4e}", ladder.contrast(1));
    Ok(CommandOutput::ok(vec![("spectrum.csv".into(), finish(w)?)], report))
}

pub fn amplification(config: &RunConfig) -> Result<CommandOutput> {
    let out = reproduce(Figure::Fig1c, config)?;
    Ok(CommandOutput::ok(
        vec![("amplification.csv".into(), out.csv)],
        out.summary.to_string(),
    ))
}

/// Full sensitivity table, absolute densities included.
pub fn sensitivity(config: &RunConfig) -> Result<CommandOutput> {
    config.validate()?;
    let pt = config.pt_system()?;
    let grid = config.sweep_ratios(&pt)?;
    let curve = sensitivity_ratio_sweep(
        &pt,
        &config.ep_system()?,
        &config.mechanics()?,
        &config.sensitivity_params(),
        &grid,
    )?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "g1_over_threshold",
        "S_xx_pt",
        "S_xx_single",
        "S_xx_ep",
        "ratio_pt",
        "ratio_ep",
        "status_pt",
        "status_ep",
    ])?;
    for k in 0..grid.len() {
        let mut row: Vec<String> = [
            grid[k],
            curve.s_xx_pt[k],
            curve.s_xx_single[k],
            curve.s_xx_ep[k],
            curve.ratio_pt[k],
            curve.ratio_ep[k],
        ]
        .map(fmt_value)
        .into();
        row.push(curve.status_pt[k].label().into());
        row.push(curve.status_ep[k].label().into());
        w.write_record(row)?;
    }
    let summary = reproduce(Figure::Fig2c, config)?.summary;
    Ok(CommandOutput::ok(
        vec![("sensitivity.csv".into(), finish(w)?)],
        format!("{summary}\nabsolute densities carry formula units (MHz J s / W); only ratios are meaningful"),
    ))
}

/// Gain–loss against loss–loss: thresholds, the closed-form amplification
/// ratio, and where each system sits relative to its threshold.
pub fn ep_compare(config: &RunConfig) -> Result<CommandOutput> {
    config.validate()?;
    let s = &config.system;
    let pt = config.pt_system()?;
    let ep = config.ep_system()?;
    let ratio = pt_ep_amplification_ratio(s.kappa, s.gamma_or_kappa1, s.gamma_or_kappa1)?;
    let ep_g1 = ep_vicinity_coupling(config)?;
    let d_pt = decompose(&pt, config.numerics.transition_tol)?;
    let d_ep = decompose(&ep.with_g1(ep_g1), config.numerics.transition_tol)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["system", "threshold", "g1", "phase", "stability_margin", "g_eff", "amplification_ratio"])?;
    for (name, sys, d) in [("PT", pt, d_pt), ("EP", ep.with_g1(ep_g1), d_ep)] {
        w.write_record([
            name.to_string(),
            fmt_value(ep_threshold(&sys)),
            fmt_value(sys.g1),
            d.phase.to_string(),
            fmt_value(d.stability_margin),
            if d.g_eff.is_finite() { fmt_value(d.g_eff) } else { String::new() },
            fmt_value(ratio),
        ])?;
    }
    let report = format!(
        "amplification ratio PT/EP (kappa = {}, gamma = kappa1 = {}): {ratio}\n\
         thresholds: PT {:.4} MHz, EP {:.4} MHz\n\
         g_eff at the same distance from threshold: PT {:.4}, EP {:.4}",
        s.kappa,
        s.gamma_or_kappa1,
        ep_threshold(&pt),
        ep_threshold(&ep),
        d_pt.g_eff,
        d_ep.g_eff,
    );
    Ok(CommandOutput::ok(vec![("ep_compare.csv".into(), finish(w)?)], report))
}

/// One figure or all four, in a fixed order.
pub fn reproduce_figures(config: &RunConfig, which: Option<Figure>) -> Result<CommandOutput> {
    let figures: Vec<Figure> = which.map_or_else(|| Figure::ALL.to_vec(), |f| vec![f]);
    let mut out = CommandOutput::ok(Vec::new(), String::new());
    for f in figures {
        let fig = reproduce(f, config)?;
        out.report += &format!("== {f}\n{}\n", fig.summary);
        out.files.push((f.file_name(), fig.csv));
    }
    out.report = out.report.trim_end().to_string();
    Ok(out)
}

pub fn run_validation(config: &RunConfig) -> CommandOutput {
    let report = validate(config);
    CommandOutput {
        files: Vec::new(),
        passed: report.passed(),
        report: report.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small() -> RunConfig {
        parse_config("[sweep]\ncount = 51\n[numerics]\ngrid_points = 2001\n").unwrap()
    }

    #[test]
    fn every_command_produces_a_csv() {
        let c = small();
        for out in [
            supermodes(&c).unwrap(),
            spectrum(&c).unwrap(),
            amplification(&c).unwrap(),
            sensitivity(&c).unwrap(),
            ep_compare(&c).unwrap(),
        ] {
            assert_eq!(out.files.len(), 1);
            assert!(!out.files[0].1.is_empty());
            assert!(out.passed);
        }
    }

    #[test]
    fn ep_compare_reports_576() {
        let out = ep_compare(&RunConfig::default()).unwrap();
        assert!(out.report.contains(": 576\n"), "{}", out.report);
    }

    #[test]
    fn spectrum_of_unstable_system_names_the_mode() {
        let c = parse_config("[system]\ng1 = 9.0\n").unwrap();
        let err = spectrum(&c).unwrap_err();
        assert!(err.is_numeric());
        assert!(err.to_string().contains("omega"), "{err}");
    }
}
