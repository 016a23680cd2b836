//! Output formatting: `key = value` records and CSV sweep files. Every
//! float is printed with 12 significant digits and every file starts with
//! a `#`-prefixed header embedding the resolved configuration (including
//! the derived coupling) so results are reproducible from the file alone.

use std::io::{self, Write};

use crate::config::RunConfig;
use crate::criteria::CriterionVerdict;
use crate::nopa::coupling_from_beta;
use crate::report::VarianceReport;
use crate::sweep::{JointOptimum, SweepResult};

/// 12 significant digits, scientific notation.
pub fn fmt_g12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Header lines with the resolved physical configuration.
fn write_config_meta(w: &mut dyn Write, cfg: &RunConfig) -> io::Result<()> {
    writeln!(w, "# gamma1 = {}", fmt_g12(cfg.gamma1))?;
    writeln!(w, "# gamma2 = {}", fmt_g12(cfg.gamma2))?;
    writeln!(w, "# tau_s = {}", fmt_g12(cfg.tau_s))?;
    writeln!(w, "# n_modes = {}", cfg.n_modes)?;
    writeln!(w, "# beta = {}", fmt_g12(cfg.beta))?;
    writeln!(w, "# t = {}", fmt_g12(cfg.t))?;
    writeln!(w, "# l = {}", fmt_g12(cfg.l))?;
    writeln!(w, "# freq_hz = {}", fmt_g12(cfg.freq_hz))?;
    if let Ok(p) = cfg.nopa() {
        writeln!(w, "# k = {}", fmt_g12(coupling_from_beta(&p)))?;
    }
    Ok(())
}

/// CSV sweep file: metadata header (configuration, detected crossovers,
/// refined optimum), then one row per grid sample. Unstable samples keep
/// an empty closed-loop cell and a zero stability flag.
pub fn write_sweep_csv(
    w: &mut dyn Write,
    command: &str,
    cfg: &RunConfig,
    result: &SweepResult,
) -> io::Result<()> {
    writeln!(w, "# command = {command}")?;
    writeln!(w, "# axis = {}", result.axis)?;
    writeln!(w, "# from = {}", fmt_g12(result.axis_values[0]))?;
    writeln!(
        w,
        "# to = {}",
        fmt_g12(*result.axis_values.last().expect("non-empty sweep"))
    )?;
    writeln!(w, "# points = {}", result.axis_values.len())?;
    write_config_meta(w, cfg)?;
    for x in &result.crossovers {
        writeln!(w, "# crossover = {}", fmt_g12(*x))?;
    }
    writeln!(w, "# optimum_axis = {}", fmt_g12(result.optimum.axis_value))?;
    writeln!(w, "# optimum_value = {}", fmt_g12(result.optimum.value))?;
    writeln!(
        w,
        "axis_value,cfc,bare,criterion_bound,vacuum_reference,stability_flag"
    )?;
    let vacuum = f64::from(cfg.n_modes) + 2.0;
    for i in 0..result.axis_values.len() {
        let cfc = result.cfc_values[i].map(fmt_g12).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_g12(result.axis_values[i]),
            cfc,
            fmt_g12(result.bare_values[i]),
            fmt_g12(crate::report::CRITERION_BOUND),
            fmt_g12(vacuum),
            u8::from(result.cfc_values[i].is_some()),
        )?;
    }
    Ok(())
}

fn write_verdicts(w: &mut dyn Write, verdicts: &[CriterionVerdict]) -> io::Result<()> {
    for v in verdicts {
        let tag = v.form.as_str();
        writeln!(w, "criterion.{tag}.value = {}", fmt_g12(v.value))?;
        writeln!(w, "criterion.{tag}.bound = {}", fmt_g12(v.bound))?;
        writeln!(w, "criterion.{tag}.entangled = {}", v.entangled)?;
        writeln!(
            w,
            "criterion.{tag}.enhanced_vs_bare = {}",
            v.enhanced_vs_bare
        )?;
    }
    Ok(())
}

/// Single-point record: all variance fields plus both criterion verdicts.
pub fn write_variance_record(
    w: &mut dyn Write,
    cfg: &RunConfig,
    report: &VarianceReport,
    verdicts: &[CriterionVerdict],
) -> io::Result<()> {
    writeln!(w, "# command = variance")?;
    write_config_meta(w, cfg)?;
    writeln!(w, "v_xdiff = {}", fmt_g12(report.v_xdiff))?;
    writeln!(w, "v_ysum = {}", fmt_g12(report.v_ysum))?;
    writeln!(w, "v_xsum = {}", fmt_g12(report.v_xsum))?;
    writeln!(w, "v_ydiff = {}", fmt_g12(report.v_ydiff))?;
    writeln!(
        w,
        "combined_squeezed = {}",
        fmt_g12(report.combined_squeezed)
    )?;
    writeln!(
        w,
        "combined_antisqueezed = {}",
        fmt_g12(report.combined_antisqueezed)
    )?;
    writeln!(w, "vacuum_reference = {}", fmt_g12(report.vacuum_reference))?;
    writeln!(w, "criterion_bound = {}", fmt_g12(report.criterion_bound))?;
    write_verdicts(w, verdicts)
}

/// Criterion-only record.
pub fn write_criterion_record(
    w: &mut dyn Write,
    cfg: &RunConfig,
    verdicts: &[CriterionVerdict],
) -> io::Result<()> {
    writeln!(w, "# command = criterion")?;
    write_config_meta(w, cfg)?;
    write_verdicts(w, verdicts)
}

/// Feedback-modified oscillation threshold record.
pub fn write_threshold_record(w: &mut dyn Write, cfg: &RunConfig, beta_th: f64) -> io::Result<()> {
    writeln!(w, "# command = threshold")?;
    write_config_meta(w, cfg)?;
    writeln!(w, "modified_threshold = {}", fmt_g12(beta_th))
}

/// Joint-optimization record.
pub fn write_optimum_record(
    w: &mut dyn Write,
    cfg: &RunConfig,
    free: &str,
    opt: &JointOptimum,
) -> io::Result<()> {
    writeln!(w, "# command = optimize")?;
    writeln!(w, "# free = {free}")?;
    write_config_meta(w, cfg)?;
    writeln!(w, "t = {}", fmt_g12(opt.t))?;
    writeln!(w, "beta = {}", fmt_g12(opt.beta))?;
    writeln!(w, "value = {}", fmt_g12(opt.value))
}
