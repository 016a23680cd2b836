//! Command-line front end: single-point evaluation, axis sweeps,
//! optimization and the bundled reference sweep presets.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cfc_nopa::output::{
    write_criterion_record, write_optimum_record, write_sweep_csv, write_threshold_record,
    write_variance_record,
};
use cfc_nopa::{
    cfc_variance, modified_threshold, nopa_only_variances, optimize_joint, run_sweep, vlf_check,
    Error, FreeParams, RunConfig, SweepAxis,
};

/// Simulator for an N-mode optical parametric amplifier inside a
/// coherent feedback loop: correlation variances, inseparability
/// verdicts, stability thresholds, parameter sweeps and optimization.
#[derive(Parser)]
#[command(name = "cfc-nopa", version, arg_required_else_help = true)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Operating-point settings; flags override values loaded from --config.
#[derive(Args)]
struct Overrides {
    /// JSON configuration file (flat keys gamma1, gamma2, tau_s, n_modes,
    /// beta, t, l, freq_hz, ...)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output-coupler transmission coefficient
    #[arg(long, global = true)]
    gamma1: Option<f64>,
    /// Intracavity loss coefficient
    #[arg(long, global = true)]
    gamma2: Option<f64>,
    /// Cavity round-trip time in seconds
    #[arg(long, global = true)]
    tau_s: Option<f64>,
    /// Number of amplifier modes (>= 2)
    #[arg(long, global = true)]
    n_modes: Option<u32>,
    /// Pump strength relative to the bare oscillation threshold, in [0, 1)
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Control beam splitter transmissivity, in [0, 1]
    #[arg(long, global = true)]
    t: Option<f64>,
    /// Feedback loop loss, in [0, 1)
    #[arg(long, global = true)]
    l: Option<f64>,
    /// Analysis (sideband) frequency in Hz
    #[arg(long, global = true)]
    freq_hz: Option<f64>,
    /// Output file (default: stdout, except `reproduce` which writes
    /// <preset>.csv)
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation variances and criterion verdicts at one operating point
    Variance,
    /// Inseparability criterion verdicts only
    Criterion,
    /// Feedback-modified oscillation threshold for the loop settings
    Threshold,
    /// Sweep one axis and write a CSV table with detected features
    Sweep {
        /// Swept axis: transmissivity_t, frequency_hz or beta
        #[arg(long)]
        axis: Option<String>,
        /// Lower end of the sweep range
        #[arg(long)]
        from: Option<f64>,
        /// Upper end of the sweep range
        #[arg(long)]
        to: Option<f64>,
        /// Number of grid points
        #[arg(long)]
        points: Option<u32>,
    },
    /// Minimize the criterion combination over free parameters
    Optimize {
        /// Free parameters: t, beta, or t,beta
        #[arg(long)]
        free: Option<String>,
    },
    /// Regenerate a bundled reference sweep (fig2, fig3 or fig4)
    Reproduce {
        /// fig2: t-sweep; fig3: frequency sweep at t=0.8; fig4: pump sweep
        /// at t=0.8
        preset: String,
    },
}

enum Failure {
    Domain(Error),
    Io(io::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Domain(Error::InvalidInput(_) | Error::MismatchedContext(_, _)) => 2,
            Failure::Domain(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Domain(e) => e.fmt(f),
            Failure::Io(e) => write!(f, "i/o failure: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.overrides.config {
        Some(path) => RunConfig::from_json_str(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    apply_overrides(&mut cfg, &cli.overrides);

    match &cli.command {
        Command::Variance => {
            let fixed = cfg.fixed()?;
            let report = cfc_variance(&fixed.nopa, &fixed.loop_params, &fixed.at)?;
            let bare = nopa_only_variances(&fixed.nopa, &fixed.at)?;
            let verdicts = vlf_check(&report, &bare)?;
            with_output(&cfg.output, |w| {
                write_variance_record(w, &cfg, &report, &verdicts)
            })
        }
        Command::Criterion => {
            let fixed = cfg.fixed()?;
            let report = cfc_variance(&fixed.nopa, &fixed.loop_params, &fixed.at)?;
            let bare = nopa_only_variances(&fixed.nopa, &fixed.at)?;
            let verdicts = vlf_check(&report, &bare)?;
            with_output(&cfg.output, |w| write_criterion_record(w, &cfg, &verdicts))
        }
        Command::Threshold => {
            let fixed = cfg.fixed()?;
            let beta_th = modified_threshold(&fixed.nopa, &fixed.loop_params);
            with_output(&cfg.output, |w| write_threshold_record(w, &cfg, beta_th))
        }
        Command::Sweep {
            axis,
            from,
            to,
            points,
        } => {
            if let Some(axis) = axis {
                cfg.axis = Some(axis.parse::<SweepAxis>()?);
            }
            if let Some(from) = from {
                cfg.from_value = Some(*from);
            }
            if let Some(to) = to {
                cfg.to_value = Some(*to);
            }
            if let Some(points) = points {
                cfg.points = *points;
            }
            let result = run_sweep(&cfg.sweep_spec()?)?;
            with_output(&cfg.output, |w| write_sweep_csv(w, "sweep", &cfg, &result))
        }
        Command::Optimize { free } => {
            let free = free.as_deref().or(cfg.free.as_deref()).unwrap_or("t");
            let free: FreeParams = free.parse()?;
            let tag = match free {
                FreeParams::T => "t",
                FreeParams::Beta => "beta",
                FreeParams::TAndBeta => "t,beta",
            };
            let opt = optimize_joint(&cfg.fixed()?, free)?;
            with_output(&cfg.output, |w| write_optimum_record(w, &cfg, tag, &opt))
        }
        Command::Reproduce { preset } => {
            apply_preset(&mut cfg, preset)?;
            // Explicit flags still win over the preset's operating point.
            apply_overrides(&mut cfg, &cli.overrides);
            let result = run_sweep(&cfg.sweep_spec()?)?;
            let command = format!("reproduce {preset}");
            let target = cfg
                .output
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{preset}.csv")));
            with_output(&Some(target), |w| {
                write_sweep_csv(w, &command, &cfg, &result)
            })
        }
    }
}

fn apply_overrides(cfg: &mut RunConfig, ov: &Overrides) {
    if let Some(v) = ov.gamma1 {
        cfg.gamma1 = v;
    }
    if let Some(v) = ov.gamma2 {
        cfg.gamma2 = v;
    }
    if let Some(v) = ov.tau_s {
        cfg.tau_s = v;
    }
    if let Some(v) = ov.n_modes {
        cfg.n_modes = v;
    }
    if let Some(v) = ov.beta {
        cfg.beta = v;
    }
    if let Some(v) = ov.t {
        cfg.t = v;
    }
    if let Some(v) = ov.l {
        cfg.l = v;
    }
    if let Some(v) = ov.freq_hz {
        cfg.freq_hz = v;
    }
    if let Some(v) = &ov.output {
        cfg.output = Some(v.clone());
    }
}

/// The three bundled sweeps: a transmissivity sweep at the reference
/// pump, a frequency sweep and a pump sweep at the optimal-feedback point
/// t = 0.8.
fn apply_preset(cfg: &mut RunConfig, preset: &str) -> Result<(), Error> {
    match preset {
        "fig2" => {
            cfg.axis = Some(SweepAxis::TransmissivityT);
            cfg.from_value = Some(0.0);
            cfg.to_value = Some(1.0);
        }
        "fig3" => {
            cfg.axis = Some(SweepAxis::FrequencyHz);
            cfg.from_value = Some(0.0);
            cfg.to_value = Some(2.0e7);
            cfg.t = 0.8;
        }
        "fig4" => {
            cfg.axis = Some(SweepAxis::Beta);
            cfg.from_value = Some(0.0);
            cfg.to_value = Some(0.5);
            cfg.t = 0.8;
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown preset '{other}' (expected fig2, fig3 or fig4)"
            )));
        }
    }
    cfg.points = 501;
    Ok(())
}

/// Runs `body` against the output file, or stdout when none is set.
fn with_output(
    target: &Option<PathBuf>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    match target {
        Some(path) => {
            let mut file = io::BufWriter::new(fs::File::create(path)?);
            body(&mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}
