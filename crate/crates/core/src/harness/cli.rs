//! Command-line interface.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::codebook::CodebookMethod;
use crate::error::{Error, Result};

use super::output::{write_csv, write_outputs};
use super::run::run;
use super::spec::{Experiment, PilotPlan, Scale, SweepSpec};
use super::validate::{run_validate, ValidateOptions};

/// Exit code for a failed validation run.
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "mmwave-crlb",
    version,
    about = "Cramér-Rao bounds for mmWave AoA/AoD/gain estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inverse second moment E[1/α²] of a Rician gain versus Rice factor.
    Fig1(SweepArgs),
    /// Prior Fisher information of a Rician gain versus Rice factor.
    Fig2(SweepArgs),
    /// Bayesian bound versus SNR for several Rice factors and path counts.
    Fig3(SweepArgs),
    /// Bayesian bound versus pilot count for the three codebook methods.
    Fig4(SweepArgs),
    /// Bayesian bound versus SNR at a fixed pilots-per-parameter ratio.
    Fig5(SweepArgs),
    /// Bayesian bound over a user-defined grid.
    Custom(SweepArgs),
    /// Run every oracle suite; exits with code 4 on failure.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// Transmit array elements.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Receive array elements.
    #[arg(long)]
    pub nr: Option<usize>,
    /// Beamforming pilots.
    #[arg(long)]
    pub pt: Option<usize>,
    /// Combining pilots.
    #[arg(long)]
    pub pr: Option<usize>,
    /// Total pilot grid; each entry x uses p_t = p_r = round(√x).
    #[arg(long, value_delimiter = ',')]
    pub pilots: Option<Vec<usize>>,
    /// SNR grid in dB.
    #[arg(long = "snr-db", value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_db: Option<Vec<f64>>,
    /// Rice-factor grid in dB (`-inf` is the Rayleigh case and is rejected).
    #[arg(long = "rice-db", value_delimiter = ',', allow_hyphen_values = true)]
    pub rice_db: Option<Vec<f64>>,
    /// Path-count grid.
    #[arg(long, value_delimiter = ',')]
    pub paths: Option<Vec<usize>>,
    /// Power-delay-profile decay.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Codebook methods.
    #[arg(long, value_delimiter = ',', value_enum)]
    pub codebook: Option<Vec<CodebookMethod>>,
    /// Pilots-per-parameter ratio; p_t = p_r = ceil(√(ppr·3L)).
    #[arg(long)]
    pub ppr: Option<f64>,
    /// Monte-Carlo draws per estimate.
    #[arg(long = "mc-draws")]
    pub mc_draws: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gain second moment for fig1/fig2.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Independent runs for fig1/fig2.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Output CSV path (a `.meta` sidecar is written next to it); stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Scale of the `value` column.
    #[arg(long, value_enum)]
    pub scale: Option<Scale>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Monte-Carlo draws for the statistical suites.
    #[arg(long = "mc-draws", default_value_t = 20_000)]
    pub mc_draws: usize,
    #[arg(long, default_value_t = super::spec::DEFAULT_SEED)]
    pub seed: u64,
}

impl SweepArgs {
    /// Experiment defaults overridden by the given flags.
    pub fn resolve(&self, experiment: Experiment) -> Result<SweepSpec> {
        let mut s = SweepSpec::defaults(experiment);
        if let Some(v) = self.nt {
            s.n_t = v;
        }
        if let Some(v) = self.nr {
            s.n_r = v;
        }
        if let Some(v) = &self.snr_db {
            s.snr_db = v.clone();
        }
        if let Some(v) = &self.rice_db {
            s.rice_db = v.clone();
        }
        if let Some(v) = &self.paths {
            s.paths = v.clone();
        }
        if let Some(v) = self.delta {
            s.delta = v;
        }
        if let Some(v) = &self.codebook {
            s.codebooks = v.clone();
        }
        if let Some(v) = self.mc_draws {
            s.mc_draws = v;
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.omega {
            s.omega = v;
        }
        if let Some(v) = self.runs {
            s.runs = v;
        }
        if let Some(v) = self.scale {
            s.scale = v;
        }
        let chosen = [
            self.pt.is_some() || self.pr.is_some(),
            self.pilots.is_some(),
            self.ppr.is_some(),
        ];
        if chosen.iter().filter(|c| **c).count() > 1 {
            return Err(Error::Config(
                "--pt/--pr, --pilots and --ppr are mutually exclusive".into(),
            ));
        }
        if self.pt.is_some() || self.pr.is_some() {
            s.pilots = PilotPlan::Fixed {
                p_t: self.pt.unwrap_or(s.n_t),
                p_r: self.pr.unwrap_or(s.n_r),
            };
        } else if let Some(t) = &self.pilots {
            s.pilots = PilotPlan::Total { totals: t.clone() };
        } else if let Some(r) = self.ppr {
            s.pilots = PilotPlan::Ratio { ppr: r };
        } else if let PilotPlan::Fixed { .. } = s.pilots {
            s.pilots = PilotPlan::Fixed {
                p_t: s.n_t,
                p_r: s.n_r,
            };
        }
        s.validate()?;
        Ok(s)
    }
}

/// Runs a parsed command; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let (experiment, args) = match &cli.command {
        Command::Fig1(a) => (Experiment::Fig1, a),
        Command::Fig2(a) => (Experiment::Fig2, a),
        Command::Fig3(a) => (Experiment::Fig3, a),
        Command::Fig4(a) => (Experiment::Fig4, a),
        Command::Fig5(a) => (Experiment::Fig5, a),
        Command::Custom(a) => (Experiment::Custom, a),
        Command::Validate(v) => {
            let report = run_validate(&ValidateOptions {
                mc_draws: v.mc_draws,
                seed: v.seed,
            })?;
            for s in &report.suites {
                println!(
                    "{} {:<22} worst {:.3e} (gate {:.1e})  {}",
                    if s.passed { "PASS" } else { "FAIL" },
                    s.name,
                    s.worst,
                    s.gate,
                    s.detail
                );
            }
            return Ok(if report.passed() { 0 } else { EXIT_VALIDATION });
        }
    };
    let spec = args.resolve(experiment)?;
    let rows = run(&spec)?;
    match &args.out {
        Some(path) => write_outputs(&spec, &rows, path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&rows, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(0)
}
