//! Resolved sweep configuration and per-experiment defaults.

use std::fmt;

use serde::Serialize;

use crate::bayes::DEFAULT_MC_DRAWS;
use crate::codebook::CodebookMethod;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Custom,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Custom => "custom",
        }
    }

    /// Whether the experiment reports moments of a single gain rather than bounds.
    pub fn is_moment(self) -> bool {
        matches!(self, Experiment::Fig1 | Experiment::Fig2)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Db,
}

/// How the pilot counts of a bound row are chosen.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum PilotPlan {
    /// Fixed per-side counts.
    Fixed { p_t: usize, p_r: usize },
    /// Total pilot grid with `p_t = p_r = round(√total)`.
    Total { totals: Vec<usize> },
    /// Pilots-per-parameter ratio with `p_t = p_r = ceil(√(ppr · 3L))`.
    Ratio { ppr: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub n_t: usize,
    pub n_r: usize,
    pub pilots: PilotPlan,
    pub snr_db: Vec<f64>,
    pub rice_db: Vec<f64>,
    pub paths: Vec<usize>,
    pub delta: f64,
    pub codebooks: Vec<CodebookMethod>,
    /// Second moment of the gain in the single-gain experiments.
    pub omega: f64,
    /// Independent repetitions in the single-gain experiments.
    pub runs: usize,
    pub mc_draws: usize,
    pub seed: u64,
    pub scale: Scale,
}

pub const DEFAULT_SEED: u64 = 20170101;

fn stepped(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

/// `p_t = p_r = round(√total)` for a total pilot budget.
pub fn pilots_from_total(total: usize) -> usize {
    ((total as f64).sqrt().round() as usize).max(1)
}

/// `p_t = p_r = ceil(√(ppr · 3L))` for a pilots-per-parameter ratio.
pub fn pilots_from_ratio(ppr: f64, paths: usize) -> usize {
    let budget = (ppr * 3.0 * paths as f64).ceil();
    (budget.sqrt().ceil() as usize).max(1)
}

impl SweepSpec {
    pub fn defaults(experiment: Experiment) -> Self {
        let base = SweepSpec {
            experiment,
            n_t: 16,
            n_r: 16,
            pilots: PilotPlan::Fixed { p_t: 16, p_r: 16 },
            snr_db: stepped(-10.0, 30.0, 5.0),
            rice_db: vec![0.0, 10.0, 20.0],
            paths: vec![1, 3],
            delta: 0.5,
            codebooks: vec![CodebookMethod::Nonuniform],
            omega: 1.0,
            runs: 3,
            mc_draws: DEFAULT_MC_DRAWS,
            seed: DEFAULT_SEED,
            scale: Scale::Linear,
        };
        match experiment {
            Experiment::Fig1 | Experiment::Fig2 => SweepSpec {
                rice_db: stepped(0.0, 30.0, 2.0),
                paths: vec![1],
                snr_db: vec![],
                ..base
            },
            Experiment::Fig3 => base,
            Experiment::Fig4 => SweepSpec {
                pilots: PilotPlan::Total {
                    totals: vec![4, 16, 36, 64, 100, 144, 196, 256],
                },
                snr_db: vec![15.0],
                rice_db: vec![10.0],
                paths: vec![1],
                codebooks: CodebookMethod::ALL.to_vec(),
                ..base
            },
            Experiment::Fig5 => SweepSpec {
                pilots: PilotPlan::Ratio { ppr: 50.0 },
                rice_db: vec![10.0],
                ..base
            },
            Experiment::Custom => SweepSpec {
                snr_db: vec![15.0],
                rice_db: vec![10.0],
                paths: vec![1],
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        if self.n_t == 0 || self.n_r == 0 {
            return cfg_err(format!(
                "array sizes must be positive ({} x {})",
                self.n_t, self.n_r
            ));
        }
        if self.rice_db.is_empty() {
            return cfg_err("Rice-factor grid is empty".into());
        }
        if let Some(x) = self
            .rice_db
            .iter()
            .find(|x| x.is_nan() || **x == f64::INFINITY)
        {
            return cfg_err(format!("Rice factor {x} dB is not a number"));
        }
        if self.rice_db.contains(&f64::NEG_INFINITY) {
            return Err(Error::RayleighDivergence { path: 0 });
        }
        if self.mc_draws < crate::bayes::MIN_PRIOR_DRAWS {
            return cfg_err(format!(
                "at least {} Monte-Carlo draws are required, got {}",
                crate::bayes::MIN_PRIOR_DRAWS,
                self.mc_draws
            ));
        }
        if self.experiment.is_moment() {
            if self.runs == 0 {
                return cfg_err("at least one run is required".into());
            }
            if !(self.omega.is_finite() && self.omega > 0.0) {
                return cfg_err(format!("gain power must be positive, got {}", self.omega));
            }
            return Ok(());
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|x| !x.is_finite()) {
            return cfg_err("SNR grid must be non-empty and finite".into());
        }
        if self.paths.is_empty() || self.paths.contains(&0) {
            return cfg_err("path-count grid must be non-empty and positive".into());
        }
        if self.codebooks.is_empty() {
            return cfg_err("at least one codebook method is required".into());
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return cfg_err(format!("decay must be non-negative, got {}", self.delta));
        }
        match &self.pilots {
            PilotPlan::Fixed { p_t, p_r } if *p_t == 0 || *p_r == 0 => {
                cfg_err("pilot counts must be positive".into())
            }
            PilotPlan::Total { totals } if totals.is_empty() || totals.contains(&0) => {
                cfg_err("pilot grid must be non-empty and positive".into())
            }
            PilotPlan::Ratio { ppr } if !(ppr.is_finite() && *ppr > 0.0) => cfg_err(format!(
                "pilots-per-parameter ratio must be positive, got {ppr}"
            )),
            _ => Ok(()),
        }
    }
}
