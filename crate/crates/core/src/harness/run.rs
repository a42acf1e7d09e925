//! Grid execution for the figure experiments.

use rayon::prelude::*;
use serde::Serialize;

use crate::bayes::{assemble_fim_data, combine, inverse_second_moment, prior_fisher, prior_term};
use crate::channel::{noise_variance, normalize_profile, rice_from_db};
use crate::codebook::{make_codebook, make_sensing_operator, CodebookMethod};
use crate::crlb::crlb_trace;
use crate::error::Result;
use crate::geometry::ArrayConfig;
use crate::montecarlo::derive_seed;

use super::spec::{pilots_from_ratio, pilots_from_total, Experiment, PilotPlan, Scale, SweepSpec};

/// One Monte-Carlo moment of a single Rician gain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub experiment: Experiment,
    pub rice_db: f64,
    pub rice_linear: f64,
    pub omega: f64,
    pub run: usize,
    pub seed: u64,
    pub draws: usize,
    pub value: f64,
    pub std_err: f64,
}

/// One Bayesian bound at a grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrlbRow {
    pub experiment: Experiment,
    pub snr_db: f64,
    pub rice_db: f64,
    pub paths: usize,
    pub codebook: CodebookMethod,
    pub pilots: usize,
    pub p_t: usize,
    pub p_r: usize,
    pub ppr: Option<f64>,
    pub sigma_v2: f64,
    pub crlb_total: f64,
    pub crlb_total_db: f64,
    pub value: f64,
    pub crlb_phi: f64,
    pub crlb_psi: f64,
    pub crlb_alpha: f64,
    pub rcond: f64,
    pub prior_std_err: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    Moment(Vec<MomentRow>),
    Crlb(Vec<CrlbRow>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Rows::Moment(r) => r.len(),
            Rows::Crlb(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn run(spec: &SweepSpec) -> Result<Rows> {
    spec.validate()?;
    match spec.experiment {
        Experiment::Fig1 | Experiment::Fig2 => run_moments(spec).map(Rows::Moment),
        _ => run_bounds(spec).map(Rows::Crlb),
    }
}

pub fn run_fig1(spec: &SweepSpec) -> Result<Vec<MomentRow>> {
    run_moments(&SweepSpec {
        experiment: Experiment::Fig1,
        ..spec.clone()
    })
}

pub fn run_fig2(spec: &SweepSpec) -> Result<Vec<MomentRow>> {
    run_moments(&SweepSpec {
        experiment: Experiment::Fig2,
        ..spec.clone()
    })
}

fn as_bounds(spec: &SweepSpec, experiment: Experiment) -> Result<Vec<CrlbRow>> {
    run_bounds(&SweepSpec {
        experiment,
        ..spec.clone()
    })
}

pub fn run_fig3(spec: &SweepSpec) -> Result<Vec<CrlbRow>> {
    as_bounds(spec, Experiment::Fig3)
}

pub fn run_fig4(spec: &SweepSpec) -> Result<Vec<CrlbRow>> {
    as_bounds(spec, Experiment::Fig4)
}

pub fn run_fig5(spec: &SweepSpec) -> Result<Vec<CrlbRow>> {
    as_bounds(spec, Experiment::Fig5)
}

fn run_moments(spec: &SweepSpec) -> Result<Vec<MomentRow>> {
    spec.validate()?;
    let points: Vec<(f64, usize)> = spec
        .rice_db
        .iter()
        .flat_map(|&r| (0..spec.runs).map(move |run| (r, run)))
        .collect();
    points
        .par_iter()
        .map(|&(rice_db, run)| {
            let k = rice_from_db(rice_db);
            let seed = derive_seed(
                spec.seed,
                spec.experiment.id(),
                &[rice_db, spec.omega, run as f64],
            );
            let est = match spec.experiment {
                Experiment::Fig1 => inverse_second_moment(k, spec.omega, spec.mc_draws, seed)?,
                _ => prior_fisher(k, spec.omega, spec.mc_draws, seed)?,
            };
            Ok(MomentRow {
                experiment: spec.experiment,
                rice_db,
                rice_linear: k,
                omega: spec.omega,
                run,
                seed,
                draws: spec.mc_draws,
                value: est.mean,
                std_err: est.std_err,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct BoundPoint {
    snr_db: f64,
    rice_db: f64,
    paths: usize,
    codebook: CodebookMethod,
    pilots: usize,
    p_t: usize,
    p_r: usize,
    ppr: Option<f64>,
}

fn bound_points(spec: &SweepSpec) -> Vec<BoundPoint> {
    let mut out = Vec::new();
    for &codebook in &spec.codebooks {
        for &rice_db in &spec.rice_db {
            for &paths in &spec.paths {
                let plans: Vec<(usize, usize, usize, Option<f64>)> = match &spec.pilots {
                    PilotPlan::Fixed { p_t, p_r } => vec![(p_t * p_r, *p_t, *p_r, None)],
                    PilotPlan::Total { totals } => totals
                        .iter()
                        .map(|&t| {
                            let p = pilots_from_total(t);
                            (t, p, p, None)
                        })
                        .collect(),
                    PilotPlan::Ratio { ppr } => {
                        let p = pilots_from_ratio(*ppr, paths);
                        vec![(p * p, p, p, Some(*ppr))]
                    }
                };
                for (pilots, p_t, p_r, ppr) in plans {
                    for &snr_db in &spec.snr_db {
                        out.push(BoundPoint {
                            snr_db,
                            rice_db,
                            paths,
                            codebook,
                            pilots,
                            p_t,
                            p_r,
                            ppr,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Seed of the prior term at a grid point.
///
/// It depends only on the gain statistics (Rice factor, path count, decay),
/// so every SNR, codebook and pilot count at the same statistics shares one
/// prior estimate.
pub fn prior_seed(spec: &SweepSpec, rice_db: f64, paths: usize) -> u64 {
    derive_seed(
        spec.seed,
        &format!("{}/prior", spec.experiment.id()),
        &[rice_db, paths as f64, spec.delta],
    )
}

fn evaluate(spec: &SweepSpec, pt: &BoundPoint) -> Result<CrlbRow> {
    let cfg = ArrayConfig::new(spec.n_t, spec.n_r)?;
    let profile = normalize_profile(pt.paths, spec.delta, &[rice_from_db(pt.rice_db)])?;
    let seed = prior_seed(spec, pt.rice_db, pt.paths);
    let prior = prior_term(&profile, spec.mc_draws, seed)?;
    let op = make_sensing_operator(&make_codebook(&cfg, pt.codebook, pt.p_t, pt.p_r)?);
    let sigma_v2 = noise_variance(&cfg, pt.snr_db);
    let jb = combine(&assemble_fim_data(&profile, &op, sigma_v2)?, &prior)?;
    let report = crlb_trace(&jb)?;
    let total_db = 10.0 * report.total.log10();
    Ok(CrlbRow {
        experiment: spec.experiment,
        snr_db: pt.snr_db,
        rice_db: pt.rice_db,
        paths: pt.paths,
        codebook: pt.codebook,
        pilots: pt.pilots,
        p_t: pt.p_t,
        p_r: pt.p_r,
        ppr: pt.ppr,
        sigma_v2,
        crlb_total: report.total,
        crlb_total_db: total_db,
        value: match spec.scale {
            Scale::Linear => report.total,
            Scale::Db => total_db,
        },
        crlb_phi: report.per_block.phi,
        crlb_psi: report.per_block.psi,
        crlb_alpha: report.per_block.alpha,
        rcond: report.rcond,
        prior_std_err: prior.std_err.iter().copied().fold(0.0, f64::max),
        seed,
    })
}

fn run_bounds(spec: &SweepSpec) -> Result<Vec<CrlbRow>> {
    spec.validate()?;
    bound_points(spec)
        .par_iter()
        .map(|pt| evaluate(spec, pt))
        .collect()
}
