//! Bayesian Fisher information `J_B = J_D + J_P` for uniformly distributed
//! angles and independent Rician gains.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::channel::{sample_gain, ParamIndex, ParamKind, RiceProfile};
use crate::codebook::SensingOperator;
use crate::error::{Error, Result};
use crate::fim::{assemble_model, BuilderKind, EntryModel, FisherKind, FisherMatrix};
use crate::geometry::{ArrayConfig, Side};
use crate::montecarlo::{derive_seed, estimate_mean, Estimate};
use crate::specfun::{bessel_i_scaled, bessel_j, bessel_j_half_pi};
use crate::CMatrix;

/// Smallest Monte-Carlo sample accepted by [`prior_term`].
pub const MIN_PRIOR_DRAWS: usize = 1000;

/// Default sample size for the prior term and the moment estimators.
pub const DEFAULT_MC_DRAWS: usize = 100_000;

/// `E[e^{jπd cosθ}] = J_0(πd)`.
fn mean_phase(d: f64) -> f64 {
    bessel_j(0, PI * d)
}

/// `E[e^{jπd cosθ} sinθ] = (1/π)√(2/|d|) J_{1/2}(π|d|)`, `2/π` at `d = 0`.
fn mean_phase_sin(d: f64) -> f64 {
    if d == 0.0 {
        return 2.0 / PI;
    }
    let a = d.abs();
    (2.0 / a).sqrt() / PI * bessel_j_half_pi(a).expect("nonzero argument")
}

/// `E[e^{jπd cosθ} sin²θ] = ½[J_0(πd) + J_2(πd)]`.
fn mean_phase_sin2(d: f64) -> f64 {
    0.5 * (bessel_j(0, PI * d) + bessel_j(2, PI * d))
}

/// Closed-form entry `(r, s)` (zero-based) of `E[X]` for builder kind `X`
/// with every angle uniform on `[0, π]`.
pub fn expected_element(kind: BuilderKind, n: usize, r: usize, s: usize) -> Complex64 {
    use BuilderKind::*;
    let (i, j) = (r as f64, s as f64);
    let inv = 1.0 / n as f64;
    let v = match kind {
        P | Q6 => i * j * inv * mean_phase_sin2(j - i),
        P2 => j * inv * mean_phase_sin(j - i),
        P3 => i * inv * mean_phase_sin(j - i),
        P4 => inv * mean_phase(i - j),
        P5 | Q4 | Q7 => j * inv * mean_phase(i) * mean_phase_sin(j),
        P6 | P8 | Q3 => inv * mean_phase(i) * mean_phase(j),
        P7 | Q5 => i * j * inv * mean_phase_sin(i) * mean_phase_sin(j),
        P9 => i * inv * mean_phase_sin(i) * mean_phase(j),
        Q => inv * mean_phase(j - i),
        Q2 => j * inv * mean_phase_sin(j - i),
    };
    Complex64::new(v, 0.0)
}

/// Expected builder matrix with the angles integrated out.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedBuilder {
    pub kind: BuilderKind,
    pub entries: CMatrix,
}

pub fn expected_builder(kind: BuilderKind, cfg: &ArrayConfig) -> ExpectedBuilder {
    let n = cfg.elements(kind.side());
    ExpectedBuilder {
        kind,
        entries: CMatrix::from_fn(n, n, |r, s| expected_element(kind, n, r, s)),
    }
}

struct Expected {
    builders: Vec<CMatrix>,
    second_moment: Vec<f64>,
    mean: Vec<f64>,
}

impl Expected {
    fn new(profile: &RiceProfile, n_t: usize, n_r: usize) -> Self {
        let builders = BuilderKind::ALL
            .iter()
            .map(|&kind| {
                let n = match kind.side() {
                    Side::Transmit => n_t,
                    Side::Receive => n_r,
                };
                CMatrix::from_fn(n, n, |r, s| expected_element(kind, n, r, s))
            })
            .collect();
        Self {
            builders,
            second_moment: profile.omega.clone(),
            mean: profile.mean_gains(),
        }
    }
}

impl EntryModel for Expected {
    fn builder(&self, kind: BuilderKind, _l: usize, _m: usize) -> Result<CMatrix> {
        Ok(self.builders[kind as usize].clone())
    }

    fn gain_sq(&self, l: usize) -> f64 {
        self.second_moment[l]
    }

    fn gain(&self, l: usize) -> f64 {
        self.mean[l]
    }
}

/// Data term `J_D`: the non-random entries averaged over the prior, with
/// `α_l² → Ω_l`, `α_l → E[α_l]`, `α_l α_m → E[α_l] E[α_m]`.
pub fn assemble_fim_data(
    profile: &RiceProfile,
    op: &SensingOperator,
    sigma_v2: f64,
) -> Result<FisherMatrix> {
    let model = Expected::new(profile, op.n_t, op.n_r);
    assemble_model(
        &model,
        profile.paths(),
        &op.k,
        sigma_v2,
        FisherKind::BayesianData,
    )
}

/// `−∂² ln p(α)/∂α²` for a Rician gain with factor `k > 0` and power `omega`.
pub fn prior_curvature(alpha: f64, k: f64, omega: f64) -> f64 {
    let x = 2.0 * alpha * (k * (k + 1.0) / omega).sqrt();
    let i0 = bessel_i_scaled(0, x).expect("finite non-negative argument");
    let r1 = bessel_i_scaled(1, x).expect("finite non-negative argument") / i0;
    let r2 = bessel_i_scaled(2, x).expect("finite non-negative argument") / i0;
    let bracket = 1.0 + r2 - 2.0 * r1 * r1;
    1.0 / (alpha * alpha) + 2.0 * (k + 1.0) / omega - 2.0 * k * (k + 1.0) / omega * bracket
}

fn check_rice(k: f64, path: usize) -> Result<()> {
    if k == 0.0 {
        return Err(Error::RayleighDivergence { path });
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Config(format!(
            "Rice factor {k} of path {path} is not a positive number"
        )));
    }
    Ok(())
}

/// Monte-Carlo estimate of the prior Fisher information of one Rician gain.
pub fn prior_fisher(k: f64, omega: f64, draws: usize, seed: u64) -> Result<Estimate> {
    check_rice(k, 0)?;
    let profile = RiceProfile::single(k, omega)?;
    let (mu, s2) = (profile.mu[0], profile.sigma2[0]);
    Ok(estimate_mean(draws, seed, |rng| {
        prior_curvature(sample_gain(mu, s2, rng), k, omega)
    }))
}

/// Monte-Carlo estimate of `E[1/α²]`.
pub fn inverse_second_moment(k: f64, omega: f64, draws: usize, seed: u64) -> Result<Estimate> {
    check_rice(k, 0)?;
    let profile = RiceProfile::single(k, omega)?;
    let (mu, s2) = (profile.mu[0], profile.sigma2[0]);
    Ok(estimate_mean(draws, seed, |rng| {
        sample_gain(mu, s2, rng).powi(-2)
    }))
}

/// Per-path prior Fisher information, the only nonzero entries of `J_P`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorTerm {
    pub values: Vec<f64>,
    pub std_err: Vec<f64>,
    pub mc_draws: usize,
}

/// Path `l` is sampled with a seed derived from `(seed, l)`.
pub fn prior_term(profile: &RiceProfile, mc_draws: usize, seed: u64) -> Result<PriorTerm> {
    for (l, &k) in profile.k.iter().enumerate() {
        check_rice(k, l)?;
    }
    if mc_draws < MIN_PRIOR_DRAWS {
        return Err(Error::Config(format!(
            "prior term needs at least {MIN_PRIOR_DRAWS} draws, got {mc_draws}"
        )));
    }
    let mut values = Vec::with_capacity(profile.paths());
    let mut std_err = Vec::with_capacity(profile.paths());
    for l in 0..profile.paths() {
        let e = prior_fisher(
            profile.k[l],
            profile.omega[l],
            mc_draws,
            derive_seed(seed, "prior-path", &[l as f64]),
        )?;
        values.push(e.mean);
        std_err.push(e.std_err);
    }
    Ok(PriorTerm {
        values,
        std_err,
        mc_draws,
    })
}

/// `J_P` as a full matrix: the prior values on the α diagonal, zero elsewhere.
pub fn prior_matrix(prior: &PriorTerm) -> FisherMatrix {
    let index = ParamIndex::new(prior.values.len());
    let mut entries = DMatrix::zeros(index.len(), index.len());
    for (l, v) in prior.values.iter().enumerate() {
        let i = index.index(crate::channel::Param::new(ParamKind::Alpha, l));
        entries[(i, i)] = *v;
    }
    FisherMatrix {
        entries,
        index,
        kind: FisherKind::BayesianPrior,
    }
}

/// `J_B = J_D + J_P`.
pub fn combine(data: &FisherMatrix, prior: &PriorTerm) -> Result<FisherMatrix> {
    if data.index.paths() != prior.values.len() {
        return Err(Error::DimensionMismatch(format!(
            "data term has {} paths, prior term {}",
            data.index.paths(),
            prior.values.len()
        )));
    }
    Ok(FisherMatrix {
        entries: &data.entries + prior_matrix(prior).entries,
        index: data.index,
        kind: FisherKind::BayesianTotal,
    })
}

pub fn assemble_fim_bayesian(
    profile: &RiceProfile,
    op: &SensingOperator,
    sigma_v2: f64,
    mc_draws: usize,
    seed: u64,
) -> Result<FisherMatrix> {
    let prior = prior_term(profile, mc_draws, seed)?;
    let data = assemble_fim_data(profile, op, sigma_v2)?;
    combine(&data, &prior)
}
