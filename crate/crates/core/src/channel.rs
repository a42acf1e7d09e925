//! Multipath channel model: Rician gain statistics, path sampling, channel
//! synthesis, the noiseless observation and its log-likelihood.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::codebook::SensingOperator;
use crate::error::{Error, Result};
use crate::geometry::{steering, ArrayConfig};
use crate::specfun::{bessel_i_scaled, integrate_interval};
use crate::{CMatrix, CVector};

/// Converts a Rice factor in dB to linear scale; `-inf` maps to 0.
pub fn rice_from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Per-path Rician statistics with `Ω_l = σ_l²(1 + K_l)` and `μ_l² = K_l σ_l²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiceProfile {
    pub k: Vec<f64>,
    pub delta: f64,
    pub omega: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub mu: Vec<f64>,
}

impl RiceProfile {
    /// Profile with explicit second moments.
    pub fn from_moments(k: Vec<f64>, omega: Vec<f64>, delta: f64) -> Result<Self> {
        if k.is_empty() || k.len() != omega.len() {
            return Err(Error::Config(format!(
                "need one Rice factor per path ({} factors, {} powers)",
                k.len(),
                omega.len()
            )));
        }
        if let Some(bad) = k.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Config(format!(
                "Rice factor {bad} is not a finite non-negative number"
            )));
        }
        if let Some(bad) = omega.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Config(format!("path power {bad} is not positive")));
        }
        let sigma2: Vec<f64> = k.iter().zip(&omega).map(|(k, o)| o / (1.0 + k)).collect();
        let mu = k.iter().zip(&sigma2).map(|(k, s)| (k * s).sqrt()).collect();
        Ok(Self {
            k,
            delta,
            omega,
            sigma2,
            mu,
        })
    }

    /// One path with Rice factor `k` and second moment `omega`.
    pub fn single(k: f64, omega: f64) -> Result<Self> {
        Self::from_moments(vec![k], vec![omega], 0.0)
    }

    pub fn paths(&self) -> usize {
        self.k.len()
    }

    /// `E[α_l]` by Gauss–Legendre quadrature of `α p(α)` over
    /// `[max(0, μ − 12σ), μ + 12σ]`.
    pub fn mean_gain(&self, l: usize) -> f64 {
        let (mu, s2) = (self.mu[l], self.sigma2[l]);
        let s = s2.sqrt();
        let lo = (mu - 12.0 * s).max(0.0);
        integrate_interval(lo, mu + 12.0 * s, |a| a * rician_pdf(a, mu, s2))
    }

    pub fn mean_gains(&self) -> Vec<f64> {
        (0..self.paths()).map(|l| self.mean_gain(l)).collect()
    }
}

/// Exponential power-delay profile normalised to unit total power.
///
/// `k` holds either one factor per path or a single factor shared by all paths.
pub fn normalize_profile(paths: usize, delta: f64, k: &[f64]) -> Result<RiceProfile> {
    if paths == 0 {
        return Err(Error::Config("at least one path is required".into()));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::Config(format!(
            "decay must be non-negative, got {delta}"
        )));
    }
    let k = match k.len() {
        1 => vec![k[0]; paths],
        n if n == paths => k.to_vec(),
        n => {
            return Err(Error::Config(format!(
                "{n} Rice factors given for {paths} paths"
            )))
        }
    };
    let decay: Vec<f64> = (0..paths).map(|l| (-(l as f64) * delta).exp()).collect();
    let total: f64 = decay.iter().sum();
    let omega = decay.iter().map(|d| d / total).collect();
    RiceProfile::from_moments(k, omega, delta)
}

/// `σ_v² = n_t n_r / 10^{snr/10}` for unit total path power.
pub fn noise_variance(cfg: &ArrayConfig, snr_db: f64) -> f64 {
    (cfg.n_t * cfg.n_r) as f64 / 10f64.powf(snr_db / 10.0)
}

/// Rician envelope density with specular amplitude `mu` and diffuse power `sigma2`.
pub fn rician_pdf(alpha: f64, mu: f64, sigma2: f64) -> f64 {
    if alpha < 0.0 {
        return 0.0;
    }
    let x = 2.0 * alpha * mu / sigma2;
    let scaled_i0 = bessel_i_scaled(0, x).unwrap_or(0.0);
    2.0 * alpha / sigma2 * (-(alpha - mu).powi(2) / sigma2).exp() * scaled_i0
}

/// Envelope `|μ + (σ/√2)(g₁ + j g₂)|` of a complex Gaussian with specular part.
pub fn sample_gain<R: Rng + ?Sized>(mu: f64, sigma2: f64, rng: &mut R) -> f64 {
    let s = (0.5 * sigma2).sqrt();
    let g1: f64 = rng.sample(StandardNormal);
    let g2: f64 = rng.sample(StandardNormal);
    (mu + s * g1).hypot(s * g2)
}

/// Which component of a path a parameter describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ParamKind {
    Phi,
    Psi,
    Alpha,
}

impl ParamKind {
    pub const ALL: [ParamKind; 3] = [ParamKind::Phi, ParamKind::Psi, ParamKind::Alpha];

    pub fn symbol(self) -> &'static str {
        match self {
            ParamKind::Phi => "phi",
            ParamKind::Psi => "psi",
            ParamKind::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Param {
    pub kind: ParamKind,
    pub path: usize,
}

impl Param {
    pub fn new(kind: ParamKind, path: usize) -> Self {
        Self { kind, path }
    }
}

/// Flat ordering `[φ_1…φ_L, ψ_1…ψ_L, α_1…α_L]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamIndex {
    paths: usize,
}

impl ParamIndex {
    pub fn new(paths: usize) -> Self {
        Self { paths }
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn len(&self) -> usize {
        3 * self.paths
    }

    pub fn is_empty(&self) -> bool {
        self.paths == 0
    }

    pub fn index(&self, p: Param) -> usize {
        let block = match p.kind {
            ParamKind::Phi => 0,
            ParamKind::Psi => 1,
            ParamKind::Alpha => 2,
        };
        block * self.paths + p.path
    }

    pub fn param(&self, i: usize) -> Param {
        Param::new(ParamKind::ALL[i / self.paths], i % self.paths)
    }

    pub fn params(&self) -> impl Iterator<Item = Param> + '_ {
        (0..self.len()).map(|i| self.param(i))
    }
}

/// Angles and gains of L paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSet {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl PathSet {
    pub fn new(phi: Vec<f64>, psi: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if phi.is_empty() || phi.len() != psi.len() || phi.len() != alpha.len() {
            return Err(Error::DimensionMismatch(format!(
                "path lists have lengths {}, {}, {}",
                phi.len(),
                psi.len(),
                alpha.len()
            )));
        }
        if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::Domain(format!(
                "path gain {a} is not a non-negative number"
            )));
        }
        Ok(Self { phi, psi, alpha })
    }

    pub fn paths(&self) -> usize {
        self.phi.len()
    }

    pub fn index(&self) -> ParamIndex {
        ParamIndex::new(self.paths())
    }

    pub fn get(&self, p: Param) -> f64 {
        match p.kind {
            ParamKind::Phi => self.phi[p.path],
            ParamKind::Psi => self.psi[p.path],
            ParamKind::Alpha => self.alpha[p.path],
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        match p.kind {
            ParamKind::Phi => self.phi[p.path] = value,
            ParamKind::Psi => self.psi[p.path] = value,
            ParamKind::Alpha => self.alpha[p.path] = value,
        }
    }

    /// Parameter vector θ in [`ParamIndex`] order.
    pub fn theta(&self) -> Vec<f64> {
        let mut t = self.phi.clone();
        t.extend_from_slice(&self.psi);
        t.extend_from_slice(&self.alpha);
        t
    }
}

pub fn sample_paths_with<R: Rng + ?Sized>(profile: &RiceProfile, rng: &mut R) -> PathSet {
    let l = profile.paths();
    let mut phi = Vec::with_capacity(l);
    let mut psi = Vec::with_capacity(l);
    let mut alpha = Vec::with_capacity(l);
    for i in 0..l {
        phi.push(rng.random_range(0.0..PI));
        psi.push(rng.random_range(0.0..PI));
        alpha.push(sample_gain(profile.mu[i], profile.sigma2[i], rng));
    }
    PathSet { phi, psi, alpha }
}

/// Uniform angles on `[0, π)` and Rician gains, reproducible from `seed`.
pub fn sample_paths(profile: &RiceProfile, seed: u64) -> PathSet {
    sample_paths_with(profile, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `H = Σ_l α_l e_r(ψ_l) e_t(φ_l)†` (n_r × n_t).
pub fn channel_matrix(cfg: &ArrayConfig, paths: &PathSet) -> CMatrix {
    let mut h = CMatrix::zeros(cfg.n_r, cfg.n_t);
    for l in 0..paths.paths() {
        let er = steering(cfg.n_r, paths.psi[l]);
        let et = steering(cfg.n_t, paths.phi[l]);
        h += er * et.adjoint() * Complex64::from(paths.alpha[l]);
    }
    h
}

/// Kronecker response `e_t*(φ) ⊗ e_r(ψ)` of one path.
pub fn path_response(cfg: &ArrayConfig, phi: f64, psi: f64) -> CVector {
    steering(cfg.n_t, phi)
        .conjugate()
        .kronecker(&steering(cfg.n_r, psi))
}

fn check_operator(op: &SensingOperator, cfg: &ArrayConfig) -> Result<()> {
    if op.n_t != cfg.n_t || op.n_r != cfg.n_r {
        return Err(Error::DimensionMismatch(format!(
            "operator built for {}x{} arrays, configuration has {}x{}",
            op.n_t, op.n_r, cfg.n_t, cfg.n_r
        )));
    }
    Ok(())
}

/// `m = Σ_l α_l A (e_t*(φ_l) ⊗ e_r(ψ_l))`.
pub fn observation_mean(
    op: &SensingOperator,
    cfg: &ArrayConfig,
    paths: &PathSet,
) -> Result<CVector> {
    check_operator(op, cfg)?;
    let mut x = CVector::zeros(cfg.n_t * cfg.n_r);
    for l in 0..paths.paths() {
        x += path_response(cfg, paths.phi[l], paths.psi[l]) * Complex64::from(paths.alpha[l]);
    }
    Ok(&op.a * x)
}

/// `−p_t p_r ln(πσ_v²) − ‖y − m‖²/σ_v²`.
pub fn log_likelihood(
    op: &SensingOperator,
    cfg: &ArrayConfig,
    paths: &PathSet,
    y: &CVector,
    sigma_v2: f64,
) -> Result<f64> {
    if !(sigma_v2 > 0.0) {
        return Err(Error::Domain(format!(
            "noise variance must be positive, got {sigma_v2}"
        )));
    }
    let m = observation_mean(op, cfg, paths)?;
    if y.len() != m.len() {
        return Err(Error::DimensionMismatch(format!(
            "observation has {} entries, model has {}",
            y.len(),
            m.len()
        )));
    }
    let n = m.len() as f64;
    Ok(-n * (PI * sigma_v2).ln() - (y - m).norm_squared() / sigma_v2)
}

/// Proper complex Gaussian noise with variance `sigma_v2` per entry.
pub fn sample_noise<R: Rng + ?Sized>(len: usize, sigma_v2: f64, rng: &mut R) -> CVector {
    let s = (0.5 * sigma_v2).sqrt();
    CVector::from_fn(len, |_, _| {
        Complex64::new(
            s * rng.sample::<f64, _>(StandardNormal),
            s * rng.sample::<f64, _>(StandardNormal),
        )
    })
}
