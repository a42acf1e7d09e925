//! Oracle suites run by the `validate` subcommand.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bayes::{assemble_fim_data, expected_builder, prior_fisher};
use crate::channel::{noise_variance, normalize_profile, PathSet};
use crate::codebook::{make_codebook, make_sensing_operator, CodebookMethod};
use crate::error::Result;
use crate::fim::{assemble_fim_nonrandom, builder_from_elements, builder_matrix, BuilderKind};
use crate::geometry::ArrayConfig;
use crate::montecarlo::derive_seed;
use crate::oracle::{expected_builder_by_quadrature, fim_by_jacobian, mc_average_fim};
use crate::specfun::{bessel_i, bessel_j, bessel_j_half, Quadrature};
use crate::CMatrix;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation, in the suite's own units.
    pub worst: f64,
    pub gate: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub suites: Vec<SuiteResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub mc_draws: usize,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            mc_draws: 20_000,
            seed: super::spec::DEFAULT_SEED,
        }
    }
}

/// Builder evaluated by the outer-product route.
pub type BuilderFn = dyn Fn(BuilderKind, usize, f64, Option<f64>) -> Result<CMatrix> + Sync;

fn suite(name: &'static str, worst: f64, gate: f64, detail: String) -> SuiteResult {
    SuiteResult {
        name,
        passed: worst <= gate,
        worst,
        gate,
        detail,
    }
}

/// `J_n` against quadrature of `(1/π)∫ e^{jz cosθ} cos(nθ) dθ = jⁿ J_n(z)`,
/// the half-order identity and the modified Bessel series.
pub fn specfun_suite() -> SuiteResult {
    let mut j_err = 0.0f64;
    for i in 0..=48 {
        let z = 10f64.powf(-3.0 + 6.0 * i as f64 / 48.0);
        let q = Quadrature::for_frequency(z);
        for n in 0..=2u32 {
            let v =
                q.mean_complex(|t| Complex64::from_polar(1.0, z * t.cos()) * (n as f64 * t).cos());
            let j = (v * Complex64::i().powu(4 - n % 4)).re;
            j_err = j_err.max((j - bessel_j(n, z)).abs());
        }
        let h = bessel_j_half(z).expect("nonzero grid point");
        j_err = j_err.max((h * h * PI * z / 2.0 - z.sin().powi(2)).abs());
    }
    let mut i_err = 0.0f64;
    for i in 0..=40 {
        let x = 0.5 * i as f64;
        for n in 0..=2u32 {
            let mut term = (x / 2.0).powi(n as i32) / [1.0, 1.0, 2.0][n as usize];
            let mut sum = term;
            for m in 1..30 {
                term *= (x / 2.0).powi(2) / (m as f64 * (m + n as usize) as f64);
                sum += term;
            }
            let got = bessel_i(n, x).expect("in range");
            if sum > 0.0 {
                i_err = i_err.max(((got - sum) / sum).abs());
            }
        }
    }
    // both errors expressed as fractions of their gates (1e-9 absolute, 1e-10 relative)
    suite(
        "specfun-quadrature",
        (j_err / 1e-9).max(i_err / 1e-10),
        1.0,
        format!("J error {j_err:.2e} (gate 1e-9), I relative error {i_err:.2e} (gate 1e-10)"),
    )
}

/// Outer-product route against the general-element closed form for every
/// builder kind at 50 random angle pairs.
pub fn dual_route_suite(builder: &BuilderFn, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut culprit = String::new();
    for kind in BuilderKind::ALL {
        for _ in 0..50 {
            let n = rng.random_range(2..=8);
            let (a, b) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
            let (x, y) = match (
                builder(kind, n, a, Some(b)),
                builder_from_elements(kind, n, a, Some(b)),
            ) {
                (Ok(x), Ok(y)) => (x, y),
                _ => {
                    return suite(
                        "builder-dual-route",
                        f64::INFINITY,
                        1e-12,
                        format!("{kind} failed to build"),
                    )
                }
            };
            let d = (x - y).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if d > worst {
                worst = d;
                culprit = kind.to_string();
            }
        }
    }
    suite(
        "builder-dual-route",
        worst,
        1e-12,
        format!("worst builder {culprit}"),
    )
}

/// Expected builders against 201-point quadrature for `n = 8`.
pub fn expected_builder_suite() -> SuiteResult {
    let cfg = ArrayConfig::new(8, 8).expect("positive sizes");
    let quad = Quadrature::oracle();
    let mut worst = 0.0f64;
    for kind in BuilderKind::ALL {
        let closed = expected_builder(kind, &cfg).entries;
        let numeric = expected_builder_by_quadrature(kind, 8, &quad);
        worst = worst.max(
            (closed - numeric)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
    }
    suite("expected-builders", worst, 1e-9, "16 kinds, n = 8".into())
}

/// Closed-form FIM against the finite-difference Jacobian Gram matrix.
pub fn jacobian_suite(seed: u64) -> Result<SuiteResult> {
    let cfg = ArrayConfig::new(4, 4)?;
    let op = make_sensing_operator(&make_codebook(&cfg, CodebookMethod::Uniform, 4, 4)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let paths = PathSet::new(
            (0..2).map(|_| rng.random_range(0.1..PI - 0.1)).collect(),
            (0..2).map(|_| rng.random_range(0.1..PI - 0.1)).collect(),
            (0..2).map(|_| rng.random_range(0.2..1.5)).collect(),
        )?;
        let sigma_v2 = rng.random_range(0.1..2.0);
        let closed = assemble_fim_nonrandom(&paths, &op, sigma_v2)?.entries;
        let oracle = fim_by_jacobian(&op, &cfg, &paths, sigma_v2)?;
        worst = worst.max((closed - &oracle).amax() / oracle.amax());
    }
    Ok(suite(
        "fim-jacobian",
        worst,
        1e-5,
        "20 instances, n = p = 4, L = 2".into(),
    ))
}

/// Data term against the Monte-Carlo average of the non-random FIM.
pub fn data_term_suite(opts: &ValidateOptions) -> Result<SuiteResult> {
    let cfg = ArrayConfig::new(4, 4)?;
    let op = make_sensing_operator(&make_codebook(&cfg, CodebookMethod::Uniform, 4, 4)?);
    let profile = normalize_profile(2, 0.5, &[10.0])?;
    let sigma_v2 = noise_variance(&cfg, 10.0);
    let jd = assemble_fim_data(&profile, &op, sigma_v2)?.entries;
    let (mean, err) = mc_average_fim(
        &profile,
        &op,
        sigma_v2,
        opts.mc_draws,
        derive_seed(opts.seed, "validate/data-term", &[]),
    )?;
    let scale = jd.amax();
    let worst = jd
        .iter()
        .zip(mean.iter().zip(err.iter()))
        .map(|(d, (m, e))| (d - m).abs() / (e + 1e-12 * scale))
        .fold(0.0, f64::max);
    Ok(suite(
        "data-term-mc",
        worst,
        3.0,
        format!("{} draws, deviation in standard errors", opts.mc_draws),
    ))
}

/// Prior term near the Gaussian limit `2(K+1)/Ω` at K = 30 dB.
pub fn prior_limit_suite(opts: &ValidateOptions) -> Result<SuiteResult> {
    let k = 1e3;
    let est = prior_fisher(
        k,
        1.0,
        opts.mc_draws.max(1000),
        derive_seed(opts.seed, "validate/prior", &[]),
    )?;
    let limit = 2.0 * (k + 1.0);
    Ok(suite(
        "prior-gaussian-limit",
        (est.mean / limit - 1.0).abs(),
        0.1,
        format!("estimate {:.3}, limit {limit}", est.mean),
    ))
}

pub fn run_validate(opts: &ValidateOptions) -> Result<ValidationReport> {
    run_validate_with(opts, &|k, n, a, b| builder_matrix(k, n, a, b))
}

/// As [`run_validate`] with a replaceable outer-product builder.
pub fn run_validate_with(opts: &ValidateOptions, builder: &BuilderFn) -> Result<ValidationReport> {
    Ok(ValidationReport {
        suites: vec![
            specfun_suite(),
            dual_route_suite(builder, derive_seed(opts.seed, "validate/dual-route", &[])),
            expected_builder_suite(),
            jacobian_suite(derive_seed(opts.seed, "validate/jacobian", &[]))?,
            data_term_suite(opts)?,
            prior_limit_suite(opts)?,
        ],
    })
}
