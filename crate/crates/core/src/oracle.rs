//! Independent reference computations: finite-difference Jacobians, angular
//! quadrature of builder matrices and Monte-Carlo averages of the FIM.
//!
//! None of these share code paths with the closed forms they check beyond the
//! steering vectors themselves.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::{observation_mean, sample_paths, sample_paths_with, PathSet, RiceProfile};
use crate::codebook::SensingOperator;
use crate::error::Result;
use crate::fim::{assemble_fim_nonrandom, builder_factors, BuilderKind};
use crate::geometry::ArrayConfig;
use crate::montecarlo::estimate_mean_vec;
use crate::specfun::Quadrature;
use crate::{CMatrix, CVector};

/// Central-difference step for coordinate `x`.
pub fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// `∂m/∂θ` by central differences, one column per parameter in θ order.
pub fn fd_jacobian(op: &SensingOperator, cfg: &ArrayConfig, paths: &PathSet) -> Result<CMatrix> {
    let index = paths.index();
    let rows = op.observations();
    let mut jac = CMatrix::zeros(rows, index.len());
    for (c, p) in index.params().enumerate() {
        let x = paths.get(p);
        let h = fd_step(x);
        let mut plus = paths.clone();
        plus.set(p, x + h);
        let mut minus = paths.clone();
        minus.set(p, x - h);
        let d = (observation_mean(op, cfg, &plus)? - observation_mean(op, cfg, &minus)?)
            / Complex64::from(2.0 * h);
        jac.set_column(c, &d);
    }
    Ok(jac)
}

/// `(2/σ_v²) Re[J_m† J_m]` with a finite-difference Jacobian.
pub fn fim_by_jacobian(
    op: &SensingOperator,
    cfg: &ArrayConfig,
    paths: &PathSet,
    sigma_v2: f64,
) -> Result<DMatrix<f64>> {
    let jac = fd_jacobian(op, cfg, paths)?;
    let gram = jac.adjoint() * &jac;
    Ok(gram.map(|z| 2.0 * z.re / sigma_v2))
}

/// `E[X]` by quadrature over uniform angles.
///
/// Two-path builders factor into a column depending only on one path's angle
/// and a row depending only on the other's, so their expectation is the outer
/// product of two one-dimensional means.
pub fn expected_builder_by_quadrature(kind: BuilderKind, n: usize, quad: &Quadrature) -> CMatrix {
    let weight = 1.0 / std::f64::consts::PI;
    if kind.needs_second() {
        let mut col_mean = CVector::zeros(n);
        let mut row_mean = CVector::zeros(n);
        let first = depends_on_first(kind);
        for (t, w) in quad.points() {
            let (along_first, along_second) = (
                builder_factors(kind, n, t, Some(0.0)).expect("second angle given"),
                builder_factors(kind, n, 0.0, Some(t)).expect("second angle given"),
            );
            let (col, row) = if first {
                (along_first.0, along_second.1)
            } else {
                (along_second.0, along_first.1)
            };
            col_mean += col * Complex64::from(w * weight);
            row_mean += row * Complex64::from(w * weight);
        }
        return col_mean * row_mean.transpose();
    }
    let mut acc = CMatrix::zeros(n, n);
    for (t, w) in quad.points() {
        let (col, row) = builder_factors(kind, n, t, None).expect("single-path kind");
        acc += col * row.transpose() * Complex64::from(w * weight);
    }
    acc
}

/// For two-path builders: whether the column factor is a function of the
/// first (path l) angle. The row factor is then a function of the second.
fn depends_on_first(kind: BuilderKind) -> bool {
    use BuilderKind::*;
    match kind {
        P5 | P6 | P7 | Q3 | Q4 => false,
        P8 | P9 | Q5 | Q7 => true,
        _ => unreachable!("single-path kinds have no second factor"),
    }
}

/// Entrywise Monte-Carlo mean and standard error of the non-random FIM over
/// angles and gains drawn from the prior.
pub fn mc_average_fim(
    profile: &RiceProfile,
    op: &SensingOperator,
    sigma_v2: f64,
    draws: usize,
    seed: u64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = 3 * profile.paths();
    // surface configuration errors before the parallel loop
    assemble_fim_nonrandom(&sample_paths(profile, seed), op, sigma_v2)?;
    let (mean, err) = estimate_mean_vec(draws, n * n, seed, |rng| {
        let paths = sample_paths_with(profile, rng);
        let j = assemble_fim_nonrandom(&paths, op, sigma_v2).expect("validated above");
        j.entries.as_slice().to_vec()
    });
    Ok((
        DMatrix::from_column_slice(n, n, &mean),
        DMatrix::from_column_slice(n, n, &err),
    ))
}
