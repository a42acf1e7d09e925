//! Inversion of Fisher matrices and the trace bound.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::channel::ParamKind;
use crate::error::{Error, Result};
use crate::fim::FisherMatrix;

/// Reciprocal condition number below which inversion is refused.
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// Traces of the φ, ψ and α diagonal blocks of `J⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockTraces {
    pub phi: f64,
    pub psi: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrlbReport {
    pub total: f64,
    pub per_block: BlockTraces,
    pub rcond: f64,
    pub order: usize,
    pub inverse: DMatrix<f64>,
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse of a symmetric positive definite matrix by Cholesky factorisation
/// with symmetric (diagonal) pivoting, and its reciprocal 1-norm condition
/// number.
pub fn invert_spd(j: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let n = j.nrows();
    if n == 0 || n != j.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "cannot invert a {}x{} matrix",
            j.nrows(),
            j.ncols()
        )));
    }
    if j.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("Fisher matrix has non-finite entries".into()));
    }
    let scale = j.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut asym = 0.0f64;
    for r in 0..n {
        for c in r + 1..n {
            asym = asym.max((j[(r, c)] - j[(c, r)]).abs());
        }
    }
    if asym > 1e-10 * scale.max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let max_diag = (0..n).map(|i| j[(i, i)]).fold(0.0, f64::max);
    if max_diag <= 0.0 {
        return Err(Error::IllConditioned { rcond: 0.0 });
    }

    let mut a = j.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, &pivot) = (k..n)
            .map(|i| (i, &a[(i, i)]))
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty range");
        if pivot < -1e-8 * max_diag {
            return Err(Error::NotPositiveDefinite {
                pivot: k,
                value: pivot,
            });
        }
        if pivot <= 1e-15 * max_diag {
            return Err(Error::IllConditioned {
                rcond: pivot.max(0.0) / max_diag,
            });
        }
        if p != k {
            a.swap_rows(k, p);
            a.swap_columns(k, p);
            perm.swap(k, p);
        }
        let d = a[(k, k)].sqrt();
        a[(k, k)] = d;
        for i in k + 1..n {
            a[(i, k)] /= d;
        }
        for c in k + 1..n {
            let lc = a[(c, k)];
            for r in k + 1..n {
                a[(r, c)] -= a[(r, k)] * lc;
            }
        }
    }

    // L⁻¹ by forward substitution on the lower triangle.
    let mut linv = DMatrix::<f64>::zeros(n, n);
    for c in 0..n {
        linv[(c, c)] = 1.0 / a[(c, c)];
        for r in c + 1..n {
            let mut s = 0.0;
            for t in c..r {
                s += a[(r, t)] * linv[(t, c)];
            }
            linv[(r, c)] = -s / a[(r, r)];
        }
    }
    let permuted = linv.transpose() * &linv;
    let mut inv = DMatrix::<f64>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            inv[(perm[r], perm[c])] = permuted[(r, c)];
        }
    }
    for r in 0..n {
        for c in r + 1..n {
            let m = 0.5 * (inv[(r, c)] + inv[(c, r)]);
            inv[(r, c)] = m;
            inv[(c, r)] = m;
        }
    }
    let rcond = 1.0 / (one_norm(j) * one_norm(&inv));
    Ok((inv, rcond))
}

/// `tr(J⁻¹)` with per-block traces and the reciprocal condition number.
pub fn crlb_trace(j: &FisherMatrix) -> Result<CrlbReport> {
    let (inverse, rcond) = invert_spd(&j.entries)?;
    if !(rcond >= RCOND_THRESHOLD) {
        return Err(Error::IllConditioned { rcond });
    }
    let block = |kind: ParamKind| -> f64 {
        (0..j.index.paths())
            .map(|l| {
                let i = j.index.index(crate::channel::Param::new(kind, l));
                inverse[(i, i)]
            })
            .sum()
    };
    Ok(CrlbReport {
        total: inverse.trace(),
        per_block: BlockTraces {
            phi: block(ParamKind::Phi),
            psi: block(ParamKind::Psi),
            alpha: block(ParamKind::Alpha),
        },
        rcond,
        order: j.order(),
        inverse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fim::FisherKind;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fisher(m: DMatrix<f64>) -> FisherMatrix {
        FisherMatrix::new(m, FisherKind::Nonrandom).unwrap()
    }

    fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        m.transpose() * &m + DMatrix::identity(n, n)
    }

    fn det(m: &DMatrix<f64>) -> f64 {
        let n = m.nrows();
        if n == 1 {
            return m[(0, 0)];
        }
        (0..n)
            .map(|c| {
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[(0, c)] * det(&m.clone().remove_row(0).remove_column(c))
            })
            .sum()
    }

    fn adjugate_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = m.nrows();
        let d = det(m);
        DMatrix::from_fn(n, n, |r, c| {
            let minor = m.clone().remove_row(c).remove_column(r);
            let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
            sign * det(&minor) / d
        })
    }

    #[test]
    fn scaled_identity_and_diagonal() {
        let r = crlb_trace(&fisher(DMatrix::identity(3, 3) * 4.0)).unwrap();
        assert!((r.total - 0.75).abs() < 1e-15);
        assert!((r.rcond - 1.0).abs() < 1e-15);
        let r = crlb_trace(&fisher(DMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![1.0, 2.0, 4.0]),
        )))
        .unwrap();
        assert!((r.total - 1.75).abs() < 1e-15);
        assert!((r.per_block.phi - 1.0).abs() < 1e-15);
        assert!((r.per_block.psi - 0.5).abs() < 1e-15);
        assert!((r.per_block.alpha - 0.25).abs() < 1e-15);
    }

    #[test]
    fn matches_adjugate_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let j = random_spd(&mut rng, 6);
            let r = crlb_trace(&fisher(j.clone())).unwrap();
            let adj = adjugate_inverse(&j);
            assert!((r.total - adj.trace()).abs() < 1e-8);
            assert!((&r.inverse - &adj).amax() < 1e-8);
            assert!(
                (r.per_block.phi + r.per_block.psi + r.per_block.alpha - r.total).abs() < 1e-12
            );
        }
    }

    #[test]
    fn error_classes() {
        let mut asym = DMatrix::identity(3, 3);
        asym[(0, 1)] = 0.5;
        assert!(matches!(
            crlb_trace(&fisher(asym)),
            Err(Error::NotSymmetric(_))
        ));

        let indefinite =
            DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            crlb_trace(&fisher(indefinite)),
            Err(Error::NotPositiveDefinite { .. })
        ));

        let singular = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 1.0]));
        assert!(matches!(
            crlb_trace(&fisher(singular)),
            Err(Error::IllConditioned { .. })
        ));

        let near = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-13, 1.0]));
        assert!(matches!(
            crlb_trace(&fisher(near)),
            Err(Error::IllConditioned { .. })
        ));
    }

    proptest! {
        #[test]
        fn scale_law(seed in 0u64..1000, c in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let j = random_spd(&mut rng, 6);
            let a = crlb_trace(&fisher(j.clone())).unwrap().total;
            let b = crlb_trace(&fisher(j * c)).unwrap().total;
            prop_assert!((b - a / c).abs() <= 1e-10 * (a / c).max(1.0));
        }

        #[test]
        fn adding_information_never_raises_the_bound(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let j = random_spd(&mut rng, 6);
            let d = DMatrix::from_fn(6, 2, |_, _| rng.random_range(-1.0..1.0));
            let delta = &d * d.transpose();
            let a = crlb_trace(&fisher(j.clone())).unwrap().total;
            let b = crlb_trace(&fisher(j + delta)).unwrap().total;
            prop_assert!(b <= a * (1.0 + 1e-12));
        }
    }
}
