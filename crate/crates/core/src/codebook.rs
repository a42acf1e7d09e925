//! Pilot codebooks and the Kronecker sensing operator `A = Fᵀ ⊗ G†`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{steering, ArrayConfig};
use crate::{CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CodebookMethod {
    /// Equal bins in cosine over [−1, 1].
    Nonuniform,
    /// Equal bins in angle over [0, π).
    Uniform,
    /// Cosine lattice with spacing 2/n (mutually orthogonal beams).
    Orthogonal,
}

impl CodebookMethod {
    pub const ALL: [CodebookMethod; 3] = [
        CodebookMethod::Nonuniform,
        CodebookMethod::Uniform,
        CodebookMethod::Orthogonal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CodebookMethod::Nonuniform => "nonuniform",
            CodebookMethod::Uniform => "uniform",
            CodebookMethod::Orthogonal => "orthogonal",
        }
    }
}

impl fmt::Display for CodebookMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodebookMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nonuniform" | "non-uniform" => Ok(CodebookMethod::Nonuniform),
            "uniform" => Ok(CodebookMethod::Uniform),
            "orthogonal" => Ok(CodebookMethod::Orthogonal),
            other => Err(Error::Config(format!("unknown codebook method {other:?}"))),
        }
    }
}

fn bin_centers(lo: f64, hi: f64, m: usize) -> impl Iterator<Item = f64> {
    let width = (hi - lo) / m as f64;
    (0..m).map(move |i| lo + (i as f64 + 0.5) * width)
}

/// Pointing angles of the `p` beams of an `n`-element array.
pub fn codebook_angles(method: CodebookMethod, n: usize, p: usize) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(Error::Config("pilot count must be positive".into()));
    }
    match method {
        CodebookMethod::Nonuniform => Ok(bin_centers(-1.0, 1.0, p).map(f64::acos).collect()),
        CodebookMethod::Uniform => Ok(bin_centers(0.0, PI, p).collect()),
        CodebookMethod::Orthogonal => {
            if p > n {
                return Err(Error::UnsupportedCodebook(format!(
                    "orthogonal codebook needs p ≤ n, got p = {p} for n = {n}"
                )));
            }
            Ok((0..p)
                .map(|k| {
                    (-1.0 + (2 * k + 1) as f64 / n as f64)
                        .clamp(-1.0, 1.0)
                        .acos()
                })
                .collect())
        }
    }
}

fn beam_matrix(n: usize, angles: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(n, angles.len());
    for (j, &a) in angles.iter().enumerate() {
        m.set_column(j, &steering(n, a));
    }
    m
}

/// Beamformer `F` (n_t × p_t) and combiner `G` (n_r × p_r).
#[derive(Debug, Clone)]
pub struct Codebook {
    pub f: CMatrix,
    pub g: CMatrix,
    pub method: CodebookMethod,
    pub p_t: usize,
    pub p_r: usize,
    pub tx_angles: Vec<f64>,
    pub rx_angles: Vec<f64>,
}

pub fn make_codebook(
    cfg: &ArrayConfig,
    method: CodebookMethod,
    p_t: usize,
    p_r: usize,
) -> Result<Codebook> {
    let tx_angles = codebook_angles(method, cfg.n_t, p_t)?;
    let rx_angles = codebook_angles(method, cfg.n_r, p_r)?;
    Ok(Codebook {
        f: beam_matrix(cfg.n_t, &tx_angles),
        g: beam_matrix(cfg.n_r, &rx_angles),
        method,
        p_t,
        p_r,
        tx_angles,
        rx_angles,
    })
}

/// `A = Fᵀ ⊗ G†` and its Gram matrix `K = A†A`.
#[derive(Debug, Clone)]
pub struct SensingOperator {
    pub a: CMatrix,
    pub k: CMatrix,
    pub n_t: usize,
    pub n_r: usize,
    pub p_t: usize,
    pub p_r: usize,
}

impl SensingOperator {
    pub fn from_matrices(f: &CMatrix, g: &CMatrix) -> Self {
        let a = f.transpose().kronecker(&g.adjoint());
        let k = a.adjoint() * &a;
        Self {
            a,
            k,
            n_t: f.nrows(),
            n_r: g.nrows(),
            p_t: f.ncols(),
            p_r: g.ncols(),
        }
    }

    pub fn observations(&self) -> usize {
        self.p_t * self.p_r
    }
}

pub fn make_sensing_operator(cb: &Codebook) -> SensingOperator {
    SensingOperator::from_matrices(&cb.f, &cb.g)
}

/// Column-major vectorisation.
pub fn vec_of(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

/// Checks `vec(UVW) = (Wᵀ ⊗ U) vec(V)` to within 1e−12.
pub fn vec_identity_check(u: &CMatrix, v: &CMatrix, w: &CMatrix) -> Result<bool> {
    if u.ncols() != v.nrows() || v.ncols() != w.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "U {}x{}, V {}x{}, W {}x{}",
            u.nrows(),
            u.ncols(),
            v.nrows(),
            v.ncols(),
            w.nrows(),
            w.ncols()
        )));
    }
    let lhs = vec_of(&(u * v * w));
    let rhs = w.transpose().kronecker(u) * vec_of(v);
    Ok((lhs - rhs).iter().all(|z| z.norm() <= 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
        CMatrix::from_fn(r, c, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn bin_center_examples() {
        let u = codebook_angles(CodebookMethod::Uniform, 16, 2).unwrap();
        assert!((u[0] - PI / 4.0).abs() < 1e-15 && (u[1] - 3.0 * PI / 4.0).abs() < 1e-15);
        let nu = codebook_angles(CodebookMethod::Nonuniform, 16, 2).unwrap();
        assert!((nu[0] - 2.0 * PI / 3.0).abs() < 1e-15 && (nu[1] - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_full_gives_identity_gram() {
        let cfg = ArrayConfig::new(4, 4).unwrap();
        let cb = make_codebook(&cfg, CodebookMethod::Orthogonal, 4, 4).unwrap();
        let op = make_sensing_operator(&cb);
        let eye = CMatrix::identity(16, 16);
        assert!((op.k - eye).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn orthogonal_partial_has_orthonormal_beams() {
        let cfg = ArrayConfig::new(16, 8).unwrap();
        let cb = make_codebook(&cfg, CodebookMethod::Orthogonal, 5, 3).unwrap();
        let ff = cb.f.adjoint() * &cb.f;
        let gg = cb.g.adjoint() * &cb.g;
        assert!((ff - CMatrix::identity(5, 5))
            .iter()
            .all(|z| z.norm() < 1e-12));
        assert!((gg - CMatrix::identity(3, 3))
            .iter()
            .all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn orthogonal_too_many_beams() {
        let cfg = ArrayConfig::new(4, 4).unwrap();
        assert!(matches!(
            make_codebook(&cfg, CodebookMethod::Orthogonal, 5, 4),
            Err(Error::UnsupportedCodebook(_))
        ));
    }

    #[test]
    fn trivial_operator() {
        let one = CMatrix::identity(1, 1);
        let op = SensingOperator::from_matrices(&one, &one);
        assert_eq!(op.a, one);
        assert_eq!(op.k, one);
    }

    #[test]
    fn gram_matches_index_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_matrix(&mut rng, 2, 2);
        let g = random_matrix(&mut rng, 2, 2);
        let op = SensingOperator::from_matrices(&f, &g);
        let (nt, nr, pt, pr) = (2, 2, 2, 2);
        // A[(a·pr + b), (i·nr + j)] = F[i, a] · conj(G[j, b])
        for c1 in 0..nt * nr {
            for c2 in 0..nt * nr {
                let (i1, j1) = (c1 / nr, c1 % nr);
                let (i2, j2) = (c2 / nr, c2 % nr);
                let mut s = Complex64::new(0.0, 0.0);
                for a in 0..pt {
                    for b in 0..pr {
                        let x1 = f[(i1, a)] * g[(j1, b)].conj();
                        let x2 = f[(i2, a)] * g[(j2, b)].conj();
                        s += x1.conj() * x2;
                    }
                }
                assert!((op.k[(c1, c2)] - s).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn vec_identity_examples() {
        let eye = CMatrix::identity(2, 2);
        assert!(vec_identity_check(&eye, &eye, &eye).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_matrix(&mut rng, 2, 3);
        let v = random_matrix(&mut rng, 3, 2);
        let w = random_matrix(&mut rng, 2, 2);
        assert!(vec_identity_check(&u, &v, &w).unwrap());

        // swapping W for Wᵀ inside the product breaks the identity
        let lhs = vec_of(&(&u * &v * w.transpose()));
        let rhs = w.transpose().kronecker(&u) * vec_of(&v);
        assert!((lhs - rhs).iter().any(|z| z.norm() > 1e-6));
        assert!(vec_identity_check(&u, &w, &v).is_err());
    }

    #[test]
    fn method_parsing() {
        assert_eq!(
            "Uniform".parse::<CodebookMethod>().unwrap(),
            CodebookMethod::Uniform
        );
        assert!("dft".parse::<CodebookMethod>().is_err());
    }

    proptest! {
        #[test]
        fn unit_columns_and_gram_trace(
            nt in 1usize..8, nr in 1usize..8, pt in 1usize..8, pr in 1usize..8,
            m in 0usize..2,
        ) {
            let method = [CodebookMethod::Nonuniform, CodebookMethod::Uniform][m];
            let cfg = ArrayConfig::new(nt, nr).unwrap();
            let cb = make_codebook(&cfg, method, pt, pr).unwrap();
            for c in cb.f.column_iter().chain(cb.g.column_iter()) {
                prop_assert!((c.norm() - 1.0).abs() < 1e-12);
            }
            let op = make_sensing_operator(&cb);
            let tr: f64 = op.k.diagonal().iter().map(|z| z.re).sum();
            prop_assert!((tr - op.a.norm_squared()).abs() < 1e-10);
            prop_assert!((tr - (pt * pr) as f64).abs() < 1e-10);
            let herm = &op.k - op.k.adjoint();
            prop_assert!(herm.iter().all(|z| z.norm() < 1e-12));
        }
    }
}
