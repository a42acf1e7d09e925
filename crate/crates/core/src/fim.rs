//! Rank-one builder matrices and the non-random Fisher information matrix.
//!
//! Every entry of the FIM is a scaled real or imaginary part of
//! `tr[K (X ⊗ Y)]`, where `X` is an `n_t × n_t` builder on the transmit side,
//! `Y` an `n_r × n_r` builder on the receive side and `K = A†A`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{Param, ParamIndex, ParamKind, PathSet};
use crate::codebook::SensingOperator;
use crate::error::{Error, Result};
use crate::geometry::{steering, weighted_steering, ArrayConfig, Side};
use crate::{CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BuilderKind {
    P,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    P9,
    Q,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
    Q7,
}

impl BuilderKind {
    pub const ALL: [BuilderKind; 16] = [
        BuilderKind::P,
        BuilderKind::P2,
        BuilderKind::P3,
        BuilderKind::P4,
        BuilderKind::P5,
        BuilderKind::P6,
        BuilderKind::P7,
        BuilderKind::P8,
        BuilderKind::P9,
        BuilderKind::Q,
        BuilderKind::Q2,
        BuilderKind::Q3,
        BuilderKind::Q4,
        BuilderKind::Q5,
        BuilderKind::Q6,
        BuilderKind::Q7,
    ];

    /// P builders act on the transmit array, Q builders on the receive array.
    pub fn side(self) -> Side {
        use BuilderKind::*;
        match self {
            P | P2 | P3 | P4 | P5 | P6 | P7 | P8 | P9 => Side::Transmit,
            _ => Side::Receive,
        }
    }

    /// Whether the builder couples two different paths.
    pub fn needs_second(self) -> bool {
        use BuilderKind::*;
        matches!(self, P5 | P6 | P7 | P8 | P9 | Q3 | Q4 | Q5 | Q7)
    }

    pub fn name(self) -> &'static str {
        use BuilderKind::*;
        match self {
            P => "P",
            P2 => "P2",
            P3 => "P3",
            P4 => "P4",
            P5 => "P5",
            P6 => "P6",
            P7 => "P7",
            P8 => "P8",
            P9 => "P9",
            Q => "Q",
            Q2 => "Q2",
            Q3 => "Q3",
            Q4 => "Q4",
            Q5 => "Q5",
            Q6 => "Q6",
            Q7 => "Q7",
        }
    }
}

impl fmt::Display for BuilderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn second_angle(kind: BuilderKind, second: Option<f64>) -> Result<f64> {
    if kind.needs_second() {
        second.ok_or(Error::MissingAngle(kind))
    } else {
        Ok(0.0)
    }
}

/// Column and row vectors with `X = col · rowᵀ`.
///
/// `a` is the angle of path l and `b` the angle of path m; `b` is only read
/// by the two-path kinds.
pub fn builder_factors(
    kind: BuilderKind,
    n: usize,
    a: f64,
    b: Option<f64>,
) -> Result<(CVector, CVector)> {
    use BuilderKind::*;
    let b = second_angle(kind, b)?;
    let e = |t: f64| steering(n, t);
    let w = |t: f64| weighted_steering(n, t);
    let c = |x: f64| Complex64::from(x);
    let (sa, sb) = (a.sin(), b.sin());
    Ok(match kind {
        P => (w(a) * c(sa * sa), w(a).conjugate()),
        P2 => (e(a).conjugate() * c(sa), w(a).conjugate()),
        P3 => (w(a) * c(sa), e(a)),
        P4 => (e(a).conjugate(), e(a)),
        P5 => (e(b).conjugate(), w(a).conjugate() * c(sa)),
        P6 => (e(b).conjugate(), e(a)),
        P7 => (w(b) * c(sb), w(a).conjugate() * c(sa)),
        P8 => (e(a).conjugate(), e(b)),
        P9 => (w(a) * c(sa), e(b)),
        Q => (e(a), e(a).conjugate()),
        Q2 => (e(a), w(a) * c(sa)),
        Q3 => (e(b), e(a).conjugate()),
        Q4 => (e(b), w(a) * c(sa)),
        Q5 => (w(a).conjugate() * c(sa), w(b) * c(sb)),
        Q6 => (w(a).conjugate() * c(sa * sa), w(a)),
        Q7 => (e(a), w(b) * c(sb)),
    })
}

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// Closed-form entry `(r, s)` (zero-based) of a builder matrix.
pub fn general_element(
    kind: BuilderKind,
    n: usize,
    r: usize,
    s: usize,
    a: f64,
    b: Option<f64>,
) -> Result<Complex64> {
    use BuilderKind::*;
    let b = second_angle(kind, b)?;
    let (ca, cb) = (PI * a.cos(), PI * b.cos());
    let (sa, sb) = (a.sin(), b.sin());
    let (i, j) = (r as f64, s as f64);
    let inv = 1.0 / n as f64;
    Ok(match kind {
        P => cis(-(j - i) * ca) * (i * j * inv * sa * sa),
        P2 => cis(-(j - i) * ca) * (j * inv * sa),
        P3 => cis(-(j - i) * ca) * (i * inv * sa),
        P4 => cis((i - j) * ca) * inv,
        P5 => cis(i * cb - j * ca) * (j * inv * sa),
        P6 => cis(i * cb - j * ca) * inv,
        P7 => cis(i * cb - j * ca) * (i * j * inv * sa * sb),
        P8 => cis(i * ca - j * cb) * inv,
        P9 => cis(i * ca - j * cb) * (i * inv * sa),
        Q => cis((j - i) * ca) * inv,
        Q2 => cis(-(i - j) * ca) * (j * inv * sa),
        Q3 => cis(-i * cb + j * ca) * inv,
        Q4 => cis(-i * cb + j * ca) * (j * inv * sa),
        Q5 => cis(-i * ca + j * cb) * (i * j * inv * sa * sb),
        Q6 => cis((j - i) * ca) * (i * j * inv * sa * sa),
        Q7 => cis(-i * ca + j * cb) * (j * inv * sb),
    })
}

/// Outer-product evaluation of a builder matrix.
pub fn builder_matrix(kind: BuilderKind, n: usize, a: f64, b: Option<f64>) -> Result<CMatrix> {
    let (col, row) = builder_factors(kind, n, a, b)?;
    Ok(col * row.transpose())
}

/// Element-by-element evaluation of a builder matrix.
pub fn builder_from_elements(
    kind: BuilderKind,
    n: usize,
    a: f64,
    b: Option<f64>,
) -> Result<CMatrix> {
    second_angle(kind, b)?;
    Ok(CMatrix::from_fn(n, n, |r, s| {
        general_element(kind, n, r, s, a, b).expect("angle presence checked")
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuilderMatrix {
    pub kind: BuilderKind,
    pub entries: CMatrix,
    pub angles: (f64, Option<f64>),
}

/// Builds a transmit (P) or receive (Q) builder for the array in `cfg`.
///
/// Debug builds cross-check the outer product against the closed-form
/// general element.
pub fn build(
    kind: BuilderKind,
    cfg: &ArrayConfig,
    a: f64,
    b: Option<f64>,
) -> Result<BuilderMatrix> {
    let n = cfg.elements(kind.side());
    let entries = builder_matrix(kind, n, a, b)?;
    if cfg!(debug_assertions) {
        let closed = builder_from_elements(kind, n, a, b)?;
        let diff = (&entries - closed)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        debug_assert!(diff <= 1e-12, "builder {kind}: routes differ by {diff:e}");
    }
    Ok(BuilderMatrix {
        kind,
        entries,
        angles: (a, b),
    })
}

fn expect_side(kind: BuilderKind, side: Side) -> Result<()> {
    if kind.side() != side {
        return Err(Error::Config(format!(
            "builder {kind} belongs to the other array"
        )));
    }
    Ok(())
}

pub fn build_p(
    kind: BuilderKind,
    cfg: &ArrayConfig,
    phi_l: f64,
    phi_m: Option<f64>,
) -> Result<BuilderMatrix> {
    expect_side(kind, Side::Transmit)?;
    build(kind, cfg, phi_l, phi_m)
}

pub fn build_q(
    kind: BuilderKind,
    cfg: &ArrayConfig,
    psi_l: f64,
    psi_m: Option<f64>,
) -> Result<BuilderMatrix> {
    expect_side(kind, Side::Receive)?;
    build(kind, cfg, psi_l, psi_m)
}

/// `tr[K (X ⊗ Y)] = Σ K[i₁n_y+i₂, j₁n_y+j₂] X[j₁,i₁] Y[j₂,i₂]`.
pub fn trace_kron(k: &CMatrix, x: &CMatrix, y: &CMatrix) -> Complex64 {
    let (nx, ny) = (x.nrows(), y.nrows());
    debug_assert_eq!(k.nrows(), nx * ny);
    let mut acc = Complex64::new(0.0, 0.0);
    for j1 in 0..nx {
        for j2 in 0..ny {
            let col = k.column(j1 * ny + j2);
            for i1 in 0..nx {
                let xv = x[(j1, i1)];
                let mut inner = Complex64::new(0.0, 0.0);
                for i2 in 0..ny {
                    inner += col[i1 * ny + i2] * y[(j2, i2)];
                }
                acc += xv * inner;
            }
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FisherKind {
    Nonrandom,
    BayesianData,
    BayesianPrior,
    BayesianTotal,
}

/// Real symmetric `3L × 3L` Fisher information in `[φ, ψ, α]` block order.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    pub entries: DMatrix<f64>,
    pub index: ParamIndex,
    pub kind: FisherKind,
}

impl FisherMatrix {
    pub fn new(entries: DMatrix<f64>, kind: FisherKind) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || n != entries.ncols() || !n.is_multiple_of(3) {
            return Err(Error::DimensionMismatch(format!(
                "Fisher matrix must be 3L x 3L, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self {
            entries,
            index: ParamIndex::new(n / 3),
            kind,
        })
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, a: Param, b: Param) -> f64 {
        self.entries[(self.index.index(a), self.index.index(b))]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.order();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

/// Source of builder matrices and gain moments for the entry formulas.
pub(crate) trait EntryModel: Sync {
    fn builder(&self, kind: BuilderKind, l: usize, m: usize) -> Result<CMatrix>;
    /// `α_l²` or its expectation.
    fn gain_sq(&self, l: usize) -> f64;
    /// `α_l` or its expectation.
    fn gain(&self, l: usize) -> f64;
}

struct Realized<'a> {
    paths: &'a PathSet,
    n_t: usize,
    n_r: usize,
}

impl EntryModel for Realized<'_> {
    fn builder(&self, kind: BuilderKind, l: usize, m: usize) -> Result<CMatrix> {
        let (angles, n) = match kind.side() {
            Side::Transmit => (&self.paths.phi, self.n_t),
            Side::Receive => (&self.paths.psi, self.n_r),
        };
        builder_matrix(kind, n, angles[l], Some(angles[m]))
    }

    fn gain_sq(&self, l: usize) -> f64 {
        self.paths.alpha[l].powi(2)
    }

    fn gain(&self, l: usize) -> f64 {
        self.paths.alpha[l]
    }
}

pub(crate) fn model_entry<M: EntryModel + ?Sized>(
    model: &M,
    k: &CMatrix,
    sigma_v2: f64,
    a: Param,
    b: Param,
) -> Result<f64> {
    use BuilderKind::*;
    use ParamKind::*;
    let (a, b) = if (a.kind, a.path) <= (b.kind, b.path) {
        (a, b)
    } else {
        (b, a)
    };
    let (l, m) = (a.path, b.path);
    let s = 1.0 / sigma_v2;
    let pi2 = PI * PI;
    let t = |x: BuilderKind, y: BuilderKind| -> Result<Complex64> {
        Ok(trace_kron(
            k,
            &model.builder(x, l, m)?,
            &model.builder(y, l, m)?,
        ))
    };
    let same = l == m;
    let pair = model.gain(l) * model.gain(m);
    Ok(match (a.kind, b.kind) {
        (Phi, Phi) if same => 2.0 * pi2 * model.gain_sq(l) * s * t(P, Q)?.re,
        (Phi, Phi) => 2.0 * pi2 * pair * s * t(P7, Q3)?.re,
        (Psi, Psi) if same => 2.0 * pi2 * model.gain_sq(l) * s * t(P4, Q6)?.re,
        (Psi, Psi) => 2.0 * pi2 * pair * s * t(P8, Q5)?.re,
        (Alpha, Alpha) if same => 2.0 * s * t(P4, Q)?.re,
        (Alpha, Alpha) => 2.0 * s * t(P6, Q3)?.re,
        (Phi, Psi) if same => -2.0 * pi2 * model.gain_sq(l) * s * t(P3, Q2)?.re,
        (Phi, Psi) => -2.0 * pi2 * pair * s * t(P9, Q7)?.re,
        (Phi, Alpha) if same => -2.0 * PI * model.gain(l) * s * t(P2, Q)?.im,
        (Phi, Alpha) => -2.0 * PI * model.gain(l) * s * t(P5, Q3)?.im,
        (Psi, Alpha) if same => 2.0 * PI * model.gain(l) * s * t(P4, Q2)?.im,
        (Psi, Alpha) => 2.0 * PI * model.gain(l) * s * t(P6, Q4)?.im,
        _ => unreachable!("parameters are ordered phi < psi < alpha"),
    })
}

pub(crate) fn assemble_model<M: EntryModel + ?Sized>(
    model: &M,
    paths: usize,
    k: &CMatrix,
    sigma_v2: f64,
    kind: FisherKind,
) -> Result<FisherMatrix> {
    if !(sigma_v2 > 0.0) {
        return Err(Error::Domain(format!(
            "noise variance must be positive, got {sigma_v2}"
        )));
    }
    let index = ParamIndex::new(paths);
    let n = index.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| model_entry(model, k, sigma_v2, index.param(i), index.param(j)))
        .collect::<Result<_>>()?;
    let mut entries = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        entries[(i, j)] = v;
        entries[(j, i)] = v;
    }
    Ok(FisherMatrix {
        entries,
        index,
        kind,
    })
}

fn check_paths(paths: &PathSet, op: &SensingOperator) -> Result<()> {
    if op.k.nrows() != op.n_t * op.n_r {
        return Err(Error::DimensionMismatch(
            "Gram matrix does not match array sizes".into(),
        ));
    }
    if paths.paths() == 0 {
        return Err(Error::Config("at least one path is required".into()));
    }
    Ok(())
}

/// One entry of the non-random FIM from the closed-form builder traces.
pub fn fim_entry(
    a: Param,
    b: Param,
    paths: &PathSet,
    op: &SensingOperator,
    sigma_v2: f64,
) -> Result<f64> {
    check_paths(paths, op)?;
    let model = Realized {
        paths,
        n_t: op.n_t,
        n_r: op.n_r,
    };
    model_entry(&model, &op.k, sigma_v2, a, b)
}

/// Full non-random FIM; the upper triangle is evaluated and mirrored.
pub fn assemble_fim_nonrandom(
    paths: &PathSet,
    op: &SensingOperator,
    sigma_v2: f64,
) -> Result<FisherMatrix> {
    check_paths(paths, op)?;
    let model = Realized {
        paths,
        n_t: op.n_t,
        n_r: op.n_r,
    };
    assemble_model(
        &model,
        paths.paths(),
        &op.k,
        sigma_v2,
        FisherKind::Nonrandom,
    )
}
