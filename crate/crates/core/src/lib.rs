//! Cramér–Rao bounds for joint angle-of-departure, angle-of-arrival and
//! multipath-gain estimation in a millimeter-wave pilot system with uniform
//! linear arrays at both ends of the link.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: Bessel functions and the Gauss–Legendre oracle.
//! - [`geometry`]: ULA steering vectors and their index-weighted companions.
//! - [`codebook`]: beamforming/combining codebooks and the sensing operator.
//! - [`channel`]: Rician path statistics, channel synthesis, likelihood.
//! - [`fim`]: builder matrices and the non-random Fisher information matrix.
//! - [`bayes`]: expected builders, the data and prior Bayesian terms.
//! - [`crlb`]: inversion and bound reporting.
//! - [`oracle`]: independent reference computations used for validation.
//! - [`harness`]: figure sweeps, CSV output and the validation runner.

pub mod bayes;
pub mod channel;
pub mod codebook;
pub mod crlb;
pub mod error;
pub mod fim;
pub mod geometry;
pub mod harness;
pub mod montecarlo;
pub mod oracle;
pub mod specfun;

pub use error::{Error, Result};

/// Dense complex vector used for steering vectors and observations.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;
/// Dense complex matrix used for codebooks, builders and Gram matrices.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
