//! Half-wavelength ULA responses.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::CVector;

/// Element counts of the transmit and receive arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_t: usize,
    pub n_r: usize,
}

impl ArrayConfig {
    pub fn new(n_t: usize, n_r: usize) -> Result<Self> {
        if n_t == 0 || n_r == 0 {
            return Err(Error::Config(format!(
                "array sizes must be positive (n_t = {n_t}, n_r = {n_r})"
            )));
        }
        Ok(Self { n_t, n_r })
    }

    pub fn elements(&self, side: Side) -> usize {
        match side {
            Side::Transmit => self.n_t,
            Side::Receive => self.n_r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Transmit,
    Receive,
}

/// Unit-norm array response together with the side and angle it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: CVector,
    side: Side,
    angle: f64,
}

impl SteeringVector {
    pub fn entries(&self) -> &CVector {
        &self.entries
    }

    pub fn into_entries(self) -> CVector {
        self.entries
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `(1/√n) e^{−jπk cos(angle)}`, k = 0…n−1.
pub fn steering(n: usize, angle: f64) -> CVector {
    let scale = 1.0 / (n as f64).sqrt();
    let step = -PI * angle.cos();
    CVector::from_fn(n, |k, _| Complex64::from_polar(scale, step * k as f64))
}

/// `(k/√n) e^{+jπk cos(angle)}`, k = 0…n−1; entry 0 is exactly zero.
pub fn weighted_steering(n: usize, angle: f64) -> CVector {
    let scale = 1.0 / (n as f64).sqrt();
    let step = PI * angle.cos();
    CVector::from_fn(n, |k, _| {
        Complex64::from_polar(k as f64 * scale, step * k as f64)
    })
}

pub fn steer_tx(cfg: &ArrayConfig, phi: f64) -> SteeringVector {
    SteeringVector {
        entries: steering(cfg.n_t, phi),
        side: Side::Transmit,
        angle: phi,
    }
}

pub fn steer_rx(cfg: &ArrayConfig, psi: f64) -> SteeringVector {
    SteeringVector {
        entries: steering(cfg.n_r, psi),
        side: Side::Receive,
        angle: psi,
    }
}

pub fn steer_tx_weighted(cfg: &ArrayConfig, phi: f64) -> CVector {
    weighted_steering(cfg.n_t, phi)
}

pub fn steer_rx_weighted(cfg: &ArrayConfig, psi: f64) -> CVector {
    weighted_steering(cfg.n_r, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn broadside_is_flat() {
        let cfg = ArrayConfig::new(4, 4).unwrap();
        for v in [steer_tx(&cfg, PI / 2.0), steer_rx(&cfg, PI / 2.0)] {
            for z in v.entries().iter() {
                assert!(close(*z, Complex64::new(0.5, 0.0), 1e-15));
            }
        }
    }

    #[test]
    fn endfire_two_elements() {
        let cfg = ArrayConfig::new(2, 2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        for v in [steer_tx(&cfg, 0.0), steer_rx(&cfg, 0.0)] {
            assert!(close(v.entries()[0], Complex64::new(s, 0.0), 1e-15));
            assert!(close(v.entries()[1], Complex64::new(-s, 0.0), 1e-15));
        }
    }

    #[test]
    fn matches_scalar_loop() {
        let cfg = ArrayConfig::new(16, 16).unwrap();
        let tx = steer_tx(&cfg, 1.0);
        let rx = steer_rx(&cfg, 2.0);
        let wt = steer_tx_weighted(&cfg, 1.0);
        let wr = steer_rx_weighted(&cfg, 2.0);
        for k in 0..16 {
            let kf = k as f64;
            let e1 = Complex64::new(0.0, -PI * kf * 1f64.cos()).exp() * 0.25;
            let e2 = Complex64::new(0.0, -PI * kf * 2f64.cos()).exp() * 0.25;
            let w1 = Complex64::new(0.0, PI * kf * 1f64.cos()).exp() * (kf / 4.0);
            let w2 = Complex64::new(0.0, PI * kf * 2f64.cos()).exp() * (kf / 4.0);
            assert!(close(tx.entries()[k], e1, 1e-14));
            assert!(close(rx.entries()[k], e2, 1e-14));
            assert!(close(wt[k], w1, 1e-13));
            assert!(close(wr[k], w2, 1e-13));
        }
        assert_eq!(tx.side(), Side::Transmit);
        assert_eq!(rx.side(), Side::Receive);
    }

    #[test]
    fn weighted_small_cases() {
        let cfg = ArrayConfig::new(2, 3).unwrap();
        let w = steer_tx_weighted(&cfg, PI / 2.0);
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(w[0], Complex64::new(0.0, 0.0));
        assert!(close(w[1], Complex64::new(s, 0.0), 1e-15));
        let w = steer_rx_weighted(&cfg, 0.0);
        let s = 1.0 / 3f64.sqrt();
        assert!(close(w[1], Complex64::new(-s, 0.0), 1e-15));
        assert!(close(w[2], Complex64::new(2.0 * s, 0.0), 1e-15));
    }

    #[test]
    fn zero_sized_array_rejected() {
        assert!(ArrayConfig::new(0, 4).is_err());
    }

    proptest! {
        #[test]
        fn unit_norm_and_exact_first_entry(n in 1usize..64, angle in 0.0f64..PI) {
            let v = steering(n, angle);
            prop_assert!((v.norm_squared() - 1.0).abs() < 1e-14);
            prop_assert_eq!(v[0], Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
            for z in v.iter() {
                prop_assert!((z.norm() - 1.0 / (n as f64).sqrt()).abs() < 1e-15);
            }
        }

        #[test]
        fn weighted_is_index_times_conjugate(n in 1usize..64, angle in 0.0f64..PI) {
            let v = steering(n, angle);
            let w = weighted_steering(n, angle);
            for k in 0..n {
                prop_assert!((w[k] - v[k].conj() * k as f64).norm() < 1e-12);
            }
        }

        #[test]
        fn equal_cosines_equal_vectors(n in 1usize..32, angle in 0.0f64..PI) {
            let a = steering(n, angle);
            let b = steering(n, -angle);
            prop_assert_eq!(a, b);
        }
    }
}
