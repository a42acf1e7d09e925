//! Bessel functions of the first kind (integer and half order), modified
//! Bessel functions of orders 0–2, and a Gauss–Legendre rule on `[0, π]`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest argument accepted by [`bessel_i`] before `e^x` overflows.
pub const BESSEL_I_MAX_ARG: f64 = 700.0;

/// Number of abscissae in the reference quadrature rule.
pub const ORACLE_ABSCISSAE: usize = 201;

const RESCALE_LIMIT: f64 = 1e250;
const RESCALE_FACTOR: f64 = 1e-250;

/// `J_n(z)` for integer order `n` and real `z`.
///
/// Miller's backward recurrence `J_{k-1} = (2k/z) J_k − J_{k+1}`, started
/// well above `max(n, |z|)` and normalised with `J_0 + 2 Σ J_{2k} = 1`.
/// Negative arguments use `J_n(−z) = (−1)ⁿ J_n(z)`.
pub fn bessel_j(n: u32, z: f64) -> f64 {
    let x = z.abs();
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let value = miller_backward(n, x);
    if z < 0.0 && n % 2 == 1 {
        -value
    } else {
        value
    }
}

fn miller_backward(n: u32, x: f64) -> f64 {
    let order = n as f64;
    let reach = order.max(x);
    let mut start = (reach + 30.0 + 4.0 * reach.sqrt()).ceil() as u64;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut above = 0.0_f64;
    let mut current = 1.0_f64;
    let mut even_sum = 0.0_f64;
    let mut wanted = if start == n as u64 { current } else { 0.0 };

    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        let idx = k - 1;
        if idx % 2 == 0 && idx > 0 {
            even_sum += current;
        }
        if idx == n as u64 {
            wanted = current;
        }
        if current.abs() > RESCALE_LIMIT {
            current *= RESCALE_FACTOR;
            above *= RESCALE_FACTOR;
            even_sum *= RESCALE_FACTOR;
            wanted *= RESCALE_FACTOR;
        }
    }
    wanted / (current + 2.0 * even_sum)
}

/// `sin(πx)`, exactly zero at every integer.
pub fn sin_pi(x: f64) -> f64 {
    if x.fract() == 0.0 {
        return 0.0;
    }
    (PI * (x % 2.0)).sin()
}

/// `J_{1/2}(z) = √(2/(π|z|)) sin z`, extended as an odd function to `z < 0`.
pub fn bessel_j_half(z: f64) -> Result<f64> {
    if z == 0.0 || !z.is_finite() {
        return Err(Error::Domain(format!(
            "half-order Bessel function needs a finite nonzero argument, got {z}"
        )));
    }
    Ok((2.0 / (PI * z.abs())).sqrt() * z.sin())
}

/// `J_{1/2}(πx)`, exactly zero at nonzero integers `x`.
pub fn bessel_j_half_pi(x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "half-order Bessel function needs a finite nonzero argument, got {x}·π"
        )));
    }
    Ok((2.0 / (PI * PI * x.abs())).sqrt() * sin_pi(x))
}

fn check_i_args(n: u32, x: f64) -> Result<()> {
    if n > 2 {
        return Err(Error::Domain(format!(
            "modified Bessel order {n} is not supported (0, 1 or 2)"
        )));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!(
            "modified Bessel argument must be non-negative, got {x}"
        )));
    }
    Ok(())
}

/// `I_n(x)` for `n ∈ {0, 1, 2}` and `0 ≤ x ≤ 700`.
pub fn bessel_i(n: u32, x: f64) -> Result<f64> {
    check_i_args(n, x)?;
    if x > BESSEL_I_MAX_ARG {
        return Err(Error::Range(format!(
            "I_{n}({x}) overflows (argument limit {BESSEL_I_MAX_ARG})"
        )));
    }
    if x <= 30.0 {
        return Ok(ascending_series(n, x));
    }
    Ok(scaled_asymptotic(n, x) * x.exp())
}

/// `e^{−x} I_n(x)` for `n ∈ {0, 1, 2}` and any finite `x ≥ 0`.
pub fn bessel_i_scaled(n: u32, x: f64) -> Result<f64> {
    check_i_args(n, x)?;
    if !x.is_finite() {
        return Err(Error::Range("scaled I_n needs a finite argument".into()));
    }
    if x <= 30.0 {
        return Ok(ascending_series(n, x) * (-x).exp());
    }
    Ok(scaled_asymptotic(n, x))
}

fn ascending_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let quarter_sq = half * half;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut m = 0u32;
    loop {
        m += 1;
        term *= quarter_sq / (m as f64 * (m + n) as f64);
        sum += term;
        if term <= f64::EPSILON * 0.25 * sum || m > 500 {
            return sum;
        }
    }
}

/// Hankel expansion `e^{-x} I_ν(x) ≈ (2πx)^{-1/2} Σ (−1)^k a_k(ν) / x^k`.
fn scaled_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=60u32 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// `(1/π) ∫₀^π sin²θ e^{jz cosθ} dθ = ½[J_0(z) + J_2(z)]` as `(re, im)`.
pub fn integral_sin2_exp(z: f64) -> (f64, f64) {
    (0.5 * (bessel_j(0, z) + bessel_j(2, z)), 0.0)
}

fn interval_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(ORACLE_ABSCISSAE).expect("201-point rule is valid"))
}

/// `∫_a^b f` with the 201-point Gauss–Legendre rule.
pub fn integrate_interval<F: FnMut(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    interval_rule().integrate(a, b, f)
}

/// Fixed-order Gauss–Legendre rule on `[0, π]`, optionally split into equal
/// panels for strongly oscillating integrands.
#[derive(Debug, Clone)]
pub struct Quadrature {
    abscissa_count: usize,
    panels: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    /// Single-panel rule with `abscissa_count` points.
    pub fn new(abscissa_count: usize) -> Result<Self> {
        Self::composite(abscissa_count, 1)
    }

    /// `panels` copies of an `abscissa_count`-point rule over equal subintervals.
    pub fn composite(abscissa_count: usize, panels: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::Config("quadrature needs at least one panel".into()));
        }
        let rule = GaussLegendre::new(abscissa_count).map_err(|e| {
            Error::Config(format!(
                "Gauss-Legendre rule of order {abscissa_count}: {e}"
            ))
        })?;
        let width = PI / panels as f64;
        let mut nodes = Vec::with_capacity(abscissa_count * panels);
        let mut weights = Vec::with_capacity(abscissa_count * panels);
        for p in 0..panels {
            let lo = p as f64 * width;
            for &(t, w) in rule.as_node_weight_pairs() {
                nodes.push(lo + 0.5 * width * (t + 1.0));
                weights.push(0.5 * width * w);
            }
        }
        Ok(Self {
            abscissa_count,
            panels,
            nodes,
            weights,
        })
    }

    /// The 201-point reference rule.
    pub fn oracle() -> Self {
        Self::new(ORACLE_ABSCISSAE).expect("201-point rule is valid")
    }

    /// 201-point panels, enough of them to resolve `e^{jz cosθ}`.
    pub fn for_frequency(z: f64) -> Self {
        let panels = (z.abs() / 40.0).ceil().max(1.0) as usize;
        Self::composite(ORACLE_ABSCISSAE, panels).expect("201-point rule is valid")
    }

    pub fn abscissa_count(&self) -> usize {
        self.abscissa_count
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    /// Abscissae and weights on `[0, π]`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.points().map(|(t, w)| w * f(t)).sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.points().map(|(t, w)| f(t) * w).sum()
    }

    /// Mean over `θ ~ Uniform[0, π]`, i.e. `(1/π) ∫₀^π f`.
    pub fn mean_complex<F: FnMut(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.integrate_complex(f) / PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bessel_by_quadrature(n: u32, z: f64) -> f64 {
        let q = Quadrature::for_frequency(z);
        let v = q.mean_complex(|t| Complex64::from_polar(1.0, z * t.cos()) * (n as f64 * t).cos());
        // (1/π)∫ e^{jz cosθ} cos(nθ) dθ = jⁿ J_n(z)
        (v * Complex64::i().powu(4 - n % 4)).re
    }

    #[test]
    fn constant_integrates_to_pi() {
        assert!((Quadrature::oracle().integrate(|_| 1.0) - PI).abs() < 1e-12);
        assert!((Quadrature::composite(20, 7).unwrap().integrate(|_| 1.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_rules() {
        assert!(Quadrature::new(1).is_err());
        assert!(Quadrature::composite(10, 0).is_err());
    }

    #[test]
    fn j_small_values() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert!((bessel_j(0, PI) + 0.304_242_177_644_093_9).abs() < 1e-13);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-14);
        assert!((bessel_j(2, 1.0) - 0.114_903_484_931_900_5).abs() < 1e-14);
        assert!((bessel_j(0, 100.0) - 0.019_985_850_304_223_12).abs() < 1e-13);
        assert_eq!(bessel_j(2, -PI), bessel_j(2, PI));
        assert_eq!(bessel_j(1, -2.5), -bessel_j(1, 2.5));
    }

    #[test]
    fn j_tiny_argument_matches_leading_term() {
        let z = 1e-3;
        assert!((bessel_j(2, z) / (z * z / 8.0 - z.powi(4) / 96.0) - 1.0).abs() < 1e-13);
        assert!((bessel_j(1, z) / (z / 2.0 - z.powi(3) / 16.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn j_matches_quadrature_over_log_grid() {
        for i in 0..=60 {
            let z = 10f64.powf(-3.0 + 6.0 * i as f64 / 60.0);
            for n in 0..=2 {
                let diff = (bessel_j(n, z) - bessel_by_quadrature(n, z)).abs();
                assert!(diff < 1e-9, "n={n} z={z} diff={diff}");
            }
        }
    }

    #[test]
    fn j_large_argument_finite() {
        let v = bessel_j(0, 1e4);
        assert!(v.abs() < 0.01 && v.is_finite());
    }

    #[test]
    fn j_half_closed_form() {
        assert!((bessel_j_half(PI / 2.0).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!(bessel_j_half(0.0).is_err());
        assert!(bessel_j_half(PI).unwrap().abs() < 1e-15);
        assert!(bessel_j_half(-PI).unwrap().abs() < 1e-15);
        for k in 1..20 {
            assert_eq!(bessel_j_half_pi(k as f64).unwrap(), 0.0);
            assert_eq!(bessel_j_half_pi(-(k as f64)).unwrap(), 0.0);
        }
        let x = 0.37;
        assert!((bessel_j_half_pi(x).unwrap() - bessel_j_half(PI * x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn j_half_identity_on_grid() {
        for i in 0..=60 {
            let z = 10f64.powf(-3.0 + 6.0 * i as f64 / 60.0);
            let j = bessel_j_half(z).unwrap();
            assert!((j * j * PI * z / 2.0 - z.sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn j_half_from_sine_weighted_integral() {
        // (1/π)∫₀^π e^{jz cosθ} sinθ dθ = (1/π)√(2π/z) J_{1/2}(z)
        let z = PI / 2.0;
        let v = Quadrature::oracle().mean_complex(|t| Complex64::from_polar(t.sin(), z * t.cos()));
        let solved = v.re * PI / (2.0 * PI / z).sqrt();
        assert!((solved - 2.0 / PI).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14);
    }

    fn series30(n: u32, x: f64) -> f64 {
        let mut fact = [1.0f64; 40];
        for k in 1..40 {
            fact[k] = fact[k - 1] * k as f64;
        }
        (0..30)
            .map(|m| (x / 2.0).powi(2 * m as i32 + n as i32) / (fact[m] * fact[m + n as usize]))
            .sum()
    }

    #[test]
    fn i_matches_thirty_term_series() {
        for i in 0..=80 {
            let x = 20.0 * i as f64 / 80.0;
            for n in 0..=2 {
                let want = series30(n, x);
                let got = bessel_i(n, x).unwrap();
                if want == 0.0 {
                    assert_eq!(got, 0.0);
                } else {
                    assert!(((got - want) / want).abs() < 1e-10, "n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn i_boundaries() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(2, 0.0).unwrap(), 0.0);
        assert!(matches!(bessel_i(0, 701.0), Err(Error::Range(_))));
        assert!(matches!(bessel_i(0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_i(3, 1.0), Err(Error::Domain(_))));
        assert!(bessel_i(2, 700.0).unwrap().is_finite());
    }

    #[test]
    fn i_series_and_asymptotic_agree_at_switch() {
        for n in 0..=2 {
            let a = ascending_series(n, 30.0) * (-30.0f64).exp();
            let b = scaled_asymptotic(n, 30.0);
            assert!(((a - b) / a).abs() < 1e-13, "n={n}");
        }
        // I_0(50) = 2.93255378384933e20
        assert!((bessel_i(0, 50.0).unwrap() / 2.932_553_783_849_336e20 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn i_imaginary_argument_identities() {
        // J_n(jx) = jⁿ I_n(x), checked through the integral form at z = jx:
        // (1/π)∫ e^{-x cosθ} cos(nθ) dθ = (−1)ⁿ I_n(x)
        let q = Quadrature::oracle();
        for &x in &[0.3, 2.0, 7.5] {
            for n in 0..=2u32 {
                let v = q.integrate(|t| (-x * t.cos()).exp() * (n as f64 * t).cos()) / PI;
                let want = if n % 2 == 0 { 1.0 } else { -1.0 } * bessel_i(n, x).unwrap();
                assert!((v - want).abs() < 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sin2_integral() {
        assert_eq!(integral_sin2_exp(0.0), (0.5, 0.0));
        let q = Quadrature::oracle();
        for &z in &[PI, -PI, 2.5, 17.0] {
            let v = q.mean_complex(|t| Complex64::from_polar(t.sin().powi(2), z * t.cos()));
            let (re, im) = integral_sin2_exp(z);
            assert!((v.re - re).abs() < 1e-12 && im == 0.0 && v.im.abs() < 1e-12);
        }
        assert_eq!(integral_sin2_exp(3.3), integral_sin2_exp(-3.3));
    }

    #[test]
    fn sin_pi_exact_at_integers() {
        assert_eq!(sin_pi(0.0), 0.0);
        assert_eq!(sin_pi(7.0), 0.0);
        assert_eq!(sin_pi(-3.0), 0.0);
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(-1.5) - 1.0).abs() < 1e-15);
    }
}
