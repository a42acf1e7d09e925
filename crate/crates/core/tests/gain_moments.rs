use mmwave_crlb::bayes::{inverse_second_moment, prior_fisher};
use mmwave_crlb::harness::run::{run_fig1, run_fig2};
use mmwave_crlb::harness::spec::{Experiment, SweepSpec};

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::MIN, f64::max);
    let min = v.iter().copied().fold(f64::MAX, f64::min);
    (max - min) / (v.iter().sum::<f64>() / v.len() as f64)
}

#[test]
fn inverse_moment_converges_to_one() {
    let e = inverse_second_moment(1e4, 1.0, 100_000, 11).unwrap();
    assert!((e.mean - 1.0).abs() < 0.02, "{}", e.mean);
}

#[test]
fn inverse_moment_scales_with_power() {
    let one = inverse_second_moment(100.0, 1.0, 100_000, 3).unwrap();
    let four = inverse_second_moment(100.0, 4.0, 100_000, 3).unwrap();
    // same seed: identical normalised draws, so the ratio is exact up to rounding
    assert!((four.mean * 4.0 / one.mean - 1.0).abs() < 1e-12);
    let other = inverse_second_moment(100.0, 4.0, 100_000, 4).unwrap();
    let se = (other.std_err.powi(2) + (one.std_err / 4.0).powi(2)).sqrt();
    assert!((other.mean - one.mean / 4.0).abs() < 3.0 * se);
}

#[test]
fn low_rice_runs_scatter_more() {
    let runs = |k: f64| -> Vec<f64> {
        (0..3)
            .map(|s| {
                inverse_second_moment(k, 1.0, 100_000, 100 + s)
                    .unwrap()
                    .mean
            })
            .collect()
    };
    assert!(spread(&runs(1.0)) > spread(&runs(100.0)));
}

#[test]
fn prior_seeds_agree_within_pooled_error() {
    let est: Vec<_> = (0..3)
        .map(|s| prior_fisher(100.0, 1.0, 100_000, 40 + s).unwrap())
        .collect();
    let pooled = (est.iter().map(|e| e.std_err.powi(2)).sum::<f64>() / 3.0).sqrt();
    for a in &est {
        for b in &est {
            assert!(
                (a.mean - b.mean).abs() <= 3.0 * pooled,
                "{} {} {pooled}",
                a.mean,
                b.mean
            );
        }
    }
}

#[test]
fn fig2_rows() {
    let spec = SweepSpec {
        mc_draws: 20_000,
        ..SweepSpec::defaults(Experiment::Fig2)
    };
    let rows = run_fig2(&spec).unwrap();
    assert_eq!(rows.len(), 16 * 3);
    assert!(rows.iter().all(|r| r.value > 0.0));
    for r in rows.iter().filter(|r| r.rice_db == 30.0) {
        let limit = 2.0 * (r.rice_linear + 1.0);
        assert!((r.value / limit - 1.0).abs() < 0.1);
    }
    assert_eq!(rows, run_fig2(&spec).unwrap());
}

#[test]
fn fig1_single_seed_repeats() {
    let spec = SweepSpec {
        rice_db: vec![30.0],
        runs: 1,
        ..SweepSpec::defaults(Experiment::Fig1)
    };
    let a = run_fig1(&spec).unwrap();
    assert_eq!(a, run_fig1(&spec).unwrap());
    assert!((a[0].value - 1.0).abs() < 0.02);
}
