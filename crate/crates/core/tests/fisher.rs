use std::f64::consts::PI;

use mmwave_crlb::bayes::{
    assemble_fim_bayesian, assemble_fim_data, combine, expected_builder, prior_term, PriorTerm,
};
use mmwave_crlb::channel::{noise_variance, normalize_profile, sample_paths, ParamKind, PathSet};
use mmwave_crlb::codebook::{make_codebook, make_sensing_operator, CodebookMethod};
use mmwave_crlb::fim::{assemble_fim_nonrandom, fim_entry, BuilderKind};
use mmwave_crlb::geometry::ArrayConfig;
use mmwave_crlb::oracle::{expected_builder_by_quadrature, mc_average_fim};
use mmwave_crlb::specfun::Quadrature;
use proptest::prelude::*;

#[test]
fn expected_builders_small_arrays() {
    let quad = Quadrature::oracle();
    for n in [1, 2, 3, 5] {
        let cfg = ArrayConfig::new(n, n).unwrap();
        for kind in BuilderKind::ALL {
            let d = expected_builder(kind, &cfg).entries
                - expected_builder_by_quadrature(kind, n, &quad);
            assert!(d.iter().all(|z| z.norm() < 1e-9), "{kind} n={n}");
        }
    }
}

#[test]
fn data_term_matches_monte_carlo_on_other_shapes() {
    for (i, (n_t, n_r, p_t, p_r, l, method)) in [
        (2, 2, 2, 2, 1, CodebookMethod::Nonuniform),
        (6, 4, 3, 5, 2, CodebookMethod::Uniform),
        (4, 4, 4, 4, 3, CodebookMethod::Orthogonal),
    ]
    .into_iter()
    .enumerate()
    {
        let cfg = ArrayConfig::new(n_t, n_r).unwrap();
        let op = make_sensing_operator(&make_codebook(&cfg, method, p_t, p_r).unwrap());
        let profile = normalize_profile(l, 0.5, &[5.0]).unwrap();
        let s2 = noise_variance(&cfg, 5.0);
        let jd = assemble_fim_data(&profile, &op, s2).unwrap().entries;
        let (mean, err) = mc_average_fim(&profile, &op, s2, 20_000, 900 + i as u64).unwrap();
        let tol = 1e-12 * jd.amax();
        for ((d, m), e) in jd.iter().zip(mean.iter()).zip(err.iter()) {
            assert!(
                (d - m).abs() <= 3.0 * e + tol,
                "shape {i}: {d} vs {m} ± {e}"
            );
        }
    }
}

#[test]
fn trace_is_sum_of_diagonal_entries() {
    let cfg = ArrayConfig::new(5, 3).unwrap();
    let op = make_sensing_operator(&make_codebook(&cfg, CodebookMethod::Nonuniform, 4, 6).unwrap());
    let paths = PathSet::new(vec![0.4, 2.2], vec![1.1, 2.9], vec![0.8, 0.3]).unwrap();
    let j = assemble_fim_nonrandom(&paths, &op, 0.7).unwrap();
    let direct: f64 = j
        .index
        .params()
        .map(|p| fim_entry(p, p, &paths, &op, 0.7).unwrap())
        .sum();
    assert!((j.trace() - direct).abs() <= 1e-12 * direct);
}

#[test]
fn zeroed_prior_leaves_data_term() {
    let cfg = ArrayConfig::new(4, 4).unwrap();
    let op = make_sensing_operator(&make_codebook(&cfg, CodebookMethod::Uniform, 3, 3).unwrap());
    let profile = normalize_profile(2, 0.5, &[10.0]).unwrap();
    let data = assemble_fim_data(&profile, &op, 1.0).unwrap();
    let zero = PriorTerm {
        values: vec![0.0; 2],
        std_err: vec![0.0; 2],
        mc_draws: 0,
    };
    assert_eq!(combine(&data, &zero).unwrap().entries, data.entries);

    let prior = prior_term(&profile, 5000, 8).unwrap();
    let jb = assemble_fim_bayesian(&profile, &op, 1.0, 5000, 8).unwrap();
    let diff = &jb.entries - &data.entries;
    for p in jb.index.params() {
        for q in jb.index.params() {
            let (i, k) = (jb.index.index(p), jb.index.index(q));
            let want = if p == q && p.kind == ParamKind::Alpha {
                prior.values[p.path]
            } else {
                0.0
            };
            assert_eq!(diff[(i, k)], want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn nonrandom_fim_is_psd(
        n_t in 2usize..7, n_r in 2usize..7, p_t in 1usize..7, p_r in 1usize..7,
        l in 1usize..4, seed in any::<u64>(), snr in -10.0f64..30.0,
    ) {
        let cfg = ArrayConfig::new(n_t, n_r).unwrap();
        let op = make_sensing_operator(&make_codebook(&cfg, CodebookMethod::Nonuniform, p_t, p_r).unwrap());
        let profile = normalize_profile(l, 0.5, &[3.0]).unwrap();
        let paths = sample_paths(&profile, seed);
        let j = assemble_fim_nonrandom(&paths, &op, noise_variance(&cfg, snr)).unwrap();
        prop_assert!(j.max_asymmetry() == 0.0);
        prop_assert!(j.min_eigenvalue() >= -1e-8);
        prop_assert!(paths.phi.iter().all(|a| (0.0..PI).contains(a)));
    }
}
