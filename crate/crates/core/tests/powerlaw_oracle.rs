use linkscope::powerlaw::{continuous_alpha, fit_power_law, synth_power_law_sample, PowerLawError};

/// Log-likelihood of the rounded continuous Pareto that the sampler draws from.
fn log_likelihood(samples: &[u64], xmin: u64, alpha: f64) -> f64 {
    let base = xmin as f64 - 0.5;
    let tail = |x: f64| (x / base).powf(1.0 - alpha);
    samples.iter().filter(|&&x| x >= xmin).map(|&x| (tail(x as f64 - 0.5) - tail(x as f64 + 0.5)).ln()).sum()
}

/// Brute-force maximiser: coarse grid then repeated refinement.
fn grid_mle(samples: &[u64], xmin: u64) -> f64 {
    let (mut lo, mut hi) = (1.0001, 8.0);
    for _ in 0..8 {
        let step = (hi - lo) / 200.0;
        let best = (0..=200)
            .map(|i| lo + step * i as f64)
            .max_by(|a, b| log_likelihood(samples, xmin, *a).total_cmp(&log_likelihood(samples, xmin, *b)))
            .unwrap();
        lo = (best - step).max(1.0001);
        hi = best + step;
    }
    (lo + hi) / 2.0
}

#[test]
fn fit_agrees_with_brute_force_likelihood_maximum() {
    for (alpha, xmin, n, seed) in [(1.8, 1, 2000, 1), (2.5, 1, 2000, 2), (3.2, 2, 2000, 3), (2.2, 5, 1500, 4)] {
        let s = synth_power_law_sample(alpha, xmin, n, seed).unwrap();
        let fit = fit_power_law(&s, xmin).unwrap();
        let oracle = grid_mle(&s, xmin);
        assert!((fit.alpha - oracle).abs() < 1e-4, "alpha={alpha}: fit {} vs oracle {oracle}", fit.alpha);
    }
    let hand = grid_mle(&[1, 1, 1, 1, 10], 1);
    assert!((fit_power_law(&[1, 1, 1, 1, 10], 1).unwrap().alpha - hand).abs() < 1e-4);
}

#[test]
fn closed_form_matches_its_definition() {
    let s = [1u64, 1, 1, 1, 10];
    let by_hand = 1.0 + 5.0 / (4.0 * 2f64.ln() + 20f64.ln());
    assert!((continuous_alpha(&s, 1).unwrap() - by_hand).abs() < 1e-12);
    assert!((fit_power_law(&s, 1).unwrap().alpha_continuous_approx - by_hand).abs() < 1e-12);
}

#[test]
fn recovery_within_tolerance() {
    for (alpha, seed) in [(1.8, 100), (2.5, 200), (3.2, 300)] {
        let s = synth_power_law_sample(alpha, 1, 10_000, seed).unwrap();
        let fit = fit_power_law(&s, 1).unwrap();
        assert!((fit.alpha - alpha).abs() <= 0.1, "alpha={alpha}: {}", fit.alpha);
        assert_eq!(fit.n_tail, 10_000);
        assert!(fit.ks_distance <= 0.05, "alpha={alpha}: ks {}", fit.ks_distance);
    }
}

#[test]
fn subsample_stays_close_to_full_fit() {
    for (alpha, seed) in [(1.8, 7), (2.5, 8), (3.2, 9)] {
        let s = synth_power_law_sample(alpha, 1, 10_000, seed).unwrap();
        let full = fit_power_law(&s, 1).unwrap().alpha;
        let sub = fit_power_law(&s[..1_000], 1).unwrap().alpha;
        assert!((full - sub).abs() <= 0.3, "alpha={alpha}: {full} vs {sub}");
    }
}

#[test]
fn log_mean_approaches_inverse_exponent_when_rounding_is_negligible() {
    // At large xmin the floor in the sampler barely moves samples, so the
    // continuous-Pareto identity E[ln(x/(xmin-0.5))] = 1/(alpha-1) applies.
    let (alpha, xmin) = (2.5, 1_000u64);
    let s = synth_power_law_sample(alpha, xmin, 10_000, 11).unwrap();
    let mean = s.iter().map(|&x| (x as f64 / (xmin as f64 - 0.5)).ln()).sum::<f64>() / s.len() as f64;
    assert!((mean - 1.0 / (alpha - 1.0)).abs() <= 0.05, "mean {mean}");
}

#[test]
fn errors_for_degenerate_samples() {
    assert!(matches!(fit_power_law(&[3, 3, 3], 3), Err(PowerLawError::Divergent)));
    assert!(fit_power_law(&[5], 1).is_err());
    assert!(fit_power_law(&[1, 2, 3], 0).is_err());
    assert!(synth_power_law_sample(1.0, 1, 10, 0).is_err());
    assert_eq!(synth_power_law_sample(2.0, 4, 1, 99).unwrap().len(), 1);
    assert!(synth_power_law_sample(2.0, 4, 1, 99).unwrap()[0] >= 4);
}
