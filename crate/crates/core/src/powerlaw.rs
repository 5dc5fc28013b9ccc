//! Power-law tail fitting for degree distributions.
//!
//! The tail model is the continuous Pareto law with scale `xmin - 0.5`,
//! rounded to the nearest integer:
//!
//! ```text
//! P(X >= x) = ((x - 0.5) / (xmin - 0.5))^(1 - alpha),   x >= xmin
//! ```
//!
//! `alpha` is its exact maximum-likelihood estimate. The log-likelihood is
//! concave in `alpha`, so the score equation has a single root which is found
//! by bisection. The classic closed form
//! `1 + n / sum(ln(x / (xmin - 0.5)))` is reported alongside; it is biased
//! for small `xmin`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PowerLawError {
    #[error("xmin must be at least 1")]
    BadXmin,
    #[error("need at least 2 samples >= xmin, found {0}")]
    TooFewTailSamples(usize),
    #[error("every tail sample equals xmin; the exponent diverges")]
    Divergent,
    #[error("alpha must be a finite value > 1, got {0}")]
    BadAlpha(f64),
    #[error("sample count must be at least 1")]
    EmptySample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub alpha_continuous_approx: f64,
    pub xmin: u64,
    pub n_tail: usize,
    pub ks_distance: f64,
}

/// Distinct tail values with multiplicities, ascending.
fn tail_counts(samples: &[u64], xmin: u64) -> Vec<(u64, usize)> {
    let mut tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= xmin).collect();
    tail.sort_unstable();
    let mut out: Vec<(u64, usize)> = Vec::new();
    for x in tail {
        match out.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// `1 + n / sum(ln(x_i / (xmin - 0.5)))` over samples `>= xmin`.
pub fn continuous_alpha(samples: &[u64], xmin: u64) -> Result<f64, PowerLawError> {
    if xmin < 1 {
        return Err(PowerLawError::BadXmin);
    }
    let scale = xmin as f64 - 0.5;
    let (n, sum) = samples
        .iter()
        .filter(|&&x| x >= xmin)
        .fold((0usize, 0.0f64), |(n, s), &x| (n + 1, s + (x as f64 / scale).ln()));
    if n < 2 {
        return Err(PowerLawError::TooFewTailSamples(n));
    }
    Ok(1.0 + n as f64 / sum)
}

/// P(X <= x) under the fitted rounded-Pareto tail.
fn model_cdf(x: u64, xmin: u64, alpha: f64) -> f64 {
    if x < xmin {
        return 0.0;
    }
    let scale = xmin as f64 - 0.5;
    1.0 - ((x as f64 + 0.5) / scale).powf(1.0 - alpha)
}

pub fn fit_power_law(samples: &[u64], xmin: u64) -> Result<PowerLawFit, PowerLawError> {
    if xmin < 1 {
        return Err(PowerLawError::BadXmin);
    }
    let counts = tail_counts(samples, xmin);
    let n_tail: usize = counts.iter().map(|&(_, c)| c).sum();
    if n_tail < 2 {
        return Err(PowerLawError::TooFewTailSamples(n_tail));
    }
    if counts.len() == 1 {
        return Err(PowerLawError::Divergent);
    }

    // With beta = alpha - 1, each sample contributes
    //   ln(exp(-beta*a) - exp(-beta*b)) = -beta*a + ln(1 - exp(-beta*(b - a)))
    // where a = ln((x - 0.5)/s), b = ln((x + 0.5)/s), s = xmin - 0.5.
    let scale = xmin as f64 - 0.5;
    let terms: Vec<(f64, f64, f64)> = counts
        .iter()
        .map(|&(x, c)| {
            let a = ((x as f64 - 0.5) / scale).ln();
            let b = ((x as f64 + 0.5) / scale).ln();
            (c as f64, a, b - a)
        })
        .collect();
    let score = |beta: f64| -> f64 { terms.iter().map(|&(c, a, gap)| c * (gap / (beta * gap).exp_m1() - a)).sum() };

    let mut lo = 1e-9f64;
    let mut hi = 1.0f64;
    while score(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(PowerLawError::Divergent);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    let alpha = 1.0 + 0.5 * (lo + hi);

    let mut ks = 0.0f64;
    let mut below = 0usize;
    for &(x, c) in &counts {
        // just before the jump at x, then just after it
        let before = below as f64 / n_tail as f64;
        ks = ks.max((before - model_cdf(x - 1, xmin, alpha)).abs());
        below += c;
        let after = below as f64 / n_tail as f64;
        ks = ks.max((after - model_cdf(x, xmin, alpha)).abs());
    }

    Ok(PowerLawFit {
        alpha,
        alpha_continuous_approx: continuous_alpha(samples, xmin)?,
        xmin,
        n_tail,
        ks_distance: ks.clamp(0.0, 1.0),
    })
}

/// Seeded inverse-transform sample from the rounded-Pareto tail model:
/// `floor((xmin - 0.5) * (1 - u)^(-1 / (alpha - 1)) + 0.5)`.
pub fn synth_power_law_sample(alpha: f64, xmin: u64, n: usize, seed: u64) -> Result<Vec<u64>, PowerLawError> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(PowerLawError::BadAlpha(alpha));
    }
    if xmin < 1 {
        return Err(PowerLawError::BadXmin);
    }
    if n == 0 {
        return Err(PowerLawError::EmptySample);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = xmin as f64 - 0.5;
    let exponent = -1.0 / (alpha - 1.0);
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.random();
            // saturating cast for the far tail
            ((scale * (1.0 - u).powf(exponent) + 0.5).floor() as u64).max(xmin)
        })
        .collect())
}
