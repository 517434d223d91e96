use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::enumerate::ColoringIndex;
use crate::error::OracleError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofReport {
    pub samples: usize,
    pub cells: usize,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Total variation distance between the empirical and uniform laws.
    pub tv: f64,
}

/// Pearson test of `counts` against the uniform law on its cells.
pub fn chi_square_uniform(counts: &[u64]) -> GofReport {
    let cells = counts.len();
    let n: u64 = counts.iter().sum();
    let expected = n as f64 / cells as f64;
    let chi_square = if n == 0 {
        0.0
    } else {
        counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    };
    let tv = if n == 0 {
        0.0
    } else {
        0.5 * counts
            .iter()
            .map(|&c| (c as f64 / n as f64 - 1.0 / cells as f64).abs())
            .sum::<f64>()
    };
    let dof = cells.saturating_sub(1);
    GofReport {
        samples: n as usize,
        cells,
        chi_square,
        dof,
        p_value: chi_square_sf(chi_square, dof),
        tv,
    }
}

/// Upper tail of the chi-square law; 1 for zero degrees of freedom.
pub fn chi_square_sf(x: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sf(x)
}

/// Goodness of fit of sampled colorings against the uniform law on `universe`.
/// A sample outside the universe is an improper coloring and fails hard.
pub fn goodness_of_fit(
    samples: &[Vec<usize>],
    universe: &[Vec<usize>],
) -> Result<GofReport, OracleError> {
    if universe.is_empty() {
        return Err(OracleError::EmptySample);
    }
    let index = ColoringIndex::new(universe);
    let mut counts = vec![0u64; universe.len()];
    for (i, s) in samples.iter().enumerate() {
        let cell = index
            .get(s)
            .ok_or(OracleError::SampleOutsideUniverse { index: i })?;
        counts[cell] += 1;
    }
    Ok(chi_square_uniform(&counts))
}

/// Kolmogorov-Smirnov distance between `draws` and Uniform[0, 1).
pub fn ks_uniform(draws: &mut [f64]) -> f64 {
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    draws
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

/// Standard deviation of a Binomial(n, p) frequency.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
