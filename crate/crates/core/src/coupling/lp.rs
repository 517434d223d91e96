//! Size laws of slack-set couplings and the linear program that constrains them.
//!
//! A coupling that sees slack set `S` and emits a bounding set of size `k`
//! with probability `r_k` can only be valid if, for every `j` blocked colors
//! inside `S`,
//!
//! ```text
//! sum_k r_k * C(j, k-1) / C(|S|, k-1)  <=  (q - |S|) / (q - j)
//! ```
//!
//! The relaxed program keeps only the row `j = Δ`.

use serde::{Deserialize, Serialize};

use crate::error::CouplingError;

/// Slack on every feasibility comparison.
pub const LP_TOLERANCE: f64 = 1e-9;

/// Probability law of the bounding-set size; `r(k)` for `k >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeLaw {
    probs: Vec<f64>,
}

impl SizeLaw {
    /// `probs[i]` is the probability of size `i + 1`.
    pub fn new(probs: Vec<f64>) -> Result<Self, CouplingError> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(CouplingError::SeedingRegime(format!(
                "size law {probs:?} has a negative entry"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > LP_TOLERANCE {
            return Err(CouplingError::SeedingRegime(format!(
                "size law sums to {total}, not 1"
            )));
        }
        let mut probs = probs;
        while probs.len() > 1 && probs.last() == Some(&0.0) {
            probs.pop();
        }
        Ok(Self { probs })
    }

    pub fn point(k: usize) -> Self {
        assert!(k >= 1, "sizes start at 1");
        let mut probs = vec![0.0; k];
        probs[k - 1] = 1.0;
        Self { probs }
    }

    /// Law supported on `{k, k+1}` with `Pr[k+1] = upper`.
    pub fn two_point(k: usize, upper: f64) -> Result<Self, CouplingError> {
        assert!(k >= 1, "sizes start at 1");
        let mut probs = vec![0.0; k + 1];
        probs[k - 1] = 1.0 - upper;
        probs[k] = upper;
        Self::new(probs)
    }

    pub fn r(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.probs.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Largest size with positive mass.
    pub fn max_size(&self) -> usize {
        self.probs.iter().rposition(|&p| p > 0.0).map_or(1, |i| i + 1)
    }

    pub fn expected_size(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    /// Weights for sampling the size; index `i` is size `i + 1`.
    pub fn weights(&self) -> &[f64] {
        &self.probs
    }
}

/// Checked `C(n, k)`; `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is integral; cancel the common factor first
        // so the product only overflows when the result does.
        let den = i as u128 + 1;
        let g = gcd(acc, den);
        acc = (acc / g).checked_mul((n - i) as u128 / (den / g))?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `C(j, m) / C(s, m)` for `j <= s`.
pub fn binomial_ratio(j: usize, s: usize, m: usize) -> f64 {
    if m > j {
        return 0.0;
    }
    match (binomial(j, m), binomial(s, m)) {
        (Some(a), Some(b)) if b > 0 => a as f64 / b as f64,
        _ => (0..m).map(|i| (j - i) as f64 / (s - i) as f64).product(),
    }
}

/// One slack-set coupling program: `|S| = s`, max degree `delta`, `q` colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpInstance {
    pub s: usize,
    pub delta: usize,
    pub q: usize,
}

impl LpInstance {
    pub fn new(s: usize, delta: usize, q: usize) -> Self {
        Self { s, delta, q }
    }

    /// `z_j(k) = C(j, k-1) / C(|S|, k-1)`.
    pub fn z(&self, j: usize, k: usize) -> f64 {
        assert!(k >= 1, "sizes start at 1");
        binomial_ratio(j, self.s.max(j), k - 1)
    }

    /// Right-hand side of row `j`.
    pub fn row_bound(&self, j: usize) -> f64 {
        (self.q as f64 - self.s as f64) / (self.q as f64 - j as f64)
    }

    /// Budget of the relaxed program, `(q - |S|) / (q - Δ)`.
    pub fn w(&self) -> f64 {
        self.row_bound(self.delta)
    }

    /// Highest row that can be realized: at most Δ blocked colors, all in `S`.
    pub fn max_row(&self) -> usize {
        self.delta.min(self.s)
    }

    pub fn lp_constraint_lhs(&self, law: &SizeLaw, j: usize) -> f64 {
        (1..=law.max_size()).map(|k| law.r(k) * self.z(j, k)).sum()
    }

    /// Rows `1..=min(Δ, |S|)` violated by `law`; empty means feasible.
    pub fn verify_full_lp(&self, law: &SizeLaw) -> Vec<usize> {
        (1..=self.max_row())
            .filter(|&j| self.lp_constraint_lhs(law, j) > self.row_bound(j) + LP_TOLERANCE)
            .collect()
    }

    /// Optimum of the relaxed program: the two-point law on `{i-1, i}` for the
    /// smallest `i` in `2..=Δ` with `z(i) <= w`, which meets the budget with
    /// equality.
    pub fn solve_relaxed_lp(&self) -> Result<SizeLaw, CouplingError> {
        let w = self.w();
        let z = |k| self.z(self.delta, k);
        let i = (2..=self.delta)
            .find(|&i| z(i) <= w + LP_TOLERANCE)
            .ok_or(CouplingError::RelaxedInfeasible { delta: self.delta })?;
        let (hi, lo) = (z(i - 1), z(i));
        if hi - lo <= 0.0 {
            return Ok(SizeLaw::point(i));
        }
        let upper = ((hi - w) / (hi - lo)).clamp(0.0, 1.0);
        SizeLaw::two_point(i - 1, upper)
    }
}

/// Closed-form `{2, 3}` law used by the seeding coupling:
/// `r3 = max(0, (|S| + Δ - q)(|S| - 1) / ((q - Δ) Δ))`.
///
/// Requires `3q >= 7Δ` and `Δ < |S| <= 2Δ`, and the result must pass every
/// row of the full program.
pub fn seeding_size_law(s: usize, delta: usize, q: usize) -> Result<SizeLaw, CouplingError> {
    if 3 * q < 7 * delta {
        return Err(CouplingError::SeedingRegime(format!(
            "q = {q} is below 7Δ/3 = {:.3}",
            7.0 * delta as f64 / 3.0
        )));
    }
    if s <= delta || s > 2 * delta {
        return Err(CouplingError::SeedingRegime(format!(
            "slack size {s} outside ({delta}, {}]",
            2 * delta
        )));
    }
    if s >= q {
        return Err(CouplingError::NoFreeColor { slack: s, q });
    }
    let numerator = (s as f64 + delta as f64 - q as f64) * (s as f64 - 1.0);
    let r3 = (numerator / ((q - delta) as f64 * delta as f64)).max(0.0);
    if r3 > 1.0 {
        return Err(CouplingError::SeedingRegime(format!("r3 = {r3} exceeds 1")));
    }
    let law = SizeLaw::two_point(2, r3)?;
    let rows = LpInstance::new(s, delta, q).verify_full_lp(&law);
    if rows.is_empty() {
        Ok(law)
    } else {
        Err(CouplingError::LpInfeasible { rows })
    }
}
