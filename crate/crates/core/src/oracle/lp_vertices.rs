//! Exact rational view of the relaxed size-law program, solved by listing the
//! vertices of its feasible polytope.
//!
//! The feasible set is the probability simplex over sizes `1..=Δ` cut by one
//! half-space `sum r_k z(k) <= w`. Its vertices are the simplex corners that
//! satisfy the cut and the points where the cut crosses a simplex edge.

use num_rational::Ratio;

use crate::coupling::lp::binomial;

pub type Q = Ratio<i128>;

fn exact_binomial(n: usize, k: usize) -> i128 {
    binomial(n, k).expect("binomial fits in u128") as i128
}

/// `z_j(k)` as an exact fraction.
pub fn z_exact(j: usize, s: usize, k: usize) -> Q {
    Q::new(exact_binomial(j, k - 1), exact_binomial(s, k - 1))
}

/// A size law as exact fractions; entry `i` is the probability of size `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactLaw(pub Vec<Q>);

impl ExactLaw {
    pub fn expected_size(&self) -> Q {
        self.0
            .iter()
            .enumerate()
            .map(|(i, r)| *r * Q::from_integer(i as i128 + 1))
            .sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect()
    }
}

/// Vertices of `{r >= 0, sum r = 1, sum r_k z_Δ(k) <= w}` over sizes `1..=Δ`.
pub fn relaxed_vertices(s: usize, delta: usize, q: usize) -> Vec<ExactLaw> {
    let w = Q::new(q as i128 - s as i128, q as i128 - delta as i128);
    let sizes = delta.min(s + 1);
    let z: Vec<Q> = (1..=sizes).map(|k| z_exact(delta, s, k)).collect();
    let mut out = Vec::new();
    for a in 0..sizes {
        if z[a] <= w {
            let mut r = vec![Q::from_integer(0); delta];
            r[a] = Q::from_integer(1);
            out.push(ExactLaw(r));
        }
        for b in a + 1..sizes {
            let (hi, lo) = if z[a] > z[b] { (a, b) } else { (b, a) };
            if z[hi] > w && z[lo] < w {
                let mut r = vec![Q::from_integer(0); delta];
                r[hi] = (w - z[lo]) / (z[hi] - z[lo]);
                r[lo] = Q::from_integer(1) - r[hi];
                out.push(ExactLaw(r));
            }
        }
    }
    out
}

/// The vertex with the smallest expected size; `None` if the polytope is empty.
pub fn relaxed_optimum(s: usize, delta: usize, q: usize) -> Option<ExactLaw> {
    relaxed_vertices(s, delta, q)
        .into_iter()
        .min_by(|x, y| x.expected_size().cmp(&y.expected_size()))
}

/// Every row `j = 1..=min(Δ, |S|)` of the full program, in exact arithmetic.
pub fn full_lp_feasible_exact(s: usize, delta: usize, q: usize, law: &ExactLaw) -> bool {
    (1..=delta.min(s)).all(|j| {
        let lhs: Q = law
            .0
            .iter()
            .enumerate()
            .filter(|(k, _)| *k <= s)
            .map(|(k, r)| *r * z_exact(j, s, k + 1))
            .sum();
        lhs <= Q::new(q as i128 - s as i128, q as i128 - j as i128)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_at_reference_point() {
        let best = relaxed_optimum(24, 12, 30).unwrap();
        // r3 = 6 * 23 / 216 = 23/36.
        assert_eq!(best.0[2], Q::new(23, 36));
        assert_eq!(best.0[1], Q::new(13, 36));
        assert!(full_lp_feasible_exact(24, 12, 30, &best));
    }

    #[test]
    fn every_vertex_is_a_distribution() {
        for v in relaxed_vertices(7, 4, 10) {
            assert_eq!(v.0.iter().copied().sum::<Q>(), Q::from_integer(1));
            assert!(v.0.iter().all(|r| *r >= Q::from_integer(0)));
        }
    }

    #[test]
    fn empty_when_no_room() {
        assert!(relaxed_optimum(8, 3, 8).is_none());
    }
}
