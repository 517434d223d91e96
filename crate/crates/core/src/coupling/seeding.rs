use serde::{Deserialize, Serialize};

use super::lp::{binomial_ratio, seeding_size_law, LpInstance, SizeLaw, LP_TOLERANCE};
use super::LocalCoupling;
use crate::colorset::ColorSet;
use crate::error::CouplingError;
use crate::seed::SubStream;

/// Coupling driven by the slack set `S` (union of the neighbor lists).
///
/// A size `K` is drawn from the law, the bounding set is the first `K - 1`
/// colors of a random ordering of `S` plus one free color `c0` outside `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeding {
    s: ColorSet,
    law: SizeLaw,
    q: usize,
    delta: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedingDraw {
    pub k: usize,
    pub pi: Vec<usize>,
    pub c0: usize,
    pub u_prime: f64,
}

impl SeedingDraw {
    /// The ordered prefix `A = (π_1, .., π_{K-1})`.
    pub fn prefix(&self) -> &[usize] {
        &self.pi[..self.k - 1]
    }
}

impl Seeding {
    /// Accepts any law that is valid for this slack set: it must fit inside
    /// `S` and satisfy every realizable row of the full program.
    pub fn new(s: ColorSet, law: SizeLaw, q: usize, delta: usize) -> Result<Self, CouplingError> {
        let size = s.len();
        if size >= q {
            return Err(CouplingError::NoFreeColor { slack: size, q });
        }
        if law.max_size() > size + 1 {
            return Err(CouplingError::SeedingRegime(format!(
                "law reaches size {} but |S| = {size}",
                law.max_size()
            )));
        }
        let inst = LpInstance::new(size, delta, q);
        let mut rows = Vec::new();
        // Row 0: nothing blocked, so the prefix is never covered.
        if law.r(1) > inst.row_bound(0) + LP_TOLERANCE {
            rows.push(0);
        }
        rows.extend(inst.verify_full_lp(&law));
        if !rows.is_empty() {
            return Err(CouplingError::LpInfeasible { rows });
        }
        Ok(Self { s, law, q, delta })
    }

    /// The law used by the sampler for a given slack set: the closed-form
    /// `{2, 3}` law when `|S| > Δ`, size 2 when `0 < |S| <= Δ`, and size 1
    /// (a uniform color) when `S` is empty.
    pub fn for_slack(s: ColorSet, q: usize, delta: usize) -> Result<Self, CouplingError> {
        let size = s.len();
        if size >= q {
            return Err(CouplingError::NoFreeColor { slack: size, q });
        }
        let law = if size == 0 {
            SizeLaw::point(1)
        } else if size <= delta {
            SizeLaw::point(2)
        } else {
            seeding_size_law(size, delta, q)?
        };
        Self::new(s, law, q, delta)
    }

    pub fn slack(&self) -> &ColorSet {
        &self.s
    }

    pub fn law(&self) -> &SizeLaw {
        &self.law
    }

    /// `P_C`: probability that the whole prefix lies in a blocked set of size `c`.
    fn covered_probability(&self, c: usize) -> f64 {
        let size = self.s.len();
        (1..=self.law.max_size())
            .map(|k| self.law.r(k) * binomial_ratio(c, size, k - 1))
            .sum()
    }
}

impl LocalCoupling for Seeding {
    type Draw = SeedingDraw;

    fn draw(&self, sub: &mut SubStream) -> Result<SeedingDraw, CouplingError> {
        let k = sub.categorical(self.law.weights())? + 1;
        let pi = sub.random_permutation(&self.s);
        let c0 = sub.uniform_in_set(&self.s.complement(self.q))?;
        let u_prime = sub.unit_uniform();
        Ok(SeedingDraw { k, pi, c0, u_prime })
    }

    fn predicted(&self, draw: &SeedingDraw) -> ColorSet {
        let mut set: ColorSet = draw.prefix().iter().copied().collect();
        set.insert(draw.c0);
        set
    }

    fn decode(&self, draw: &SeedingDraw, blocked: &ColorSet) -> Result<usize, CouplingError> {
        if !blocked.is_subset(&self.s) || blocked.len() > self.delta {
            return Err(CouplingError::UnrealizableBlockedSet(format!(
                "{blocked:?} against slack {:?} with Δ = {}",
                self.s, self.delta
            )));
        }
        let Some(first) = draw.prefix().iter().copied().find(|&c| !blocked.contains(c)) else {
            return Ok(draw.c0);
        };
        let c = blocked.len();
        let free_in_s = (self.q - self.s.len()) as f64 / (self.q - c) as f64;
        let alpha = (1.0 - free_in_s) / (1.0 - self.covered_probability(c));
        Ok(if draw.u_prime < alpha { first } else { draw.c0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{SeedStream, SubSeedAddress};

    fn set(xs: &[usize]) -> ColorSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn hand_trace_of_acceptance() {
        let law = SizeLaw::two_point(2, 0.25).unwrap();
        let c = Seeding::new(set(&[1, 2, 3, 4, 5]), law, 8, 3).unwrap();
        let p_c = 0.4 * 0.75 + 0.1 * 0.25;
        let alpha = 0.5 / (1.0 - p_c);
        let mut draw = SeedingDraw {
            k: 2,
            pi: vec![4, 1, 5, 2, 3],
            c0: 7,
            u_prime: alpha - 1e-9,
        };
        assert_eq!(c.decode(&draw, &set(&[1, 2])), Ok(4));
        draw.u_prime = alpha + 1e-9;
        assert_eq!(c.decode(&draw, &set(&[1, 2])), Ok(7));
        // Prefix inside C: always the free color.
        draw.u_prime = 0.0;
        assert_eq!(c.decode(&draw, &set(&[4, 2])), Ok(7));
    }

    #[test]
    fn predicted_sets_have_size_k() {
        let s: ColorSet = (0..24).collect();
        let c = Seeding::for_slack(s, 30, 12).unwrap();
        let stream = SeedStream::new(11);
        for u in 0..500 {
            let (pred, draw) = c.predict(&stream, SubSeedAddress::new(1, u)).unwrap();
            assert_eq!(pred.len(), draw.k);
            assert!(draw.k == 2 || draw.k == 3);
            assert!(!s.contains(draw.c0) && draw.c0 < 30);
        }
    }

    #[test]
    fn small_and_empty_slack() {
        let c = Seeding::for_slack(set(&[2, 3]), 8, 3).unwrap();
        assert_eq!(c.law().r(2), 1.0);
        let c = Seeding::for_slack(ColorSet::empty(), 5, 3).unwrap();
        let stream = SeedStream::new(1);
        let (pred, _) = c.predict(&stream, SubSeedAddress::new(1, 0)).unwrap();
        assert_eq!(pred.len(), 1);
    }

    #[test]
    fn rejects_full_slack_and_bad_laws() {
        assert!(matches!(
            Seeding::for_slack(ColorSet::full(6), 6, 3),
            Err(CouplingError::NoFreeColor { slack: 6, q: 6 })
        ));
        // Point mass on size 1 with little free room violates every row.
        assert!(matches!(
            Seeding::new(set(&[0, 1, 2, 3, 4]), SizeLaw::point(1), 8, 3),
            Err(CouplingError::LpInfeasible { .. })
        ));
    }
}
