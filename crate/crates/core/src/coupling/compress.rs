use serde::{Deserialize, Serialize};

use super::LocalCoupling;
use crate::colorset::ColorSet;
use crate::error::CouplingError;
use crate::seed::SubStream;

/// Coupling with reference set `A` of size Δ: the output always lies in
/// `A ∪ {x'}` for one extra color `x'` uniform over `[q] \ A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Compress {
    a: ColorSet,
    q: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressDraw {
    pub pi: Vec<usize>,
    pub x_prime: usize,
    pub u_prime: f64,
}

impl Compress {
    pub fn new(a: ColorSet, q: usize, delta: usize) -> Result<Self, CouplingError> {
        if a.len() != delta {
            return Err(CouplingError::ReferenceSetSize {
                expected: delta,
                got: a.len(),
            });
        }
        if q < delta + 1 {
            return Err(CouplingError::PaletteTooSmall {
                q,
                delta,
                needed: delta + 1,
            });
        }
        if !a.is_subset(&ColorSet::full(q)) {
            return Err(CouplingError::UnrealizableBlockedSet(format!(
                "reference set {a:?} leaves the palette"
            )));
        }
        Ok(Self { a, q })
    }

    pub fn reference_set(&self) -> &ColorSet {
        &self.a
    }

    fn delta(&self) -> usize {
        self.a.len()
    }
}

impl LocalCoupling for Compress {
    type Draw = CompressDraw;

    fn draw(&self, sub: &mut SubStream) -> Result<CompressDraw, CouplingError> {
        let pi = sub.random_permutation(&self.a);
        let x_prime = sub.uniform_in_set(&self.a.complement(self.q))?;
        let u_prime = sub.unit_uniform();
        Ok(CompressDraw {
            pi,
            x_prime,
            u_prime,
        })
    }

    fn predicted(&self, draw: &CompressDraw) -> ColorSet {
        let mut set = self.a;
        set.insert(draw.x_prime);
        set
    }

    fn decode(&self, draw: &CompressDraw, blocked: &ColorSet) -> Result<usize, CouplingError> {
        let b = blocked.len();
        if b > self.delta() {
            return Err(CouplingError::UnrealizableBlockedSet(format!(
                "{blocked:?} has more than {} colors",
                self.delta()
            )));
        }
        let keep = (self.q - self.delta()) as f64 / (self.q - b) as f64;
        if !blocked.contains(draw.x_prime) && draw.u_prime <= keep {
            return Ok(draw.x_prime);
        }
        // When A is entirely blocked, blocked = A and x' is always kept above.
        draw.pi
            .iter()
            .copied()
            .find(|&c| !blocked.contains(c))
            .ok_or_else(|| CouplingError::UnrealizableBlockedSet(format!("{blocked:?}")))
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
    fn hand_trace() {
        let c = Compress::new(set(&[1, 2, 3]), 6, 3).unwrap();
        let draw = CompressDraw {
            pi: vec![2, 3, 1],
            x_prime: 5,
            u_prime: 0.9,
        };
        assert_eq!(c.decode(&draw, &set(&[2, 5])), Ok(3));
        let draw = CompressDraw {
            pi: vec![2, 3, 1],
            x_prime: 5,
            u_prime: 0.4,
        };
        assert_eq!(c.decode(&draw, &ColorSet::empty()), Ok(5));
    }

    #[test]
    fn forced_extra_color_fills_palette() {
        let c = Compress::new(set(&[0, 1, 2]), 4, 3).unwrap();
        let stream = SeedStream::new(3);
        for u in 0..50 {
            let (pred, _) = c.predict(&stream, SubSeedAddress::new(1, u)).unwrap();
            assert_eq!(pred, ColorSet::full(4));
        }
    }

    #[test]
    fn predicted_size_is_delta_plus_one() {
        let c = Compress::new(set(&[0, 4, 7]), 10, 3).unwrap();
        let stream = SeedStream::new(9);
        for u in 0..200 {
            let (pred, draw) = c.predict(&stream, SubSeedAddress::new(2, u)).unwrap();
            assert_eq!(pred.len(), 4);
            assert!(!c.reference_set().contains(draw.x_prime));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            Compress::new(set(&[0, 1]), 6, 3),
            Err(CouplingError::ReferenceSetSize { expected: 3, got: 2 })
        ));
        assert!(matches!(
            Compress::new(set(&[0, 1, 2]), 3, 3),
            Err(CouplingError::PaletteTooSmall { .. })
        ));
    }
}
