//! Local grand couplings for one Glauber update.
//!
//! Each coupling works in two stages. `draw` turns the randomness at one
//! sub-seed address into a draw, and `predicted` gives the set of colors the
//! update can output for any neighbor coloring the bounding box allows.
//! `decode` then maps a realized blocked set (the colors actually used by the
//! neighbors) to the output color, which is uniform on the unblocked colors
//! when the address is random.

use serde::Serialize;

use crate::colorset::ColorSet;
use crate::error::CouplingError;
use crate::seed::{SeedStream, SubSeedAddress, SubStream};

pub mod compress;
pub mod disjoint;
pub mod lp;
pub mod seeding;

pub use compress::{Compress, CompressDraw};
pub use disjoint::{disjoint_pairs, Disjoint, DisjointDraw, DisjointRegime};
pub use lp::{seeding_size_law, LpInstance, SizeLaw};
pub use seeding::{Seeding, SeedingDraw};

pub trait LocalCoupling {
    type Draw;

    fn draw(&self, sub: &mut SubStream) -> Result<Self::Draw, CouplingError>;

    /// Every color `decode` can return for this draw.
    fn predicted(&self, draw: &Self::Draw) -> ColorSet;

    fn decode(&self, draw: &Self::Draw, blocked: &ColorSet) -> Result<usize, CouplingError>;

    fn predict(
        &self,
        stream: &SeedStream,
        addr: SubSeedAddress,
    ) -> Result<(ColorSet, Self::Draw), CouplingError> {
        let draw = self.draw(&mut stream.update_stream(addr))?;
        Ok((self.predicted(&draw), draw))
    }
}

/// A coupling together with the parameter snapshot it was built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "coupling", rename_all = "lowercase")]
pub enum CouplingDescriptor {
    Compress(Compress),
    Seeding(Seeding),
    Disjoint(Disjoint),
}

impl CouplingDescriptor {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Compress(_) => "compress",
            Self::Seeding(_) => "seeding",
            Self::Disjoint(_) => "disjoint",
        }
    }

    pub fn predict(
        &self,
        stream: &SeedStream,
        addr: SubSeedAddress,
    ) -> Result<ColorSet, CouplingError> {
        Ok(match self {
            Self::Compress(c) => c.predict(stream, addr)?.0,
            Self::Seeding(c) => c.predict(stream, addr)?.0,
            Self::Disjoint(c) => c.predict(stream, addr)?.0,
        })
    }

    /// Regenerate the draw at `addr` and decode it against `blocked`.
    pub fn apply(
        &self,
        stream: &SeedStream,
        addr: SubSeedAddress,
        blocked: &ColorSet,
    ) -> Result<usize, CouplingError> {
        let mut sub = stream.update_stream(addr);
        match self {
            Self::Compress(c) => c.decode(&c.draw(&mut sub)?, blocked),
            Self::Seeding(c) => c.decode(&c.draw(&mut sub)?, blocked),
            Self::Disjoint(c) => c.decode(&c.draw(&mut sub)?, blocked),
        }
    }
}

/// All blocked sets a vertex can see when each neighbor `i` takes some color
/// from `lists[i]`. Exponential in the number of neighbors; for tests and
/// audits on small instances.
pub fn realizable_blocked_sets(lists: &[ColorSet]) -> Vec<ColorSet> {
    let mut sets = vec![ColorSet::empty()];
    for list in lists {
        let mut next: Vec<ColorSet> = Vec::new();
        for set in &sets {
            for c in list {
                let mut s = *set;
                s.insert(c);
                next.push(s);
            }
        }
        next.sort_by_key(|s| s.to_vec());
        next.dedup();
        sets = next;
    }
    sets
}

/// All subsets of `universe` with at most `max_size` members.
pub fn subsets_up_to(universe: &ColorSet, max_size: usize) -> Vec<ColorSet> {
    let items = universe.to_vec();
    let mut out = vec![ColorSet::empty()];
    for &c in &items {
        let extended: Vec<ColorSet> = out
            .iter()
            .filter(|s| s.len() < max_size)
            .map(|s| {
                let mut t = *s;
                t.insert(c);
                t
            })
            .collect();
        out.extend(extended);
    }
    out
}
