//! Coupling that exploits neighbors whose lists are singletons or disjoint
//! pairs.
//!
//! Colors of the slack set split into `Q` (singleton lists, surely blocked),
//! `D` (two-color lists that meet no other neighbor list, exactly one member
//! blocked) and the rest `R`; `T = [q] \ S` is never blocked. With `a` free
//! colors, every free color needs mass `1/a`, and `a` ranges over
//! `[a_min, a_max]` with `a_max = q - |Q| - |D|/2`. Four branches share the
//! probability:
//!
//! * pair: pick a `D` pair and output its free member (mass `1/a_max` each);
//! * `D` candidate: a `D` color, kept with the probability that tops its mass
//!   up from `1/a_max` to `1/a`, otherwise a reserve color from `T`;
//! * `R` candidate: an `R` color, kept with probability `a_min / a`,
//!   otherwise a reserve color from `T`;
//! * `T`: a uniform color of `T`, the only single-color outcome.
//!
//! `T` absorbs the remaining mass, which by symmetry is `1/a` per color.

use serde::Serialize;

use super::LocalCoupling;
use crate::colorset::ColorSet;
use crate::error::CouplingError;
use crate::seed::SubStream;

/// Absolute slack before a negative branch weight counts as infeasible.
const WEIGHT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DisjointRegime {
    Pair,
    RCandidate,
    DCandidate,
    Free,
}

const REGIMES: [DisjointRegime; 4] = [
    DisjointRegime::Pair,
    DisjointRegime::RCandidate,
    DisjointRegime::DCandidate,
    DisjointRegime::Free,
];

#[derive(Debug, Clone, PartialEq)]
pub struct DisjointDraw {
    pub regime: DisjointRegime,
    /// Pair index for [`DisjointRegime::Pair`], a color for the candidate
    /// branches, unused otherwise.
    pub candidate: usize,
    pub reserve: Option<usize>,
    pub u_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disjoint {
    q: usize,
    s: ColorSet,
    singles: ColorSet,
    pairs: Vec<[usize; 2]>,
    b_max: usize,
    #[serde(skip)]
    d_set: ColorSet,
    #[serde(skip)]
    r_set: ColorSet,
    #[serde(skip)]
    t_set: ColorSet,
    #[serde(skip)]
    weights: [f64; 4],
}

/// Two-color lists that share no color with any other list, in list order.
pub fn disjoint_pairs(lists: &[ColorSet]) -> Vec<[usize; 2]> {
    lists
        .iter()
        .enumerate()
        .filter(|(i, l)| {
            l.len() == 2
                && lists
                    .iter()
                    .enumerate()
                    .all(|(j, other)| j == *i || l.is_disjoint(other))
        })
        .map(|(_, l)| {
            let v = l.to_vec();
            [v[0], v[1]]
        })
        .collect()
}

impl Disjoint {
    /// Build from the bounding lists of the neighbors of the update vertex.
    pub fn from_neighbor_lists(lists: &[ColorSet], q: usize) -> Result<Self, CouplingError> {
        let s: ColorSet = lists.iter().fold(ColorSet::empty(), |acc, l| acc.union(l));
        let singles: ColorSet = lists
            .iter()
            .filter(|l| l.len() == 1)
            .fold(ColorSet::empty(), |acc, l| acc.union(l));
        let pairs = disjoint_pairs(lists);
        let others = lists.len() - pairs.len() - lists.iter().filter(|l| l.len() == 1).count();
        Self::new(q, s, singles, pairs, others)
    }

    /// `others` counts neighbors that own neither a singleton nor a pair; each
    /// can block at most one color of `R`.
    pub fn new(
        q: usize,
        s: ColorSet,
        singles: ColorSet,
        pairs: Vec<[usize; 2]>,
        others: usize,
    ) -> Result<Self, CouplingError> {
        let d_set: ColorSet = pairs.iter().flatten().copied().collect();
        if d_set.len() != 2 * pairs.len() || !d_set.is_disjoint(&singles) {
            return Err(CouplingError::DisjointInfeasible(format!(
                "pairs {pairs:?} overlap each other or the singleton colors {singles:?}"
            )));
        }
        if !singles.union(&d_set).is_subset(&s) || !s.is_subset(&ColorSet::full(q)) {
            return Err(CouplingError::DisjointInfeasible(format!(
                "singletons and pairs must lie in the slack set {s:?} within [{q}]"
            )));
        }
        let r_set = s.difference(&singles).difference(&d_set);
        let t_set = s.complement(q);
        let d = pairs.len();
        let b_max = singles.len() + d + r_set.len().min(others);
        if b_max >= q {
            return Err(CouplingError::DisjointInfeasible(format!(
                "up to {b_max} blocked colors leave no free color among {q}"
            )));
        }
        let a_min = (q - b_max) as f64;
        let a_max = (q - singles.len() - d) as f64;
        let w_pair = d as f64 / a_max;
        let w_r = r_set.len() as f64 / a_min;
        let w_d = d_set.len() as f64 * (1.0 / a_min - 1.0 / a_max);
        let w_free = 1.0 - w_pair - w_r - w_d;
        if w_free < -WEIGHT_SLACK {
            return Err(CouplingError::DisjointInfeasible(format!(
                "branch weights exceed 1 by {:.6} (|S| = {}, |Q| = {}, |D| = {}, q = {q})",
                -w_free,
                s.len(),
                singles.len(),
                d_set.len()
            )));
        }
        let w_free = w_free.max(0.0);
        if t_set.is_empty() && w_r + w_d + w_free > WEIGHT_SLACK {
            return Err(CouplingError::NoFreeColor { slack: s.len(), q });
        }
        Ok(Self {
            q,
            s,
            singles,
            pairs,
            b_max,
            d_set,
            r_set,
            t_set,
            weights: [w_pair, w_r, w_d, w_free],
        })
    }

    pub fn slack(&self) -> &ColorSet {
        &self.s
    }

    pub fn singles(&self) -> &ColorSet {
        &self.singles
    }

    pub fn pair_colors(&self) -> &ColorSet {
        &self.d_set
    }

    pub fn pairs(&self) -> &[[usize; 2]] {
        &self.pairs
    }

    /// Probability that the predicted set is a single color.
    pub fn size_one_probability(&self) -> f64 {
        self.weights[3]
    }

    fn a_min(&self) -> usize {
        self.q - self.b_max
    }

    fn a_max(&self) -> usize {
        self.q - self.singles.len() - self.pairs.len()
    }
}

/// `1 - (|S| - |Q|)/(q - Δ) + (|D|/2)/(q - |Q| - |D|/2)`.
pub fn disjoint_success_bound(s: usize, singles: usize, d: usize, q: usize, delta: usize) -> f64 {
    1.0 - (s - singles) as f64 / (q - delta) as f64
        + (d as f64 / 2.0) / (q as f64 - singles as f64 - d as f64 / 2.0)
}

impl LocalCoupling for Disjoint {
    type Draw = DisjointDraw;

    fn draw(&self, sub: &mut SubStream) -> Result<DisjointDraw, CouplingError> {
        let regime = REGIMES[sub.categorical(&self.weights)?];
        let (candidate, reserve) = match regime {
            DisjointRegime::Pair => (sub.index(self.pairs.len()), None),
            DisjointRegime::RCandidate => (
                sub.uniform_in_set(&self.r_set)?,
                Some(sub.uniform_in_set(&self.t_set)?),
            ),
            DisjointRegime::DCandidate => (
                sub.uniform_in_set(&self.d_set)?,
                Some(sub.uniform_in_set(&self.t_set)?),
            ),
            DisjointRegime::Free => (0, Some(sub.uniform_in_set(&self.t_set)?)),
        };
        let u_prime = sub.unit_uniform();
        Ok(DisjointDraw {
            regime,
            candidate,
            reserve,
            u_prime,
        })
    }

    fn predicted(&self, draw: &DisjointDraw) -> ColorSet {
        match draw.regime {
            DisjointRegime::Pair => self.pairs[draw.candidate].iter().copied().collect(),
            DisjointRegime::RCandidate | DisjointRegime::DCandidate => {
                [draw.candidate, draw.reserve.expect("candidate draws carry a reserve")]
                    .into_iter()
                    .collect()
            }
            DisjointRegime::Free => ColorSet::singleton(draw.reserve.expect("free draw")),
        }
    }

    fn decode(&self, draw: &DisjointDraw, blocked: &ColorSet) -> Result<usize, CouplingError> {
        let free = self.q - blocked.len().min(self.q);
        let realizable = self.singles.is_subset(blocked)
            && blocked.is_subset(&self.s)
            && (self.a_min()..=self.a_max()).contains(&free);
        if !realizable {
            return Err(CouplingError::UnrealizableBlockedSet(format!(
                "{blocked:?} against Q = {:?}, D = {:?}",
                self.singles, self.d_set
            )));
        }
        let a = free as f64;
        let reserve = || draw.reserve.expect("branch carries a reserve");
        Ok(match draw.regime {
            DisjointRegime::Pair => {
                let [x, y] = self.pairs[draw.candidate];
                match (blocked.contains(x), blocked.contains(y)) {
                    (true, false) => y,
                    (false, true) => x,
                    _ => {
                        return Err(CouplingError::UnrealizableBlockedSet(format!(
                            "pair ({x}, {y}) must have exactly one member in {blocked:?}"
                        )))
                    }
                }
            }
            DisjointRegime::RCandidate => {
                let keep = self.a_min() as f64 / a;
                if !blocked.contains(draw.candidate) && draw.u_prime < keep {
                    draw.candidate
                } else {
                    reserve()
                }
            }
            DisjointRegime::DCandidate => {
                let (lo, hi) = (self.a_min() as f64, self.a_max() as f64);
                let keep = (1.0 / a - 1.0 / hi) / (1.0 / lo - 1.0 / hi);
                if !blocked.contains(draw.candidate) && draw.u_prime < keep {
                    draw.candidate
                } else {
                    reserve()
                }
            }
            DisjointRegime::Free => reserve(),
        })
    }
}
