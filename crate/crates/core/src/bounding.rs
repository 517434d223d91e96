//! Bounding lists, the composition list, and the clean-up step.

use serde::Serialize;
use serde_json::json;

use crate::colorset::ColorSet;
use crate::coupling::{disjoint_pairs, Compress, CouplingDescriptor};
use crate::error::CouplingError;
use crate::graph::Graph;
use crate::seed::{SeedStream, SubSeedAddress};

/// Which priority the greedy reference set follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GreedyMode {
    /// Preserved neighbor colors first.
    PhaseI,
    /// Preserved colors outside disjoint pairs first, then the pairs.
    PhaseII,
}

/// One recorded update: enough to regenerate its output on any coloring.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionEntry {
    pub vertex: usize,
    pub coupling: CouplingDescriptor,
    pub subseed: SubSeedAddress,
    /// The bounding list produced at construction time.
    pub result: ColorSet,
}

#[derive(Debug, Clone)]
pub struct BoundingState {
    q: usize,
    block: u64,
    next_update: u64,
    lists: Vec<ColorSet>,
    composition: Vec<CompositionEntry>,
}

impl BoundingState {
    /// All lists start as the full palette; updates are addressed under `block`.
    pub fn new(n: usize, q: usize, block: u64) -> Self {
        Self {
            q,
            block,
            next_update: 0,
            lists: vec![ColorSet::full(q); n],
            composition: Vec::new(),
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn list(&self, v: usize) -> &ColorSet {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[ColorSet] {
        &self.lists
    }

    pub fn set_list(&mut self, v: usize, list: ColorSet) {
        assert!(!list.is_empty(), "bounding lists are never empty");
        self.lists[v] = list;
    }

    pub fn composition(&self) -> &[CompositionEntry] {
        &self.composition
    }

    pub fn into_composition(self) -> Vec<CompositionEntry> {
        self.composition
    }

    pub fn updates(&self) -> u64 {
        self.next_update
    }

    /// `Some(coloring)` when every list is a singleton.
    pub fn coalesced(&self) -> Option<Vec<usize>> {
        self.lists
            .iter()
            .map(|l| if l.len() == 1 { l.first() } else { None })
            .collect()
    }

    pub fn neighbor_lists(&self, g: &Graph, v: usize) -> Vec<ColorSet> {
        g.neighbors(v).iter().map(|&u| self.lists[u]).collect()
    }

    /// Union of the neighbor lists.
    pub fn neighborhood_slack(&self, g: &Graph, v: usize) -> ColorSet {
        g.neighbors(v)
            .iter()
            .fold(ColorSet::empty(), |acc, &u| acc.union(&self.lists[u]))
    }

    /// Union of the neighbor lists that are singletons.
    pub fn singleton_colors(&self, g: &Graph, v: usize) -> ColorSet {
        g.neighbors(v)
            .iter()
            .map(|&u| self.lists[u])
            .filter(|l| l.len() == 1)
            .fold(ColorSet::empty(), |acc, l| acc.union(&l))
    }

    /// Union of the two-color neighbor lists that meet no other neighbor list.
    /// Requires every neighbor list to have at most two colors.
    pub fn disjoint_colors(&self, g: &Graph, v: usize) -> Result<ColorSet, CouplingError> {
        if let Some(&u) = g.neighbors(v).iter().find(|&&u| self.lists[u].len() > 2) {
            return Err(CouplingError::NeighborListTooLarge {
                vertex: u,
                size: self.lists[u].len(),
            });
        }
        Ok(disjoint_pairs(&self.neighbor_lists(g, v))
            .into_iter()
            .flatten()
            .collect())
    }

    /// Reference set of size Δ for the clean-up around `v`.
    ///
    /// Colors of preserved neighbors come first, in the priority of `mode`.
    /// Within a class, whole neighbor lists are taken while they fit (neighbors
    /// in ascending order), then single colors in ascending order; any room
    /// left is filled with the smallest remaining colors.
    pub fn greedy_reference_set(
        &self,
        g: &Graph,
        v: usize,
        preserved: &[bool],
        mode: GreedyMode,
    ) -> Result<ColorSet, CouplingError> {
        let delta = g.max_degree();
        if self.q < delta {
            return Err(CouplingError::PaletteTooSmall {
                q: self.q,
                delta,
                needed: delta,
            });
        }
        let kept: Vec<ColorSet> = g
            .neighbors(v)
            .iter()
            .filter(|&&u| preserved[u])
            .map(|&u| self.lists[u])
            .collect();
        let classes: Vec<Vec<ColorSet>> = match mode {
            GreedyMode::PhaseI => vec![kept],
            GreedyMode::PhaseII => {
                let pairs: Vec<ColorSet> = disjoint_pairs(&kept)
                    .into_iter()
                    .map(|p| p.into_iter().collect())
                    .collect();
                let rest = kept.into_iter().filter(|l| !pairs.contains(l)).collect();
                vec![rest, pairs]
            }
        };
        let mut a = ColorSet::empty();
        for class in &classes {
            for list in class {
                if a.union(list).len() <= delta {
                    a = a.union(list);
                }
            }
            let colors = class.iter().fold(ColorSet::empty(), |acc, l| acc.union(l));
            for c in colors.difference(&a).iter() {
                if a.len() == delta {
                    break;
                }
                a.insert(c);
            }
        }
        for c in a.complement(self.q).iter() {
            if a.len() == delta {
                break;
            }
            a.insert(c);
        }
        Ok(a)
    }

    /// Replace `L(v)` by the coupling's predicted set and record the update.
    pub fn apply_update(
        &mut self,
        v: usize,
        coupling: CouplingDescriptor,
        stream: &SeedStream,
    ) -> Result<(), CouplingError> {
        let subseed = SubSeedAddress::new(self.block, self.next_update);
        let result = coupling.predict(stream, subseed)?;
        self.next_update += 1;
        self.lists[v] = result;
        self.composition.push(CompositionEntry {
            vertex: v,
            coupling,
            subseed,
            result,
        });
        Ok(())
    }

    /// Compress every non-preserved neighbor of `v` onto one greedy reference
    /// set, in ascending vertex order.
    pub fn cleanup(
        &mut self,
        g: &Graph,
        v: usize,
        preserved: &[bool],
        mode: GreedyMode,
        stream: &SeedStream,
    ) -> Result<(), CouplingError> {
        if g.neighbors(v).iter().all(|&w| preserved[w]) {
            return Ok(());
        }
        let a = self.greedy_reference_set(g, v, preserved, mode)?;
        let compress = Compress::new(a, self.q, g.max_degree())?;
        for &w in g.neighbors(v) {
            if !preserved[w] {
                self.apply_update(w, CouplingDescriptor::Compress(compress.clone()), stream)?;
            }
        }
        Ok(())
    }

    /// One JSON object per line: first the lists, then the composition.
    pub fn dump_json_lines(&self) -> String {
        let mut out = String::new();
        for (v, list) in self.lists.iter().enumerate() {
            out.push_str(&json!({ "vertex": v, "list": list }).to_string());
            out.push('\n');
        }
        for e in &self.composition {
            let line = json!({
                "vertex": e.vertex,
                "coupling": e.coupling.tag(),
                "subseed": e.subseed,
                "list": e.result,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

/// Rebuild the bounding lists from a composition list alone.
pub fn replay_lists(
    n: usize,
    q: usize,
    composition: &[CompositionEntry],
    stream: &SeedStream,
) -> Result<Vec<ColorSet>, CouplingError> {
    let mut lists = vec![ColorSet::full(q); n];
    for e in composition {
        lists[e.vertex] = e.coupling.predict(stream, e.subseed)?;
    }
    Ok(lists)
}

/// Push one concrete coloring through a composition list.
pub fn apply_composition(
    g: &Graph,
    coloring: &mut [usize],
    composition: &[CompositionEntry],
    stream: &SeedStream,
) -> Result<(), CouplingError> {
    for e in composition {
        let blocked: ColorSet = g.neighbors(e.vertex).iter().map(|&u| coloring[u]).collect();
        coloring[e.vertex] = e.coupling.apply(stream, e.subseed, &blocked)?;
    }
    Ok(())
}
