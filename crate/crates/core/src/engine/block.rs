use serde::Serialize;

use super::partition::SeedVertexSet;
use super::{SamplerConfig, Stage};
use crate::bounding::{BoundingState, CompositionEntry, GreedyMode};
use crate::coupling::{CouplingDescriptor, Disjoint, Seeding};
use crate::error::{CouplingError, EngineError};
use crate::graph::Graph;
use crate::seed::{Lane, SeedStream, SubSeedAddress};

/// Schedule-lane address of the first Phase II drift draw, far from Phase I's.
const PHASE_II_SCHEDULE: u64 = 1 << 40;

/// Update counts per stage of one block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PhaseStats {
    pub phase1_init: u64,
    pub phase1_drift: u64,
    pub phase2_convert: u64,
    pub phase2_drift: u64,
}

impl PhaseStats {
    pub fn total(&self) -> u64 {
        self.phase1_init + self.phase1_drift + self.phase2_convert + self.phase2_drift
    }

    pub fn add(&mut self, other: &PhaseStats) {
        self.phase1_init += other.phase1_init;
        self.phase1_drift += other.phase1_drift;
        self.phase2_convert += other.phase2_convert;
        self.phase2_drift += other.phase2_drift;
    }

    fn slot(&mut self, stage: Stage) -> &mut u64 {
        match stage {
            Stage::PhaseIInit => &mut self.phase1_init,
            Stage::PhaseIDrift => &mut self.phase1_drift,
            Stage::PhaseIIConvert => &mut self.phase2_convert,
            Stage::PhaseIIDrift => &mut self.phase2_drift,
        }
    }
}

/// The randomness of one block, reduced to its composition list and the
/// outcome of the coalescence check.
#[derive(Debug, Clone)]
pub struct Block {
    pub index: u64,
    pub composition: Vec<CompositionEntry>,
    /// The coalesced coloring, if every list ended as a singleton.
    pub phi: Option<Vec<usize>>,
    pub stats: PhaseStats,
    /// Set when a coupling precondition failed; the composition then holds
    /// the updates made before the failure and `phi` is `None`.
    pub abort: Option<EngineError>,
}

/// Drift lengths `(T1, T2)` for a graph with `seeds` seed vertices.
///
/// `T2` divides by `q - 2.5Δ`; at or below that point the divisor is
/// clamped to 1/2 so forced runs still get a finite schedule.
pub fn drift_lengths(g: &Graph, seeds: usize, config: &SamplerConfig) -> (u64, u64) {
    let s = seeds as f64;
    let t1 = if seeds > 1 { (5.0 * s * s.ln()).ceil() as u64 } else { 0 };
    let n = g.n() as f64;
    let delta = g.max_degree() as f64;
    let q = config.q as f64;
    let t2 = if g.n() > 1 {
        (2.0 * (q - delta) * n * n.ln() / (q - 2.5 * delta).max(0.5)).ceil() as u64
    } else {
        0
    };
    (config.t1_override.unwrap_or(t1), config.t2_override.unwrap_or(t2))
}

/// Upper bound on the updates of one block.
pub fn update_budget(g: &Graph, seeds: usize, config: &SamplerConfig) -> u64 {
    let (t1, t2) = drift_lengths(g, seeds, config);
    let d1 = g.max_degree() as u64 + 1;
    seeds as u64 * d1 + t1 * d1 + (g.n() - seeds) as u64 * d1 + t2
}

struct Builder<'a> {
    g: &'a Graph,
    stream: &'a SeedStream,
    state: BoundingState,
    stats: PhaseStats,
    stage: Stage,
    vertex: usize,
}

impl Builder<'_> {
    fn record<T>(&mut self, before: u64, r: Result<T, CouplingError>) -> Result<T, CouplingError> {
        *self.stats.slot(self.stage) += self.state.updates() - before;
        r
    }

    fn cleanup(&mut self, v: usize, preserved: &[bool], mode: GreedyMode) -> Result<(), CouplingError> {
        self.vertex = v;
        let before = self.state.updates();
        let r = self.state.cleanup(self.g, v, preserved, mode, self.stream);
        self.record(before, r)
    }

    fn seeding(&mut self, v: usize) -> Result<(), CouplingError> {
        self.vertex = v;
        let before = self.state.updates();
        let slack = self.state.neighborhood_slack(self.g, v);
        let r = Seeding::for_slack(slack, self.state.q(), self.g.max_degree()).and_then(|c| {
            self.state
                .apply_update(v, CouplingDescriptor::Seeding(c), self.stream)
        });
        self.record(before, r)
    }

    fn disjoint(&mut self, v: usize) -> Result<(), CouplingError> {
        self.vertex = v;
        let before = self.state.updates();
        let lists = self.state.neighbor_lists(self.g, v);
        let r = Disjoint::from_neighbor_lists(&lists, self.state.q()).and_then(|c| {
            self.state
                .apply_update(v, CouplingDescriptor::Disjoint(c), self.stream)
        });
        self.record(before, r)
    }
}

/// Build block `index`: seeding phase on the seed set, conversion of the
/// remaining vertices, drift over all vertices, then the coalescence check.
/// `observe` sees the bounding state after each completed stage.
pub fn construct_block_observed(
    g: &Graph,
    seeds: &SeedVertexSet,
    config: &SamplerConfig,
    index: u64,
    stream: &SeedStream,
    observe: &mut dyn FnMut(Stage, &BoundingState),
) -> Block {
    let mut b = Builder {
        g,
        stream,
        state: BoundingState::new(g.n(), config.q, index),
        stats: PhaseStats::default(),
        stage: Stage::PhaseIInit,
        vertex: 0,
    };
    let outcome = run_stages(&mut b, seeds, config, index, observe);
    let abort = outcome.err().map(|source| EngineError::BlockAborted {
        block: index,
        stage: b.stage,
        vertex: b.vertex,
        source,
    });
    let phi = if abort.is_none() { b.state.coalesced() } else { None };
    Block {
        index,
        composition: b.state.into_composition(),
        phi,
        stats: b.stats,
        abort,
    }
}

pub fn construct_block(
    g: &Graph,
    seeds: &SeedVertexSet,
    config: &SamplerConfig,
    index: u64,
    stream: &SeedStream,
) -> Block {
    construct_block_observed(g, seeds, config, index, stream, &mut |_, _| {})
}

fn run_stages(
    b: &mut Builder<'_>,
    seeds: &SeedVertexSet,
    config: &SamplerConfig,
    index: u64,
    observe: &mut dyn FnMut(Stage, &BoundingState),
) -> Result<(), CouplingError> {
    let g = b.g;
    let n = g.n();
    let seed_vertices = seeds.vertices();
    let (t1, t2) = drift_lengths(g, seed_vertices.len(), config);
    let mut preserved = vec![false; n];

    b.stage = Stage::PhaseIInit;
    for &v in &seed_vertices {
        b.cleanup(v, &preserved, GreedyMode::PhaseI)?;
        b.seeding(v)?;
        preserved[v] = true;
    }
    observe(Stage::PhaseIInit, &b.state);

    b.stage = Stage::PhaseIDrift;
    if !seed_vertices.is_empty() {
        let mut schedule = b.stream.substream(Lane::Schedule, SubSeedAddress::new(index, 0));
        for _ in 0..t1 {
            let v = seed_vertices[schedule.index(seed_vertices.len())];
            b.cleanup(v, seeds.mask(), GreedyMode::PhaseI)?;
            b.seeding(v)?;
        }
    }
    observe(Stage::PhaseIDrift, &b.state);

    b.stage = Stage::PhaseIIConvert;
    for v in (0..n).filter(|&v| !seeds.contains(v)) {
        b.cleanup(v, &preserved, GreedyMode::PhaseII)?;
        b.disjoint(v)?;
        preserved[v] = true;
    }
    observe(Stage::PhaseIIConvert, &b.state);

    b.stage = Stage::PhaseIIDrift;
    if n > 0 {
        let mut schedule = b
            .stream
            .substream(Lane::Schedule, SubSeedAddress::new(index, PHASE_II_SCHEDULE));
        for _ in 0..t2 {
            let v = schedule.index(n);
            b.disjoint(v)?;
        }
    }
    observe(Stage::PhaseIIDrift, &b.state);
    Ok(())
}
