use std::time::Instant;

use serde::Serialize;

use super::block::{construct_block, Block, PhaseStats};
use super::partition::{coalescence_threshold, lll_partition, SeedVertexSet};
use crate::bounding::apply_composition;
use crate::colorset::MAX_COLORS;
use crate::error::EngineError;
use crate::graph::Graph;
use crate::seed::{PermutationMode, SeedStream};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub q: usize,
    pub master_seed: u64,
    /// Blocks tried before giving up.
    pub max_blocks: u64,
    pub t1_override: Option<u64>,
    pub t2_override: Option<u64>,
    /// Run below the coalescence threshold.
    pub force: bool,
    #[serde(skip)]
    pub permutation_mode: PermutationMode,
}

impl SamplerConfig {
    pub fn new(q: usize, master_seed: u64) -> Self {
        Self {
            q,
            master_seed,
            max_blocks: 64,
            t1_override: None,
            t2_override: None,
            force: false,
            permutation_mode: PermutationMode::FisherYates,
        }
    }

    pub fn with_force(mut self, force: bool) -> Self {
        self.force = force;
        self
    }

    pub fn with_max_blocks(mut self, max_blocks: u64) -> Self {
        self.max_blocks = max_blocks;
        self
    }

    pub fn stream(&self) -> SeedStream {
        SeedStream::new(self.master_seed).with_permutation_mode(self.permutation_mode)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub blocks_used: u64,
    /// Updates performed while building blocks.
    pub updates: u64,
    pub aborted_blocks: u64,
    pub last_abort: Option<String>,
    pub phase_stats: PhaseStats,
    pub seed_set_size: usize,
    pub partition_resamples: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleOutput {
    pub coloring: Vec<usize>,
    pub stats: RunStats,
}

/// A graph, a configuration and the seed set derived from them.
pub struct Sampler<'g> {
    g: &'g Graph,
    config: SamplerConfig,
    stream: SeedStream,
    seeds: SeedVertexSet,
}

impl<'g> Sampler<'g> {
    pub fn new(g: &'g Graph, config: SamplerConfig) -> Result<Self, EngineError> {
        let delta = g.max_degree();
        let q = config.q;
        if q < delta + 2 {
            return Err(EngineError::InvalidConfig(format!(
                "q = {q} must be at least Δ + 2 = {}",
                delta + 2
            )));
        }
        if q > MAX_COLORS {
            return Err(EngineError::InvalidConfig(format!(
                "q = {q} exceeds the supported maximum {MAX_COLORS}"
            )));
        }
        if config.max_blocks == 0 {
            return Err(EngineError::InvalidConfig("max_blocks must be positive".into()));
        }
        let threshold = coalescence_threshold(delta);
        if (q as f64) < threshold && !config.force {
            return Err(EngineError::BelowThreshold { q, threshold });
        }
        let stream = config.stream();
        let seeds = lll_partition(g, &stream)?;
        Ok(Self {
            g,
            config,
            stream,
            seeds,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.g
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn stream(&self) -> &SeedStream {
        &self.stream
    }

    pub fn seeds(&self) -> &SeedVertexSet {
        &self.seeds
    }

    /// Block `t` (block 1 is the most recent).
    pub fn block(&self, t: u64) -> Block {
        construct_block(self.g, &self.seeds, &self.config, t, &self.stream)
    }

    /// Try blocks `1, 2, ..` until block `t` coalesces, then push its coloring
    /// through blocks `t - 1, .., 1`.
    pub fn sample(&self) -> Result<SampleOutput, EngineError> {
        let start = Instant::now();
        let mut stats = RunStats {
            seed_set_size: self.seeds.len(),
            partition_resamples: self.seeds.resamples(),
            ..RunStats::default()
        };
        let mut earlier: Vec<Block> = Vec::new();
        for t in 1..=self.config.max_blocks {
            let block = self.block(t);
            stats.updates += block.stats.total();
            stats.phase_stats.add(&block.stats);
            if let Some(err) = &block.abort {
                stats.aborted_blocks += 1;
                stats.last_abort = Some(err.to_string());
            }
            if let Some(phi) = &block.phi {
                let mut omega = phi.clone();
                for b in earlier.iter().rev() {
                    omega = replay(b, &omega, self.g, &self.stream)?;
                }
                check_proper(self.g, &omega)?;
                stats.blocks_used = t;
                stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                return Ok(SampleOutput {
                    coloring: omega,
                    stats,
                });
            }
            earlier.push(block);
        }
        Err(EngineError::NoCoalescence {
            blocks: self.config.max_blocks,
            updates: stats.updates,
            last_abort: stats.last_abort,
        })
    }
}

pub fn sample(g: &Graph, config: SamplerConfig) -> Result<SampleOutput, EngineError> {
    Sampler::new(g, config)?.sample()
}

/// Push a proper coloring through the recorded updates of `block`.
pub fn replay(
    block: &Block,
    omega: &[usize],
    g: &Graph,
    stream: &SeedStream,
) -> Result<Vec<usize>, EngineError> {
    check_proper(g, omega)?;
    let mut out = omega.to_vec();
    apply_composition(g, &mut out, &block.composition, stream).map_err(|source| {
        EngineError::Replay {
            block: block.index,
            source,
        }
    })?;
    Ok(out)
}

pub fn check_proper(g: &Graph, coloring: &[usize]) -> Result<(), EngineError> {
    if coloring.len() != g.n() {
        return Err(EngineError::ColoringLength {
            expected: g.n(),
            got: coloring.len(),
        });
    }
    match g.edges().iter().find(|&&(u, v)| coloring[u] == coloring[v]) {
        Some(&(u, v)) => Err(EngineError::ImproperColoring(u, v)),
        None => Ok(()),
    }
}
