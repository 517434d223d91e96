use std::collections::VecDeque;

use serde::Serialize;

use crate::error::EngineError;
use crate::graph::Graph;
use crate::seed::{Lane, SeedStream, SubSeedAddress};

/// `η = 2 sqrt((ln Δ + 1) / Δ)`, taken as 0 for edgeless graphs.
pub fn eta(delta: usize) -> f64 {
    if delta == 0 {
        return 0.0;
    }
    let d = delta as f64;
    2.0 * ((d.ln() + 1.0) / d).sqrt()
}

/// Independent inclusion probability `max(0, 1/2 - η/2)`.
pub fn inclusion_probability(delta: usize) -> f64 {
    (0.5 - eta(delta) / 2.0).max(0.0)
}

/// Palette size above which blocks coalesce with probability at least 1/2.
pub fn coalescence_threshold(delta: usize) -> f64 {
    (2.5 + eta(delta)) * delta as f64
}

/// Vertices processed by the seeding phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedVertexSet {
    members: Vec<bool>,
    eta: f64,
    resamples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartitionViolation {
    pub vertex: usize,
    pub inside: usize,
    pub outside: usize,
}

impl SeedVertexSet {
    pub fn from_members(members: Vec<bool>, delta: usize) -> Self {
        Self {
            members,
            eta: eta(delta),
            resamples: 0,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    /// Members in ascending order.
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&v| self.members[v]).collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn resamples(&self) -> usize {
        self.resamples
    }

    /// Vertices with more than Δ/2 neighbors inside, or more than
    /// `(1/2 + η)Δ` outside.
    pub fn audit(&self, g: &Graph) -> Vec<PartitionViolation> {
        (0..g.n())
            .filter_map(|v| {
                let inside = g.neighbors(v).iter().filter(|&&u| self.members[u]).count();
                let outside = g.degree(v) - inside;
                violates(inside, outside, g.max_degree(), self.eta).then_some(PartitionViolation {
                    vertex: v,
                    inside,
                    outside,
                })
            })
            .collect()
    }
}

fn violates(inside: usize, outside: usize, delta: usize, eta: f64) -> bool {
    2 * inside > delta || outside as f64 > (0.5 + eta) * delta as f64 + 1e-9
}

/// Resample budget `ceil(10 n / Δ)`.
pub fn resample_budget(g: &Graph) -> usize {
    let delta = g.max_degree().max(1);
    (10 * g.n()).div_ceil(delta).max(1)
}

/// Seed set satisfying both neighborhood bounds, found by independent
/// inclusion followed by Moser-Tardos resampling of violated neighborhoods.
///
/// Draws come from the setup lane of block 0: address `(0, v)` decides the
/// initial membership of `v`, address `(0, n + k)` drives the `k`-th resample.
pub fn lll_partition(g: &Graph, stream: &SeedStream) -> Result<SeedVertexSet, EngineError> {
    let n = g.n();
    let delta = g.max_degree();
    let p0 = inclusion_probability(delta);
    let eta = eta(delta);
    let draw = |update: usize| stream.substream(Lane::Setup, SubSeedAddress::new(0, update as u64));
    let mut members: Vec<bool> = (0..n).map(|v| draw(v).unit_uniform() < p0).collect();
    let mut inside: Vec<usize> = (0..n)
        .map(|v| g.neighbors(v).iter().filter(|&&u| members[u]).count())
        .collect();
    let bad = |v: usize, inside: &[usize]| violates(inside[v], g.degree(v) - inside[v], delta, eta);

    let budget = resample_budget(g);
    let mut resamples = 0;
    let mut queued = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| bad(v, &inside)).collect();
    for &v in &queue {
        queued[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        if !bad(v, &inside) {
            continue;
        }
        if resamples == budget {
            return Err(EngineError::PartitionBudget { budget });
        }
        let mut sub = draw(n + resamples);
        resamples += 1;
        for &u in g.neighbors(v) {
            let now = sub.unit_uniform() < p0;
            if now != members[u] {
                members[u] = now;
                for &w in g.neighbors(u) {
                    if now {
                        inside[w] += 1;
                    } else {
                        inside[w] -= 1;
                    }
                }
            }
        }
        for &u in g.neighbors(v) {
            for &w in g.neighbors(u) {
                if !queued[w] && bad(w, &inside) {
                    queued[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(SeedVertexSet {
        members,
        eta,
        resamples,
    })
}
