//! The triangle configuration that keeps every local coupling above two
//! colors when `q < 2.5Δ`.

use serde::Serialize;

use crate::bounding::{BoundingState, GreedyMode};
use crate::colorset::ColorSet;
use crate::coupling::{
    Compress, Disjoint, LocalCoupling, LpInstance, Seeding, seeding_size_law,
};
use crate::error::{CouplingError, OracleError};
use crate::graph::Graph;
use crate::seed::{SeedStream, SubSeedAddress};

/// `2m/(m+r+1) + m/(m+r) + 1` with `m = Δ/2`, `r = q - 3m`.
pub fn lower_bound_value(delta: usize, q: usize) -> Result<f64, OracleError> {
    if delta == 0 || delta % 2 == 1 {
        return Err(OracleError::WorstCase(format!(
            "Δ = {delta} must be even and positive (try Δ = {})",
            delta + 1
        )));
    }
    let m = delta / 2;
    if q < 3 * m {
        return Err(OracleError::WorstCase(format!(
            "q = {q} is below 3Δ/2 = {}",
            3 * m
        )));
    }
    let (m, r) = (m as f64, (q - 3 * m) as f64);
    Ok(2.0 * m / (m + r + 1.0) + m / (m + r) + 1.0)
}

#[derive(Debug, Clone)]
pub struct LowerBoundInstance {
    pub graph: Graph,
    pub lists: BoundingState,
    pub delta: usize,
    pub q: usize,
    pub m: usize,
    pub r: usize,
    pub bound: f64,
}

/// Disjoint copies of `K_{Δ,Δ}`; on each side the `2i`-th and `2i+1`-th
/// vertices get lists `{3i, 3i+1}` and `{3i+1, 3i+2}`.
pub fn build_worst_case(delta: usize, q: usize, copies: usize) -> Result<LowerBoundInstance, OracleError> {
    let bound = lower_bound_value(delta, q)?;
    if copies == 0 {
        return Err(OracleError::WorstCase("need at least one copy".into()));
    }
    let m = delta / 2;
    let host = Graph::complete_bipartite(delta).map_err(|e| OracleError::WorstCase(e.to_string()))?;
    let graph = host.disjoint_copies(copies);
    let mut lists = BoundingState::new(graph.n(), q, 0);
    for v in 0..graph.n() {
        let i = (v % delta) / 2;
        let lo = 3 * i + (v % delta) % 2;
        lists.set_list(v, [lo, lo + 1].into_iter().collect());
    }
    Ok(LowerBoundInstance {
        graph,
        lists,
        delta,
        q,
        m,
        r: q - 3 * m,
        bound,
    })
}

impl LowerBoundInstance {
    /// Every list has two colors and each neighborhood splits into pairs
    /// `{a, b}, {b, c}` whose triangles `{a, b, c}` are pairwise disjoint.
    pub fn audit(&self) -> bool {
        let g = &self.graph;
        (0..g.n()).all(|v| self.lists.list(v).len() == 2 && triangle_partition(&self.lists.neighbor_lists(g, v)))
    }

    pub fn center_lists(&self, v: usize) -> Vec<ColorSet> {
        self.lists.neighbor_lists(&self.graph, v)
    }
}

fn triangle_partition(lists: &[ColorSet]) -> bool {
    let mut used = vec![false; lists.len()];
    let mut covered = ColorSet::empty();
    for i in 0..lists.len() {
        if used[i] {
            continue;
        }
        let partner = (i + 1..lists.len()).find(|&j| {
            !used[j]
                && lists[i].intersection(&lists[j]).len() == 1
                && lists[i].union(&lists[j]).len() == 3
        });
        let Some(j) = partner else { return false };
        let triangle = lists[i].union(&lists[j]);
        if !triangle.is_disjoint(&covered) {
            return false;
        }
        covered = covered.union(&triangle);
        used[i] = true;
        used[j] = true;
    }
    true
}

/// Couplings that can be audited at a center vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditCoupling {
    Seeding,
    Compress,
    Disjoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub coupling: AuditCoupling,
    pub trials: usize,
    /// `None` when the coupling's preconditions fail on this configuration.
    pub mean: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub note: Option<String>,
}

/// Seeding with the closed-form law when it applies, otherwise the relaxed
/// optimum, which is valid whenever it passes the full program.
pub fn seeding_for_audit(slack: ColorSet, q: usize, delta: usize) -> Result<Seeding, CouplingError> {
    let s = slack.len();
    let law = match seeding_size_law(s, delta, q) {
        Ok(law) => law,
        Err(CouplingError::SeedingRegime(_)) if s > delta => LpInstance::new(s, delta, q).solve_relaxed_lp()?,
        Err(CouplingError::SeedingRegime(_)) => return Seeding::for_slack(slack, q, delta),
        Err(e) => return Err(e),
    };
    Seeding::new(slack, law, q, delta)
}

/// Monte Carlo estimate of `E|predicted set|` at vertex `center` with a 95%
/// normal interval.
pub fn audit_coupling_at_worst_case(
    instance: &LowerBoundInstance,
    center: usize,
    coupling: AuditCoupling,
    trials: usize,
    stream: &SeedStream,
) -> AuditReport {
    let lists = instance.center_lists(center);
    let (q, delta) = (instance.q, instance.delta);
    let sizes: Result<Vec<usize>, CouplingError> = match coupling {
        AuditCoupling::Seeding => {
            let slack = lists.iter().fold(ColorSet::empty(), |a, l| a.union(l));
            seeding_for_audit(slack, q, delta).and_then(|c| sizes_of(&c, trials, stream))
        }
        AuditCoupling::Compress => {
            let preserved = vec![true; instance.graph.n()];
            instance
                .lists
                .greedy_reference_set(&instance.graph, center, &preserved, GreedyMode::PhaseI)
                .and_then(|a| Compress::new(a, q, delta))
                .and_then(|c| sizes_of(&c, trials, stream))
        }
        AuditCoupling::Disjoint => {
            Disjoint::from_neighbor_lists(&lists, q).and_then(|c| sizes_of(&c, trials, stream))
        }
    };
    match sizes {
        Ok(sizes) => {
            let n = sizes.len() as f64;
            let mean = sizes.iter().sum::<usize>() as f64 / n;
            let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            let half = 1.96 * (var / n).sqrt();
            AuditReport {
                coupling,
                trials,
                mean: Some(mean),
                ci_low: Some(mean - half),
                ci_high: Some(mean + half),
                note: None,
            }
        }
        Err(e) => AuditReport {
            coupling,
            trials,
            mean: None,
            ci_low: None,
            ci_high: None,
            note: Some(e.to_string()),
        },
    }
}

fn sizes_of<C: LocalCoupling>(c: &C, trials: usize, stream: &SeedStream) -> Result<Vec<usize>, CouplingError> {
    (0..trials as u64)
        .map(|u| Ok(c.predict(stream, SubSeedAddress::new(1, u))?.0.len()))
        .collect()
}
