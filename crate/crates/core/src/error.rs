use thiserror::Error;

use crate::engine::Stage;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("no simple {degree}-regular graph on {n} vertices found after {attempts} restarts")]
    GenerationFailed {
        n: usize,
        degree: usize,
        attempts: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("cannot draw from an empty color set")]
    EmptySet,
    #[error("invalid categorical weights: {0}")]
    InvalidWeights(String),
}

/// A local coupling could not be built or applied.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error("palette of {q} colors is too small for max degree {delta} (need q >= {needed})")]
    PaletteTooSmall { q: usize, delta: usize, needed: usize },
    #[error("reference set must have exactly {expected} colors, got {got}")]
    ReferenceSetSize { expected: usize, got: usize },
    #[error("seeding size law outside its regime: {0}")]
    SeedingRegime(String),
    #[error("slack set covers the whole palette ({slack} of {q} colors); no free color remains")]
    NoFreeColor { slack: usize, q: usize },
    #[error("size law violates coupling constraints at rows {rows:?}")]
    LpInfeasible { rows: Vec<usize> },
    #[error("relaxed program infeasible: no size index in 2..={delta} meets the budget")]
    RelaxedInfeasible { delta: usize },
    #[error("disjoint coupling infeasible: {0}")]
    DisjointInfeasible(String),
    #[error("neighbor {vertex} has a bounding list of size {size}; at most 2 allowed")]
    NeighborListTooLarge { vertex: usize, size: usize },
    #[error("blocked set {0} is not realizable for this coupling")]
    UnrealizableBlockedSet(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("block {block} aborted during {stage} at vertex {vertex}: {source}")]
    BlockAborted {
        block: u64,
        stage: Stage,
        vertex: usize,
        #[source]
        source: CouplingError,
    },
    #[error("no coalescence within {blocks} blocks ({updates} updates){}", last_abort.as_ref().map(|a| format!("; last abort: {a}")).unwrap_or_default())]
    NoCoalescence {
        blocks: u64,
        updates: u64,
        last_abort: Option<String>,
    },
    #[error("replay of block {block} failed: {source}")]
    Replay {
        block: u64,
        #[source]
        source: CouplingError,
    },
    #[error("coloring is improper on edge ({0}, {1})")]
    ImproperColoring(usize, usize),
    #[error("coloring has {got} entries for a graph on {expected} vertices")]
    ColoringLength { expected: usize, got: usize },
    #[error("q = {q} is below the coalescence threshold {threshold:.3}; explicit override required")]
    BelowThreshold { q: usize, threshold: f64 },
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("vertex partition exceeded its resample budget of {budget}")]
    PartitionBudget { budget: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("enumeration would visit about {estimate:.3e} partial colorings (limit {limit:.0e})")]
    EnumerationBudget { estimate: f64, limit: f64 },
    #[error("sample {index} is not in the universe of proper colorings")]
    SampleOutsideUniverse { index: usize },
    #[error("worst-case construction: {0}")]
    WorstCase(String),
    #[error("empty sample")]
    EmptySample,
}
