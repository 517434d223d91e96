//! Perfect sampling of uniformly random proper q-colorings.
//!
//! The sampler runs coupling from the past over a bounding chain: each vertex
//! carries a list of colors it may hold, local grand couplings shrink these
//! lists, and once every list is a single color the block's outcome no longer
//! depends on the starting coloring. The [`oracle`] module holds the ground
//! truth used to check the sampler.

pub mod bounding;
pub mod colorset;
pub mod coupling;
pub mod engine;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod seed;

pub use colorset::ColorSet;
pub use engine::{sample, SampleOutput, Sampler, SamplerConfig};
pub use graph::Graph;
pub use seed::{SeedStream, SubSeedAddress};
