//! Addressable, replayable randomness.
//!
//! Every random draw in a run is a pure function of the master seed and an
//! address `(block, lane, update, draw)`. Blocks map to ChaCha stream ids and
//! updates to disjoint word windows inside a stream, so a composition list can
//! store only the address of each update and regenerate its draws on replay.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::colorset::ColorSet;
use crate::error::SampleError;

/// 32-bit words reserved per update address (2^15 u64 draws).
const UPDATE_WINDOW_BITS: u32 = 16;
const LANES: u64 = 4;

/// Tolerance on the total mass of categorical weights.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Independent families of draws within a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lane {
    /// Draws consumed by local coupling updates.
    Update = 0,
    /// Vertex choices of the drift schedules.
    Schedule = 1,
    /// Setup work outside any block (vertex partition, generators).
    Setup = 2,
}

/// Address of the sub-seed consumed by one update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SubSeedAddress {
    pub block: u64,
    pub update: u64,
}

impl SubSeedAddress {
    pub fn new(block: u64, update: u64) -> Self {
        Self { block, update }
    }
}

/// How permutations are drawn. `NaiveSwap` is the classic biased shuffle and
/// exists only to check that the marginal harnesses catch a broken sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PermutationMode {
    #[default]
    FisherYates,
    NaiveSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    master: u64,
    key: [u8; 32],
    permutation_mode: PermutationMode,
}

impl SeedStream {
    pub fn new(master: u64) -> Self {
        let mut state = master;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self {
            master,
            key,
            permutation_mode: PermutationMode::FisherYates,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master
    }

    /// An independent stream for the `index`-th run derived from this one.
    pub fn fork(&self, index: u64) -> Self {
        let mut state = self.master ^ 0xA076_1D64_78BD_642F;
        let salt = splitmix64(&mut state);
        let mut s = index.wrapping_add(salt);
        let child = Self::new(splitmix64(&mut s) ^ self.master.rotate_left(17));
        child.with_permutation_mode(self.permutation_mode)
    }

    pub fn with_permutation_mode(mut self, mode: PermutationMode) -> Self {
        self.permutation_mode = mode;
        self
    }

    pub fn permutation_mode(&self) -> PermutationMode {
        self.permutation_mode
    }

    /// Draw cursor positioned at the start of `(addr.block, lane, addr.update)`.
    pub fn substream(&self, lane: Lane, addr: SubSeedAddress) -> SubStream {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(addr.block.wrapping_mul(LANES) + lane as u64);
        rng.set_word_pos(u128::from(addr.update) << UPDATE_WINDOW_BITS);
        SubStream {
            rng,
            permutation_mode: self.permutation_mode,
        }
    }

    /// Draw cursor for a coupling update.
    pub fn update_stream(&self, addr: SubSeedAddress) -> SubStream {
        self.substream(Lane::Update, addr)
    }

    /// The `draw`-th unit uniform at an update address.
    pub fn unit_uniform_at(&self, addr: SubSeedAddress, draw: u64) -> f64 {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(addr.block.wrapping_mul(LANES) + Lane::Update as u64);
        rng.set_word_pos((u128::from(addr.update) << UPDATE_WINDOW_BITS) + 2 * u128::from(draw));
        unit_from_bits(rng.next_u64())
    }
}

/// Sequential draws from one address.
pub struct SubStream {
    rng: ChaCha8Rng,
    permutation_mode: PermutationMode,
}

impl SubStream {
    /// 53-bit double in `[0, 1)`.
    pub fn unit_uniform(&mut self) -> f64 {
        unit_from_bits(self.rng.next_u64())
    }

    /// Uniform index in `0..n`; `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be nonempty");
        self.rng.random_range(0..n)
    }

    pub fn uniform_in_set(&mut self, set: &ColorSet) -> Result<usize, SampleError> {
        let n = set.len();
        if n == 0 {
            return Err(SampleError::EmptySet);
        }
        let k = self.index(n);
        Ok(set.nth(k).expect("index within set size"))
    }

    /// Uniformly random ordering of the members of `set`.
    pub fn random_permutation(&mut self, set: &ColorSet) -> Vec<usize> {
        let mut items = set.to_vec();
        match self.permutation_mode {
            PermutationMode::FisherYates => items.shuffle(&mut self.rng),
            PermutationMode::NaiveSwap => {
                let n = items.len();
                for i in 0..n {
                    let j = self.rng.random_range(0..n);
                    items.swap(i, j);
                }
            }
        }
        items
    }

    pub fn categorical(&mut self, weights: &[f64]) -> Result<usize, SampleError> {
        validate_weights(weights)?;
        let dist = WeightedIndex::new(weights)
            .map_err(|e| SampleError::InvalidWeights(e.to_string()))?;
        Ok(dist.sample(&mut self.rng))
    }
}

fn validate_weights(weights: &[f64]) -> Result<(), SampleError> {
    if weights.is_empty() {
        return Err(SampleError::InvalidWeights("no weights".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(SampleError::InvalidWeights(format!("weight {w} is not a probability")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(SampleError::InvalidWeights(format!("weights sum to {total}")));
    }
    Ok(())
}

fn unit_from_bits(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
