//! Fixed workloads shared by the benchmarks.

use qpreserve::generators::{random_block_spec, random_density, random_stochastic_channel};
use qpreserve::{synthesize_pair, DensityMatrix, KrausChannel, SynthesizedPair};

/// Synthesized preserving pair on `C^n` with a random block layout.
pub fn pair(n: usize, seed: u64) -> SynthesizedPair {
    synthesize_pair(&random_block_spec(n, seed), seed).expect("random specs are valid")
}

/// Stochastic channel with a two-dimensional environment.
pub fn stochastic(n: usize, seed: u64) -> KrausChannel {
    random_stochastic_channel(n, 2, seed)
}

pub fn full_rank_state(n: usize, seed: u64) -> DensityMatrix {
    random_density(n, n, seed).expect("rank equals dimension")
}
