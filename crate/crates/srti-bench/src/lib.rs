//! Shared fixture builders for the criterion benches.

use srti_core::combine::{self, CombineParams, CombinedInstance};
use srti_core::seedgen::{self, CompletenessMode, SeedModes, SeedParams, TieMode};

/// Seed modes of the benchmark recipe at `p1 = 0`, `p2 = 0`.
pub fn recipe_modes() -> SeedModes {
    SeedModes {
        completeness: CompletenessMode::Complete,
        ties: TieMode::Forbid,
        symmetric: false,
    }
}

/// Builds one recipe block (seeds (8,7,6), (8,7,6), (6,5,2)) per 20 nominal
/// agents and combines them, mirroring the pipeline at `p1 = p2 = 0`.
pub fn recipe_instance(blocks: u32, rng_seed: u64) -> CombinedInstance {
    let modes = recipe_modes();
    let mut seeds = Vec::new();
    for b in 0..blocks {
        for (i, &(n, m, k)) in [(8, 7, 6), (8, 7, 6), (6, 5, 2)].iter().enumerate() {
            let params = SeedParams::new(n, m, k, modes, rng_seed + (b * 3 + i as u32) as u64);
            seeds.push(seedgen::generate_seed(&params).expect("recipe seed within budget"));
        }
    }
    let params = CombineParams::new(0.0, 0.0, combine::default_m_cap(&seeds), rng_seed);
    combine::combine(&seeds, &params).expect("recipe combine succeeds")
}
