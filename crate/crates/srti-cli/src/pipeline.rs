//! The benchmark recipe: per 20-agent block, three seeds with
//! (n, m, k) = (8,7,6), (8,7,6), (6,5,2), then one combine call over all
//! blocks' seeds. The seeds inherit their list modes from the combine
//! probabilities — complete lists when `p1 = 0`, no ties when `p2 = 0`, all
//! tied when `p2 = 1` — and every block certifies a factor of 72 in the
//! lower bound.

use std::path::PathBuf;
use std::sync::atomic::{AtomicU32, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srti_core::combine::{self, CombineError, CombineParams, CombinedInstance};
use srti_core::seedgen::{
    self, CompletenessMode, SeedGenError, SeedInstance, SeedModes, SeedParams, TieMode,
};
use thiserror::Error;

use crate::files::{self, FileError};

/// Per-block seed parameters `(n, m, k)` of the recipe.
pub const SEED_RECIPE: [(u32, u32, u32); 3] = [(8, 7, 6), (8, 7, 6), (6, 5, 2)];

/// Certified lower bound contributed by one 20-agent block: 6 * 6 * 2.
pub const BLOCK_LOWER_BOUND: u128 = 72;

#[derive(Debug, Clone)]
pub struct PipelineSpec {
    /// Nominal agent count; must be a positive multiple of 20. Each block of
    /// 20 nominal agents contributes the three recipe seeds.
    pub n_total: u32,
    pub p1: f64,
    pub p2: f64,
    /// Number of instances to generate.
    pub instances: u32,
    pub rng_seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads across instances.
    pub jobs: usize,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("n_total must be a positive multiple of 20, got {0}")]
    BadNTotal(u32),
    #[error("instances must be at least 1")]
    NoInstances,
    #[error(transparent)]
    Seed(#[from] SeedGenError),
    #[error(transparent)]
    Combine(#[from] CombineError),
    #[error(transparent)]
    File(#[from] FileError),
}

/// Summary of one generated instance.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub path: PathBuf,
    pub n: u32,
    pub lower_bound: u128,
}

/// Seed list modes implied by the combine probabilities.
pub fn modes_for(p1: f64, p2: f64) -> SeedModes {
    SeedModes {
        completeness: if p1 == 0.0 {
            CompletenessMode::Complete
        } else {
            CompletenessMode::Any
        },
        ties: if p2 == 0.0 {
            TieMode::Forbid
        } else if p2 == 1.0 {
            TieMode::AllTied
        } else {
            TieMode::Any
        },
        symmetric: false,
    }
}

/// Generates (without writing) the combined instance with the given index.
/// Deterministic in `(spec, index)`: the per-instance stream is seeded with
/// `rng_seed + index` and dealt out to the seed searches and the combine in
/// a fixed order.
pub fn build_instance(spec: &PipelineSpec, index: u32) -> Result<CombinedInstance, PipelineError> {
    let blocks = spec.n_total / 20;
    let modes = modes_for(spec.p1, spec.p2);
    let mut master = ChaCha8Rng::seed_from_u64(spec.rng_seed.wrapping_add(index as u64));
    let mut seeds: Vec<SeedInstance> = Vec::with_capacity(blocks as usize * SEED_RECIPE.len());
    for _ in 0..blocks {
        for &(n, m, k) in &SEED_RECIPE {
            let params = SeedParams::new(n, m, k, modes, master.random());
            seeds.push(seedgen::generate_seed(&params)?);
        }
    }
    let params = CombineParams::new(spec.p1, spec.p2, combine::default_m_cap(&seeds), master.random());
    Ok(combine::combine(&seeds, &params)?)
}

/// Runs the whole pipeline and writes `instance_<i>.srti` plus sidecars into
/// the output directory.
pub fn run_pipeline(spec: &PipelineSpec) -> Result<Vec<PipelineOutcome>, PipelineError> {
    if spec.n_total == 0 || spec.n_total % 20 != 0 {
        return Err(PipelineError::BadNTotal(spec.n_total));
    }
    if spec.instances == 0 {
        return Err(PipelineError::NoInstances);
    }
    std::fs::create_dir_all(&spec.out_dir).map_err(|source| {
        PipelineError::File(FileError::Io { path: spec.out_dir.clone(), source })
    })?;
    let jobs = spec.jobs.max(1).min(spec.instances as usize);
    let next = AtomicU32::new(0);
    let mut slots: Vec<Option<Result<PipelineOutcome, PipelineError>>> =
        (0..spec.instances).map(|_| None).collect();
    if jobs == 1 {
        for (index, slot) in slots.iter_mut().enumerate() {
            *slot = Some(generate_and_write(spec, index as u32));
        }
    } else {
        let results = std::sync::Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let index = next.fetch_add(1, Ordering::Relaxed);
                    if index >= spec.instances {
                        break;
                    }
                    let outcome = generate_and_write(spec, index);
                    results.lock().unwrap()[index as usize] = Some(outcome);
                });
            }
        });
    }
    slots
        .into_iter()
        .map(|slot| slot.expect("every instance index was processed"))
        .collect()
}

fn generate_and_write(spec: &PipelineSpec, index: u32) -> Result<PipelineOutcome, PipelineError> {
    let combined = build_instance(spec, index)?;
    let path = spec.out_dir.join(format!("instance_{index:03}.srti"));
    files::write_combined(&path, &combined)?;
    Ok(PipelineOutcome {
        path,
        n: combined.instance().n(),
        lower_bound: combined.lower_bound(),
    })
}
