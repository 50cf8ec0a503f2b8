//! Erdős–Rényi-style random instance generator, the usual baseline for
//! head-to-head comparisons: every unordered pair of agents becomes
//! mutually acceptable independently with probability `p`, and each agent
//! ranks its acceptable partners in a uniformly random strict order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{AgentId, Instance, PreferenceList};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErParams {
    pub n: u32,
    /// Probability that a pair is mutually acceptable.
    pub p: f64,
    pub rng_seed: u64,
}

impl ErParams {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.n < 2 {
            return Err(BaselineError::BadN(self.n));
        }
        if !(0.0..=1.0).contains(&self.p) || self.p.is_nan() {
            return Err(BaselineError::BadProbability(self.p));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("n must be at least 2, got {0}")]
    BadN(u32),
    #[error("acceptability probability must lie in [0,1], got {0}")]
    BadProbability(f64),
}

/// Draws one instance. Strict lists (no ties), `m = n - 1`, symmetric
/// acceptability by construction; deterministic for a fixed seed.
pub fn generate_er(params: &ErParams) -> Result<Instance, BaselineError> {
    params.validate()?;
    let n = params.n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut partners: Vec<Vec<AgentId>> = vec![Vec::new(); n];
    for x in 0..n {
        for y in (x + 1)..n {
            if rng.random::<f64>() < params.p {
                partners[x].push(AgentId::from_index(y));
                partners[y].push(AgentId::from_index(x));
            }
        }
    }
    let lists = partners
        .into_iter()
        .map(|mut acceptable| {
            acceptable.shuffle(&mut rng);
            let groups = acceptable.into_iter().map(|a| vec![a]).collect();
            PreferenceList::new(groups).expect("strict singleton groups are valid")
        })
        .collect();
    Ok(Instance::new(params.n, params.n - 1, lists).expect("generator respects invariants"))
}
