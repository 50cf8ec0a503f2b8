//! Generation of satisfiable (n,m,k)-seed instances: an instance together
//! with a witness set of `k` pairwise-distinct stable matchings.
//!
//! The generator is rejection sampling: draw a random instance that respects
//! the requested list modes, enumerate its stable matchings with a cap of
//! `k`, and accept as soon as `k` distinct ones exist (the instance may well
//! have more). The first `k` matchings in the enumerator's deterministic
//! order become the witness set, so identical parameters always produce the
//! identical seed. Failure after the attempt budget means "not found within
//! budget", not unsatisfiability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumerate::{enumerate_stable, SmallKernel};
use crate::instance::{AgentId, Instance, PreferenceList};
use crate::matching::{Matching, MatchingError};

/// List completeness required of a seed. `Complete` corresponds to an
/// incompleteness probability of zero: every agent must list all `n-1`
/// others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CompletenessMode {
    #[default]
    Any,
    Complete,
}

/// Tie structure required of a seed. `Forbid` corresponds to a tie
/// probability of zero (all rank groups are singletons), `AllTied` to a tie
/// probability of one (each non-empty list is a single rank-1 group).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TieMode {
    #[default]
    Any,
    Forbid,
    AllTied,
}

/// The list constraints a seed must obey.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SeedModes {
    pub completeness: CompletenessMode,
    pub ties: TieMode,
    /// Require `x ∈ list(y) ⇔ y ∈ list(x)`.
    pub symmetric: bool,
}

pub const DEFAULT_ATTEMPT_BUDGET: u32 = 3_000_000;

/// Seeds are small by definition; the search kernel uses byte-sized tables.
pub const MAX_SEED_AGENTS: u32 = 255;

/// Parameters of a seed search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedParams {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub modes: SeedModes,
    pub rng_seed: u64,
    pub attempt_budget: u32,
}

impl SeedParams {
    pub fn new(n: u32, m: u32, k: u32, modes: SeedModes, rng_seed: u64) -> Self {
        SeedParams { n, m, k, modes, rng_seed, attempt_budget: DEFAULT_ATTEMPT_BUDGET }
    }

    pub fn validate(&self) -> Result<(), SeedGenError> {
        if self.n < 2 || self.n > MAX_SEED_AGENTS {
            return Err(SeedGenError::BadN(self.n));
        }
        if self.m == 0 || self.m >= self.n {
            return Err(SeedGenError::BadM { n: self.n, m: self.m });
        }
        if self.k == 0 {
            return Err(SeedGenError::BadK);
        }
        if self.modes.completeness == CompletenessMode::Complete && self.m != self.n - 1 {
            return Err(SeedGenError::CompleteNeedsFullLists { n: self.n, m: self.m });
        }
        if self.attempt_budget == 0 {
            return Err(SeedGenError::BadBudget);
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeedGenError {
    #[error("seed agent count must lie in 2..=255, got {0}")]
    BadN(u32),
    #[error("m must satisfy 0 < m < n, got m={m} n={n}")]
    BadM { n: u32, m: u32 },
    #[error("k must be at least 1")]
    BadK,
    #[error("complete lists require m = n-1, got m={m} n={n}")]
    CompleteNeedsFullLists { n: u32, m: u32 },
    #[error("attempt budget must be at least 1")]
    BadBudget,
    #[error("no satisfiable ({n},{m},{k})-seed found within {attempts} attempts")]
    AttemptsExhausted { n: u32, m: u32, k: u32, attempts: u32 },
}

/// First violated invariant found by [`validate_seed`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeedViolation {
    #[error("witness set is empty")]
    NoWitnesses,
    #[error("witness {index} is not a valid matching: {source}")]
    InvalidWitness {
        index: usize,
        #[source]
        source: MatchingError,
    },
    #[error("witness {index} is blocked by the pair ({}, {})", pair.0, pair.1)]
    UnstableWitness { index: usize, pair: (AgentId, AgentId) },
    #[error("witnesses {0} and {1} are identical")]
    DuplicateWitness(usize, usize),
    #[error("agent {agent} lists {len} agents but complete mode requires {expected}")]
    IncompleteList { agent: AgentId, len: usize, expected: usize },
    #[error("agent {agent} has tied entries but ties are forbidden")]
    ForbiddenTie { agent: AgentId },
    #[error("agent {agent} uses several ranks but all-tied mode allows only one")]
    MultipleRanks { agent: AgentId },
    #[error("agent {a} lists {b} but not the other way around, breaking symmetry")]
    AsymmetricPair { a: AgentId, b: AgentId },
}

/// A satisfiable seed: an instance plus `k = witnesses.len()` distinct
/// stable matchings, under the recorded list modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedInstance {
    instance: Instance,
    witnesses: Vec<Matching>,
    modes: SeedModes,
}

impl SeedInstance {
    /// Builds a seed and checks every invariant; see [`validate_seed`].
    pub fn new(
        instance: Instance,
        witnesses: Vec<Matching>,
        modes: SeedModes,
    ) -> Result<Self, SeedViolation> {
        let seed = SeedInstance { instance, witnesses, modes };
        validate_seed(&seed)?;
        Ok(seed)
    }

    pub(crate) fn new_unchecked(
        instance: Instance,
        witnesses: Vec<Matching>,
        modes: SeedModes,
    ) -> Self {
        SeedInstance { instance, witnesses, modes }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn witnesses(&self) -> &[Matching] {
        &self.witnesses
    }

    pub fn modes(&self) -> SeedModes {
        self.modes
    }

    pub fn n(&self) -> u32 {
        self.instance.n()
    }

    pub fn m(&self) -> u32 {
        self.instance.m()
    }

    /// Number of witnesses.
    pub fn k(&self) -> u32 {
        self.witnesses.len() as u32
    }
}

/// Searches for a satisfiable (n,m,k)-seed by rejection sampling.
/// Deterministic for fixed parameters.
///
/// Attempts are screened on a reusable counting kernel; an attempt with `k`
/// stable matchings is materialized into an `Instance` and re-enumerated
/// through the public search to extract its witness set.
pub fn generate_seed(params: &SeedParams) -> Result<SeedInstance, SeedGenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut sampler = Sampler::new(params.n as usize);
    // complete lists make any two singles block each other
    let max_singles = match params.modes.completeness {
        CompletenessMode::Complete => params.n as usize % 2,
        CompletenessMode::Any => usize::MAX,
    };
    let strict = params.modes.ties == TieMode::Forbid;
    for _ in 0..params.attempt_budget {
        sampler.sample_attempt(params, &mut rng);
        if sampler.kernel.count_capped(params.k, max_singles, strict) != params.k {
            continue;
        }
        let instance = sampler.materialize(params);
        let result = enumerate_stable(&instance, params.k as u64, None);
        debug_assert_eq!(result.count, params.k as u64);
        if result.count == params.k as u64 {
            return Ok(SeedInstance::new_unchecked(instance, result.matchings, params.modes));
        }
    }
    Err(SeedGenError::AttemptsExhausted {
        n: params.n,
        m: params.m,
        k: params.k,
        attempts: params.attempt_budget,
    })
}

/// Re-checks every seed invariant and names the first violated one:
/// witnesses are valid matchings of the instance, each is stable, all are
/// pairwise distinct, and every list obeys the recorded modes.
pub fn validate_seed(seed: &SeedInstance) -> Result<(), SeedViolation> {
    let inst = &seed.instance;
    if seed.witnesses.is_empty() {
        return Err(SeedViolation::NoWitnesses);
    }
    for (index, witness) in seed.witnesses.iter().enumerate() {
        let pairs: Vec<(AgentId, AgentId)> = witness.pairs().collect();
        let rebuilt = Matching::new(inst, &pairs)
            .map_err(|source| SeedViolation::InvalidWitness { index, source })?;
        if &rebuilt != witness {
            // only possible if the agent counts disagree
            return Err(SeedViolation::InvalidWitness {
                index,
                source: MatchingError::WrongAgentCount {
                    expected: inst.n(),
                    got: witness.n(),
                },
            });
        }
        let blocking = inst
            .blocking_pairs(witness)
            .map_err(|source| SeedViolation::InvalidWitness { index, source })?;
        if let Some(&pair) = blocking.first() {
            return Err(SeedViolation::UnstableWitness { index, pair });
        }
    }
    for i in 0..seed.witnesses.len() {
        for j in (i + 1)..seed.witnesses.len() {
            if seed.witnesses[i] == seed.witnesses[j] {
                return Err(SeedViolation::DuplicateWitness(i, j));
            }
        }
    }
    check_modes(inst, seed.modes)
}

/// Checks that every list of `inst` obeys `modes`.
pub fn check_modes(inst: &Instance, modes: SeedModes) -> Result<(), SeedViolation> {
    for agent in inst.agents() {
        let list = inst.list(agent);
        if modes.completeness == CompletenessMode::Complete {
            let expected = inst.n() as usize - 1;
            let len = list.agent_count();
            if len != expected {
                return Err(SeedViolation::IncompleteList { agent, len, expected });
            }
        }
        match modes.ties {
            TieMode::Forbid => {
                if list.groups().iter().any(|g| g.len() > 1) {
                    return Err(SeedViolation::ForbiddenTie { agent });
                }
            }
            TieMode::AllTied => {
                if list.groups().len() > 1 {
                    return Err(SeedViolation::MultipleRanks { agent });
                }
            }
            TieMode::Any => {}
        }
        if modes.symmetric {
            for other in list.agents() {
                if !inst.list(other).contains(agent) {
                    return Err(SeedViolation::AsymmetricPair { a: agent, b: other });
                }
            }
        }
    }
    Ok(())
}

/// Draws candidate instances straight into a [`SmallKernel`]'s rank table.
/// Each agent samples a list length (always `n-1` in complete mode,
/// otherwise uniform in `1..=m`), picks that many distinct partners by a
/// partial shuffle, and splits them into rank groups according to the tie
/// mode; in the unconstrained mode each subsequent partner opens a new group
/// with probability 1/2. Symmetric mode then drops every one-directional
/// entry and renormalizes ranks to stay consecutive.
struct Sampler {
    kernel: SmallKernel,
    pool: Vec<u8>,
    row: Vec<(u8, u8)>,
}

impl Sampler {
    fn new(n: usize) -> Self {
        Sampler {
            kernel: SmallKernel::new(n),
            pool: Vec::with_capacity(n),
            row: Vec::with_capacity(n),
        }
    }

    fn sample_attempt(&mut self, params: &SeedParams, rng: &mut ChaCha8Rng) {
        let n = params.n as usize;
        // complete strict lists are their own neighbor rows: everyone is
        // mutually acceptable and the sampled order is the rank order
        let direct_rows = params.modes.completeness == CompletenessMode::Complete
            && params.modes.ties == TieMode::Forbid
            && !params.modes.symmetric;
        self.kernel.clear_ranks();
        if direct_rows {
            self.kernel.begin_neighbor_fill();
        }
        for a in 0..n {
            let len = match params.modes.completeness {
                CompletenessMode::Complete => n - 1,
                CompletenessMode::Any => rng.random_range(1..=params.m as usize),
            };
            self.pool.clear();
            self.pool.extend((0..n as u8).filter(|&i| i as usize != a));
            let mut rank = 0u8;
            for i in 0..len {
                let j = rng.random_range(i..self.pool.len());
                self.pool.swap(i, j);
                let open_new = i == 0
                    || match params.modes.ties {
                        TieMode::Forbid => true,
                        TieMode::AllTied => false,
                        TieMode::Any => rng.random::<f64>() < 0.5,
                    };
                if open_new {
                    rank += 1;
                }
                self.kernel.set_rank(a, self.pool[i] as usize, rank);
            }
            if direct_rows {
                self.kernel.push_neighbor_row(a, &self.pool[..len]);
            }
        }
        if direct_rows {
            return;
        }
        if params.modes.symmetric {
            self.symmetric_repair(n);
        }
        self.kernel.build_neighbors();
    }

    /// Drops one-directional entries pairwise, then compresses each row's
    /// ranks back to consecutive values, preserving order and ties.
    fn symmetric_repair(&mut self, n: usize) {
        for x in 0..n {
            for y in (x + 1)..n {
                match (self.kernel.rank_of(x, y) > 0, self.kernel.rank_of(y, x) > 0) {
                    (true, false) => self.kernel.set_rank(x, y, 0),
                    (false, true) => self.kernel.set_rank(y, x, 0),
                    _ => {}
                }
            }
        }
        for x in 0..n {
            self.row.clear();
            for y in 0..n {
                let r = self.kernel.rank_of(x, y);
                if r > 0 {
                    self.row.push((r, y as u8));
                }
            }
            self.row.sort_unstable();
            let mut new_rank = 0u8;
            let mut last_old = 0u8;
            for &(old, y) in &self.row {
                if old != last_old {
                    new_rank += 1;
                    last_old = old;
                }
                self.kernel.set_rank(x, y as usize, new_rank);
            }
        }
    }

    /// Builds the real `Instance` for an accepted attempt.
    fn materialize(&self, params: &SeedParams) -> Instance {
        let n = params.n as usize;
        let lists = (0..n)
            .map(|a| {
                let max_rank = (0..n).map(|y| self.kernel.rank_of(a, y)).max().unwrap_or(0);
                let mut groups: Vec<Vec<AgentId>> = vec![Vec::new(); max_rank as usize];
                for y in 0..n {
                    let r = self.kernel.rank_of(a, y);
                    if r > 0 {
                        groups[r as usize - 1].push(AgentId::from_index(y));
                    }
                }
                PreferenceList::from_groups_unchecked(groups)
            })
            .collect();
        Instance::new_unchecked(params.n, params.m, lists)
    }
}
