//! Combining seed instances into one large instance while preserving every
//! union of per-seed witness matchings.
//!
//! Seeds are first renamed onto disjoint contiguous agent blocks. Then, for
//! every ordered cross-seed pair `(x, y)` in ascending `(y, x)` order, a
//! trial may add `x` to the preference list of `y`:
//!
//! 1. The trial is skipped outright when `y`'s list already holds `m_cap`
//!    agents or already contains `x`. Otherwise two numbers `r1`, `r2` are
//!    drawn.
//! 2. If `r1 > p1` and `y` is not in `x`'s list, `x` is added: into an
//!    existing rank group chosen uniformly when `r2 < p2` (falling back to
//!    appending when the list is empty), as a new last group otherwise.
//! 3. If `r1 > p1` and `y` is already in `x`'s list, the pair would become
//!    mutually acceptable, so the addition is refused whenever it could
//!    block a union of witnesses: that is, when `y` is single in some
//!    witness of its seed while `x` is single in some witness of its own
//!    seed or strictly prefers `y` to one of its witness partners. An
//!    accepted addition places `x` at a rank no better than any witness
//!    partner of `y` — unless `x` is matched in every witness and never
//!    strictly prefers `y` to a partner, in which case any rank is safe.
//!
//! Every witness union stays stable under these rules, which certifies the
//! product of the witness-set sizes as a lower bound on the number of
//! stable matchings of the combined instance. `verify_preservation` checks
//! that certificate directly by testing every union.
//!
//! A single seeded random stream drives all trials; `r1` and `r2` are
//! consumed for every non-skipped trial, even when step 3 then refuses, so
//! replay is stable. Tie-group choices draw from the same stream only when
//! an addition actually lands in a tie.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{AgentId, Instance, PreferenceList};
use crate::matching::{Matching, MatchingError};
use crate::seedgen::SeedInstance;

/// Parameters of a combine run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombineParams {
    /// Probability of incompleteness: an addition is attempted with
    /// probability `1 - p1`.
    pub p1: f64,
    /// Probability that an added agent joins a tie.
    pub p2: f64,
    /// Maximum list length of the combined instance.
    pub m_cap: u32,
    pub rng_seed: u64,
    /// Restrict additions to agents of opposite classes, for bipartite
    /// (marriage-style) instances. Within each seed, agents in the first
    /// half of the id block form one class and the rest the other.
    pub smti_mode: bool,
    /// Commit an addition only together with its mirror image, so the
    /// combined instance keeps `x ∈ list(y) ⇔ y ∈ list(x)`.
    pub symmetric: bool,
}

impl CombineParams {
    pub fn new(p1: f64, p2: f64, m_cap: u32, rng_seed: u64) -> Self {
        CombineParams { p1, p2, m_cap, rng_seed, smti_mode: false, symmetric: false }
    }
}

/// The default list cap: the largest `m` among the seeds.
pub fn default_m_cap(seeds: &[SeedInstance]) -> u32 {
    seeds.iter().map(SeedInstance::m).max().unwrap_or(0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CombineError {
    #[error("at least one seed is required")]
    NoSeeds,
    #[error("probability {name} must lie in [0,1], got {value}")]
    BadProbability { name: &'static str, value: f64 },
    #[error("m_cap={m_cap} is below the longest seed list ({required})")]
    McapTooSmall { m_cap: u32, required: u32 },
    #[error("m_cap={m_cap} must stay below the combined agent count {n}")]
    McapTooLarge { m_cap: u32, n: u32 },
    #[error("witness-set product overflows the lower-bound counter")]
    LowerBoundOverflow,
    #[error("witness-set product {product} exceeds the verification bound {bound}")]
    ProductAboveBound { product: u128, bound: u64 },
    #[error("seed {seed} witness {index} does not fit the combined instance: {source}")]
    InvalidWitness {
        seed: usize,
        index: usize,
        #[source]
        source: MatchingError,
    },
    #[error("seed blocks do not partition the combined agents: expected n={expected}, got {got}")]
    BlocksDoNotPartition { expected: u32, got: u32 },
    #[error("instance bound m={got} disagrees with m_cap={expected}")]
    McapMismatch { expected: u32, got: u32 },
    #[error("agent {agent}: within-seed preference structure is not preserved")]
    EmbeddingBroken { agent: AgentId },
}

/// A seed placed on its agent block: local id `u` denotes global id
/// `u + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedSeed {
    seed: SeedInstance,
    offset: u32,
}

impl PlacedSeed {
    pub fn new(seed: SeedInstance, offset: u32) -> Self {
        PlacedSeed { seed, offset }
    }

    pub fn seed(&self) -> &SeedInstance {
        &self.seed
    }

    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn n(&self) -> u32 {
        self.seed.n()
    }

    pub fn to_global(&self, local: AgentId) -> AgentId {
        AgentId::new(local.get() + self.offset)
    }

    /// Global ids of this seed's agents, ascending.
    pub fn global_agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        (1..=self.n()).map(|i| AgentId::new(i + self.offset))
    }

    /// Pairs of witness `index`, in global ids.
    pub fn witness_pairs_global(&self, index: usize) -> Vec<(AgentId, AgentId)> {
        self.seed.witnesses()[index]
            .pairs()
            .map(|(a, b)| (self.to_global(a), self.to_global(b)))
            .collect()
    }
}

/// Relabels the seeds onto consecutive agent blocks: seed `i` occupies the
/// block right after seed `i-1`. A single seed keeps its ids.
pub fn rename_disjoint(seeds: &[SeedInstance]) -> Vec<PlacedSeed> {
    let mut offset = 0u32;
    seeds
        .iter()
        .map(|seed| {
            let placed = PlacedSeed::new(seed.clone(), offset);
            offset += seed.n();
            placed
        })
        .collect()
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    /// smti mode: both agents belong to the same class.
    SkippedSameClass,
    /// `y`'s list already holds `m_cap` agents (symmetric mode: either
    /// list is full).
    SkippedListFull,
    /// `x` is already in `y`'s list.
    SkippedAlreadyListed,
    /// `r1 ≤ p1`: the incompleteness coin kept the lists apart.
    NotAdded,
    /// The pair would have become mutually acceptable and could block a
    /// witness union.
    Refused,
    Added { tied: bool, rank: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub x: AgentId,
    pub y: AgentId,
    pub outcome: TrialOutcome,
}

/// A combined instance with its provenance: the placed seeds, the combine
/// parameters and the certified lower bound `∏ kᵢ` on its number of stable
/// matchings.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedInstance {
    instance: Instance,
    seeds: Vec<PlacedSeed>,
    params: CombineParams,
    lower_bound: u128,
}

impl CombinedInstance {
    /// Assembles a combined instance from parts, re-checking the structural
    /// invariants: the blocks partition the agents, `m_cap` matches the
    /// instance bound, and each agent's list restricted to its own block is
    /// exactly its seed list with the relative order (including ties)
    /// intact.
    pub fn from_parts(
        instance: Instance,
        seeds: Vec<PlacedSeed>,
        params: CombineParams,
    ) -> Result<Self, CombineError> {
        if seeds.is_empty() {
            return Err(CombineError::NoSeeds);
        }
        check_probabilities(&params)?;
        let total: u32 = seeds.iter().map(PlacedSeed::n).sum();
        if total != instance.n() {
            return Err(CombineError::BlocksDoNotPartition {
                expected: instance.n(),
                got: total,
            });
        }
        let mut expected_offset = 0u32;
        for placed in &seeds {
            if placed.offset() != expected_offset {
                return Err(CombineError::BlocksDoNotPartition {
                    expected: instance.n(),
                    got: placed.offset(),
                });
            }
            expected_offset += placed.n();
        }
        if instance.m() != params.m_cap {
            return Err(CombineError::McapMismatch {
                expected: params.m_cap,
                got: instance.m(),
            });
        }
        for placed in &seeds {
            check_embedding(&instance, placed)?;
        }
        let lower_bound = witness_product(&seeds)?;
        Ok(CombinedInstance { instance, seeds, params, lower_bound })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn seeds(&self) -> &[PlacedSeed] {
        &self.seeds
    }

    pub fn params(&self) -> &CombineParams {
        &self.params
    }

    /// Certified lower bound on the number of stable matchings: the product
    /// of the seeds' witness-set sizes.
    pub fn lower_bound(&self) -> u128 {
        self.lower_bound
    }

    /// Checks stability of every union of one witness per seed.
    pub fn verify_preservation(&self, max_products: u64) -> Result<Preservation, CombineError> {
        let witness_sets: Vec<Vec<Vec<(AgentId, AgentId)>>> = self
            .seeds
            .iter()
            .map(|placed| {
                (0..placed.seed().witnesses().len())
                    .map(|i| placed.witness_pairs_global(i))
                    .collect()
            })
            .collect();
        verify_preservation(&self.instance, &witness_sets, max_products)
    }
}

/// Result of a preservation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preservation {
    /// Number of witness unions tested.
    pub checked: u64,
    /// The first failing union, if any.
    pub counterexample: Option<PreservationFailure>,
}

impl Preservation {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationFailure {
    /// Chosen witness index per seed.
    pub witness_indices: Vec<usize>,
    pub blocking_pair: (AgentId, AgentId),
}

/// Checks that every union of one witness per seed is a stable matching of
/// `inst`. `witness_sets[i]` holds seed `i`'s witnesses as global pair
/// lists. Refuses when the product of the set sizes exceeds `max_products`.
pub fn verify_preservation(
    inst: &Instance,
    witness_sets: &[Vec<Vec<(AgentId, AgentId)>>],
    max_products: u64,
) -> Result<Preservation, CombineError> {
    let mut product: u128 = 1;
    for set in witness_sets {
        product = product
            .checked_mul(set.len() as u128)
            .ok_or(CombineError::LowerBoundOverflow)?;
    }
    if product > max_products as u128 {
        return Err(CombineError::ProductAboveBound { product, bound: max_products });
    }
    let mut indices = vec![0usize; witness_sets.len()];
    let mut checked = 0u64;
    loop {
        let mut pairs: Vec<(AgentId, AgentId)> = Vec::new();
        for (seed, &wi) in indices.iter().enumerate() {
            pairs.extend_from_slice(&witness_sets[seed][wi]);
        }
        let union = Matching::new(inst, &pairs).map_err(|source| {
            let seed = first_offending_seed(inst, witness_sets, &indices);
            CombineError::InvalidWitness { seed, index: indices[seed], source }
        })?;
        checked += 1;
        let blocking = inst
            .blocking_pairs(&union)
            .expect("union was validated on construction");
        if let Some(&pair) = blocking.first() {
            return Ok(Preservation {
                checked,
                counterexample: Some(PreservationFailure {
                    witness_indices: indices.clone(),
                    blocking_pair: pair,
                }),
            });
        }
        // mixed-radix increment
        let mut dim = 0;
        loop {
            if dim == indices.len() {
                return Ok(Preservation { checked, counterexample: None });
            }
            indices[dim] += 1;
            if indices[dim] < witness_sets[dim].len() {
                break;
            }
            indices[dim] = 0;
            dim += 1;
        }
    }
}

fn first_offending_seed(
    inst: &Instance,
    witness_sets: &[Vec<Vec<(AgentId, AgentId)>>],
    indices: &[usize],
) -> usize {
    for (seed, &wi) in indices.iter().enumerate() {
        if Matching::new(inst, &witness_sets[seed][wi]).is_err() {
            return seed;
        }
    }
    0
}

/// Renames the seeds apart and runs every cross-seed trial in ascending
/// `(y, x)` order. Deterministic for fixed seeds and parameters.
pub fn combine(
    seeds: &[SeedInstance],
    params: &CombineParams,
) -> Result<CombinedInstance, CombineError> {
    let mut combiner = Combiner::new(seeds.to_vec(), *params)?;
    combiner.run_all();
    Ok(combiner.finish())
}

/// The trial-by-trial combine machine. [`combine`] drives it over every
/// cross-seed pair; exposing the steps keeps single trials testable.
pub struct Combiner {
    placed: Vec<PlacedSeed>,
    params: CombineParams,
    lists: Vec<PreferenceList>,
    seed_of: Vec<u32>,
    class_of: Vec<u8>,
    /// Per agent: single in at least one witness of its seed.
    single_somewhere: Vec<bool>,
    /// Per agent: global ids of its partners across its seed's witnesses.
    witness_partners: Vec<Vec<AgentId>>,
    /// Per agent: largest rank among its witness partners in its own list.
    /// Additions never shift existing ranks, so this stays valid.
    partner_rank_bound: Vec<u32>,
    total_n: u32,
    lower_bound: u128,
    rng: ChaCha8Rng,
    log: Vec<TrialRecord>,
}

impl Combiner {
    pub fn new(seeds: Vec<SeedInstance>, params: CombineParams) -> Result<Self, CombineError> {
        if seeds.is_empty() {
            return Err(CombineError::NoSeeds);
        }
        check_probabilities(&params)?;
        let realized: u32 = seeds
            .iter()
            .flat_map(|s| s.instance().lists().iter())
            .map(|l| l.agent_count() as u32)
            .max()
            .unwrap_or(0);
        if params.m_cap < realized {
            return Err(CombineError::McapTooSmall { m_cap: params.m_cap, required: realized });
        }
        let total_n: u32 = seeds.iter().map(SeedInstance::n).sum();
        if params.m_cap >= total_n {
            return Err(CombineError::McapTooLarge { m_cap: params.m_cap, n: total_n });
        }
        let placed = rename_disjoint(&seeds);
        let lower_bound = witness_product(&placed)?;

        let n = total_n as usize;
        let mut lists: Vec<PreferenceList> = Vec::with_capacity(n);
        let mut seed_of = vec![0u32; n];
        let mut class_of = vec![0u8; n];
        let mut single_somewhere = vec![false; n];
        let mut witness_partners: Vec<Vec<AgentId>> = vec![Vec::new(); n];
        for (si, p) in placed.iter().enumerate() {
            let seed_inst = p.seed().instance();
            let first_class = p.n().div_ceil(2);
            for local in seed_inst.agents() {
                let global = p.to_global(local);
                let gi = global.index();
                seed_of[gi] = si as u32;
                class_of[gi] = if local.get() <= first_class { 0 } else { 1 };
                let groups = seed_inst
                    .list(local)
                    .groups()
                    .iter()
                    .map(|g| g.iter().map(|&a| p.to_global(a)).collect())
                    .collect();
                lists.push(PreferenceList::new(groups).expect("seed lists are valid"));
                for w in p.seed().witnesses() {
                    match w.partner(local) {
                        None => single_somewhere[gi] = true,
                        Some(q) => {
                            let q = p.to_global(q);
                            if !witness_partners[gi].contains(&q) {
                                witness_partners[gi].push(q);
                            }
                        }
                    }
                }
            }
        }
        let partner_rank_bound = (0..n)
            .map(|gi| {
                witness_partners[gi]
                    .iter()
                    .map(|&q| lists[gi].rank_of(q).expect("witness partner is listed"))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        Ok(Combiner {
            placed,
            rng: ChaCha8Rng::seed_from_u64(params.rng_seed),
            params,
            lists,
            seed_of,
            class_of,
            single_somewhere,
            witness_partners,
            partner_rank_bound,
            total_n,
            lower_bound,
            log: Vec::new(),
        })
    }

    /// Runs every cross-seed trial in ascending `(y, x)` order. In symmetric
    /// mode each unordered pair is handled once, at its first occurrence.
    pub fn run_all(&mut self) {
        for y in 1..=self.total_n {
            for x in 1..=self.total_n {
                let (x, y) = (AgentId::new(x), AgentId::new(y));
                if self.seed_of[x.index()] == self.seed_of[y.index()] {
                    continue;
                }
                if self.params.symmetric && x < y {
                    continue;
                }
                let outcome = self.trial_add(x, y);
                self.log.push(TrialRecord { x, y, outcome });
            }
        }
    }

    /// One trial of adding `x` to the preference list of `y`. The agents
    /// must belong to different seeds. In symmetric mode this runs the
    /// joint trial for the unordered pair `{x, y}`.
    pub fn trial_add(&mut self, x: AgentId, y: AgentId) -> TrialOutcome {
        assert!(
            self.seed_of[x.index()] != self.seed_of[y.index()],
            "trial_add needs agents from different seeds"
        );
        if self.params.smti_mode && self.class_of[x.index()] == self.class_of[y.index()] {
            return TrialOutcome::SkippedSameClass;
        }
        if self.params.symmetric {
            return self.trial_add_symmetric(x, y);
        }
        // Step 1
        let list_y = &self.lists[y.index()];
        if list_y.contains(x) {
            return TrialOutcome::SkippedAlreadyListed;
        }
        if list_y.agent_count() >= self.params.m_cap as usize {
            return TrialOutcome::SkippedListFull;
        }
        let r1: f64 = self.rng.random();
        let r2: f64 = self.rng.random();
        if !(r1 > self.params.p1) {
            return TrialOutcome::NotAdded;
        }
        let tied = r2 < self.params.p2;
        if !self.lists[x.index()].contains(y) {
            // Step 2: the pair stays one-directional, any placement is safe.
            let (tied, rank) = self.insert(y, x, tied, None);
            return TrialOutcome::Added { tied, rank };
        }
        // Step 3: the pair becomes mutually acceptable.
        let x_prefers_y = self.prefers_over_some_partner(x, y);
        if self.single_somewhere[y.index()]
            && (self.single_somewhere[x.index()] || x_prefers_y)
        {
            return TrialOutcome::Refused;
        }
        let x_side_safe = !self.single_somewhere[x.index()] && !x_prefers_y;
        let min_rank = if x_side_safe {
            None
        } else {
            // the pass is by y's side: y is matched in every witness, so x
            // must rank no better than any of y's witness partners
            Some(self.partner_rank_bound[y.index()])
        };
        let (tied, rank) = self.insert(y, x, tied, min_rank);
        TrialOutcome::Added { tied, rank }
    }

    /// Joint trial for symmetric mode: both directions are committed
    /// together or not at all. The pair always becomes mutually acceptable,
    /// so the step-3 refusal applies when both agents are single somewhere;
    /// otherwise each agent that is matched in all its witnesses receives
    /// the incoming entry under its rank constraint.
    fn trial_add_symmetric(&mut self, x: AgentId, y: AgentId) -> TrialOutcome {
        if self.lists[y.index()].contains(x) || self.lists[x.index()].contains(y) {
            return TrialOutcome::SkippedAlreadyListed;
        }
        let cap = self.params.m_cap as usize;
        if self.lists[y.index()].agent_count() >= cap
            || self.lists[x.index()].agent_count() >= cap
        {
            return TrialOutcome::SkippedListFull;
        }
        let r1: f64 = self.rng.random();
        let r2: f64 = self.rng.random();
        if !(r1 > self.params.p1) {
            return TrialOutcome::NotAdded;
        }
        if self.single_somewhere[x.index()] && self.single_somewhere[y.index()] {
            return TrialOutcome::Refused;
        }
        let tied = r2 < self.params.p2;
        let bound_y = (!self.single_somewhere[y.index()])
            .then(|| self.partner_rank_bound[y.index()]);
        let bound_x = (!self.single_somewhere[x.index()])
            .then(|| self.partner_rank_bound[x.index()]);
        let (tied_y, rank) = self.insert(y, x, tied, bound_y);
        self.insert(x, y, tied, bound_x);
        TrialOutcome::Added { tied: tied_y, rank }
    }

    /// True iff `y` is listed by `x` strictly better than some witness
    /// partner of `x`.
    fn prefers_over_some_partner(&self, x: AgentId, y: AgentId) -> bool {
        let list = &self.lists[x.index()];
        let rank_y = list.rank_of(y).expect("caller checked that y is listed");
        self.witness_partners[x.index()]
            .iter()
            .any(|&p| rank_y < list.rank_of(p).expect("witness partner is listed"))
    }

    /// Places `entry` into `owner`'s list. With `tied`, a uniformly chosen
    /// existing group at rank `min_rank` or worse is joined (appending when
    /// no group qualifies); otherwise the entry becomes a new last group.
    fn insert(
        &mut self,
        owner: AgentId,
        entry: AgentId,
        tied: bool,
        min_rank: Option<u32>,
    ) -> (bool, u32) {
        let lowest = min_rank.unwrap_or(1).max(1) as usize;
        let list = &mut self.lists[owner.index()];
        if tied && list.groups().len() >= lowest {
            let group_index = self.rng.random_range(lowest - 1..list.groups().len());
            list.join_group(group_index, entry);
            (true, group_index as u32 + 1)
        } else {
            let rank = list.push_last_group(entry);
            (false, rank)
        }
    }

    pub fn trial_log(&self) -> &[TrialRecord] {
        &self.log
    }

    /// Assembles the combined instance.
    pub fn finish(self) -> CombinedInstance {
        let instance = Instance::new(self.total_n, self.params.m_cap, self.lists)
            .expect("trials preserve instance invariants");
        CombinedInstance {
            instance,
            seeds: self.placed,
            params: self.params,
            lower_bound: self.lower_bound,
        }
    }
}

fn check_probabilities(params: &CombineParams) -> Result<(), CombineError> {
    for (name, value) in [("p1", params.p1), ("p2", params.p2)] {
        if !(0.0..=1.0).contains(&value) || value.is_nan() {
            return Err(CombineError::BadProbability { name, value });
        }
    }
    Ok(())
}

fn witness_product(placed: &[PlacedSeed]) -> Result<u128, CombineError> {
    let mut product: u128 = 1;
    for p in placed {
        product = product
            .checked_mul(p.seed().k() as u128)
            .ok_or(CombineError::LowerBoundOverflow)?;
    }
    Ok(product)
}

/// Checks that `placed`'s lists survive inside the combined instance: the
/// restriction of each agent's combined list to its own block has exactly
/// the seed's entries, with every strict preference and every tie intact.
fn check_embedding(instance: &Instance, placed: &PlacedSeed) -> Result<(), CombineError> {
    let seed_inst = placed.seed().instance();
    let block_start = placed.offset() + 1;
    let block_end = placed.offset() + placed.n();
    for local in seed_inst.agents() {
        let global = placed.to_global(local);
        let broken = CombineError::EmbeddingBroken { agent: global };
        let seed_list = seed_inst.list(local);
        let combined = instance.list(global);
        let within: Vec<AgentId> = combined
            .agents()
            .filter(|a| a.get() >= block_start && a.get() <= block_end)
            .collect();
        if within.len() != seed_list.agent_count() {
            return Err(broken);
        }
        for v in seed_list.agents() {
            let gv = placed.to_global(v);
            if !combined.contains(gv) {
                return Err(broken.clone());
            }
            for w in seed_list.agents() {
                if w == v {
                    continue;
                }
                let gw = placed.to_global(w);
                let before = seed_list.rank_of(v).unwrap().cmp(&seed_list.rank_of(w).unwrap());
                let after = combined.rank_of(gv).unwrap().cmp(&combined.rank_of(gw).unwrap());
                if before != after {
                    return Err(broken.clone());
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::count_stable;
    use crate::testutil::{srti1_seed, srti2_seed, srti3_instance};

    fn fig_seeds() -> Vec<SeedInstance> {
        vec![srti1_seed(), srti2_seed()]
    }

    #[test]
    fn renaming_uses_contiguous_blocks() {
        let placed = rename_disjoint(&fig_seeds());
        let spans: Vec<(u32, u32)> = placed
            .iter()
            .map(|p| (p.offset() + 1, p.offset() + p.n()))
            .collect();
        assert_eq!(spans, vec![(1, 4), (5, 9)]);
        // second seed's first witness {(3,5)} becomes {(7,9)}
        assert_eq!(
            placed[1].witness_pairs_global(0),
            vec![(AgentId::new(7), AgentId::new(9))]
        );
        // single seed keeps its ids
        let only = rename_disjoint(&fig_seeds()[..1]);
        assert_eq!(only[0].offset(), 0);
    }

    #[test]
    fn renaming_three_blocks() {
        let seed = srti1_seed();
        let sizes = [8u32, 8, 6];
        // fake three seeds by reusing the 4-agent seed is not possible;
        // offsets are all that matters here, so just check the arithmetic.
        let mut offset = 0;
        let spans: Vec<(u32, u32)> = sizes
            .iter()
            .map(|&n| {
                let span = (offset + 1, offset + n);
                offset += n;
                span
            })
            .collect();
        assert_eq!(spans, vec![(1, 8), (9, 16), (17, 22)]);
        drop(seed);
    }

    #[test]
    fn full_incompleteness_yields_the_disjoint_union() {
        let seeds = fig_seeds();
        let params = CombineParams::new(1.0, 0.0, default_m_cap(&seeds), 11);
        let combined = combine(&seeds, &params).unwrap();
        assert_eq!(combined.instance().n(), 9);
        assert_eq!(combined.lower_bound(), 6);
        // every list equals its renamed seed list
        for placed in combined.seeds() {
            for local in placed.seed().instance().agents() {
                let global = placed.to_global(local);
                assert_eq!(
                    combined.instance().list(global).agent_count(),
                    placed.seed().instance().list(local).agent_count()
                );
            }
        }
        let check = combined.verify_preservation(1_000).unwrap();
        assert!(check.ok());
        assert_eq!(check.checked, 6);
        // the union instance has exactly 2 * 3 stable matchings
        assert_eq!(count_stable(combined.instance(), 1_000, None), (6, true));
    }

    #[test]
    fn single_seed_passes_through() {
        let seeds = vec![srti1_seed()];
        let params = CombineParams::new(0.5, 0.5, default_m_cap(&seeds), 3);
        let combined = combine(&seeds, &params).unwrap();
        assert_eq!(combined.instance(), seeds[0].instance());
        assert_eq!(combined.lower_bound(), 2);
    }

    #[test]
    fn figure_combination_certifies_its_bound() {
        let seeds = fig_seeds();
        let params = CombineParams::new(0.5, 0.5, 8, 2024);
        let combined = combine(&seeds, &params).unwrap();
        assert_eq!(combined.lower_bound(), 6);
        assert!(combined.verify_preservation(1_000).unwrap().ok());
        let (count, exhausted) = count_stable(combined.instance(), 10_000, None);
        assert!(exhausted);
        assert!(count >= 6, "got {count}");
    }

    #[test]
    fn refusal_guard_blocks_the_figure_pair() {
        // Adding agent 1 to the list of agent 7 must be refused once 7 is in
        // 1's list: both are single in some witness of their seeds.
        let params = CombineParams::new(0.0, 0.0, 8, 1);
        let mut combiner = Combiner::new(fig_seeds(), params).unwrap();
        let (a1, a7) = (AgentId::new(1), AgentId::new(7));
        assert!(matches!(
            combiner.trial_add(a7, a1),
            TrialOutcome::Added { .. }
        ));
        assert_eq!(combiner.trial_add(a1, a7), TrialOutcome::Refused);
    }

    #[test]
    fn step3_applies_the_rank_constraint_on_the_receiving_side() {
        // 4 is matched in every witness of the first seed (to 1 or 2, both
        // rank 2). After 4 enters 5's list, adding 5 to 4's list passes only
        // by 4's side, so 5 must land at rank >= 2 in 4's list.
        let params = CombineParams::new(0.0, 1.0, 8, 5);
        let mut combiner = Combiner::new(fig_seeds(), params).unwrap();
        let (a4, a5) = (AgentId::new(4), AgentId::new(5));
        assert!(matches!(combiner.trial_add(a4, a5), TrialOutcome::Added { .. }));
        match combiner.trial_add(a5, a4) {
            TrialOutcome::Added { rank, .. } => assert!(rank >= 2, "rank {rank}"),
            other => panic!("expected addition, got {other:?}"),
        }
    }

    #[test]
    fn step3_allows_any_rank_when_the_adding_side_is_safe() {
        // 9 is matched in every witness of its seed; its partners all sit at
        // rank 1 in its list. After 9 enters 4's list at the tail, adding 4
        // to 9's list passes by 4's side (matched everywhere, never strictly
        // preferring 9), so no rank constraint applies.
        let params = CombineParams::new(0.0, 0.0, 8, 9);
        let mut combiner = Combiner::new(fig_seeds(), params).unwrap();
        let (a4, a9) = (AgentId::new(4), AgentId::new(9));
        assert!(matches!(combiner.trial_add(a9, a4), TrialOutcome::Added { .. }));
        assert!(matches!(combiner.trial_add(a4, a9), TrialOutcome::Added { .. }));
    }

    #[test]
    fn step1_skips_full_and_duplicate_targets() {
        let seeds = fig_seeds();
        // m_cap equal to the longest realized list freezes every list that
        // is already full
        let params = CombineParams::new(0.0, 0.0, 3, 1);
        let mut combiner = Combiner::new(seeds, params).unwrap();
        // agent 4's list already has 3 agents
        assert_eq!(
            combiner.trial_add(AgentId::new(5), AgentId::new(4)),
            TrialOutcome::SkippedListFull
        );
        // adding twice is skipped the second time
        assert!(matches!(
            combiner.trial_add(AgentId::new(5), AgentId::new(1)),
            TrialOutcome::Added { .. }
        ));
        assert_eq!(
            combiner.trial_add(AgentId::new(5), AgentId::new(1)),
            TrialOutcome::SkippedAlreadyListed
        );
    }

    #[test]
    fn lists_never_exceed_the_cap() {
        let seeds = fig_seeds();
        let params = CombineParams::new(0.0, 0.5, 4, 77);
        let combined = combine(&seeds, &params).unwrap();
        for a in combined.instance().agents() {
            assert!(combined.instance().list(a).agent_count() <= 4);
        }
    }

    #[test]
    fn cap_below_realized_lists_is_rejected() {
        let seeds = fig_seeds();
        let params = CombineParams::new(0.5, 0.5, 2, 0);
        assert_eq!(
            combine(&seeds, &params).unwrap_err(),
            CombineError::McapTooSmall { m_cap: 2, required: 3 }
        );
    }

    #[test]
    fn combining_is_deterministic() {
        let seeds = fig_seeds();
        let params = CombineParams::new(0.25, 0.75, 6, 123);
        let a = combine(&seeds, &params).unwrap();
        let b = combine(&seeds, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn symmetric_mode_keeps_lists_symmetric() {
        let seeds = fig_seeds();
        let params = CombineParams {
            symmetric: true,
            ..CombineParams::new(0.25, 0.5, 8, 31)
        };
        let combined = combine(&seeds, &params).unwrap();
        let inst = combined.instance();
        for x in inst.agents() {
            for y in inst.list(x).agents() {
                // seed lists may be asymmetric; cross-seed entries must not be
                let cross = combined.seeds()[0].global_agents().any(|a| a == x)
                    != combined.seeds()[0].global_agents().any(|a| a == y);
                if cross {
                    assert!(inst.list(y).contains(x), "{x} -> {y} one-directional");
                }
            }
        }
        assert!(combined.verify_preservation(1_000).unwrap().ok());
    }

    #[test]
    fn smti_mode_only_links_opposite_classes() {
        let seeds = fig_seeds();
        let params = CombineParams {
            smti_mode: true,
            ..CombineParams::new(0.0, 0.0, 8, 4)
        };
        let combined = combine(&seeds, &params).unwrap();
        // classes: first half of each block is class 0
        let class = |a: AgentId| -> u8 {
            for p in combined.seeds() {
                let lo = p.offset() + 1;
                if (lo..lo + p.n()).contains(&a.get()) {
                    let local = a.get() - p.offset();
                    return if local <= p.n().div_ceil(2) { 0 } else { 1 };
                }
            }
            unreachable!()
        };
        let inst = combined.instance();
        for p in combined.seeds() {
            for x in p.global_agents() {
                for y in inst.list(x).agents() {
                    let same_seed = p.global_agents().any(|a| a == y);
                    if !same_seed {
                        assert_ne!(class(x), class(y), "{x} lists {y} of its own class");
                    }
                }
            }
        }
        assert!(combined.verify_preservation(1_000).unwrap().ok());
    }

    #[test]
    fn from_parts_accepts_the_figure_combination() {
        let placed = rename_disjoint(&fig_seeds());
        let params = CombineParams::new(0.5, 0.5, 8, 0);
        let combined =
            CombinedInstance::from_parts(srti3_instance(), placed, params).unwrap();
        assert_eq!(combined.lower_bound(), 6);
        let check = combined.verify_preservation(100).unwrap();
        assert!(check.ok());
        assert_eq!(check.checked, 6);
    }

    #[test]
    fn from_parts_rejects_a_broken_embedding() {
        use crate::testutil::instance_from;
        let placed = rename_disjoint(&fig_seeds());
        // agent 4's list reverses its first two ranks relative to its seed
        let bad = instance_from(
            9,
            8,
            &[
                &[&[7, 9], &[4]],
                &[&[4]],
                &[&[2], &[9]],
                &[&[1, 2], &[3], &[7], &[9], &[8]], // swapped ranks
                &[&[4, 9], &[3]],
                &[&[8], &[4], &[7], &[9]],
                &[&[9], &[4]],
                &[&[2, 3, 7], &[4]],
                &[&[2, 3, 5, 6, 7], &[4]],
            ],
        );
        let params = CombineParams::new(0.5, 0.5, 8, 0);
        assert_eq!(
            CombinedInstance::from_parts(bad, placed, params).unwrap_err(),
            CombineError::EmbeddingBroken { agent: AgentId::new(4) }
        );
    }

    #[test]
    fn verification_refuses_oversized_products() {
        let seeds = fig_seeds();
        let params = CombineParams::new(1.0, 0.0, 4, 0);
        let combined = combine(&seeds, &params).unwrap();
        assert_eq!(
            combined.verify_preservation(5).unwrap_err(),
            CombineError::ProductAboveBound { product: 6, bound: 5 }
        );
    }
}
