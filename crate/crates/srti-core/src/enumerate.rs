//! Exhaustive enumeration of stable matchings, counting, and egalitarian
//! optimization by enumeration.
//!
//! The search is a depth-first backtracking over agents in ascending id
//! order. At each undecided agent it branches on every mutually acceptable,
//! still-unmatched candidate (ascending rank, then ascending id) and finally
//! on leaving the agent single. A branch is pruned as soon as a blocking
//! pair is certain among decided agents — an agent is decided once it is
//! matched or once the frontier has passed it. Complete assignments are
//! re-checked for stability before being emitted, so every emitted matching
//! is stable even if a pruning rule is ever loosened.
//!
//! The egalitarian solver runs the same search with branch-and-bound on the
//! partial cost: matched pairs only ever add to the cost, so a partial
//! assignment at least as expensive as the incumbent cannot improve on it.

use std::time::{Duration, Instant};

use crate::instance::{AgentId, Instance};
use crate::matching::{EgalCost, Matching};

/// Result of an enumeration run.
#[derive(Debug, Clone)]
pub struct EnumResult {
    /// The stable matchings found, in discovery order (deterministic).
    pub matchings: Vec<Matching>,
    /// Number of stable matchings found.
    pub count: u64,
    /// True iff the search ran to completion: neither the cap nor the time
    /// budget cut it short. When true, `count` is the exact number of stable
    /// matchings of the instance.
    pub exhausted: bool,
}

/// Outcome of the egalitarian solver.
#[derive(Debug, Clone)]
pub enum EgalSolution {
    /// A stable matching of minimum egalitarian cost.
    Optimal { matching: Matching, cost: EgalCost },
    /// The instance has no stable matching.
    Unsatisfiable,
    /// The time budget ran out; `best` is the cheapest stable matching seen
    /// so far, if any.
    TimedOut { best: Option<(Matching, EgalCost)> },
}

/// Enumerates stable matchings, stopping after `cap` matchings or when the
/// time budget runs out. Panics if `cap` is zero.
pub fn enumerate_stable(inst: &Instance, cap: u64, budget: Option<Duration>) -> EnumResult {
    assert!(cap >= 1, "enumeration cap must be at least 1");
    let mut searcher = Searcher::new(inst, budget);
    let mut mode = Mode::Collect { cap, out: Vec::new() };
    searcher.dfs(0, &mut mode);
    let (matchings, capped) = match mode {
        Mode::Collect { out, cap } => {
            let capped = out.len() as u64 == cap;
            (out, capped)
        }
        _ => unreachable!(),
    };
    EnumResult {
        count: matchings.len() as u64,
        exhausted: !capped && !searcher.timed_out,
        matchings,
    }
}

/// Like [`enumerate_stable`] but only counts. Returns `(count, exhausted)`.
pub fn count_stable(inst: &Instance, cap: u64, budget: Option<Duration>) -> (u64, bool) {
    assert!(cap >= 1, "enumeration cap must be at least 1");
    let mut searcher = Searcher::new(inst, budget);
    let mut mode = Mode::Count { cap, count: 0 };
    searcher.dfs(0, &mut mode);
    match mode {
        Mode::Count { count, cap } => (count, count < cap && !searcher.timed_out),
        _ => unreachable!(),
    }
}

/// Finds a stable matching of minimum egalitarian cost by enumeration with
/// branch-and-bound pruning on the partial cost.
pub fn solve_egalitarian(inst: &Instance, budget: Option<Duration>) -> EgalSolution {
    let mut searcher = Searcher::new(inst, budget);
    let mut mode = Mode::Egal { best: None };
    searcher.dfs(0, &mut mode);
    let best = match mode {
        Mode::Egal { best } => best,
        _ => unreachable!(),
    };
    let best = best.map(|(partner, cost)| {
        let matching = Matching::from_partner(
            partner
                .iter()
                .map(|&p| (p != NONE).then(|| AgentId::from_index(p as usize)))
                .collect(),
        );
        (matching, EgalCost::new(cost))
    });
    match (searcher.timed_out, best) {
        (true, best) => EgalSolution::TimedOut { best },
        (false, Some((matching, cost))) => EgalSolution::Optimal { matching, cost },
        (false, None) => EgalSolution::Unsatisfiable,
    }
}

const NONE: u32 = u32::MAX;
const TIME_CHECK_MASK: u32 = 0xfff;

enum Mode {
    Collect { cap: u64, out: Vec<Matching> },
    Count { cap: u64, count: u64 },
    Egal { best: Option<(Vec<u32>, u64)> },
}

struct Searcher {
    n: usize,
    /// Flattened rank table: `rank[x * n + y]`, 0 means unlisted.
    rank: Vec<u32>,
    /// Mutually acceptable neighbors, ascending (rank, id), in one flat
    /// buffer; agent `x` owns `nbr_flat[nbr_start[x]..nbr_start[x+1]]`.
    nbr_flat: Vec<u32>,
    nbr_start: Vec<u32>,
    partner: Vec<u32>,
    partial_cost: u64,
    deadline: Option<Instant>,
    ticks: u32,
    timed_out: bool,
}

impl Searcher {
    fn new(inst: &Instance, budget: Option<Duration>) -> Self {
        let n = inst.n() as usize;
        let mut rank = vec![0u32; n * n];
        for x in inst.agents() {
            for (g, group) in inst.list(x).groups().iter().enumerate() {
                for &y in group {
                    rank[x.index() * n + y.index()] = g as u32 + 1;
                }
            }
        }
        let mut nbr_flat = Vec::new();
        let mut nbr_start = Vec::with_capacity(n + 1);
        nbr_start.push(0);
        let mut cands: Vec<u32> = Vec::with_capacity(n);
        for x in 0..n {
            cands.clear();
            cands.extend(
                (0..n as u32)
                    .filter(|&y| rank[x * n + y as usize] > 0 && rank[y as usize * n + x] > 0),
            );
            cands.sort_unstable_by_key(|&y| (rank[x * n + y as usize], y));
            nbr_flat.extend_from_slice(&cands);
            nbr_start.push(nbr_flat.len() as u32);
        }
        Searcher {
            n,
            rank,
            nbr_flat,
            nbr_start,
            partner: vec![NONE; n],
            partial_cost: 0,
            deadline: budget.map(|b| Instant::now() + b),
            ticks: 0,
            timed_out: false,
        }
    }

    #[inline]
    fn rank_of(&self, x: u32, y: u32) -> u32 {
        self.rank[x as usize * self.n + y as usize]
    }

    #[inline]
    fn nbrs(&self, x: u32) -> &[u32] {
        &self.nbr_flat[self.nbr_start[x as usize] as usize..self.nbr_start[x as usize + 1] as usize]
    }

    #[inline]
    fn decided(&self, z: u32, frontier: usize) -> bool {
        (z as usize) < frontier || self.partner[z as usize] != NONE
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if let Some(deadline) = self.deadline {
            if self.ticks & TIME_CHECK_MASK == 0 && Instant::now() >= deadline {
                self.timed_out = true;
                return true;
            }
            self.ticks = self.ticks.wrapping_add(1);
        }
        false
    }

    /// True iff matching `a` (at the frontier) with `y` creates a blocking
    /// pair among decided agents. Neighbors come in rank order, so each scan
    /// stops at the first neighbor ranked no better than the new partner.
    fn pair_blocks_decided(&self, a: u32, y: u32, frontier: usize) -> bool {
        for &(u, v) in &[(a, y), (y, a)] {
            let rank_uv = self.rank_of(u, v);
            for &z in self.nbrs(u) {
                if self.rank_of(u, z) >= rank_uv {
                    break; // u prefers v to z and to everything after z
                }
                if !self.decided(z, frontier) {
                    continue;
                }
                match self.partner[z as usize] {
                    NONE => return true,
                    w => {
                        if self.rank_of(z, u) < self.rank_of(z, w) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// True iff leaving `a` single creates a blocking pair among decided
    /// agents.
    fn single_blocks_decided(&self, a: u32, frontier: usize) -> bool {
        for &z in self.nbrs(a) {
            if !self.decided(z, frontier) {
                continue;
            }
            match self.partner[z as usize] {
                NONE => return true, // two acceptable singles
                w => {
                    if self.rank_of(z, a) < self.rank_of(z, w) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Full stability check on a complete assignment.
    fn complete_is_stable(&self) -> bool {
        for x in 0..self.n as u32 {
            let limit = match self.partner[x as usize] {
                NONE => u32::MAX,
                q => self.rank_of(x, q),
            };
            for &y in self.nbrs(x) {
                if self.rank_of(x, y) >= limit {
                    break; // x prefers its partner to y and everything after
                }
                let y_wants = match self.partner[y as usize] {
                    NONE => true,
                    p => self.rank_of(y, x) < self.rank_of(y, p),
                };
                if y_wants {
                    return false;
                }
            }
        }
        true
    }

    /// Returns false to abort the whole search (cap reached or timed out).
    fn dfs(&mut self, frontier: usize, mode: &mut Mode) -> bool {
        if self.out_of_time() {
            return false;
        }
        let mut a = frontier;
        while a < self.n && self.partner[a] != NONE {
            a += 1;
        }
        if a == self.n {
            return self.emit(mode);
        }
        let x = a as u32;
        let (lo, hi) = (self.nbr_start[a] as usize, self.nbr_start[a + 1] as usize);
        for i in lo..hi {
            let y = self.nbr_flat[i];
            if y < x || self.partner[y as usize] != NONE {
                continue;
            }
            let edge_cost = (self.rank_of(x, y) + self.rank_of(y, x)) as u64;
            if let Mode::Egal { best: Some((_, bound)) } = mode {
                if self.partial_cost + edge_cost >= *bound {
                    continue;
                }
            }
            self.partner[a] = y;
            self.partner[y as usize] = x;
            self.partial_cost += edge_cost;
            let keep_going =
                self.pair_blocks_decided(x, y, a) || self.dfs(a + 1, mode);
            self.partial_cost -= edge_cost;
            self.partner[a] = NONE;
            self.partner[y as usize] = NONE;
            if !keep_going {
                return false;
            }
        }
        if !self.single_blocks_decided(x, a) {
            if !self.dfs(a + 1, mode) {
                return false;
            }
        }
        true
    }

    fn emit(&mut self, mode: &mut Mode) -> bool {
        if !self.complete_is_stable() {
            return true;
        }
        match mode {
            Mode::Collect { cap, out } => {
                let partner = self
                    .partner
                    .iter()
                    .map(|&p| (p != NONE).then(|| AgentId::from_index(p as usize)))
                    .collect();
                out.push(Matching::from_partner(partner));
                (out.len() as u64) < *cap
            }
            Mode::Count { cap, count } => {
                *count += 1;
                *count < *cap
            }
            Mode::Egal { best } => {
                let cost = self.partial_cost;
                let better = best.as_ref().map_or(true, |&(_, b)| cost < b);
                if better {
                    *best = Some((self.partner.clone(), cost));
                }
                true
            }
        }
    }
}

/// Compact counting kernel for the seed search. It runs the same
/// backtracking and pruning as [`Searcher`] on byte-sized tables (agent ids
/// and ranks in `u8`, so `n <= 255`) and reuses its buffers across attempts;
/// the seed generator fills the rank table in place and only materializes an
/// `Instance` for accepted attempts, which are then re-enumerated through
/// the public kernel. A miscount here could therefore only skew which
/// attempt gets accepted, never the soundness of the returned seed.
pub(crate) struct SmallKernel {
    n: usize,
    pub(crate) rank: Vec<u8>,
    nbr_flat: Vec<u8>,
    nbr_start: Vec<u16>,
    partner: Vec<u8>,
}

const SMALL_NONE: u8 = u8::MAX;

impl SmallKernel {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n <= 255, "SmallKernel supports at most 255 agents");
        SmallKernel {
            n,
            rank: vec![0; n * n],
            nbr_flat: Vec::with_capacity(n * (n - 1)),
            nbr_start: vec![0; n + 1],
            partner: vec![SMALL_NONE; n],
        }
    }

    pub(crate) fn clear_ranks(&mut self) {
        self.rank.fill(0);
    }

    #[inline]
    pub(crate) fn rank_of(&self, x: usize, y: usize) -> u8 {
        self.rank[x * self.n + y]
    }

    #[inline]
    pub(crate) fn set_rank(&mut self, x: usize, y: usize, r: u8) {
        self.rank[x * self.n + y] = r;
    }

    /// Starts a direct neighbor fill; rows must follow in agent order via
    /// [`SmallKernel::push_neighbor_row`].
    pub(crate) fn begin_neighbor_fill(&mut self) {
        self.nbr_flat.clear();
    }

    /// Appends agent `a`'s neighbor row, already in (rank, id) order. Rows
    /// must arrive for agents `0..n` in order.
    pub(crate) fn push_neighbor_row(&mut self, a: usize, row: &[u8]) {
        debug_assert_eq!(self.nbr_start[a] as usize, self.nbr_flat.len());
        self.nbr_flat.extend_from_slice(row);
        self.nbr_start[a + 1] = self.nbr_flat.len() as u16;
    }

    /// Rebuilds the neighbor lists from the rank table; call after all ranks
    /// are in place.
    pub(crate) fn build_neighbors(&mut self) {
        let n = self.n;
        self.nbr_flat.clear();
        for x in 0..n {
            let mut row: [u8; 255] = [0; 255];
            let mut len = 0;
            for y in 0..n {
                if self.rank[x * n + y] > 0 && self.rank[y * n + x] > 0 {
                    row[len] = y as u8;
                    len += 1;
                }
            }
            row[..len].sort_unstable_by_key(|&y| (self.rank[x * n + y as usize], y));
            self.nbr_flat.extend_from_slice(&row[..len]);
            self.nbr_start[x + 1] = self.nbr_flat.len() as u16;
        }
    }

    /// Number of stable matchings, stopping at `cap`. `max_singles` is a
    /// sound cap on single agents for instances where more would always
    /// block: a complete instance admits at most one single (none when `n`
    /// is even), since any two singles are mutually acceptable. Pass
    /// `usize::MAX` when no such bound applies. With `strict` (no ties
    /// anywhere), mutually-top acceptable pairs are pinned up front: such a
    /// pair belongs to every stable matching, and neither member can ever
    /// take part in a blocking pair.
    pub(crate) fn count_capped(&mut self, cap: u32, max_singles: usize, strict: bool) -> u32 {
        self.partner.fill(SMALL_NONE);
        if strict {
            let n = self.n;
            for x in 0..n {
                let nbrs = self.nbrs(x);
                if nbrs.is_empty() {
                    continue;
                }
                let y = nbrs[0] as usize;
                if y > x
                    && self.rank[x * n + y] == 1
                    && self.rank[y * n + x] == 1
                    && self.nbrs(y)[0] as usize == x
                {
                    self.partner[x] = y as u8;
                    self.partner[y] = x as u8;
                }
            }
        }
        let mut count = 0;
        self.dfs(0, cap, max_singles, &mut count);
        count
    }

    #[inline]
    fn nbrs(&self, x: usize) -> &[u8] {
        &self.nbr_flat[self.nbr_start[x] as usize..self.nbr_start[x + 1] as usize]
    }

    fn dfs(&mut self, frontier: usize, cap: u32, singles_left: usize, count: &mut u32) -> bool {
        let n = self.n;
        let mut a = frontier;
        while a < n && self.partner[a] != SMALL_NONE {
            a += 1;
        }
        if a == n {
            if self.complete_is_stable() {
                *count += 1;
                if *count >= cap {
                    return false;
                }
            }
            return true;
        }
        let (lo, hi) = (self.nbr_start[a] as usize, self.nbr_start[a + 1] as usize);
        for i in lo..hi {
            let y = self.nbr_flat[i] as usize;
            if y < a || self.partner[y] != SMALL_NONE {
                continue;
            }
            self.partner[a] = y as u8;
            self.partner[y] = a as u8;
            let keep_going = self.pair_blocks_decided(a, y)
                || self.forward_dead_pair(a, y)
                || self.dfs(a + 1, cap, singles_left, count);
            self.partner[a] = SMALL_NONE;
            self.partner[y] = SMALL_NONE;
            if !keep_going {
                return false;
            }
        }
        if singles_left > 0
            && !self.single_blocks_decided(a)
            && !self.forward_dead_single(a)
            && !self.dfs(a + 1, cap, singles_left - 1, count)
        {
            return false;
        }
        true
    }

    /// Forward check after matching `a` with `y`: any undecided agent `z`
    /// that one of them strictly prefers to its new partner must still have
    /// an available candidate it weakly prefers to that agent — otherwise
    /// `z` is bound to end up blocking (it cannot stay single next to an
    /// agent that prefers it, and any worse partner makes it prefer back).
    fn forward_dead_pair(&self, a: usize, y: usize) -> bool {
        let n = self.n;
        let frontier = a;
        for &(u, v) in &[(a, y), (y, a)] {
            let rank_uv = self.rank[u * n + v];
            for &z in self.nbrs(u) {
                let z = z as usize;
                if self.rank[u * n + z] >= rank_uv {
                    break;
                }
                if z < frontier || self.partner[z] != SMALL_NONE {
                    continue; // decided agents were handled exactly
                }
                if !self.has_candidate_up_to(z, self.rank[z * n + u], frontier) {
                    return true;
                }
            }
        }
        false
    }

    /// Forward check after leaving `a` single: every undecided agent
    /// acceptable to `a` must still have an available candidate it weakly
    /// prefers to `a` (it cannot stay single next to the single `a`, and a
    /// worse partner would make it prefer `a`).
    fn forward_dead_single(&self, a: usize) -> bool {
        let n = self.n;
        for &z in self.nbrs(a) {
            let z = z as usize;
            if z < a || self.partner[z] != SMALL_NONE {
                continue;
            }
            if !self.has_candidate_up_to(z, self.rank[z * n + a], a) {
                return true;
            }
        }
        false
    }

    /// True iff `z` still has an unmatched, undecided neighbor ranked at
    /// most `limit`.
    #[inline]
    fn has_candidate_up_to(&self, z: usize, limit: u8, frontier: usize) -> bool {
        let n = self.n;
        for &w in self.nbrs(z) {
            let w = w as usize;
            if self.rank[z * n + w] > limit {
                return false;
            }
            if w >= frontier && self.partner[w] == SMALL_NONE {
                return true;
            }
        }
        false
    }

    fn pair_blocks_decided(&self, a: usize, y: usize) -> bool {
        let n = self.n;
        for &(u, v) in &[(a, y), (y, a)] {
            let rank_uv = self.rank[u * n + v];
            for &z in self.nbrs(u) {
                let z = z as usize;
                if self.rank[u * n + z] >= rank_uv {
                    break;
                }
                if z >= a && self.partner[z] == SMALL_NONE {
                    continue; // undecided
                }
                match self.partner[z] {
                    SMALL_NONE => return true,
                    w => {
                        if self.rank[z * n + u] < self.rank[z * n + w as usize] {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn single_blocks_decided(&self, a: usize) -> bool {
        let n = self.n;
        for &z in self.nbrs(a) {
            let z = z as usize;
            if z >= a && self.partner[z] == SMALL_NONE {
                continue;
            }
            match self.partner[z] {
                SMALL_NONE => return true,
                w => {
                    if self.rank[z * n + a] < self.rank[z * n + w as usize] {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn complete_is_stable(&self) -> bool {
        let n = self.n;
        for x in 0..n {
            let limit = match self.partner[x] {
                SMALL_NONE => u8::MAX,
                q => self.rank[x * n + q as usize],
            };
            for &y in self.nbrs(x) {
                let y = y as usize;
                if self.rank[x * n + y] >= limit {
                    break;
                }
                let y_wants = match self.partner[y] {
                    SMALL_NONE => true,
                    p => self.rank[y * n + x] < self.rank[y * n + p as usize],
                };
                if y_wants {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    use crate::instance::PreferenceList;
    use crate::testutil::{
        ids, srti1_instance, srti2_instance, srti3_instance, srti3_stable_pairsets,
    };

    fn pairset(mu: &Matching) -> BTreeSet<(u32, u32)> {
        mu.pairs().map(|(a, b)| (a.get(), b.get())).collect()
    }

    #[test]
    fn figure_counts() {
        assert_eq!(enumerate_stable(&srti1_instance(), 1000, None).count, 2);
        assert_eq!(enumerate_stable(&srti2_instance(), 1000, None).count, 3);
        assert_eq!(enumerate_stable(&srti3_instance(), 1000, None).count, 8);
    }

    #[test]
    fn combined_figure_matchings_are_exactly_the_listed_ones() {
        let res = enumerate_stable(&srti3_instance(), 1000, None);
        assert!(res.exhausted);
        let found: BTreeSet<BTreeSet<(u32, u32)>> =
            res.matchings.iter().map(pairset).collect();
        let expected: BTreeSet<BTreeSet<(u32, u32)>> = srti3_stable_pairsets()
            .into_iter()
            .map(|v| v.into_iter().collect())
            .collect();
        assert_eq!(found, expected);
    }

    #[test]
    fn first_seed_matchings_in_discovery_order() {
        let res = enumerate_stable(&srti1_instance(), 1000, None);
        let sets: Vec<BTreeSet<(u32, u32)>> = res.matchings.iter().map(pairset).collect();
        assert_eq!(sets[0], BTreeSet::from([(1, 4)]));
        assert_eq!(sets[1], BTreeSet::from([(2, 4)]));
    }

    #[test]
    fn cap_truncates_and_reports_it() {
        let (count, exhausted) = count_stable(&srti3_instance(), 5, None);
        assert_eq!((count, exhausted), (5, false));
        let (count, exhausted) = count_stable(&srti3_instance(), 1000, None);
        assert_eq!((count, exhausted), (8, true));
    }

    #[test]
    #[should_panic(expected = "cap must be at least 1")]
    fn zero_cap_is_a_usage_error() {
        count_stable(&srti1_instance(), 0, None);
    }

    #[test]
    fn egalitarian_optimum_on_the_figure() {
        match solve_egalitarian(&srti2_instance(), None) {
            EgalSolution::Optimal { cost, matching } => {
                assert_eq!(cost.value(), 2);
                assert_eq!(matching.egalitarian_cost(&srti2_instance()).value(), 2);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
        match solve_egalitarian(&srti3_instance(), None) {
            EgalSolution::Optimal { cost, .. } => assert_eq!(cost.value(), 5),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn no_acceptable_pairs_gives_the_all_single_optimum() {
        let inst = Instance::new(
            3,
            1,
            vec![
                PreferenceList::new(vec![ids(&[2])]).unwrap(),
                PreferenceList::empty(),
                PreferenceList::empty(),
            ],
        )
        .unwrap();
        match solve_egalitarian(&inst, None) {
            EgalSolution::Optimal { matching, cost } => {
                assert_eq!(cost.value(), 0);
                assert_eq!(matching.pairs().count(), 0);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn unsatisfiable_odd_cycle_is_detected() {
        // 1: (2)(3) / 2: (3)(1) / 3: (1)(2) — the classic 3-rotation with a
        // 4th agent nobody lists; no stable matching exists.
        let inst = Instance::new(
            4,
            3,
            vec![
                PreferenceList::new(vec![ids(&[2]), ids(&[3])]).unwrap(),
                PreferenceList::new(vec![ids(&[3]), ids(&[1])]).unwrap(),
                PreferenceList::new(vec![ids(&[1]), ids(&[2])]).unwrap(),
                PreferenceList::empty(),
            ],
        )
        .unwrap();
        assert_eq!(count_stable(&inst, 10, None), (0, true));
        assert!(matches!(
            solve_egalitarian(&inst, None),
            EgalSolution::Unsatisfiable
        ));
    }

    #[test]
    fn tiny_budget_reports_truncation() {
        let res = enumerate_stable(&srti3_instance(), 1000, Some(Duration::ZERO));
        assert!(!res.exhausted);
    }
}
