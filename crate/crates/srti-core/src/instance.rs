//! Agents, preference lists and instances.
//!
//! An instance holds `n` agents with ids `1..=n`. Each agent carries a
//! preference list over a subset of the other agents, organized as rank
//! groups: the agents in group `i` all have rank `i`, and two agents in the
//! same group are tied. Ranks start at 1 and are consecutive by
//! construction. Lists may be empty (an agent that finds nobody acceptable).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of an agent. Ids are 1-based and dense: an instance with `n`
/// agents uses exactly the ids `1..=n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(u32);

impl AgentId {
    /// Creates an agent id. Panics if `id` is zero.
    pub fn new(id: u32) -> Self {
        assert!(id >= 1, "agent ids are 1-based, got 0");
        AgentId(id)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based position for array storage.
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn from_index(index: usize) -> Self {
        AgentId(index as u32 + 1)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Validation errors for instances and preference lists.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("an instance needs at least 2 agents, got {0}")]
    TooFewAgents(u32),
    #[error("list bound must satisfy 0 < m < n, got m={m} n={n}")]
    BadListBound { n: u32, m: u32 },
    #[error("expected {expected} preference lists, got {got}")]
    WrongListCount { expected: u32, got: usize },
    #[error("empty rank group")]
    EmptyRankGroup,
    #[error("agent {0} appears more than once in a preference list")]
    DuplicateAgent(AgentId),
    #[error("agent {owner} lists itself")]
    SelfReference { owner: AgentId },
    #[error("agent {owner} lists unknown agent {entry}")]
    UnknownAgent { owner: AgentId, entry: AgentId },
    #[error("agent {owner} lists {len} agents, above the bound m={m}")]
    ListTooLong { owner: AgentId, len: usize, m: u32 },
}

/// A ranked preference list. Group `i` (0-based) holds the agents of rank
/// `i+1`; members of a group are tied and kept sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceList {
    groups: Vec<Vec<AgentId>>,
}

impl PreferenceList {
    pub fn empty() -> Self {
        PreferenceList { groups: Vec::new() }
    }

    /// Builds a list from rank groups. Groups must be non-empty and no agent
    /// may appear twice; members are sorted within each group.
    pub fn new(groups: Vec<Vec<AgentId>>) -> Result<Self, InstanceError> {
        let mut seen: Vec<AgentId> = Vec::new();
        for group in &groups {
            if group.is_empty() {
                return Err(InstanceError::EmptyRankGroup);
            }
            for &a in group {
                if seen.contains(&a) {
                    return Err(InstanceError::DuplicateAgent(a));
                }
                seen.push(a);
            }
        }
        let mut groups = groups;
        for group in &mut groups {
            group.sort_unstable();
        }
        Ok(PreferenceList { groups })
    }

    pub fn groups(&self) -> &[Vec<AgentId>] {
        &self.groups
    }

    /// Rank of `y` in this list (1-based), if listed.
    pub fn rank_of(&self, y: AgentId) -> Option<u32> {
        self.groups
            .iter()
            .position(|g| g.contains(&y))
            .map(|i| i as u32 + 1)
    }

    pub fn contains(&self, y: AgentId) -> bool {
        self.groups.iter().any(|g| g.contains(&y))
    }

    /// Number of agents listed.
    pub fn agent_count(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// All listed agents in rank order (ties broken by ascending id).
    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.groups.iter().flatten().copied()
    }

    /// Groups known to be valid (non-empty, duplicate-free); members get
    /// sorted. Hot paths only — everything else goes through `new`.
    pub(crate) fn from_groups_unchecked(mut groups: Vec<Vec<AgentId>>) -> Self {
        for group in &mut groups {
            group.sort_unstable();
        }
        PreferenceList { groups }
    }

    /// Appends `entry` as a new last singleton group. Returns its rank.
    pub(crate) fn push_last_group(&mut self, entry: AgentId) -> u32 {
        self.groups.push(vec![entry]);
        self.groups.len() as u32
    }

    /// Inserts `entry` into the existing group at `group_index` (0-based).
    pub(crate) fn join_group(&mut self, group_index: usize, entry: AgentId) {
        let group = &mut self.groups[group_index];
        let pos = group.partition_point(|&a| a < entry);
        group.insert(pos, entry);
    }
}

/// An SRTI instance: `n` agents, a list bound `m` and one preference list
/// per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: u32,
    m: u32,
    lists: Vec<PreferenceList>,
}

impl Instance {
    /// Builds an instance and checks every structural invariant: `n > 1`,
    /// `0 < m < n`, exactly one list per agent, all referenced ids in range,
    /// no self-references and no list longer than `m`.
    pub fn new(n: u32, m: u32, lists: Vec<PreferenceList>) -> Result<Self, InstanceError> {
        if n < 2 {
            return Err(InstanceError::TooFewAgents(n));
        }
        if m == 0 || m >= n {
            return Err(InstanceError::BadListBound { n, m });
        }
        if lists.len() != n as usize {
            return Err(InstanceError::WrongListCount {
                expected: n,
                got: lists.len(),
            });
        }
        for (i, list) in lists.iter().enumerate() {
            let owner = AgentId::from_index(i);
            for entry in list.agents() {
                if entry == owner {
                    return Err(InstanceError::SelfReference { owner });
                }
                if entry.get() > n {
                    return Err(InstanceError::UnknownAgent { owner, entry });
                }
            }
            let len = list.agent_count();
            if len > m as usize {
                return Err(InstanceError::ListTooLong { owner, len, m });
            }
        }
        Ok(Instance { n, m, lists })
    }

    /// Constructor for generators whose output is valid by construction.
    pub(crate) fn new_unchecked(n: u32, m: u32, lists: Vec<PreferenceList>) -> Self {
        debug_assert!(Instance::new(n, m, lists.clone()).is_ok());
        Instance { n, m, lists }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (1..=self.n).map(AgentId::new)
    }

    /// The preference list of `a`. Panics if `a` is out of range.
    pub fn list(&self, a: AgentId) -> &PreferenceList {
        &self.lists[a.index()]
    }

    pub fn lists(&self) -> &[PreferenceList] {
        &self.lists
    }

    /// Rank of `y` in `x`'s list, if listed. Panics on out-of-range ids or
    /// `x == y`.
    pub fn rank(&self, x: AgentId, y: AgentId) -> Option<u32> {
        assert!(x != y, "rank is undefined for an agent against itself");
        self.check_agent(x);
        self.check_agent(y);
        self.lists[x.index()].rank_of(y)
    }

    /// True iff `x` and `y` list each other.
    pub fn acceptable(&self, x: AgentId, y: AgentId) -> bool {
        assert!(x != y, "acceptability is undefined for an agent with itself");
        self.check_agent(x);
        self.check_agent(y);
        self.lists[x.index()].contains(y) && self.lists[y.index()].contains(x)
    }

    /// True iff `a` strictly prefers `x` to `y`: both are listed and
    /// `rank(a,x) < rank(a,y)`. Ties and unlisted agents yield false.
    pub fn prefers(&self, a: AgentId, x: AgentId, y: AgentId) -> bool {
        assert!(a != x && a != y && x != y, "prefers needs three distinct agents");
        match (self.rank(a, x), self.rank(a, y)) {
            (Some(rx), Some(ry)) => rx < ry,
            _ => false,
        }
    }

    fn check_agent(&self, a: AgentId) {
        assert!(
            a.get() <= self.n,
            "agent {} out of range for an instance with n={}",
            a,
            self.n
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{ids, srti1_instance, srti3_instance};

    #[test]
    fn preference_list_rejects_duplicates_and_empty_groups() {
        let err = PreferenceList::new(vec![vec![AgentId::new(2)], vec![]]).unwrap_err();
        assert_eq!(err, InstanceError::EmptyRankGroup);
        let err =
            PreferenceList::new(vec![vec![AgentId::new(2)], vec![AgentId::new(2)]]).unwrap_err();
        assert_eq!(err, InstanceError::DuplicateAgent(AgentId::new(2)));
    }

    #[test]
    fn instance_validates_bounds() {
        assert_eq!(
            Instance::new(1, 1, vec![PreferenceList::empty()]).unwrap_err(),
            InstanceError::TooFewAgents(1)
        );
        let empty = |n: usize| vec![PreferenceList::empty(); n];
        assert_eq!(
            Instance::new(3, 3, empty(3)).unwrap_err(),
            InstanceError::BadListBound { n: 3, m: 3 }
        );
        assert_eq!(
            Instance::new(3, 2, empty(2)).unwrap_err(),
            InstanceError::WrongListCount { expected: 3, got: 2 }
        );
    }

    #[test]
    fn instance_validates_list_contents() {
        let list = |g: Vec<Vec<u32>>| {
            PreferenceList::new(g.into_iter().map(|v| ids(&v)).collect()).unwrap()
        };
        // self-reference
        let err = Instance::new(
            2,
            1,
            vec![list(vec![vec![1]]), PreferenceList::empty()],
        )
        .unwrap_err();
        assert_eq!(err, InstanceError::SelfReference { owner: AgentId::new(1) });
        // out of range
        let err = Instance::new(
            2,
            1,
            vec![list(vec![vec![3]]), PreferenceList::empty()],
        )
        .unwrap_err();
        assert_eq!(
            err,
            InstanceError::UnknownAgent { owner: AgentId::new(1), entry: AgentId::new(3) }
        );
        // too long
        let err = Instance::new(
            3,
            1,
            vec![
                list(vec![vec![2], vec![3]]),
                PreferenceList::empty(),
                PreferenceList::empty(),
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            InstanceError::ListTooLong { owner: AgentId::new(1), len: 2, m: 1 }
        );
    }

    #[test]
    fn ranks_match_figure_layout() {
        let inst = srti1_instance();
        let a = AgentId::new;
        assert_eq!(inst.rank(a(4), a(3)), Some(1));
        assert_eq!(inst.rank(a(4), a(1)), Some(2));
        assert_eq!(inst.rank(a(4), a(2)), Some(2));
        // unlisted partner
        assert_eq!(inst.rank(a(1), a(2)), None);
    }

    #[test]
    fn tied_entries_share_a_rank() {
        let inst = srti3_instance();
        let a = AgentId::new;
        assert_eq!(inst.rank(a(1), a(7)), Some(1));
        assert_eq!(inst.rank(a(1), a(9)), Some(1));
        assert_eq!(inst.rank(a(1), a(4)), Some(2));
    }

    #[test]
    fn acceptability_is_mutual_listing() {
        let inst = srti1_instance();
        let a = AgentId::new;
        assert!(inst.acceptable(a(1), a(4)));
        assert!(inst.acceptable(a(4), a(1)));
        assert!(!inst.acceptable(a(2), a(3)));
        // empty list is acceptable to nobody
        let empty = Instance::new(
            2,
            1,
            vec![PreferenceList::empty(), PreferenceList::empty()],
        )
        .unwrap();
        assert!(!empty.acceptable(a(1), a(2)));
    }

    #[test]
    fn strict_preference_excludes_ties() {
        let inst = srti3_instance();
        let a = AgentId::new;
        // a6: (8) (4) (7) (9)
        assert!(inst.prefers(a(6), a(8), a(7)));
        assert!(!inst.prefers(a(6), a(7), a(8)));
        // tie in a1's list: (7 9)
        assert!(!inst.prefers(a(1), a(7), a(9)));
        assert!(!inst.prefers(a(1), a(9), a(7)));
        // a9 prefers 2 (rank 1) to 4 (rank 2)
        assert!(inst.prefers(a(9), a(2), a(4)));
        // unlisted agent never preferred
        assert!(!inst.prefers(a(2), a(1), a(4)));
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn rank_panics_out_of_range() {
        let inst = srti1_instance();
        inst.rank(AgentId::new(1), AgentId::new(9));
    }
}
