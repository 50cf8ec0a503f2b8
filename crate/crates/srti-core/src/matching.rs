//! Matchings and the egalitarian cost.

use std::fmt;

use thiserror::Error;

use crate::instance::{AgentId, Instance};

/// Validation errors for matchings.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("agent {0} is out of range")]
    OutOfRange(AgentId),
    #[error("agent {0} is assigned more than once")]
    DoubleAssignment(AgentId),
    #[error("agent {0} is paired with itself")]
    SelfPair(AgentId),
    #[error("pair ({0}, {1}) is not mutually acceptable")]
    NotAcceptable(AgentId, AgentId),
    #[error("matching covers {got} agents but the instance has {expected}")]
    WrongAgentCount { expected: u32, got: u32 },
}

/// A matching: a set of mutually acceptable pairs plus the remaining single
/// agents. Stored as a partner table, so the pairs and the singles always
/// partition `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    partner: Vec<Option<AgentId>>,
}

impl Matching {
    /// Builds a matching over `inst` from a pair list; every agent not in a
    /// pair is single. Rejects out-of-range ids, double assignments and
    /// pairs that are not mutually acceptable.
    pub fn new(inst: &Instance, pairs: &[(AgentId, AgentId)]) -> Result<Self, MatchingError> {
        let n = inst.n();
        let mut partner: Vec<Option<AgentId>> = vec![None; n as usize];
        for &(a, b) in pairs {
            if a == b {
                return Err(MatchingError::SelfPair(a));
            }
            for &x in &[a, b] {
                if x.get() > n {
                    return Err(MatchingError::OutOfRange(x));
                }
            }
            if partner[a.index()].is_some() {
                return Err(MatchingError::DoubleAssignment(a));
            }
            if partner[b.index()].is_some() {
                return Err(MatchingError::DoubleAssignment(b));
            }
            if !inst.acceptable(a, b) {
                return Err(MatchingError::NotAcceptable(a, b));
            }
            partner[a.index()] = Some(b);
            partner[b.index()] = Some(a);
        }
        Ok(Matching { partner })
    }

    /// The matching that leaves every agent single.
    pub fn all_single(inst: &Instance) -> Self {
        Matching { partner: vec![None; inst.n() as usize] }
    }

    pub(crate) fn from_partner(partner: Vec<Option<AgentId>>) -> Self {
        Matching { partner }
    }

    pub fn n(&self) -> u32 {
        self.partner.len() as u32
    }

    /// Partner of `a`, or `None` if single. Panics if `a` is out of range.
    pub fn partner(&self, a: AgentId) -> Option<AgentId> {
        self.partner[a.index()]
    }

    pub fn is_single(&self, a: AgentId) -> bool {
        self.partner[a.index()].is_none()
    }

    /// Matched pairs `(a, b)` with `a < b`, ascending.
    pub fn pairs(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.partner.iter().enumerate().filter_map(|(i, p)| {
            let a = AgentId::from_index(i);
            p.and_then(|b| if a < b { Some((a, b)) } else { None })
        })
    }

    /// Single agents, ascending.
    pub fn singles(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_none())
            .map(|(i, _)| AgentId::from_index(i))
    }

    /// Sum of `rank(x,y) + rank(y,x)` over matched pairs; singles contribute
    /// nothing. The matching must belong to `inst`.
    pub fn egalitarian_cost(&self, inst: &Instance) -> EgalCost {
        let total = self
            .pairs()
            .map(|(a, b)| {
                let ra = inst.rank(a, b).expect("matched pair must be acceptable");
                let rb = inst.rank(b, a).expect("matched pair must be acceptable");
                (ra + rb) as u64
            })
            .sum();
        EgalCost(total)
    }
}

/// Egalitarian cost of a matching: total rank paid by matched agents.
/// Smaller is better; the all-single matching costs 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EgalCost(pub(crate) u64);

impl EgalCost {
    pub fn new(value: u64) -> Self {
        EgalCost(value)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for EgalCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{pair_list, srti1_instance, srti2_instance, srti3_instance};

    #[test]
    fn construction_validates_pairs() {
        let inst = srti1_instance();
        let a = AgentId::new;
        assert!(Matching::new(&inst, &pair_list(&[(1, 4)])).is_ok());
        assert_eq!(
            Matching::new(&inst, &pair_list(&[(1, 2)])).unwrap_err(),
            MatchingError::NotAcceptable(a(1), a(2))
        );
        assert_eq!(
            Matching::new(&inst, &pair_list(&[(1, 4), (2, 4)])).unwrap_err(),
            MatchingError::DoubleAssignment(a(4))
        );
        assert_eq!(
            Matching::new(&inst, &pair_list(&[(1, 1)])).unwrap_err(),
            MatchingError::SelfPair(a(1))
        );
        assert_eq!(
            Matching::new(&inst, &pair_list(&[(1, 9)])).unwrap_err(),
            MatchingError::OutOfRange(a(9))
        );
    }

    #[test]
    fn pairs_and_singles_partition_the_agents() {
        let inst = srti3_instance();
        let mu = Matching::new(&inst, &pair_list(&[(1, 4), (7, 9)])).unwrap();
        assert_eq!(mu.pairs().collect::<Vec<_>>(), pair_list(&[(1, 4), (7, 9)]));
        let singles: Vec<u32> = mu.singles().map(AgentId::get).collect();
        assert_eq!(singles, vec![2, 3, 5, 6, 8]);
        assert_eq!(mu.partner(AgentId::new(4)), Some(AgentId::new(1)));
        assert!(mu.is_single(AgentId::new(2)));
    }

    #[test]
    fn egalitarian_cost_sums_pair_ranks() {
        let srti1 = srti1_instance();
        let mu = Matching::new(&srti1, &pair_list(&[(1, 4)])).unwrap();
        assert_eq!(mu.egalitarian_cost(&srti1), EgalCost::new(3));

        let srti2 = srti2_instance();
        let mu = Matching::new(&srti2, &pair_list(&[(1, 5)])).unwrap();
        assert_eq!(mu.egalitarian_cost(&srti2), EgalCost::new(2));

        assert_eq!(
            Matching::all_single(&srti1).egalitarian_cost(&srti1),
            EgalCost::new(0)
        );
    }
}
