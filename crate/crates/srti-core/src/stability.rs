//! Blocking pairs and stability.
//!
//! A mutually acceptable pair `{x, y}` that is not matched together blocks a
//! matching when one of three conditions holds: both agents are single; one
//! is single and the other strictly prefers it to its partner; or both are
//! matched and each strictly prefers the other to its partner. A matching is
//! stable iff no pair blocks it.

use crate::instance::{AgentId, Instance};
use crate::matching::{Matching, MatchingError};

impl Instance {
    /// All pairs blocking `mu`, as `(x, y)` with `x < y`, ascending.
    pub fn blocking_pairs(
        &self,
        mu: &Matching,
    ) -> Result<Vec<(AgentId, AgentId)>, MatchingError> {
        self.check_matching(mu)?;
        let mut out = Vec::new();
        for x in self.agents() {
            for y in self.list(x).agents() {
                if y <= x || !self.list(y).contains(x) {
                    continue;
                }
                if mu.partner(x) == Some(y) {
                    continue;
                }
                if self.pair_blocks(mu, x, y) {
                    out.push((x, y));
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// True iff no pair blocks `mu`.
    pub fn is_stable(&self, mu: &Matching) -> Result<bool, MatchingError> {
        self.check_matching(mu)?;
        for x in self.agents() {
            for y in self.list(x).agents() {
                if y <= x || !self.list(y).contains(x) {
                    continue;
                }
                if mu.partner(x) != Some(y) && self.pair_blocks(mu, x, y) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Blocking test for a mutually acceptable pair not matched together.
    fn pair_blocks(&self, mu: &Matching, x: AgentId, y: AgentId) -> bool {
        let prefers_over = |a: AgentId, b: AgentId, partner: AgentId| {
            self.rank(a, b).unwrap() < self.rank(a, partner).unwrap()
        };
        match (mu.partner(x), mu.partner(y)) {
            (None, None) => true,
            (None, Some(p)) => prefers_over(y, x, p),
            (Some(q), None) => prefers_over(x, y, q),
            (Some(q), Some(p)) => prefers_over(x, y, q) && prefers_over(y, x, p),
        }
    }

    fn check_matching(&self, mu: &Matching) -> Result<(), MatchingError> {
        if mu.n() != self.n() {
            return Err(MatchingError::WrongAgentCount { expected: self.n(), got: mu.n() });
        }
        for (a, b) in mu.pairs() {
            if !self.acceptable(a, b) {
                return Err(MatchingError::NotAcceptable(a, b));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::PreferenceList;
    use crate::testutil::{ids, pair_list, srti1_instance, srti2_instance, srti3_instance};

    #[test]
    fn matched_pair_in_figure_is_stable() {
        let inst = srti1_instance();
        let mu = Matching::new(&inst, &pair_list(&[(1, 4)])).unwrap();
        assert_eq!(inst.blocking_pairs(&mu).unwrap(), vec![]);
        assert!(inst.is_stable(&mu).unwrap());
    }

    #[test]
    fn two_acceptable_singles_block() {
        let inst = srti1_instance();
        let mu = Matching::all_single(&inst);
        let blocks = inst.blocking_pairs(&mu).unwrap();
        assert!(blocks.contains(&(AgentId::new(1), AgentId::new(4))));
        assert!(!inst.is_stable(&mu).unwrap());
    }

    #[test]
    fn all_single_blocking_set_of_combined_figure() {
        // Every mutually acceptable pair blocks the all-single matching.
        let inst = srti3_instance();
        let mu = Matching::all_single(&inst);
        let blocks = inst.blocking_pairs(&mu).unwrap();
        let expected = pair_list(&[
            (1, 4),
            (2, 4),
            (3, 9),
            (4, 7),
            (4, 8),
            (4, 9),
            (5, 9),
            (6, 9),
            (7, 9),
        ]);
        assert_eq!(blocks, expected);
    }

    #[test]
    fn single_plus_preferring_partner_blocks() {
        // ties never block: 5 matched to 2 is indifferent to the single 1
        let inst = srti2_instance();
        let mu = Matching::new(&inst, &pair_list(&[(2, 5)])).unwrap();
        assert!(inst.is_stable(&mu).unwrap());
        // strict preference does: with (4,7) matched, 4 prefers the single 1
        let inst = srti3_instance();
        let mu = Matching::new(&inst, &pair_list(&[(4, 7)])).unwrap();
        let blocks = inst.blocking_pairs(&mu).unwrap();
        assert!(blocks.contains(&(AgentId::new(1), AgentId::new(4))));
        assert!(!inst.is_stable(&mu).unwrap());
    }

    #[test]
    fn no_acceptable_pairs_means_all_single_is_stable() {
        let lists = vec![
            PreferenceList::new(vec![ids(&[2])]).unwrap(),
            PreferenceList::empty(),
        ];
        let inst = Instance::new(2, 1, lists).unwrap();
        let mu = Matching::all_single(&inst);
        assert!(inst.is_stable(&mu).unwrap());
    }

    #[test]
    fn foreign_matching_is_rejected() {
        let srti1 = srti1_instance();
        let srti2 = srti2_instance();
        let mu = Matching::new(&srti2, &pair_list(&[(1, 5)])).unwrap();
        assert_eq!(
            srti1.blocking_pairs(&mu).unwrap_err(),
            MatchingError::WrongAgentCount { expected: 4, got: 5 }
        );
    }
}
