//! Brute-force reference implementations.
//!
//! These favor clarity over speed and stay off the indexed search kernel in
//! [`crate::enumerate`], so they can serve as independent cross-checks on
//! small instances: ranks are re-read from the raw rank groups, blocking
//! pairs come from a quadratic scan over all agent pairs, and stable
//! matchings are found by filtering every involution over the acceptable
//! pairs. Only practical for `n` up to about 10.

use crate::instance::{AgentId, Instance};
use crate::matching::Matching;

/// Rank of `y` in `x`'s list by a direct walk over the rank groups.
pub fn rank_by_scan(inst: &Instance, x: AgentId, y: AgentId) -> Option<u32> {
    for (i, group) in inst.list(x).groups().iter().enumerate() {
        if group.contains(&y) {
            return Some(i as u32 + 1);
        }
    }
    None
}

/// Blocking pairs of `mu` by checking the three blocking conditions on every
/// unordered pair of agents.
pub fn blocking_pairs_by_scan(inst: &Instance, mu: &Matching) -> Vec<(AgentId, AgentId)> {
    let n = inst.n();
    let mut out = Vec::new();
    for xi in 1..=n {
        for yi in (xi + 1)..=n {
            let (x, y) = (AgentId::new(xi), AgentId::new(yi));
            let rank_xy = rank_by_scan(inst, x, y);
            let rank_yx = rank_by_scan(inst, y, x);
            if rank_xy.is_none() || rank_yx.is_none() || mu.partner(x) == Some(y) {
                continue;
            }
            let x_wants = match mu.partner(x) {
                None => true,
                Some(q) => rank_xy.unwrap() < rank_by_scan(inst, x, q).unwrap(),
            };
            let y_wants = match mu.partner(y) {
                None => true,
                Some(p) => rank_yx.unwrap() < rank_by_scan(inst, y, p).unwrap(),
            };
            if x_wants && y_wants {
                out.push((x, y));
            }
        }
    }
    out
}

/// All stable matchings of `inst`, by enumerating every involution over the
/// acceptable pairs and keeping those without a blocking pair.
pub fn all_stable_matchings(inst: &Instance) -> Vec<Matching> {
    let n = inst.n() as usize;
    let mut partner: Vec<Option<AgentId>> = vec![None; n];
    let mut out = Vec::new();
    extend(inst, &mut partner, 0, &mut out);
    out
}

fn extend(
    inst: &Instance,
    partner: &mut Vec<Option<AgentId>>,
    from: usize,
    out: &mut Vec<Matching>,
) {
    let n = partner.len();
    let mut a = from;
    while a < n && partner[a].is_some() {
        a += 1;
    }
    if a == n {
        let mu = Matching::from_partner(partner.clone());
        if blocking_pairs_by_scan(inst, &mu).is_empty() {
            out.push(mu);
        }
        return;
    }
    let x = AgentId::from_index(a);
    // leave x single
    extend(inst, partner, a + 1, out);
    // or pair x with any later unmatched mutually acceptable agent
    for b in (a + 1)..n {
        let y = AgentId::from_index(b);
        if partner[b].is_none()
            && rank_by_scan(inst, x, y).is_some()
            && rank_by_scan(inst, y, x).is_some()
        {
            partner[a] = Some(y);
            partner[b] = Some(x);
            extend(inst, partner, a + 1, out);
            partner[a] = None;
            partner[b] = None;
        }
    }
}
