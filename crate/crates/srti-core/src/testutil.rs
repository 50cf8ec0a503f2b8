//! Shared fixtures for unit tests. The three instances mirror the small
//! worked example used across the test suite: two seeds (4 and 5 agents) and
//! the 9-agent instance obtained by combining them.

use crate::instance::{AgentId, Instance, PreferenceList};
use crate::matching::Matching;
use crate::seedgen::{SeedInstance, SeedModes};

pub fn ids(v: &[u32]) -> Vec<AgentId> {
    v.iter().copied().map(AgentId::new).collect()
}

pub fn pair_list(pairs: &[(u32, u32)]) -> Vec<(AgentId, AgentId)> {
    pairs
        .iter()
        .map(|&(a, b)| (AgentId::new(a), AgentId::new(b)))
        .collect()
}

pub fn instance_from(n: u32, m: u32, lists: &[&[&[u32]]]) -> Instance {
    let lists = lists
        .iter()
        .map(|groups| {
            PreferenceList::new(groups.iter().map(|g| ids(g)).collect()).unwrap()
        })
        .collect();
    Instance::new(n, m, lists).unwrap()
}

/// First seed: 4 agents, 2 stable matchings {(1,4)} and {(2,4)}.
pub fn srti1_instance() -> Instance {
    instance_from(
        4,
        3,
        &[&[&[4]], &[&[4]], &[&[2]], &[&[3], &[1, 2]]],
    )
}

/// Second seed (local ids 1..5): 3 stable matchings {(3,5)}, {(2,5)},
/// {(1,5)}.
pub fn srti2_instance() -> Instance {
    instance_from(
        5,
        4,
        &[&[&[5]], &[&[4], &[3], &[5]], &[&[5]], &[&[3]], &[&[1, 2, 3]]],
    )
}

/// The combined 9-agent instance; agents 1..4 come from the first seed and
/// 5..9 from the second. It has exactly 8 stable matchings.
pub fn srti3_instance() -> Instance {
    instance_from(
        9,
        8,
        &[
            &[&[7, 9], &[4]],
            &[&[4]],
            &[&[2], &[9]],
            &[&[3], &[1, 2], &[7], &[9], &[8]],
            &[&[4, 9], &[3]],
            &[&[8], &[4], &[7], &[9]],
            &[&[9], &[4]],
            &[&[2, 3, 7], &[4]],
            &[&[2, 3, 5, 6, 7], &[4]],
        ],
    )
}

/// The 8 stable matchings of the combined instance, as pair sets.
pub fn srti3_stable_pairsets() -> Vec<Vec<(u32, u32)>> {
    vec![
        vec![(1, 4), (7, 9)],
        vec![(1, 4), (6, 9)],
        vec![(1, 4), (5, 9)],
        vec![(2, 4), (7, 9)],
        vec![(2, 4), (6, 9)],
        vec![(2, 4), (5, 9)],
        vec![(2, 4), (3, 9)],
        vec![(1, 4), (3, 9)],
    ]
}

pub fn matching(inst: &Instance, pairs: &[(u32, u32)]) -> Matching {
    Matching::new(inst, &pair_list(pairs)).unwrap()
}

/// First seed with its two witnesses.
pub fn srti1_seed() -> SeedInstance {
    let inst = srti1_instance();
    let witnesses = vec![matching(&inst, &[(1, 4)]), matching(&inst, &[(2, 4)])];
    SeedInstance::new(inst, witnesses, SeedModes::default()).unwrap()
}

/// Second seed with its three witnesses.
pub fn srti2_seed() -> SeedInstance {
    let inst = srti2_instance();
    let witnesses = vec![
        matching(&inst, &[(3, 5)]),
        matching(&inst, &[(2, 5)]),
        matching(&inst, &[(1, 5)]),
    ];
    SeedInstance::new(inst, witnesses, SeedModes::default()).unwrap()
}
