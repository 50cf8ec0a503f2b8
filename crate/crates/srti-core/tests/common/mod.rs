//! Shared helpers for the integration tests: fixture loading, random
//! instance generation for oracle comparisons, and pair-set views.

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use srti_core::io::parse_instance;
use srti_core::{AgentId, Instance, Matching, PreferenceList};

pub fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn fixture_instance(name: &str) -> Instance {
    parse_instance(&fixture(name)).expect("fixture parses")
}

pub fn pairset(mu: &Matching) -> BTreeSet<(u32, u32)> {
    mu.pairs().map(|(a, b)| (a.get(), b.get())).collect()
}

pub fn pairsets(mus: &[Matching]) -> BTreeSet<BTreeSet<(u32, u32)>> {
    mus.iter().map(pairset).collect()
}

/// A random instance with ties and incomplete lists: every agent lists a
/// random subset of the others in random rank groups.
pub fn random_instance(n: u32, rng: &mut ChaCha8Rng) -> Instance {
    let m = rng.random_range(1..n);
    let lists = (0..n)
        .map(|a| {
            let owner = AgentId::new(a + 1);
            let len = rng.random_range(0..=m);
            let mut pool: Vec<AgentId> =
                (1..=n).map(AgentId::new).filter(|&x| x != owner).collect();
            let mut groups: Vec<Vec<AgentId>> = Vec::new();
            for i in 0..len as usize {
                let j = rng.random_range(i..pool.len());
                pool.swap(i, j);
                if groups.is_empty() || rng.random::<f64>() < 0.5 {
                    groups.push(vec![pool[i]]);
                } else {
                    groups.last_mut().unwrap().push(pool[i]);
                }
            }
            PreferenceList::new(groups).unwrap()
        })
        .collect();
    Instance::new(n, m, lists).unwrap()
}

/// A random matching of `inst`: a random subset of the acceptable pairs,
/// greedily made conflict-free.
pub fn random_matching(inst: &Instance, rng: &mut ChaCha8Rng) -> Matching {
    let mut acceptable: Vec<(AgentId, AgentId)> = Vec::new();
    for x in inst.agents() {
        for y in inst.list(x).agents() {
            if x < y && inst.list(y).contains(x) {
                acceptable.push((x, y));
            }
        }
    }
    for i in (1..acceptable.len()).rev() {
        let j = rng.random_range(0..=i);
        acceptable.swap(i, j);
    }
    let mut used = vec![false; inst.n() as usize];
    let mut pairs = Vec::new();
    for (a, b) in acceptable {
        if !used[a.index()] && !used[b.index()] && rng.random::<f64>() < 0.7 {
            used[a.index()] = true;
            used[b.index()] = true;
            pairs.push((a, b));
        }
    }
    Matching::new(inst, &pairs).unwrap()
}
