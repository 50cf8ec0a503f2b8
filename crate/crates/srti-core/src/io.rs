//! Plain-text formats for instances and matchings, plus the JSON provenance
//! sidecar.
//!
//! Instance grammar (`.srti`):
//!
//! ```text
//! agents <n> maxlen <m>
//! 1: (4)
//! 2: (4)
//! 3: (2)
//! 4: (3) (1 2)
//! ```
//!
//! One line per agent, ascending and contiguous; each parenthesized group is
//! a rank group in rank order; an empty list renders as `<id>:`. An optional
//! `flags ...` line may follow the header and is ignored. Matching grammar
//! (`.match`):
//!
//! ```text
//! pairs: (1 4) (7 9)
//! singles: 2 3 5 6 8
//! ```
//!
//! Serialization is canonical — normalized whitespace, ascending ids, LF
//! line endings — so equal values serialize to identical bytes. Parsing is
//! lenient about whitespace and strict about everything else, with line
//! numbers on every error.
//!
//! The provenance sidecar (`.srti.meta`) is a single JSON document tagged by
//! generator kind (`seed`, `seed-combine` or `er`) carrying the parameters
//! and, for generated instances, the witness matchings and the certified
//! lower bound.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combine::CombinedInstance;
use crate::instance::{AgentId, Instance, InstanceError, PreferenceList};
use crate::matching::{Matching, MatchingError};
use crate::seedgen::{SeedInstance, SeedModes, SeedParams};

/// A parse failure, pointing at the offending line (1-based).
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("expected header `agents <n> maxlen <m>`")]
    BadHeader,
    #[error("expected a line for agent {expected}, found `{got}`")]
    AgentLineOrder { expected: u32, got: String },
    #[error("missing line for agent {0}")]
    MissingAgentLine(u32),
    #[error("unexpected trailing content")]
    TrailingContent,
    #[error("malformed rank groups: {0}")]
    BadGroups(String),
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error("expected a `{0}:` line")]
    ExpectedKeyword(&'static str),
    #[error("singles line must list exactly the unmatched agents")]
    SinglesMismatch,
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("invalid provenance document: {0}")]
    Json(String),
}

fn err(line: usize, kind: impl Into<ParseErrorKind>) -> ParseError {
    ParseError { line, kind: kind.into() }
}

/// Canonical text form of an instance.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "agents {} maxlen {}", inst.n(), inst.m()).unwrap();
    for a in inst.agents() {
        write!(out, "{a}:").unwrap();
        for group in inst.list(a).groups() {
            let members: Vec<String> = group.iter().map(AgentId::to_string).collect();
            write!(out, " ({})", members.join(" ")).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses the instance grammar. Errors carry the 1-based line number.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.is_empty() {
        return Err(err(1, ParseErrorKind::BadHeader));
    }
    let tokens: Vec<&str> = lines[0].split_whitespace().collect();
    let (n, m): (u32, u32) = match tokens.as_slice() {
        ["agents", n, "maxlen", m] => (parse_number(n, 1)?, parse_number(m, 1)?),
        _ => return Err(err(1, ParseErrorKind::BadHeader)),
    };
    let mut next = 1;
    if next < lines.len() && lines[next].split_whitespace().next() == Some("flags") {
        next += 1;
    }
    let mut lists: Vec<PreferenceList> = Vec::with_capacity(n as usize);
    for expected in 1..=n {
        if next >= lines.len() {
            return Err(err(lines.len(), ParseErrorKind::MissingAgentLine(expected)));
        }
        let line = lines[next];
        let line_no = next + 1;
        next += 1;
        let order_err = || {
            err(line_no, ParseErrorKind::AgentLineOrder {
                expected,
                got: line.trim().to_string(),
            })
        };
        let colon = line.find(':').ok_or_else(order_err)?;
        let id: u32 = parse_number(line[..colon].trim(), line_no)?;
        if id != expected {
            return Err(order_err());
        }
        let owner = AgentId::new(id);
        let groups = parse_groups(&line[colon + 1..], line_no)?;
        for group in &groups {
            for &entry in group {
                if entry == owner {
                    return Err(err(line_no, InstanceError::SelfReference { owner }));
                }
                if entry.get() > n {
                    return Err(err(line_no, InstanceError::UnknownAgent { owner, entry }));
                }
            }
        }
        let list = PreferenceList::new(groups).map_err(|e| err(line_no, e))?;
        if list.agent_count() > m as usize {
            return Err(err(
                line_no,
                InstanceError::ListTooLong { owner, len: list.agent_count(), m },
            ));
        }
        lists.push(list);
    }
    for (i, line) in lines[next..].iter().enumerate() {
        if !line.trim().is_empty() {
            return Err(err(next + i + 1, ParseErrorKind::TrailingContent));
        }
    }
    Instance::new(n, m, lists).map_err(|e| err(1, e))
}

/// Canonical text form of a matching.
pub fn serialize_matching(mu: &Matching) -> String {
    let mut out = String::from("pairs:");
    for (a, b) in mu.pairs() {
        write!(out, " ({a} {b})").unwrap();
    }
    out.push_str("\nsingles:");
    for s in mu.singles() {
        write!(out, " {s}").unwrap();
    }
    out.push('\n');
    out
}

/// Parses the matching grammar and validates it against `inst`: every pair
/// must be mutually acceptable and the singles line must list exactly the
/// unmatched agents.
pub fn parse_matching(text: &str, inst: &Instance) -> Result<Matching, ParseError> {
    let mut lines = text.lines().enumerate();
    let (pairs_no, pairs_line) = lines
        .next()
        .ok_or_else(|| err(1, ParseErrorKind::ExpectedKeyword("pairs")))?;
    let pairs_rest = pairs_line
        .trim_start()
        .strip_prefix("pairs:")
        .ok_or_else(|| err(pairs_no + 1, ParseErrorKind::ExpectedKeyword("pairs")))?;
    let groups = parse_groups(pairs_rest, pairs_no + 1)?;
    let mut pairs: Vec<(AgentId, AgentId)> = Vec::with_capacity(groups.len());
    for group in groups {
        match group.as_slice() {
            &[a, b] => pairs.push((a, b)),
            other => {
                return Err(err(
                    pairs_no + 1,
                    ParseErrorKind::BadGroups(format!(
                        "a pair needs exactly two agents, got {}",
                        other.len()
                    )),
                ))
            }
        }
    }
    let matching = Matching::new(inst, &pairs).map_err(|e| err(pairs_no + 1, e))?;

    let (singles_no, singles_line) = lines
        .next()
        .ok_or_else(|| err(pairs_no + 2, ParseErrorKind::ExpectedKeyword("singles")))?;
    let singles_rest = singles_line
        .trim_start()
        .strip_prefix("singles:")
        .ok_or_else(|| err(singles_no + 1, ParseErrorKind::ExpectedKeyword("singles")))?;
    let mut singles: Vec<u32> = Vec::new();
    for token in singles_rest.split_whitespace() {
        singles.push(parse_number(token, singles_no + 1)?);
    }
    singles.sort_unstable();
    let implied: Vec<u32> = matching.singles().map(AgentId::get).collect();
    if singles != implied {
        return Err(err(singles_no + 1, ParseErrorKind::SinglesMismatch));
    }
    for (no, line) in lines {
        if !line.trim().is_empty() {
            return Err(err(no + 1, ParseErrorKind::TrailingContent));
        }
    }
    Ok(matching)
}

fn parse_number<T: std::str::FromStr>(token: &str, line: usize) -> Result<T, ParseError> {
    token
        .parse()
        .map_err(|_| err(line, ParseErrorKind::BadNumber(token.to_string())))
}

/// Parses `(a b c) (d) ...` into groups of agent ids.
fn parse_groups(text: &str, line: usize) -> Result<Vec<Vec<AgentId>>, ParseError> {
    let mut groups: Vec<Vec<AgentId>> = Vec::new();
    let mut current: Option<Vec<AgentId>> = None;
    for token in text.split_whitespace() {
        let mut token = token;
        while let Some(rest) = token.strip_prefix('(') {
            if current.is_some() {
                return Err(err(line, ParseErrorKind::BadGroups("nested '('".into())));
            }
            current = Some(Vec::new());
            token = rest;
        }
        let mut closes = 0;
        while let Some(rest) = token.strip_suffix(')') {
            closes += 1;
            token = rest;
        }
        if closes > 1 {
            return Err(err(line, ParseErrorKind::BadGroups("unbalanced ')'".into())));
        }
        if !token.is_empty() {
            let id: u32 = parse_number(token, line)?;
            if id == 0 {
                return Err(err(line, ParseErrorKind::BadNumber("0".into())));
            }
            match current.as_mut() {
                Some(group) => group.push(AgentId::new(id)),
                None => {
                    return Err(err(line, ParseErrorKind::BadGroups(
                        "agent outside any group".into(),
                    )))
                }
            }
        }
        if closes == 1 {
            match current.take() {
                Some(group) => groups.push(group),
                None => {
                    return Err(err(line, ParseErrorKind::BadGroups("unbalanced ')'".into())))
                }
            }
        }
    }
    if current.is_some() {
        return Err(err(line, ParseErrorKind::BadGroups("unclosed '('".into())));
    }
    Ok(groups)
}

// ---------------------------------------------------------------------------
// provenance

/// Structural errors in a provenance document checked against its instance.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DocumentError {
    #[error("document records n={doc} but the instance has n={inst}")]
    WrongN { doc: u32, inst: u32 },
    #[error("document records m={doc} but the instance has m={inst}")]
    WrongM { doc: u32, inst: u32 },
    #[error("document records k={k} but carries {got} witnesses")]
    WrongK { k: u32, got: usize },
    #[error("seed {seed}: witness {index} does not partition its agent block")]
    BlockMismatch { seed: usize, index: usize },
    #[error("lower bound {recorded} differs from the witness-count product {product}")]
    LowerBoundMismatch { recorded: u128, product: u128 },
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Seed(#[from] crate::seedgen::SeedViolation),
}

/// A matching in document form: explicit pair and single lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingRepr {
    pub pairs: Vec<(u32, u32)>,
    pub singles: Vec<u32>,
}

impl MatchingRepr {
    pub fn from_matching(mu: &Matching) -> Self {
        MatchingRepr {
            pairs: mu.pairs().map(|(a, b)| (a.get(), b.get())).collect(),
            singles: mu.singles().map(AgentId::get).collect(),
        }
    }

    pub fn to_pairs(&self) -> Vec<(AgentId, AgentId)> {
        self.pairs
            .iter()
            .map(|&(a, b)| (AgentId::new(a), AgentId::new(b)))
            .collect()
    }

    /// Rebuilds a full matching over `inst`; the recorded singles must be
    /// exactly the unmatched agents.
    pub fn to_matching(&self, inst: &Instance) -> Result<Matching, DocumentError> {
        let mu = Matching::new(inst, &self.to_pairs())?;
        let implied: Vec<u32> = mu.singles().map(AgentId::get).collect();
        let mut recorded = self.singles.clone();
        recorded.sort_unstable();
        if recorded != implied {
            return Err(DocumentError::Matching(MatchingError::WrongAgentCount {
                expected: inst.n(),
                got: (self.pairs.len() * 2 + self.singles.len()) as u32,
            }));
        }
        Ok(mu)
    }
}

/// Provenance of a generated seed instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedProvenance {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub modes: SeedModes,
    pub rng_seed: u64,
    pub attempt_budget: u32,
    pub witnesses: Vec<MatchingRepr>,
}

impl SeedProvenance {
    pub fn new(params: &SeedParams, seed: &SeedInstance) -> Self {
        SeedProvenance {
            n: seed.n(),
            m: seed.m(),
            k: seed.k(),
            modes: seed.modes(),
            rng_seed: params.rng_seed,
            attempt_budget: params.attempt_budget,
            witnesses: seed.witnesses().iter().map(MatchingRepr::from_matching).collect(),
        }
    }

    /// Rebuilds and revalidates the seed against its parsed instance.
    pub fn to_seed(&self, instance: Instance) -> Result<SeedInstance, DocumentError> {
        if self.n != instance.n() {
            return Err(DocumentError::WrongN { doc: self.n, inst: instance.n() });
        }
        if self.m != instance.m() {
            return Err(DocumentError::WrongM { doc: self.m, inst: instance.m() });
        }
        if self.k as usize != self.witnesses.len() {
            return Err(DocumentError::WrongK { k: self.k, got: self.witnesses.len() });
        }
        let witnesses = self
            .witnesses
            .iter()
            .map(|w| w.to_matching(&instance))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SeedInstance::new(instance, witnesses, self.modes)?)
    }
}

/// One seed block of a combined instance, in global agent ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedBlockProvenance {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub witnesses: Vec<MatchingRepr>,
}

/// Provenance of a combined instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombineProvenance {
    pub p1: f64,
    pub p2: f64,
    pub m_cap: u32,
    pub rng_seed: u64,
    pub smti_mode: bool,
    pub symmetric: bool,
    pub lower_bound: u128,
    pub seeds: Vec<SeedBlockProvenance>,
}

impl CombineProvenance {
    pub fn new(combined: &CombinedInstance) -> Self {
        let params = combined.params();
        CombineProvenance {
            p1: params.p1,
            p2: params.p2,
            m_cap: params.m_cap,
            rng_seed: params.rng_seed,
            smti_mode: params.smti_mode,
            symmetric: params.symmetric,
            lower_bound: combined.lower_bound(),
            seeds: combined
                .seeds()
                .iter()
                .map(|placed| SeedBlockProvenance {
                    n: placed.n(),
                    m: placed.seed().m(),
                    k: placed.seed().k(),
                    witnesses: (0..placed.seed().witnesses().len())
                        .map(|i| {
                            let pairs = placed
                                .witness_pairs_global(i)
                                .iter()
                                .map(|&(a, b)| (a.get(), b.get()))
                                .collect();
                            let singles = placed
                                .global_agents()
                                .filter(|&a| {
                                    !placed
                                        .witness_pairs_global(i)
                                        .iter()
                                        .any(|&(x, y)| x == a || y == a)
                                })
                                .map(AgentId::get)
                                .collect();
                            MatchingRepr { pairs, singles }
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Witness pair sets per seed, for preservation checks, after verifying
    /// that the blocks partition the instance and the recorded lower bound
    /// is the product of the witness counts.
    pub fn witness_pair_sets(
        &self,
        inst: &Instance,
    ) -> Result<Vec<Vec<Vec<(AgentId, AgentId)>>>, DocumentError> {
        let total: u32 = self.seeds.iter().map(|s| s.n).sum();
        if total != inst.n() {
            return Err(DocumentError::WrongN { doc: total, inst: inst.n() });
        }
        let mut product: u128 = 1;
        let mut offset = 0u32;
        let mut sets = Vec::with_capacity(self.seeds.len());
        for (si, block) in self.seeds.iter().enumerate() {
            if block.k as usize != block.witnesses.len() {
                return Err(DocumentError::WrongK { k: block.k, got: block.witnesses.len() });
            }
            product = product.saturating_mul(block.k as u128);
            let lo = offset + 1;
            let hi = offset + block.n;
            let mut set = Vec::with_capacity(block.witnesses.len());
            for (wi, w) in block.witnesses.iter().enumerate() {
                let mut covered: Vec<u32> = w.singles.clone();
                for &(a, b) in &w.pairs {
                    covered.push(a);
                    covered.push(b);
                }
                covered.sort_unstable();
                let expected: Vec<u32> = (lo..=hi).collect();
                if covered != expected {
                    return Err(DocumentError::BlockMismatch { seed: si, index: wi });
                }
                set.push(w.to_pairs());
            }
            sets.push(set);
            offset = hi;
        }
        if product != self.lower_bound {
            return Err(DocumentError::LowerBoundMismatch {
                recorded: self.lower_bound,
                product,
            });
        }
        Ok(sets)
    }
}

/// Provenance of a random-graph baseline instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErProvenance {
    pub n: u32,
    pub p: f64,
    pub rng_seed: u64,
}

/// The sidecar document, tagged by generator kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator")]
pub enum ProvenanceDocument {
    #[serde(rename = "seed")]
    Seed(SeedProvenance),
    #[serde(rename = "seed-combine")]
    SeedCombine(CombineProvenance),
    #[serde(rename = "er")]
    Er(ErProvenance),
}

/// Canonical JSON form of a provenance document.
pub fn serialize_provenance(doc: &ProvenanceDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("provenance serializes");
    text.push('\n');
    text
}

pub fn parse_provenance(text: &str) -> Result<ProvenanceDocument, ParseError> {
    serde_json::from_str(text).map_err(|e| err(e.line(), ParseErrorKind::Json(e.to_string())))
}
