use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of agents; color sets are packed into a `u32`.
pub const MAX_AGENTS: usize = 32;

/// A subset of the agent set, packed as a bit mask over agent indices.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AgentMask(pub u32);

impl AgentMask {
    pub const EMPTY: AgentMask = AgentMask(0);

    pub fn singleton(agent: usize) -> Self {
        AgentMask(1 << agent)
    }

    pub fn from_agents<I: IntoIterator<Item = usize>>(agents: I) -> Self {
        agents.into_iter().fold(AgentMask::EMPTY, |m, a| m.with(a))
    }

    pub fn with(self, agent: usize) -> Self {
        AgentMask(self.0 | (1 << agent))
    }

    pub fn without(self, agent: usize) -> Self {
        AgentMask(self.0 & !(1 << agent))
    }

    pub fn contains(self, agent: usize) -> bool {
        self.0 & (1 << agent) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: AgentMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: AgentMask) -> Self {
        AgentMask(self.0 | other.0)
    }

    pub fn intersection(self, other: AgentMask) -> Self {
        AgentMask(self.0 & other.0)
    }

    pub fn minus(self, other: AgentMask) -> Self {
        AgentMask(self.0 & !other.0)
    }

    /// Agent indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_AGENTS).filter(move |i| bits & (1 << i) != 0)
    }

    /// All subsets, including the empty set and `self`, ordered by (size, bits).
    pub fn subsets(self) -> Vec<AgentMask> {
        let mut out = Vec::with_capacity(1 << self.len());
        let mut sub = self.0;
        loop {
            out.push(AgentMask(sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & self.0;
        }
        out.sort_by_key(|m| m.level_key());
        out
    }

    pub fn proper_subsets(self) -> Vec<AgentMask> {
        let mut subs = self.subsets();
        subs.pop();
        subs
    }

    /// Sort key putting smaller color sets first.
    pub fn level_key(self) -> (u32, u32) {
        (self.0.count_ones(), self.0)
    }
}

impl fmt::Debug for AgentMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AgentMask({:#b})", self.0)
    }
}

/// The totally ordered finite set of agent names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct AgentSet {
    names: Vec<String>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl AgentSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_AGENTS {
            return Err(Error::TooManyAgents {
                max: MAX_AGENTS,
                got: names.len(),
            });
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) || is_reserved(n) {
                return Err(Error::InvalidAgentName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(Error::DuplicateAgent(n.clone()));
            }
        }
        Ok(AgentSet { names })
    }

    /// Agents named `a`, `b`, `c`, ... in that order.
    pub fn alphabetic(n: usize) -> Self {
        AgentSet::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string())).expect("alphabetic names are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, agent: usize) -> &str {
        &self.names[agent]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownAgent(name.to_string()))
    }

    pub fn full(&self) -> AgentMask {
        AgentMask(((1u64 << self.names.len()) - 1) as u32)
    }

    pub fn mask_of<S: AsRef<str>>(&self, names: &[S]) -> Result<AgentMask> {
        names
            .iter()
            .try_fold(AgentMask::EMPTY, |m, n| Ok(m.with(self.index_of(n.as_ref())?)))
    }

    /// Comma-joined names in agent order; the empty set renders as "".
    pub fn join(&self, mask: AgentMask) -> String {
        mask.iter()
            .map(|i| self.names[i].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Set notation, e.g. `{a,b}`.
    pub fn braced(&self, mask: AgentMask) -> String {
        format!("{{{}}}", self.join(mask))
    }

    /// Inverse of [`AgentSet::join`]; whitespace around names is ignored.
    pub fn parse_mask(&self, text: &str) -> Result<AgentMask> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(AgentMask::EMPTY);
        }
        text.split(',')
            .try_fold(AgentMask::EMPTY, |m, n| Ok(m.with(self.index_of(n.trim())?)))
    }
}

/// Names the formula parser treats as keywords.
pub(crate) fn is_reserved(name: &str) -> bool {
    matches!(
        name,
        "X" | "K" | "C" | "D" | "Khat" | "Dhat" | "dead" | "alive" | "true" | "false"
    )
}

impl TryFrom<Vec<String>> for AgentSet {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        AgentSet::new(names)
    }
}

impl From<AgentSet> for Vec<String> {
    fn from(set: AgentSet) -> Self {
        set.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_ordered_by_size() {
        let m = AgentMask(0b111);
        let subs = m.subsets();
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[0], AgentMask::EMPTY);
        assert_eq!(*subs.last().unwrap(), m);
        assert!(subs.windows(2).all(|w| w[0].level_key() < w[1].level_key()));
        assert_eq!(m.proper_subsets().len(), 7);
    }

    #[test]
    fn rejects_duplicates_and_keywords() {
        assert!(matches!(AgentSet::new(["a", "a"]), Err(Error::DuplicateAgent(_))));
        assert!(matches!(AgentSet::new(["X"]), Err(Error::InvalidAgentName(_))));
        assert!(AgentSet::new(["p1", "p2"]).is_ok());
    }

    #[test]
    fn mask_text_round_trip() {
        let agents = AgentSet::alphabetic(3);
        let m = agents.parse_mask("c, a").unwrap();
        assert_eq!(agents.join(m), "a,c");
        assert_eq!(agents.braced(AgentMask::EMPTY), "{}");
        assert!(agents.parse_mask("a,z").is_err());
    }
}
