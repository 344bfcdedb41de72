//! Communication graphs, oblivious message adversaries and dynamic network
//! models, with generators for the standard examples.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cset::{AgentMask, AgentSet};
use crate::error::{Error, Result};

/// A directed graph on a set of participating agents. A self-loop marks an
/// agent as active in the round; agents without one have crashed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommGraph {
    vertices: AgentMask,
    /// `(sender, receiver)` pairs, kept sorted.
    edges: BTreeSet<(usize, usize)>,
}

impl CommGraph {
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(vertices: AgentMask, edges: I) -> Result<Self> {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        if let Some(&(s, r)) = edges
            .iter()
            .find(|&&(s, r)| !vertices.contains(s) || !vertices.contains(r))
        {
            return Err(Error::InvalidAdversary(format!(
                "edge {}->{} leaves the vertex set",
                s, r
            )));
        }
        Ok(CommGraph { vertices, edges })
    }

    /// The complete graph on `u`, self-loops included.
    pub fn complete(u: AgentMask) -> Self {
        let edges = u.iter().flat_map(|s| u.iter().map(move |r| (s, r))).collect();
        CommGraph { vertices: u, edges }
    }

    pub fn vertices(&self) -> AgentMask {
        self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn is_active(&self, agent: usize) -> bool {
        self.edges.contains(&(agent, agent))
    }

    pub fn active(&self) -> AgentMask {
        AgentMask::from_agents(self.vertices.iter().filter(|&a| self.is_active(a)))
    }

    pub fn crashed(&self) -> AgentMask {
        self.vertices.minus(self.active())
    }

    /// In-neighbourhood of an active agent; `None` for crashed agents.
    pub fn view(&self, agent: usize) -> Option<AgentMask> {
        if !self.is_active(agent) {
            return None;
        }
        Some(AgentMask::from_agents(
            self.edges.iter().filter(|&&(_, r)| r == agent).map(|&(s, _)| s),
        ))
    }

    /// Induced subgraph on `u ∩ vertices`.
    pub fn restrict(&self, u: AgentMask) -> CommGraph {
        let vertices = self.vertices.intersection(u);
        CommGraph {
            vertices,
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&(s, r)| vertices.contains(s) && vertices.contains(r))
                .collect(),
        }
    }

    /// Applies an agent renaming.
    pub fn permute(&self, perm: &[usize]) -> CommGraph {
        CommGraph {
            vertices: AgentMask::from_agents(self.vertices.iter().map(|a| perm[a])),
            edges: self.edges.iter().map(|&(s, r)| (perm[s], perm[r])).collect(),
        }
    }

    pub fn describe(&self, agents: &AgentSet) -> String {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|&(s, r)| format!("{}->{}", agents.name(s), agents.name(r)))
            .collect();
        format!("{} [{}]", agents.braced(self.vertices), edges.join(" "))
    }
}

/// Ordered partitions `(S_1, ..., S_k)` of `u` into non-empty blocks.
pub fn ordered_partitions(u: AgentMask) -> Vec<Vec<AgentMask>> {
    if u.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in u.subsets() {
        if first.is_empty() {
            continue;
        }
        for mut rest in ordered_partitions(u.minus(first)) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// One graph per ordered partition of `u`: `a -> b` whenever `a`'s block does
/// not come after `b`'s. Empty `u` gives no graphs.
pub fn immediate_snapshot(u: AgentMask) -> BTreeSet<CommGraph> {
    if u.is_empty() {
        return BTreeSet::new();
    }
    ordered_partitions(u)
        .into_iter()
        .map(|blocks| {
            let mut edges = Vec::new();
            for (i, si) in blocks.iter().enumerate() {
                for sj in &blocks[i..] {
                    for a in si.iter() {
                        edges.extend(sj.iter().map(|b| (a, b)));
                    }
                }
            }
            CommGraph::new(u, edges).expect("edges within u")
        })
        .collect()
}

/// `{ K_u }`.
pub fn reliable_broadcast(u: AgentMask) -> BTreeSet<CommGraph> {
    [CommGraph::complete(u)].into_iter().collect()
}

/// Synchronous broadcast with at most one crash per round.
///
/// A crashed agent `c` delivers its message to an arbitrary subset `R` of the
/// other agents (the rest of the graph is complete). With `detectable`, the
/// case where `c` still reached every other agent is left out, since nobody
/// could notice the crash; when `c` is alone that exclusion is vacuous.
pub fn synchronous_broadcast(u: AgentMask, detectable: bool) -> BTreeSet<CommGraph> {
    let mut out = BTreeSet::new();
    out.insert(CommGraph::complete(u));
    for c in u.iter() {
        let others = u.without(c);
        for reached in others.subsets() {
            if detectable && !others.is_empty() && reached == others {
                continue;
            }
            let mut edges: Vec<(usize, usize)> = CommGraph::complete(others).edges.into_iter().collect();
            edges.extend(others.iter().map(|o| (o, c)));
            edges.extend(reached.iter().map(|r| (c, r)));
            out.insert(CommGraph::new(u, edges).expect("edges within u"));
        }
    }
    out
}

/// A family `M(U)` of oblivious message adversaries, one per subset of agents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicNetworkModel {
    agents: AgentSet,
    graphs: BTreeMap<AgentMask, BTreeSet<CommGraph>>,
}

impl DynamicNetworkModel {
    pub fn new(agents: AgentSet) -> Self {
        DynamicNetworkModel {
            agents,
            graphs: BTreeMap::new(),
        }
    }

    /// `M(U) = generate(U)` for every subset `U`.
    pub fn per_subset(agents: AgentSet, generate: impl Fn(AgentMask) -> BTreeSet<CommGraph>) -> Self {
        let graphs = agents
            .full()
            .subsets()
            .into_iter()
            .map(|u| (u, generate(u)))
            .filter(|(_, g)| !g.is_empty())
            .collect();
        DynamicNetworkModel { agents, graphs }
    }

    pub fn immediate_snapshot(agents: AgentSet) -> Self {
        DynamicNetworkModel::per_subset(agents, immediate_snapshot)
    }

    pub fn reliable_broadcast(agents: AgentSet) -> Self {
        DynamicNetworkModel::per_subset(agents, reliable_broadcast)
    }

    /// Synchronous broadcast on the full agent set, closed uniformly under
    /// restriction, with a total budget of one crash.
    pub fn synchronous_broadcast(agents: AgentSet, detectable: bool) -> Self {
        let full = synchronous_broadcast(agents.full(), detectable);
        uniform_closure(&agents, &full).k_resilient(1)
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn set(&mut self, u: AgentMask, graphs: BTreeSet<CommGraph>) -> Result<()> {
        if let Some(g) = graphs.iter().find(|g| g.vertices() != u) {
            return Err(Error::InvalidAdversary(format!(
                "graph {} is not on {}",
                g.describe(&self.agents),
                self.agents.braced(u)
            )));
        }
        if graphs.is_empty() {
            self.graphs.remove(&u);
        } else {
            self.graphs.insert(u, graphs);
        }
        Ok(())
    }

    pub fn graphs(&self, u: AgentMask) -> impl Iterator<Item = &CommGraph> {
        self.graphs.get(&u).into_iter().flatten()
    }

    pub fn count(&self, u: AgentMask) -> usize {
        self.graphs.get(&u).map_or(0, BTreeSet::len)
    }

    /// Subsets with a non-empty adversary.
    pub fn supports(&self) -> impl Iterator<Item = AgentMask> + '_ {
        self.graphs.keys().copied()
    }

    /// Drops graphs once the crash budget `k` is used up: `M'(U)` is empty
    /// when more than `k` agents are missing from `U`, and when exactly `k`
    /// are missing only crash-free graphs remain.
    pub fn k_resilient(&self, k: usize) -> Self {
        let n = self.agents.len();
        let graphs = self
            .graphs
            .iter()
            .filter_map(|(&u, gs)| {
                let missing = n - u.len();
                if missing > k {
                    return None;
                }
                let kept: BTreeSet<CommGraph> = gs
                    .iter()
                    .filter(|g| missing < k || g.crashed().is_empty())
                    .cloned()
                    .collect();
                (!kept.is_empty()).then_some((u, kept))
            })
            .collect();
        DynamicNetworkModel {
            agents: self.agents.clone(),
            graphs,
        }
    }
}

/// `M(U) = { G restricted to U | G ∈ M_A }`.
pub fn uniform_closure(agents: &AgentSet, full: &BTreeSet<CommGraph>) -> DynamicNetworkModel {
    DynamicNetworkModel::per_subset(agents.clone(), |u| full.iter().map(|g| g.restrict(u)).collect())
}

/// JSON adversary description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    #[serde(default)]
    pub params: AdversaryParams,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub graphs: Vec<GraphSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    ImmediateSnapshot,
    ReliableBroadcast,
    SyncBroadcast,
    Explicit,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<Vec<String>>,
    /// Synchronous broadcast only; defaults to undetectable crashes.
    #[serde(default)]
    pub detectable: bool,
    /// Crash budget applied after the closure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

/// A graph on the full agent set as an edge list of agent names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub edges: Vec<(String, String)>,
}

impl AdversarySpec {
    pub fn builtin(kind: AdversaryKind) -> Self {
        AdversarySpec {
            kind,
            params: AdversaryParams::default(),
            graphs: Vec::new(),
        }
    }

    /// Builds the model over `agents` (or the agents named in `params`,
    /// which must then agree).
    pub fn to_model(&self, agents: &AgentSet) -> Result<DynamicNetworkModel> {
        if let Some(names) = &self.params.agents {
            if names.as_slice() != agents.names() {
                return Err(Error::AgentSetMismatch);
            }
        }
        let model = match self.kind {
            AdversaryKind::ImmediateSnapshot => DynamicNetworkModel::immediate_snapshot(agents.clone()),
            AdversaryKind::ReliableBroadcast => DynamicNetworkModel::reliable_broadcast(agents.clone()),
            AdversaryKind::SyncBroadcast => {
                let full = synchronous_broadcast(agents.full(), self.params.detectable);
                let closed = uniform_closure(agents, &full);
                return Ok(closed.k_resilient(self.params.k.unwrap_or(1)));
            }
            AdversaryKind::Explicit => {
                let full = self
                    .graphs
                    .iter()
                    .map(|g| {
                        let edges = g
                            .edges
                            .iter()
                            .map(|(s, r)| Ok((agents.index_of(s)?, agents.index_of(r)?)))
                            .collect::<Result<Vec<_>>>()?;
                        CommGraph::new(agents.full(), edges)
                    })
                    .collect::<Result<BTreeSet<_>>>()?;
                uniform_closure(agents, &full)
            }
        };
        Ok(match self.params.k {
            Some(k) => model.k_resilient(k),
            None => model,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn permutation_closed(gs: &BTreeSet<CommGraph>, n: usize) -> bool {
        all_perms(n)
            .iter()
            .all(|p| gs.iter().all(|g| gs.contains(&g.permute(p))))
    }

    /// Ordered Bell numbers by the recurrence a(n) = Σ_k C(n,k) a(n-k).
    fn ordered_bell(n: usize) -> usize {
        let mut a = vec![1usize; n + 1];
        for m in 1..=n {
            let mut binom = 1usize;
            let mut s = 0;
            for k in 1..=m {
                binom = binom * (m - k + 1) / k;
                s += binom * a[m - k];
            }
            a[m] = s;
        }
        a[n]
    }

    #[test]
    fn immediate_snapshot_counts() {
        assert_eq!(immediate_snapshot(AgentMask(0b1)).len(), 1);
        assert_eq!(immediate_snapshot(AgentMask(0b11)).len(), 3);
        assert_eq!(immediate_snapshot(AgentMask(0b111)).len(), 13);
        for n in 1..=4 {
            let u = AgentMask((1 << n) - 1);
            assert_eq!(immediate_snapshot(u).len(), ordered_bell(n));
            assert!(immediate_snapshot(u).iter().all(|g| g.active() == u));
        }
        assert!(immediate_snapshot(AgentMask::EMPTY).is_empty());
    }

    #[test]
    fn single_agent_snapshot_is_a_self_loop() {
        let g = immediate_snapshot(AgentMask(0b1)).into_iter().next().unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.view(0), Some(AgentMask(0b1)));
    }

    #[test]
    fn reliable_broadcast_is_complete() {
        let g = reliable_broadcast(AgentMask(0b11));
        assert_eq!(g.len(), 1);
        assert_eq!(g.iter().next().unwrap().edges().len(), 4);
        assert_eq!(
            reliable_broadcast(AgentMask(0b111))
                .iter()
                .next()
                .unwrap()
                .edges()
                .len(),
            9
        );
        let e = reliable_broadcast(AgentMask::EMPTY);
        assert_eq!(e.len(), 1);
        assert!(e.iter().next().unwrap().edges().is_empty());
    }

    #[test]
    fn synchronous_broadcast_counts() {
        let abc = AgentMask(0b111);
        assert_eq!(synchronous_broadcast(abc, true).len(), 10);
        assert_eq!(synchronous_broadcast(abc, false).len(), 13);
        for flag in [true, false] {
            let single = synchronous_broadcast(AgentMask(0b1), flag);
            let expected: BTreeSet<CommGraph> = [
                CommGraph::complete(AgentMask(0b1)),
                CommGraph::new(AgentMask(0b1), []).unwrap(),
            ]
            .into_iter()
            .collect();
            assert_eq!(single, expected);
            assert!(permutation_closed(&synchronous_broadcast(abc, flag), 3));
        }
        assert!(permutation_closed(&immediate_snapshot(abc), 3));
    }

    #[test]
    fn views_contain_self() {
        for g in synchronous_broadcast(AgentMask(0b111), false) {
            for a in g.active().iter() {
                assert!(g.view(a).unwrap().contains(a));
            }
            for c in g.crashed().iter() {
                assert_eq!(g.view(c), None);
            }
        }
    }

    #[test]
    fn uniform_closure_restricts() {
        let agents = AgentSet::alphabetic(3);
        let rb = uniform_closure(&agents, &reliable_broadcast(agents.full()));
        for u in agents.full().subsets() {
            assert_eq!(rb.graphs(u).cloned().collect::<BTreeSet<_>>(), reliable_broadcast(u));
        }
        let is = uniform_closure(&agents, &immediate_snapshot(agents.full()));
        let ab = AgentMask(0b011);
        let restricted: BTreeSet<_> = is.graphs(ab).cloned().collect();
        assert!(restricted.is_superset(&immediate_snapshot(ab)));
        // restriction drops edges into removed vertices
        let g = CommGraph::complete(agents.full()).restrict(ab);
        assert_eq!(g.edges().len(), 4);
    }

    #[test]
    fn k_resilience() {
        let agents = AgentSet::alphabetic(3);
        let m = uniform_closure(&agents, &synchronous_broadcast(agents.full(), false));
        assert_eq!(m.k_resilient(3), m);
        let k0 = m.k_resilient(0);
        assert_eq!(k0.supports().collect::<Vec<_>>(), vec![agents.full()]);
        assert_eq!(k0.count(agents.full()), 1);
        let k1 = m.k_resilient(1);
        let ab = AgentMask(0b011);
        // restrictions on {a,b}: complete, plus a or b crashed with or without
        // the message to the other one
        assert_eq!(m.count(ab), 5);
        assert_eq!(k1.count(ab), 1);
        assert_eq!(k1.count(agents.full()), 13);
        assert_eq!(k1.count(AgentMask(0b001)), 0);
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"kind":"explicit","params":{"k":1},"graphs":[{"edges":[["a","a"],["b","b"],["a","b"]]}]}"#;
        let spec: AdversarySpec = serde_json::from_str(text).unwrap();
        let agents = AgentSet::alphabetic(2);
        let m = spec.to_model(&agents).unwrap();
        assert_eq!(m.count(agents.full()), 1);
        let again: AdversarySpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(again, spec);
        let bad = r#"{"kind":"explicit","graphs":[{"edges":[["a","z"]]}]}"#;
        let spec: AdversarySpec = serde_json::from_str(bad).unwrap();
        assert!(spec.to_model(&agents).is_err());
    }
}
