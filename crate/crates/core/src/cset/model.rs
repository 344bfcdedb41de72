use std::collections::{BTreeMap, BTreeSet};

use super::{Cset, CsetMorphism, SimplexId};
use crate::error::{Error, Result};

/// A cset with atomic propositions attached to its vertices.
///
/// Atoms on an `a`-colored vertex belong to agent `a`; the label of a
/// higher simplex is the union of its vertex labels and is computed on
/// demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialModel {
    pub cset: Cset,
    labels: BTreeMap<SimplexId, BTreeSet<String>>,
}

impl SimplicialModel {
    pub fn new(cset: Cset, labels: BTreeMap<SimplexId, BTreeSet<String>>) -> Result<Self> {
        for &v in labels.keys() {
            if v >= cset.len() || cset.color(v).len() != 1 {
                return Err(Error::MalformedCset(format!(
                    "label attached to {} which is not a vertex",
                    v
                )));
            }
        }
        Ok(SimplicialModel { cset, labels })
    }

    pub fn unlabeled(cset: Cset) -> Self {
        SimplicialModel {
            cset,
            labels: BTreeMap::new(),
        }
    }

    /// Labels vertices through `f(vertex id)`.
    pub fn labeled_by(cset: Cset, f: impl Fn(&Cset, SimplexId) -> BTreeSet<String>) -> Self {
        let labels = cset
            .vertices()
            .into_iter()
            .map(|v| (v, f(&cset, v)))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        SimplicialModel { cset, labels }
    }

    pub fn vertex_labels(&self) -> &BTreeMap<SimplexId, BTreeSet<String>> {
        &self.labels
    }

    pub fn label(&self, vertex: SimplexId) -> Option<&BTreeSet<String>> {
        self.labels.get(&vertex)
    }

    /// Whether atom `name` of `agent` holds at simplex `x`.
    pub fn holds(&self, x: SimplexId, agent: usize, name: &str) -> bool {
        self.cset
            .vertex(x, agent)
            .and_then(|v| self.labels.get(&v))
            .is_some_and(|l| l.contains(name))
    }

    /// Extended label `ℓ(x)`: pairs (agent, atom) over the vertices of `x`.
    pub fn extended_label(&self, x: SimplexId) -> BTreeSet<(usize, String)> {
        let mut out = BTreeSet::new();
        for a in self.cset.color(x).iter() {
            let v = self.cset.vertex(x, a).expect("vertex of own color");
            if let Some(l) = self.labels.get(&v) {
                out.extend(l.iter().map(|p| (a, p.clone())));
            }
        }
        out
    }

    /// Atoms appearing on vertices of each agent.
    pub fn atom_universe(&self) -> Vec<BTreeSet<String>> {
        let mut out = vec![BTreeSet::new(); self.cset.agents().len()];
        for (&v, l) in &self.labels {
            let a = self.cset.color(v).iter().next().expect("vertex");
            out[a].extend(l.iter().cloned());
        }
        out
    }

    /// `f` is a cset morphism that does not create labels:
    /// `ℓ_target(f(v)) ⊆ ℓ_source(v)` on vertices.
    pub fn check_morphism(&self, target: &SimplicialModel, f: &CsetMorphism) -> Result<()> {
        f.check(&self.cset, &target.cset)?;
        let empty = BTreeSet::new();
        for v in self.cset.vertices() {
            let src = self.labels.get(&v).unwrap_or(&empty);
            let tgt = target.labels.get(&f.apply(v)).unwrap_or(&empty);
            if !tgt.is_subset(src) {
                return Err(Error::NotAMorphism(format!("vertex {} gains labels under the map", v)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cset::AgentSet;

    #[test]
    fn extended_label_is_union_of_vertices() {
        let agents = AgentSet::alphabetic(2);
        let g = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let m = SimplicialModel::labeled_by(g, |x, v| {
            let a = x.color(v).iter().next().unwrap();
            [format!("in{}", a)].into_iter().collect()
        });
        let top = m.cset.level(agents.full())[0];
        let l = m.extended_label(top);
        assert_eq!(l.len(), 2);
        assert!(m.holds(top, 1, "in1"));
        assert!(!m.holds(top, 0, "in1"));
        assert_eq!(m.atom_universe()[0].len(), 1);
    }

    #[test]
    fn labels_only_on_vertices() {
        let agents = AgentSet::alphabetic(2);
        let g = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let top = g.level(agents.full())[0];
        let labels = [(top, ["p".to_string()].into_iter().collect())].into_iter().collect();
        assert!(SimplicialModel::new(g, labels).is_err());
    }
}
