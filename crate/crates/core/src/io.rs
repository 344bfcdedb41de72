//! JSON documents for csets, labeled models, valued csets and tasks.
//!
//! A cset is written level by level:
//!
//! ```json
//! { "agents": ["a", "b"],
//!   "levels": { "": [{"id": 0, "payload": "{}", "faces": {}}],
//!               "a": [{"id": 1, "payload": "{a}", "faces": {"": 0}}] },
//!   "labels": { "1": ["in0"] } }
//! ```
//!
//! Face maps are keyed by the comma-joined face color (`""` for `∅`). Either
//! all proper faces or only the codimension-1 ones may be given. All maps are
//! ordered, so output is byte-stable.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cset::{AgentMask, AgentSet, Cset, CsetBuilder, SimplexId, SimplicialModel};
use crate::decisions::{format_value, parse_value, VCset};
use crate::error::{Error, Result};
use crate::tasks::Task;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexDoc {
    pub id: usize,
    pub payload: String,
    #[serde(default)]
    pub faces: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsetDoc {
    pub agents: AgentSet,
    pub levels: BTreeMap<String, Vec<SimplexDoc>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, BTreeMap<String, String>>,
}

/// A parsed document together with the map from document ids to cset ids.
#[derive(Clone, Debug)]
pub struct Loaded<T> {
    pub value: T,
    pub ids: BTreeMap<usize, SimplexId>,
}

impl CsetDoc {
    pub fn from_cset(x: &Cset) -> Self {
        let agents = x.agents();
        let mut levels: BTreeMap<String, Vec<SimplexDoc>> = BTreeMap::new();
        for id in 0..x.len() {
            let faces = x
                .simplex(id)
                .faces()
                .iter()
                .map(|&(m, f)| (agents.join(m), f))
                .collect();
            levels.entry(agents.join(x.color(id))).or_default().push(SimplexDoc {
                id,
                payload: x.payload(id).to_string(),
                faces,
            });
        }
        CsetDoc {
            agents: agents.clone(),
            levels,
            labels: BTreeMap::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn from_model(m: &SimplicialModel) -> Self {
        let mut doc = CsetDoc::from_cset(&m.cset);
        doc.labels = m
            .vertex_labels()
            .iter()
            .filter(|(_, l)| !l.is_empty())
            .map(|(v, l)| (v.to_string(), l.clone()))
            .collect();
        doc
    }

    pub fn from_vcset(x: &VCset) -> Self {
        let mut doc = CsetDoc::from_cset(x.cset());
        let agents = x.cset().agents();
        doc.values = (0..x.cset().len())
            .filter(|&id| !x.profile(id).is_empty())
            .map(|id| {
                let profile = x
                    .profile(id)
                    .iter()
                    .map(|(&a, v)| (agents.name(a).to_string(), format_value(v)))
                    .collect();
                (id.to_string(), profile)
            })
            .collect();
        doc
    }

    pub fn to_cset(&self) -> Result<Loaded<Cset>> {
        let agents = &self.agents;
        let mut entries: Vec<(AgentMask, &SimplexDoc)> = Vec::new();
        for (key, docs) in &self.levels {
            let color = agents.parse_mask(key)?;
            entries.extend(docs.iter().map(|d| (color, d)));
        }
        entries.sort_by_key(|(c, d)| (c.len(), d.id));
        let mut b = CsetBuilder::new(agents.clone());
        let mut ids: BTreeMap<usize, SimplexId> = BTreeMap::new();
        for (color, doc) in entries {
            if ids.contains_key(&doc.id) {
                return Err(Error::MalformedCset(format!("duplicate simplex id {}", doc.id)));
            }
            let mut faces: BTreeMap<AgentMask, SimplexId> = BTreeMap::new();
            for (key, &f) in &doc.faces {
                let m = agents.parse_mask(key)?;
                let fid = *ids.get(&f).ok_or_else(|| {
                    Error::MalformedCset(format!("simplex {} names unknown or higher face {}", doc.id, f))
                })?;
                faces.insert(m, fid);
            }
            // complete lower faces through the codimension-1 ones
            for t in color.proper_subsets().into_iter().rev() {
                if faces.contains_key(&t) {
                    continue;
                }
                let via = faces
                    .iter()
                    .find(|(m, _)| t.is_subset(**m) && **m != t)
                    .map(|(_, &f)| f)
                    .ok_or_else(|| {
                        Error::MalformedCset(format!("simplex {} is missing its {} face", doc.id, agents.braced(t)))
                    })?;
                let f = b
                    .face(via, t)
                    .ok_or_else(|| Error::MalformedCset(format!("bad face under simplex {}", doc.id)))?;
                faces.insert(t, f);
            }
            let new = b.add(color, doc.payload.clone(), faces.into_iter().collect())?;
            ids.insert(doc.id, new);
        }
        let x = b.build();
        let report = x.validate();
        if !report.is_valid() {
            return Err(Error::MalformedCset(format!(
                "face maps do not compose ({} violations)",
                report.violations.len()
            )));
        }
        Ok(Loaded { value: x, ids })
    }

    fn remap(ids: &BTreeMap<usize, SimplexId>, key: &str) -> Result<SimplexId> {
        key.parse::<usize>()
            .ok()
            .and_then(|k| ids.get(&k).copied())
            .ok_or_else(|| Error::MalformedCset(format!("unknown simplex id `{}`", key)))
    }

    pub fn to_model(&self) -> Result<Loaded<SimplicialModel>> {
        let Loaded { value: x, ids } = self.to_cset()?;
        let mut labels = BTreeMap::new();
        for (key, l) in &self.labels {
            labels.insert(CsetDoc::remap(&ids, key)?, l.clone());
        }
        Ok(Loaded {
            value: SimplicialModel::new(x, labels)?,
            ids,
        })
    }

    pub fn to_vcset(&self) -> Result<Loaded<VCset>> {
        let Loaded { value: x, ids } = self.to_cset()?;
        let mut values = vec![BTreeMap::new(); x.len()];
        for (key, profile) in &self.values {
            let id = CsetDoc::remap(&ids, key)?;
            for (agent, v) in profile {
                values[id].insert(x.agents().index_of(agent)?, parse_value(v)?);
            }
        }
        Ok(Loaded {
            value: VCset::new(x, values)?,
            ids,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskDoc {
    pub inputs: CsetDoc,
    pub outputs: CsetDoc,
    /// `(input id, output id)` pairs; the spec is their face closure.
    pub spec: Vec<(usize, usize)>,
}

impl TaskDoc {
    /// Writes the facets of the spec; reading them back gives the same task.
    pub fn from_task(t: &Task) -> Self {
        TaskDoc {
            inputs: CsetDoc::from_cset(t.inputs()),
            outputs: CsetDoc::from_cset(t.outputs()),
            spec: t.spec().facets().into_iter().map(|s| t.pair(s)).collect(),
        }
    }

    pub fn to_task(&self) -> Result<Task> {
        let i = self.inputs.to_cset()?;
        let o = self.outputs.to_cset()?;
        let mut pairs = Vec::with_capacity(self.spec.len());
        for &(a, b) in &self.spec {
            let a = *i
                .ids
                .get(&a)
                .ok_or_else(|| Error::InvalidTask(format!("unknown input id {}", a)))?;
            let b = *o
                .ids
                .get(&b)
                .ok_or_else(|| Error::InvalidTask(format!("unknown output id {}", b)))?;
            pairs.push((a, b));
        }
        Task::new(i.value, o.value, pairs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
