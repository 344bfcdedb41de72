//! Builtin input complexes and their textual shorthands.
//!
//! * `simplex:a,b,c` — the standard simplex on the listed agents;
//! * `glued2:a,b,c@b,c` — two copies of the simplex glued along the face
//!   spanned by the agents after `@`;
//! * `binary:a,b` — every 0/1 input assignment, labeled `in0`/`in1`.

use std::collections::{BTreeMap, BTreeSet};

use crate::cset::{AgentMask, AgentSet, Cset, CsetBuilder, SimplexId, SimplicialModel};
use crate::error::{Error, Result};
use crate::tasks::binary_inputs;

fn agent_list(text: &str) -> Result<AgentSet> {
    AgentSet::new(text.split(',').map(str::trim).filter(|s| !s.is_empty()))
}

/// The standard simplex with payloads in set notation.
pub fn simplex(agents: &AgentSet) -> Cset {
    Cset::standard_simplex(agents, agents.full()).expect("full mask is in range")
}

/// Two simplices on all agents, glued along `shared`. Simplices private to
/// the second copy get primed payloads; the two tops are `w` and `w'`.
pub fn glued_pair(agents: &AgentSet, shared: AgentMask) -> Result<Cset> {
    if !shared.is_subset(agents.full()) {
        return Err(Error::NotSubset(agents.braced(shared), agents.braced(agents.full())));
    }
    let mut b = CsetBuilder::new(agents.clone());
    let mut ids: BTreeMap<(usize, AgentMask), SimplexId> = BTreeMap::new();
    for copy in 0..2 {
        for u in agents.full().subsets() {
            let key = if u.is_subset(shared) { (0, u) } else { (copy, u) };
            if ids.contains_key(&key) {
                continue;
            }
            let faces = u
                .proper_subsets()
                .into_iter()
                .map(|t| (t, ids[&(if t.is_subset(shared) { 0 } else { copy }, t)]))
                .collect();
            let prime = if key.0 == 1 { "'" } else { "" };
            let payload = if u == agents.full() {
                format!("w{}", prime)
            } else {
                format!("{}{}", agents.braced(u), prime)
            };
            ids.insert(key, b.add(u, payload, faces)?);
        }
    }
    Ok(b.build())
}

/// Vertices private to the first copy carry `w`, those of the second `wp`.
fn glued_labels(x: &Cset, shared: AgentMask) -> BTreeMap<SimplexId, BTreeSet<String>> {
    x.vertices()
        .into_iter()
        .filter(|&v| !x.color(v).is_subset(shared))
        .map(|v| {
            let name = if x.payload(v).ends_with('\'') { "wp" } else { "w" };
            (v, [name.to_string()].into_iter().collect())
        })
        .collect()
}

/// Parses a shorthand into a labeled model.
pub fn builtin(spec: &str) -> Result<SimplicialModel> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::MalformedCset(format!("unknown input shorthand `{}`", spec)))?;
    match kind {
        "simplex" => Ok(SimplicialModel::unlabeled(simplex(&agent_list(rest)?))),
        "glued2" => {
            let (all, shared) = rest
                .split_once('@')
                .ok_or_else(|| Error::MalformedCset("glued2 needs `agents@shared`".into()))?;
            let agents = agent_list(all)?;
            let shared_names: Vec<&str> = shared.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let shared = agents.mask_of(&shared_names)?;
            let x = glued_pair(&agents, shared)?;
            let labels = glued_labels(&x, shared);
            SimplicialModel::new(x, labels)
        }
        "binary" => {
            let x = binary_inputs(&agent_list(rest)?);
            Ok(SimplicialModel::labeled_by(x, |x, v| {
                let bit = x
                    .payload(v)
                    .trim_end_matches('}')
                    .rsplit(':')
                    .next()
                    .unwrap_or("0")
                    .to_string();
                [format!("in{}", bit)].into_iter().collect()
            }))
        }
        _ => Err(Error::MalformedCset(format!("unknown input shorthand `{}`", spec))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glued_triangles() {
        let m = builtin("glued2:a,b,c@b,c").unwrap();
        let x = &m.cset;
        assert!(x.validate().is_valid());
        assert_eq!(x.facets().len(), 2);
        assert_eq!(x.vertices().len(), 4);
        assert_eq!(x.level(AgentMask(0b110)).len(), 1);
        let tops: Vec<&str> = x.facets().into_iter().map(|f| x.payload(f)).collect();
        assert_eq!(tops, vec!["w", "w'"]);
        let labeled: Vec<_> = m.vertex_labels().iter().filter(|(_, l)| !l.is_empty()).collect();
        assert_eq!(labeled.len(), 2);
    }

    #[test]
    fn shorthands() {
        assert_eq!(builtin("simplex:a,b,c").unwrap().cset.len(), 8);
        let bin = builtin("binary:a,b").unwrap();
        assert_eq!(bin.cset.facets().len(), 4);
        let a = bin.cset.agents().index_of("a").unwrap();
        let zeros = bin
            .cset
            .facets()
            .into_iter()
            .filter(|&f| bin.holds(f, a, "in0"))
            .count();
        assert_eq!(zeros, 2);
        assert!(builtin("torus:a").is_err());
        assert!(builtin("glued2:a,b,c@d").is_err());
    }
}
