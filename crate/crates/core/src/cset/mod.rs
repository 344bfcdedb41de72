//! Finite chromatic augmented semi-simplicial sets ("csets").
//!
//! A cset assigns to every subset `U` of the agent set a finite set of
//! `U`-colored simplices, together with face maps `X(V) -> X(U)` for
//! `U ⊆ V`. Simplices are identified by dense integer ids; every simplex
//! stores its faces at every proper sub-color, including the augmentation
//! level `∅`.

mod agents;
mod colimit;
mod iso;
mod model;
mod morphism;

use std::collections::BTreeMap;

pub(crate) use agents::is_reserved;
pub use agents::{AgentMask, AgentSet, MAX_AGENTS};
pub use colimit::{colimit, colimit_with, Colimit, Diagram};
pub use iso::find_isomorphism;
pub use model::SimplicialModel;
pub use morphism::CsetMorphism;

use crate::error::{Error, Result};

pub type SimplexId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    color: AgentMask,
    payload: String,
    /// Proper faces sorted by color.
    faces: Vec<(AgentMask, SimplexId)>,
}

impl Simplex {
    pub fn color(&self) -> AgentMask {
        self.color
    }

    pub fn payload(&self) -> &str {
        &self.payload
    }

    pub fn faces(&self) -> &[(AgentMask, SimplexId)] {
        &self.faces
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cset {
    agents: AgentSet,
    simplices: Vec<Simplex>,
    levels: BTreeMap<(u32, u32), Vec<SimplexId>>,
}

/// One failed composite face equation `∂_U ∘ ∂_V = ∂_U` at a simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceViolation {
    pub simplex: SimplexId,
    pub via: AgentMask,
    pub target: AgentMask,
    pub direct: SimplexId,
    pub composite: SimplexId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<FaceViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Incremental construction; faces must be added before their cofaces.
#[derive(Clone, Debug)]
pub struct CsetBuilder {
    agents: AgentSet,
    simplices: Vec<Simplex>,
}

impl CsetBuilder {
    pub fn new(agents: AgentSet) -> Self {
        CsetBuilder {
            agents,
            simplices: Vec::new(),
        }
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Adds a simplex. `faces` must name a face for every proper subset of
    /// `color` (order does not matter).
    pub fn add(
        &mut self,
        color: AgentMask,
        payload: impl Into<String>,
        mut faces: Vec<(AgentMask, SimplexId)>,
    ) -> Result<SimplexId> {
        if !color.is_subset(self.agents.full()) {
            return Err(Error::MalformedCset(format!("color {:?} outside the agent set", color)));
        }
        faces.sort();
        faces.dedup();
        let expected = color.proper_subsets();
        if faces.len() != expected.len() {
            return Err(Error::MalformedCset(format!(
                "simplex of color {} needs {} faces, got {}",
                self.agents.braced(color),
                expected.len(),
                faces.len()
            )));
        }
        for &(m, f) in &faces {
            if !m.is_subset(color) || m == color {
                return Err(Error::MalformedCset(format!(
                    "face color {} is not a proper subset of {}",
                    self.agents.braced(m),
                    self.agents.braced(color)
                )));
            }
            match self.simplices.get(f) {
                Some(s) if s.color == m => {}
                _ => {
                    return Err(Error::MalformedCset(format!(
                        "face {} for color {} is missing or has the wrong color",
                        f,
                        self.agents.braced(m)
                    )))
                }
            }
        }
        // sorted by raw bits; lookups use binary search on the mask
        let id = self.simplices.len();
        self.simplices.push(Simplex {
            color,
            payload: payload.into(),
            faces,
        });
        Ok(id)
    }

    pub fn color(&self, id: SimplexId) -> AgentMask {
        self.simplices[id].color
    }

    pub fn face(&self, id: SimplexId, color: AgentMask) -> Option<SimplexId> {
        face_of(&self.simplices[id], id, color)
    }

    pub fn build(self) -> Cset {
        Cset::from_parts(self.agents, self.simplices)
    }
}

fn face_of(s: &Simplex, id: SimplexId, color: AgentMask) -> Option<SimplexId> {
    if color == s.color {
        return Some(id);
    }
    s.faces
        .binary_search_by(|(m, _)| m.cmp(&color))
        .ok()
        .map(|i| s.faces[i].1)
}

impl Cset {
    fn from_parts(agents: AgentSet, simplices: Vec<Simplex>) -> Self {
        let mut levels: BTreeMap<(u32, u32), Vec<SimplexId>> = BTreeMap::new();
        for (id, s) in simplices.iter().enumerate() {
            levels.entry(s.color.level_key()).or_default().push(id);
        }
        Cset {
            agents,
            simplices,
            levels,
        }
    }

    /// The empty cset over `agents`.
    pub fn empty(agents: AgentSet) -> Self {
        Cset::from_parts(agents, Vec::new())
    }

    /// The representable cset `Γ[U]`: one `T`-simplex for each `T ⊆ U`.
    pub fn standard_simplex(agents: &AgentSet, u: AgentMask) -> Result<Self> {
        if !u.is_subset(agents.full()) {
            return Err(Error::UnknownAgent(format!("{:?}", u)));
        }
        let mut b = CsetBuilder::new(agents.clone());
        let mut ids: BTreeMap<AgentMask, SimplexId> = BTreeMap::new();
        for t in u.subsets() {
            let faces = t.proper_subsets().into_iter().map(|s| (s, ids[&s])).collect();
            let id = b.add(t, agents.braced(t), faces)?;
            ids.insert(t, id);
        }
        Ok(b.build())
    }

    /// `Γ[U]` from agent names.
    pub fn standard_simplex_named<S: AsRef<str>>(agents: &AgentSet, names: &[S]) -> Result<Self> {
        Cset::standard_simplex(agents, agents.mask_of(names)?)
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, id: SimplexId) -> &Simplex {
        &self.simplices[id]
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn color(&self, id: SimplexId) -> AgentMask {
        self.simplices[id].color
    }

    pub fn payload(&self, id: SimplexId) -> &str {
        &self.simplices[id].payload
    }

    /// The `U`-face of a simplex; `None` when `U` is not contained in its color.
    pub fn face(&self, id: SimplexId, u: AgentMask) -> Option<SimplexId> {
        face_of(&self.simplices[id], id, u)
    }

    /// The `a`-colored vertex of a simplex, if `a` belongs to its color.
    pub fn vertex(&self, id: SimplexId, agent: usize) -> Option<SimplexId> {
        self.face(id, AgentMask::singleton(agent))
    }

    pub fn level(&self, u: AgentMask) -> &[SimplexId] {
        self.levels.get(&u.level_key()).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Non-empty levels ordered by (size, bits).
    pub fn levels(&self) -> impl Iterator<Item = (AgentMask, &[SimplexId])> {
        self.levels
            .iter()
            .map(|(&(_, bits), ids)| (AgentMask(bits), ids.as_slice()))
    }

    pub fn level_counts(&self) -> Vec<(AgentMask, usize)> {
        self.levels().map(|(m, ids)| (m, ids.len())).collect()
    }

    /// Simplices with `k+1` colors.
    pub fn dimension(&self, k: usize) -> Vec<SimplexId> {
        self.levels()
            .filter(|(m, _)| m.len() == k + 1)
            .flat_map(|(_, ids)| ids.iter().copied())
            .collect()
    }

    pub fn vertices(&self) -> Vec<SimplexId> {
        self.dimension(0)
    }

    /// Simplices other than the augmentation `∅`-simplices.
    pub fn worlds(&self) -> impl Iterator<Item = SimplexId> + '_ {
        (0..self.len()).filter(|&id| !self.simplices[id].color.is_empty())
    }

    pub fn max_dimension(&self) -> Option<usize> {
        self.simplices
            .iter()
            .map(|s| s.color.len())
            .filter(|&n| n > 0)
            .max()
            .map(|n| n - 1)
    }

    /// Simplices that are not a proper face of any other simplex, ascending id.
    /// `∅`-simplices are never reported.
    pub fn facets(&self) -> Vec<SimplexId> {
        let mut covered = vec![false; self.len()];
        for s in &self.simplices {
            for &(_, f) in &s.faces {
                covered[f] = true;
            }
        }
        (0..self.len())
            .filter(|&id| !covered[id] && !self.simplices[id].color.is_empty())
            .collect()
    }

    /// Immediate cofaces (codimension one) of every simplex.
    pub fn cofaces(&self) -> Vec<Vec<SimplexId>> {
        let mut out = vec![Vec::new(); self.len()];
        for (id, s) in self.simplices.iter().enumerate() {
            for a in s.color.iter() {
                let f = self.face(id, s.color.without(a)).expect("complete faces");
                out[f].push(id);
            }
        }
        out
    }

    /// Checks `∂_U ∘ ∂_V = ∂_U` for every `U ⊆ V ⊆ color(x)`.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (id, s) in self.simplices.iter().enumerate() {
            for &(v, fv) in &s.faces {
                for u in v.proper_subsets() {
                    let direct = self.face(id, u).expect("complete faces");
                    let composite = self.face(fv, u).expect("complete faces");
                    if direct != composite {
                        violations.push(FaceViolation {
                            simplex: id,
                            via: v,
                            target: u,
                            direct,
                            composite,
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// Disjoint union; ids of the `k`-th summand are shifted by the sizes of
    /// the previous ones.
    pub fn coproduct(parts: &[&Cset]) -> Result<Cset> {
        let agents = match parts.first() {
            Some(p) => p.agents.clone(),
            None => return Err(Error::MalformedCset("empty coproduct".into())),
        };
        let mut simplices = Vec::new();
        for p in parts {
            if p.agents != agents {
                return Err(Error::AgentSetMismatch);
            }
            let offset = simplices.len();
            simplices.extend(p.simplices.iter().map(|s| Simplex {
                color: s.color,
                payload: s.payload.clone(),
                faces: s.faces.iter().map(|&(m, f)| (m, f + offset)).collect(),
            }));
        }
        Ok(Cset::from_parts(agents, simplices))
    }

    /// Levelwise product `(X × Y)(U) = X(U) × Y(U)` with componentwise faces.
    /// Returns the product and the pair of components of each simplex.
    pub fn product(x: &Cset, y: &Cset) -> Result<(Cset, Vec<(SimplexId, SimplexId)>)> {
        if x.agents != y.agents {
            return Err(Error::AgentSetMismatch);
        }
        let mut index: BTreeMap<(SimplexId, SimplexId), SimplexId> = BTreeMap::new();
        let mut pairs = Vec::new();
        let mut b = CsetBuilder::new(x.agents.clone());
        for (u, xs) in x.levels() {
            let ys = y.level(u);
            for &i in xs {
                for &o in ys {
                    let faces = u
                        .proper_subsets()
                        .into_iter()
                        .map(|t| {
                            let key = (x.face(i, t).unwrap(), y.face(o, t).unwrap());
                            (t, index[&key])
                        })
                        .collect();
                    let payload = format!("({},{})", x.payload(i), y.payload(o));
                    let id = b.add(u, payload, faces)?;
                    index.insert((i, o), id);
                    pairs.push((i, o));
                }
            }
        }
        Ok((b.build(), pairs))
    }

    /// The morphism `Γ[color(x)] -> X` classifying simplex `x`.
    pub fn yoneda_map(&self, x: SimplexId) -> (Cset, CsetMorphism) {
        let color = self.color(x);
        let gamma = Cset::standard_simplex(&self.agents, color).expect("color is in range");
        let map = (0..gamma.len())
            .map(|t| self.face(x, gamma.color(t)).expect("face exists"))
            .collect();
        (gamma, CsetMorphism::new(map))
    }

    /// The sub-cset on the simplices selected by `keep`, which must be closed
    /// under faces. Returns the sub-cset and its inclusion morphism.
    pub fn restrict(&self, keep: impl Fn(SimplexId) -> bool) -> Result<(Cset, CsetMorphism)> {
        let mut new_id = vec![None; self.len()];
        let mut incl = Vec::new();
        let mut b = CsetBuilder::new(self.agents.clone());
        for (_, ids) in self.levels() {
            for &id in ids {
                if !keep(id) {
                    continue;
                }
                let s = &self.simplices[id];
                let faces = s
                    .faces
                    .iter()
                    .map(|&(m, f)| {
                        new_id[f].map(|nf| (m, nf)).ok_or_else(|| {
                            Error::MalformedCset(format!("selection is not closed under faces at simplex {}", id))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                new_id[id] = Some(b.add(s.color, s.payload.clone(), faces)?);
                incl.push(id);
            }
        }
        Ok((b.build(), CsetMorphism::new(incl)))
    }

    /// Renumbers simplices by (level, payload, old id). Returns the
    /// renumbered cset and the old-to-new id map.
    pub fn canonical(&self) -> (Cset, Vec<SimplexId>) {
        let mut order: Vec<SimplexId> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            let (sa, sb) = (&self.simplices[a], &self.simplices[b]);
            (sa.color.level_key(), &sa.payload, a).cmp(&(sb.color.level_key(), &sb.payload, b))
        });
        let mut new_id = vec![0; self.len()];
        for (n, &old) in order.iter().enumerate() {
            new_id[old] = n;
        }
        let simplices = order
            .iter()
            .map(|&old| {
                let s = &self.simplices[old];
                let mut faces: Vec<_> = s.faces.iter().map(|&(m, f)| (m, new_id[f])).collect();
                faces.sort();
                Simplex {
                    color: s.color,
                    payload: s.payload.clone(),
                    faces,
                }
            })
            .collect();
        (Cset::from_parts(self.agents.clone(), simplices), new_id)
    }

    /// Replaces all payloads.
    pub fn with_payloads(mut self, payload: impl Fn(SimplexId) -> String) -> Cset {
        for (id, s) in self.simplices.iter_mut().enumerate() {
            s.payload = payload(id);
        }
        self
    }

    /// Overwrites one face entry without any checks. Only meant for building
    /// deliberately broken csets in tests.
    #[doc(hidden)]
    pub fn corrupt_face(&mut self, id: SimplexId, color: AgentMask, target: SimplexId) {
        let s = &mut self.simplices[id];
        if let Some(e) = s.faces.iter_mut().find(|(m, _)| *m == color) {
            e.1 = target;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> AgentSet {
        AgentSet::alphabetic(3)
    }

    #[test]
    fn standard_simplex_counts() {
        let a = abc();
        let ab = Cset::standard_simplex_named(&a, &["a", "b"]).unwrap();
        assert_eq!(ab.len(), 4);
        for l in ["", "a", "b", "a,b"] {
            assert_eq!(ab.level(a.parse_mask(l).unwrap()).len(), 1);
        }
        let e = Cset::standard_simplex(&a, AgentMask::EMPTY).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e.facets().is_empty());
        let full = Cset::standard_simplex(&a, a.full()).unwrap();
        assert_eq!(full.len(), 8);
        assert_eq!(full.facets().len(), 1);
        assert!(full.validate().is_valid());
    }

    #[test]
    fn unknown_agent_is_rejected() {
        assert!(matches!(
            Cset::standard_simplex_named(&abc(), &["a", "q"]),
            Err(Error::UnknownAgent(_))
        ));
    }

    #[test]
    fn validate_reports_broken_composite() {
        let a = abc();
        let g = Cset::standard_simplex(&a, a.full()).unwrap();
        let empty = g.level(AgentMask::EMPTY)[0];
        let mut b = CsetBuilder::new(a.clone());
        for s in g.simplices() {
            b.add(s.color(), s.payload(), s.faces().to_vec()).unwrap();
        }
        // a second a-vertex over the same ∅-simplex
        let stray = b
            .add(AgentMask::singleton(0), "stray", vec![(AgentMask::EMPTY, empty)])
            .unwrap();
        let mut x = b.build();
        assert!(x.validate().is_valid());
        let top = x.level(a.full())[0];
        let ac = x.level(a.parse_mask("a,c").unwrap())[0];
        x.corrupt_face(top, AgentMask::singleton(0), stray);
        x.corrupt_face(ac, AgentMask::singleton(0), stray);
        let report = x.validate();
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(
            (v.simplex, v.via, v.target),
            (top, a.parse_mask("a,b").unwrap(), AgentMask::singleton(0))
        );
        assert_eq!(v.direct, stray);
    }

    #[test]
    fn product_sizes_multiply() {
        let a = abc();
        let g = Cset::standard_simplex(&a, a.full()).unwrap();
        let (p, _) = Cset::product(&g, &g).unwrap();
        assert_eq!(p.len(), 8);
        let two = Cset::coproduct(&[&g, &g]).unwrap();
        let (p2, pairs) = Cset::product(&two, &g).unwrap();
        for (u, n) in p2.level_counts() {
            assert_eq!(n, two.level(u).len() * g.level(u).len());
        }
        assert_eq!(pairs.len(), p2.len());
        assert!(p2.validate().is_valid());
    }

    #[test]
    fn restrict_requires_face_closure() {
        let a = abc();
        let g = Cset::standard_simplex(&a, a.full()).unwrap();
        let top = g.level(a.full())[0];
        let (boundary, incl) = g.restrict(|id| id != top).unwrap();
        assert_eq!(boundary.facets().len(), 3);
        assert!(incl.check(&boundary, &g).is_ok());
        assert!(g.restrict(|id| g.color(id).len() != 1).is_err());
    }

    #[test]
    fn canonical_is_stable() {
        let a = abc();
        let g = Cset::standard_simplex(&a, a.full()).unwrap();
        let (c1, _) = g.canonical();
        let (c2, _) = c1.canonical();
        assert_eq!(c1, c2);
    }
}
