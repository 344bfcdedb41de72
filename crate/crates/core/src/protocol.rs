//! The one-round protocol functor of a dynamic network model and its
//! extension to arbitrary input csets by gluing per-simplex copies.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::adversary::DynamicNetworkModel;
use crate::cset::{
    colimit_with, find_isomorphism, AgentMask, AgentSet, Cset, CsetBuilder, CsetMorphism, Diagram, SimplexId,
    SimplicialModel,
};
use crate::error::{Error, Result};

/// A set of `(agent, view)` pairs with distinct agents, sorted by agent.
pub type ViewAssignment = Vec<(usize, AgentMask)>;

/// `(a,{a,b})` for a single pair, `{(a,{a}),(b,{a,b})}` otherwise.
pub fn assignment_payload(agents: &AgentSet, s: &[(usize, AgentMask)]) -> String {
    let parts: Vec<String> = s
        .iter()
        .map(|&(v, view)| format!("({},{})", agents.name(v), agents.braced(view)))
        .collect();
    match parts.len() {
        1 => parts.into_iter().next().unwrap(),
        _ => format!("{{{}}}", parts.join(",")),
    }
}

fn assignment_color(s: &[(usize, AgentMask)]) -> AgentMask {
    AgentMask::from_agents(s.iter().map(|&(v, _)| v))
}

/// A cset whose simplices are view assignments, built from the set of
/// assignments at each level (faces restrict the assignment).
#[derive(Clone, Debug)]
struct AssignmentComplex {
    cset: Cset,
    views: Vec<ViewAssignment>,
    index: HashMap<ViewAssignment, SimplexId>,
}

impl AssignmentComplex {
    fn build(agents: &AgentSet, levels: BTreeMap<(u32, u32), BTreeSet<ViewAssignment>>) -> Result<Self> {
        let mut b = CsetBuilder::new(agents.clone());
        let mut views = Vec::new();
        let mut index = HashMap::new();
        for (_, assignments) in levels {
            for s in assignments {
                let color = assignment_color(&s);
                let faces = color
                    .proper_subsets()
                    .into_iter()
                    .map(|t| {
                        let r: ViewAssignment = s.iter().copied().filter(|&(v, _)| t.contains(v)).collect();
                        index.get(&r).map(|&f| (t, f)).ok_or_else(|| {
                            Error::MalformedCset(format!(
                                "assignment {} lacks its face {}",
                                assignment_payload(agents, &s),
                                agents.braced(t)
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let id = b.add(color, assignment_payload(agents, &s), faces)?;
                index.insert(s.clone(), id);
                views.push(s);
            }
        }
        Ok(AssignmentComplex {
            cset: b.build(),
            views,
            index,
        })
    }
}

/// The protocol functor `F` of a dynamic network model, with every `F(U)`
/// and the codimension-one inclusions `F(T) -> F(U)` computed up front.
#[derive(Clone, Debug)]
pub struct ProtocolFunctor {
    model: DynamicNetworkModel,
    one_round: BTreeMap<AgentMask, AssignmentComplex>,
    inclusions: BTreeMap<(AgentMask, AgentMask), CsetMorphism>,
}

/// The result of extending an input cset: the glued complex and its
/// projection back onto the input.
#[derive(Clone, Debug)]
pub struct ProtocolComplex {
    pub complex: Cset,
    pub projection: CsetMorphism,
    /// Per input simplex `x`, the map from `F(color x)` into `complex`.
    copies: Vec<CsetMorphism>,
    /// A representative `(input simplex, simplex of F(color))` per output simplex.
    elements: Vec<(SimplexId, SimplexId)>,
}

impl ProtocolComplex {
    /// Output simplex holding simplex `s` of the copy over input simplex `x`.
    pub fn element(&self, x: SimplexId, s: SimplexId) -> SimplexId {
        self.copies[x].apply(s)
    }

    pub fn representative(&self, out: SimplexId) -> (SimplexId, SimplexId) {
        self.elements[out]
    }

    pub fn input_len(&self) -> usize {
        self.copies.len()
    }
}

impl ProtocolFunctor {
    pub fn new(model: DynamicNetworkModel) -> Result<Self> {
        let agents = model.agents().clone();
        let mut one_round = BTreeMap::new();
        for u in agents.full().subsets() {
            let mut levels: BTreeMap<(u32, u32), BTreeSet<ViewAssignment>> = BTreeMap::new();
            // F(∅) = {∅} even when M(∅) is empty, so copies always share their ∅
            levels
                .entry(AgentMask::EMPTY.level_key())
                .or_default()
                .insert(ViewAssignment::new());
            for sub in u.subsets() {
                for g in model.graphs(sub) {
                    for v in g.active().subsets() {
                        let s: ViewAssignment = v
                            .iter()
                            .map(|a| (a, g.view(a).expect("active agent has a view")))
                            .collect();
                        levels.entry(v.level_key()).or_default().insert(s);
                    }
                }
            }
            one_round.insert(u, AssignmentComplex::build(&agents, levels)?);
        }
        let mut f = ProtocolFunctor {
            model,
            one_round,
            inclusions: BTreeMap::new(),
        };
        for u in agents.full().subsets() {
            for a in u.iter() {
                let t = u.without(a);
                let incl = f.inclusion_map(t, u);
                f.inclusions.insert((t, u), incl);
            }
        }
        Ok(f)
    }

    pub fn model(&self) -> &DynamicNetworkModel {
        &self.model
    }

    pub fn agents(&self) -> &AgentSet {
        self.model.agents()
    }

    /// `F(U)`.
    pub fn one_round(&self, u: AgentMask) -> &Cset {
        &self.one_round[&u].cset
    }

    /// The view assignment behind simplex `id` of `F(U)`.
    pub fn assignment(&self, u: AgentMask, id: SimplexId) -> &ViewAssignment {
        &self.one_round[&u].views[id]
    }

    fn inclusion_map(&self, u: AgentMask, t: AgentMask) -> CsetMorphism {
        let (src, tgt) = (&self.one_round[&u], &self.one_round[&t]);
        CsetMorphism::new(src.views.iter().map(|s| tgt.index[s]).collect())
    }

    /// `F(U ⊆ T)`: each view assignment of `F(U)` is sent to itself in `F(T)`.
    pub fn one_round_inclusion(&self, u: AgentMask, t: AgentMask) -> Result<CsetMorphism> {
        let agents = self.agents();
        if !u.is_subset(t) || !t.is_subset(agents.full()) {
            return Err(Error::NotSubset(agents.braced(u), agents.braced(t)));
        }
        Ok(self.inclusion_map(u, t))
    }

    /// Nested payload of simplex `s` in the copy over `x`: every agent's view
    /// followed by the input state it read.
    fn element_payload(&self, x: &Cset, xs: SimplexId, s: &[(usize, AgentMask)]) -> String {
        let agents = x.agents();
        let parts: Vec<String> = s
            .iter()
            .map(|&(v, view)| {
                let seen = x.face(xs, view).expect("views stay inside the color");
                format!("({},{}|{})", agents.name(v), agents.braced(view), x.payload(seen))
            })
            .collect();
        match parts.len() {
            1 => parts.into_iter().next().unwrap(),
            _ => format!("{{{}}}", parts.join(",")),
        }
    }

    /// `F_!(X)`: one copy of `F(color x)` per simplex `x`, glued along the
    /// inclusions given by the face maps of `X`, with the canonical
    /// projection onto `X`.
    pub fn extend(&self, x: &Cset) -> Result<ProtocolComplex> {
        if x.agents() != self.agents() {
            return Err(Error::AgentSetMismatch);
        }
        let mut d = Diagram::new();
        for id in 0..x.len() {
            d.object(self.one_round(x.color(id)));
        }
        for id in 0..x.len() {
            let w = x.color(id);
            for a in w.iter() {
                let t = w.without(a);
                let face = x.face(id, t).expect("complete faces");
                d.arrow(face, id, &self.inclusions[&(t, w)]);
            }
        }
        if x.is_empty() {
            return Ok(ProtocolComplex {
                complex: Cset::empty(x.agents().clone()),
                projection: CsetMorphism::new(Vec::new()),
                copies: Vec::new(),
                elements: Vec::new(),
            });
        }
        let colimit = colimit_with(&d, |obj, s| {
            self.element_payload(x, obj, self.assignment(x.color(obj), s))
        })?;
        let n = colimit.cset.len();
        let mut elements = vec![None; n];
        for (obj, inj) in colimit.injections.iter().enumerate() {
            for (s, &out) in inj.as_slice().iter().enumerate() {
                elements[out].get_or_insert((obj, s));
            }
        }
        let elements: Vec<(SimplexId, SimplexId)> = elements
            .into_iter()
            .map(|e| e.expect("every class has a member"))
            .collect();
        let projection = CsetMorphism::new(
            elements
                .iter()
                .enumerate()
                .map(|(out, &(xs, _))| {
                    x.face(xs, colimit.cset.color(out))
                        .expect("output colors lie below the input color")
                })
                .collect(),
        );
        Ok(ProtocolComplex {
            complex: colimit.cset,
            projection,
            copies: colimit.injections,
            elements,
        })
    }

    /// `F_!` on a labeled input: every output vertex copies the labels of
    /// the input vertex it projects to.
    pub fn extend_model(&self, m: &SimplicialModel) -> Result<(SimplicialModel, ProtocolComplex)> {
        let p = self.extend(&m.cset)?;
        let labels = p
            .complex
            .vertices()
            .into_iter()
            .filter_map(|v| m.label(p.projection.apply(v)).map(|l| (v, l.clone())))
            .collect();
        let model = SimplicialModel::new(p.complex.clone(), labels)?;
        Ok((model, p))
    }

    /// `F_!(f)` for `f: X -> Y`, given `source = F_!(X)` and
    /// `target = F_!(Y)`: the class of `(x, s)` goes to the class of `(f(x), s)`.
    pub fn apply_to_morphism(
        &self,
        f: &CsetMorphism,
        source: &ProtocolComplex,
        target: &ProtocolComplex,
    ) -> Result<CsetMorphism> {
        if f.len() != source.input_len() {
            return Err(Error::NotAMorphism(format!(
                "map has {} entries for an input of {} simplices",
                f.len(),
                source.input_len()
            )));
        }
        if let Some(&bad) = f.as_slice().iter().find(|&&y| y >= target.input_len()) {
            return Err(Error::NotAMorphism(format!("image {} out of range", bad)));
        }
        Ok(CsetMorphism::new(
            source
                .elements
                .iter()
                .map(|&(x, s)| target.element(f.apply(x), s))
                .collect(),
        ))
    }
}

/// Immediate-snapshot one-round complex built directly from compatible view
/// sets: `b ∈ V_b ⊆ U`, views pairwise comparable, and `b ∈ V_c` implying
/// `V_b ⊆ V_c`.
pub fn immediate_snapshot_oracle(agents: &AgentSet, u: AgentMask) -> Result<Cset> {
    fn compatible(s: &[(usize, AgentMask)]) -> bool {
        s.iter().all(|&(b, vb)| {
            s.iter()
                .all(|&(_, vc)| (vb.is_subset(vc) || vc.is_subset(vb)) && (!vc.contains(b) || vb.is_subset(vc)))
        })
    }
    fn extend_all(prefix: &ViewAssignment, rest: &[usize], u: AgentMask, out: &mut Vec<ViewAssignment>) {
        let Some((&b, tail)) = rest.split_first() else {
            out.push(prefix.clone());
            return;
        };
        for view in u.subsets().into_iter().filter(|v| v.contains(b)) {
            let mut next = prefix.clone();
            next.push((b, view));
            if compatible(&next) {
                extend_all(&next, tail, u, out);
            }
        }
    }
    if !u.is_subset(agents.full()) {
        return Err(Error::UnknownAgent(format!("{:?}", u)));
    }
    let mut levels: BTreeMap<(u32, u32), BTreeSet<ViewAssignment>> = BTreeMap::new();
    for b in u.subsets() {
        let members: Vec<usize> = b.iter().collect();
        let mut all = Vec::new();
        extend_all(&Vec::new(), &members, u, &mut all);
        levels.entry(b.level_key()).or_default().extend(all);
    }
    Ok(AssignmentComplex::build(agents, levels)?.cset)
}

/// Checks the immediate-snapshot functor against the direct construction and
/// returns the payload-preserving isomorphism `F(U) -> oracle`.
pub fn is_oracle_equivalent_is(f: &ProtocolFunctor, u: AgentMask) -> Result<CsetMorphism> {
    let oracle = immediate_snapshot_oracle(f.agents(), u)?;
    find_isomorphism(f.one_round(u), &oracle, true).ok_or_else(|| {
        Error::NotIsomorphic(format!(
            "one_round({}) differs from the snapshot oracle",
            f.agents().braced(u)
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::DynamicNetworkModel;

    fn is3() -> ProtocolFunctor {
        ProtocolFunctor::new(DynamicNetworkModel::immediate_snapshot(AgentSet::alphabetic(3))).unwrap()
    }

    #[test]
    fn snapshot_one_round_shape() {
        let f = is3();
        let full = f.agents().full();
        let c = f.one_round(full);
        assert_eq!(c.vertices().len(), 12);
        assert_eq!(c.facets().len(), 13);
        assert!(c.validate().is_valid());
        let ab = f.one_round(AgentMask(0b011));
        assert_eq!(ab.vertices().len(), 4);
        assert_eq!(ab.dimension(1).len(), 3);
        assert_eq!(f.one_round(AgentMask::EMPTY).len(), 1);
    }

    #[test]
    fn reliable_broadcast_maximal_simplices() {
        let f = ProtocolFunctor::new(DynamicNetworkModel::reliable_broadcast(AgentSet::alphabetic(3))).unwrap();
        let c = f.one_round(AgentMask(0b111));
        let facets = c.facets();
        assert_eq!(facets.len(), 7);
        let dims: Vec<usize> = facets.iter().map(|&x| c.color(x).len()).collect();
        assert_eq!(dims.iter().filter(|&&d| d == 3).count(), 1);
        assert_eq!(dims.iter().filter(|&&d| d == 2).count(), 3);
        assert_eq!(dims.iter().filter(|&&d| d == 1).count(), 3);
    }

    #[test]
    fn inclusions_compose() {
        let f = is3();
        let subsets = f.agents().full().subsets();
        for &s in &subsets {
            for &u in subsets.iter().filter(|u| s.is_subset(**u)) {
                let su = f.one_round_inclusion(s, u).unwrap();
                assert!(su.is_injective());
                su.check(f.one_round(s), f.one_round(u)).unwrap();
                for &t in subsets.iter().filter(|t| u.is_subset(**t)) {
                    let ut = f.one_round_inclusion(u, t).unwrap();
                    assert_eq!(su.then(&ut), f.one_round_inclusion(s, t).unwrap());
                }
            }
        }
        assert_eq!(
            f.one_round_inclusion(AgentMask(0b11), AgentMask(0b11)).unwrap(),
            CsetMorphism::identity(f.one_round(AgentMask(0b11)))
        );
        assert!(f.one_round_inclusion(AgentMask(0b11), AgentMask(0b101)).is_err());
    }

    #[test]
    fn oracle_agrees() {
        let f = is3();
        for u in f.agents().full().subsets() {
            is_oracle_equivalent_is(&f, u).unwrap();
        }
        let one = immediate_snapshot_oracle(f.agents(), AgentMask(0b1)).unwrap();
        assert_eq!(one.vertices().len(), 1);
        assert_eq!(one.payload(one.vertices()[0]), "(a,{a})");
    }

    #[test]
    fn extend_of_standard_simplex() {
        let f = is3();
        let agents = f.agents().clone();
        for u in agents.full().subsets() {
            let g = Cset::standard_simplex(&agents, u).unwrap();
            let p = f.extend(&g).unwrap();
            assert!(p.complex.validate().is_valid());
            p.projection.check(&p.complex, &g).unwrap();
            assert!(find_isomorphism(&p.complex, f.one_round(u), false).is_some());
        }
    }

    #[test]
    fn projection_is_face_of_copy_base() {
        let f = is3();
        let g = Cset::standard_simplex(&f.agents().clone(), f.agents().full()).unwrap();
        let p = f.extend(&g).unwrap();
        for out in 0..p.complex.len() {
            let (x, _) = p.representative(out);
            assert_eq!(p.projection.apply(out), g.face(x, p.complex.color(out)).unwrap());
        }
    }

    #[test]
    fn labels_follow_projection() {
        let f = is3();
        let agents = f.agents().clone();
        let g = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let m = SimplicialModel::labeled_by(g, |x, v| [format!("in{}", x.color(v).0)].into_iter().collect());
        let (out, p) = f.extend_model(&m).unwrap();
        for v in out.cset.vertices() {
            assert_eq!(out.label(v), m.label(p.projection.apply(v)));
        }
        out.check_morphism(&m, &p.projection).unwrap();
    }

    #[test]
    fn identity_goes_to_identity() {
        let f = is3();
        let agents = f.agents().clone();
        let g = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let p = f.extend(&g).unwrap();
        let id = f.apply_to_morphism(&CsetMorphism::identity(&g), &p, &p).unwrap();
        assert_eq!(id, CsetMorphism::identity(&p.complex));
    }
}
