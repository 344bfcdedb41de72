use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use super::{AgentMask, Cset, CsetBuilder, CsetMorphism, SimplexId};
use crate::error::{Error, Result};

/// A finite diagram of csets. Each arrow `(from, to, f)` is a morphism
/// `objects[from] -> objects[to]`.
#[derive(Clone, Debug, Default)]
pub struct Diagram<'a> {
    pub objects: Vec<&'a Cset>,
    pub arrows: Vec<(usize, usize, &'a CsetMorphism)>,
}

impl<'a> Diagram<'a> {
    pub fn new() -> Self {
        Diagram::default()
    }

    pub fn object(&mut self, x: &'a Cset) -> usize {
        self.objects.push(x);
        self.objects.len() - 1
    }

    pub fn arrow(&mut self, from: usize, to: usize, f: &'a CsetMorphism) {
        self.arrows.push((from, to, f));
    }
}

#[derive(Clone, Debug)]
pub struct Colimit {
    pub cset: Cset,
    /// One injection per diagram object.
    pub injections: Vec<CsetMorphism>,
    /// Number of unions that merged two distinct classes.
    pub merges: usize,
}

/// Colimit with payloads taken from each class representative.
pub fn colimit(diagram: &Diagram<'_>) -> Result<Colimit> {
    colimit_with(diagram, |obj, id| diagram.objects[obj].payload(id).to_string())
}

/// Disjoint union of all objects quotiented by `x ~ f(x)` for every arrow.
///
/// Classes are numbered by (level, payload, smallest member), the payload of
/// a class being `payload(obj, id)` of its smallest member. The payload
/// function should be constant on classes for the numbering to be
/// meaningful.
pub fn colimit_with(diagram: &Diagram<'_>, payload: impl Fn(usize, SimplexId) -> String) -> Result<Colimit> {
    let agents = match diagram.objects.first() {
        Some(x) => x.agents().clone(),
        None => return Err(Error::MalformedCset("empty diagram".into())),
    };
    let mut offsets = Vec::with_capacity(diagram.objects.len() + 1);
    let mut total = 0usize;
    for x in &diagram.objects {
        if x.agents() != &agents {
            return Err(Error::AgentSetMismatch);
        }
        offsets.push(total);
        total += x.len();
    }
    offsets.push(total);

    let mut uf = UnionFind::<usize>::new(total);
    let mut merges = 0;
    for &(from, to, f) in &diagram.arrows {
        let (src, tgt) = (diagram.objects[from], diagram.objects[to]);
        if f.len() != src.len() {
            return Err(Error::NotAMorphism(format!(
                "arrow {} -> {} has {} entries for {} simplices",
                from,
                to,
                f.len(),
                src.len()
            )));
        }
        for x in 0..src.len() {
            let fx = f.apply(x);
            if fx >= tgt.len() || tgt.color(fx) != src.color(x) {
                return Err(Error::NotAMorphism(format!(
                    "arrow {} -> {} is not color preserving at {}",
                    from, to, x
                )));
            }
            if uf.union(offsets[from] + x, offsets[to] + fx) {
                merges += 1;
            }
        }
    }

    let locate = |g: usize| -> (usize, SimplexId) {
        let obj = offsets.partition_point(|&o| o <= g) - 1;
        (obj, g - offsets[obj])
    };

    // smallest member of each class is its representative
    let mut rep_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    for g in 0..total {
        rep_of_root.entry(uf.find(g)).or_insert(g);
    }
    let mut classes: Vec<(AgentMask, String, usize)> = rep_of_root
        .values()
        .map(|&g| {
            let (obj, id) = locate(g);
            (diagram.objects[obj].color(id), payload(obj, id), g)
        })
        .collect();
    classes.sort_by(|a, b| (a.0.level_key(), &a.1, a.2).cmp(&(b.0.level_key(), &b.1, b.2)));
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    for (c, &(_, _, g)) in classes.iter().enumerate() {
        class_of_root.insert(uf.find(g), c);
    }
    let class_of = |g: usize| class_of_root[&uf.find(g)];

    // induced faces, checked on every member
    let mut faces: Vec<Option<Vec<(AgentMask, SimplexId)>>> = vec![None; classes.len()];
    for g in 0..total {
        let (obj, id) = locate(g);
        let x = diagram.objects[obj];
        let c = class_of(g);
        let fs: Vec<(AgentMask, SimplexId)> = x
            .simplex(id)
            .faces()
            .iter()
            .map(|&(m, f)| (m, class_of(offsets[obj] + f)))
            .collect();
        match &faces[c] {
            None => faces[c] = Some(fs),
            Some(existing) if *existing == fs => {}
            Some(existing) => {
                let bad = existing
                    .iter()
                    .zip(&fs)
                    .find(|(a, b)| a != b)
                    .map(|(a, _)| agents.braced(a.0))
                    .unwrap_or_default();
                return Err(Error::IllDefinedFace { class: c, face: bad });
            }
        }
    }

    let mut b = CsetBuilder::new(agents);
    for (c, (color, p, _)) in classes.into_iter().enumerate() {
        let id = b.add(color, p, faces[c].take().expect("every class has a member"))?;
        debug_assert_eq!(id, c);
    }
    let cset = b.build();
    let injections = (0..diagram.objects.len())
        .map(|obj| {
            CsetMorphism::new(
                (0..diagram.objects[obj].len())
                    .map(|id| class_of(offsets[obj] + id))
                    .collect(),
            )
        })
        .collect();
    Ok(Colimit {
        cset,
        injections,
        merges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cset::AgentSet;

    #[test]
    fn coproduct_of_two_points() {
        let agents = AgentSet::alphabetic(3);
        let a = Cset::standard_simplex_named(&agents, &["a"]).unwrap();
        let mut d = Diagram::new();
        d.object(&a);
        d.object(&a);
        let c = colimit(&d).unwrap();
        assert_eq!(c.cset.len(), 4);
        assert_eq!(c.cset.level(AgentMask::singleton(0)).len(), 2);
        assert_eq!(c.cset.level(AgentMask::EMPTY).len(), 2);
    }

    #[test]
    fn pushout_of_inclusion_span() {
        let agents = AgentSet::alphabetic(3);
        let ab = Cset::standard_simplex_named(&agents, &["a", "b"]).unwrap();
        let (pt, incl) = ab.yoneda_map(ab.level(AgentMask::singleton(0))[0]);
        let mut d = Diagram::new();
        let p = d.object(&pt);
        let l = d.object(&ab);
        let r = d.object(&ab);
        d.arrow(p, l, &incl);
        d.arrow(p, r, &incl);
        let c = colimit(&d).unwrap();
        let x = &c.cset;
        assert!(x.validate().is_valid());
        assert_eq!(x.level(AgentMask::singleton(0)).len(), 1);
        assert_eq!(x.level(AgentMask::singleton(1)).len(), 2);
        assert_eq!(x.level(AgentMask(0b11)).len(), 2);
        assert_eq!(x.facets().len(), 2);
        for (obj, inj) in c.injections.iter().enumerate() {
            inj.check(d.objects[obj], x).unwrap();
        }
        // injections commute with the diagram arrows
        for &(from, to, f) in &d.arrows {
            assert_eq!(f.then(&c.injections[to]), c.injections[from]);
        }
    }

    #[test]
    fn non_natural_arrow_is_reported() {
        let agents = AgentSet::alphabetic(2);
        let ab = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let two = Cset::coproduct(&[&ab, &ab]).unwrap();
        // send the edge of the first copy to itself but its a-vertex to the
        // second copy's a-vertex
        let mut map: Vec<usize> = (0..ab.len()).collect();
        let a_vertex = ab.level(AgentMask::singleton(0))[0];
        map[a_vertex] = ab.len() + a_vertex;
        let f = CsetMorphism::new(map);
        assert!(f.check(&ab, &two).is_err());
        let mut d = Diagram::new();
        let s = d.object(&ab);
        let t = d.object(&two);
        d.arrow(s, t, &f);
        assert!(matches!(colimit(&d), Err(Error::IllDefinedFace { .. })));
    }
}
