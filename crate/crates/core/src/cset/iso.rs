use super::{Cset, CsetMorphism, SimplexId};

struct Search<'a> {
    x: &'a Cset,
    y: &'a Cset,
    payloads: bool,
    order: Vec<SimplexId>,
    sig_x: Vec<Vec<usize>>,
    sig_y: Vec<Vec<usize>>,
    map: Vec<Option<SimplexId>>,
    used: Vec<bool>,
    trail: Vec<SimplexId>,
}

/// Number of codimension-one cofaces of each color, per simplex.
fn signatures(x: &Cset) -> Vec<Vec<usize>> {
    let n = x.agents().len();
    let mut sig = vec![vec![0; n]; x.len()];
    for (id, s) in x.simplices().iter().enumerate() {
        for a in s.color().iter() {
            let f = x.face(id, s.color().without(a)).expect("complete faces");
            sig[f][a] += 1;
        }
    }
    sig
}

impl<'a> Search<'a> {
    fn bind(&mut self, xs: SimplexId, ys: SimplexId) -> bool {
        if let Some(cur) = self.map[xs] {
            return cur == ys;
        }
        if self.used[ys]
            || self.x.color(xs) != self.y.color(ys)
            || self.sig_x[xs] != self.sig_y[ys]
            || (self.payloads && self.x.payload(xs) != self.y.payload(ys))
        {
            return false;
        }
        self.map[xs] = Some(ys);
        self.used[ys] = true;
        self.trail.push(xs);
        true
    }

    /// Binds `xs -> ys` together with all faces.
    fn assign(&mut self, xs: SimplexId, ys: SimplexId) -> bool {
        if !self.bind(xs, ys) {
            return false;
        }
        let x = self.x;
        for &(u, f) in x.simplex(xs).faces().iter().rev() {
            let target = self.y.face(ys, u).expect("same color");
            if !self.bind(f, target) {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let xs = self.trail.pop().unwrap();
            let ys = self.map[xs].take().unwrap();
            self.used[ys] = false;
        }
    }

    fn solve(&mut self, pos: usize) -> bool {
        let Some(k) = (pos..self.order.len()).find(|&k| self.map[self.order[k]].is_none()) else {
            return true;
        };
        let xs = self.order[k];
        let color = self.x.color(xs);
        let candidates: Vec<SimplexId> = self.y.level(color).to_vec();
        for ys in candidates {
            if self.used[ys] {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(xs, ys) && self.solve(k + 1) {
                return true;
            }
            self.undo(mark);
        }
        false
    }
}

/// Searches a color-preserving isomorphism `x -> y` commuting with faces.
/// With `payloads` set, corresponding simplices must also carry equal
/// payloads.
///
/// Simplices are assigned top-down so that each choice fixes all of its
/// faces at once.
pub fn find_isomorphism(x: &Cset, y: &Cset, payloads: bool) -> Option<CsetMorphism> {
    if x.agents() != y.agents() || x.len() != y.len() || x.level_counts() != y.level_counts() {
        return None;
    }
    let mut order: Vec<SimplexId> = (0..x.len()).collect();
    order.sort_by_key(|&id| (std::cmp::Reverse(x.color(id).len()), id));
    let mut s = Search {
        x,
        y,
        payloads,
        order,
        sig_x: signatures(x),
        sig_y: signatures(y),
        map: vec![None; x.len()],
        used: vec![false; y.len()],
        trail: Vec::new(),
    };
    if !s.solve(0) {
        return None;
    }
    let f = CsetMorphism::new(s.map.into_iter().map(Option::unwrap).collect());
    debug_assert!(f.check(x, y).is_ok());
    Some(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cset::{AgentMask, AgentSet};

    #[test]
    fn renumbered_copy_is_isomorphic() {
        let agents = AgentSet::alphabetic(3);
        let g = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let renamed = g.clone().with_payloads(|id| format!("p{}", 7 - id));
        let (c, _) = renamed.canonical();
        assert!(find_isomorphism(&g, &c, false).is_some());
        assert!(find_isomorphism(&g, &c, true).is_none());
    }

    #[test]
    fn distinguishes_gluings() {
        let agents = AgentSet::alphabetic(2);
        let ab = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let two = Cset::coproduct(&[&ab, &ab]).unwrap();
        // two edges sharing the ∅-simplex only
        let e = ab.level(AgentMask::EMPTY)[0];
        let glued = two.restrict(|_| true).unwrap().0;
        assert!(find_isomorphism(&two, &glued, true).is_some());
        let (pt, m) = ab.yoneda_map(e);
        let m2 = CsetMorphism::new(m.as_slice().iter().map(|&i| i + ab.len()).collect());
        let mut d = crate::cset::Diagram::new();
        let p = d.object(&pt);
        let t = d.object(&two);
        d.arrow(p, t, &m);
        d.arrow(p, t, &m2);
        let one_component = crate::cset::colimit(&d).unwrap().cset;
        assert_eq!(one_component.len(), two.len() - 1);
        assert!(find_isomorphism(&two, &one_component, false).is_none());
    }
}
