//! Tasks `T ⊆ I × O` and exhaustive search for decision maps `δ : P → T`
//! with `proj_I ∘ δ = π_P`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::cset::{AgentMask, AgentSet, Cset, CsetBuilder, CsetMorphism, SimplexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Task {
    inputs: Cset,
    outputs: Cset,
    spec: Cset,
    /// `(input, output)` components of each spec simplex.
    pairs: Vec<(SimplexId, SimplexId)>,
    proj_i: CsetMorphism,
}

impl Task {
    /// The task whose spec is the face closure of the given `(input, output)`
    /// pairs inside `I × O`. Pairs must have matching colors.
    pub fn new(inputs: Cset, outputs: Cset, pairs: impl IntoIterator<Item = (SimplexId, SimplexId)>) -> Result<Task> {
        if inputs.agents() != outputs.agents() {
            return Err(Error::AgentSetMismatch);
        }
        let (product, components) = Cset::product(&inputs, &outputs)?;
        let index: BTreeMap<(SimplexId, SimplexId), SimplexId> =
            components.iter().enumerate().map(|(id, &p)| (p, id)).collect();
        let mut keep = vec![false; product.len()];
        for (i, o) in pairs {
            if i >= inputs.len() || o >= outputs.len() {
                return Err(Error::InvalidTask(format!("pair ({}, {}) is out of range", i, o)));
            }
            let id = *index.get(&(i, o)).ok_or_else(|| {
                Error::InvalidTask(format!(
                    "input {} has color {} but output {} has color {}",
                    i,
                    inputs.agents().braced(inputs.color(i)),
                    o,
                    outputs.agents().braced(outputs.color(o))
                ))
            })?;
            keep[id] = true;
            for &(_, f) in product.simplex(id).faces() {
                keep[f] = true;
            }
        }
        let (spec, incl) = product.restrict(|id| keep[id])?;
        let pairs: Vec<_> = incl.as_slice().iter().map(|&p| components[p]).collect();
        let proj_i = CsetMorphism::new(pairs.iter().map(|&(i, _)| i).collect());
        Ok(Task {
            inputs,
            outputs,
            spec,
            pairs,
            proj_i,
        })
    }

    /// All same-colored pairs accepted by `valid`, closed under faces.
    pub fn from_relation(
        inputs: Cset,
        outputs: Cset,
        valid: impl Fn(&Cset, SimplexId, &Cset, SimplexId) -> bool,
    ) -> Result<Task> {
        let mut pairs = Vec::new();
        for (u, is) in inputs.levels() {
            for &i in is {
                for &o in outputs.level(u) {
                    if valid(&inputs, i, &outputs, o) {
                        pairs.push((i, o));
                    }
                }
            }
        }
        Task::new(inputs, outputs, pairs)
    }

    /// `O = I` and `T` the diagonal.
    pub fn identity(inputs: Cset) -> Result<Task> {
        let pairs: Vec<_> = (0..inputs.len()).map(|i| (i, i)).collect();
        Task::new(inputs.clone(), inputs, pairs)
    }

    pub fn inputs(&self) -> &Cset {
        &self.inputs
    }

    pub fn outputs(&self) -> &Cset {
        &self.outputs
    }

    pub fn spec(&self) -> &Cset {
        &self.spec
    }

    pub fn proj_i(&self) -> &CsetMorphism {
        &self.proj_i
    }

    pub fn pair(&self, t: SimplexId) -> (SimplexId, SimplexId) {
        self.pairs[t]
    }

    pub fn pairs(&self) -> &[(SimplexId, SimplexId)] {
        &self.pairs
    }

    /// Spec simplex for a pair, if present.
    pub fn find(&self, input: SimplexId, output: SimplexId) -> Option<SimplexId> {
        self.pairs.iter().position(|&p| p == (input, output))
    }
}

/// Input complex of all 0/1 assignments over every agent subset (ones given
/// as the mask of agents holding 1).
pub fn binary_inputs(agents: &AgentSet) -> Cset {
    let mut b = CsetBuilder::new(agents.clone());
    let mut ids: BTreeMap<(AgentMask, AgentMask), SimplexId> = BTreeMap::new();
    for u in agents.full().subsets() {
        for ones in u.subsets() {
            let faces = u
                .proper_subsets()
                .into_iter()
                .map(|t| (t, ids[&(t, ones.intersection(t))]))
                .collect();
            let payload = assignment(agents, u, |a| ones.contains(a) as u8);
            let id = b.add(u, payload, faces).expect("pseudosphere faces exist");
            ids.insert((u, ones), id);
        }
    }
    b.build()
}

fn assignment(agents: &AgentSet, u: AgentMask, bit: impl Fn(usize) -> u8) -> String {
    let parts: Vec<String> = u.iter().map(|a| format!("{}:{}", agents.name(a), bit(a))).collect();
    format!("{{{}}}", parts.join(","))
}

/// Binary consensus on `n` agents. Outputs are the simplices where every
/// participating agent decides the same bit; the spec keeps a pair when the
/// decided bit is the input of some participant, closed under faces.
pub fn binary_consensus(n: usize) -> Result<Task> {
    if n == 0 {
        return Err(Error::InvalidTask("consensus needs at least one agent".into()));
    }
    let agents = AgentSet::alphabetic(n);
    let inputs = binary_inputs(&agents);
    let mut b = CsetBuilder::new(agents.clone());
    let empty = b.add(AgentMask::EMPTY, "{}", vec![])?;
    let mut ids: BTreeMap<(AgentMask, u8), SimplexId> = BTreeMap::new();
    for u in agents.full().subsets().into_iter().filter(|u| !u.is_empty()) {
        for d in 0..2u8 {
            let faces = u
                .proper_subsets()
                .into_iter()
                .map(|t| (t, if t.is_empty() { empty } else { ids[&(t, d)] }))
                .collect();
            let id = b.add(u, assignment(&agents, u, |_| d), faces)?;
            ids.insert((u, d), id);
        }
    }
    let outputs = b.build();
    let decided: BTreeMap<SimplexId, u8> = ids.iter().map(|(&(_, d), &id)| (id, d)).collect();
    Task::from_relation(inputs, outputs, |x, i, _, o| match decided.get(&o) {
        None => true,
        Some(&d) => x.payload(i).contains(&format!(":{}", d)),
    })
}

/// Result of an exhaustive search.
#[derive(Clone, Debug)]
pub struct Search {
    pub delta: Option<CsetMorphism>,
    /// Decisions tried; with `backtracks` this is the certificate of an
    /// exhausted search.
    pub nodes: usize,
    pub backtracks: usize,
}

fn check_projection(complex: &Cset, projection: &CsetMorphism, task: &Task) -> Result<()> {
    if complex.agents() != task.inputs().agents() {
        return Err(Error::AgentSetMismatch);
    }
    if projection.len() != complex.len() {
        return Err(Error::InvalidTask(
            "projection does not cover the protocol complex".into(),
        ));
    }
    projection.check(complex, task.inputs())
}

/// Spec simplices a protocol simplex could map to, ignoring faces.
fn candidates(complex: &Cset, projection: &CsetMorphism, task: &Task, y: SimplexId) -> Vec<SimplexId> {
    let target = projection.apply(y);
    task.spec()
        .level(complex.color(y))
        .iter()
        .copied()
        .filter(|&t| task.proj_i().apply(t) == target)
        .collect()
}

/// Backtracking search for `δ` with arc consistency along face maps.
///
/// Variables are the protocol simplices in level-ascending, id-ascending
/// order; values are tried in ascending spec id, so the witness is
/// deterministic.
pub fn solvable(complex: &Cset, projection: &CsetMorphism, task: &Task) -> Result<Search> {
    check_projection(complex, projection, task)?;
    let spec = task.spec();
    let order: Vec<SimplexId> = complex.levels().flat_map(|(_, ids)| ids.iter().copied()).collect();
    let domains: Vec<BTreeSet<SimplexId>> = (0..complex.len())
        .map(|y| candidates(complex, projection, task, y).into_iter().collect())
        .collect();
    // arcs (simplex, face) in both directions
    let cofaces = complex.cofaces();
    let mut search = Search {
        delta: None,
        nodes: 0,
        backtracks: 0,
    };
    let all: Vec<SimplexId> = (0..complex.len()).collect();
    let mut root = domains;
    if !propagate(complex, spec, &cofaces, &mut root, &all) {
        return Ok(search);
    }
    let mut stack: Vec<(usize, Vec<BTreeSet<SimplexId>>)> = vec![(0, root)];
    while let Some((mut k, mut doms)) = stack.pop() {
        while k < order.len() && doms[order[k]].len() == 1 {
            k += 1;
        }
        if k == order.len() {
            let map = doms.iter().map(|d| *d.iter().next().expect("singleton")).collect();
            search.delta = Some(CsetMorphism::new(map));
            return Ok(search);
        }
        let y = order[k];
        // push in reverse so the smallest value is explored first
        let values: Vec<SimplexId> = doms[y].iter().copied().collect();
        let mut children = Vec::new();
        for t in values {
            search.nodes += 1;
            let mut d = doms.clone();
            d[y] = [t].into_iter().collect();
            if propagate(complex, spec, &cofaces, &mut d, &[y]) {
                children.push((k + 1, d));
            } else {
                search.backtracks += 1;
            }
        }
        doms.clear();
        stack.extend(children.into_iter().rev());
    }
    Ok(search)
}

/// AC-3 over the constraints `face_T(δ(z), U) = δ(face(z, U))`. Returns
/// false on a wipe-out.
fn propagate(
    complex: &Cset,
    spec: &Cset,
    cofaces: &[Vec<SimplexId>],
    doms: &mut [BTreeSet<SimplexId>],
    changed: &[SimplexId],
) -> bool {
    let mut queue: VecDeque<SimplexId> = changed.iter().copied().collect();
    let mut queued = vec![false; complex.len()];
    for &y in changed {
        queued[y] = true;
    }
    while let Some(y) = queue.pop_front() {
        queued[y] = false;
        if doms[y].is_empty() {
            return false;
        }
        // faces of y: keep values that some value of y maps onto
        for &(u, f) in complex.simplex(y).faces() {
            let support: BTreeSet<SimplexId> = doms[y].iter().map(|&t| spec.face(t, u).expect("spec face")).collect();
            let before = doms[f].len();
            doms[f].retain(|t| support.contains(t));
            if doms[f].is_empty() {
                return false;
            }
            if doms[f].len() != before && !queued[f] {
                queued[f] = true;
                queue.push_back(f);
            }
        }
        // cofaces of y: keep values whose face lands in y's domain
        let u = complex.color(y);
        for &z in &cofaces[y] {
            let before = doms[z].len();
            let dy = &doms[y];
            let kept: BTreeSet<SimplexId> = doms[z]
                .iter()
                .copied()
                .filter(|&t| dy.contains(&spec.face(t, u).expect("spec face")))
                .collect();
            doms[z] = kept;
            if doms[z].is_empty() {
                return false;
            }
            if doms[z].len() != before && !queued[z] {
                queued[z] = true;
                queue.push_back(z);
            }
        }
    }
    true
}

/// Checks a decision map independently of the search: it must be a chromatic
/// morphism into the spec and commute with the projections.
pub fn verify_decision(complex: &Cset, projection: &CsetMorphism, task: &Task, delta: &CsetMorphism) -> Result<()> {
    check_projection(complex, projection, task)?;
    delta.check(complex, task.spec())?;
    for y in 0..complex.len() {
        if task.proj_i().apply(delta.apply(y)) != projection.apply(y) {
            return Err(Error::NotAMorphism(format!(
                "proj_I(δ({})) = {} but π_P({}) = {}",
                y,
                task.proj_i().apply(delta.apply(y)),
                y,
                projection.apply(y)
            )));
        }
    }
    Ok(())
}

/// Enumerates every assignment of candidate spec simplices (filtered by
/// color and projection only) and checks each one. `limit` bounds the
/// number of assignments.
pub fn brute_force(complex: &Cset, projection: &CsetMorphism, task: &Task, limit: u64) -> Result<Option<CsetMorphism>> {
    check_projection(complex, projection, task)?;
    let cands: Vec<Vec<SimplexId>> = (0..complex.len())
        .map(|y| candidates(complex, projection, task, y))
        .collect();
    if cands.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let total = cands
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .filter(|&n| n <= limit)
        .ok_or_else(|| Error::InvalidTask(format!("brute force exceeds {} assignments", limit)))?;
    let mut digits = vec![0usize; complex.len()];
    for _ in 0..total {
        let map: Vec<SimplexId> = digits.iter().zip(&cands).map(|(&d, c)| c[d]).collect();
        let delta = CsetMorphism::new(map);
        if delta.check(complex, task.spec()).is_ok() {
            return Ok(Some(delta));
        }
        for (d, c) in digits.iter_mut().zip(&cands) {
            *d += 1;
            if *d < c.len() {
                break;
            }
            *d = 0;
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::DynamicNetworkModel;
    use crate::protocol::ProtocolFunctor;

    fn is_functor(n: usize) -> ProtocolFunctor {
        ProtocolFunctor::new(DynamicNetworkModel::immediate_snapshot(AgentSet::alphabetic(n))).unwrap()
    }

    #[test]
    fn consensus_shapes() {
        let t = binary_consensus(2).unwrap();
        let full = AgentMask(0b11);
        assert_eq!(t.inputs().level(full).len(), 4);
        assert_eq!(t.inputs().facets().len(), 4);
        assert_eq!(t.outputs().facets().len(), 2);
        // mixed inputs allow both decisions, uniform inputs only one
        assert_eq!(t.spec().level(full).len(), 6);
        let zeros = t
            .inputs()
            .level(full)
            .iter()
            .copied()
            .find(|&i| t.inputs().payload(i) == "{a:0,b:0}")
            .unwrap();
        let ones_out = t
            .outputs()
            .level(full)
            .iter()
            .copied()
            .find(|&o| t.outputs().payload(o) == "{a:1,b:1}")
            .unwrap();
        assert!(t.find(zeros, ones_out).is_none());
        assert!(t.spec().validate().is_valid());
        t.proj_i().check(t.spec(), t.inputs()).unwrap();
    }

    #[test]
    fn one_agent_consensus_is_trivial() {
        let t = binary_consensus(1).unwrap();
        let id = CsetMorphism::identity(t.inputs());
        let s = solvable(t.inputs(), &id, &t).unwrap();
        verify_decision(t.inputs(), &id, &t, s.delta.as_ref().unwrap()).unwrap();
    }

    #[test]
    fn identity_task_at_rounds_zero_and_one() {
        let agents = AgentSet::alphabetic(3);
        let x = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let t = Task::identity(x.clone()).unwrap();
        let id = CsetMorphism::identity(&x);
        let s0 = solvable(&x, &id, &t).unwrap();
        verify_decision(&x, &id, &t, s0.delta.as_ref().unwrap()).unwrap();
        let p = is_functor(3).extend(&x).unwrap();
        let s1 = solvable(&p.complex, &p.projection, &t).unwrap();
        let delta = s1.delta.unwrap();
        verify_decision(&p.complex, &p.projection, &t, &delta).unwrap();
        // the diagonal section is forced
        for y in 0..p.complex.len() {
            assert_eq!(t.pair(delta.apply(y)), (p.projection.apply(y), p.projection.apply(y)));
        }
    }

    #[test]
    fn two_agent_consensus_is_unsolvable() {
        let t = binary_consensus(2).unwrap();
        let f = is_functor(2);
        let mut complex = t.inputs().clone();
        let mut projection = CsetMorphism::identity(&complex);
        for round in 0..=2 {
            let s = solvable(&complex, &projection, &t).unwrap();
            assert!(s.delta.is_none(), "round {}", round);
            if round <= 1 {
                assert!(brute_force(&complex, &projection, &t, 1 << 22).unwrap().is_none());
            }
            let ext = f.extend(&complex).unwrap();
            projection = ext.projection.then(&projection);
            complex = ext.complex;
        }
    }

    #[test]
    fn search_and_brute_force_agree_on_a_solvable_relaxation() {
        // dropping agreement: outputs are all assignments, decisions = inputs
        let agents = AgentSet::alphabetic(2);
        let inputs = binary_inputs(&agents);
        let t = Task::new(inputs.clone(), inputs.clone(), (0..inputs.len()).map(|i| (i, i))).unwrap();
        let id = CsetMorphism::identity(&inputs);
        let a = solvable(&inputs, &id, &t).unwrap().delta.unwrap();
        let b = brute_force(&inputs, &id, &t, 1 << 20).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_agents_are_rejected() {
        let t = binary_consensus(2).unwrap();
        let x = binary_inputs(&AgentSet::alphabetic(3));
        let id = CsetMorphism::identity(&x);
        assert!(matches!(solvable(&x, &id, &t), Err(Error::AgentSetMismatch)));
        let agents = AgentSet::alphabetic(2);
        let bad = Task::new(
            Cset::standard_simplex(&agents, agents.full()).unwrap(),
            binary_inputs(&agents),
            [(3, 1)],
        );
        assert!(matches!(bad, Err(Error::InvalidTask(_))));
    }
}
