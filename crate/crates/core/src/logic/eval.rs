//! Bounded three-valued evaluation over a truncated free algebra.
//!
//! Formulas are evaluated for all simplices of a round at once. Epistemic
//! operators group worlds of the same round; `X` reads the next round through
//! the fibers of `p_n`; `[]` and `<>` unfold recursively and become unknown
//! when they reach the horizon.

use std::collections::{BTreeSet, HashMap, VecDeque};

use petgraph::unionfind::UnionFind;

use super::ast::Formula;
use crate::cset::{AgentMask, Cset, SimplexId};
use crate::decisions::{PredicateRegistry, VCset, Value};
use crate::error::{Error, Result};
use crate::iterate::FreeAlgebraTrunc;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    /// Not decided within the materialized horizon.
    Unknown {
        horizon: usize,
    },
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Verdict::True
    }

    pub fn is_false(self) -> bool {
        self == Verdict::False
    }

    pub fn is_decided(self) -> bool {
        !matches!(self, Verdict::Unknown { .. })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            u => u,
        }
    }

    pub fn and(self, other: Self) -> Self {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::True, v) | (v, Verdict::True) => v,
            (u, _) => u,
        }
    }

    pub fn or(self, other: Self) -> Self {
        self.not().and(other.not()).not()
    }

    pub fn implies(self, other: Self) -> Self {
        self.not().or(other)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::True => write!(f, "true"),
            Verdict::False => write!(f, "false"),
            Verdict::Unknown { horizon } => write!(f, "unknown (horizon {})", horizon),
        }
    }
}

/// Evaluates formulas over the rounds of a [`FreeAlgebraTrunc`], optionally
/// with decision values for `#pred(...)` atoms.
#[derive(Clone, Debug)]
pub struct Evaluator<'a> {
    t: &'a FreeAlgebraTrunc,
    values: Option<&'a [VCset]>,
    preds: PredicateRegistry,
    atoms: Vec<BTreeSet<String>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(t: &'a FreeAlgebraTrunc) -> Self {
        Evaluator {
            t,
            values: None,
            preds: PredicateRegistry::with_builtins(),
            atoms: t.model(0).atom_universe(),
        }
    }

    /// Attaches per-round values; the underlying csets must be the rounds.
    pub fn with_values(mut self, values: &'a [VCset]) -> Result<Self> {
        if values.len() != self.t.horizon() + 1 || values.iter().enumerate().any(|(n, v)| v.cset() != self.t.round(n)) {
            return Err(Error::IncompatibleValues(
                "value rounds do not match the iterated complexes".into(),
            ));
        }
        self.values = Some(values);
        Ok(self)
    }

    pub fn with_predicates(mut self, preds: PredicateRegistry) -> Self {
        self.preds = preds;
        self
    }

    pub fn trunc(&self) -> &FreeAlgebraTrunc {
        self.t
    }

    fn unknown(&self) -> Verdict {
        Verdict::Unknown {
            horizon: self.t.horizon(),
        }
    }

    fn agent(&self, name: &str) -> Result<usize> {
        self.t.round(0).agents().index_of(name)
    }

    fn agent_set(&self, names: &[String]) -> Result<AgentMask> {
        self.t.round(0).agents().mask_of(names)
    }

    /// Checks agent and atom names without evaluating.
    pub fn resolve(&self, phi: &Formula) -> Result<()> {
        match phi {
            Formula::Atom { agent, name } => {
                let a = self.agent(agent)?;
                if !self.atoms[a].contains(name) {
                    return Err(Error::UnknownAtom {
                        agent: agent.clone(),
                        name: name.clone(),
                    });
                }
            }
            Formula::AtomAny(name) => {
                if !self.atoms.iter().any(|l| l.contains(name)) {
                    return Err(Error::UnknownAtom {
                        agent: "*".into(),
                        name: name.clone(),
                    });
                }
            }
            Formula::Pred { name, agents } => {
                self.preds.get(name)?;
                self.agent_set(agents)?;
                if self.values.is_none() {
                    return Err(Error::NoValues);
                }
            }
            Formula::K(a, _) | Formula::Khat(a, _) => {
                self.agent(a)?;
            }
            Formula::C(b, _) | Formula::D(b, _) | Formula::Dhat(b, _) => {
                self.agent_set(b)?;
            }
            _ => {}
        }
        phi.children().into_iter().try_for_each(|c| self.resolve(c))
    }

    /// Verdict at one world.
    pub fn eval(&self, round: usize, world: SimplexId, phi: &Formula) -> Result<Verdict> {
        self.t.check_world(round, world)?;
        self.resolve(phi)?;
        Ok(self.eval_round(round, phi)?[world])
    }

    /// Verdicts for every simplex of a round (entries of `∅`-simplices are
    /// meaningless).
    pub fn eval_round(&self, round: usize, phi: &Formula) -> Result<Vec<Verdict>> {
        let x = self.t.round(round);
        let n = x.len();
        Ok(match phi {
            Formula::True => vec![Verdict::True; n],
            Formula::False => vec![Verdict::False; n],
            Formula::Atom { agent, name } => {
                let a = self.agent(agent)?;
                let m = self.t.model(round);
                (0..n).map(|w| Verdict::from_bool(m.holds(w, a, name))).collect()
            }
            Formula::AtomAny(name) => {
                let m = self.t.model(round);
                (0..n)
                    .map(|w| Verdict::from_bool(x.color(w).iter().any(|a| m.holds(w, a, name))))
                    .collect()
            }
            Formula::Pred { name, agents } => {
                let p = self.preds.get(name)?;
                let values = self.values.ok_or(Error::NoValues)?;
                let vc = &values[round];
                let listed = self.agent_set(agents)?;
                (0..n)
                    .map(|w| {
                        let color = x.color(w);
                        let who = if agents.is_empty() { color } else { listed };
                        let args: Vec<Option<&Value>> = who.iter().map(|a| vc.value(w, a)).collect();
                        Verdict::from_bool(p(&args))
                    })
                    .collect()
            }
            Formula::Not(f) => self.eval_round(round, f)?.into_iter().map(Verdict::not).collect(),
            Formula::And(a, b) => self.zip(round, a, b, Verdict::and)?,
            Formula::Or(a, b) => self.zip(round, a, b, Verdict::or)?,
            Formula::Implies(a, b) => self.zip(round, a, b, Verdict::implies)?,
            Formula::K(a, f) => {
                let b = AgentMask::singleton(self.agent(a)?);
                group_fold(x, b, &self.eval_round(round, f)?, Verdict::True, Verdict::and)
            }
            Formula::Khat(a, f) => {
                let b = AgentMask::singleton(self.agent(a)?);
                group_fold(x, b, &self.eval_round(round, f)?, Verdict::False, Verdict::or)
            }
            Formula::D(b, f) => group_fold(
                x,
                self.agent_set(b)?,
                &self.eval_round(round, f)?,
                Verdict::True,
                Verdict::and,
            ),
            Formula::Dhat(b, f) => group_fold(
                x,
                self.agent_set(b)?,
                &self.eval_round(round, f)?,
                Verdict::False,
                Verdict::or,
            ),
            Formula::C(b, f) => {
                let inner = self.eval_round(round, f)?;
                let (uf, _) = common_components(x, self.agent_set(b)?);
                let mut acc: HashMap<usize, Verdict> = HashMap::new();
                for w in x.worlds() {
                    let e = acc.entry(uf.find(w)).or_insert(Verdict::True);
                    *e = e.and(inner[w]);
                }
                (0..n)
                    .map(|w| acc.get(&uf.find(w)).copied().unwrap_or(Verdict::True))
                    .collect()
            }
            Formula::Next(f) => {
                if round == self.t.horizon() {
                    vec![self.unknown(); n]
                } else {
                    let next = self.eval_round(round + 1, f)?;
                    self.lift(round, &next, Verdict::True, Verdict::and)?
                }
            }
            Formula::Always(f) => {
                let now = self.eval_round(round, f)?;
                let later = if round == self.t.horizon() {
                    vec![self.unknown(); n]
                } else {
                    let next = self.eval_round(round + 1, phi)?;
                    self.lift(round, &next, Verdict::True, Verdict::and)?
                };
                now.into_iter().zip(later).map(|(a, b)| a.and(b)).collect()
            }
            Formula::Eventually(f) => {
                let now = self.eval_round(round, f)?;
                let later = if round == self.t.horizon() {
                    vec![self.unknown(); n]
                } else {
                    let next = self.eval_round(round + 1, phi)?;
                    self.lift(round, &next, Verdict::False, Verdict::or)?
                };
                now.into_iter().zip(later).map(|(a, b)| a.or(b)).collect()
            }
        })
    }

    fn zip(
        &self,
        round: usize,
        a: &Formula,
        b: &Formula,
        op: impl Fn(Verdict, Verdict) -> Verdict,
    ) -> Result<Vec<Verdict>> {
        let va = self.eval_round(round, a)?;
        let vb = self.eval_round(round, b)?;
        Ok(va.into_iter().zip(vb).map(|(x, y)| op(x, y)).collect())
    }

    /// Folds next-round verdicts over the successors of every simplex.
    fn lift(
        &self,
        round: usize,
        next: &[Verdict],
        unit: Verdict,
        op: impl Fn(Verdict, Verdict) -> Verdict,
    ) -> Result<Vec<Verdict>> {
        (0..self.t.round(round).len())
            .map(|w| {
                Ok(self
                    .t
                    .successors(round, w)?
                    .iter()
                    .fold(unit, |acc, &y| op(acc, next[y])))
            })
            .collect()
    }

    /// A short trace supporting the verdict of the outermost operator: the
    /// linked or reachable world where the body fails (for `K`, `D`, `C`,
    /// `X`, `[]` when false) or holds (for `Khat`, `Dhat`, `<>` when true).
    pub fn trace(&self, round: usize, world: SimplexId, phi: &Formula) -> Result<Vec<(usize, SimplexId)>> {
        let verdict = self.eval(round, world, phi)?;
        let x = self.t.round(round);
        let same_round = |b: AgentMask, f: &Formula, want: Verdict, closure: bool| -> Result<Vec<(usize, SimplexId)>> {
            let inner = self.eval_round(round, f)?;
            let linked: Vec<SimplexId> = if closure {
                let (uf, _) = common_components(x, b);
                x.worlds().filter(|&y| uf.equiv(y, world)).collect()
            } else if b.is_subset(x.color(world)) {
                let key = x.face(world, b).expect("subset of color");
                x.worlds()
                    .filter(|&y| b.is_subset(x.color(y)) && x.face(y, b) == Some(key))
                    .collect()
            } else {
                Vec::new()
            };
            Ok(linked
                .into_iter()
                .find(|&y| inner[y] == want)
                .map(|y| vec![(round, world), (round, y)])
                .unwrap_or_default())
        };
        match (phi, verdict) {
            (Formula::K(a, f), Verdict::False) => {
                same_round(AgentMask::singleton(self.agent(a)?), f, Verdict::False, false)
            }
            (Formula::Khat(a, f), Verdict::True) => {
                same_round(AgentMask::singleton(self.agent(a)?), f, Verdict::True, false)
            }
            (Formula::D(b, f), Verdict::False) => same_round(self.agent_set(b)?, f, Verdict::False, false),
            (Formula::Dhat(b, f), Verdict::True) => same_round(self.agent_set(b)?, f, Verdict::True, false),
            (Formula::C(b, f), Verdict::False) => same_round(self.agent_set(b)?, f, Verdict::False, true),
            (Formula::Next(f), Verdict::False) => {
                let next = self.eval_round(round + 1, f)?;
                Ok(self
                    .t
                    .successors(round, world)?
                    .iter()
                    .find(|&&y| next[y].is_false())
                    .map(|&y| vec![(round, world), (round + 1, y)])
                    .unwrap_or_default())
            }
            (Formula::Always(f), Verdict::False) => self.search_path(round, world, f, Verdict::False),
            (Formula::Eventually(f), Verdict::True) => self.search_path(round, world, f, Verdict::True),
            _ => Ok(Vec::new()),
        }
    }

    /// Breadth-first search along successors for a world where `f` has verdict `want`.
    fn search_path(
        &self,
        round: usize,
        world: SimplexId,
        f: &Formula,
        want: Verdict,
    ) -> Result<Vec<(usize, SimplexId)>> {
        let per_round: Vec<Vec<Verdict>> = (round..=self.t.horizon())
            .map(|r| self.eval_round(r, f))
            .collect::<Result<_>>()?;
        let mut parent: HashMap<(usize, SimplexId), (usize, SimplexId)> = HashMap::new();
        let mut queue = VecDeque::from([(round, world)]);
        while let Some((r, w)) = queue.pop_front() {
            if per_round[r - round][w] == want {
                let mut path = vec![(r, w)];
                let mut cur = (r, w);
                while let Some(&p) = parent.get(&cur) {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Ok(path);
            }
            if r < self.t.horizon() {
                for &y in self.t.successors(r, w)? {
                    if parent.insert((r + 1, y), (r, w)).is_none() {
                        queue.push_back((r + 1, y));
                    }
                }
            }
        }
        Ok(Vec::new())
    }
}

/// Folds verdicts over classes of worlds sharing their `B`-face. Worlds
/// whose color misses part of `B` are linked to nothing and get `unit`.
fn group_fold(
    x: &Cset,
    b: AgentMask,
    inner: &[Verdict],
    unit: Verdict,
    op: impl Fn(Verdict, Verdict) -> Verdict,
) -> Vec<Verdict> {
    let mut acc: HashMap<SimplexId, Verdict> = HashMap::new();
    for w in x.worlds() {
        if let Some(key) = x.face(w, b) {
            let e = acc.entry(key).or_insert(unit);
            *e = op(*e, inner[w]);
        }
    }
    (0..x.len())
        .map(|w| {
            x.face(w, b)
                .filter(|_| !x.color(w).is_empty())
                .map_or(unit, |key| acc[&key])
        })
        .collect()
}

/// Classes of the reflexive-transitive closure of `⋃_{a∈B} lnk_a` on worlds.
fn common_components(x: &Cset, b: AgentMask) -> (UnionFind<usize>, usize) {
    let mut uf = UnionFind::new(x.len());
    let mut merges = 0;
    for w in x.worlds() {
        for a in x.color(w).intersection(b).iter() {
            if uf.union(w, x.vertex(w, a).expect("own vertex")) {
                merges += 1;
            }
        }
    }
    (uf, merges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::DynamicNetworkModel;
    use crate::cset::{AgentSet, SimplicialModel};
    use crate::logic::parse;
    use crate::protocol::ProtocolFunctor;

    fn labeled_edge() -> SimplicialModel {
        let agents = AgentSet::alphabetic(2);
        let g = Cset::standard_simplex(&agents, agents.full()).unwrap();
        SimplicialModel::labeled_by(g, |x, v| {
            let name = if x.color(v) == AgentMask::singleton(0) {
                "in0"
            } else {
                "in1"
            };
            [name.to_string()].into_iter().collect()
        })
    }

    fn is_trunc(h: usize) -> FreeAlgebraTrunc {
        let f = ProtocolFunctor::new(DynamicNetworkModel::immediate_snapshot(AgentSet::alphabetic(2))).unwrap();
        FreeAlgebraTrunc::build(&f, labeled_edge(), h, None).unwrap()
    }

    #[test]
    fn kleene_tables() {
        let u = Verdict::Unknown { horizon: 1 };
        assert_eq!(u.and(Verdict::False), Verdict::False);
        assert_eq!(u.and(Verdict::True), u);
        assert_eq!(u.or(Verdict::True), Verdict::True);
        assert_eq!(u.or(Verdict::False), u);
        assert_eq!(Verdict::False.implies(u), Verdict::True);
        assert_eq!(u.not(), u);
    }

    #[test]
    fn knowledge_after_one_snapshot_round() {
        let t = is_trunc(1);
        let e = Evaluator::new(&t);
        let x = t.round(1);
        // facet where a saw both and b saw only itself
        let facet = x
            .facets()
            .into_iter()
            .find(|&f| x.payload(f).contains("(a,{a,b}|") && x.payload(f).contains("(b,{b}|"))
            .unwrap();
        // a's vertex is itself a world without b, so only the guarded form holds
        let bare = parse("K[a] (in1@b)").unwrap();
        assert_eq!(e.eval(1, facet, &bare).unwrap(), Verdict::False);
        let a_vertex = x.vertex(facet, 0).unwrap();
        assert_eq!(e.trace(1, facet, &bare).unwrap(), vec![(1, facet), (1, a_vertex)]);
        let guarded = parse("K[a] (alive(b) -> in1@b)").unwrap();
        assert_eq!(e.eval(1, facet, &guarded).unwrap(), Verdict::True);
        for w in x.worlds() {
            assert_eq!(
                e.eval(1, w, &parse("alive(a)").unwrap()).unwrap(),
                Verdict::from_bool(x.color(w).contains(0))
            );
            assert_eq!(
                e.eval(1, w, &parse("dead(a)").unwrap()).unwrap(),
                Verdict::from_bool(!x.color(w).contains(0))
            );
        }
    }

    #[test]
    fn knowledge_is_distributed_knowledge_of_a_singleton() {
        let t = is_trunc(1);
        let e = Evaluator::new(&t);
        for text in ["in1@b", "!in0@a", "K[b] in1@b | in0@a"] {
            let body = parse(text).unwrap();
            let k = e.eval_round(1, &Formula::k("a", body.clone())).unwrap();
            let d = e.eval_round(1, &Formula::d(&["a"], body)).unwrap();
            assert_eq!(k, d);
        }
    }

    #[test]
    fn next_and_horizon() {
        let t = is_trunc(1);
        let e = Evaluator::new(&t);
        let top = t.round(0).level(AgentMask(0b11))[0];
        assert_eq!(e.eval(0, top, &parse("X in0@a").unwrap()).unwrap(), Verdict::True);
        assert_eq!(
            e.eval(1, t.round(1).facets()[0], &parse("X in0@a").unwrap()).unwrap(),
            Verdict::Unknown { horizon: 1 }
        );
        assert_eq!(
            e.eval(0, top, &parse("[] in0@a").unwrap()).unwrap(),
            Verdict::Unknown { horizon: 1 }
        );
        assert_eq!(e.eval(0, top, &parse("[] !in0@a").unwrap()).unwrap(), Verdict::False);
        assert_eq!(e.eval(0, top, &parse("<> in0@a").unwrap()).unwrap(), Verdict::True);
        assert_eq!(
            e.eval(0, top, &parse("<> !in0@a").unwrap()).unwrap(),
            Verdict::Unknown { horizon: 1 }
        );
    }

    #[test]
    fn errors() {
        let t = is_trunc(1);
        let e = Evaluator::new(&t);
        assert!(matches!(
            e.eval(0, 0, &parse("true").unwrap()),
            Err(Error::WorldOutOfRange { .. })
        ));
        assert!(matches!(
            e.eval(0, 99, &parse("true").unwrap()),
            Err(Error::WorldOutOfRange { .. })
        ));
        assert!(matches!(
            e.eval(0, 1, &parse("zz@a").unwrap()),
            Err(Error::UnknownAtom { .. })
        ));
        assert!(matches!(
            e.eval(0, 1, &parse("K[q] true").unwrap()),
            Err(Error::UnknownAgent(_))
        ));
        assert!(matches!(
            e.eval(0, 1, &parse("#agree()").unwrap()),
            Err(Error::NoValues)
        ));
    }

    /// Two edges sharing a's vertex; b's input differs between them.
    fn fork() -> SimplicialModel {
        let agents = AgentSet::alphabetic(2);
        let mut b = crate::cset::CsetBuilder::new(agents);
        let e = b.add(AgentMask::EMPTY, "{}", vec![]).unwrap();
        let va = b.add(AgentMask(0b01), "a", vec![(AgentMask::EMPTY, e)]).unwrap();
        let b0 = b.add(AgentMask(0b10), "b0", vec![(AgentMask::EMPTY, e)]).unwrap();
        let b1 = b.add(AgentMask(0b10), "b1", vec![(AgentMask::EMPTY, e)]).unwrap();
        for (i, vb) in [b0, b1].into_iter().enumerate() {
            let faces = vec![(AgentMask::EMPTY, e), (AgentMask(0b01), va), (AgentMask(0b10), vb)];
            b.add(AgentMask(0b11), format!("e{}", i), faces).unwrap();
        }
        SimplicialModel::labeled_by(b.build(), |x, v| match x.payload(v) {
            "b0" => ["in0".to_string()].into_iter().collect(),
            "b1" => ["in1".to_string()].into_iter().collect(),
            _ => Default::default(),
        })
    }

    #[test]
    fn traces() {
        let f = ProtocolFunctor::new(DynamicNetworkModel::immediate_snapshot(AgentSet::alphabetic(2))).unwrap();
        let t = FreeAlgebraTrunc::build(&f, fork(), 2, None).unwrap();
        let e = Evaluator::new(&t);
        let e1 = t
            .round(0)
            .facets()
            .into_iter()
            .find(|&w| t.round(0).payload(w) == "e1")
            .unwrap();
        let learns = parse("K[a] (alive(b) -> in1@b)").unwrap();
        assert_eq!(e.eval(0, e1, &learns).unwrap(), Verdict::False);
        let path = e.trace(0, e1, &Formula::eventually(learns.clone())).unwrap();
        assert_eq!(path.len(), 2);
        assert_eq!(path[0], (0, e1));
        assert_eq!(e.eval(path[1].0, path[1].1, &learns).unwrap(), Verdict::True);
        let path = e.trace(0, e1, &Formula::always(learns)).unwrap();
        assert_eq!(path, vec![(0, e1)]);
    }
}
