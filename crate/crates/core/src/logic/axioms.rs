//! Randomized soundness harness for the temporal-epistemic axioms.
//!
//! Each sample instantiates an axiom schema with random subformulas and agent
//! sets, picks a round, and evaluates the instance at every world of that
//! round. A `False` verdict anywhere is a soundness violation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ast::Formula;
use super::eval::{Evaluator, Verdict};
use crate::error::Result;
use crate::iterate::FreeAlgebraTrunc;

/// Counterexamples kept per axiom; the count is always exact.
const MAX_COUNTEREXAMPLES: usize = 8;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    K,
    Four,
    B,
    Mono,
    Union,
    NE,
    P,
    Max,
    GFP,
    KG,
    KGBox,
    KGDiamond,
    AX,
    XX,
    AI,
    E,
}

impl Axiom {
    pub const ALL: [Axiom; 16] = [
        Axiom::K,
        Axiom::Four,
        Axiom::B,
        Axiom::Mono,
        Axiom::Union,
        Axiom::NE,
        Axiom::P,
        Axiom::Max,
        Axiom::GFP,
        Axiom::KG,
        Axiom::KGBox,
        Axiom::KGDiamond,
        Axiom::AX,
        Axiom::XX,
        Axiom::AI,
        Axiom::E,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::K => "K",
            Axiom::Four => "4",
            Axiom::B => "B",
            Axiom::Mono => "Mono",
            Axiom::Union => "Union",
            Axiom::NE => "NE",
            Axiom::P => "P",
            Axiom::Max => "Max",
            Axiom::GFP => "GFP",
            Axiom::KG => "KG",
            Axiom::KGBox => "KG[]",
            Axiom::KGDiamond => "KG<>",
            Axiom::AX => "AX",
            Axiom::XX => "XX",
            Axiom::AI => "AI",
            Axiom::E => "E",
        }
    }
}

/// Random formulas over the agents and atoms of a truncated free algebra.
#[derive(Clone, Debug)]
pub struct FormulaGen {
    agents: Vec<String>,
    atoms: Vec<(String, String)>,
    any_atoms: Vec<String>,
    pub max_depth: usize,
}

impl FormulaGen {
    pub fn new(t: &FreeAlgebraTrunc) -> Self {
        let names = t.round(0).agents().names().to_vec();
        let universe = t.model(0).atom_universe();
        let mut atoms = Vec::new();
        let mut any_atoms: Vec<String> = Vec::new();
        for (a, set) in universe.iter().enumerate() {
            for p in set {
                atoms.push((names[a].clone(), p.clone()));
                any_atoms.push(p.clone());
            }
        }
        any_atoms.sort();
        any_atoms.dedup();
        FormulaGen {
            agents: names,
            atoms,
            any_atoms,
            max_depth: 3,
        }
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    /// Nonempty random agent set, in agent order.
    pub fn agent_set<R: Rng>(&self, rng: &mut R) -> Vec<String> {
        loop {
            let s: Vec<String> = self.agents.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            if !s.is_empty() {
                return s;
            }
        }
    }

    /// A pair `U ⊆ U'` of nonempty agent sets.
    pub fn nested_sets<R: Rng>(&self, rng: &mut R) -> (Vec<String>, Vec<String>) {
        let big = self.agent_set(rng);
        loop {
            let small: Vec<String> = big.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
            if !small.is_empty() {
                return (small, big);
            }
        }
    }

    pub fn complement(&self, u: &[String]) -> Vec<String> {
        self.agents.iter().filter(|a| !u.contains(a)).cloned().collect()
    }

    fn agent<R: Rng>(&self, rng: &mut R) -> String {
        self.agents.choose(rng).expect("nonempty agent set").clone()
    }

    fn leaf<R: Rng>(&self, rng: &mut R) -> Formula {
        match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            2 => Formula::alive(&self.agent(rng)),
            3..=4 if !self.any_atoms.is_empty() => Formula::AtomAny(self.any_atoms.choose(rng).unwrap().clone()),
            _ => match self.atoms.choose(rng) {
                Some((a, p)) => Formula::atom(a, p),
                None => Formula::dead(&self.agent(rng)),
            },
        }
    }

    /// Any formula of the language except value predicates.
    pub fn formula<R: Rng>(&self, rng: &mut R) -> Formula {
        self.general(rng, self.max_depth)
    }

    fn general<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.25) {
            return self.leaf(rng);
        }
        let d = depth - 1;
        match rng.gen_range(0..13) {
            0 => Formula::not(self.general(rng, d)),
            1 => Formula::and(self.general(rng, d), self.general(rng, d)),
            2 => Formula::or(self.general(rng, d), self.general(rng, d)),
            3 => Formula::implies(self.general(rng, d), self.general(rng, d)),
            4 => Formula::k(&self.agent(rng), self.general(rng, d)),
            5 => Formula::khat(&self.agent(rng), self.general(rng, d)),
            6 => Formula::c(&self.agent_set(rng), self.general(rng, d)),
            7 => Formula::d(&self.agent_set(rng), self.general(rng, d)),
            8 => Formula::dhat(&self.agent_set(rng), self.general(rng, d)),
            9 => Formula::next(self.general(rng, d)),
            10 => Formula::always(self.general(rng, d)),
            11 => Formula::eventually(self.general(rng, d)),
            _ => self.leaf(rng),
        }
    }

    /// A positive epistemic formula: negation only on atoms; `∧`, `∨`, `K`,
    /// `C`, `D`.
    pub fn positive<R: Rng>(&self, rng: &mut R) -> Formula {
        self.positive_at(rng, self.max_depth)
    }

    fn positive_at<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.25) {
            return match (rng.gen_range(0..6), self.atoms.choose(rng)) {
                (0, _) => Formula::True,
                (1, _) => Formula::False,
                (2, Some((a, p))) => Formula::not(Formula::atom(a, p)),
                (3, _) if !self.any_atoms.is_empty() => {
                    Formula::not(Formula::AtomAny(self.any_atoms.choose(rng).unwrap().clone()))
                }
                (_, Some((a, p))) => Formula::atom(a, p),
                (_, None) => Formula::True,
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..5) {
            0 => Formula::and(self.positive_at(rng, d), self.positive_at(rng, d)),
            1 => Formula::or(self.positive_at(rng, d), self.positive_at(rng, d)),
            2 => Formula::k(&self.agent(rng), self.positive_at(rng, d)),
            3 => Formula::c(&self.agent_set(rng), self.positive_at(rng, d)),
            _ => Formula::d(&self.agent_set(rng), self.positive_at(rng, d)),
        }
    }
}

pub fn random_formula<R: Rng>(gen: &FormulaGen, rng: &mut R) -> Formula {
    gen.formula(rng)
}

pub fn random_positive_formula<R: Rng>(gen: &FormulaGen, rng: &mut R) -> Formula {
    gen.positive(rng)
}

/// One axiom instance: either a single formula that must never be `False`,
/// or (for E) two sides that must agree wherever both are decided.
enum Instance {
    Valid(Formula),
    Equivalent(Formula, Formula),
}

fn instantiate<R: Rng>(axiom: Axiom, gen: &FormulaGen, rng: &mut R) -> Instance {
    use Formula as F;
    let phi = gen.formula(rng);
    let psi = gen.formula(rng);
    let u = gen.agent_set(rng);
    Instance::Valid(match axiom {
        Axiom::K => F::implies(
            F::d(&u, F::implies(phi.clone(), psi.clone())),
            F::implies(F::d(&u, phi), F::d(&u, psi)),
        ),
        Axiom::Four => F::implies(F::d(&u, phi.clone()), F::d(&u, F::d(&u, phi))),
        Axiom::B => F::implies(phi.clone(), F::d(&u, F::not(F::d(&u, F::not(phi))))),
        Axiom::Mono => {
            let (small, big) = gen.nested_sets(rng);
            F::implies(F::d(&small, phi.clone()), F::d(&big, phi))
        }
        Axiom::Union => {
            let v = gen.agent_set(rng);
            let mut both: Vec<String> = gen
                .agents()
                .iter()
                .filter(|a| u.contains(a) || v.contains(a))
                .cloned()
                .collect();
            both.dedup();
            F::implies(F::and(F::alive_set(&u), F::alive_set(&v)), F::alive_set(&both))
        }
        Axiom::NE => F::any(gen.agents().iter().map(|a| F::alive(a))),
        Axiom::P => {
            let dead_rest = F::dead_set(&gen.complement(&u));
            F::implies(
                F::all([F::alive_set(&u), dead_rest.clone(), phi.clone()]),
                F::d(&u, F::implies(dead_rest, phi)),
            )
        }
        Axiom::Max => F::implies(
            F::alive_set(&u),
            F::not(F::d(&u, F::not(F::dead_set(&gen.complement(&u))))),
        ),
        Axiom::GFP => {
            let all = gen.agents().to_vec();
            let step = F::all(all.iter().map(|a| F::k(a, phi.clone())));
            F::implies(
                F::c(&all, F::implies(phi.clone(), step)),
                F::implies(phi.clone(), F::c(&all, phi)),
            )
        }
        Axiom::KG => {
            let p = gen.positive(rng);
            F::implies(p.clone(), F::next(p))
        }
        Axiom::KGBox => {
            let p = gen.positive(rng);
            F::implies(p.clone(), F::always(p))
        }
        Axiom::KGDiamond => {
            let p = gen.positive(rng);
            F::implies(p.clone(), F::eventually(p))
        }
        Axiom::AX => F::implies(F::always(phi.clone()), F::next(F::always(phi))),
        Axiom::XX => F::implies(F::always(phi.clone()), phi),
        Axiom::AI => F::implies(
            F::always(F::implies(phi.clone(), psi.clone())),
            F::implies(F::always(phi), F::always(psi)),
        ),
        Axiom::E => {
            return Instance::Equivalent(F::eventually(phi.clone()), F::not(F::always(F::not(phi))));
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub formula: String,
    pub round: usize,
    pub world: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub name: &'static str,
    /// Sampled instantiations of the schema.
    pub instances: usize,
    /// (instance, world) evaluations.
    pub checks: usize,
    pub true_count: usize,
    pub unknown_count: usize,
    pub false_count: usize,
    /// Instances whose formula nests a temporal operator under an epistemic one.
    pub mixed: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl AxiomOutcome {
    fn new(axiom: Axiom) -> Self {
        AxiomOutcome {
            axiom,
            name: axiom.name(),
            instances: 0,
            checks: 0,
            true_count: 0,
            unknown_count: 0,
            false_count: 0,
            mixed: 0,
            counterexamples: Vec::new(),
        }
    }

    fn record(&mut self, v: Verdict, formula: &Formula, round: usize, world: usize) {
        self.checks += 1;
        match v {
            Verdict::True => self.true_count += 1,
            Verdict::Unknown { .. } => self.unknown_count += 1,
            Verdict::False => {
                self.false_count += 1;
                if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                    self.counterexamples.push(Counterexample {
                        formula: formula.to_string(),
                        round,
                        world,
                    });
                }
            }
        }
    }

    pub fn is_sound(&self) -> bool {
        self.false_count == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub samples: usize,
    pub horizon: usize,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn is_sound(&self) -> bool {
        self.outcomes.iter().all(AxiomOutcome::is_sound)
    }

    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome {
        self.outcomes
            .iter()
            .find(|o| o.axiom == axiom)
            .expect("every axiom is reported")
    }
}

/// Runs `samples` random instantiations of every axiom on `t`.
///
/// KG instances are placed below the horizon (at the horizon `X` is always
/// unknown). For E the two sides are compared wherever both are decided;
/// instances where either side is unknown count as unknown.
pub fn axiom_suite(t: &FreeAlgebraTrunc, samples: usize, seed: u64) -> Result<AxiomReport> {
    let gen = FormulaGen::new(t);
    let eval = Evaluator::new(t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::new();
    for axiom in Axiom::ALL {
        let mut out = AxiomOutcome::new(axiom);
        for _ in 0..samples {
            let top = if axiom == Axiom::KG && t.horizon() > 0 {
                t.horizon() - 1
            } else {
                t.horizon()
            };
            let round = rng.gen_range(0..=top);
            let worlds: Vec<usize> = t.round(round).worlds().collect();
            out.instances += 1;
            match instantiate(axiom, &gen, &mut rng) {
                Instance::Valid(f) => {
                    out.mixed += f.is_mixed() as usize;
                    let vs = eval.eval_round(round, &f)?;
                    for &w in &worlds {
                        out.record(vs[w], &f, round, w);
                    }
                }
                Instance::Equivalent(l, r) => {
                    out.mixed += (l.is_mixed() || r.is_mixed()) as usize;
                    let lv = eval.eval_round(round, &l)?;
                    let rv = eval.eval_round(round, &r)?;
                    let iff = Formula::iff(l, r);
                    for &w in &worlds {
                        let v = if lv[w].is_decided() && rv[w].is_decided() {
                            Verdict::from_bool(lv[w] == rv[w])
                        } else {
                            Verdict::Unknown { horizon: t.horizon() }
                        };
                        out.record(v, &iff, round, w);
                    }
                }
            }
        }
        outcomes.push(out);
    }
    Ok(AxiomReport {
        seed,
        samples,
        horizon: t.horizon(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::DynamicNetworkModel;
    use crate::cset::{AgentMask, AgentSet, Cset, SimplicialModel};
    use crate::protocol::ProtocolFunctor;

    fn trunc() -> FreeAlgebraTrunc {
        let agents = AgentSet::alphabetic(2);
        let g = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let m = SimplicialModel::labeled_by(g, |x, v| {
            let p = if x.color(v) == AgentMask::singleton(0) {
                "p"
            } else {
                "q"
            };
            [p.to_string()].into_iter().collect()
        });
        let f = ProtocolFunctor::new(DynamicNetworkModel::immediate_snapshot(agents)).unwrap();
        FreeAlgebraTrunc::build(&f, m, 2, None).unwrap()
    }

    #[test]
    fn generated_formulas_resolve() {
        let t = trunc();
        let gen = FormulaGen::new(&t);
        let eval = Evaluator::new(&t);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            eval.resolve(&gen.formula(&mut rng)).unwrap();
            let p = gen.positive(&mut rng);
            assert!(p.is_positive(), "{}", p);
        }
    }

    #[test]
    fn small_suite_is_sound_and_reproducible() {
        let t = trunc();
        let a = axiom_suite(&t, 40, 7).unwrap();
        assert!(
            a.is_sound(),
            "{:?}",
            a.outcomes.iter().flat_map(|o| &o.counterexamples).collect::<Vec<_>>()
        );
        let b = axiom_suite(&t, 40, 7).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.outcome(Axiom::NE).true_count, a.outcome(Axiom::NE).checks);
        // Box never becomes true inside the horizon
        assert_eq!(a.outcome(Axiom::XX).false_count, 0);
    }
}
