//! Csets decorated with decision values, concrete protocols driven by local
//! decision maps, and value predicates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::adversary::DynamicNetworkModel;
use crate::cset::{AgentMask, AgentSet, Cset, SimplexId};
use crate::error::{Error, Result};
use crate::protocol::{ProtocolComplex, ProtocolFunctor};

/// Exact decision values.
pub type Value = BigRational;

/// Parses `p/q` or an integer.
pub fn parse_value(text: &str) -> Result<Value> {
    text.trim()
        .parse::<BigRational>()
        .map_err(|e| Error::InvalidTask(format!("bad value `{}`: {}", text, e)))
}

/// `p/q`, or `p` for integers.
pub fn format_value(v: &Value) -> String {
    v.to_string()
}

/// A cset where every simplex maps each agent of its color to a value, or
/// leaves it undefined. Faces see the restriction of their cofaces' maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VCset {
    cset: Cset,
    values: Vec<BTreeMap<usize, Value>>,
}

impl VCset {
    pub fn new(cset: Cset, values: Vec<BTreeMap<usize, Value>>) -> Result<Self> {
        if values.len() != cset.len() {
            return Err(Error::IncompatibleValues(format!(
                "{} value maps for {} simplices",
                values.len(),
                cset.len()
            )));
        }
        for (id, m) in values.iter().enumerate() {
            let color = cset.color(id);
            if let Some(&a) = m.keys().find(|&&a| !color.contains(a)) {
                return Err(Error::IncompatibleValues(format!(
                    "simplex {} has a value for agent {} outside its color",
                    id, a
                )));
            }
            for &(u, f) in cset.simplex(id).faces() {
                let restricted: BTreeMap<usize, Value> = m
                    .iter()
                    .filter(|(a, _)| u.contains(**a))
                    .map(|(&a, v)| (a, v.clone()))
                    .collect();
                if restricted != values[f] {
                    return Err(Error::IncompatibleValues(format!(
                        "simplex {} disagrees with its face {}",
                        id,
                        cset.agents().braced(u)
                    )));
                }
            }
        }
        Ok(VCset { cset, values })
    }

    /// Every agent undefined everywhere.
    pub fn unvalued(cset: Cset) -> Self {
        let values = vec![BTreeMap::new(); cset.len()];
        VCset { cset, values }
    }

    /// Values given on vertices and spread to every simplex containing them.
    pub fn from_vertex_values(cset: Cset, value: impl Fn(SimplexId) -> Option<Value>) -> Self {
        let vertex_value: BTreeMap<SimplexId, Value> = cset
            .vertices()
            .into_iter()
            .filter_map(|v| value(v).map(|x| (v, x)))
            .collect();
        let values = (0..cset.len())
            .map(|id| {
                cset.color(id)
                    .iter()
                    .filter_map(|a| {
                        let v = cset.vertex(id, a).expect("own vertex");
                        vertex_value.get(&v).map(|x| (a, x.clone()))
                    })
                    .collect()
            })
            .collect();
        VCset { cset, values }
    }

    pub fn cset(&self) -> &Cset {
        &self.cset
    }

    pub fn value(&self, id: SimplexId, agent: usize) -> Option<&Value> {
        self.values[id].get(&agent)
    }

    pub fn profile(&self, id: SimplexId) -> &BTreeMap<usize, Value> {
        &self.values[id]
    }

    /// The underlying cset.
    pub fn forget_values(&self) -> Cset {
        self.cset.clone()
    }

    pub fn into_cset(self) -> Cset {
        self.cset
    }
}

/// `f_a(heard-from set, values read)`; `None` means undefined.
pub type DecisionMap = Arc<dyn Fn(usize, AgentMask, &BTreeMap<usize, Value>) -> Option<Value> + Send + Sync>;

/// A protocol functor together with local decision maps.
#[derive(Clone)]
pub struct ConcreteProtocol {
    functor: ProtocolFunctor,
    decide: DecisionMap,
}

impl fmt::Debug for ConcreteProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConcreteProtocol")
            .field("agents", self.functor.agents())
            .finish_non_exhaustive()
    }
}

impl ConcreteProtocol {
    pub fn new(functor: ProtocolFunctor, decide: DecisionMap) -> Self {
        ConcreteProtocol { functor, decide }
    }

    /// Every agent decides `c` whatever it hears.
    pub fn constant(functor: ProtocolFunctor, c: Value) -> Self {
        ConcreteProtocol::new(functor, Arc::new(move |_, _, _| Some(c.clone())))
    }

    pub fn functor(&self) -> &ProtocolFunctor {
        &self.functor
    }

    /// One round: the underlying cset is `F_!(X)`, and every output vertex
    /// `(a, V)` over input simplex `x` decides `f_a(V, values of x on V)`.
    pub fn concrete_extend(&self, x: &VCset) -> Result<(VCset, ProtocolComplex)> {
        let p = self.functor.extend(&x.cset)?;
        let agents = x.cset.agents();
        let mut decided: BTreeMap<SimplexId, Value> = BTreeMap::new();
        for v in p.complex.vertices() {
            let (base, s) = p.representative(v);
            let &[(a, view)] = self.functor.assignment(x.cset.color(base), s).as_slice() else {
                unreachable!("vertices carry a single view");
            };
            let read = x.cset.face(base, view).expect("views stay inside the color");
            let value = (self.decide)(a, view, x.profile(read)).ok_or_else(|| {
                Error::UndefinedDecision(format!("agent {} with view {}", agents.name(a), agents.braced(view)))
            })?;
            decided.insert(v, value);
        }
        let out = VCset::from_vertex_values(p.complex.clone(), |v| decided.get(&v).cloned());
        Ok((out, p))
    }

    /// Rounds `0..=rounds` of values.
    pub fn iterate(&self, input: &VCset, rounds: usize) -> Result<Vec<VCset>> {
        let mut out = vec![input.clone()];
        for _ in 0..rounds {
            let (next, _) = self.concrete_extend(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }
}

/// `f_a(V, X) = X(a) + α Σ_{b∈V} (X(b) − X(a))` over immediate snapshot.
pub fn averaging_protocol(agents: AgentSet, alpha: Value) -> Result<ConcreteProtocol> {
    if alpha <= Value::zero() || alpha >= Value::one() {
        return Err(Error::AlphaOutOfRange(format_value(&alpha)));
    }
    let functor = ProtocolFunctor::new(DynamicNetworkModel::immediate_snapshot(agents))?;
    Ok(ConcreteProtocol::new(
        functor,
        Arc::new(move |a, view, read| {
            let own = read.get(&a)?;
            let mut sum = Value::zero();
            for b in view.iter() {
                sum += read.get(&b)? - own;
            }
            Some(own + &alpha * sum)
        }),
    ))
}

/// Round counters as decision values: the functor of round `r` is
/// `functors[min(r, len-1)]`, and every agent's counter becomes `r + 1`.
#[derive(Clone, Debug)]
pub struct RoundCounterProtocol {
    functors: Vec<ProtocolFunctor>,
}

impl RoundCounterProtocol {
    pub fn new(functors: Vec<ProtocolFunctor>) -> Result<Self> {
        let Some(first) = functors.first() else {
            return Err(Error::InvalidAdversary("no functor for round 0".into()));
        };
        if functors.iter().any(|f| f.agents() != first.agents()) {
            return Err(Error::AgentSetMismatch);
        }
        Ok(RoundCounterProtocol { functors })
    }

    /// Reads the common round counter of `x`; undefined counters count as 0.
    fn round_of(x: &VCset) -> Result<usize> {
        let mut round: Option<&Value> = None;
        for id in x.cset.vertices() {
            for v in x.values[id].values() {
                match round {
                    Some(r) if r != v => return Err(Error::IncompatibleValues("round counters differ".into())),
                    _ => round = Some(v),
                }
            }
        }
        match round {
            None => Ok(0),
            Some(r) if r.is_integer() && r >= &Value::zero() => {
                usize::try_from(r.to_integer()).map_err(|_| Error::IncompatibleValues("round counter too large".into()))
            }
            Some(r) => Err(Error::IncompatibleValues(format!("bad round counter {}", r))),
        }
    }

    pub fn step(&self, x: &VCset) -> Result<(VCset, ProtocolComplex)> {
        let r = RoundCounterProtocol::round_of(x)?;
        let functor = &self.functors[r.min(self.functors.len() - 1)];
        let next = Value::from_integer((r + 1).into());
        ConcreteProtocol::constant(functor.clone(), next).concrete_extend(x)
    }
}

/// A predicate over the values of the listed agents (`None` = undefined).
pub type Predicate = Arc<dyn Fn(&[Option<&Value>]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct PredicateRegistry {
    preds: BTreeMap<String, Predicate>,
}

impl fmt::Debug for PredicateRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.preds.keys()).finish()
    }
}

impl Default for PredicateRegistry {
    fn default() -> Self {
        PredicateRegistry::with_builtins()
    }
}

impl PredicateRegistry {
    pub fn empty() -> Self {
        PredicateRegistry { preds: BTreeMap::new() }
    }

    /// `agree`: all defined and equal. `defined`: all defined.
    pub fn with_builtins() -> Self {
        let mut r = PredicateRegistry::empty();
        r.register("agree", |vs| {
            vs.iter().all(Option::is_some) && vs.windows(2).all(|w| w[0] == w[1])
        });
        r.register("defined", |vs| vs.iter().all(Option::is_some));
        r
    }

    pub fn register(&mut self, name: &str, p: impl Fn(&[Option<&Value>]) -> bool + Send + Sync + 'static) {
        self.preds.insert(name.to_string(), Arc::new(p));
    }

    pub fn get(&self, name: &str) -> Result<&Predicate> {
        self.preds
            .get(name)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.preds.keys().map(String::as_str)
    }
}

/// Applies predicate `name` to the values of `agents` (every agent of the
/// world when empty) at a simplex.
pub fn eval_value_pred(
    x: &VCset,
    world: SimplexId,
    preds: &PredicateRegistry,
    name: &str,
    agents: &[usize],
) -> Result<bool> {
    let p = preds.get(name)?;
    let color = x.cset.color(world);
    let agents: Vec<usize> = if agents.is_empty() {
        color.iter().collect()
    } else {
        agents.to_vec()
    };
    if let Some(&a) = agents.iter().find(|&&a| !color.contains(a)) {
        return Err(Error::AgentNotInWorld {
            agent: x.cset.agents().name(a).to_string(),
            world,
        });
    }
    let args: Vec<Option<&Value>> = agents.iter().map(|&a| x.value(world, a)).collect();
    Ok(p(&args))
}
