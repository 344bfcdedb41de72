use std::fmt;

/// Temporal-epistemic formulas. Agents are referred to by name and resolved
/// against the model at evaluation time.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// `name@agent`: the atom sits on the agent's vertex.
    Atom {
        agent: String,
        name: String,
    },
    /// A bare `name`: some vertex of the world carries it.
    AtomAny(String),
    /// `#name(a,b)`: a decision-value predicate; no agents means every agent
    /// of the world.
    Pred {
        name: String,
        agents: Vec<String>,
    },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    K(String, Box<Formula>),
    Khat(String, Box<Formula>),
    C(Vec<String>, Box<Formula>),
    D(Vec<String>, Box<Formula>),
    Dhat(Vec<String>, Box<Formula>),
    Next(Box<Formula>),
    Always(Box<Formula>),
    Eventually(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn atom(agent: &str, name: &str) -> Formula {
        Atom {
            agent: agent.to_string(),
            name: name.to_string(),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn k(agent: &str, f: Formula) -> Formula {
        K(agent.to_string(), Box::new(f))
    }

    pub fn khat(agent: &str, f: Formula) -> Formula {
        Khat(agent.to_string(), Box::new(f))
    }

    pub fn c<S: AsRef<str>>(agents: &[S], f: Formula) -> Formula {
        C(names(agents), Box::new(f))
    }

    pub fn d<S: AsRef<str>>(agents: &[S], f: Formula) -> Formula {
        D(names(agents), Box::new(f))
    }

    pub fn dhat<S: AsRef<str>>(agents: &[S], f: Formula) -> Formula {
        Dhat(names(agents), Box::new(f))
    }

    pub fn next(f: Formula) -> Formula {
        Next(Box::new(f))
    }

    pub fn always(f: Formula) -> Formula {
        Always(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Formula {
        Eventually(Box::new(f))
    }

    /// Conjunction of all parts; `true` when empty.
    pub fn all(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(True)
    }

    /// Disjunction of all parts; `false` when empty.
    pub fn any(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::or).unwrap_or(False)
    }

    /// `dead(a) = K_a false`.
    pub fn dead(agent: &str) -> Formula {
        Formula::k(agent, False)
    }

    /// `alive(a) = Khat_a true`.
    pub fn alive(agent: &str) -> Formula {
        Formula::khat(agent, True)
    }

    /// `dead(U) = ⋀_{a∈U} dead(a)`.
    pub fn dead_set<S: AsRef<str>>(agents: &[S]) -> Formula {
        Formula::all(agents.iter().map(|a| Formula::dead(a.as_ref())))
    }

    /// `alive(U) = Dhat_U true`; a single agent gives `alive(a)`.
    pub fn alive_set<S: AsRef<str>>(agents: &[S]) -> Formula {
        match agents {
            [a] => Formula::alive(a.as_ref()),
            _ => Formula::dhat(agents, True),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            True | False | Atom { .. } | AtomAny(_) | Pred { .. } => vec![],
            Not(f) | K(_, f) | Khat(_, f) | C(_, f) | D(_, f) | Dhat(_, f) | Next(f) | Always(f) | Eventually(f) => {
                vec![f]
            }
            And(a, b) | Or(a, b) | Implies(a, b) => vec![a, b],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    pub fn is_temporal(&self) -> bool {
        matches!(self, Next(_) | Always(_) | Eventually(_))
    }

    pub fn is_epistemic(&self) -> bool {
        matches!(self, K(..) | Khat(..) | C(..) | D(..) | Dhat(..))
    }

    pub fn contains_temporal(&self) -> bool {
        self.is_temporal() || self.children().into_iter().any(Formula::contains_temporal)
    }

    /// Whether some temporal operator occurs under an epistemic one.
    pub fn is_mixed(&self) -> bool {
        if self.is_epistemic() && self.children().into_iter().any(Formula::contains_temporal) {
            return true;
        }
        self.children().into_iter().any(Formula::is_mixed)
    }

    /// Positive epistemic formulas: negation only on atoms; atoms, `∧`, `∨`,
    /// `K`, `C`, `D` and constants; no value predicates or temporal operators.
    pub fn is_positive(&self) -> bool {
        match self {
            True | False | Atom { .. } | AtomAny(_) => true,
            Not(f) => matches!(**f, Atom { .. } | AtomAny(_)),
            And(a, b) | Or(a, b) => a.is_positive() && b.is_positive(),
            K(_, f) | C(_, f) | D(_, f) => f.is_positive(),
            _ => false,
        }
    }

    /// Every agent name mentioned.
    pub fn agents(&self) -> Vec<&str> {
        let mut out: Vec<&str> = match self {
            Atom { agent, .. } | K(agent, _) | Khat(agent, _) => vec![agent.as_str()],
            Pred { agents, .. } | C(agents, _) | D(agents, _) | Dhat(agents, _) => {
                agents.iter().map(String::as_str).collect()
            }
            _ => vec![],
        };
        for c in self.children() {
            out.extend(c.agents());
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn names<S: AsRef<str>>(agents: &[S]) -> Vec<String> {
    agents.iter().map(|a| a.as_ref().to_string()).collect()
}

/// Fully parenthesized concrete syntax accepted by [`super::parse`].
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom { agent, name } => write!(f, "{}@{}", name, agent),
            AtomAny(name) => write!(f, "{}", name),
            Pred { name, agents } => write!(f, "#{}({})", name, agents.join(",")),
            Not(a) => write!(f, "!({})", a),
            And(a, b) => write!(f, "({} & {})", a, b),
            Or(a, b) => write!(f, "({} | {})", a, b),
            Implies(a, b) => write!(f, "({} -> {})", a, b),
            K(ag, a) => write!(f, "K[{}] ({})", ag, a),
            Khat(ag, a) => write!(f, "Khat[{}] ({})", ag, a),
            C(ags, a) => write!(f, "C[{}] ({})", ags.join(","), a),
            D(ags, a) => write!(f, "D[{}] ({})", ags.join(","), a),
            Dhat(ags, a) => write!(f, "Dhat[{}] ({})", ags.join(","), a),
            Next(a) => write!(f, "X ({})", a),
            Always(a) => write!(f, "[] ({})", a),
            Eventually(a) => write!(f, "<> ({})", a),
        }
    }
}
