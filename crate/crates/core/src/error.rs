use thiserror::Error;

use crate::logic::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("duplicate agent `{0}`")]
    DuplicateAgent(String),
    #[error("invalid agent name `{0}`")]
    InvalidAgentName(String),
    #[error("at most {max} agents are supported, got {got}")]
    TooManyAgents { max: usize, got: usize },
    #[error("agent sets differ")]
    AgentSetMismatch,
    #[error("malformed cset: {0}")]
    MalformedCset(String),
    #[error("morphism is not natural: {0}")]
    NotAMorphism(String),
    #[error("colimit face map ill-defined at class {class} for face {face}")]
    IllDefinedFace { class: usize, face: String },
    #[error("{0} is not a subset of {1}")]
    NotSubset(String, String),
    #[error("round {round} has {size} simplices, over the budget of {budget}")]
    BudgetExceeded { round: usize, size: usize, budget: usize },
    #[error("world {world} does not exist at round {round}")]
    WorldOutOfRange { round: usize, world: usize },
    #[error("round {round} is the horizon; no successors are materialized")]
    HorizonExhausted { round: usize },
    #[error("unknown atom `{name}@{agent}`")]
    UnknownAtom { agent: String, name: String },
    #[error("unknown value predicate `#{0}`")]
    UnknownPredicate(String),
    #[error("model carries no decision values")]
    NoValues,
    #[error("agent `{agent}` is not part of world {world}")]
    AgentNotInWorld { agent: String, world: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("alpha must satisfy 0 < alpha < 1, got {0}")]
    AlphaOutOfRange(String),
    #[error("decision map undefined: {0}")]
    UndefinedDecision(String),
    #[error("value table inconsistent with faces: {0}")]
    IncompatibleValues(String),
    #[error("csets are not isomorphic: {0}")]
    NotIsomorphic(String),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("invalid adversary: {0}")]
    InvalidAdversary(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
