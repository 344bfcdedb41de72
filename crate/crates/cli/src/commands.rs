use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use protocx::adversary::{AdversaryKind, AdversarySpec};
use protocx::cset::{AgentSet, Cset, CsetMorphism, SimplicialModel};
use protocx::decisions::{averaging_protocol, parse_value, ConcreteProtocol, VCset};
use protocx::io::{CsetDoc, TaskDoc};
use protocx::iterate::FreeAlgebraTrunc;
use protocx::logic::{axiom_suite, parse, Evaluator, Formula};
use protocx::protocol::ProtocolFunctor;
use protocx::tasks::{binary_consensus, solvable, verify_decision, Task};
use protocx::{dot, homology, inputs};
use serde_json::{json, Value};
use thiserror::Error;

use crate::{Cli, Command, Format, ModelArgs, Protocol};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] protocx::Error),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 1 i/o, 2 malformed input, 3 budget, 4 verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Core(protocx::Error::BudgetExceeded { .. }) => 3,
            CliError::Core(protocx::Error::NotAMorphism(_)) | CliError::Verification(_) => 4,
            CliError::Core(_) | CliError::Usage(_) => 2,
        }
    }
}

/// Exit status of a search that exhausted without a decision map.
const UNSOLVABLE: u8 = 5;

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Input model plus the decision values it carries, if any.
struct Input {
    model: SimplicialModel,
    values: Option<VCset>,
}

fn load_input(spec: &str) -> Result<Input> {
    if !Path::new(spec).exists() && spec.contains(':') {
        return Ok(Input {
            model: inputs::builtin(spec)?,
            values: None,
        });
    }
    let doc = CsetDoc::from_json(&read(spec)?)?;
    let model = doc.to_model()?.value;
    let values = if doc.values.is_empty() {
        None
    } else {
        Some(doc.to_vcset()?.value)
    };
    Ok(Input { model, values })
}

fn functor(args: &ModelArgs, agents: &AgentSet) -> Result<ProtocolFunctor> {
    let mut spec = match args.adversary.as_str() {
        "immediate_snapshot" | "is" => AdversarySpec::builtin(AdversaryKind::ImmediateSnapshot),
        "reliable_broadcast" | "rb" => AdversarySpec::builtin(AdversaryKind::ReliableBroadcast),
        "sync_broadcast" | "sync" => AdversarySpec::builtin(AdversaryKind::SyncBroadcast),
        path => serde_json::from_str(&read(path)?).map_err(protocx::Error::from)?,
    };
    if args.detectable {
        spec.params.detectable = true;
    }
    if args.k.is_some() {
        spec.params.k = args.k;
    }
    Ok(ProtocolFunctor::new(spec.to_model(agents)?)?)
}

/// Initial values: from the input file, `--values`, or `in0`/`in1` labels.
fn initial_values(args: &ModelArgs, input: &Input) -> Result<VCset> {
    if let Some(v) = &input.values {
        return Ok(v.clone());
    }
    let m = &input.model;
    let x = m.cset.clone();
    if let Some(text) = &args.values {
        let mut per_agent = BTreeMap::new();
        for part in text.split(',').filter(|p| !p.trim().is_empty()) {
            let (name, v) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("expected agent=value, got `{}`", part)))?;
            per_agent.insert(x.agents().index_of(name.trim())?, parse_value(v.trim())?);
        }
        return Ok(VCset::from_vertex_values(x.clone(), |v| {
            x.color(v).iter().next().and_then(|a| per_agent.get(&a).cloned())
        }));
    }
    let from_labels = |v| {
        let l = m.label(v)?;
        ["in0", "in1"]
            .iter()
            .position(|b| l.contains(*b))
            .map(|bit| parse_value(&bit.to_string()).expect("digit"))
    };
    if x.vertices().into_iter().all(|v| from_labels(v).is_some()) {
        return Ok(VCset::from_vertex_values(x.clone(), from_labels));
    }
    Err(CliError::Usage(
        "the averaging protocol needs initial values (input `values`, --values, or in0/in1 labels)".into(),
    ))
}

struct Rounds {
    trunc: FreeAlgebraTrunc,
    values: Option<Vec<VCset>>,
}

fn materialize(args: &ModelArgs, rounds: usize) -> Result<Rounds> {
    let input = load_input(&args.input)?;
    let f = functor(args, input.model.cset.agents())?;
    let values = match args.protocol {
        Protocol::None => None,
        Protocol::Averaging => Some(initial_values(args, &input)?),
    };
    let trunc = FreeAlgebraTrunc::build(&f, input.model, rounds, Some(args.budget))?;
    let values = match values {
        None => None,
        Some(v) => {
            let cp: ConcreteProtocol = averaging_protocol(trunc.round(0).agents().clone(), parse_value(&args.alpha)?)?;
            Some(cp.iterate(&v, rounds)?)
        }
    };
    Ok(Rounds { trunc, values })
}

fn round_doc(r: &Rounds, n: usize) -> CsetDoc {
    let mut doc = CsetDoc::from_model(r.trunc.model(n));
    if let Some(v) = &r.values {
        doc.values = CsetDoc::from_vcset(&v[n]).values;
    }
    doc
}

fn doc_value(doc: &CsetDoc) -> Value {
    serde_json::to_value(doc).expect("documents serialize")
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Build { model, format } => {
            let r = materialize(model, 1)?;
            let text = match format {
                Format::Dot => dot::to_dot(r.trunc.round(1), "round 1"),
                Format::Json => pretty(&json!({
                    "input": doc_value(&round_doc(&r, 0)),
                    "complex": doc_value(&round_doc(&r, 1)),
                    "projection": r.trunc.next_projection(0).as_slice(),
                })),
            };
            emit(cli, &text)?;
        }
        Command::Iterate { model, rounds, format } => {
            let r = materialize(model, *rounds)?;
            let text = match format {
                Format::Dot => dot::to_dot(r.trunc.round(*rounds), &format!("round {}", rounds)),
                Format::Json => {
                    let docs: Vec<Value> = (0..=*rounds).map(|n| doc_value(&round_doc(&r, n))).collect();
                    pretty(&json!({
                        "rounds": docs,
                        "projections": r.trunc.projection_table(),
                    }))
                }
            };
            emit(cli, &text)?;
        }
        Command::Check {
            model,
            formula,
            round,
            world,
            horizon,
            axioms,
            samples,
            seed,
        } => {
            if round > horizon {
                return Err(CliError::Usage(format!(
                    "round {} is beyond the horizon {}",
                    round, horizon
                )));
            }
            let r = materialize(model, *horizon)?;
            if *axioms {
                let report = axiom_suite(&r.trunc, *samples, *seed)?;
                emit(cli, &pretty(&serde_json::to_value(&report).expect("reports serialize")))?;
                if !report.is_sound() {
                    return Err(CliError::Verification("an axiom instance evaluated to false".into()));
                }
                return Ok(ExitCode::SUCCESS);
            }
            let text = formula.as_deref().expect("clap requires a formula");
            let phi: Formula = parse(text).map_err(protocx::Error::from)?;
            let mut eval = Evaluator::new(&r.trunc);
            if let Some(v) = &r.values {
                eval = eval.with_values(v)?;
            }
            eval.resolve(&phi)?;
            let x = r.trunc.round(*round);
            let worlds: Vec<usize> = match world {
                Some(w) => {
                    r.trunc.check_world(*round, *w)?;
                    vec![*w]
                }
                None => x.worlds().collect(),
            };
            let verdicts = eval.eval_round(*round, &phi)?;
            let mut results = Vec::new();
            for w in worlds {
                results.push(json!({
                    "world": w,
                    "payload": x.payload(w),
                    "verdict": verdicts[w].to_string(),
                    "trace": eval.trace(*round, w, &phi)?,
                }));
            }
            emit(
                cli,
                &pretty(&json!({
                    "formula": phi.to_string(),
                    "round": round,
                    "horizon": horizon,
                    "mixed": phi.is_mixed(),
                    "results": results,
                })),
            )?;
        }
        Command::Solve { model, task, rounds } => {
            let task = load_task(model, task)?;
            let f = functor(model, task.inputs().agents())?;
            let input = SimplicialModel::unlabeled(task.inputs().clone());
            let t = FreeAlgebraTrunc::build(&f, input, *rounds, Some(model.budget))?;
            let p: &Cset = t.round(*rounds);
            let projection = CsetMorphism::new((0..p.len()).map(|y| t.to_input(*rounds, y)).collect());
            let search = solvable(p, &projection, &task)?;
            let decision = match &search.delta {
                Some(delta) => {
                    verify_decision(p, &projection, &task, delta).map_err(|e| CliError::Verification(e.to_string()))?;
                    let rows: Vec<Value> = (0..p.len())
                        .map(|y| {
                            let (i, o) = task.pair(delta.apply(y));
                            json!([y, i, o])
                        })
                        .collect();
                    Value::Array(rows)
                }
                None => Value::Null,
            };
            emit(
                cli,
                &pretty(&json!({
                    "rounds": rounds,
                    "solvable": search.delta.is_some(),
                    "protocol_simplices": p.len(),
                    "nodes": search.nodes,
                    "backtracks": search.backtracks,
                    "decision": decision,
                })),
            )?;
            if search.delta.is_none() {
                return Ok(ExitCode::from(UNSOLVABLE));
            }
        }
        Command::Betti { model, rounds } => {
            let r = materialize(model, *rounds)?;
            let x = r.trunc.round(*rounds);
            emit(
                cli,
                &pretty(&json!({
                    "round": rounds,
                    "betti": homology::betti(x),
                    "boundary_squared_zero": homology::boundary_squared_is_zero(x),
                })),
            )?;
        }
        Command::Stats { model, rounds } => {
            let r = materialize(model, *rounds)?;
            let stats: Vec<Value> = (0..=*rounds)
                .map(|n| {
                    let x = r.trunc.round(n);
                    let levels: BTreeMap<String, usize> = x
                        .level_counts()
                        .into_iter()
                        .map(|(u, c)| (x.agents().join(u), c))
                        .collect();
                    json!({
                        "round": n,
                        "simplices": x.len(),
                        "worlds": x.worlds().count(),
                        "vertices": x.vertices().len(),
                        "facets": x.facets().len(),
                        "levels": levels,
                    })
                })
                .collect();
            emit(cli, &pretty(&json!({ "rounds": stats })))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_task(model: &ModelArgs, spec: &str) -> Result<Task> {
    if let Some(n) = spec.strip_prefix("consensus:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Usage(format!("bad agent count in `{}`", spec)))?;
        return Ok(binary_consensus(n)?);
    }
    if spec == "identity" {
        return Ok(Task::identity(load_input(&model.input)?.model.cset)?);
    }
    Ok(TaskDoc::from_json(&read(spec)?)?.to_task()?)
}
