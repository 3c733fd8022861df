//! JSON formats. Every document carries `"format": 1`.
//!
//! Expressions are written either as strings in the `&`, `|`, `!` syntax
//! (`"hot & rain"`) or as objects: `{"op": "and", "args": [..]}`,
//! `{"op": "or", "args": [..]}`, `{"op": "not", "arg": ..}`,
//! `{"op": "atom", "name": ..}`, `{"op": "top"}`, `{"op": "bot"}`.

use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::arggraph::{ArgExpr, ArgGraph, Labelling};
use crate::bridge::MlpModel;
use crate::error::{Error, Result};
use crate::fuzzy::{Activation, FuzzyLogic};
use crate::kb::{AxiomKind, ConceptExpr, FiniteInterpretation, FuzzyAxiom, Theta, WeightedKB};
use crate::prefmodel::{parse_arg_expr, LabellingSet, Provenance};
use crate::scalar::Scalar;
use crate::solver::SolveResult;

pub const FORMAT: u32 = 1;

fn format_version() -> u32 {
    FORMAT
}

fn check_format(v: u32) -> Result<()> {
    if v == FORMAT {
        Ok(())
    } else {
        Err(Error::schema(format!(
            "unsupported format version {v}, expected {FORMAT}"
        )))
    }
}

fn parse<D: DeserializeOwned>(text: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::schema(e.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExprJson {
    Text(String),
    Node(NodeJson),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum NodeJson {
    Atom {
        name: String,
    },
    Not {
        arg: Box<ExprJson>,
    },
    And {
        args: Vec<ExprJson>,
    },
    Or {
        args: Vec<ExprJson>,
    },
    Top,
    #[serde(alias = "bottom")]
    Bot,
}

fn fold<E>(op: &str, args: Vec<E>, join: fn(E, E) -> E) -> Result<E> {
    let mut it = args.into_iter();
    let first = it
        .next()
        .ok_or_else(|| Error::schema(format!("`{op}` needs at least one argument")))?;
    Ok(it.fold(first, join))
}

fn arg_from_json(e: &ExprJson) -> Result<ArgExpr<String>> {
    match e {
        ExprJson::Text(s) => parse_arg_expr(s),
        ExprJson::Node(n) => match n {
            NodeJson::Atom { name } => Ok(ArgExpr::Arg(name.clone())),
            NodeJson::Not { arg } => Ok(ArgExpr::not(arg_from_json(arg)?)),
            NodeJson::And { args } => fold(
                "and",
                args.iter().map(arg_from_json).collect::<Result<_>>()?,
                ArgExpr::and,
            ),
            NodeJson::Or { args } => fold(
                "or",
                args.iter().map(arg_from_json).collect::<Result<_>>()?,
                ArgExpr::or,
            ),
            NodeJson::Top | NodeJson::Bot => Err(Error::schema("top and bottom are not arguments")),
        },
    }
}

fn arg_to_json(e: &ArgExpr<String>) -> ExprJson {
    match e {
        ArgExpr::Arg(a) => ExprJson::Text(a.clone()),
        ArgExpr::Not(x) => ExprJson::Node(NodeJson::Not {
            arg: Box::new(arg_to_json(x)),
        }),
        ArgExpr::And(x, y) => ExprJson::Node(NodeJson::And {
            args: vec![arg_to_json(x), arg_to_json(y)],
        }),
        ArgExpr::Or(x, y) => ExprJson::Node(NodeJson::Or {
            args: vec![arg_to_json(x), arg_to_json(y)],
        }),
    }
}

fn concept_from_json(e: &ExprJson) -> Result<ConceptExpr> {
    match e {
        ExprJson::Text(s) => Ok(crate::prefmodel::to_concept(&parse_arg_expr(s)?)),
        ExprJson::Node(n) => match n {
            NodeJson::Atom { name } => Ok(ConceptExpr::atom(name.clone())),
            NodeJson::Not { arg } => Ok(ConceptExpr::not(concept_from_json(arg)?)),
            NodeJson::And { args } => fold(
                "and",
                args.iter().map(concept_from_json).collect::<Result<_>>()?,
                ConceptExpr::and,
            ),
            NodeJson::Or { args } => fold(
                "or",
                args.iter().map(concept_from_json).collect::<Result<_>>()?,
                ConceptExpr::or,
            ),
            NodeJson::Top => Ok(ConceptExpr::Top),
            NodeJson::Bot => Ok(ConceptExpr::Bottom),
        },
    }
}

fn concept_to_json(e: &ConceptExpr) -> ExprJson {
    match e {
        ConceptExpr::Top => ExprJson::Node(NodeJson::Top),
        ConceptExpr::Bottom => ExprJson::Node(NodeJson::Bot),
        ConceptExpr::Atom(a) => ExprJson::Text(a.clone()),
        ConceptExpr::Not(x) => ExprJson::Node(NodeJson::Not {
            arg: Box::new(concept_to_json(x)),
        }),
        ConceptExpr::And(x, y) => ExprJson::Node(NodeJson::And {
            args: vec![concept_to_json(x), concept_to_json(y)],
        }),
        ConceptExpr::Or(x, y) => ExprJson::Node(NodeJson::Or {
            args: vec![concept_to_json(x), concept_to_json(y)],
        }),
    }
}

// ---- knowledge bases ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct InclusionJson<T> {
    lhs: ExprJson,
    #[serde(default, alias = "typical")]
    typ: bool,
    rhs: ExprJson,
    theta: Theta,
    n: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct AssertionJson<T> {
    concept: ExprJson,
    individual: String,
    theta: Theta,
    n: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct ConditionalJson<T> {
    body: ExprJson,
    #[serde(alias = "weight")]
    w: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct KbJson<T> {
    #[serde(default = "format_version")]
    format: u32,
    #[serde(default)]
    logic: FuzzyLogic,
    #[serde(default)]
    atoms: Vec<String>,
    #[serde(default)]
    individuals: Vec<String>,
    #[serde(default)]
    strict: Vec<InclusionJson<T>>,
    #[serde(default)]
    assertions: Vec<AssertionJson<T>>,
    #[serde(default)]
    conditionals: IndexMap<String, Vec<ConditionalJson<T>>>,
}

/// Parses and validates a weighted KB. Atoms mentioned anywhere must be
/// listed in `atoms`.
pub fn kb_from_json<T: Scalar>(text: &str) -> Result<WeightedKB<T>> {
    let f: KbJson<T> = parse(text)?;
    check_format(f.format)?;
    let mut kb = WeightedKB::new(f.logic);
    for a in f.atoms {
        kb.declare_atom(a);
    }
    for i in f.individuals {
        kb.declare_individual(i);
    }
    for ax in f.strict {
        let (lhs, rhs) = (concept_from_json(&ax.lhs)?, concept_from_json(&ax.rhs)?);
        kb.strict.push(if ax.typ {
            FuzzyAxiom::typicality(lhs, rhs, ax.theta, ax.n)?
        } else {
            FuzzyAxiom::inclusion(lhs, rhs, ax.theta, ax.n)?
        });
    }
    for ax in f.assertions {
        kb.declare_individual(ax.individual.clone());
        kb.assertions.push(FuzzyAxiom::assertion(
            concept_from_json(&ax.concept)?,
            ax.individual,
            ax.theta,
            ax.n,
        )?);
    }
    for (subject, incs) in f.conditionals {
        for c in incs {
            kb.add_conditional(subject.clone(), concept_from_json(&c.body)?, c.w);
        }
    }
    kb.validate()?;
    Ok(kb)
}

pub fn kb_to_json<T: Scalar>(kb: &WeightedKB<T>) -> serde_json::Value {
    let axiom = |ax: &FuzzyAxiom<T>| match &ax.kind {
        AxiomKind::Inclusion { lhs, typical, rhs } => Some(InclusionJson {
            lhs: concept_to_json(lhs),
            typ: *typical,
            rhs: concept_to_json(rhs),
            theta: ax.theta,
            n: ax.threshold.value(),
        }),
        AxiomKind::Assertion { .. } => None,
    };
    let assertion = |ax: &FuzzyAxiom<T>| match &ax.kind {
        AxiomKind::Assertion {
            concept,
            individual,
        } => Some(AssertionJson {
            concept: concept_to_json(concept),
            individual: individual.clone(),
            theta: ax.theta,
            n: ax.threshold.value(),
        }),
        AxiomKind::Inclusion { .. } => None,
    };
    let f = KbJson {
        format: FORMAT,
        logic: kb.logic,
        atoms: kb.atoms.clone(),
        individuals: kb.individuals.clone(),
        strict: kb.strict.iter().filter_map(axiom).collect(),
        assertions: kb.assertions.iter().filter_map(assertion).collect(),
        conditionals: kb
            .conditionals
            .iter()
            .map(|(s, incs)| {
                (
                    s.clone(),
                    incs.iter()
                        .map(|i| ConditionalJson {
                            body: concept_to_json(&i.body),
                            w: i.weight,
                        })
                        .collect(),
                )
            })
            .collect(),
    };
    serde_json::to_value(f).expect("KB serializes")
}

// ---- interpretations ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct InterpJson<T> {
    #[serde(default = "format_version")]
    format: u32,
    domain: Vec<String>,
    /// atom -> element -> degree; missing elements are 0.
    membership: IndexMap<String, IndexMap<String, T>>,
    /// individual -> element; defaults to each element naming itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    individuals: Option<IndexMap<String, String>>,
}

pub fn interpretation_from_json<T: Scalar>(text: &str) -> Result<FiniteInterpretation<T>> {
    let f: InterpJson<T> = parse(text)?;
    check_format(f.format)?;
    let mut interp = FiniteInterpretation::new(f.domain.clone())?;
    for (atom, row) in f.membership {
        let mut values = vec![T::zero(); f.domain.len()];
        for (el, v) in row {
            let x = interp.element(&el).ok_or_else(|| {
                Error::schema(format!(
                    "membership of `{atom}` names unknown element `{el}`"
                ))
            })?;
            if !(T::zero()..=T::one()).contains(&v) {
                return Err(Error::InvalidDegree(v.as_f64()));
            }
            values[x] = v;
        }
        interp.set_atom(atom, values)?;
    }
    match f.individuals {
        Some(map) => {
            for (ind, el) in map {
                interp.bind_individual(ind, &el)?;
            }
        }
        None => {
            for el in &f.domain {
                interp.bind_individual(el.clone(), el)?;
            }
        }
    }
    Ok(interp)
}

pub fn interpretation_to_json<T: Scalar>(interp: &FiniteInterpretation<T>) -> serde_json::Value {
    let domain = interp.domain().to_vec();
    let f = InterpJson {
        format: FORMAT,
        membership: interp
            .atoms()
            .map(|a| {
                let row = interp.row(a).expect("listed atom");
                (
                    a.to_string(),
                    domain.iter().cloned().zip(row.iter().copied()).collect(),
                )
            })
            .collect(),
        individuals: Some(
            interp
                .individuals()
                .map(|(i, x)| (i.to_string(), domain[x].clone()))
                .collect(),
        ),
        domain,
    };
    serde_json::to_value(f).expect("interpretation serializes")
}

// ---- graphs ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct EdgeJson<T> {
    source: ExprJson,
    target: String,
    w: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct GraphJson<T> {
    #[serde(default = "format_version")]
    format: u32,
    #[serde(default)]
    logic: FuzzyLogic,
    arguments: Vec<String>,
    /// Basic strengths; unlisted arguments get 0.
    #[serde(default)]
    sigma0: IndexMap<String, T>,
    #[serde(default)]
    edges: Vec<EdgeJson<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<Activation<T>>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    phi_override: IndexMap<String, Activation<T>>,
}

/// A graph file: the graph plus its optional default activation.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDoc<T> {
    pub graph: ArgGraph<T>,
    pub phi: Option<Activation<T>>,
}

pub fn graph_from_json<T: Scalar>(text: &str) -> Result<GraphDoc<T>> {
    let f: GraphJson<T> = parse(text)?;
    check_format(f.format)?;
    if let Some(name) = f
        .sigma0
        .keys()
        .chain(f.phi_override.keys())
        .find(|n| !f.arguments.contains(n))
    {
        return Err(Error::schema(format!("unknown argument `{name}`")));
    }
    let mut b = ArgGraph::builder().logic(f.logic);
    for name in f.arguments {
        let s0 = f.sigma0.get(&name).copied().unwrap_or_else(T::zero);
        if let Some(phi) = f.phi_override.get(&name) {
            b = b.phi_override(name.clone(), *phi);
        }
        b = b.argument(name, s0);
    }
    for e in f.edges {
        b = b.edge_expr(arg_from_json(&e.source)?, e.target, e.w);
    }
    Ok(GraphDoc {
        graph: b.build()?,
        phi: f.phi,
    })
}

pub fn graph_to_json<T: Scalar>(
    graph: &ArgGraph<T>,
    phi: Option<&Activation<T>>,
) -> serde_json::Value {
    let f = GraphJson {
        format: FORMAT,
        logic: graph.logic(),
        arguments: graph.names().to_vec(),
        sigma0: graph
            .names()
            .iter()
            .cloned()
            .zip(graph.sigma0().iter().copied())
            .collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| EdgeJson {
                source: arg_to_json(&graph.source_named(e)),
                target: graph.name(e.target).to_string(),
                w: e.weight,
            })
            .collect(),
        phi: phi.copied(),
        phi_override: (0..graph.len())
            .filter_map(|a| {
                graph
                    .phi_override(a)
                    .map(|p| (graph.name(a).to_string(), *p))
            })
            .collect(),
    };
    serde_json::to_value(f).expect("graph serializes")
}

// ---- labellings ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct LabellingJson<T> {
    #[serde(default = "format_version")]
    format: u32,
    sigma: IndexMap<String, T>,
}

fn named_values<T: Scalar>(graph: &ArgGraph<T>, l: &Labelling<T>) -> IndexMap<String, T> {
    l.named(graph).map(|(n, v)| (n.to_string(), v)).collect()
}

/// Arguments missing from the file take their basic strength.
pub fn labelling_from_json<T: Scalar>(graph: &ArgGraph<T>, text: &str) -> Result<Labelling<T>> {
    let f: LabellingJson<T> = parse(text)?;
    check_format(f.format)?;
    Labelling::from_named(graph, f.sigma.iter().map(|(k, v)| (k.as_str(), *v)))
}

pub fn labelling_to_json<T: Scalar>(graph: &ArgGraph<T>, l: &Labelling<T>) -> serde_json::Value {
    serde_json::to_value(LabellingJson {
        format: FORMAT,
        sigma: named_values(graph, l),
    })
    .expect("labelling serializes")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct SetEntryJson<T> {
    sigma: IndexMap<String, T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    restart: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residual: Option<T>,
}

/// Other top-level fields (such as a report's `count`) are ignored, so
/// `enumerate` output reads back as a labelling set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct LabellingSetJson<T> {
    #[serde(default = "format_version")]
    format: u32,
    labellings: Vec<SetEntryJson<T>>,
}

pub fn labelling_set_from_json<T: Scalar>(
    graph: ArgGraph<T>,
    text: &str,
) -> Result<LabellingSet<T>> {
    let f: LabellingSetJson<T> = parse(text)?;
    check_format(f.format)?;
    let mut ls = Vec::new();
    let mut prov = Vec::new();
    for e in f.labellings {
        ls.push(Labelling::from_named(
            &graph,
            e.sigma.iter().map(|(k, v)| (k.as_str(), *v)),
        )?);
        prov.push(Provenance {
            seed: e.seed,
            restart: e.restart,
            residual: e.residual,
        });
    }
    LabellingSet::with_provenance(graph, ls, prov)
}

pub fn labelling_set_to_json<T: Scalar>(ls: &LabellingSet<T>) -> serde_json::Value {
    let f = LabellingSetJson {
        format: FORMAT,
        labellings: ls
            .labellings()
            .iter()
            .zip(ls.provenance())
            .map(|(l, p)| SetEntryJson {
                sigma: named_values(ls.graph(), l),
                seed: p.seed,
                restart: p.restart,
                residual: p.residual,
            })
            .collect(),
    };
    serde_json::to_value(f).expect("labelling set serializes")
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "T: Scalar")]
struct SolveJson<'a, T> {
    format: u32,
    sigma: IndexMap<String, T>,
    #[serde(flatten)]
    run: &'a SolveResult<T>,
}

/// Solver output: the labelling by name plus convergence data.
pub fn solve_result_to_json<T: Scalar>(
    graph: &ArgGraph<T>,
    r: &SolveResult<T>,
) -> serde_json::Value {
    serde_json::to_value(SolveJson {
        format: FORMAT,
        sigma: named_values(graph, &r.labelling),
        run: r,
    })
    .expect("solve result serializes")
}

// ---- networks ----

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct SynapseJson<T> {
    from: String,
    to: String,
    w: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct MlpJson<T> {
    #[serde(default = "format_version")]
    format: u32,
    units: Vec<String>,
    #[serde(default)]
    inputs: Vec<String>,
    #[serde(default)]
    synapses: Vec<SynapseJson<T>>,
    #[serde(default)]
    biases: IndexMap<String, T>,
    #[serde(default = "Activation::sigmoid")]
    phi: Activation<T>,
    /// Per-unit activation overrides.
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    activations: IndexMap<String, Activation<T>>,
    /// Initial activation of input units (default 0).
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    input_values: IndexMap<String, T>,
}

pub fn mlp_from_json<T: Scalar>(text: &str) -> Result<MlpModel<T>> {
    let f: MlpJson<T> = parse(text)?;
    check_format(f.format)?;
    let mut m = MlpModel::new(f.units, f.phi)?;
    for u in &f.inputs {
        m.mark_input(u)?;
    }
    for s in &f.synapses {
        m.add_synapse(&s.from, &s.to, s.w)?;
    }
    for (u, b) in &f.biases {
        m.set_bias(u, *b)?;
    }
    for (u, a) in f.activations {
        m.set_activation(&u, a)?;
    }
    for (u, v) in f.input_values {
        m.set_input_value(&u, v)?;
    }
    Ok(m)
}

pub fn mlp_to_json<T: Scalar>(m: &MlpModel<T>) -> serde_json::Value {
    let units = m.units();
    let f = MlpJson {
        format: FORMAT,
        units: units.to_vec(),
        inputs: m.input_units().map(str::to_string).collect(),
        synapses: m
            .synapses()
            .iter()
            .map(|s| SynapseJson {
                from: units[s.from].clone(),
                to: units[s.to].clone(),
                w: s.weight,
            })
            .collect(),
        biases: m.biases().map(|(u, b)| (u.to_string(), b)).collect(),
        phi: *m.phi(),
        activations: m
            .activation_overrides()
            .map(|(u, a)| (u.to_string(), *a))
            .collect(),
        input_values: m.input_values().map(|(u, v)| (u.to_string(), v)).collect(),
    };
    serde_json::to_value(f).expect("network serializes")
}
