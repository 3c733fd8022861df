//! The preferential interpretation built from a finite set Σ of labellings:
//! one domain element `x_j` per labelling, with `A(x_j) = σ_j(A)`. Queries
//! ask whether typical instances of one argument expression satisfy
//! another to some degree.

mod query;

pub use query::{parse_arg_expr, parse_query};

use serde::Serialize;

use crate::arggraph::{check_labelling, ArgExpr, ArgGraph, Labelling, LabellingViolation};
use crate::bridge::graph_to_kb;
use crate::error::{Error, Result};
use crate::fuzzy::{Activation, CheckMode, Degree, FuzzyLogic};
use crate::kb::{
    check_model, typical_elements, ConceptExpr, FiniteInterpretation, ModelReport, Theta,
};
use crate::scalar::{Scalar, Tolerance};
use crate::solver::SolveResult;

/// Where a labelling came from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Provenance<T> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restart: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<T>,
}

/// A graph with a non-empty, finite, ordered set of labellings.
#[derive(Debug, Clone, PartialEq)]
pub struct LabellingSet<T> {
    graph: ArgGraph<T>,
    labellings: Vec<Labelling<T>>,
    provenance: Vec<Provenance<T>>,
}

impl<T: Scalar> LabellingSet<T> {
    pub fn new(graph: ArgGraph<T>, labellings: Vec<Labelling<T>>) -> Result<Self> {
        let provenance = vec![Provenance::default(); labellings.len()];
        Self::with_provenance(graph, labellings, provenance)
    }

    pub fn with_provenance(
        graph: ArgGraph<T>,
        labellings: Vec<Labelling<T>>,
        provenance: Vec<Provenance<T>>,
    ) -> Result<Self> {
        if labellings.is_empty() {
            return Err(Error::usage("labelling set is empty"));
        }
        if provenance.len() != labellings.len() {
            return Err(Error::usage("one provenance record per labelling required"));
        }
        if let Some((j, l)) = labellings
            .iter()
            .enumerate()
            .find(|(_, l)| l.len() != graph.len())
        {
            return Err(Error::schema(format!(
                "labelling {} has {} values for {} arguments",
                j + 1,
                l.len(),
                graph.len()
            )));
        }
        Ok(LabellingSet {
            graph,
            labellings,
            provenance,
        })
    }

    /// Σ from solver runs, e.g. the output of `enumerate_labellings`.
    pub fn from_solutions(graph: ArgGraph<T>, runs: &[SolveResult<T>], seed: u64) -> Result<Self> {
        let provenance = runs
            .iter()
            .map(|r| Provenance {
                seed: Some(seed),
                restart: Some(r.restart),
                residual: Some(r.residual),
            })
            .collect();
        Self::with_provenance(
            graph,
            runs.iter().map(|r| r.labelling.clone()).collect(),
            provenance,
        )
    }

    pub fn graph(&self) -> &ArgGraph<T> {
        &self.graph
    }

    pub fn labellings(&self) -> &[Labelling<T>] {
        &self.labellings
    }

    pub fn provenance(&self) -> &[Provenance<T>] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.labellings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labellings.is_empty()
    }
}

/// Domain `x1..xn`, one atom per argument with `A(x_j) = σ_j(A)`, and
/// individual `x_j` naming element `x_j`.
pub fn build_model<T: Scalar>(ls: &LabellingSet<T>) -> Result<FiniteInterpretation<T>> {
    let domain: Vec<String> = (1..=ls.len()).map(|j| format!("x{j}")).collect();
    let mut interp = FiniteInterpretation::new(domain.clone())?;
    for (a, name) in ls.graph.names().iter().enumerate() {
        interp.set_atom(
            name.clone(),
            ls.labellings.iter().map(|l| l.get(a)).collect(),
        )?;
    }
    for x in &domain {
        interp.bind_individual(x.clone(), x)?;
    }
    Ok(interp)
}

/// `T(antecedent) ⊑ consequent θ n`, or a plain inclusion without `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalQuery<T> {
    pub antecedent: ArgExpr<String>,
    pub typicality: bool,
    pub consequent: ArgExpr<String>,
    pub theta: Theta,
    pub threshold: Degree<T>,
}

impl<T: Scalar> std::str::FromStr for ConditionalQuery<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_query(s)
    }
}

pub(crate) fn to_concept(e: &ArgExpr<String>) -> ConceptExpr {
    match e {
        ArgExpr::Arg(a) => ConceptExpr::atom(a.clone()),
        ArgExpr::Not(x) => ConceptExpr::not(to_concept(x)),
        ArgExpr::And(x, y) => ConceptExpr::and(to_concept(x), to_concept(y)),
        ArgExpr::Or(x, y) => ConceptExpr::or(to_concept(x), to_concept(y)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryAnswer<T> {
    pub degree: T,
    pub holds: bool,
    /// Elements whose antecedent degree is maximal among positive ones.
    pub typical_set: Vec<String>,
    /// The antecedent is 0 everywhere, so the inclusion holds trivially.
    pub vacuous: bool,
    pub logic: FuzzyLogic,
}

/// Degree of the query's inclusion: `inf_x implication(A(x), B(x))`, where
/// a typical antecedent is 1 on its typical elements and 0 elsewhere.
pub fn answer_query<T: Scalar>(
    interp: &FiniteInterpretation<T>,
    q: &ConditionalQuery<T>,
    logic: FuzzyLogic,
) -> Result<QueryAnswer<T>> {
    let ante_expr = to_concept(&q.antecedent);
    let cons = interp.eval_all(logic, &to_concept(&q.consequent))?;
    let ante = interp.eval_all(logic, &ante_expr)?;
    let typical = typical_elements(interp, logic, &ante_expr)?;
    let ante: Vec<T> = if q.typicality {
        (0..interp.len())
            .map(|x| {
                if typical.contains(&x) {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect()
    } else {
        ante
    };
    let vacuous = ante.iter().all(|v| *v == T::zero());
    let degree = ante
        .iter()
        .zip(&cons)
        .map(|(&a, &c)| logic.implication(a, c))
        .fold(T::one(), T::min);
    let eps = Tolerance::<T>::default().deg;
    Ok(QueryAnswer {
        degree,
        holds: q.theta.holds(degree, q.threshold.value(), eps),
        typical_set: typical
            .iter()
            .map(|&x| interp.domain()[x].clone())
            .collect(),
        vacuous,
        logic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreconditionFailure<T> {
    /// 1-based index of the labelling in Σ.
    pub labelling: usize,
    pub violations: Vec<LabellingViolation<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop4Report<T> {
    /// Every labelling in Σ is φ-coherent; otherwise no claim is made.
    pub precondition_ok: bool,
    pub precondition_failures: Vec<PreconditionFailure<T>>,
    /// Run when φ is strictly increasing with positive range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherent: Option<ModelReport<T>>,
    /// Run when φ is non-decreasing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub faithful: Option<ModelReport<T>>,
    pub ok: bool,
}

/// Checks that the model built from Σ is a coherent (strictly increasing
/// φ) or faithful (non-decreasing φ) model of the graph's KB, after
/// verifying that Σ consists of φ-coherent labellings. Per-argument
/// activation overrides are ignored: the global φ is used throughout.
pub fn verify_proposition4<T: Scalar>(
    ls: &LabellingSet<T>,
    phi: &Activation<T>,
    tol: &Tolerance<T>,
) -> Result<Prop4Report<T>> {
    let graph = &ls.graph;
    if !graph.all_sources_atomic() {
        return Err(Error::UnsupportedShape(
            "the preferential-model check covers graphs with atomic edge sources only".into(),
        ));
    }
    let plain = strip_overrides(graph)?;
    let mode = CheckMode::PhiCoherent(*phi);
    let mut precondition_failures = Vec::new();
    for (j, l) in ls.labellings.iter().enumerate() {
        let r = check_labelling(&plain, l, &mode, tol)?;
        if !r.ok {
            precondition_failures.push(PreconditionFailure {
                labelling: j + 1,
                violations: r.violations,
            });
        }
    }
    if !precondition_failures.is_empty() {
        return Ok(Prop4Report {
            precondition_ok: false,
            precondition_failures,
            coherent: None,
            faithful: None,
            ok: false,
        });
    }
    let interp = build_model(ls)?;
    let kb = graph_to_kb(graph);
    let coherent = if phi.is_strictly_increasing() && phi.has_positive_range() {
        Some(check_model(&interp, &kb, &CheckMode::Coherent, tol)?)
    } else {
        None
    };
    let faithful = if phi.is_non_decreasing() {
        Some(check_model(&interp, &kb, &CheckMode::Faithful, tol)?)
    } else {
        None
    };
    let ok = coherent.iter().chain(&faithful).all(|r| r.ok)
        && (coherent.is_some() || faithful.is_some());
    Ok(Prop4Report {
        precondition_ok: true,
        precondition_failures,
        coherent,
        faithful,
        ok,
    })
}

fn strip_overrides<T: Scalar>(graph: &ArgGraph<T>) -> Result<ArgGraph<T>> {
    let mut b = ArgGraph::builder().logic(graph.logic());
    for (a, n) in graph.names().iter().enumerate() {
        b = b.argument(n.clone(), graph.sigma0()[a]);
    }
    for e in graph.edges() {
        b = b.edge_expr(
            graph.source_named(e),
            graph.name(e.target).to_string(),
            e.weight,
        );
    }
    b.build()
}
