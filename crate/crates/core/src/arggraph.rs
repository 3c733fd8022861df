//! Weighted bipolar argumentation graphs. Edge weights are arbitrary reals
//! (positive supports, negative attacks) and an edge source may be a
//! boolean combination of arguments.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::{Activation, CheckMode, Degree, FuzzyLogic};
use crate::scalar::{Scalar, Tolerance};

/// Boolean combination of arguments. `A` is `usize` inside a graph and
/// `String` before names are resolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ArgExpr<A = usize> {
    Arg(A),
    Not(Box<ArgExpr<A>>),
    And(Box<ArgExpr<A>>, Box<ArgExpr<A>>),
    Or(Box<ArgExpr<A>>, Box<ArgExpr<A>>),
}

impl<A> ArgExpr<A> {
    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Self) -> Self {
        ArgExpr::Not(Box::new(e))
    }

    pub fn and(a: Self, b: Self) -> Self {
        ArgExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        ArgExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn as_atom(&self) -> Option<&A> {
        match self {
            ArgExpr::Arg(a) => Some(a),
            _ => None,
        }
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.visit(&mut |a| out.push(a));
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a A)) {
        match self {
            ArgExpr::Arg(a) => f(a),
            ArgExpr::Not(e) => e.visit(f),
            ArgExpr::And(l, r) | ArgExpr::Or(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    pub fn try_map<B, E>(&self, f: &mut impl FnMut(&A) -> Result<B, E>) -> Result<ArgExpr<B>, E> {
        Ok(match self {
            ArgExpr::Arg(a) => ArgExpr::Arg(f(a)?),
            ArgExpr::Not(e) => ArgExpr::not(e.try_map(f)?),
            ArgExpr::And(l, r) => ArgExpr::and(l.try_map(f)?, r.try_map(f)?),
            ArgExpr::Or(l, r) => ArgExpr::or(l.try_map(f)?, r.try_map(f)?),
        })
    }

    pub fn map<B>(&self, f: &mut impl FnMut(&A) -> B) -> ArgExpr<B> {
        self.try_map(&mut |a| Ok::<_, std::convert::Infallible>(f(a)))
            .unwrap_or_else(|e| match e {})
    }
}

impl ArgExpr<String> {
    pub fn named(name: impl Into<String>) -> Self {
        ArgExpr::Arg(name.into())
    }
}

impl<A: fmt::Display> fmt::Display for ArgExpr<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgExpr::Arg(a) => write!(f, "{a}"),
            ArgExpr::Not(e) => write!(f, "!{e}"),
            ArgExpr::And(l, r) => write!(f, "({l} & {r})"),
            ArgExpr::Or(l, r) => write!(f, "({l} | {r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub source: ArgExpr,
    pub target: usize,
    pub weight: T,
}

/// Weighted graph `⟨A, σ₀, R, π⟩` plus the logic used to evaluate
/// boolean sources and optional per-argument activations.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgGraph<T> {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge<T>>,
    incoming: Vec<Vec<usize>>,
    sigma0: Vec<T>,
    phi_override: Vec<Option<Activation<T>>>,
    logic: FuzzyLogic,
}

impl<T: Scalar> ArgGraph<T> {
    pub fn builder() -> GraphBuilder<T> {
        GraphBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::usage(format!("unknown argument `{name}`")))
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn sigma0(&self) -> &[T] {
        &self.sigma0
    }

    pub fn logic(&self) -> FuzzyLogic {
        self.logic
    }

    pub fn phi_override(&self, a: usize) -> Option<&Activation<T>> {
        self.phi_override[a].as_ref()
    }

    /// Activation in force for `a` given the global default.
    pub fn phi_for<'a>(&'a self, a: usize, default: &'a Activation<T>) -> &'a Activation<T> {
        self.phi_override[a].as_ref().unwrap_or(default)
    }

    /// Indices (into `edges()`) of the edges targeting `a`.
    pub fn incoming_ids(&self, a: usize) -> &[usize] {
        &self.incoming[a]
    }

    pub fn has_incoming(&self, a: usize) -> bool {
        !self.incoming[a].is_empty()
    }

    /// Arguments with at least one incoming edge.
    pub fn constrained(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&a| self.has_incoming(a))
    }

    pub fn all_sources_atomic(&self) -> bool {
        self.edges.iter().all(|e| e.source.as_atom().is_some())
    }

    /// Source expression with argument names.
    pub fn source_named(&self, e: &Edge<T>) -> ArgExpr<String> {
        e.source.map(&mut |&i| self.names[i].clone())
    }

    /// Same graph with σ₀ replaced.
    pub fn with_sigma0(&self, sigma0: Vec<T>) -> Result<Self> {
        if sigma0.len() != self.len() {
            return Err(Error::usage("sigma0 length does not match argument count"));
        }
        for v in &sigma0 {
            Degree::new(*v)?;
        }
        Ok(ArgGraph {
            sigma0,
            ..self.clone()
        })
    }

    /// Builder pre-populated with this graph's arguments and edges.
    pub fn to_builder(&self) -> GraphBuilder<T> {
        let mut b = GraphBuilder::default().logic(self.logic);
        for (i, n) in self.names.iter().enumerate() {
            b = b.argument(n.clone(), self.sigma0[i]);
            if let Some(phi) = self.phi_override[i] {
                b = b.phi_override(n.clone(), phi);
            }
        }
        for e in &self.edges {
            b = b.edge_expr(self.source_named(e), self.names[e.target].clone(), e.weight);
        }
        b
    }
}

#[derive(Debug, Clone)]
pub struct GraphBuilder<T> {
    args: Vec<(String, T)>,
    edges: Vec<(ArgExpr<String>, String, T)>,
    overrides: Vec<(String, Activation<T>)>,
    logic: FuzzyLogic,
}

impl<T> Default for GraphBuilder<T> {
    fn default() -> Self {
        GraphBuilder {
            args: Vec::new(),
            edges: Vec::new(),
            overrides: Vec::new(),
            logic: FuzzyLogic::Zadeh,
        }
    }
}

impl<T: Scalar> GraphBuilder<T> {
    pub fn argument(mut self, name: impl Into<String>, sigma0: T) -> Self {
        self.args.push((name.into(), sigma0));
        self
    }

    /// Atomic edge `source -> target`.
    pub fn edge(self, source: impl Into<String>, target: impl Into<String>, weight: T) -> Self {
        self.edge_expr(ArgExpr::named(source), target, weight)
    }

    pub fn edge_expr(
        mut self,
        source: ArgExpr<String>,
        target: impl Into<String>,
        weight: T,
    ) -> Self {
        self.edges.push((source, target.into(), weight));
        self
    }

    pub fn phi_override(mut self, name: impl Into<String>, phi: Activation<T>) -> Self {
        self.overrides.push((name.into(), phi));
        self
    }

    pub fn logic(mut self, logic: FuzzyLogic) -> Self {
        self.logic = logic;
        self
    }

    pub fn build(self) -> Result<ArgGraph<T>> {
        let mut names = Vec::with_capacity(self.args.len());
        let mut index = HashMap::new();
        let mut sigma0 = Vec::with_capacity(self.args.len());
        for (name, s0) in self.args {
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(Error::schema(format!("duplicate argument `{name}`")));
            }
            Degree::new(s0)
                .map_err(|_| Error::schema(format!("sigma0 of `{name}` outside [0, 1]")))?;
            names.push(name);
            sigma0.push(s0);
        }
        let lookup = |n: &String| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| Error::schema(format!("undeclared argument `{n}`")))
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut incoming = vec![Vec::new(); names.len()];
        for (src, tgt, w) in self.edges {
            if !w.is_finite() {
                return Err(Error::schema(format!(
                    "non-finite weight on edge into `{tgt}`"
                )));
            }
            let source = src.try_map(&mut |n| lookup(n))?;
            let target = lookup(&tgt)?;
            incoming[target].push(edges.len());
            edges.push(Edge {
                source,
                target,
                weight: w,
            });
        }
        let mut phi_override = vec![None; names.len()];
        for (n, phi) in self.overrides {
            phi_override[lookup(&n)?] = Some(phi);
        }
        Ok(ArgGraph {
            names,
            index,
            edges,
            incoming,
            sigma0,
            phi_override,
            logic: self.logic,
        })
    }
}

/// Total map from arguments to acceptability degrees, indexed like the
/// graph's arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct Labelling<T> {
    values: Vec<T>,
}

impl<T: Scalar> Labelling<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        for v in &values {
            Degree::new(*v)?;
        }
        Ok(Labelling { values })
    }

    /// Clamps every value into `[0, 1]`.
    pub(crate) fn from_clamped(values: Vec<T>) -> Self {
        Labelling {
            values: values
                .into_iter()
                .map(|v| Degree::saturating(v).value())
                .collect(),
        }
    }

    pub fn sigma0(graph: &ArgGraph<T>) -> Self {
        Labelling {
            values: graph.sigma0.clone(),
        }
    }

    /// Builds a labelling from `(name, value)` pairs; arguments that are not
    /// mentioned take their basic strength.
    pub fn from_named<'a>(
        graph: &ArgGraph<T>,
        pairs: impl IntoIterator<Item = (&'a str, T)>,
    ) -> Result<Self> {
        let mut values = graph.sigma0.clone();
        for (name, v) in pairs {
            let i = graph.index_of(name).ok_or_else(|| {
                Error::schema(format!("labelling names unknown argument `{name}`"))
            })?;
            values[i] = Degree::new(v)?.value();
        }
        Ok(Labelling { values })
    }

    pub fn get(&self, a: usize) -> T {
        self.values[a]
    }

    pub fn set(&mut self, a: usize, v: T) -> Result<()> {
        self.values[a] = Degree::new(v)?.value();
        Ok(())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_distance(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    pub fn named<'a>(&'a self, graph: &'a ArgGraph<T>) -> impl Iterator<Item = (&'a str, T)> + 'a {
        graph
            .names
            .iter()
            .map(String::as_str)
            .zip(self.values.iter().copied())
    }
}

/// All edges targeting `a`, including those with boolean sources.
pub fn incoming<'g, T: Scalar>(graph: &'g ArgGraph<T>, a: &str) -> Result<Vec<&'g Edge<T>>> {
    let i = graph.require(a)?;
    Ok(graph.incoming[i].iter().map(|&e| &graph.edges[e]).collect())
}

pub(crate) fn eval_expr<T: Scalar>(values: &[T], expr: &ArgExpr, logic: FuzzyLogic) -> T {
    match expr {
        ArgExpr::Arg(a) => values[*a],
        ArgExpr::Not(e) => logic.negation(eval_expr(values, e, logic)),
        ArgExpr::And(l, r) => logic.tnorm(eval_expr(values, l, logic), eval_expr(values, r, logic)),
        ArgExpr::Or(l, r) => logic.snorm(eval_expr(values, l, logic), eval_expr(values, r, logic)),
    }
}

/// Degree of a boolean combination of arguments under `labelling`.
pub fn eval_arg_expr<T: Scalar>(
    labelling: &Labelling<T>,
    expr: &ArgExpr,
    logic: FuzzyLogic,
) -> Result<Degree<T>> {
    for &a in expr.atoms() {
        if a >= labelling.len() {
            return Err(Error::schema(format!(
                "argument index {a} not in labelling"
            )));
        }
    }
    Ok(Degree::saturating(eval_expr(
        &labelling.values,
        expr,
        logic,
    )))
}

/// `Σ π(e)·σ(src(e))` over the edges into `a` given raw labelling values.
pub(crate) fn weight_at<T: Scalar>(graph: &ArgGraph<T>, values: &[T], a: usize) -> Option<T> {
    let ids = &graph.incoming[a];
    if ids.is_empty() {
        return None;
    }
    let mut sum = T::zero();
    for &e in ids {
        let edge = &graph.edges[e];
        sum = sum + edge.weight * eval_expr(values, &edge.source, graph.logic);
    }
    Some(sum)
}

/// Weighted support of `a`; `None` when `a` has no incoming edges. An edge
/// of weight 0 still makes the weight defined.
pub fn weight_of_argument<T: Scalar>(
    graph: &ArgGraph<T>,
    labelling: &Labelling<T>,
    a: usize,
) -> Option<T> {
    weight_at(graph, &labelling.values, a)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LabellingViolation<T> {
    /// Degree order and weight order disagree on the pair.
    Order {
        a: String,
        b: String,
        sigma_a: T,
        sigma_b: T,
        weight_a: T,
        weight_b: T,
    },
    Phi {
        argument: String,
        sigma: T,
        expected: T,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabellingReport<T> {
    pub mode: &'static str,
    pub ok: bool,
    pub violations: Vec<LabellingViolation<T>>,
}

/// Checks `labelling` against the coherent, faithful or phi-coherent
/// condition. Arguments without incoming edges are unconstrained.
pub fn check_labelling<T: Scalar>(
    graph: &ArgGraph<T>,
    labelling: &Labelling<T>,
    mode: &CheckMode<T>,
    tol: &Tolerance<T>,
) -> Result<LabellingReport<T>> {
    if labelling.len() != graph.len() {
        return Err(Error::usage(format!(
            "labelling has {} values for {} arguments",
            labelling.len(),
            graph.len()
        )));
    }
    let sigma = labelling.values();
    let weighted: Vec<(usize, T)> = graph
        .constrained()
        .map(|a| {
            (
                a,
                weight_at(graph, sigma, a).expect("constrained argument has a weight"),
            )
        })
        .collect();
    let mut violations = Vec::new();
    match mode {
        CheckMode::PhiCoherent(phi) => {
            for &(a, w) in &weighted {
                let expected = graph.phi_for(a, phi).apply(w);
                if !tol.deg_eq(sigma[a], expected) {
                    violations.push(LabellingViolation::Phi {
                        argument: graph.names[a].clone(),
                        sigma: sigma[a],
                        expected,
                    });
                }
            }
        }
        CheckMode::Coherent | CheckMode::Faithful => {
            let iff = matches!(mode, CheckMode::Coherent);
            for &(a, wa) in &weighted {
                for &(b, wb) in &weighted {
                    if a == b {
                        continue;
                    }
                    let less = tol.deg_gt(sigma[b], sigma[a]);
                    let lighter = tol.weight_gt(wb, wa);
                    let bad = if iff {
                        less != lighter
                    } else {
                        less && !lighter
                    };
                    if bad {
                        violations.push(LabellingViolation::Order {
                            a: graph.names[a].clone(),
                            b: graph.names[b].clone(),
                            sigma_a: sigma[a],
                            sigma_b: sigma[b],
                            weight_a: wa,
                            weight_b: wb,
                        });
                    }
                }
            }
        }
    }
    Ok(LabellingReport {
        mode: mode.name(),
        ok: violations.is_empty(),
        violations,
    })
}
