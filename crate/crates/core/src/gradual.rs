//! Gradual semantics defined by an evaluation method `⟨h, g, f⟩`: `h`
//! combines an edge weight with the source's strength, `g` aggregates the
//! influences on an argument and `f` turns basic strength and aggregate
//! into a degree. `Deg` is a solution of
//! `Deg(A) = f(σ₀(A), g(h(π(B₁,A), Deg(B₁)), …))`, computed by synchronous
//! iteration from σ₀.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arggraph::{ArgGraph, Labelling};
use crate::error::{Error, Result};
use crate::fuzzy::Activation;
use crate::scalar::Scalar;
use crate::solver::SolveOptions;

pub trait EvaluationMethod<T: Scalar> {
    /// `h`: strength of one attack/support.
    fn influence(&self, weight: T, strength: T) -> T;

    /// `g`: aggregate of all influences; `None` when undefined.
    fn aggregate(&self, influences: &[T]) -> Option<T>;

    /// `f`: final degree from basic strength and aggregate.
    fn combine(&self, basic: T, aggregate: Option<T>) -> T;
}

/// `M^φ = ⟨h_prod, g_sum, f_φ⟩`. The empty sum is undefined and `f_φ`
/// ignores the basic strength whenever the aggregate is defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MPhi<T> {
    pub phi: Activation<T>,
}

pub fn mk_mphi<T: Scalar>(phi: Activation<T>) -> MPhi<T> {
    MPhi { phi }
}

impl<T: Scalar> EvaluationMethod<T> for MPhi<T> {
    fn influence(&self, weight: T, strength: T) -> T {
        weight * strength
    }

    fn aggregate(&self, influences: &[T]) -> Option<T> {
        if influences.is_empty() {
            None
        } else {
            Some(influences.iter().copied().sum())
        }
    }

    fn combine(&self, basic: T, aggregate: Option<T>) -> T {
        match aggregate {
            None => basic,
            Some(y) => self.phi.apply(y),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeOutcome<T> {
    #[serde(skip)]
    pub weighting: Labelling<T>,
    pub converged: bool,
    pub residual: T,
    pub iterations: usize,
}

fn require_atomic<T: Scalar>(graph: &ArgGraph<T>) -> Result<()> {
    if graph.all_sources_atomic() {
        Ok(())
    } else {
        Err(Error::UnsupportedShape(
            "evaluation methods take atomic edge sources only; \
             use the labelling semantics for boolean sources"
                .into(),
        ))
    }
}

/// One application of the method's equation to every argument.
pub fn evaluate_once<T: Scalar, M: EvaluationMethod<T> + ?Sized>(
    method: &M,
    graph: &ArgGraph<T>,
    deg: &[T],
) -> Vec<T> {
    let mut scratch = Vec::new();
    (0..graph.len())
        .map(|a| {
            scratch.clear();
            for &e in graph.incoming_ids(a) {
                let edge = &graph.edges()[e];
                let src = *edge.source.as_atom().expect("atomic source");
                scratch.push(method.influence(edge.weight, deg[src]));
            }
            method.combine(graph.sigma0()[a], method.aggregate(&scratch))
        })
        .collect()
}

/// `max_a |deg(a) − F(deg)(a)|` for the method's update map `F`.
pub fn method_residual<T: Scalar, M: EvaluationMethod<T> + ?Sized>(
    method: &M,
    graph: &ArgGraph<T>,
    deg: &Labelling<T>,
) -> Result<T> {
    require_atomic(graph)?;
    let next = evaluate_once(method, graph, deg.values());
    Ok(next
        .iter()
        .zip(deg.values())
        .map(|(a, b)| (*a - *b).abs())
        .fold(T::zero(), T::max))
}

/// Iterates the method's equation from σ₀ until the update moves no value
/// by more than `opts.tol`.
pub fn degree_of<T: Scalar, M: EvaluationMethod<T> + ?Sized>(
    method: &M,
    graph: &ArgGraph<T>,
    opts: &SolveOptions<T>,
) -> Result<DegreeOutcome<T>> {
    require_atomic(graph)?;
    opts.validate()?;
    let mut cur = graph.sigma0().to_vec();
    let mut iterations = 0;
    loop {
        let next = evaluate_once(method, graph, &cur);
        let residual = next
            .iter()
            .zip(&cur)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max);
        let done = residual <= opts.tol;
        if done || iterations >= opts.max_iters {
            return Ok(DegreeOutcome {
                weighting: Labelling::from_clamped(cur),
                converged: done,
                residual,
                iterations,
            });
        }
        cur = cur
            .iter()
            .zip(next)
            .map(|(&o, n)| (T::one() - opts.damping) * o + opts.damping * n)
            .collect();
        iterations += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradualProperty {
    Anonymity,
    Independence,
    Directionality,
    Equivalence,
    Maximality,
    NeutralityWitness,
}

impl GradualProperty {
    pub const ALL: [GradualProperty; 6] = [
        GradualProperty::Anonymity,
        GradualProperty::Independence,
        GradualProperty::Directionality,
        GradualProperty::Equivalence,
        GradualProperty::Maximality,
        GradualProperty::NeutralityWitness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GradualProperty::Anonymity => "anonymity",
            GradualProperty::Independence => "independence",
            GradualProperty::Directionality => "directionality",
            GradualProperty::Equivalence => "equivalence",
            GradualProperty::Maximality => "maximality",
            GradualProperty::NeutralityWitness => "neutrality-witness",
        }
    }
}

impl fmt::Display for GradualProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GradualProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GradualProperty::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::usage(format!("unknown property `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Satisfied,
    Violated,
    Inconclusive,
}

/// A graph pair that differs only by a weight-0 edge into `argument`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeutralityWitness<T> {
    pub argument: String,
    pub source: String,
    pub basic_strength: T,
    pub with_zero_edge: T,
    pub without_edge: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport<T> {
    pub property: GradualProperty,
    pub outcome: Outcome,
    /// Whether the outcome is the one expected for `M^φ`: satisfied for the
    /// five structural properties, violated (with a witness) for neutrality.
    pub ok: bool,
    pub checked: usize,
    pub details: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<NeutralityWitness<T>>,
}

impl<T> PropertyReport<T> {
    fn new(property: GradualProperty) -> Self {
        PropertyReport {
            property,
            outcome: Outcome::Inconclusive,
            ok: false,
            checked: 0,
            details: Vec::new(),
            note: None,
            witness: None,
        }
    }

    fn finish(mut self) -> Self {
        if self.outcome != Outcome::Inconclusive {
            self.ok = match self.property {
                GradualProperty::NeutralityWitness => self.outcome == Outcome::Violated,
                _ => self.outcome == Outcome::Satisfied,
            };
        }
        self
    }

    fn inconclusive(mut self, why: impl Into<String>) -> Self {
        self.outcome = Outcome::Inconclusive;
        self.details.push(why.into());
        self
    }
}

const REFORMULATED: &str = "stated with R^-(x) (attackers and supporters) in place of Att(x) \
                            to accommodate signed weights";

/// Checks one property of the deterministic iterate-from-σ₀ semantics of
/// `method` on `graph`. Runs that do not converge make the report
/// inconclusive.
pub fn check_gradual_property<T: Scalar, M: EvaluationMethod<T> + ?Sized>(
    graph: &ArgGraph<T>,
    method: &M,
    property: GradualProperty,
    opts: &SolveOptions<T>,
) -> Result<PropertyReport<T>> {
    let report = PropertyReport::new(property);
    let base = degree_of(method, graph, opts)?;
    if !base.converged {
        return Ok(report.inconclusive("degree iteration did not converge on the input graph"));
    }
    let deg = base.weighting.values();
    let tol = opts.tol * T::lit(10.0);
    let same = |a: T, b: T| (a - b).abs() <= tol;

    let report = match property {
        GradualProperty::Anonymity => anonymity(graph, method, opts, deg, same, report)?,
        GradualProperty::Independence => independence(graph, method, opts, deg, same, report)?,
        GradualProperty::Directionality => directionality(graph, method, opts, deg, same, report)?,
        GradualProperty::Equivalence => equivalence(graph, deg, same, report),
        GradualProperty::Maximality => maximality(graph, deg, same, report),
        GradualProperty::NeutralityWitness => neutrality(graph, method, opts, deg, same, report)?,
    };
    Ok(report.finish())
}

fn settle<T>(mut report: PropertyReport<T>, failures: Vec<String>) -> PropertyReport<T> {
    if report.outcome == Outcome::Inconclusive && report.checked == 0 {
        return report;
    }
    report.outcome = if failures.is_empty() {
        Outcome::Satisfied
    } else {
        Outcome::Violated
    };
    report.details.extend(failures);
    report
}

fn anonymity<T: Scalar, M: EvaluationMethod<T> + ?Sized>(
    graph: &ArgGraph<T>,
    method: &M,
    opts: &SolveOptions<T>,
    deg: &[T],
    same: impl Fn(T, T) -> bool,
    mut report: PropertyReport<T>,
) -> Result<PropertyReport<T>> {
    // Reverse argument order and rename every argument.
    let n = graph.len();
    let renamed = |a: usize| format!("anon{}", n - 1 - a);
    let mut b = ArgGraph::builder().logic(graph.logic());
    for a in (0..n).rev() {
        b = b.argument(renamed(a), graph.sigma0()[a]);
    }
    for e in graph.edges() {
        let src = *e.source.as_atom().expect("atomic source");
        b = b.edge(renamed(src), renamed(e.target), e.weight);
    }
    let iso = b.build()?;
    let out = degree_of(method, &iso, opts)?;
    if !out.converged {
        return Ok(report.inconclusive("renamed graph did not converge"));
    }
    let mut failures = Vec::new();
    for (a, &before) in deg.iter().enumerate() {
        let b = iso.index_of(&renamed(a)).expect("renamed argument exists");
        report.checked += 1;
        if !same(before, out.weighting.get(b)) {
            failures.push(format!(
                "{}: {} before renaming, {} after",
                graph.name(a),
                before,
                out.weighting.get(b)
            ));
        }
    }
    Ok(settle(report, failures))
}

fn independence<T: Scalar, M: EvaluationMethod<T> + ?Sized>(
    graph: &ArgGraph<T>,
    method: &M,
    opts: &SolveOptions<T>,
    deg: &[T],
    same: impl Fn(T, T) -> bool,
    mut report: PropertyReport<T>,
) -> Result<PropertyReport<T>> {
    // Union with a disjoint, renamed copy of the graph itself.
    let copy = |a: usize| format!("__indep_{}", graph.name(a));
    let mut b = graph.to_builder();
    for a in 0..graph.len() {
        if graph.index_of(&copy(a)).is_some() {
            return Ok(report.inconclusive("graph already uses the reserved `__indep_` prefix"));
        }
        b = b.argument(copy(a), graph.sigma0()[a]);
    }
    for e in graph.edges() {
        let src = *e.source.as_atom().expect("atomic source");
        b = b.edge(copy(src), copy(e.target), e.weight);
    }
    let union = b.build()?;
    let out = degree_of(method, &union, opts)?;
    if !out.converged {
        return Ok(report.inconclusive("graph with the added component did not converge"));
    }
    let mut failures = Vec::new();
    for (a, &d) in deg.iter().enumerate() {
        report.checked += 1;
        if !same(d, out.weighting.get(a)) {
            failures.push(format!(
                "{}: {} alone, {} with a disjoint component",
                graph.name(a),
                d,
                out.weighting.get(a)
            ));
        }
    }
    Ok(settle(report, failures))
}

/// Arguments reachable from `from` (inclusive) along edges.
fn reachable<T: Scalar>(graph: &ArgGraph<T>, from: usize) -> Vec<bool> {
    let mut seen = vec![false; graph.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(a) = stack.pop() {
        for e in graph.edges() {
            if e.source.atoms().contains(&&a) && !seen[e.target] {
                seen[e.target] = true;
                stack.push(e.target);
            }
        }
    }
    seen
}

const DIRECTIONALITY_PAIRS: usize = 64;

fn directionality<T: Scalar, M: EvaluationMethod<T> + ?Sized>(
    graph: &ArgGraph<T>,
    method: &M,
    opts: &SolveOptions<T>,
    deg: &[T],
    same: impl Fn(T, T) -> bool,
    mut report: PropertyReport<T>,
) -> Result<PropertyReport<T>> {
    let n = graph.len();
    let mut failures = Vec::new();
    let mut skipped = 0usize;
    let pairs = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .take(DIRECTIONALITY_PAIRS);
    for (a, b) in pairs {
        let extended = graph
            .to_builder()
            .edge(
                graph.name(a).to_string(),
                graph.name(b).to_string(),
                T::one(),
            )
            .build()?;
        let out = degree_of(method, &extended, opts)?;
        if !out.converged {
            skipped += 1;
            continue;
        }
        let affected = reachable(&extended, b);
        for x in (0..n).filter(|&x| !affected[x]) {
            report.checked += 1;
            if !same(deg[x], out.weighting.get(x)) {
                failures.push(format!(
                    "adding {} -> {} moved {} from {} to {}",
                    graph.name(a),
                    graph.name(b),
                    graph.name(x),
                    deg[x],
                    out.weighting.get(x)
                ));
            }
        }
    }
    if skipped > 0 {
        report.details.push(format!(
            "{skipped} extended graph(s) did not converge and were skipped"
        ));
    } else if report.checked == 0 {
        report.outcome = Outcome::Satisfied;
        report
            .details
            .push("every argument is reachable from every new edge; holds vacuously".into());
        return Ok(report);
    }
    Ok(settle(report, failures))
}

/// Sorted `(weight, Deg(source))` pairs of the edges into `a`.
fn influences<T: Scalar>(graph: &ArgGraph<T>, deg: &[T], a: usize) -> Vec<(T, T)> {
    let mut v: Vec<(T, T)> = graph
        .incoming_ids(a)
        .iter()
        .map(|&e| {
            let edge = &graph.edges()[e];
            (
                edge.weight,
                deg[*edge.source.as_atom().expect("atomic source")],
            )
        })
        .collect();
    v.sort_by(|x, y| {
        x.0.partial_cmp(&y.0)
            .unwrap()
            .then(x.1.partial_cmp(&y.1).unwrap())
    });
    v
}

fn equivalence<T: Scalar>(
    graph: &ArgGraph<T>,
    deg: &[T],
    same: impl Fn(T, T) -> bool,
    mut report: PropertyReport<T>,
) -> PropertyReport<T> {
    report.note = Some(REFORMULATED);
    let mut failures = Vec::new();
    let n = graph.len();
    for a in 0..n {
        for b in (a + 1)..n {
            if graph.sigma0()[a] != graph.sigma0()[b] {
                continue;
            }
            let (ia, ib) = (influences(graph, deg, a), influences(graph, deg, b));
            let matched = ia.len() == ib.len()
                && ia
                    .iter()
                    .zip(&ib)
                    .all(|(x, y)| x.0 == y.0 && same(x.1, y.1));
            if !matched {
                continue;
            }
            report.checked += 1;
            if !same(deg[a], deg[b]) {
                failures.push(format!(
                    "{} and {} have matching influences but degrees {} and {}",
                    graph.name(a),
                    graph.name(b),
                    deg[a],
                    deg[b]
                ));
            }
        }
    }
    if report.checked == 0 {
        report
            .details
            .push("no pair of arguments with matching influences; holds vacuously".into());
        report.checked = 0;
        report.outcome = Outcome::Satisfied;
        return report;
    }
    settle(report, failures)
}

fn maximality<T: Scalar>(
    graph: &ArgGraph<T>,
    deg: &[T],
    same: impl Fn(T, T) -> bool,
    mut report: PropertyReport<T>,
) -> PropertyReport<T> {
    report.note = Some(REFORMULATED);
    let mut failures = Vec::new();
    for a in (0..graph.len()).filter(|&a| !graph.has_incoming(a)) {
        report.checked += 1;
        if !same(deg[a], graph.sigma0()[a]) {
            failures.push(format!(
                "{}: degree {} but basic strength {}",
                graph.name(a),
                deg[a],
                graph.sigma0()[a]
            ));
        }
    }
    if report.checked == 0 {
        report
            .details
            .push("every argument has incoming edges; holds vacuously".into());
        report.outcome = Outcome::Satisfied;
        return report;
    }
    settle(report, failures)
}

/// Degree of `target` after adding a weight-0 edge from `source`.
fn with_zero_edge<T: Scalar, M: EvaluationMethod<T> + ?Sized>(
    graph: &ArgGraph<T>,
    method: &M,
    opts: &SolveOptions<T>,
    source: &str,
    target: &str,
) -> Result<Option<T>> {
    let g = graph.to_builder().edge(source, target, T::zero()).build()?;
    let out = degree_of(method, &g, opts)?;
    Ok(out
        .converged
        .then(|| out.weighting.get(g.require(target).expect("target exists"))))
}

fn neutrality<T: Scalar, M: EvaluationMethod<T> + ?Sized>(
    graph: &ArgGraph<T>,
    method: &M,
    opts: &SolveOptions<T>,
    deg: &[T],
    same: impl Fn(T, T) -> bool,
    mut report: PropertyReport<T>,
) -> Result<PropertyReport<T>> {
    let n = graph.len();
    for a in (0..n).filter(|&a| !graph.has_incoming(a)) {
        let src = (0..n).find(|&b| b != a).unwrap_or(a);
        report.checked += 1;
        let Some(with) = with_zero_edge(graph, method, opts, graph.name(src), graph.name(a))?
        else {
            continue;
        };
        if !same(with, deg[a]) {
            report.witness = Some(NeutralityWitness {
                argument: graph.name(a).to_string(),
                source: graph.name(src).to_string(),
                basic_strength: graph.sigma0()[a],
                with_zero_edge: with,
                without_edge: deg[a],
            });
            report.outcome = Outcome::Violated;
            return Ok(report);
        }
    }
    // No argument of the input works; try a fresh isolated pair whose basic
    // strength is chosen away from the zero-edge value.
    let (src, tgt) = ("__neutral_src", "__neutral_tgt");
    if graph.index_of(src).is_none() && graph.index_of(tgt).is_none() {
        let probe = graph
            .to_builder()
            .argument(src, T::zero())
            .argument(tgt, T::zero())
            .build()?;
        if let Some(with) = with_zero_edge(&probe, method, opts, src, tgt)? {
            let basic = if with < T::lit(0.5) {
                T::one()
            } else {
                T::zero()
            };
            let fresh = graph
                .to_builder()
                .argument(src, T::zero())
                .argument(tgt, basic)
                .build()?;
            report.checked += 1;
            if let Some(with) = with_zero_edge(&fresh, method, opts, src, tgt)? {
                if !same(with, basic) {
                    report.witness = Some(NeutralityWitness {
                        argument: tgt.to_string(),
                        source: src.to_string(),
                        basic_strength: basic,
                        with_zero_edge: with,
                        without_edge: basic,
                    });
                    report.outcome = Outcome::Violated;
                    return Ok(report);
                }
            }
        }
    }
    report.outcome = if report.checked == 0 {
        Outcome::Inconclusive
    } else {
        Outcome::Satisfied
    };
    report
        .details
        .push("no weight-0 edge changed a degree".into());
    Ok(report)
}
