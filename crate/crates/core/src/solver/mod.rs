//! Computation of phi-coherent labellings.
//!
//! Every constrained argument (one with incoming edges) must satisfy
//! `σ(a) = φ_a(W(a))`. The system is solved by synchronous iteration of
//! that map; arguments without incoming edges keep their starting value.
//! Convergence is not guaranteed on cyclic graphs and is reported, not
//! raised.

mod oracle;

pub use oracle::{grid_oracle, OraclePoint};

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arggraph::{weight_at, ArgGraph, Labelling};
use crate::error::{Error, Result};
use crate::fuzzy::Activation;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions<T> {
    pub tol: T,
    pub max_iters: usize,
    /// Weight of the new value in each update; 1 is undamped.
    pub damping: T,
    pub restarts: usize,
    pub rng_seed: u64,
    pub dedupe_tol: T,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            tol: T::lit(1e-9),
            max_iters: 10_000,
            damping: T::one(),
            restarts: 16,
            rng_seed: 0,
            dedupe_tol: T::lit(1e-6),
        }
    }
}

impl<T: Scalar> SolveOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= T::zero() {
            return Err(Error::usage("tol must be positive"));
        }
        if self.damping.is_nan() || self.damping <= T::zero() || self.damping > T::one() {
            return Err(Error::usage("damping must lie in (0, 1]"));
        }
        if self.dedupe_tol.is_nan() || self.dedupe_tol < T::zero() {
            return Err(Error::usage("dedupe_tol must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult<T> {
    #[serde(skip)]
    pub labelling: Labelling<T>,
    pub iterations: usize,
    /// Max over constrained arguments of `|σ(a) − φ_a(W(a))|`.
    pub residual: T,
    pub converged: bool,
    /// 0 for the run started from σ₀, k for the k-th random restart.
    pub restart: usize,
}

/// Values `φ_a(W(a))` for every argument (unconstrained ones copied) and
/// the residual of `values`.
fn image<T: Scalar>(graph: &ArgGraph<T>, values: &[T], phi: &Activation<T>) -> (Vec<T>, T) {
    let mut next = values.to_vec();
    let mut residual = T::zero();
    for a in 0..graph.len() {
        if let Some(w) = weight_at(graph, values, a) {
            let v = graph.phi_for(a, phi).apply(w);
            residual = residual.max((v - values[a]).abs());
            next[a] = v;
        }
    }
    (next, residual)
}

/// Max over constrained arguments of `|σ(a) − φ_a(W(a))|`.
pub fn residual<T: Scalar>(
    graph: &ArgGraph<T>,
    labelling: &Labelling<T>,
    phi: &Activation<T>,
) -> T {
    image(graph, labelling.values(), phi).1
}

/// One synchronous update: `σ'(a) = (1−d)·σ(a) + d·φ_a(W(a))` on
/// constrained arguments, `σ'(a) = σ(a)` elsewhere.
pub fn iterate_step<T: Scalar>(
    graph: &ArgGraph<T>,
    labelling: &Labelling<T>,
    phi: &Activation<T>,
    damping: T,
) -> Labelling<T> {
    let (next, _) = image(graph, labelling.values(), phi);
    Labelling::from_clamped(blend(labelling.values(), next, damping))
}

fn blend<T: Scalar>(old: &[T], new: Vec<T>, damping: T) -> Vec<T> {
    if damping == T::one() {
        return new;
    }
    old.iter()
        .zip(new)
        .map(|(&o, n)| (T::one() - damping) * o + damping * n)
        .collect()
}

/// Iterates from `start` until the residual drops to `opts.tol` or
/// `opts.max_iters` steps have been taken. A non-converged run returns the
/// lowest-residual labelling it visited.
pub fn solve_fixed_point<T: Scalar>(
    graph: &ArgGraph<T>,
    start: &Labelling<T>,
    phi: &Activation<T>,
    opts: &SolveOptions<T>,
) -> Result<SolveResult<T>> {
    opts.validate()?;
    if start.len() != graph.len() {
        return Err(Error::usage(format!(
            "start labelling has {} values for {} arguments",
            start.len(),
            graph.len()
        )));
    }
    Ok(run(graph, start.values().to_vec(), phi, opts, 0))
}

fn run<T: Scalar>(
    graph: &ArgGraph<T>,
    mut cur: Vec<T>,
    phi: &Activation<T>,
    opts: &SolveOptions<T>,
    restart: usize,
) -> SolveResult<T> {
    let mut best: Option<(Vec<T>, T, usize)> = None;
    let mut iterations = 0;
    loop {
        let (next, res) = image(graph, &cur, phi);
        if res <= opts.tol {
            return SolveResult {
                labelling: Labelling::from_clamped(cur),
                iterations,
                residual: res,
                converged: true,
                restart,
            };
        }
        if best.as_ref().is_none_or(|(_, r, _)| res < *r) {
            best = Some((cur.clone(), res, iterations));
        }
        if iterations >= opts.max_iters {
            let (values, residual, _) = best.expect("at least one residual recorded");
            return SolveResult {
                labelling: Labelling::from_clamped(values),
                iterations,
                residual,
                converged: false,
                restart,
            };
        }
        cur = blend(&cur, next, opts.damping);
        iterations += 1;
    }
}

/// Dependency edges `atom(source) -> target`, deduplicated per target.
fn dependencies<T: Scalar>(graph: &ArgGraph<T>) -> Vec<Vec<usize>> {
    let mut succ = vec![Vec::new(); graph.len()];
    for e in graph.edges() {
        for &a in e.source.atoms() {
            if !succ[a].contains(&e.target) {
                succ[a].push(e.target);
            }
        }
    }
    succ
}

/// Topological order of the dependency graph, or one of its cycles.
pub fn topological_order<T: Scalar>(
    graph: &ArgGraph<T>,
) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let succ = dependencies(graph);
    let n = graph.len();
    let mut indeg = vec![0usize; n];
    for s in &succ {
        for &t in s {
            indeg[t] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&a| indeg[a] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(a) = queue.pop_front() {
        order.push(a);
        for &t in &succ[a] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push_back(t);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every leftover node has a leftover predecessor; walk backwards until
    // a node repeats.
    let left: Vec<bool> = (0..n).map(|a| indeg[a] > 0).collect();
    let mut pred = vec![None; n];
    for (a, s) in succ.iter().enumerate() {
        for &t in s {
            if left[a] && left[t] && pred[t].is_none() {
                pred[t] = Some(a);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut cur = (0..n).find(|&a| left[a]).expect("leftover node");
    let mut path = Vec::new();
    while !seen[cur] {
        seen[cur] = true;
        path.push(cur);
        cur = pred[cur].expect("leftover node has leftover predecessor");
    }
    let start = path
        .iter()
        .position(|&a| a == cur)
        .expect("repeated node on path");
    let mut cycle: Vec<usize> = path[start..].to_vec();
    cycle.reverse();
    cycle.push(cycle[0]);
    Err(cycle)
}

/// One-pass evaluation of an acyclic graph in topological order. The result
/// is the unique phi-coherent labelling that keeps σ₀ on unconstrained
/// arguments.
pub fn forward_acyclic<T: Scalar>(
    graph: &ArgGraph<T>,
    phi: &Activation<T>,
) -> Result<Labelling<T>> {
    let order = topological_order(graph).map_err(|cycle| Error::CyclicGraph {
        cycle: cycle
            .into_iter()
            .map(|a| graph.name(a).to_string())
            .collect(),
    })?;
    let mut values = graph.sigma0().to_vec();
    for a in order {
        if let Some(w) = weight_at(graph, &values, a) {
            values[a] = graph.phi_for(a, phi).apply(w);
        }
    }
    Ok(Labelling::from_clamped(values))
}

/// Random start for restart `k`: constrained arguments uniform in `[0, 1]`,
/// unconstrained ones at σ₀. Restart `k` draws from ChaCha8 stream `k` of
/// `seed`.
pub fn random_start<T: Scalar>(graph: &ArgGraph<T>, seed: u64, k: usize) -> Labelling<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let values = (0..graph.len())
        .map(|a| {
            let u: f64 = rng.random();
            if graph.has_incoming(a) {
                T::lit(u)
            } else {
                graph.sigma0()[a]
            }
        })
        .collect();
    Labelling::from_clamped(values)
}

/// Solves from σ₀ and from `restarts − 1` random starts, keeps converged
/// runs and drops any labelling within `dedupe_tol` (max-norm) of one
/// already kept. Restarts run in parallel; results are ordered by restart
/// index, so the output is deterministic for a given seed.
pub fn enumerate_labellings<T: Scalar>(
    graph: &ArgGraph<T>,
    phi: &Activation<T>,
    opts: &SolveOptions<T>,
) -> Result<Vec<SolveResult<T>>> {
    opts.validate()?;
    let runs: Vec<SolveResult<T>> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                Labelling::sigma0(graph)
            } else {
                random_start(graph, opts.rng_seed, k)
            };
            run(graph, start.values().to_vec(), phi, opts, k)
        })
        .collect();
    let mut kept: Vec<SolveResult<T>> = Vec::new();
    for r in runs.into_iter().filter(|r| r.converged) {
        if kept
            .iter()
            .all(|k| k.labelling.max_distance(&r.labelling) > opts.dedupe_tol)
        {
            kept.push(r);
        }
    }
    Ok(kept)
}
