//! Acceptance suite: one PASS/FAIL line per criterion, each within its
//! runtime limit. Exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use gradarg_core::gradual::{method_residual, Outcome};
use gradarg_core::io;
use gradarg_core::kb::ModelViolation;
use gradarg_core::{
    check_gradual_property, check_labelling, check_model, check_stationary, degree_of,
    element_weight, enumerate_labellings, forward_acyclic, forward_pass, graph_to_kb, grid_oracle,
    mk_mphi, mlp_to_kb, solve_fixed_point, verify_proposition4, Activation, CheckMode, ConceptExpr,
    ExtendedReal, GradualProperty, Graph, Interpretation, LabellingSet, Options, Sigma, Tol,
};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn solver_opts() -> Options {
    Options {
        tol: 1e-13,
        ..Options::default()
    }
}

// 1
fn penguin_weights() -> Result<String, String> {
    let (kb, interp) = penguin();
    let el = |n: &str| interp.element(n).unwrap();
    // values given in the worked example
    let expected = [
        ("Bird", "reddy", 120.0),
        ("Bird", "opus", 100.0),
        ("Penguin", "reddy", 30.0),
        ("Penguin", "opus", 120.0),
    ];
    for (concept, x, want) in expected {
        // independent recomputation from the membership table
        let by_hand: f64 = kb.conditionals[concept]
            .iter()
            .map(|inc| {
                let ConceptExpr::Atom(a) = &inc.body else {
                    unreachable!()
                };
                inc.weight * interp.row(a).unwrap()[el(x)]
            })
            .sum();
        let got = element_weight(&interp, &kb, concept, el(x)).map_err(|e| e.to_string())?;
        let ExtendedReal::Finite(got) = got else {
            return Err(format!("W_{concept}({x}) is bottom"));
        };
        ensure(
            (got - want).abs() <= 1e-12 && (by_hand - want).abs() <= 1e-12,
            || format!("W_{concept}({x}) = {got}, by hand {by_hand}, expected {want}"),
        )?;
    }
    Ok("W_Bird = 120/100, W_Penguin = 30/120".into())
}

// 2
fn coherence_diagnosis() -> Result<String, String> {
    let kb = io::kb_from_json::<f64>(PENGUIN_KB).map_err(|e| e.to_string())?;
    let interp = io::interpretation_from_json::<f64>(EX3_INTERP).map_err(|e| e.to_string())?;
    let tol = Tol::default();
    let faithful =
        check_model(&interp, &kb, &CheckMode::Faithful, &tol).map_err(|e| e.to_string())?;
    ensure(faithful.ok, || {
        format!("faithful check failed: {:?}", faithful.violations)
    })?;
    let coherent =
        check_model(&interp, &kb, &CheckMode::Coherent, &tol).map_err(|e| e.to_string())?;
    let pairs: Vec<(String, String, String)> = coherent
        .violations
        .iter()
        .filter_map(|v| match v {
            ModelViolation::Preference { concept, x, y, .. } => {
                Some((concept.clone(), x.clone(), y.clone()))
            }
            _ => None,
        })
        .collect();
    let want = vec![(
        "Penguin".to_string(),
        "opus".to_string(),
        "reddy".to_string(),
    )];
    ensure(
        !coherent.ok && pairs == want && coherent.violations.len() == 1,
        || format!("coherent violations: {:?}", coherent.violations),
    )?;
    Ok("faithful, not coherent: (Penguin, opus, reddy)".into())
}

// 3
fn phi_coherent_kbs() -> Result<String, String> {
    let relu = Activation::ReluClamped;
    let logi = Activation::sigmoid();
    let mut r = rng(3);
    for k in 0..500 {
        for (phi, mode) in [(relu, CheckMode::Faithful), (logi, CheckMode::Coherent)] {
            let (kb, interp) = phi_coherent_kb(&mut r, &phi);
            let pc = check_model(&interp, &kb, &CheckMode::PhiCoherent(phi), &tight())
                .map_err(|e| e.to_string())?;
            ensure(pc.ok, || {
                format!("KB {k}: construction not phi-coherent under {phi}")
            })?;
            let rep = check_model(&interp, &kb, &mode, &tight()).map_err(|e| e.to_string())?;
            ensure(rep.ok, || {
                format!(
                    "KB {k} under {phi}: {} violations {:?}",
                    mode.name(),
                    rep.violations
                )
            })?;
        }
    }
    Ok("500 KBs: relu-clamped faithful 500/500, logistic coherent 500/500".into())
}

// 4
fn solver_labellings() -> Result<String, String> {
    let phi = Activation::sigmoid();
    let opts = Options {
        restarts: 4,
        rng_seed: 4,
        ..solver_opts()
    };
    let mut r = rng(4);
    let (mut converged, mut checked) = (0, 0);
    for k in 0..500 {
        let g = graph(&mut r, 8, 2.0, true);
        for run in enumerate_labellings(&g, &phi, &opts).map_err(|e| e.to_string())? {
            converged += 1;
            let s = &run.labelling;
            let chk =
                |m: &CheckMode<f64>| check_labelling(&g, s, m, &tight()).map_err(|e| e.to_string());
            if !chk(&CheckMode::PhiCoherent(phi))?.ok {
                continue;
            }
            checked += 1;
            for m in [CheckMode::Coherent, CheckMode::Faithful] {
                let rep = chk(&m)?;
                ensure(rep.ok, || {
                    format!(
                        "graph {k}: phi-coherent but not {}: {:?}",
                        m.name(),
                        rep.violations
                    )
                })?;
            }
        }
    }
    ensure(checked > 0 && checked == converged, || {
        format!("{checked} of {converged} converged labellings passed the phi-coherence check")
    })?;
    Ok(format!(
        "{checked} converged labellings on 500 graphs, all coherent and faithful"
    ))
}

// 5
fn mphi_equivalence() -> Result<String, String> {
    let phi = Activation::sigmoid();
    let method = mk_mphi(phi);
    let opts = Options {
        tol: 1e-12,
        ..Options::default()
    };
    let tol = Tol::default().with_deg(1e-8);
    let mut r = rng(5);
    let (mut weightings, mut labellings) = (0, 0);
    for k in 0..200 {
        let g = graph(&mut r, 8, 4.0, false);
        let deg = degree_of(&method, &g, &opts).map_err(|e| e.to_string())?;
        if deg.converged {
            weightings += 1;
            let rep = check_labelling(&g, &deg.weighting, &CheckMode::PhiCoherent(phi), &tol)
                .map_err(|e| e.to_string())?;
            ensure(rep.ok, || {
                format!(
                    "graph {k}: weighting not phi-coherent: {:?}",
                    rep.violations
                )
            })?;
        }
        let sol =
            solve_fixed_point(&g, &Sigma::sigma0(&g), &phi, &opts).map_err(|e| e.to_string())?;
        if sol.converged {
            labellings += 1;
            let res = method_residual(&method, &g, &sol.labelling).map_err(|e| e.to_string())?;
            ensure(res <= 1e-8, || {
                format!("graph {k}: one-step residual {res:e}")
            })?;
        }
    }
    ensure(weightings > 0 && labellings > 0, || {
        "nothing converged".into()
    })?;
    Ok(format!(
        "{weightings} weightings phi-coherent, {labellings} labellings fixed under M^phi"
    ))
}

// 6
fn labelling_models() -> Result<String, String> {
    let cases = [
        (Activation::logistic(2.0, 0.0).unwrap(), "coherent"),
        (Activation::ReluClamped, "faithful"),
    ];
    let opts = Options {
        restarts: 8,
        rng_seed: 6,
        ..solver_opts()
    };
    let mut r = rng(6);
    let mut summary = Vec::new();
    for (phi, which) in cases {
        let (mut passed, mut skipped) = (0, 0);
        for k in 0..200 {
            let g = graph(&mut r, 6, 2.0, false);
            let runs = enumerate_labellings(&g, &phi, &opts).map_err(|e| e.to_string())?;
            if runs.is_empty() {
                skipped += 1;
                continue;
            }
            let ls =
                LabellingSet::from_solutions(g, &runs, opts.rng_seed).map_err(|e| e.to_string())?;
            let rep = verify_proposition4(&ls, &phi, &tight()).map_err(|e| e.to_string())?;
            let model = if which == "coherent" {
                &rep.coherent
            } else {
                &rep.faithful
            };
            let ok = rep.precondition_ok && model.as_ref().is_some_and(|m| m.ok);
            ensure(ok, || {
                format!("{phi} graph {k}: {which} model check failed: {rep:?}")
            })?;
            passed += 1;
        }
        summary.push(format!(
            "{phi} {which} {passed}/{passed} ({skipped} without convergence)"
        ));
    }
    Ok(summary.join("; "))
}

fn corpus() -> Vec<(&'static str, Graph)> {
    let g = |args: &[(&str, f64)], edges: &[(&str, &str, f64)]| {
        let mut b = Graph::builder();
        for &(n, s) in args {
            b = b.argument(n, s);
        }
        for &(s, t, w) in edges {
            b = b.edge(s, t, w);
        }
        b.build().unwrap()
    };
    let biased_loop = |w: f64| {
        g(
            &[("bias", 1.0), ("a", 0.5)],
            &[("bias", "a", -w / 2.0), ("a", "a", w)],
        )
    };
    vec![
        ("bistable", io::graph_from_json(BISTABLE).unwrap().graph),
        ("self-loop +10", g(&[("a", 0.5)], &[("a", "a", 10.0)])),
        ("self-loop -3", g(&[("a", 0.5)], &[("a", "a", -3.0)])),
        ("self-loop -10", g(&[("a", 0.5)], &[("a", "a", -10.0)])),
        ("biased loop 8", biased_loop(8.0)),
        ("biased loop 6", biased_loop(6.0)),
        ("biased loop 3", biased_loop(3.0)),
        ("chain", g(&[("a", 0.7), ("b", 0.0)], &[("a", "b", 2.0)])),
        (
            "chain 3",
            g(
                &[("a", 0.7), ("b", 0.0), ("c", 0.0)],
                &[("a", "b", 1.5), ("b", "c", -2.0)],
            ),
        ),
        (
            "star",
            g(
                &[("s", 1.0), ("a", 0.0), ("b", 0.0), ("c", 0.0)],
                &[("s", "a", 1.0), ("s", "b", -1.0), ("s", "c", 0.5)],
            ),
        ),
        (
            "mutual support",
            g(
                &[("a", 0.5), ("b", 0.5)],
                &[("a", "b", 2.0), ("b", "a", 2.0)],
            ),
        ),
        (
            "mutual support, biased",
            g(
                &[("bias", 1.0), ("a", 0.5), ("b", 0.5)],
                &[
                    ("bias", "a", -4.0),
                    ("bias", "b", -4.0),
                    ("a", "b", 8.0),
                    ("b", "a", 8.0),
                ],
            ),
        ),
        (
            "mutual attack, biased",
            g(
                &[("bias", 1.0), ("a", 0.5), ("b", 0.5)],
                &[
                    ("bias", "a", 3.0),
                    ("bias", "b", 3.0),
                    ("a", "b", -6.0),
                    ("b", "a", -6.0),
                ],
            ),
        ),
        (
            "two bistable loops",
            g(
                &[("bias", 1.0), ("a", 0.5), ("b", 0.5)],
                &[
                    ("bias", "a", -5.0),
                    ("a", "a", 10.0),
                    ("bias", "b", -5.0),
                    ("b", "b", 10.0),
                ],
            ),
        ),
        (
            "support cycle",
            g(
                &[("a", 0.5), ("b", 0.5), ("c", 0.5)],
                &[("a", "b", 2.0), ("b", "c", 2.0), ("c", "a", 2.0)],
            ),
        ),
        (
            "attack cycle",
            g(
                &[("a", 0.5), ("b", 0.5), ("c", 0.5)],
                &[("a", "b", -3.0), ("b", "c", -3.0), ("c", "a", -3.0)],
            ),
        ),
        (
            "mixed 4-cycle",
            g(
                &[("a", 0.5), ("b", 0.5), ("c", 0.5), ("d", 0.5)],
                &[
                    ("a", "b", 4.0),
                    ("b", "c", -4.0),
                    ("c", "d", 4.0),
                    ("d", "a", -4.0),
                ],
            ),
        ),
        (
            "fan-in with loop",
            g(
                &[("x", 0.3), ("y", 0.8), ("z", 0.0)],
                &[("x", "z", 1.0), ("y", "z", -1.0), ("z", "z", 0.5)],
            ),
        ),
        (
            "loop feeding chain",
            g(
                &[("bias", 1.0), ("a", 0.5), ("b", 0.5), ("c", 0.5)],
                &[
                    ("bias", "a", -3.5),
                    ("a", "a", 7.0),
                    ("a", "b", 3.0),
                    ("b", "c", -2.0),
                ],
            ),
        ),
        (
            "dense",
            g(
                &[("a", 0.2), ("b", 0.4), ("c", 0.6), ("d", 0.8)],
                &[
                    ("a", "b", 1.0),
                    ("b", "c", -1.5),
                    ("c", "d", 2.0),
                    ("d", "a", -0.5),
                    ("a", "c", 0.7),
                    ("b", "d", -0.3),
                    ("d", "b", 1.2),
                ],
            ),
        ),
    ]
}

// 7
fn oracle_agreement() -> Result<String, String> {
    let phi = Activation::sigmoid();
    let damping = 0.5;
    let opts = Options {
        tol: 1e-12,
        max_iters: 20_000,
        damping,
        restarts: 64,
        rng_seed: 7,
        dedupe_tol: 1e-6,
    };
    let corpus = corpus();
    let (mut found, mut unstable) = (0, 0);
    for (name, g) in &corpus {
        let runs = enumerate_labellings(g, &phi, &opts).map_err(|e| e.to_string())?;
        let points = grid_oracle(g, &phi, 1.0 / 32.0, 0.2).map_err(|e| e.to_string())?;
        let near = |a: &Sigma, b: &Sigma| a.max_distance(b) <= 1e-4;
        for r in &runs {
            ensure(
                points.iter().any(|p| near(&p.labelling, &r.labelling)),
                || {
                    format!(
                        "{name}: solver labelling {:?} missing from the oracle",
                        r.labelling.values()
                    )
                },
            )?;
        }
        for p in &points {
            if p.attracting(damping) {
                ensure(
                    runs.iter().any(|r| near(&p.labelling, &r.labelling)),
                    || {
                        format!(
                            "{name}: attracting fixed point {:?} not found by the solver",
                            p.labelling.values()
                        )
                    },
                )?;
            } else {
                unstable += 1;
            }
        }
        found += runs.len();
    }
    Ok(format!(
        "{} graphs, {found} attracting fixed points matched, {unstable} unstable oracle points",
        corpus.len()
    ))
}

// 8
fn jogging() -> Result<String, String> {
    let doc = io::graph_from_json::<f64>(JOGGING).map_err(|e| e.to_string())?;
    let kb = graph_to_kb(&doc.graph);
    let incs = kb
        .conditionals
        .get("jogging")
        .ok_or("no conditionals for jogging")?;
    let bodies: Vec<(String, f64)> = incs
        .iter()
        .map(|i| (i.body.to_string(), i.weight))
        .collect();
    let want = [
        (ConceptExpr::atom("hot"), -0.8),
        (ConceptExpr::atom("rain"), -0.5),
        (
            ConceptExpr::and(ConceptExpr::atom("hot"), ConceptExpr::atom("rain")),
            0.2,
        ),
    ];
    ensure(kb.conditionals.len() == 1 && incs.len() == 3, || {
        format!("conditionals: {bodies:?}")
    })?;
    for (inc, (body, w)) in incs.iter().zip(&want) {
        ensure(&inc.body == body && inc.weight == *w, || {
            format!("conditionals: {bodies:?}")
        })?;
    }
    let phi = Activation::logistic(1.0, 0.0).unwrap();
    let sigma = forward_acyclic(&doc.graph, &phi).map_err(|e| e.to_string())?;
    let got = sigma.get(doc.graph.index_of("jogging").unwrap());
    let closed = 1.0 / (1.0 + 1.1f64.exp());
    ensure((got - closed).abs() <= 1e-9, || {
        format!("sigma(jogging) = {got}, closed form {closed}")
    })?;
    Ok(format!("3 conditionals; sigma(jogging) = {got:.12}"))
}

// 9
fn mlp_stationarity() -> Result<String, String> {
    let mut r = rng(9);
    for k in 0..50 {
        let (m, layers) = feedforward(&mut r);
        let state = forward_pass(&m, &[]).map_err(|e| e.to_string())?;

        // independent layer-by-layer evaluation
        let mut value: std::collections::HashMap<&str, f64> = m.input_values().collect();
        let biases: std::collections::HashMap<&str, f64> = m.biases().collect();
        for layer in &layers[1..] {
            for u in layer {
                let id = m.units().iter().position(|x| x == u).unwrap();
                let sum: f64 = m
                    .synapses()
                    .iter()
                    .filter(|s| s.to == id)
                    .map(|s| s.weight * value[m.units()[s.from].as_str()])
                    .sum::<f64>()
                    + biases.get(u.as_str()).copied().unwrap_or(0.0);
                value.insert(u, m.phi().apply(sum));
            }
        }
        for (u, v) in &value {
            let got = state
                .get(u)
                .ok_or_else(|| format!("net {k}: no state for {u}"))?;
            ensure((got - v).abs() <= 1e-12, || {
                format!("net {k}: {u} = {got}, recomputed {v}")
            })?;
        }

        let rep = check_stationary(&m, &state, 1e-9).map_err(|e| e.to_string())?;
        ensure(rep.ok, || {
            format!("net {k}: not stationary: {:?}", rep.violations)
        })?;

        let kb = mlp_to_kb(&m);
        let mut interp = Interpretation::new(vec!["x".into()]).map_err(|e| e.to_string())?;
        for atom in &kb.atoms {
            let v = state.get(atom).unwrap_or(1.0);
            interp
                .set_atom(atom.clone(), vec![v])
                .map_err(|e| e.to_string())?;
        }
        for mode in [CheckMode::Coherent, CheckMode::PhiCoherent(*m.phi())] {
            let rep =
                check_model(&interp, &kb, &mode, &Tol::default()).map_err(|e| e.to_string())?;
            ensure(rep.ok, || {
                format!(
                    "net {k}: one-element model not {}: {:?}",
                    mode.name(),
                    rep.violations
                )
            })?;
        }
    }
    Ok("50 networks stationary; one-element models coherent".into())
}

// 10
fn neutrality() -> Result<String, String> {
    let g = Graph::builder()
        .argument("a", 0.9)
        .argument("b", 0.4)
        .build()
        .map_err(|e| e.to_string())?;
    let method = mk_mphi(Activation::sigmoid());
    let rep = check_gradual_property(
        &g,
        &method,
        GradualProperty::NeutralityWitness,
        &Options::default(),
    )
    .map_err(|e| e.to_string())?;
    let w = rep.witness.as_ref().ok_or("no witness")?;
    ensure(rep.outcome == Outcome::Violated, || {
        format!("outcome {:?}", rep.outcome)
    })?;

    // the same construction by hand: b supports a with weight 0
    let zero = g
        .to_builder()
        .edge("b", "a", 0.0)
        .build()
        .map_err(|e| e.to_string())?;
    let by_hand = degree_of(&method, &zero, &Options::default()).map_err(|e| e.to_string())?;
    let phi0 = logistic(0.0);
    let gap = (w.with_zero_edge - w.without_edge).abs();
    ensure(
        (w.with_zero_edge - phi0).abs() <= 1e-12
            && (by_hand.weighting.get(0) - phi0).abs() <= 1e-12
            && (w.without_edge - 0.9).abs() <= 1e-12
            && (gap - 0.4).abs() <= 1e-12,
        || format!("witness {w:?}, by hand {}", by_hand.weighting.get(0)),
    )?;
    Ok(format!(
        "Deg(a) = {} with the zero edge, {} without; gap {gap:.3}",
        w.with_zero_edge, w.without_edge
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, Check); 10] = [
        (
            "penguin element weights",
            Duration::from_secs(1),
            penguin_weights,
        ),
        (
            "coherence diagnosis",
            Duration::from_secs(1),
            coherence_diagnosis,
        ),
        (
            "phi-coherent KBs are faithful and coherent",
            Duration::from_secs(30),
            phi_coherent_kbs,
        ),
        (
            "solver labellings are coherent",
            Duration::from_secs(60),
            solver_labellings,
        ),
        (
            "M^phi weightings are phi-coherent",
            Duration::from_secs(60),
            mphi_equivalence,
        ),
        (
            "labelling models satisfy the graph KB",
            Duration::from_secs(120),
            labelling_models,
        ),
        (
            "oracle agreement",
            Duration::from_secs(120),
            oracle_agreement,
        ),
        ("jogging pipeline", Duration::from_secs(1), jogging),
        (
            "mlp stationarity",
            Duration::from_secs(30),
            mlp_stationarity,
        ),
        (
            "neutrality failure witness",
            Duration::from_secs(1),
            neutrality,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d.clone()),
            Err(e) => {
                failed += 1;
                ("FAIL", e.clone())
            }
        };
        println!(
            "{tag} {:>2} {name} [{elapsed:.2?}/{limit:?}]: {detail}",
            i + 1
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
