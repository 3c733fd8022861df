//! `gradarg`: batch front-end for the fuzzy conditional and gradual
//! argumentation toolkit. Reads JSON documents, writes JSON reports (or
//! tables with `--pretty`).
//!
//! Exit status: 0 on success, 1 when a check fails (violations, no
//! convergence, a query that does not hold), 2 on usage or input errors.

mod render;

use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gradarg_core::gradual::{check_gradual_property, degree_of, mk_mphi, GradualProperty};
use gradarg_core::io::{self, GraphDoc};
use gradarg_core::kb::{element_weight, ConceptExpr};
use gradarg_core::prefmodel::{
    answer_query, build_model, parse_query, verify_proposition4, LabellingSet,
};
use gradarg_core::solver::{
    self, enumerate_labellings, forward_acyclic, grid_oracle, solve_fixed_point,
};
use gradarg_core::{
    check_labelling, check_model, graph_to_kb, mlp_to_graph, mlp_to_kb, Activation, CheckMode,
    Error, FuzzyLogic, Graph, Labelling, Options, SolveResult, Tol,
};

#[derive(Parser)]
#[command(
    name = "gradarg",
    version,
    about = "Fuzzy conditional KBs and gradual argumentation"
)]
struct Cli {
    /// Render reports as text tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one phi-coherent labelling of a graph.
    Solve {
        #[arg(long)]
        graph: String,
        #[command(flatten)]
        phi: PhiArg,
        /// Start labelling (default: sigma0).
        #[arg(long)]
        start: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Find distinct phi-coherent labellings from random restarts.
    Enumerate {
        #[arg(long)]
        graph: String,
        #[command(flatten)]
        phi: PhiArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        dedupe_tol: f64,
        /// Also check that the labellings form a coherent/faithful model of
        /// the graph's conditional KB.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Check a labelling for coherence, faithfulness or phi-coherence.
    CheckLabelling {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        labelling: String,
        #[arg(long, value_enum)]
        mode: Mode,
        #[command(flatten)]
        phi: PhiArg,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Check an interpretation against a weighted KB.
    CheckModel {
        #[arg(long)]
        kb: String,
        #[arg(long)]
        interp: String,
        #[arg(long, value_enum)]
        mode: Mode,
        #[command(flatten)]
        phi: PhiArg,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Degrees under M^phi and checks of gradual-semantics properties.
    Gradual {
        #[arg(long)]
        graph: String,
        #[command(flatten)]
        phi: PhiArg,
        /// Comma-separated: anonymity, independence, directionality,
        /// equivalence, maximality, neutrality-witness (default: all).
        #[arg(long, value_delimiter = ',')]
        check: Vec<String>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Convert between networks, graphs and conditional KBs.
    Translate {
        #[arg(long, value_enum)]
        from: Source,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long = "in")]
        input: String,
    },
    /// Ask a conditional query over the model built from a labelling set.
    Query {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        labellings: String,
        /// e.g. "T(A1) => A2 > 0.7"
        #[arg(long)]
        query: String,
        #[arg(long, default_value = "goedel")]
        logic: String,
    },
    /// Brute-force grid search for all fixed points of a tiny graph.
    Oracle {
        #[arg(long)]
        graph: String,
        #[command(flatten)]
        phi: PhiArg,
        /// Grid cells per axis: 16, 32 or 64.
        #[arg(long, default_value_t = 32)]
        cells: u32,
        /// Residual threshold for grid points worth polishing.
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        /// Damping used to classify points as attracting.
        #[arg(long, default_value_t = 1.0)]
        damping: f64,
    },
}

#[derive(Args)]
struct PhiArg {
    /// logistic:<gain>:<offset> | relu-clamped | ramp:<lo>:<hi>
    /// (default: the graph's own, else logistic:1:0).
    #[arg(long)]
    phi: Option<String>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    damping: f64,
}

#[derive(Args)]
struct TolArgs {
    /// Equality tolerance on degrees.
    #[arg(long, default_value_t = 1e-9)]
    eps_deg: f64,
    /// Equality tolerance on weights.
    #[arg(long, default_value_t = 1e-7)]
    eps_w: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Forward evaluation on acyclic graphs, iteration otherwise.
    Auto,
    Iterate,
    Forward,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Coherent,
    Faithful,
    PhiCoherent,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Graph,
    Mlp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Kb,
    Graph,
}

/// A finished command: its report and whether it succeeded.
struct Outcome {
    report: Value,
    ok: bool,
}

fn read(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(Path::new(path))
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{path}: {e}"))))
    }
}

fn load_graph(path: &str) -> Result<GraphDoc<f64>, Error> {
    io::graph_from_json(&read(path)?)
}

fn pick_phi(flag: &PhiArg, doc: Option<&Activation<f64>>) -> Result<Activation<f64>, Error> {
    match &flag.phi {
        Some(s) => s.parse(),
        None => Ok(doc.copied().unwrap_or_else(Activation::sigmoid)),
    }
}

fn options(s: &SolverArgs) -> Options {
    Options {
        tol: s.tol,
        max_iters: s.max_iters,
        damping: s.damping,
        ..Options::default()
    }
}

fn tolerance(t: &TolArgs) -> Tol {
    Tol::new(t.eps_deg, t.eps_w)
}

fn mode(m: Mode, phi: Activation<f64>) -> CheckMode<f64> {
    match m {
        Mode::Coherent => CheckMode::Coherent,
        Mode::Faithful => CheckMode::Faithful,
        Mode::PhiCoherent => CheckMode::PhiCoherent(phi),
    }
}

fn with_format(mut v: Value) -> Value {
    if let Value::Object(o) = &mut v {
        let mut out = serde_json::Map::new();
        out.insert("format".into(), json!(io::FORMAT));
        out.append(o);
        return Value::Object(out);
    }
    v
}

fn to_value<S: serde::Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("report serializes")
}

fn solve(
    graph: &str,
    phi: &PhiArg,
    start: Option<&str>,
    method: Method,
    s: &SolverArgs,
) -> Result<Outcome, Error> {
    let doc = load_graph(graph)?;
    let g = &doc.graph;
    let phi = pick_phi(phi, doc.phi.as_ref())?;
    let opts = options(s);
    let acyclic = solver::topological_order(g).is_ok();
    let forward = match method {
        Method::Forward => true,
        Method::Iterate => false,
        Method::Auto => acyclic && start.is_none(),
    };
    let result = if forward {
        let labelling = forward_acyclic(g, &phi)?;
        SolveResult {
            residual: solver::residual(g, &labelling, &phi),
            labelling,
            iterations: 0,
            converged: true,
            restart: 0,
        }
    } else {
        let start = match start {
            Some(p) => io::labelling_from_json(g, &read(p)?)?,
            None => Labelling::sigma0(g),
        };
        solve_fixed_point(g, &start, &phi, &opts)?
    };
    let ok = result.converged;
    let mut report = io::solve_result_to_json(g, &result);
    report["method"] = json!(if forward { "forward" } else { "iterate" });
    Ok(Outcome { report, ok })
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    graph: &str,
    phi: &PhiArg,
    s: &SolverArgs,
    restarts: usize,
    seed: u64,
    dedupe_tol: f64,
    verify: bool,
    tol: &TolArgs,
) -> Result<Outcome, Error> {
    let doc = load_graph(graph)?;
    let phi = pick_phi(phi, doc.phi.as_ref())?;
    let opts = Options {
        restarts,
        rng_seed: seed,
        dedupe_tol,
        ..options(s)
    };
    let runs = enumerate_labellings(&doc.graph, &phi, &opts)?;
    if runs.is_empty() {
        return Ok(Outcome {
            report: json!({"format": io::FORMAT, "labellings": [], "count": 0}),
            ok: false,
        });
    }
    let set = LabellingSet::from_solutions(doc.graph, &runs, seed)?;
    let mut report = io::labelling_set_to_json(&set);
    report["count"] = json!(set.len());
    let mut ok = true;
    if verify {
        let r = verify_proposition4(&set, &phi, &tolerance(tol))?;
        ok = r.ok;
        report["verification"] = to_value(&r);
    }
    Ok(Outcome { report, ok })
}

fn check_labelling_cmd(
    graph: &str,
    labelling: &str,
    m: Mode,
    phi: &PhiArg,
    tol: &TolArgs,
) -> Result<Outcome, Error> {
    let doc = load_graph(graph)?;
    let phi = pick_phi(phi, doc.phi.as_ref())?;
    let sigma = io::labelling_from_json(&doc.graph, &read(labelling)?)?;
    let r = check_labelling(&doc.graph, &sigma, &mode(m, phi), &tolerance(tol))?;
    Ok(Outcome {
        ok: r.ok,
        report: with_format(to_value(&r)),
    })
}

fn check_model_cmd(
    kb: &str,
    interp: &str,
    m: Mode,
    phi: &PhiArg,
    tol: &TolArgs,
) -> Result<Outcome, Error> {
    let kb = io::kb_from_json::<f64>(&read(kb)?)?;
    let interp = io::interpretation_from_json::<f64>(&read(interp)?)?;
    let phi = pick_phi(phi, None)?;
    let r = check_model(&interp, &kb, &mode(m, phi), &tolerance(tol))?;
    let mut report = with_format(to_value(&r));
    // per distinguished concept: elements by decreasing degree, with weights
    let mut prefs = serde_json::Map::new();
    for subject in kb.distinguished() {
        let degrees = interp.eval_all(kb.logic, &ConceptExpr::atom(subject))?;
        let mut order: Vec<usize> = (0..interp.len()).collect();
        order.sort_by(|&a, &b| degrees[b].total_cmp(&degrees[a]));
        let rows = order
            .into_iter()
            .map(|x| {
                Ok(json!({
                    "element": interp.domain()[x],
                    "degree": degrees[x],
                    "weight": to_value(&element_weight(&interp, &kb, subject, x)?),
                }))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        prefs.insert(subject.to_string(), Value::Array(rows));
    }
    report["preferences"] = Value::Object(prefs);
    Ok(Outcome { report, ok: r.ok })
}

fn gradual_cmd(
    graph: &str,
    phi: &PhiArg,
    checks: &[String],
    s: &SolverArgs,
) -> Result<Outcome, Error> {
    let doc = load_graph(graph)?;
    let phi = pick_phi(phi, doc.phi.as_ref())?;
    let method = mk_mphi(phi);
    let opts = options(s);
    let props: Vec<GradualProperty> = if checks.is_empty() {
        GradualProperty::ALL.to_vec()
    } else {
        checks.iter().map(|c| c.parse()).collect::<Result<_, _>>()?
    };
    let deg = degree_of(&method, &doc.graph, &opts)?;
    let reports = props
        .iter()
        .map(|&p| check_gradual_property(&doc.graph, &method, p, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let ok = deg.converged && reports.iter().all(|r| r.ok);
    let degrees: serde_json::Map<String, Value> = deg
        .weighting
        .named(&doc.graph)
        .map(|(n, v)| (n.to_string(), json!(v)))
        .collect();
    Ok(Outcome {
        ok,
        report: json!({
            "format": io::FORMAT,
            "ok": ok,
            "degrees": degrees,
            "converged": deg.converged,
            "residual": deg.residual,
            "iterations": deg.iterations,
            "properties": to_value(&reports),
        }),
    })
}

fn translate(from: Source, to: Target, input: &str) -> Result<Outcome, Error> {
    let text = read(input)?;
    let report = match (from, to) {
        (Source::Graph, Target::Kb) => {
            io::kb_to_json(&graph_to_kb(&io::graph_from_json::<f64>(&text)?.graph))
        }
        (Source::Mlp, Target::Kb) => io::kb_to_json(&mlp_to_kb(&io::mlp_from_json::<f64>(&text)?)),
        (Source::Mlp, Target::Graph) => {
            let mlp = io::mlp_from_json::<f64>(&text)?;
            io::graph_to_json(&mlp_to_graph(&mlp)?, Some(mlp.phi()))
        }
        (Source::Graph, Target::Graph) => {
            let doc = io::graph_from_json::<f64>(&text)?;
            io::graph_to_json(&doc.graph, doc.phi.as_ref())
        }
    };
    Ok(Outcome { report, ok: true })
}

fn query_cmd(graph: &str, labellings: &str, query: &str, logic: &str) -> Result<Outcome, Error> {
    let doc = load_graph(graph)?;
    let set = io::labelling_set_from_json(doc.graph, &read(labellings)?)?;
    let logic: FuzzyLogic = logic.parse()?;
    let q = parse_query::<f64>(query)?;
    let interp = build_model(&set)?;
    let a = answer_query(&interp, &q, logic)?;
    let mut report = with_format(to_value(&a));
    report["query"] = json!(query);
    Ok(Outcome {
        ok: a.holds,
        report,
    })
}

fn oracle_cmd(
    graph: &str,
    phi: &PhiArg,
    cells: u32,
    eps: f64,
    damping: f64,
) -> Result<Outcome, Error> {
    let doc = load_graph(graph)?;
    let g: &Graph = &doc.graph;
    let phi = pick_phi(phi, doc.phi.as_ref())?;
    let points = grid_oracle(g, &phi, 1.0 / f64::from(cells), eps)?;
    let rows: Vec<Value> = points
        .iter()
        .map(|p| {
            let sigma: serde_json::Map<String, Value> =
                p.labelling.named(g).map(|(n, v)| (n.to_string(), json!(v))).collect();
            json!({
                "sigma": sigma,
                "residual": p.residual,
                "attracting": p.attracting(damping),
                "eigenvalues": p.eigenvalues.iter().map(|(re, im)| json!({"re": re, "im": im})).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(Outcome {
        ok: true,
        report: json!({"format": io::FORMAT, "count": rows.len(), "points": rows}),
    })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Solve {
            graph,
            phi,
            start,
            method,
            solver,
        } => solve(graph, phi, start.as_deref(), *method, solver),
        Command::Enumerate {
            graph,
            phi,
            solver,
            restarts,
            seed,
            dedupe_tol,
            verify,
            tol,
        } => enumerate(
            graph,
            phi,
            solver,
            *restarts,
            *seed,
            *dedupe_tol,
            *verify,
            tol,
        ),
        Command::CheckLabelling {
            graph,
            labelling,
            mode,
            phi,
            tol,
        } => check_labelling_cmd(graph, labelling, *mode, phi, tol),
        Command::CheckModel {
            kb,
            interp,
            mode,
            phi,
            tol,
        } => check_model_cmd(kb, interp, *mode, phi, tol),
        Command::Gradual {
            graph,
            phi,
            check,
            solver,
        } => gradual_cmd(graph, phi, check, solver),
        Command::Translate { from, to, input } => translate(*from, *to, input),
        Command::Query {
            graph,
            labellings,
            query,
            logic,
        } => query_cmd(graph, labellings, query, logic),
        Command::Oracle {
            graph,
            phi,
            cells,
            eps,
            damping,
        } => oracle_cmd(graph, phi, *cells, *eps, *damping),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.pretty {
                print!("{}", render::render(&out.report));
            } else {
                println!("{}", out.report);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("gradarg: {e}");
            ExitCode::from(2)
        }
    }
}
