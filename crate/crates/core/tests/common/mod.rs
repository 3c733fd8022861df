//! Seeded generators and small fixtures shared by the integration tests.
#![allow(dead_code)]

use gradarg_core::io;
use gradarg_core::kb::make_phi_coherent;
use gradarg_core::{
    Activation, ArgExpr, ConceptExpr, FuzzyLogic, Graph, Interpretation, Kb, Mlp, Tol,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PENGUIN_KB: &str = include_str!("../../../../data/penguin.json");
pub const PENGUIN_INTERP: &str = include_str!("../../../../data/penguin_interp.json");
pub const EX3_INTERP: &str = include_str!("../../../../data/ex3.json");
pub const UNFAITHFUL_INTERP: &str = include_str!("../../../../data/penguin_unfaithful.json");
pub const JOGGING: &str = include_str!("../../../../data/jogging.json");
pub const BISTABLE: &str = include_str!("../../../../data/bistable.json");

/// Tolerances for checks on solver output (see the property suites).
pub fn tight() -> Tol {
    Tol::new(1e-10, 5e-11)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn penguin() -> (Kb, Interpretation) {
    (
        io::kb_from_json(PENGUIN_KB).unwrap(),
        io::interpretation_from_json(PENGUIN_INTERP).unwrap(),
    )
}

pub fn any_logic(r: &mut impl Rng) -> FuzzyLogic {
    *FuzzyLogic::ALL.choose(r).unwrap()
}

fn concept(r: &mut impl Rng, pool: &[String], depth: u32) -> ConceptExpr {
    let leaf = |r: &mut dyn rand::RngCore| ConceptExpr::atom(pool.choose(r).unwrap().as_str());
    if depth == 0 || r.random_bool(0.5) {
        return leaf(r);
    }
    match r.random_range(0..3) {
        0 => ConceptExpr::not(concept(r, pool, depth - 1)),
        1 => ConceptExpr::and(concept(r, pool, depth - 1), concept(r, pool, depth - 1)),
        _ => ConceptExpr::or(concept(r, pool, depth - 1), concept(r, pool, depth - 1)),
    }
}

/// Random KB (2..=6 atoms, 1..=4 conditionals per subject) with an
/// interpretation made phi-coherent. Subject `i` only mentions atoms that
/// are not subjects or are earlier subjects, so one pass of
/// `make_phi_coherent` suffices.
pub fn phi_coherent_kb(r: &mut impl Rng, phi: &Activation<f64>) -> (Kb, Interpretation) {
    let n_atoms = r.random_range(2..=6);
    let atoms: Vec<String> = (0..n_atoms).map(|i| format!("C{i}")).collect();
    let mut kb = Kb::new(any_logic(r));
    for a in &atoms {
        kb.declare_atom(a.clone());
    }
    let mut subjects = Vec::new();
    for i in 1..n_atoms {
        if subjects.is_empty() || r.random_bool(0.5) {
            subjects.push(i);
        }
    }
    for &s in &subjects {
        let pool: Vec<String> = (0..n_atoms)
            .filter(|&j| j != s && (!subjects.contains(&j) || j < s))
            .map(|j| atoms[j].clone())
            .collect();
        for _ in 0..r.random_range(1..=4) {
            let body = concept(r, &pool, 2);
            kb.add_conditional(atoms[s].clone(), body, r.random_range(-2.0..=2.0));
        }
    }
    let size = r.random_range(1..=6);
    let mut interp = Interpretation::new((0..size).map(|k| format!("e{k}")).collect()).unwrap();
    for a in &atoms {
        let row = (0..size).map(|_| r.random_range(0.0..=1.0)).collect();
        interp.set_atom(a.clone(), row).unwrap();
    }
    make_phi_coherent(&mut interp, &kb, phi).unwrap();
    (kb, interp)
}

/// Random graph with 1..=`max_args` arguments. About a third are sources
/// without incoming edges; every other argument gets 1..=3 incoming edges
/// (self-loops allowed) with weights in `[-w, w]`. With `boolean`, some
/// edge sources are compound expressions.
pub fn graph(r: &mut impl Rng, max_args: usize, w: f64, boolean: bool) -> Graph {
    let n = r.random_range(1..=max_args);
    let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
    let mut b = Graph::builder().logic(any_logic(r));
    for name in &names {
        b = b.argument(name.clone(), r.random_range(0.0..=1.0));
    }
    for (t, target) in names.iter().enumerate() {
        if t > 0 && r.random_bool(0.3) {
            continue;
        }
        for _ in 0..r.random_range(1..=3) {
            let weight = r.random_range(-w..=w);
            let src = if boolean && r.random_bool(0.2) {
                let x = ArgExpr::named(names.choose(r).unwrap().clone());
                let y = ArgExpr::named(names.choose(r).unwrap().clone());
                match r.random_range(0..3) {
                    0 => ArgExpr::not(x),
                    1 => ArgExpr::and(x, y),
                    _ => ArgExpr::or(x, y),
                }
            } else {
                ArgExpr::named(names.choose(r).unwrap().clone())
            };
            b = b.edge_expr(src, target.clone(), weight);
        }
    }
    b.build().unwrap()
}

/// Layered feedforward network: an input layer followed by `1..=2` fully
/// connected layers of 1..=6 units each, random weights and biases, and
/// random input values.
pub fn feedforward(r: &mut impl Rng) -> (Mlp, Vec<Vec<String>>) {
    let depth = r.random_range(2..=3);
    let layers: Vec<Vec<String>> = (0..depth)
        .map(|l| {
            (0..r.random_range(1..=6))
                .map(|k| format!("u{l}_{k}"))
                .collect()
        })
        .collect();
    let gain = r.random_range(0.5..=2.0);
    let phi = Activation::logistic(gain, r.random_range(-0.5..=0.5)).unwrap();
    let mut m = Mlp::new(layers.concat(), phi).unwrap();
    for u in &layers[0] {
        m.mark_input(u).unwrap();
        m.set_input_value(u, r.random_range(0.0..=1.0)).unwrap();
    }
    for pair in layers.windows(2) {
        for to in &pair[1] {
            for from in &pair[0] {
                m.add_synapse(from, to, r.random_range(-3.0..=3.0)).unwrap();
            }
            if r.random_bool(0.7) {
                m.set_bias(to, r.random_range(-1.0..=1.0)).unwrap();
            }
        }
    }
    (m, layers)
}
