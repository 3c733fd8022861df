//! Translations between multilayer perceptrons, argumentation graphs and
//! weighted conditional knowledge bases, and certification of stationary
//! network states.
//!
//! A bias `b_i` becomes an explicit synapse from a constant unit: the graph
//! gets an argument [`BIAS`] with σ₀ = 1 and an edge of weight `b_i` into
//! unit `i`.

use indexmap::IndexMap;
use serde::Serialize;

use crate::arggraph::{check_labelling, ArgExpr, ArgGraph, Labelling, LabellingViolation};
use crate::error::{Error, Result};
use crate::fuzzy::{Activation, CheckMode, FuzzyLogic};
use crate::kb::{ConceptExpr, WeightedKB};
use crate::scalar::{Scalar, Tolerance};
use crate::solver::forward_acyclic;

/// Name of the constant unit that carries biases.
pub const BIAS: &str = "__bias";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Synapse<T> {
    pub from: usize,
    pub to: usize,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<T> {
    units: Vec<String>,
    inputs: Vec<bool>,
    synapses: Vec<Synapse<T>>,
    biases: IndexMap<usize, T>,
    phi: Activation<T>,
    overrides: IndexMap<usize, Activation<T>>,
    input_values: IndexMap<usize, T>,
}

impl<T: Scalar> MlpModel<T> {
    pub fn new(units: Vec<String>, phi: Activation<T>) -> Result<Self> {
        for (i, u) in units.iter().enumerate() {
            if units[..i].contains(u) {
                return Err(Error::schema(format!("duplicate unit `{u}`")));
            }
            if u == BIAS {
                return Err(Error::schema(format!(
                    "unit name `{BIAS}` is reserved for biases"
                )));
            }
        }
        Ok(MlpModel {
            inputs: vec![false; units.len()],
            units,
            synapses: Vec::new(),
            biases: IndexMap::new(),
            phi,
            overrides: IndexMap::new(),
            input_values: IndexMap::new(),
        })
    }

    fn unit(&self, name: &str) -> Result<usize> {
        self.units
            .iter()
            .position(|u| u == name)
            .ok_or_else(|| Error::schema(format!("undeclared unit `{name}`")))
    }

    pub fn mark_input(&mut self, name: &str) -> Result<&mut Self> {
        let u = self.unit(name)?;
        if self.synapses.iter().any(|s| s.to == u) || self.biases.contains_key(&u) {
            return Err(Error::schema(format!(
                "input unit `{name}` has incoming synapses"
            )));
        }
        self.inputs[u] = true;
        Ok(self)
    }

    pub fn add_synapse(&mut self, from: &str, to: &str, weight: T) -> Result<&mut Self> {
        let (f, t) = (self.unit(from)?, self.unit(to)?);
        if self.inputs[t] {
            return Err(Error::schema(format!("synapse into input unit `{to}`")));
        }
        if !weight.is_finite() {
            return Err(Error::schema(format!(
                "non-finite weight on synapse {from} -> {to}"
            )));
        }
        self.synapses.push(Synapse {
            from: f,
            to: t,
            weight,
        });
        Ok(self)
    }

    pub fn set_bias(&mut self, unit: &str, bias: T) -> Result<&mut Self> {
        let u = self.unit(unit)?;
        if self.inputs[u] {
            return Err(Error::schema(format!("bias on input unit `{unit}`")));
        }
        if !bias.is_finite() {
            return Err(Error::schema(format!("non-finite bias on `{unit}`")));
        }
        self.biases.insert(u, bias);
        Ok(self)
    }

    pub fn set_activation(&mut self, unit: &str, phi: Activation<T>) -> Result<&mut Self> {
        let u = self.unit(unit)?;
        self.overrides.insert(u, phi);
        Ok(self)
    }

    /// Initial activation of an input unit; defaults to 0.
    pub fn set_input_value(&mut self, unit: &str, value: T) -> Result<&mut Self> {
        let u = self.unit(unit)?;
        if !(T::zero()..=T::one()).contains(&value) {
            return Err(Error::InvalidDegree(value.as_f64()));
        }
        self.input_values.insert(u, value);
        Ok(self)
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn input_units(&self) -> impl Iterator<Item = &str> {
        self.units
            .iter()
            .zip(&self.inputs)
            .filter(|(_, &i)| i)
            .map(|(u, _)| u.as_str())
    }

    pub fn synapses(&self) -> &[Synapse<T>] {
        &self.synapses
    }

    pub fn biases(&self) -> impl Iterator<Item = (&str, T)> {
        self.biases
            .iter()
            .map(|(&u, &b)| (self.units[u].as_str(), b))
    }

    pub fn phi(&self) -> &Activation<T> {
        &self.phi
    }

    pub fn activation_of(&self, unit: &str) -> Option<&Activation<T>> {
        let u = self.units.iter().position(|x| x == unit)?;
        Some(self.overrides.get(&u).unwrap_or(&self.phi))
    }

    pub fn activation_overrides(&self) -> impl Iterator<Item = (&str, &Activation<T>)> {
        self.overrides
            .iter()
            .map(|(&u, a)| (self.units[u].as_str(), a))
    }

    pub fn input_values(&self) -> impl Iterator<Item = (&str, T)> {
        self.input_values
            .iter()
            .map(|(&u, &v)| (self.units[u].as_str(), v))
    }
}

/// Activation value of every unit.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NetworkState<T> {
    pub values: IndexMap<String, T>,
}

impl<T: Scalar> NetworkState<T> {
    pub fn new(values: IndexMap<String, T>) -> Result<Self> {
        if let Some((_, v)) = values
            .iter()
            .find(|(_, v)| !(T::zero()..=T::one()).contains(*v))
        {
            return Err(Error::InvalidDegree(v.as_f64()));
        }
        Ok(NetworkState { values })
    }

    /// The unit values of a labelling of `mlp_to_graph(mlp)`.
    pub fn from_labelling(
        mlp: &MlpModel<T>,
        graph: &ArgGraph<T>,
        labelling: &Labelling<T>,
    ) -> Self {
        let values = mlp
            .units
            .iter()
            .map(|u| {
                (
                    u.clone(),
                    labelling.get(graph.index_of(u).expect("unit argument")),
                )
            })
            .collect();
        NetworkState { values }
    }

    pub fn get(&self, unit: &str) -> Option<T> {
        self.values.get(unit).copied()
    }
}

/// One argument per unit, one edge per synapse, plus [`BIAS`] (σ₀ = 1) and
/// its edges when the network has biases. Input units start at their
/// configured value, other units at 0.
pub fn mlp_to_graph<T: Scalar>(mlp: &MlpModel<T>) -> Result<ArgGraph<T>> {
    let mut b = ArgGraph::builder();
    for (u, name) in mlp.units.iter().enumerate() {
        b = b.argument(
            name.clone(),
            mlp.input_values.get(&u).copied().unwrap_or_else(T::zero),
        );
    }
    if !mlp.biases.is_empty() {
        b = b.argument(BIAS, T::one());
    }
    for s in &mlp.synapses {
        b = b.edge(mlp.units[s.from].clone(), mlp.units[s.to].clone(), s.weight);
    }
    for (&u, &bias) in &mlp.biases {
        b = b.edge(BIAS, mlp.units[u].clone(), bias);
    }
    for (&u, phi) in &mlp.overrides {
        b = b.phi_override(mlp.units[u].clone(), *phi);
    }
    b.build()
}

/// One concept per unit; each synapse `h → i` with weight `w` becomes
/// `(T(C_i) ⊑ C_h, w)` and each bias `b_i` becomes `(T(C_i) ⊑ __bias, b_i)`.
pub fn mlp_to_kb<T: Scalar>(mlp: &MlpModel<T>) -> WeightedKB<T> {
    let mut kb = WeightedKB::new(FuzzyLogic::default());
    for u in &mlp.units {
        kb.declare_atom(u.clone());
    }
    if !mlp.biases.is_empty() {
        kb.declare_atom(BIAS);
    }
    for s in &mlp.synapses {
        kb.add_conditional(
            mlp.units[s.to].clone(),
            ConceptExpr::atom(mlp.units[s.from].clone()),
            s.weight,
        );
    }
    for (&u, &bias) in &mlp.biases {
        kb.add_conditional(mlp.units[u].clone(), ConceptExpr::atom(BIAS), bias);
    }
    kb
}

fn to_concept(graph_names: &[String], e: &ArgExpr) -> ConceptExpr {
    match e {
        ArgExpr::Arg(a) => ConceptExpr::atom(graph_names[*a].clone()),
        ArgExpr::Not(x) => ConceptExpr::not(to_concept(graph_names, x)),
        ArgExpr::And(x, y) => {
            ConceptExpr::and(to_concept(graph_names, x), to_concept(graph_names, y))
        }
        ArgExpr::Or(x, y) => {
            ConceptExpr::or(to_concept(graph_names, x), to_concept(graph_names, y))
        }
    }
}

/// `K^G`: each edge `(src, A, w)` becomes `(T(A) ⊑ src, w)`.
pub fn graph_to_kb<T: Scalar>(graph: &ArgGraph<T>) -> WeightedKB<T> {
    let mut kb = WeightedKB::new(graph.logic());
    for n in graph.names() {
        kb.declare_atom(n.clone());
    }
    for e in graph.edges() {
        kb.add_conditional(
            graph.name(e.target).to_string(),
            to_concept(graph.names(), &e.source),
            e.weight,
        );
    }
    kb
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitViolation<T> {
    pub unit: String,
    pub value: T,
    pub expected: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryReport<T> {
    pub ok: bool,
    pub violations: Vec<UnitViolation<T>>,
}

/// Whether every non-input unit satisfies
/// `|s(i) − φ_i(Σ_h w_ih·s(h) + b_i)| ≤ eps`.
pub fn check_stationary<T: Scalar>(
    mlp: &MlpModel<T>,
    state: &NetworkState<T>,
    eps: T,
) -> Result<StationaryReport<T>> {
    let graph = mlp_to_graph(mlp)?;
    let mut values = vec![T::one(); graph.len()];
    for (u, name) in mlp.units.iter().enumerate() {
        values[u] = state
            .get(name)
            .ok_or_else(|| Error::usage(format!("state has no value for unit `{name}`")))?;
    }
    let labelling = Labelling::new(values)?;
    let tol = Tolerance::default().with_deg(eps);
    let report = check_labelling(&graph, &labelling, &CheckMode::PhiCoherent(mlp.phi), &tol)?;
    let violations = report
        .violations
        .into_iter()
        .filter_map(|v| match v {
            LabellingViolation::Phi {
                argument,
                sigma,
                expected,
            } => Some(UnitViolation {
                unit: argument,
                value: sigma,
                expected,
            }),
            LabellingViolation::Order { .. } => None,
        })
        .collect::<Vec<_>>();
    Ok(StationaryReport {
        ok: violations.is_empty(),
        violations,
    })
}

/// Layer-by-layer evaluation of a feedforward network from the given input
/// activations (unlisted inputs keep their configured value).
pub fn forward_pass<T: Scalar>(mlp: &MlpModel<T>, inputs: &[(&str, T)]) -> Result<NetworkState<T>> {
    let mut net = mlp.clone();
    for &(u, v) in inputs {
        let id = net.unit(u)?;
        if !net.inputs[id] {
            return Err(Error::usage(format!("`{u}` is not an input unit")));
        }
        net.set_input_value(u, v)?;
    }
    let graph = mlp_to_graph(&net)?;
    let labelling = forward_acyclic(&graph, &net.phi)?;
    Ok(NetworkState::from_labelling(&net, &graph, &labelling))
}
