//! Weighted conditional knowledge bases with fuzzy typicality, weighted
//! argumentation graphs under gradual semantics, and the translations
//! between them and multilayer perceptrons.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`.
//!
//! ```
//! use gradarg_core::{forward_acyclic, Activation, Graph};
//!
//! let g: Graph = Graph::builder()
//!     .argument("hot", 1.0)
//!     .argument("jogging", 0.0)
//!     .edge("hot", "jogging", -0.8)
//!     .build()?;
//! let sigma = forward_acyclic(&g, &Activation::sigmoid())?;
//! assert!((sigma.get(1) - 1.0 / (1.0 + 0.8f64.exp())).abs() < 1e-12);
//! # Ok::<(), gradarg_core::Error>(())
//! ```

pub mod arggraph;
pub mod bridge;
pub mod error;
pub mod fuzzy;
pub mod gradual;
pub mod io;
pub mod kb;
pub mod prefmodel;
pub mod scalar;
pub mod solver;

pub use arggraph::{
    check_labelling, incoming, ArgExpr, ArgGraph, GraphBuilder, Labelling, LabellingReport,
};
pub use bridge::{
    check_stationary, forward_pass, graph_to_kb, mlp_to_graph, mlp_to_kb, MlpModel, NetworkState,
};
pub use error::{Error, Result};
pub use fuzzy::{Activation, CheckMode, Connective, Degree, ExtendedReal, FuzzyLogic};
pub use gradual::{
    check_gradual_property, degree_of, mk_mphi, EvaluationMethod, GradualProperty, MPhi,
};
pub use kb::{
    check_model, element_weight, induced_preference, typical_elements, ConceptExpr,
    FiniteInterpretation, FuzzyAxiom, ModelReport, Theta, WeightedKB,
};
pub use prefmodel::{
    answer_query, build_model, verify_proposition4, ConditionalQuery, LabellingSet,
};
pub use scalar::{Scalar, Tolerance};
pub use solver::{
    enumerate_labellings, forward_acyclic, grid_oracle, solve_fixed_point, SolveOptions,
    SolveResult,
};

pub type Graph = ArgGraph<f64>;
pub type Sigma = Labelling<f64>;
pub type Kb = WeightedKB<f64>;
pub type Interpretation = FiniteInterpretation<f64>;
pub type Mlp = MlpModel<f64>;
pub type Options = SolveOptions<f64>;
pub type Tol = Tolerance<f64>;
