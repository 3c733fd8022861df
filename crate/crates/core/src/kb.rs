//! Weighted conditional knowledge bases over the boolean fragment, finite
//! fuzzy interpretations and the coherent / faithful / phi-coherent model
//! checks.
//!
//! Typicality only appears at the top of an axiom's left-hand side and as
//! the implicit subject of a weighted inclusion. Every concept `C` induces a
//! strict preference on the domain: `x <_C y` iff `C(x) > C(y)`, and the
//! typical `C`-elements are the `<_C`-minimal elements among those with a
//! positive `C` degree.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{Activation, CheckMode, Degree, ExtendedReal, FuzzyLogic};
use crate::scalar::{Scalar, Tolerance};

/// Boolean concept expression. Typicality is not part of this grammar.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConceptExpr {
    Top,
    Bottom,
    Atom(String),
    Not(Box<ConceptExpr>),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Or(Box<ConceptExpr>, Box<ConceptExpr>),
}

impl ConceptExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        ConceptExpr::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: ConceptExpr) -> Self {
        ConceptExpr::Not(Box::new(e))
    }

    pub fn and(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::Or(Box::new(a), Box::new(b))
    }

    /// Atom names in order of first occurrence.
    pub fn atoms(&self) -> Vec<&str> {
        fn walk<'a>(e: &'a ConceptExpr, out: &mut Vec<&'a str>) {
            match e {
                ConceptExpr::Top | ConceptExpr::Bottom => {}
                ConceptExpr::Atom(n) => {
                    if !out.contains(&n.as_str()) {
                        out.push(n);
                    }
                }
                ConceptExpr::Not(a) => walk(a, out),
                ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConceptExpr::Top => f.write_str("⊤"),
            ConceptExpr::Bottom => f.write_str("⊥"),
            ConceptExpr::Atom(n) => f.write_str(n),
            ConceptExpr::Not(a) => write!(f, "¬{a}"),
            ConceptExpr::And(a, b) => write!(f, "({a} ⊓ {b})"),
            ConceptExpr::Or(a, b) => write!(f, "({a} ⊔ {b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theta {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<")]
    Lt,
}

impl Theta {
    /// `degree θ threshold`, where equality is judged within `eps`.
    pub fn holds<T: Scalar>(self, degree: T, threshold: T, eps: T) -> bool {
        match self {
            Theta::Ge => degree >= threshold - eps,
            Theta::Le => degree <= threshold + eps,
            Theta::Gt => degree > threshold + eps,
            Theta::Lt => degree < threshold - eps,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Theta::Ge => ">=",
            Theta::Le => "<=",
            Theta::Gt => ">",
            Theta::Lt => "<",
        }
    }
}

impl std::str::FromStr for Theta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            ">=" | "≥" => Ok(Theta::Ge),
            "<=" | "≤" => Ok(Theta::Le),
            ">" => Ok(Theta::Gt),
            "<" => Ok(Theta::Lt),
            other => Err(Error::usage(format!("unknown comparison `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxiomKind {
    /// `C ⊑ D`, or `T(C) ⊑ D` when `typical` is set.
    Inclusion {
        lhs: ConceptExpr,
        typical: bool,
        rhs: ConceptExpr,
    },
    /// `C(a)`
    Assertion {
        concept: ConceptExpr,
        individual: String,
    },
}

/// A fuzzy axiom `α θ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyAxiom<T> {
    pub kind: AxiomKind,
    pub theta: Theta,
    pub threshold: Degree<T>,
}

impl<T: Scalar> FuzzyAxiom<T> {
    pub fn inclusion(lhs: ConceptExpr, rhs: ConceptExpr, theta: Theta, n: T) -> Result<Self> {
        Ok(FuzzyAxiom {
            kind: AxiomKind::Inclusion {
                lhs,
                typical: false,
                rhs,
            },
            theta,
            threshold: Degree::new(n)?,
        })
    }

    pub fn typicality(lhs: ConceptExpr, rhs: ConceptExpr, theta: Theta, n: T) -> Result<Self> {
        Ok(FuzzyAxiom {
            kind: AxiomKind::Inclusion {
                lhs,
                typical: true,
                rhs,
            },
            theta,
            threshold: Degree::new(n)?,
        })
    }

    pub fn assertion(
        concept: ConceptExpr,
        individual: impl Into<String>,
        theta: Theta,
        n: T,
    ) -> Result<Self> {
        Ok(FuzzyAxiom {
            kind: AxiomKind::Assertion {
                concept,
                individual: individual.into(),
            },
            theta,
            threshold: Degree::new(n)?,
        })
    }

    fn atoms(&self) -> Vec<&str> {
        match &self.kind {
            AxiomKind::Inclusion { lhs, rhs, .. } => {
                let mut v = lhs.atoms();
                for a in rhs.atoms() {
                    if !v.contains(&a) {
                        v.push(a);
                    }
                }
                v
            }
            AxiomKind::Assertion { concept, .. } => concept.atoms(),
        }
    }
}

impl<T: Scalar> fmt::Display for FuzzyAxiom<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AxiomKind::Inclusion { lhs, typical, rhs } => {
                if *typical {
                    write!(f, "T({lhs}) ⊑ {rhs}")?;
                } else {
                    write!(f, "{lhs} ⊑ {rhs}")?;
                }
            }
            AxiomKind::Assertion {
                concept,
                individual,
            } => write!(f, "{concept}({individual})")?,
        }
        write!(f, " {} {}", self.theta.symbol(), self.threshold.value())
    }
}

/// One weighted typicality inclusion `T(C) ⊑ body` for the subject it is
/// filed under.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedInclusion<T> {
    pub body: ConceptExpr,
    pub weight: T,
}

/// Weighted conditional knowledge base.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedKB<T> {
    pub logic: FuzzyLogic,
    pub atoms: Vec<String>,
    pub individuals: Vec<String>,
    pub strict: Vec<FuzzyAxiom<T>>,
    pub assertions: Vec<FuzzyAxiom<T>>,
    /// Distinguished concept name to its weighted inclusions.
    pub conditionals: IndexMap<String, Vec<WeightedInclusion<T>>>,
}

impl<T: Scalar> WeightedKB<T> {
    pub fn new(logic: FuzzyLogic) -> Self {
        WeightedKB {
            logic,
            atoms: Vec::new(),
            individuals: Vec::new(),
            strict: Vec::new(),
            assertions: Vec::new(),
            conditionals: IndexMap::new(),
        }
    }

    /// Declares `name` as an atom if it is not declared yet.
    pub fn declare_atom(&mut self, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        if !self.atoms.contains(&name) {
            self.atoms.push(name);
        }
        self
    }

    pub fn declare_individual(&mut self, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        if !self.individuals.contains(&name) {
            self.individuals.push(name);
        }
        self
    }

    pub fn add_conditional(
        &mut self,
        subject: impl Into<String>,
        body: ConceptExpr,
        weight: T,
    ) -> &mut Self {
        self.conditionals
            .entry(subject.into())
            .or_default()
            .push(WeightedInclusion { body, weight });
        self
    }

    pub fn distinguished(&self) -> impl Iterator<Item = &str> {
        self.conditionals.keys().map(String::as_str)
    }

    pub fn validate(&self) -> Result<()> {
        let declared = |a: &str| self.atoms.iter().any(|x| x == a);
        for (subject, incs) in &self.conditionals {
            if !declared(subject) {
                return Err(Error::schema(format!(
                    "distinguished concept `{subject}` is not a declared atom"
                )));
            }
            if incs.is_empty() {
                return Err(Error::schema(format!(
                    "distinguished concept `{subject}` has no weighted inclusions"
                )));
            }
            for inc in incs {
                if !inc.weight.is_finite() {
                    return Err(Error::schema(format!("non-finite weight on `{subject}`")));
                }
                for a in inc.body.atoms() {
                    if !declared(a) {
                        return Err(Error::schema(format!(
                            "undeclared atom `{a}` in body for `{subject}`"
                        )));
                    }
                }
            }
        }
        for ax in self.strict.iter().chain(&self.assertions) {
            for a in ax.atoms() {
                if !declared(a) {
                    return Err(Error::schema(format!(
                        "undeclared atom `{a}` in axiom `{ax}`"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Finite fuzzy interpretation: a domain, a membership row per atom and
/// the denotation of individual names.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteInterpretation<T> {
    domain: Vec<String>,
    membership: IndexMap<String, Vec<T>>,
    individuals: IndexMap<String, usize>,
}

impl<T: Scalar> FiniteInterpretation<T> {
    pub fn new(domain: Vec<String>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::schema("interpretation domain is empty"));
        }
        let mut seen = BTreeSet::new();
        for e in &domain {
            if !seen.insert(e) {
                return Err(Error::schema(format!("duplicate domain element `{e}`")));
            }
        }
        Ok(FiniteInterpretation {
            domain,
            membership: IndexMap::new(),
            individuals: IndexMap::new(),
        })
    }

    /// Declares `atom` with one degree per domain element.
    pub fn set_atom(&mut self, atom: impl Into<String>, row: Vec<T>) -> Result<&mut Self> {
        let atom = atom.into();
        if row.len() != self.domain.len() {
            return Err(Error::schema(format!(
                "atom `{atom}` has {} degrees for {} elements",
                row.len(),
                self.domain.len()
            )));
        }
        for v in &row {
            Degree::new(*v)?;
        }
        self.membership.insert(atom, row);
        Ok(self)
    }

    /// Sets a single membership degree; the atom is declared with zeros
    /// first if needed.
    pub fn set(&mut self, atom: &str, element: &str, value: T) -> Result<&mut Self> {
        let x = self.element_or_err(element)?;
        Degree::new(value)?;
        let n = self.domain.len();
        self.membership
            .entry(atom.to_string())
            .or_insert_with(|| vec![T::zero(); n])[x] = value;
        Ok(self)
    }

    pub fn bind_individual(&mut self, name: impl Into<String>, element: &str) -> Result<&mut Self> {
        let x = self.element_or_err(element)?;
        self.individuals.insert(name.into(), x);
        Ok(self)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.membership.keys().map(String::as_str)
    }

    pub fn row(&self, atom: &str) -> Option<&[T]> {
        self.membership.get(atom).map(Vec::as_slice)
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|e| e == name)
    }

    pub fn individual(&self, name: &str) -> Option<usize> {
        self.individuals.get(name).copied()
    }

    pub fn individuals(&self) -> impl Iterator<Item = (&str, usize)> {
        self.individuals.iter().map(|(k, v)| (k.as_str(), *v))
    }

    fn element_or_err(&self, name: &str) -> Result<usize> {
        self.element(name)
            .ok_or_else(|| Error::schema(format!("unknown domain element `{name}`")))
    }

    /// Degree of `expr` at element index `x`.
    pub fn eval(&self, logic: FuzzyLogic, expr: &ConceptExpr, x: usize) -> Result<T> {
        Ok(match expr {
            ConceptExpr::Top => T::one(),
            ConceptExpr::Bottom => T::zero(),
            ConceptExpr::Atom(a) => self.membership.get(a).ok_or_else(|| {
                Error::schema(format!("atom `{a}` not declared in interpretation"))
            })?[x],
            ConceptExpr::Not(a) => logic.negation(self.eval(logic, a, x)?),
            ConceptExpr::And(a, b) => logic.tnorm(self.eval(logic, a, x)?, self.eval(logic, b, x)?),
            ConceptExpr::Or(a, b) => logic.snorm(self.eval(logic, a, x)?, self.eval(logic, b, x)?),
        })
    }

    /// Degrees of `expr` across the whole domain.
    pub fn eval_all(&self, logic: FuzzyLogic, expr: &ConceptExpr) -> Result<Vec<T>> {
        (0..self.domain.len())
            .map(|x| self.eval(logic, expr, x))
            .collect()
    }
}

/// `expr` evaluated at `x` under `logic`.
pub fn eval_concept<T: Scalar>(
    interp: &FiniteInterpretation<T>,
    logic: FuzzyLogic,
    expr: &ConceptExpr,
    x: usize,
) -> Result<Degree<T>> {
    if x >= interp.len() {
        return Err(Error::usage(format!("element index {x} out of range")));
    }
    interp.eval(logic, expr, x).map(Degree::saturating)
}

/// Strict preference `<_C` induced by the degrees of a concept.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedPreference<T> {
    degrees: Vec<T>,
}

impl<T: Scalar> InducedPreference<T> {
    pub fn from_degrees(degrees: Vec<T>) -> Self {
        InducedPreference { degrees }
    }

    /// `x <_C y`: x is strictly more typical than y.
    pub fn prefers(&self, x: usize, y: usize) -> bool {
        self.degrees[x] > self.degrees[y]
    }

    /// All pairs `(x, y)` with `x <_C y`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.degrees.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.prefers(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn degrees(&self) -> &[T] {
        &self.degrees
    }

    /// `<_C`-minimal elements among those with a positive degree.
    pub fn minimal_positive(&self) -> Vec<usize> {
        let max = self
            .degrees
            .iter()
            .copied()
            .filter(|d| *d > T::zero())
            .fold(None, |acc: Option<T>, d| Some(acc.map_or(d, |m| m.max(d))));
        match max {
            None => Vec::new(),
            Some(m) => (0..self.degrees.len())
                .filter(|&x| self.degrees[x] == m)
                .collect(),
        }
    }
}

pub fn induced_preference<T: Scalar>(
    interp: &FiniteInterpretation<T>,
    logic: FuzzyLogic,
    expr: &ConceptExpr,
) -> Result<InducedPreference<T>> {
    Ok(InducedPreference::from_degrees(
        interp.eval_all(logic, expr)?,
    ))
}

/// Typical `expr`-elements; empty iff `expr` has degree 0 everywhere.
pub fn typical_elements<T: Scalar>(
    interp: &FiniteInterpretation<T>,
    logic: FuzzyLogic,
    expr: &ConceptExpr,
) -> Result<Vec<usize>> {
    Ok(induced_preference(interp, logic, expr)?.minimal_positive())
}

/// Weighted sum of `subject`'s inclusion bodies at `x`, or `Bottom` when
/// `x` has degree 0 in `subject`.
pub fn element_weight<T: Scalar>(
    interp: &FiniteInterpretation<T>,
    kb: &WeightedKB<T>,
    subject: &str,
    x: usize,
) -> Result<ExtendedReal<T>> {
    let incs = kb
        .conditionals
        .get(subject)
        .ok_or_else(|| Error::usage(format!("`{subject}` is not a distinguished concept")))?;
    if x >= interp.len() {
        return Err(Error::usage(format!("element index {x} out of range")));
    }
    let own = interp.eval(kb.logic, &ConceptExpr::atom(subject), x)?;
    if own <= T::zero() {
        return Ok(ExtendedReal::Bottom);
    }
    Ok(ExtendedReal::Finite(raw_weight(interp, kb.logic, incs, x)?))
}

/// `Σ_h w_h · body_h(x)` regardless of the subject's own degree.
fn raw_weight<T: Scalar>(
    interp: &FiniteInterpretation<T>,
    logic: FuzzyLogic,
    incs: &[WeightedInclusion<T>],
    x: usize,
) -> Result<T> {
    let mut sum = T::zero();
    for inc in incs {
        sum = sum + inc.weight * interp.eval(logic, &inc.body, x)?;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomOutcome<T> {
    pub degree: Degree<T>,
    pub holds: bool,
}

/// Degree of an axiom in `interp` and whether it meets its threshold.
///
/// Inclusions take the minimum of the implication over the domain; a
/// typicality antecedent is crisp: 1 on the typical elements, 0 elsewhere.
pub fn satisfies_axiom<T: Scalar>(
    interp: &FiniteInterpretation<T>,
    logic: FuzzyLogic,
    axiom: &FuzzyAxiom<T>,
    tol: &Tolerance<T>,
) -> Result<AxiomOutcome<T>> {
    let degree = match &axiom.kind {
        AxiomKind::Inclusion { lhs, typical, rhs } => {
            let ante = if *typical {
                let typ = typical_elements(interp, logic, lhs)?;
                (0..interp.len())
                    .map(|x| {
                        if typ.contains(&x) {
                            T::one()
                        } else {
                            T::zero()
                        }
                    })
                    .collect()
            } else {
                interp.eval_all(logic, lhs)?
            };
            let cons = interp.eval_all(logic, rhs)?;
            ante.iter()
                .zip(&cons)
                .map(|(&a, &b)| logic.implication(a, b))
                .fold(T::one(), T::min)
        }
        AxiomKind::Assertion {
            concept,
            individual,
        } => {
            let x = interp
                .individual(individual)
                .ok_or_else(|| Error::schema(format!("unknown individual `{individual}`")))?;
            interp.eval(logic, concept, x)?
        }
    };
    let degree = Degree::saturating(degree);
    Ok(AxiomOutcome {
        degree,
        holds: axiom
            .theta
            .holds(degree.value(), axiom.threshold.value(), tol.deg),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomSection {
    Strict,
    Assertion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelViolation<T> {
    /// A strict inclusion or assertion misses its threshold.
    Axiom {
        section: AxiomSection,
        index: usize,
        axiom: String,
        degree: T,
    },
    /// Preference and weight order disagree on `(x, y)` for `concept`.
    Preference {
        concept: String,
        x: String,
        y: String,
        degree_x: T,
        degree_y: T,
        weight_x: ExtendedReal<T>,
        weight_y: ExtendedReal<T>,
    },
    /// `concept(x)` differs from `phi` of its weighted sum.
    PhiCoherence {
        concept: String,
        x: String,
        degree: T,
        expected: T,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport<T> {
    pub mode: &'static str,
    pub ok: bool,
    pub violations: Vec<ModelViolation<T>>,
}

/// Checks `interp` against `kb` under `mode`, collecting every violation.
///
/// All modes check the strict axioms and assertions. `Coherent` requires
/// `x <_C y ⟺ W(x) > W(y)` for each distinguished `C`, `Faithful` only the
/// forward direction, and `PhiCoherent` requires `C(x) = φ(Σ w·D(x))` at
/// every element, including those where `C(x) = 0`.
pub fn check_model<T: Scalar>(
    interp: &FiniteInterpretation<T>,
    kb: &WeightedKB<T>,
    mode: &CheckMode<T>,
    tol: &Tolerance<T>,
) -> Result<ModelReport<T>> {
    kb.validate()?;
    let logic = kb.logic;
    let mut violations = Vec::new();

    for (section, axioms) in [
        (AxiomSection::Strict, &kb.strict),
        (AxiomSection::Assertion, &kb.assertions),
    ] {
        for (index, ax) in axioms.iter().enumerate() {
            let out = satisfies_axiom(interp, logic, ax, tol)?;
            if !out.holds {
                violations.push(ModelViolation::Axiom {
                    section,
                    index,
                    axiom: ax.to_string(),
                    degree: out.degree.value(),
                });
            }
        }
    }

    let n = interp.len();
    let names = interp.domain();
    for (subject, incs) in &kb.conditionals {
        let degrees = interp.eval_all(logic, &ConceptExpr::atom(subject.as_str()))?;
        let sums = (0..n)
            .map(|x| raw_weight(interp, logic, incs, x))
            .collect::<Result<Vec<T>>>()?;
        match mode {
            CheckMode::PhiCoherent(phi) => {
                for x in 0..n {
                    let expected = phi.apply(sums[x]);
                    if !tol.deg_eq(degrees[x], expected) {
                        violations.push(ModelViolation::PhiCoherence {
                            concept: subject.clone(),
                            x: names[x].clone(),
                            degree: degrees[x],
                            expected,
                        });
                    }
                }
            }
            CheckMode::Coherent | CheckMode::Faithful => {
                let weights: Vec<ExtendedReal<T>> = (0..n)
                    .map(|x| {
                        if degrees[x] > T::zero() {
                            ExtendedReal::Finite(sums[x])
                        } else {
                            ExtendedReal::Bottom
                        }
                    })
                    .collect();
                let iff = matches!(mode, CheckMode::Coherent);
                for x in 0..n {
                    for y in 0..n {
                        if x == y {
                            continue;
                        }
                        let preferred = tol.deg_gt(degrees[x], degrees[y]);
                        let heavier = weights[x].gt_with(weights[y], tol.weight);
                        let bad = if iff {
                            preferred != heavier
                        } else {
                            preferred && !heavier
                        };
                        if bad {
                            violations.push(ModelViolation::Preference {
                                concept: subject.clone(),
                                x: names[x].clone(),
                                y: names[y].clone(),
                                degree_x: degrees[x],
                                degree_y: degrees[y],
                                weight_x: weights[x],
                                weight_y: weights[y],
                            });
                        }
                    }
                }
            }
        }
    }

    Ok(ModelReport {
        mode: mode.name(),
        ok: violations.is_empty(),
        violations,
    })
}

/// Sets every distinguished concept's row to `φ(Σ w·D(x))`, visiting the
/// distinguished concepts in KB order. The result is phi-coherent whenever
/// no body mentions a concept that is assigned later.
pub fn make_phi_coherent<T: Scalar>(
    interp: &mut FiniteInterpretation<T>,
    kb: &WeightedKB<T>,
    phi: &Activation<T>,
) -> Result<()> {
    for (subject, incs) in &kb.conditionals {
        let row = (0..interp.len())
            .map(|x| raw_weight(interp, kb.logic, incs, x).map(|s| phi.apply(s)))
            .collect::<Result<Vec<T>>>()?;
        interp.set_atom(subject.clone(), row)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(n: &str) -> ConceptExpr {
        ConceptExpr::atom(n)
    }

    fn interp(domain: &[&str], rows: &[(&str, &[f64])]) -> FiniteInterpretation<f64> {
        let mut i =
            FiniteInterpretation::new(domain.iter().map(|s| s.to_string()).collect()).unwrap();
        for (atom, row) in rows {
            i.set_atom(*atom, row.to_vec()).unwrap();
        }
        i
    }

    #[test]
    fn eval_examples() {
        let i = interp(&["x"], &[("Yellow", &[0.4]), ("Black", &[0.9])]);
        let v = eval_concept(
            &i,
            FuzzyLogic::Zadeh,
            &ConceptExpr::and(a("Yellow"), a("Black")),
            0,
        )
        .unwrap();
        assert_eq!(v.value(), 0.4);
        assert_eq!(
            eval_concept(&i, FuzzyLogic::Zadeh, &ConceptExpr::Top, 0)
                .unwrap()
                .value(),
            1.0
        );
        let opus = interp(&["opus"], &[("Fly", &[0.0])]);
        let v = eval_concept(&opus, FuzzyLogic::Zadeh, &ConceptExpr::not(a("Fly")), 0).unwrap();
        assert_eq!(v.value(), 1.0);
    }

    #[test]
    fn undeclared_atom_is_schema_error() {
        let i = interp(&["x"], &[("A", &[0.4])]);
        assert!(matches!(
            eval_concept(&i, FuzzyLogic::Zadeh, &a("B"), 0),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn induced_preference_examples() {
        let i = interp(&["reddy", "opus"], &[("Bird", &[1.0, 0.8])]);
        let p = induced_preference(&i, FuzzyLogic::Zadeh, &a("Bird")).unwrap();
        assert!(p.prefers(0, 1));
        assert!(!p.prefers(1, 0));

        let flat = interp(&["a", "b", "c"], &[("C", &[0.3, 0.3, 0.3])]);
        assert!(induced_preference(&flat, FuzzyLogic::Zadeh, &a("C"))
            .unwrap()
            .pairs()
            .is_empty());

        let three = interp(&["a", "b", "c"], &[("C", &[0.2, 0.5, 0.5])]);
        let got = induced_preference(&three, FuzzyLogic::Zadeh, &a("C"))
            .unwrap()
            .pairs();
        // exhaustive pairwise oracle
        let deg = [0.2, 0.5, 0.5];
        let mut want = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                if deg[x] > deg[y] {
                    want.push((x, y));
                }
            }
        }
        assert_eq!(got, want);
        assert_eq!(got, vec![(1, 0), (2, 0)]);
    }

    #[test]
    fn typical_element_examples() {
        let i = interp(&["reddy", "opus"], &[("Bird", &[1.0, 0.8])]);
        assert_eq!(
            typical_elements(&i, FuzzyLogic::Zadeh, &a("Bird")).unwrap(),
            vec![0]
        );
        let z = interp(&["a", "b"], &[("C", &[0.0, 0.0])]);
        assert!(typical_elements(&z, FuzzyLogic::Zadeh, &a("C"))
            .unwrap()
            .is_empty());
        let t = interp(&["a", "b", "c"], &[("C", &[0.7, 0.7, 0.1])]);
        assert_eq!(
            typical_elements(&t, FuzzyLogic::Zadeh, &a("C")).unwrap(),
            vec![0, 1]
        );
    }

    #[test]
    fn element_weight_bottom_and_unknown() {
        let mut kb = WeightedKB::<f64>::new(FuzzyLogic::Zadeh);
        kb.declare_atom("C")
            .declare_atom("D")
            .add_conditional("C", a("D"), 2.0);
        let i = interp(&["x", "y"], &[("C", &[0.0, 0.5]), ("D", &[1.0, 0.25])]);
        assert_eq!(
            element_weight(&i, &kb, "C", 0).unwrap(),
            ExtendedReal::Bottom
        );
        assert_eq!(
            element_weight(&i, &kb, "C", 1).unwrap(),
            ExtendedReal::Finite(0.5)
        );
        assert!(matches!(
            element_weight(&i, &kb, "D", 0),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn axiom_satisfaction_examples() {
        let tol = Tolerance::default();
        let i = interp(
            &["reddy", "opus"],
            &[
                ("Yellow", &[0.0, 0.0]),
                ("Black", &[0.0, 0.8]),
                ("Bird", &[1.0, 0.8]),
                ("Fly", &[1.0, 0.0]),
            ],
        );
        let disjoint = FuzzyAxiom::inclusion(
            ConceptExpr::and(a("Yellow"), a("Black")),
            ConceptExpr::Bottom,
            Theta::Ge,
            1.0,
        )
        .unwrap();
        let out = satisfies_axiom(&i, FuzzyLogic::Zadeh, &disjoint, &tol).unwrap();
        assert_eq!(out.degree.value(), 1.0);
        assert!(out.holds);

        let refl = FuzzyAxiom::inclusion(a("Black"), a("Black"), Theta::Ge, 1.0).unwrap();
        assert!(
            satisfies_axiom(&i, FuzzyLogic::Goedel, &refl, &tol)
                .unwrap()
                .holds
        );

        let typ = FuzzyAxiom::typicality(a("Bird"), a("Fly"), Theta::Gt, 0.7).unwrap();
        let out = satisfies_axiom(&i, FuzzyLogic::Goedel, &typ, &tol).unwrap();
        // brute force: min over typical elements (only reddy) of Fly
        let typical = [0usize];
        let want = typical
            .iter()
            .map(|&x| [1.0, 0.0][x])
            .fold(1.0f64, f64::min);
        assert_eq!(out.degree.value(), want);
        assert!(out.holds);
    }

    #[test]
    fn assertion_on_unknown_individual() {
        let i = interp(&["x"], &[("A", &[1.0])]);
        let ax = FuzzyAxiom::assertion(a("A"), "nobody", Theta::Ge, 0.5).unwrap();
        assert!(matches!(
            satisfies_axiom(&i, FuzzyLogic::Zadeh, &ax, &Tolerance::default()),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn kb_validation() {
        let mut kb = WeightedKB::<f64>::new(FuzzyLogic::Zadeh);
        kb.declare_atom("C").add_conditional("C", a("Missing"), 1.0);
        assert!(matches!(kb.validate(), Err(Error::Schema(_))));
        let mut kb = WeightedKB::<f64>::new(FuzzyLogic::Zadeh);
        kb.declare_atom("D").add_conditional("C", a("D"), 1.0);
        assert!(matches!(kb.validate(), Err(Error::Schema(_))));
    }

    #[test]
    fn phi_coherent_by_construction_passes() {
        let mut kb = WeightedKB::<f64>::new(FuzzyLogic::Zadeh);
        kb.declare_atom("A").declare_atom("B").declare_atom("C");
        kb.add_conditional("C", a("A"), 1.5).add_conditional(
            "C",
            ConceptExpr::and(a("A"), a("B")),
            -2.0,
        );
        let mut i = interp(
            &["x", "y", "z"],
            &[("A", &[0.1, 0.9, 0.4]), ("B", &[0.5, 0.6, 1.0])],
        );
        let phi = Activation::sigmoid();
        make_phi_coherent(&mut i, &kb, &phi).unwrap();
        let r = check_model(&i, &kb, &CheckMode::PhiCoherent(phi), &Tolerance::default()).unwrap();
        assert!(r.ok, "{r:?}");
        i.set("C", "y", 0.01).unwrap();
        let r = check_model(&i, &kb, &CheckMode::PhiCoherent(phi), &Tolerance::default()).unwrap();
        assert_eq!(r.violations.len(), 1);
    }

    fn degrees() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(
            prop_oneof![Just(0.0), Just(0.5), Just(1.0), 0.0f64..=1.0],
            1..7,
        )
    }

    proptest! {
        #[test]
        fn induced_order_is_a_modular_strict_order(ds in degrees()) {
            let p = InducedPreference::from_degrees(ds.clone());
            let n = ds.len();
            for x in 0..n {
                prop_assert!(!p.prefers(x, x));
                for y in 0..n {
                    for z in 0..n {
                        if p.prefers(x, y) && p.prefers(y, z) {
                            prop_assert!(p.prefers(x, z));
                        }
                        if p.prefers(x, y) {
                            prop_assert!(p.prefers(x, z) || p.prefers(z, y));
                        }
                    }
                }
            }
            // well-founded on a finite domain: some element has no predecessor
            prop_assert!((0..n).any(|y| (0..n).all(|x| !p.prefers(x, y))));
        }

        #[test]
        fn typical_set_nonempty_when_some_degree_positive(ds in degrees()) {
            let p = InducedPreference::from_degrees(ds.clone());
            let typ = p.minimal_positive();
            prop_assert_eq!(typ.is_empty(), ds.iter().all(|d| *d == 0.0));
            for &t in &typ {
                prop_assert!(ds[t] > 0.0);
                prop_assert!((0..ds.len()).all(|x| !p.prefers(x, t)));
            }
        }

        #[test]
        fn inclusion_degree_monotone_in_rhs(
            lhs in prop::collection::vec(0.0f64..=1.0, 4),
            rhs in prop::collection::vec(0.0f64..=1.0, 4),
            bump in prop::collection::vec(0.0f64..=1.0, 4),
            typical in any::<bool>(),
        ) {
            let dom: Vec<String> = (0..4).map(|i| format!("e{i}")).collect();
            let raised: Vec<f64> = rhs.iter().zip(&bump).map(|(r, b)| r + (1.0 - r) * b).collect();
            let mut i1 = FiniteInterpretation::new(dom.clone()).unwrap();
            i1.set_atom("C", lhs.clone()).unwrap();
            i1.set_atom("D", rhs).unwrap();
            let mut i2 = FiniteInterpretation::new(dom).unwrap();
            i2.set_atom("C", lhs).unwrap();
            i2.set_atom("D", raised).unwrap();
            let ax = FuzzyAxiom { kind: AxiomKind::Inclusion { lhs: a("C"), typical, rhs: a("D") }, theta: Theta::Ge, threshold: Degree::one() };
            for l in FuzzyLogic::ALL {
                let d1 = satisfies_axiom(&i1, l, &ax, &Tolerance::default()).unwrap().degree.value();
                let d2 = satisfies_axiom(&i2, l, &ax, &Tolerance::default()).unwrap().degree.value();
                prop_assert!(d1 <= d2 + 1e-12);
            }
        }
    }
}
