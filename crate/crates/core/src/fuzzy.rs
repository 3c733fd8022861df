//! Truth-functional machinery shared by every other module: degrees,
//! the extended reals used for element weights, the four fuzzy logic
//! families and the activation functions applied to weighted sums.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A truth degree in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Degree<T>(T);

impl<T: Scalar> Degree<T> {
    pub fn new(value: T) -> Result<Self> {
        if value >= T::zero() && value <= T::one() {
            Ok(Degree(value))
        } else {
            Err(Error::InvalidDegree(value.to_f64().unwrap_or(f64::NAN)))
        }
    }

    /// Clamps into `[0, 1]`; NaN maps to 0.
    pub fn saturating(value: T) -> Self {
        if value.is_nan() {
            return Degree(T::zero());
        }
        Degree(value.max(T::zero()).min(T::one()))
    }

    pub fn zero() -> Self {
        Degree(T::zero())
    }

    pub fn one() -> Self {
        Degree(T::one())
    }

    pub fn value(self) -> T {
        self.0
    }
}

impl<T: Serialize> Serialize for Degree<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// A real number extended with a bottom element below every finite value.
///
/// `Bottom` absorbs addition. The derived order places `Bottom` first.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtendedReal<T> {
    Bottom,
    Finite(T),
}

impl<T: Scalar> ExtendedReal<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            ExtendedReal::Bottom => None,
            ExtendedReal::Finite(v) => Some(v),
        }
    }

    pub fn is_bottom(self) -> bool {
        matches!(self, ExtendedReal::Bottom)
    }

    /// Strict comparison `self > other` where finite values must differ by
    /// more than `eps`.
    pub fn gt_with(self, other: Self, eps: T) -> bool {
        match (self, other) {
            (ExtendedReal::Bottom, _) => false,
            (ExtendedReal::Finite(_), ExtendedReal::Bottom) => true,
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a - b > eps,
        }
    }

    pub fn total_cmp(self, other: Self) -> Ordering {
        self.partial_cmp(&other).unwrap_or(Ordering::Equal)
    }
}

impl<T: Scalar> Add for ExtendedReal<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::Bottom,
        }
    }
}

impl<T: Scalar> From<T> for ExtendedReal<T> {
    fn from(v: T) -> Self {
        ExtendedReal::Finite(v)
    }
}

impl<T: Serialize> Serialize for ExtendedReal<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Bottom => s.serialize_str("bottom"),
            ExtendedReal::Finite(v) => v.serialize(s),
        }
    }
}

impl<T: Scalar> fmt::Display for ExtendedReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Bottom => f.write_str("-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Family of combination functions: t-norm, s-norm, implication, negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FuzzyLogic {
    #[default]
    Zadeh,
    Goedel,
    Lukasiewicz,
    Product,
}

impl FuzzyLogic {
    pub const ALL: [FuzzyLogic; 4] = [
        FuzzyLogic::Zadeh,
        FuzzyLogic::Goedel,
        FuzzyLogic::Lukasiewicz,
        FuzzyLogic::Product,
    ];

    pub fn tnorm<T: Scalar>(self, a: T, b: T) -> T {
        match self {
            FuzzyLogic::Zadeh | FuzzyLogic::Goedel => a.min(b),
            FuzzyLogic::Lukasiewicz => (a + b - T::one()).max(T::zero()),
            FuzzyLogic::Product => a * b,
        }
    }

    pub fn snorm<T: Scalar>(self, a: T, b: T) -> T {
        match self {
            FuzzyLogic::Zadeh | FuzzyLogic::Goedel => a.max(b),
            FuzzyLogic::Lukasiewicz => (a + b).min(T::one()),
            FuzzyLogic::Product => a + b - a * b,
        }
    }

    pub fn implication<T: Scalar>(self, a: T, b: T) -> T {
        match self {
            // Kleene-Dienes
            FuzzyLogic::Zadeh => (T::one() - a).max(b),
            FuzzyLogic::Goedel => {
                if a <= b {
                    T::one()
                } else {
                    b
                }
            }
            FuzzyLogic::Lukasiewicz => (T::one() - a + b).min(T::one()),
            // Goguen
            FuzzyLogic::Product => {
                if a <= b {
                    T::one()
                } else {
                    b / a
                }
            }
        }
    }

    pub fn negation<T: Scalar>(self, a: T) -> T {
        match self {
            FuzzyLogic::Zadeh | FuzzyLogic::Lukasiewicz => T::one() - a,
            FuzzyLogic::Goedel | FuzzyLogic::Product => {
                if a == T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FuzzyLogic::Zadeh => "zadeh",
            FuzzyLogic::Goedel => "goedel",
            FuzzyLogic::Lukasiewicz => "lukasiewicz",
            FuzzyLogic::Product => "product",
        }
    }
}

impl fmt::Display for FuzzyLogic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FuzzyLogic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zadeh" => Ok(FuzzyLogic::Zadeh),
            "goedel" | "godel" | "gödel" => Ok(FuzzyLogic::Goedel),
            "lukasiewicz" => Ok(FuzzyLogic::Lukasiewicz),
            "product" => Ok(FuzzyLogic::Product),
            other => Err(Error::usage(format!(
                "unknown logic `{other}` (expected zadeh|goedel|lukasiewicz|product)"
            ))),
        }
    }
}

impl Serialize for FuzzyLogic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for FuzzyLogic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Implies,
    Not,
}

impl Connective {
    pub fn is_binary(self) -> bool {
        !matches!(self, Connective::Not)
    }
}

/// Applies one connective of `logic`. `b` must be present exactly when the
/// connective is binary.
pub fn combine<T: Scalar>(
    logic: FuzzyLogic,
    connective: Connective,
    a: Degree<T>,
    b: Option<Degree<T>>,
) -> Result<Degree<T>> {
    let a = a.value();
    let v = match (connective, b.map(Degree::value)) {
        (Connective::Not, None) => logic.negation(a),
        (Connective::And, Some(b)) => logic.tnorm(a, b),
        (Connective::Or, Some(b)) => logic.snorm(a, b),
        (Connective::Implies, Some(b)) => logic.implication(a, b),
        (c, _) => {
            return Err(Error::usage(format!(
                "{c:?} takes {} operand(s)",
                if c.is_binary() { 2 } else { 1 }
            )))
        }
    };
    Ok(Degree::saturating(v))
}

/// Activation function mapping a weighted sum to a degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation<T> {
    /// `1 / (1 + exp(-gain * (x - offset)))`
    Logistic { gain: T, offset: T },
    /// `min(max(x, 0), 1)`
    ReluClamped,
    /// Linear from 0 at `lo` to 1 at `hi`, clamped outside.
    Ramp { lo: T, hi: T },
}

impl<T: Scalar> Activation<T> {
    pub fn logistic(gain: T, offset: T) -> Result<Self> {
        if gain.is_nan() || gain <= T::zero() || !offset.is_finite() {
            return Err(Error::usage(format!(
                "logistic gain must be positive and offset finite (got {gain}, {offset})"
            )));
        }
        Ok(Activation::Logistic { gain, offset })
    }

    pub fn ramp(lo: T, hi: T) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return Err(Error::usage(format!("ramp needs lo < hi (got {lo}, {hi})")));
        }
        Ok(Activation::Ramp { lo, hi })
    }

    /// The standard logistic function, gain 1 and offset 0.
    pub fn sigmoid() -> Self {
        Activation::Logistic {
            gain: T::one(),
            offset: T::zero(),
        }
    }

    pub fn apply(&self, x: T) -> T {
        let y = match *self {
            Activation::Logistic { gain, offset } => {
                T::one() / (T::one() + (-(gain * (x - offset))).exp())
            }
            Activation::ReluClamped => x,
            Activation::Ramp { lo, hi } => (x - lo) / (hi - lo),
        };
        if y.is_nan() {
            T::zero()
        } else {
            y.max(T::zero()).min(T::one())
        }
    }

    pub fn apply_extended(&self, x: ExtendedReal<T>) -> Degree<T> {
        match x {
            ExtendedReal::Bottom => Degree::zero(),
            ExtendedReal::Finite(v) => Degree(self.apply(v)),
        }
    }

    pub fn is_strictly_increasing(&self) -> bool {
        matches!(self, Activation::Logistic { .. })
    }

    /// Every supported family is monotonically non-decreasing.
    pub fn is_non_decreasing(&self) -> bool {
        true
    }

    /// True when the function never returns 0 on a finite input.
    pub fn has_positive_range(&self) -> bool {
        matches!(self, Activation::Logistic { .. })
    }
}

/// Applies `phi` to an extended real; `Bottom` maps to 0.
pub fn apply_activation<T: Scalar>(phi: &Activation<T>, x: ExtendedReal<T>) -> Degree<T> {
    phi.apply_extended(x)
}

impl<T: Scalar> fmt::Display for Activation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Logistic { gain, offset } => write!(f, "logistic:{gain}:{offset}"),
            Activation::ReluClamped => f.write_str("relu-clamped"),
            Activation::Ramp { lo, hi } => write!(f, "ramp:{lo}:{hi}"),
        }
    }
}

impl<T: Scalar> FromStr for Activation<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| -> Result<T> {
            p.trim()
                .parse::<f64>()
                .ok()
                .and_then(T::from_f64)
                .ok_or_else(|| Error::usage(format!("bad number `{p}` in activation `{s}`")))
        };
        match parts.as_slice() {
            ["logistic"] => Ok(Activation::sigmoid()),
            ["logistic", gain, offset] => Activation::logistic(num(gain)?, num(offset)?),
            ["relu-clamped"] | ["relu"] => Ok(Activation::ReluClamped),
            ["ramp", lo, hi] => Activation::ramp(num(lo)?, num(hi)?),
            _ => Err(Error::usage(format!(
                "unknown activation `{s}` (expected logistic:<gain>:<offset>|relu-clamped|ramp:<lo>:<hi>)"
            ))),
        }
    }
}

impl<T: Scalar> Serialize for Activation<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Activation<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which relation between degrees and weights a checker enforces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckMode<T> {
    /// Preference order and weight order agree in both directions.
    Coherent,
    /// Preference order implies weight order.
    Faithful,
    /// Each constrained degree equals `phi` of its weighted sum.
    PhiCoherent(Activation<T>),
}

impl<T: Scalar> CheckMode<T> {
    pub fn name(&self) -> &'static str {
        match self {
            CheckMode::Coherent => "coherent",
            CheckMode::Faithful => "faithful",
            CheckMode::PhiCoherent(_) => "phi-coherent",
        }
    }
}
