//! Brute-force grid search for fixed points on tiny graphs. It shares no
//! code with the iterative solver: candidates come from an exhaustive grid
//! scan and are polished with Newton's method on `v − G(v) = 0`, so
//! unstable equilibria are found too. Each point carries the eigenvalues of
//! the map's Jacobian, which decide whether iteration can reach it.

use nalgebra::{DMatrix, DVector};

use crate::arggraph::{ArgGraph, Labelling};
use crate::error::{Error, Result};
use crate::fuzzy::Activation;
use crate::scalar::Scalar;

const MAX_ARGUMENTS: usize = 4;
const NEWTON_ITERS: usize = 60;
const NEWTON_TOL: f64 = 1e-13;
const MERGE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct OraclePoint<T> {
    pub labelling: Labelling<T>,
    pub residual: T,
    /// Eigenvalues `(re, im)` of the Jacobian of `v ↦ φ(W(v))` restricted
    /// to constrained arguments.
    pub eigenvalues: Vec<(f64, f64)>,
}

impl<T: Scalar> OraclePoint<T> {
    /// Whether the damped update `(1−d)·v + d·G(v)` contracts near this
    /// point, i.e. every `|1 − d + d·λ| < 1`.
    pub fn attracting(&self, damping: f64) -> bool {
        self.eigenvalues.iter().all(|&(re, im)| {
            let r = 1.0 - damping + damping * re;
            let i = damping * im;
            (r * r + i * i).sqrt() < 1.0 - 1e-9
        })
    }
}

struct Problem {
    /// Constrained argument ids, in graph order.
    vars: Vec<usize>,
    base: Vec<f64>,
    /// Per variable: (source argument, weight) pairs.
    inputs: Vec<Vec<(usize, f64)>>,
    phis: Vec<Activation<f64>>,
}

impl Problem {
    fn full(&self, v: &[f64]) -> Vec<f64> {
        let mut all = self.base.clone();
        for (k, &a) in self.vars.iter().enumerate() {
            all[a] = v[k];
        }
        all
    }

    fn map(&self, v: &[f64]) -> Vec<f64> {
        let all = self.full(v);
        self.inputs
            .iter()
            .zip(&self.phis)
            .map(|(ins, phi)| phi.apply(ins.iter().map(|&(s, w)| w * all[s]).sum()))
            .collect()
    }

    fn residual(&self, v: &[f64]) -> f64 {
        self.map(v)
            .iter()
            .zip(v)
            .map(|(g, x)| (g - x).abs())
            .fold(0.0, f64::max)
    }

    fn jacobian(&self, v: &[f64]) -> DMatrix<f64> {
        let m = v.len();
        let h = 1e-7;
        let mut j = DMatrix::zeros(m, m);
        for c in 0..m {
            let mut up = v.to_vec();
            let mut dn = v.to_vec();
            up[c] += h;
            dn[c] -= h;
            let gu = self.map(&up);
            let gd = self.map(&dn);
            for r in 0..m {
                j[(r, c)] = (gu[r] - gd[r]) / (2.0 * h);
            }
        }
        j
    }

    fn newton(&self, start: &[f64]) -> Option<Vec<f64>> {
        let m = start.len();
        let mut v = start.to_vec();
        for _ in 0..NEWTON_ITERS {
            let g = self.map(&v);
            let f = DVector::from_iterator(m, v.iter().zip(&g).map(|(x, gx)| x - gx));
            if f.amax() <= NEWTON_TOL {
                return Some(v);
            }
            let jf = DMatrix::identity(m, m) - self.jacobian(&v);
            let step = jf.lu().solve(&f)?;
            for k in 0..m {
                v[k] -= step[k];
            }
            if v.iter().any(|x| !x.is_finite() || *x < -0.5 || *x > 1.5) {
                return None;
            }
        }
        (self.residual(&v) <= NEWTON_TOL * 10.0).then_some(v)
    }
}

/// All fixed points found by scanning a grid of spacing `grid_step` over
/// the constrained arguments (unconstrained ones pinned at σ₀), keeping
/// grid points with residual `≤ eps` and polishing each with Newton.
///
/// Limited to graphs with at most 4 arguments and atomic edge sources;
/// `grid_step` must be 1/16, 1/32 or 1/64.
pub fn grid_oracle<T: Scalar>(
    graph: &ArgGraph<T>,
    phi: &Activation<T>,
    grid_step: f64,
    eps: f64,
) -> Result<Vec<OraclePoint<T>>> {
    if graph.len() > MAX_ARGUMENTS {
        return Err(Error::usage(format!(
            "grid oracle handles at most {MAX_ARGUMENTS} arguments, graph has {}",
            graph.len()
        )));
    }
    if !graph.all_sources_atomic() {
        return Err(Error::usage("grid oracle requires atomic edge sources"));
    }
    let cells = [16usize, 32, 64]
        .into_iter()
        .find(|&c| (grid_step - 1.0 / c as f64).abs() < 1e-12)
        .ok_or_else(|| {
            Error::usage(format!("grid step {grid_step} not one of 1/16, 1/32, 1/64"))
        })?;

    let to64 = |a: &Activation<T>| match *a {
        Activation::Logistic { gain, offset } => Activation::Logistic {
            gain: gain.as_f64(),
            offset: offset.as_f64(),
        },
        Activation::ReluClamped => Activation::ReluClamped,
        Activation::Ramp { lo, hi } => Activation::Ramp {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        },
    };
    let vars: Vec<usize> = (0..graph.len())
        .filter(|&a| graph.has_incoming(a))
        .collect();
    let problem = Problem {
        inputs: vars
            .iter()
            .map(|&a| {
                graph
                    .edges()
                    .iter()
                    .filter(|e| e.target == a)
                    .map(|e| {
                        (
                            *e.source.as_atom().expect("atomic source"),
                            e.weight.as_f64(),
                        )
                    })
                    .collect()
            })
            .collect(),
        phis: vars.iter().map(|&a| to64(graph.phi_for(a, phi))).collect(),
        base: graph.sigma0().iter().map(|v| v.as_f64()).collect(),
        vars,
    };

    let m = problem.vars.len();
    let side = cells + 1;
    let total = side.pow(m as u32);
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut point = vec![0.0; m];
    for idx in 0..total {
        let mut rest = idx;
        for p in point.iter_mut() {
            *p = (rest % side) as f64 * grid_step;
            rest /= side;
        }
        if problem.residual(&point) > eps {
            continue;
        }
        let Some(v) = problem.newton(&point) else {
            continue;
        };
        if v.iter().any(|x| *x < -1e-9 || *x > 1.0 + 1e-9) {
            continue;
        }
        let v: Vec<f64> = v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
        if found.iter().all(|f| {
            f.iter()
                .zip(&v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                > MERGE_TOL
        }) {
            found.push(v);
        }
    }

    found
        .into_iter()
        .map(|v| {
            let eigenvalues = if m == 0 {
                Vec::new()
            } else {
                problem
                    .jacobian(&v)
                    .complex_eigenvalues()
                    .iter()
                    .map(|c| (c.re, c.im))
                    .collect()
            };
            let residual = T::lit(problem.residual(&v));
            let labelling = Labelling::new(problem.full(&v).into_iter().map(T::lit).collect())?;
            Ok(OraclePoint {
                labelling,
                residual,
                eigenvalues,
            })
        })
        .collect()
}
