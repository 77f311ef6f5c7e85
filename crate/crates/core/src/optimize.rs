//! Box-constrained derivative-free maximization of the negativity:
//! a Nelder–Mead simplex seeded from the best points of a coarse pre-grid,
//! with optional multistarts.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::evaluate_model;
use crate::sweep::{SweepBase, SweepParam};

/// How unstable evaluations are handled inside the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnstableHandling {
    /// Re-sample the offending vertex uniformly inside the box.
    Reject,
    /// Assign a large finite objective that grows with instability depth.
    Penalty,
}

/// One free parameter with box bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedParam {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
}

/// Optimization problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSpec {
    /// Fixed parameters.
    pub base: SweepBase,
    /// Free parameters with box bounds (1 or more).
    pub free: Vec<BoundedParam>,
    pub unstable: UnstableHandling,
    /// Termination tolerance on the simplex diameter in box-normalized
    /// coordinates.
    pub tol: f64,
    pub max_iters: usize,
    /// Number of Nelder–Mead starts seeded from the best pre-grid points.
    pub multistarts: usize,
    /// Pre-grid resolution per free parameter.
    pub pregrid: usize,
    pub seed: u64,
}

impl OptimizeSpec {
    pub fn new(base: SweepBase, free: Vec<BoundedParam>) -> Self {
        Self {
            base,
            free,
            unstable: UnstableHandling::Penalty,
            tol: 1e-5,
            max_iters: 400,
            multistarts: 3,
            pregrid: 9,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::InvalidParameter("no free parameters".into()));
        }
        for f in &self.free {
            if !(f.lo.is_finite() && f.hi.is_finite() && f.lo < f.hi) {
                return Err(Error::InvalidParameter(format!(
                    "bad bounds for {}: [{}, {}]",
                    f.param, f.lo, f.hi
                )));
            }
            if f.param == SweepParam::LambdaOverKappa && f.hi >= 0.5 {
                return Err(Error::InvalidParameter(
                    "lambda_over_kappa upper bound must be strictly below 0.5".into(),
                ));
            }
            let needs_non_negative = matches!(
                f.param,
                SweepParam::LambdaOverKappa
                    | SweepParam::SqueezingR
                    | SweepParam::Cooperativity
                    | SweepParam::GOverKappa
                    | SweepParam::Occupancy
                    | SweepParam::TemperatureK
            );
            if needs_non_negative && f.lo < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{} lower bound must be >= 0",
                    f.param
                )));
            }
        }
        if self.pregrid < 2 || self.multistarts == 0 {
            return Err(Error::InvalidParameter(
                "pregrid must be >= 2 and multistarts >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One objective evaluation on the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub point: Vec<f64>,
    pub e_n: Option<f64>,
    pub stable: bool,
}

/// Optimization outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub best_point: Vec<(SweepParam, f64)>,
    pub best_e_n: f64,
    pub evaluations: usize,
    pub iterations: usize,
    /// True when every start terminated on the diameter tolerance.
    pub converged: bool,
    /// Strictly decreasing best objective values (-E_N) over the search.
    pub best_history: Vec<f64>,
    pub trace: Vec<TraceEntry>,
}

struct Objective<'a> {
    spec: &'a OptimizeSpec,
    trace: Vec<TraceEntry>,
    rng: ChaCha8Rng,
}

const PENALTY: f64 = 1e6;

impl<'a> Objective<'a> {
    /// Objective is -E_N (minimized); unstable points map to a large finite
    /// value that grows with the violated margin so the simplex retreats.
    fn eval(&mut self, point: &[f64]) -> Result<f64> {
        let overrides: Vec<(SweepParam, f64)> = self
            .spec
            .free
            .iter()
            .zip(point)
            .map(|(f, &v)| (f.param, v))
            .collect();
        let mp = self.spec.base.model_with(&overrides)?;
        let ev = evaluate_model(&mp)?;
        self.trace.push(TraceEntry {
            point: point.to_vec(),
            e_n: ev.e_n(),
            stable: ev.stability.stable,
        });
        Ok(match ev.e_n() {
            Some(e_n) => -e_n,
            None => PENALTY * (1.0 + ev.stability.margin.abs()),
        })
    }

    /// Evaluation with the configured unstable-point policy. In `Reject`
    /// mode the point is re-sampled inside the box (bounded retries) and the
    /// possibly moved point is returned.
    fn eval_policy(&mut self, point: &mut [f64]) -> Result<f64> {
        let mut f = self.eval(point)?;
        if self.spec.unstable == UnstableHandling::Reject {
            let mut tries = 0;
            while f >= PENALTY && tries < 20 {
                for (k, free) in self.spec.free.iter().enumerate() {
                    point[k] = self.rng.random_range(free.lo..=free.hi);
                }
                f = self.eval(point)?;
                tries += 1;
            }
        }
        Ok(f)
    }
}

fn clamp_to_box(point: &mut [f64], free: &[BoundedParam]) {
    for (v, f) in point.iter_mut().zip(free) {
        *v = v.clamp(f.lo, f.hi);
    }
}

fn simplex_diameter(vertices: &[Vec<f64>], free: &[BoundedParam]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            for k in 0..free.len() {
                let span = free[k].hi - free[k].lo;
                d = d.max((vertices[i][k] - vertices[j][k]).abs() / span);
            }
        }
    }
    d
}

/// Maximize the logarithmic negativity over the free parameters.
///
/// A coarse pre-grid locates the feasible region (error if it finds no
/// stable point); the best `multistarts` grid points seed Nelder–Mead
/// simplex searches (reflect/expand/contract/shrink, clamped to the box).
/// Identical spec and seed give identical results.
pub fn maximize_negativity(spec: &OptimizeSpec) -> Result<OptimizeResult> {
    spec.validate()?;
    let dim = spec.free.len();
    let mut obj = Objective {
        spec,
        trace: Vec::new(),
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
    };

    // coarse pre-grid over the box
    let mut grid_points: Vec<Vec<f64>> = vec![vec![]];
    for f in &spec.free {
        let mut next = Vec::new();
        for base in &grid_points {
            for i in 0..spec.pregrid {
                let t = i as f64 / (spec.pregrid - 1) as f64;
                let mut p = base.clone();
                p.push(f.lo + t * (f.hi - f.lo));
                next.push(p);
            }
        }
        grid_points = next;
    }
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    for p in grid_points {
        let f = obj.eval(&p)?;
        scored.push((f, p));
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if scored[0].0 >= PENALTY {
        return Err(Error::NoFeasibleRegion);
    }

    let mut best_f = scored[0].0;
    let mut best_x = scored[0].1.clone();
    let mut best_history = vec![best_f];
    let mut total_iters = 0;
    let mut all_converged = true;

    let starts: Vec<Vec<f64>> = scored
        .iter()
        .filter(|(f, _)| *f < PENALTY)
        .take(spec.multistarts)
        .map(|(_, p)| p.clone())
        .collect();

    for start in starts {
        // initial simplex: start plus one vertex per dimension, stepped by
        // 10% of the box and clamped inside
        let mut vertices = vec![start.clone()];
        for k in 0..dim {
            let mut v = start.clone();
            let span = spec.free[k].hi - spec.free[k].lo;
            let step = 0.1 * span;
            v[k] = if v[k] + step <= spec.free[k].hi { v[k] + step } else { v[k] - step };
            vertices.push(v);
        }
        let mut values = Vec::with_capacity(dim + 1);
        for v in vertices.iter_mut() {
            let f = obj.eval_policy(v)?;
            values.push(f);
        }

        let mut converged = false;
        for _ in 0..spec.max_iters {
            total_iters += 1;
            // order vertices by objective
            let mut idx: Vec<usize> = (0..=dim).collect();
            idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
            let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| vertices[i].clone()).collect();
            let ordered_vals: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
            vertices = ordered;
            values = ordered_vals;

            if values[0] < best_f {
                best_f = values[0];
                best_x = vertices[0].clone();
                best_history.push(best_f);
            }
            if simplex_diameter(&vertices, &spec.free) < spec.tol {
                converged = true;
                break;
            }

            // centroid of all but worst
            let mut centroid = vec![0.0; dim];
            for v in &vertices[..dim] {
                for k in 0..dim {
                    centroid[k] += v[k] / dim as f64;
                }
            }
            let worst = values[dim];
            let second_worst = values[dim - 1];

            let propose = |coef: f64| -> Vec<f64> {
                let mut p: Vec<f64> = (0..dim)
                    .map(|k| centroid[k] + coef * (centroid[k] - vertices[dim][k]))
                    .collect();
                clamp_to_box(&mut p, &spec.free);
                p
            };

            let mut reflected = propose(1.0);
            let f_r = obj.eval_policy(&mut reflected)?;
            if f_r < values[0] {
                let mut expanded = propose(2.0);
                let f_e = obj.eval_policy(&mut expanded)?;
                if f_e < f_r {
                    vertices[dim] = expanded;
                    values[dim] = f_e;
                } else {
                    vertices[dim] = reflected;
                    values[dim] = f_r;
                }
            } else if f_r < second_worst {
                vertices[dim] = reflected;
                values[dim] = f_r;
            } else {
                // contraction (outside when the reflection helped at all)
                let mut contracted = if f_r < worst { propose(0.5) } else { propose(-0.5) };
                let f_c = obj.eval_policy(&mut contracted)?;
                if f_c <= f_r.min(worst) {
                    vertices[dim] = contracted;
                    values[dim] = f_c;
                } else {
                    // shrink toward the best vertex; halves the diameter, so
                    // flat objectives still terminate on the tolerance
                    for v_idx in 1..=dim {
                        let mut shrunk: Vec<f64> = (0..dim)
                            .map(|k| vertices[0][k] + 0.5 * (vertices[v_idx][k] - vertices[0][k]))
                            .collect();
                        clamp_to_box(&mut shrunk, &spec.free);
                        let f_s = obj.eval_policy(&mut shrunk)?;
                        vertices[v_idx] = shrunk;
                        values[v_idx] = f_s;
                    }
                }
            }
        }
        all_converged &= converged;
    }

    // best point may carry rounding from normalized math; re-evaluate once
    let best_e_n = {
        let overrides: Vec<(SweepParam, f64)> = spec
            .free
            .iter()
            .zip(&best_x)
            .map(|(f, &v)| (f.param, v))
            .collect();
        let ev = evaluate_model(&spec.base.model_with(&overrides)?)?;
        ev.e_n().unwrap_or(0.0)
    };

    Ok(OptimizeResult {
        best_point: spec
            .free
            .iter()
            .zip(&best_x)
            .map(|(f, &v)| (f.param, v))
            .collect(),
        best_e_n,
        evaluations: obj.trace.len(),
        iterations: total_iters,
        converged: all_converged,
        best_history,
        trace: obj.trace,
    })
}
