//! Pairwise coordinate ascent on the SVM dual.
//!
//! Implemented in the minimization form `½ λᵀQλ − eᵀλ` with
//! `Q_ij = q_i q_j K(p_i, p_j)`. Each iteration picks the maximal violating
//! pair using second-order information, solves the two-variable subproblem
//! analytically and clips it back into the box `[0, c]`.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use super::{BinaryLabel, BinaryModel, FeatureVector, KernelSpec, TrainParams, ALPHA_PRUNE_THRESHOLD};
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;
const CACHE_BYTES: usize = 64 << 20;

/// Full dual solution, including multipliers that ended at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    /// One multiplier per training point, in input order.
    pub alphas: Vec<f64>,
    pub bias: f64,
    /// Value of the dual objective `L_D` at `alphas`.
    pub objective: f64,
    /// Largest KKT violation `m(λ) − M(λ)` at exit.
    pub max_violation: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl DualSolution {
    /// Keeps the points whose multiplier survives pruning.
    pub fn into_model<P: AsRef<[f64]>>(self, points: &[P], labels: &[BinaryLabel], kernel: KernelSpec) -> BinaryModel {
        // very small c can leave every multiplier under the threshold
        let threshold = if self.alphas.iter().any(|&a| a > ALPHA_PRUNE_THRESHOLD) {
            ALPHA_PRUNE_THRESHOLD
        } else {
            0.0
        };
        let mut support_vectors = Vec::new();
        let mut support_labels = Vec::new();
        let mut alphas = Vec::new();
        for (idx, &a) in self.alphas.iter().enumerate() {
            if a > threshold {
                support_vectors.push(FeatureVector(points[idx].as_ref().to_vec()));
                support_labels.push(labels[idx]);
                alphas.push(a);
            }
        }
        BinaryModel {
            dim: points[0].as_ref().len(),
            support_vectors,
            support_labels,
            alphas,
            bias: self.bias,
            kernel,
        }
    }
}

/// Rows of `Q`, computed on demand and kept in a bounded FIFO cache.
struct QRows<'a> {
    points: Vec<&'a [f64]>,
    y: &'a [f64],
    kernel: KernelSpec,
    diag: Vec<f64>,
    rows: HashMap<usize, Rc<Vec<f64>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> QRows<'a> {
    fn new(points: Vec<&'a [f64]>, y: &'a [f64], kernel: KernelSpec) -> Self {
        let n = points.len();
        let diag = points.iter().map(|p| kernel.apply(p, p)).collect();
        let capacity = (CACHE_BYTES / (8 * n.max(1))).max(2);
        Self {
            points,
            y,
            kernel,
            diag,
            rows: HashMap::new(),
            order: VecDeque::new(),
            capacity,
        }
    }

    fn row(&mut self, i: usize) -> Rc<Vec<f64>> {
        if let Some(r) = self.rows.get(&i) {
            return Rc::clone(r);
        }
        let pi = self.points[i];
        let yi = self.y[i];
        let row: Vec<f64> = self
            .points
            .iter()
            .zip(self.y)
            .map(|(pj, yj)| yi * yj * self.kernel.apply(pi, pj))
            .collect();
        let row = Rc::new(row);
        if self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows.remove(&old);
            }
        }
        self.order.push_back(i);
        self.rows.insert(i, Rc::clone(&row));
        row
    }
}

fn validate_inputs<P: AsRef<[f64]>>(points: &[P], labels: &[BinaryLabel], params: &TrainParams) -> Result<usize> {
    params.validate()?;
    if points.is_empty() {
        return Err(Error::EmptyInput("binary training set"));
    }
    if points.len() != labels.len() {
        return Err(Error::InvalidParams(format!("{} points but {} labels", points.len(), labels.len())));
    }
    let dim = points[0].as_ref().len();
    for p in points {
        let p = p.as_ref();
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if let Some(position) = p.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { position });
        }
    }
    let positives = labels.iter().filter(|l| **l == BinaryLabel::Positive).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::DegenerateBinaryProblem);
    }
    Ok(dim)
}

/// Solves the dual problem for `points` / `labels`.
pub fn solve_dual<P: AsRef<[f64]>>(points: &[P], labels: &[BinaryLabel], params: &TrainParams) -> Result<DualSolution> {
    validate_inputs(points, labels, params)?;
    let n = points.len();
    let c = params.c;
    let eps = params.kkt_tolerance;
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let mut q = QRows::new(points.iter().map(|p| p.as_ref()).collect(), &y, params.kernel);

    let mut alpha = vec![0.0; n];
    // gradient of ½λᵀQλ − eᵀλ
    let mut grad = vec![-1.0; n];

    let pass_len = n.max(1);
    let max_iterations = (100 * n).max(10_000_000);
    let mut iterations = 0usize;
    let mut stalled_passes = 0u32;
    let mut pass_objective = 0.0;
    let mut converged = false;
    let mut max_violation;

    loop {
        let (selection, violation) = select_working_set(&mut q, &alpha, &grad, &y, c);
        max_violation = violation;
        if violation <= eps {
            converged = true;
            break;
        }
        let Some((i, j)) = selection else {
            break;
        };
        let qi = q.row(i);
        let qj = q.row(j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        update_pair(&mut alpha, &grad, &y, &q.diag, &qi, i, j, c);
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        if di != 0.0 || dj != 0.0 {
            for (t, g) in grad.iter_mut().enumerate() {
                *g += qi[t] * di + qj[t] * dj;
            }
        }

        iterations += 1;
        if iterations.is_multiple_of(pass_len) {
            let obj = dual_objective(&alpha, &grad);
            if obj - pass_objective <= 1e-12 * (1.0 + obj.abs()) {
                stalled_passes += 1;
            } else {
                stalled_passes = 0;
            }
            pass_objective = obj;
            if stalled_passes >= params.max_passes {
                break;
            }
        }
        if iterations >= max_iterations {
            break;
        }
    }

    let bias = -compute_rho(&alpha, &grad, &y, c);
    Ok(DualSolution {
        objective: dual_objective(&alpha, &grad),
        alphas: alpha,
        bias,
        max_violation,
        iterations,
        converged,
    })
}

/// `L_D = eᵀλ − ½λᵀQλ`, recovered from the gradient `Qλ − e`.
fn dual_objective(alpha: &[f64], grad: &[f64]) -> f64 {
    -0.5 * alpha.iter().zip(grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>()
}

fn in_up(a: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(a: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

/// Returns the working pair and the current violation `m − M`.
fn select_working_set(q: &mut QRows<'_>, alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> (Option<(usize, usize)>, f64) {
    let mut gmax = f64::NEG_INFINITY;
    let mut gmax_idx = None;
    for t in 0..alpha.len() {
        if in_up(alpha[t], y[t], c) {
            let v = -y[t] * grad[t];
            if v > gmax {
                gmax = v;
                gmax_idx = Some(t);
            }
        }
    }
    let Some(i) = gmax_idx else {
        return (None, 0.0);
    };
    let qi = q.row(i);

    let mut gmin = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut best_idx = None;
    for t in 0..alpha.len() {
        if !in_low(alpha[t], y[t], c) {
            continue;
        }
        let v = -y[t] * grad[t];
        if v < gmin {
            gmin = v;
        }
        let b = gmax - v;
        if b > 0.0 {
            // second-order gain estimate, K_ii + K_tt − 2 K_it
            let mut a = q.diag[i] + q.diag[t] - 2.0 * y[i] * y[t] * qi[t];
            if a <= 0.0 {
                a = TAU;
            }
            let gain = -(b * b) / a;
            if gain < best {
                best = gain;
                best_idx = Some(t);
            }
        }
    }
    let violation = if gmin.is_finite() { gmax - gmin } else { 0.0 };
    (best_idx.map(|j| (i, j)), violation)
}

#[allow(clippy::too_many_arguments)]
fn update_pair(alpha: &mut [f64], grad: &[f64], y: &[f64], diag: &[f64], qi: &[f64], i: usize, j: usize, c: f64) {
    let (mut ai, mut aj) = (alpha[i], alpha[j]);
    if y[i] != y[j] {
        let mut quad = diag[i] + diag[j] + 2.0 * qi[j];
        if quad <= 0.0 {
            quad = TAU;
        }
        let delta = (-grad[i] - grad[j]) / quad;
        let diff = ai - aj;
        ai += delta;
        aj += delta;
        if diff > 0.0 {
            if aj < 0.0 {
                aj = 0.0;
                ai = diff;
            }
        } else if ai < 0.0 {
            ai = 0.0;
            aj = -diff;
        }
        if diff > 0.0 {
            if ai > c {
                ai = c;
                aj = c - diff;
            }
        } else if aj > c {
            aj = c;
            ai = c + diff;
        }
    } else {
        let mut quad = diag[i] + diag[j] - 2.0 * qi[j];
        if quad <= 0.0 {
            quad = TAU;
        }
        let delta = (grad[i] - grad[j]) / quad;
        let sum = ai + aj;
        ai -= delta;
        aj += delta;
        if sum > c {
            if ai > c {
                ai = c;
                aj = sum - c;
            }
        } else if aj < 0.0 {
            aj = 0.0;
            ai = sum;
        }
        if sum > c {
            if aj > c {
                aj = c;
                ai = sum - c;
            }
        } else if ai < 0.0 {
            ai = 0.0;
            aj = sum;
        }
    }
    alpha[i] = ai;
    alpha[j] = aj;
}

/// Offset `ρ = −b`: mean of `q_i G_i` over free multipliers, or the midpoint
/// of the feasible interval when none are free.
fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            sum += yg;
            free += 1;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_constraint_holds() {
        let pts = [[0.0, 0.0], [1.0, 0.2], [0.1, 1.0], [2.0, 2.0], [2.5, 1.5], [1.8, 2.9]];
        let labels = [
            BinaryLabel::Negative,
            BinaryLabel::Negative,
            BinaryLabel::Negative,
            BinaryLabel::Positive,
            BinaryLabel::Positive,
            BinaryLabel::Positive,
        ];
        let sol = solve_dual(&pts, &labels, &TrainParams::default()).unwrap();
        assert!(sol.converged);
        let s: f64 = sol.alphas.iter().zip(&labels).map(|(a, l)| a * l.sign()).sum();
        assert!(s.abs() < 1e-12);
        assert!(sol.alphas.iter().all(|a| (0.0..=1.0).contains(a)));
    }

    #[test]
    fn all_bound_falls_back_to_midpoint_bias() {
        // fully overlapping classes push every multiplier to c
        let pts = [[0.0], [0.0], [0.0], [0.0]];
        let labels = [
            BinaryLabel::Positive,
            BinaryLabel::Negative,
            BinaryLabel::Positive,
            BinaryLabel::Negative,
        ];
        let sol = solve_dual(&pts, &labels, &TrainParams::default()).unwrap();
        assert!(sol.bias.is_finite());
    }
}
