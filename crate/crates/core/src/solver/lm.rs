//! Projected Levenberg-Marquardt for small dense least-squares problems.
//!
//! Box constraints are lower bounds only; every trial point is clamped onto
//! the feasible box before it is evaluated.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::types::StopReason;

pub(crate) const INITIAL_DAMPING: f64 = 1e-3;
pub(crate) const DAMPING_FACTOR: f64 = 10.0;
const MAX_DAMPING: f64 = 1e32;

pub(crate) trait Residuals {
    fn num_params(&self) -> usize;

    fn num_residuals(&self) -> usize;

    /// Writes `model(x) - observed` into `out`.
    fn residuals(&self, x: &[f64], out: &mut [f64]);

    /// Row-major `num_residuals x num_params` Jacobian of the residuals.
    fn jacobian(&self, x: &[f64], out: &mut DMatrix<f64>);

    fn lower_bounds(&self) -> &[f64];
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub mse_stop: f64,
    pub step_stop: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn relative_step(old: &[f64], new: &[f64]) -> f64 {
    let dx: f64 = old
        .iter()
        .zip(new)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = old.iter().map(|a| a * a).sum::<f64>().sqrt();
    dx / norm.max(f64::MIN_POSITIVE)
}

fn project(x: &mut [f64], lower: &[f64]) {
    for (v, &lo) in x.iter_mut().zip(lower) {
        if !(*v >= lo) {
            *v = lo;
        }
    }
}

fn failure(iteration: usize, reason: &str, x: &[f64], sse: f64) -> Error {
    Error::NumericalFailure {
        iteration,
        reason: reason.to_string(),
        params: x.to_vec(),
        sse,
    }
}

pub(crate) fn minimize<P: Residuals>(problem: &P, start: &[f64], tol: Tolerances) -> Result<Solution> {
    let k = problem.num_params();
    let m = problem.num_residuals();
    let lower = problem.lower_bounds();

    let mut x = start.to_vec();
    project(&mut x, lower);
    let mut r = vec![0.0; m];
    problem.residuals(&x, &mut r);
    let mut sse = sum_sq(&r);
    if !sse.is_finite() {
        return Err(failure(0, "non-finite residual at the starting point", &x, sse));
    }

    let mut jac = DMatrix::zeros(m, k);
    let mut trial = vec![0.0; k];
    let mut trial_r = vec![0.0; m];
    let mut lambda = INITIAL_DAMPING;
    let mut iterations = 0;

    let stop = loop {
        if sse / m as f64 <= tol.mse_stop {
            break StopReason::MseBelowThreshold;
        }
        if iterations >= tol.max_iterations {
            break StopReason::MaxIterations;
        }
        iterations += 1;

        problem.jacobian(&x, &mut jac);
        if jac.iter().any(|v| !v.is_finite()) {
            return Err(failure(iterations, "non-finite Jacobian", &x, sse));
        }
        let jt = jac.transpose();
        let full_normal = &jt * &jac;
        let full_gradient = &jt * DVector::from_column_slice(&r);

        // Parameters pinned at their bound with the descent direction pointing
        // out of the box are frozen for this iteration.
        let free: Vec<usize> = (0..k)
            .filter(|&i| !(x[i] <= lower[i] && full_gradient[i] > 0.0))
            .collect();
        if free.is_empty() {
            break StopReason::StepBelowThreshold;
        }
        let normal = full_normal.select_rows(&free).select_columns(&free);
        let gradient = full_gradient.select_rows(&free);
        let diag_floor = normal.diagonal().max() * 1e-15 + f64::MIN_POSITIVE;

        // Inner loop: raise damping until a step decreases the SSE.
        let accepted = loop {
            let mut damped = normal.clone();
            for i in 0..free.len() {
                damped[(i, i)] += lambda * normal[(i, i)].max(diag_floor);
            }
            let rhs = -&gradient;
            let step = match damped.clone().cholesky() {
                Some(c) => Some(c.solve(&rhs)),
                None => damped.lu().solve(&rhs),
            };

            if let Some(step) = step.filter(|s| s.iter().all(|v| v.is_finite())) {
                trial.copy_from_slice(&x);
                for (j, &i) in free.iter().enumerate() {
                    trial[i] += step[j];
                }
                project(&mut trial, lower);
                problem.residuals(&trial, &mut trial_r);
                let trial_sse = sum_sq(&trial_r);
                let rel = relative_step(&x, &trial);

                if trial_sse.is_finite() && trial_sse < sse {
                    lambda /= DAMPING_FACTOR;
                    x.copy_from_slice(&trial);
                    r.copy_from_slice(&trial_r);
                    sse = trial_sse;
                    break Some(rel);
                }
                if rel <= tol.step_stop {
                    // no decreasing step remains at this resolution
                    break None;
                }
            }
            lambda *= DAMPING_FACTOR;
            if lambda > MAX_DAMPING {
                return Ok(Solution {
                    x,
                    iterations,
                    stop: StopReason::Stalled,
                });
            }
        };

        match accepted {
            Some(rel) if rel > tol.step_stop => {}
            _ => {
                if sse / m as f64 <= tol.mse_stop {
                    break StopReason::MseBelowThreshold;
                }
                break StopReason::StepBelowThreshold;
            }
        }
    };

    Ok(Solution { x, iterations, stop })
}
