//! Limited-memory BFGS with Armijo backtracking.
//!
//! Fully deterministic: no randomness, fixed update order. Every accepted step
//! satisfies the sufficient-decrease condition, so the recorded objective
//! trace is non-increasing.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
pub(crate) struct LbfgsOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub history: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_inf_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Minimizes `objective`, which writes the gradient into its second argument
/// and returns the value.
pub(crate) fn minimize<F>(mut objective: F, x0: Vec<f64>, opts: LbfgsOptions) -> LbfgsOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut grad = vec![0.0; n];
    let mut value = objective(&x, &mut grad);
    let mut trace = vec![value];
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.history);

    let mut x_new = vec![0.0; n];
    let mut grad_new = vec![0.0; n];
    let mut direction = vec![0.0; n];
    let mut alpha = vec![0.0; opts.history];

    let mut iterations = 0;
    let mut converged = inf_norm(&grad) <= opts.tol;

    while !converged && iterations < opts.max_iter {
        // two-loop recursion: direction = -H * grad
        direction.copy_from_slice(&grad);
        for (i, (s, y, rho)) in pairs.iter().enumerate().rev() {
            alpha[i] = rho * dot(s, &direction);
            for (d, yk) in direction.iter_mut().zip(y) {
                *d -= alpha[i] * yk;
            }
        }
        let gamma = match pairs.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / inf_norm(&grad).max(1.0),
        };
        direction.iter_mut().for_each(|d| *d *= gamma);
        for (i, (s, y, rho)) in pairs.iter().enumerate() {
            let beta = rho * dot(y, &direction);
            for (d, sk) in direction.iter_mut().zip(s) {
                *d += (alpha[i] - beta) * sk;
            }
        }
        direction.iter_mut().for_each(|d| *d = -*d);

        let mut slope = dot(&grad, &direction);
        if slope >= 0.0 {
            // stale curvature pairs; fall back to steepest descent
            pairs.clear();
            for (d, g) in direction.iter_mut().zip(&grad) {
                *d = -g;
            }
            slope = dot(&grad, &direction);
        }

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            for ((xn, xi), d) in x_new.iter_mut().zip(&x).zip(&direction) {
                *xn = xi + step * d;
            }
            let v = objective(&x_new, &mut grad_new);
            if v.is_finite() && v <= value + ARMIJO_C1 * step * slope {
                accepted = true;
                iterations += 1;
                let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() && sy > 0.0 {
                    if pairs.len() == opts.history {
                        pairs.pop_front();
                    }
                    pairs.push_back((s, y, 1.0 / sy));
                }
                std::mem::swap(&mut x, &mut x_new);
                std::mem::swap(&mut grad, &mut grad_new);
                value = v;
                trace.push(value);
                break;
            }
            step *= 0.5;
        }

        converged = inf_norm(&grad) <= opts.tol;
        if !accepted {
            // no representable decrease left along any direction we can build
            break;
        }
    }

    LbfgsOutcome {
        grad_inf_norm: inf_norm(&grad),
        x,
        value,
        iterations,
        converged,
        trace,
    }
}
