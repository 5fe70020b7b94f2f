use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use super::lbfgs::{minimize, LbfgsOptions};
use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticConfig {
    /// L2 penalty on the weights (the bias is never penalized). The training
    /// objective is `(sum of log-losses + l2_lambda/2 * |w|^2) / n_rows`.
    pub l2_lambda: f64,
    /// Stop when the largest gradient entry falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self { l2_lambda: 1.0, tol: 1e-6, max_iter: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitInfo {
    pub iterations: usize,
    pub converged: bool,
    pub final_loss: f64,
    pub gradient_inf_norm: f64,
    /// Objective after each accepted optimizer step, starting at the initial point.
    pub loss_trace: Vec<f64>,
}

/// Binary (sigmoid) or multinomial (softmax) logistic regression.
///
/// With two classes `weights` has one row scoring the larger label; with
/// more it has one row per class.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub classes: Vec<usize>,
    pub weights: Array2<f64>,
    pub bias: Vec<f64>,
    pub l2_lambda: f64,
    pub fit_info: FitInfo,
}

/// Training objective over a fixed design matrix, exposed for gradient checks.
#[derive(Debug, Clone)]
pub struct LogisticObjective<'a> {
    x: ArrayView2<'a, f64>,
    /// Class indices into `0..n_classes`.
    targets: Vec<usize>,
    n_classes: usize,
    l2_lambda: f64,
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl<'a> LogisticObjective<'a> {
    pub fn new(x: ArrayView2<'a, f64>, targets: Vec<usize>, n_classes: usize, l2_lambda: f64) -> Self {
        Self { x, targets, n_classes, l2_lambda }
    }

    /// Rows of the weight block (1 for binary).
    pub fn n_score_rows(&self) -> usize {
        if self.n_classes == 2 { 1 } else { self.n_classes }
    }

    /// Parameters are the row-major weight block followed by the biases.
    pub fn n_params(&self) -> usize {
        self.n_score_rows() * (self.x.ncols() + 1)
    }

    pub fn loss(&self, params: &[f64]) -> f64 {
        let mut g = vec![0.0; params.len()];
        self.loss_and_gradient(params, &mut g)
    }

    pub fn loss_and_gradient(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        if self.n_classes == 2 {
            self.binary(params, grad)
        } else {
            self.multinomial(params, grad)
        }
    }

    fn binary(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.x.ncols();
        let n = self.x.nrows() as f64;
        let w = ArrayView1::from(&params[..d]);
        let b = params[d];
        let z = self.x.dot(&w) + b;

        let mut loss = 0.0;
        let mut residual = Array1::<f64>::zeros(z.len());
        for (i, &zi) in z.iter().enumerate() {
            let yi = self.targets[i] as f64;
            loss += softplus(zi) - yi * zi;
            residual[i] = sigmoid(zi) - yi;
        }
        let penalty: f64 = w.iter().map(|v| v * v).sum::<f64>() * 0.5 * self.l2_lambda;

        let gw = self.x.t().dot(&residual);
        for j in 0..d {
            grad[j] = (gw[j] + self.l2_lambda * w[j]) / n;
        }
        grad[d] = residual.sum() / n;
        (loss + penalty) / n
    }

    fn multinomial(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.x.ncols();
        let c = self.n_classes;
        let n = self.x.nrows() as f64;
        let w = ArrayView2::from_shape((c, d), &params[..c * d]).expect("param layout");
        let bias = &params[c * d..];

        let mut scores = self.x.dot(&w.t());
        let mut loss = 0.0;
        for (i, mut row) in scores.axis_iter_mut(Axis(0)).enumerate() {
            for (k, s) in row.iter_mut().enumerate() {
                *s += bias[k];
            }
            let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            let sum_exp: f64 = row.iter().map(|v| (v - max).exp()).sum();
            let lse = max + sum_exp.ln();
            loss += lse - row[self.targets[i]];
            // turn the row into softmax minus one-hot
            row.mapv_inplace(|v| (v - lse).exp());
            row[self.targets[i]] -= 1.0;
        }
        let penalty: f64 = w.iter().map(|v| v * v).sum::<f64>() * 0.5 * self.l2_lambda;

        let gw = scores.t().dot(&self.x);
        for k in 0..c {
            for j in 0..d {
                grad[k * d + j] = (gw[[k, j]] + self.l2_lambda * w[[k, j]]) / n;
            }
            grad[c * d + k] = scores.column(k).sum() / n;
        }
        (loss + penalty) / n
    }
}

fn class_index(classes: &[usize], y: &[usize]) -> Vec<usize> {
    y.iter()
        .map(|label| classes.binary_search(label).expect("label in class list"))
        .collect()
}

/// Fits by deterministic full-batch L-BFGS from a zero start.
pub fn fit_logistic(
    x: ArrayView2<f64>,
    y: &[usize],
    config: &LogisticConfig,
) -> Result<LogisticModel, ModelError> {
    if x.nrows() != y.len() {
        return Err(ModelError::DimensionMismatch { expected: x.nrows(), found: y.len() });
    }
    if x.nrows() < 2 {
        return Err(ModelError::TooFewSamples(x.nrows()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteInput);
    }
    if config.l2_lambda.is_nan() || config.l2_lambda < 0.0 || config.tol.is_nan() || config.tol <= 0.0 {
        return Err(ModelError::InvalidArgument(format!("bad solver config {config:?}")));
    }
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(ModelError::SingleClassInput);
    }

    let targets = class_index(&classes, y);
    let objective = LogisticObjective::new(x, targets, classes.len(), config.l2_lambda);
    let rows = objective.n_score_rows();
    let d = x.ncols();

    let outcome = minimize(
        |p, g| objective.loss_and_gradient(p, g),
        vec![0.0; objective.n_params()],
        LbfgsOptions { tol: config.tol, max_iter: config.max_iter, history: 10 },
    );
    if !outcome.converged {
        log::warn!(
            "logistic fit stopped after {} iterations with gradient {:.3e} > tol {:.1e}",
            outcome.iterations,
            outcome.grad_inf_norm,
            config.tol
        );
    }

    let weights = Array2::from_shape_vec((rows, d), outcome.x[..rows * d].to_vec()).expect("param layout");
    let bias = outcome.x[rows * d..].to_vec();
    Ok(LogisticModel {
        classes,
        weights,
        bias,
        l2_lambda: config.l2_lambda,
        fit_info: FitInfo {
            iterations: outcome.iterations,
            converged: outcome.converged,
            final_loss: outcome.value,
            gradient_inf_norm: outcome.grad_inf_norm,
            loss_trace: outcome.trace,
        },
    })
}

impl LogisticModel {
    pub fn n_features(&self) -> usize {
        self.weights.ncols()
    }

    pub fn is_binary(&self) -> bool {
        self.classes.len() == 2
    }

    /// Per-feature importance: `|w|` for binary models, summed `|w|` over
    /// classes otherwise.
    pub fn feature_importance(&self) -> Vec<f64> {
        self.weights
            .axis_iter(Axis(1))
            .map(|col| col.iter().map(|v| v.abs()).sum())
            .collect()
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>, ModelError> {
        if x.ncols() != self.n_features() {
            return Err(ModelError::DimensionMismatch { expected: self.n_features(), found: x.ncols() });
        }
        let scores = x.dot(&self.weights.t());
        let predictions = scores
            .axis_iter(Axis(0))
            .map(|row| {
                if self.is_binary() {
                    // ties go to the lower class
                    if row[0] + self.bias[0] > 0.0 { self.classes[1] } else { self.classes[0] }
                } else {
                    let mut best = 0;
                    let mut best_score = f64::NEG_INFINITY;
                    for (k, s) in row.iter().enumerate() {
                        let v = s + self.bias[k];
                        if v > best_score {
                            best = k;
                            best_score = v;
                        }
                    }
                    self.classes[best]
                }
            })
            .collect();
        Ok(predictions)
    }
}

/// Fraction of rows whose predicted class equals the label.
pub fn predict_accuracy(model: &LogisticModel, x: ArrayView2<f64>, y: &[usize]) -> Result<f64, ModelError> {
    if x.nrows() != y.len() {
        return Err(ModelError::DimensionMismatch { expected: x.nrows(), found: y.len() });
    }
    if y.is_empty() {
        return Ok(0.0);
    }
    let predicted = model.predict(x)?;
    let correct = predicted.iter().zip(y).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / y.len() as f64)
}
