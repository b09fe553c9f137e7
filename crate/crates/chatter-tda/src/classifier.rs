//! L2-regularized logistic regression, trained by damped Newton iteration.
//!
//! Labels are booleans with `true` = chatter (the positive class). The loss
//! is Σ log(1 + exp(−zᵢ(w·xᵢ + c))) + (λ/2)‖w‖² with zᵢ ∈ {−1, +1}; the
//! bias is not penalized. The objective is strictly convex for λ > 0, so
//! the trained model is independent of iteration order.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FEATURE_DIM;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2_strength: f64,
    pub seed: u64,
    pub tol: f64,
}

impl LogisticModel {
    pub fn predict_proba(&self, x: &[f64; FEATURE_DIM]) -> f64 {
        sigmoid(self.margin(x))
    }

    /// Chatter iff the probability reaches 1/2 (ties go to chatter).
    pub fn predict(&self, x: &[f64; FEATURE_DIM]) -> bool {
        self.margin(x) >= 0.0
    }

    fn margin(&self, x: &[f64; FEATURE_DIM]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != FEATURE_DIM {
            return Err(Error::Config(format!(
                "model must carry {FEATURE_DIM} weights, got {}",
                self.weights.len()
            )));
        }
        if !self.weights.iter().all(|w| w.is_finite()) || !self.bias.is_finite() {
            return Err(Error::Config("model coefficients must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub l2_strength: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Recorded in the model for provenance (the data split seed).
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { l2_strength: 1.0, tol: 1e-8, max_iter: 100, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: LogisticModel,
    pub converged: bool,
    pub iterations: usize,
    pub final_grad_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// log(1 + exp(u)) without overflow for large |u|.
fn softplus(u: f64) -> f64 {
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

fn check_shapes(xs: &[[f64; FEATURE_DIM]], ys: &[bool]) -> Result<()> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Domain(format!(
            "need matching nonempty features/labels, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    Ok(())
}

fn loss(xs: &[[f64; FEATURE_DIM]], ys: &[bool], theta: &DVector<f64>, l2: f64) -> f64 {
    let mut total = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let m = x.iter().enumerate().map(|(d, v)| theta[d] * v).sum::<f64>() + theta[FEATURE_DIM];
        let z = if y { 1.0 } else { -1.0 };
        total += softplus(-z * m);
    }
    total + 0.5 * l2 * theta.rows(0, FEATURE_DIM).norm_squared()
}

fn grad(xs: &[[f64; FEATURE_DIM]], ys: &[bool], theta: &DVector<f64>, l2: f64) -> DVector<f64> {
    let mut g = DVector::zeros(FEATURE_DIM + 1);
    for (x, &y) in xs.iter().zip(ys) {
        let m = x.iter().enumerate().map(|(d, v)| theta[d] * v).sum::<f64>() + theta[FEATURE_DIM];
        let z = if y { 1.0 } else { -1.0 };
        let coeff = -z * sigmoid(-z * m);
        for (d, &v) in x.iter().enumerate() {
            g[d] += coeff * v;
        }
        g[FEATURE_DIM] += coeff;
    }
    for d in 0..FEATURE_DIM {
        g[d] += l2 * theta[d];
    }
    g
}

/// The training objective Σᵢ log(1 + exp(−zᵢ·mᵢ)) + (λ/2)‖w‖² at the given
/// weights and bias (bias unregularized), exposed so external checks can
/// probe the optimizer's landscape directly.
pub fn objective(
    xs: &[[f64; FEATURE_DIM]],
    ys: &[bool],
    weights: &[f64; FEATURE_DIM],
    bias: f64,
    l2: f64,
) -> f64 {
    loss(xs, ys, &pack(weights, bias), l2)
}

/// Analytic gradient of [`objective`], ordered as (∂w₁…∂w₈, ∂bias).
pub fn objective_gradient(
    xs: &[[f64; FEATURE_DIM]],
    ys: &[bool],
    weights: &[f64; FEATURE_DIM],
    bias: f64,
    l2: f64,
) -> [f64; FEATURE_DIM + 1] {
    let g = grad(xs, ys, &pack(weights, bias), l2);
    let mut out = [0.0; FEATURE_DIM + 1];
    for (o, v) in out.iter_mut().zip(g.iter()) {
        *o = *v;
    }
    out
}

fn pack(weights: &[f64; FEATURE_DIM], bias: f64) -> DVector<f64> {
    let mut theta = DVector::zeros(FEATURE_DIM + 1);
    for (d, &w) in weights.iter().enumerate() {
        theta[d] = w;
    }
    theta[FEATURE_DIM] = bias;
    theta
}

fn hessian(xs: &[[f64; FEATURE_DIM]], theta: &DVector<f64>, l2: f64) -> DMatrix<f64> {
    let dim = FEATURE_DIM + 1;
    let mut h = DMatrix::zeros(dim, dim);
    for x in xs {
        let m = x.iter().enumerate().map(|(d, v)| theta[d] * v).sum::<f64>() + theta[FEATURE_DIM];
        let s = sigmoid(m);
        let wgt = s * (1.0 - s);
        let mut xt = [0.0; FEATURE_DIM + 1];
        xt[..FEATURE_DIM].copy_from_slice(x);
        xt[FEATURE_DIM] = 1.0;
        for a in 0..dim {
            for b in a..dim {
                h[(a, b)] += wgt * xt[a] * xt[b];
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            h[(a, b)] = h[(b, a)];
        }
    }
    for d in 0..FEATURE_DIM {
        h[(d, d)] += l2;
    }
    h
}

/// Newton iteration with Armijo backtracking; converges when the gradient's
/// ∞-norm drops to `tol`. Refuses single-class training sets.
pub fn train_logistic(
    xs: &[[f64; FEATURE_DIM]],
    ys: &[bool],
    opts: &TrainOptions,
) -> Result<TrainReport> {
    check_shapes(xs, ys)?;
    if ys.iter().all(|&y| y) || ys.iter().all(|&y| !y) {
        return Err(Error::SingleClass);
    }
    if !(opts.l2_strength > 0.0) || !(opts.tol > 0.0) {
        return Err(Error::Config(format!(
            "l2_strength and tol must be positive, got {} and {}",
            opts.l2_strength, opts.tol
        )));
    }
    let dim = FEATURE_DIM + 1;
    let mut theta = DVector::zeros(dim);
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let g = grad(xs, ys, &theta, opts.l2_strength);
        grad_norm = g.amax();
        if grad_norm <= opts.tol {
            break;
        }
        iterations += 1;
        let h = hessian(xs, &theta, opts.l2_strength);
        let step = match Cholesky::new(h) {
            Some(chol) => chol.solve(&(-&g)),
            None => {
                // The bias row can lose positive definiteness to rounding
                // when every sigmoid saturates; a small ridge restores it.
                let mut h = hessian(xs, &theta, opts.l2_strength);
                for d in 0..dim {
                    h[(d, d)] += 1e-10;
                }
                Cholesky::new(h)
                    .ok_or_else(|| Error::Domain("logistic Hessian is not positive definite".into()))?
                    .solve(&(-&g))
            }
        };
        let base = loss(xs, ys, &theta, opts.l2_strength);
        let slope = g.dot(&step);
        let mut t = 1.0;
        for _ in 0..60 {
            let candidate = &theta + t * &step;
            if loss(xs, ys, &candidate, opts.l2_strength) <= base + 1e-4 * t * slope {
                theta = candidate;
                break;
            }
            t *= 0.5;
        }
        grad_norm = grad(xs, ys, &theta, opts.l2_strength).amax();
        if grad_norm <= opts.tol {
            break;
        }
    }
    Ok(TrainReport {
        model: LogisticModel {
            weights: theta.rows(0, FEATURE_DIM).iter().copied().collect(),
            bias: theta[FEATURE_DIM],
            l2_strength: opts.l2_strength,
            seed: opts.seed,
            tol: opts.tol,
        },
        converged: grad_norm <= opts.tol,
        iterations,
        final_grad_norm: grad_norm,
    })
}

/// Deterministic shuffled split: `round(test_fraction·n)` indices for the
/// test set, the rest for training. Both sides must be nonempty.
pub fn train_test_split(
    n: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::Config(format!("test_fraction {test_fraction} outside [0, 1)")));
    }
    let n_test = (test_fraction * n as f64).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::Domain(format!(
            "split of {n} rows at fraction {test_fraction} leaves an empty side"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = indices.split_off(n - n_test);
    Ok((indices, test))
}

pub fn evaluate(
    model: &LogisticModel,
    xs: &[[f64; FEATURE_DIM]],
    ys: &[bool],
) -> Result<ConfusionMatrix> {
    check_shapes(xs, ys)?;
    let mut cm = ConfusionMatrix { tp: 0, fp: 0, fn_: 0, tn: 0 };
    for (x, &y) in xs.iter().zip(ys) {
        match (model.predict(x), y) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}
