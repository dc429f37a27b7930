//! L2-regularized logistic regression fit by full-batch gradient descent.
//!
//! Features are standardized with the training mean and deviation. The step
//! size is the inverse of a Lipschitz bound on the loss gradient,
//! `mean_i (1 + |x_i|^2) / 4 + l2`, which makes every step a descent step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    feature_mean: Vec<f64>,
    feature_scale: Vec<f64>,
    /// Regularized training loss before the first step and after each epoch.
    pub loss_history: Vec<f64>,
}

impl LogisticModel {
    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.feature_mean)
            .zip(&self.feature_scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let z = linear(&self.weights, self.intercept, &self.standardize(x));
        sigmoid(z)
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.predict_proba(x) >= 0.5
    }

    pub fn accuracy(&self, samples: &[(Vec<f64>, bool)]) -> f64 {
        if samples.is_empty() {
            return 0.0;
        }
        let hits = samples.iter().filter(|(x, y)| self.predict(x) == *y).count();
        hits as f64 / samples.len() as f64
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(w: &[f64], b: f64, x: &[f64]) -> f64 {
    b + w.iter().zip(x).map(|(a, c)| a * c).sum::<f64>()
}

fn loss(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[bool], l2: f64) -> f64 {
    let data: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| {
            let z = linear(w, b, x);
            if y {
                softplus(-z)
            } else {
                softplus(z)
            }
        })
        .sum::<f64>()
        / xs.len() as f64;
    data + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
}

pub fn train_linear_classifier(
    samples: &[(Vec<f64>, bool)],
    l2: f64,
    epochs: usize,
    seed: u64,
) -> Result<LogisticModel> {
    let Some((first, _)) = samples.first() else {
        return Err(Error::DegenerateData("no training samples".into()));
    };
    let dim = first.len();
    if samples.iter().any(|(x, _)| x.len() != dim) {
        return Err(Error::DegenerateData("inconsistent feature dimension".into()));
    }
    let positives = samples.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == samples.len() {
        return Err(Error::DegenerateData("training labels contain a single class".into()));
    }
    if !(l2 >= 0.0 && l2.is_finite()) {
        return Err(Error::InvalidParameter(format!("l2 penalty {l2} must be non-negative")));
    }

    let count = samples.len() as f64;
    let mut mean = vec![0.0; dim];
    for (x, _) in samples {
        for (m, v) in mean.iter_mut().zip(x) {
            *m += v / count;
        }
    }
    let mut scale = vec![0.0; dim];
    for (x, _) in samples {
        for ((s, v), m) in scale.iter_mut().zip(x).zip(&mean) {
            *s += (v - m).powi(2) / count;
        }
    }
    for s in &mut scale {
        *s = if *s > 0.0 { s.sqrt() } else { 1.0 };
    }
    let xs: Vec<Vec<f64>> = samples
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(&mean)
                .zip(&scale)
                .map(|((v, m), s)| (v - m) / s)
                .collect()
        })
        .collect();
    let ys: Vec<bool> = samples.iter().map(|(_, y)| *y).collect();

    let lipschitz = 0.25 * xs.iter().map(|x| 1.0 + x.iter().map(|v| v * v).sum::<f64>()).sum::<f64>()
        / count
        + l2;
    let step = 1.0 / lipschitz;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.01..0.01)).collect();
    let mut b = 0.0;
    let mut history = vec![loss(&w, b, &xs, &ys, l2)];
    for _ in 0..epochs {
        let mut grad_w = vec![0.0; dim];
        let mut grad_b = 0.0;
        for (x, &y) in xs.iter().zip(&ys) {
            let residual = sigmoid(linear(&w, b, x)) - if y { 1.0 } else { 0.0 };
            grad_b += residual / count;
            for (g, v) in grad_w.iter_mut().zip(x) {
                *g += residual * v / count;
            }
        }
        for (wi, g) in w.iter_mut().zip(&grad_w) {
            *wi -= step * (g + l2 * *wi);
        }
        b -= step * grad_b;
        history.push(loss(&w, b, &xs, &ys, l2));
    }
    Ok(LogisticModel {
        weights: w,
        intercept: b,
        feature_mean: mean,
        feature_scale: scale,
        loss_history: history,
    })
}
