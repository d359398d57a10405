//! Penalized conditional log-likelihood and its gradient.
//!
//! ```text
//! objective = sum_i log P(y_i | x_i) - sum_k w_k^2 / (2 sigma^2)
//! d/dw_k    = empirical_k - expected_k - w_k / sigma^2
//! ```

use rayon::prelude::*;

use super::lattice::{Lattice, Scores};
use super::{path_score, CrfModel, Instance};
use crate::corpus::Corpus;
use crate::error::Result;

/// Adds the empirical minus expected feature counts of one sentence to `gradient`
/// and returns its log-likelihood.
fn accumulate(instance: &Instance, weights: &[f64], labels: usize, gradient: &mut [f64]) -> f64 {
    let scores = Scores::new(instance, weights, labels);
    let lattice = Lattice::compute(&scores);
    let gold = &instance.labels;
    let log_z = lattice.log_z();

    let mut prev = labels;
    for (t, &y) in gold.iter().enumerate() {
        for &offset in &instance.unigram[t] {
            gradient[offset + y] += 1.0;
        }
        for &offset in &instance.bigram[t] {
            gradient[offset + prev * labels + y] += 1.0;
        }
        prev = y;
    }

    for t in 0..instance.len() {
        for y in 0..labels {
            let marginal = lattice.marginal(t, y);
            for &offset in &instance.unigram[t] {
                gradient[offset + y] -= marginal;
            }
            if t == 0 {
                for &offset in &instance.bigram[t] {
                    gradient[offset + labels * labels + y] -= marginal;
                }
            }
        }
        if t > 0 && !instance.bigram[t].is_empty() {
            for p in 0..labels {
                let base = lattice.alpha(t - 1, p) - log_z;
                for y in 0..labels {
                    let edge = (base + scores.trans(t, p, y) + scores.state(t, y) + lattice.beta(t, y)).exp();
                    for &offset in &instance.bigram[t] {
                        gradient[offset + p * labels + y] -= edge;
                    }
                }
            }
        }
    }
    path_score(instance, gold, weights, labels) - log_z
}

/// Sentences per reduction chunk: depends on the corpus size only, so the
/// summation order (and the result, bit for bit) is independent of the
/// thread count.
fn chunk_size(sentences: usize) -> usize {
    sentences.div_ceil(64).max(16)
}

pub(crate) fn objective_and_gradient(
    instances: &[Instance],
    weights: &[f64],
    labels: usize,
    sigma: f64,
) -> (f64, Vec<f64>) {
    let partials: Vec<(f64, Vec<f64>)> = instances
        .par_chunks(chunk_size(instances.len()))
        .map(|chunk| {
            let mut gradient = vec![0.0; weights.len()];
            let ll: f64 = chunk
                .iter()
                .map(|instance| accumulate(instance, weights, labels, &mut gradient))
                .sum();
            (ll, gradient)
        })
        .collect();

    let mut objective = 0.0;
    let mut gradient = vec![0.0; weights.len()];
    for (ll, partial) in partials {
        objective += ll;
        for (g, p) in gradient.iter_mut().zip(&partial) {
            *g += p;
        }
    }
    let inv_var = 1.0 / (sigma * sigma);
    for (g, w) in gradient.iter_mut().zip(weights) {
        objective -= 0.5 * w * w * inv_var;
        *g -= w * inv_var;
    }
    (objective, gradient)
}

pub(crate) fn objective_value(instances: &[Instance], weights: &[f64], labels: usize, sigma: f64) -> f64 {
    let ll: f64 = instances
        .iter()
        .map(|instance| {
            let scores = Scores::new(instance, weights, labels);
            path_score(instance, &instance.labels, weights, labels) - Lattice::compute(&scores).log_z()
        })
        .sum();
    let prior: f64 = weights.iter().map(|w| w * w).sum::<f64>() / (2.0 * sigma * sigma);
    ll - prior
}

fn encode_all(corpus: &Corpus, model: &CrfModel) -> Result<Vec<Instance>> {
    corpus.sentences().iter().map(|s| model.encode_labeled(s)).collect()
}

/// Objective and gradient of `model`'s weights on a labeled corpus (gold
/// label in the last column).
pub fn log_likelihood_and_gradient(corpus: &Corpus, model: &CrfModel, sigma: f64) -> Result<(f64, Vec<f64>)> {
    let instances = encode_all(corpus, model)?;
    Ok(objective_and_gradient(
        &instances,
        model.weights(),
        model.labels().len(),
        sigma,
    ))
}

/// Objective only.
pub fn log_likelihood(corpus: &Corpus, model: &CrfModel, sigma: f64) -> Result<f64> {
    let instances = encode_all(corpus, model)?;
    Ok(objective_value(
        &instances,
        model.weights(),
        model.labels().len(),
        sigma,
    ))
}
