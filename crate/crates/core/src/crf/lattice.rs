//! Log-space lattice computations for one encoded sentence.

use super::Instance;

pub(crate) fn log_sum_exp<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let values = values.into_iter();
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Dense state and transition scores for one sentence.
///
/// `trans(t, prev, y)` with `prev == labels` is the transition out of the
/// begin-of-sentence context, used only at `t == 0`.
#[derive(Debug, Clone)]
pub(crate) struct Scores {
    len: usize,
    labels: usize,
    state: Vec<f64>,
    /// `len * (labels + 1) * labels`, empty when there are no bigram features.
    trans: Vec<f64>,
}

impl Scores {
    pub(crate) fn new(instance: &Instance, weights: &[f64], labels: usize) -> Self {
        let len = instance.len();
        let mut state = vec![0.0; len * labels];
        for (t, features) in instance.unigram.iter().enumerate() {
            let row = &mut state[t * labels..(t + 1) * labels];
            for &offset in features {
                for (y, cell) in row.iter_mut().enumerate() {
                    *cell += weights[offset + y];
                }
            }
        }
        let has_bigram = instance.bigram.iter().any(|b| !b.is_empty());
        let block = (labels + 1) * labels;
        let mut trans = Vec::new();
        if has_bigram {
            trans = vec![0.0; len * block];
            for (t, features) in instance.bigram.iter().enumerate() {
                let matrix = &mut trans[t * block..(t + 1) * block];
                for &offset in features {
                    for (cell, w) in matrix.iter_mut().zip(&weights[offset..offset + block]) {
                        *cell += w;
                    }
                }
            }
        }
        Scores {
            len,
            labels,
            state,
            trans,
        }
    }

    #[inline]
    pub(crate) fn state(&self, t: usize, y: usize) -> f64 {
        self.state[t * self.labels + y]
    }

    #[inline]
    pub(crate) fn trans(&self, t: usize, prev: usize, y: usize) -> f64 {
        if self.trans.is_empty() {
            0.0
        } else {
            self.trans[(t * (self.labels + 1) + prev) * self.labels + y]
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn labels(&self) -> usize {
        self.labels
    }
}

/// Forward and backward log-scores of one sentence.
#[derive(Debug, Clone)]
pub struct Lattice {
    len: usize,
    labels: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    log_z: f64,
}

impl Lattice {
    pub(crate) fn compute(scores: &Scores) -> Self {
        let (len, labels) = (scores.len(), scores.labels());
        let bos = labels;
        let mut alpha = vec![0.0; len * labels];
        let mut beta = vec![0.0; len * labels];

        for (y, cell) in alpha[..labels].iter_mut().enumerate() {
            *cell = scores.state(0, y) + scores.trans(0, bos, y);
        }
        for t in 1..len {
            for y in 0..labels {
                let incoming = (0..labels).map(|p| alpha[(t - 1) * labels + p] + scores.trans(t, p, y));
                alpha[t * labels + y] = log_sum_exp(incoming) + scores.state(t, y);
            }
        }
        for t in (0..len.saturating_sub(1)).rev() {
            for p in 0..labels {
                let outgoing = (0..labels)
                    .map(|y| scores.trans(t + 1, p, y) + scores.state(t + 1, y) + beta[(t + 1) * labels + y]);
                beta[t * labels + p] = log_sum_exp(outgoing);
            }
        }
        let log_z = log_sum_exp(alpha[(len - 1) * labels..].iter().copied());
        debug_assert!(!log_z.is_nan());
        Lattice {
            len,
            labels,
            alpha,
            beta,
            log_z,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    /// Log partition function.
    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn alpha(&self, t: usize, y: usize) -> f64 {
        self.alpha[t * self.labels + y]
    }

    pub fn beta(&self, t: usize, y: usize) -> f64 {
        self.beta[t * self.labels + y]
    }

    /// `P(y_t = y | x)`.
    pub fn marginal(&self, t: usize, y: usize) -> f64 {
        (self.alpha(t, y) + self.beta(t, y) - self.log_z).exp()
    }
}

/// Best label path and its score. Ties go to the lowest label index.
pub(crate) fn viterbi(scores: &Scores) -> (Vec<usize>, f64) {
    let (len, labels) = (scores.len(), scores.labels());
    let mut delta = vec![0.0; len * labels];
    let mut back = vec![0usize; len * labels];
    for (y, cell) in delta[..labels].iter_mut().enumerate() {
        *cell = scores.state(0, y) + scores.trans(0, labels, y);
    }
    for t in 1..len {
        for y in 0..labels {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for p in 0..labels {
                let candidate = delta[(t - 1) * labels + p] + scores.trans(t, p, y);
                if candidate > best {
                    best = candidate;
                    arg = p;
                }
            }
            delta[t * labels + y] = best + scores.state(t, y);
            back[t * labels + y] = arg;
        }
    }
    let last = &delta[(len - 1) * labels..];
    let mut end = 0;
    for y in 1..labels {
        if last[y] > last[end] {
            end = y;
        }
    }
    let score = last[end];
    let mut path = vec![0; len];
    path[len - 1] = end;
    for t in (1..len).rev() {
        path[t - 1] = back[t * labels + path[t]];
    }
    (path, score)
}
