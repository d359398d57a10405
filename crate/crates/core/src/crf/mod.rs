//! Linear-chain conditional random field.
//!
//! Every observation string produced by a template rule owns a block of
//! weights: `labels` weights for a unigram (`U`) observation, one per current
//! label, and `(labels + 1) * labels` for a bigram (`B`) observation, one per
//! (previous, current) pair where previous index `labels` stands for the
//! begin-of-sentence context. All lattice arithmetic is done in log space.

mod io;
mod lattice;
mod objective;
mod optimize;
mod train;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::corpus::{Corpus, Sentence};
use crate::error::{Error, Result};
use crate::template::{parse_template, Template};

pub use io::{load_model, read_model, save_model, write_model, FORMAT_VERSION};
pub use lattice::Lattice;
pub use objective::{log_likelihood, log_likelihood_and_gradient};
pub use optimize::{minimize, Method, MinimizeOptions, Minimum, Progress, StopReason};
pub use train::{train, IterationLog, TrainConfig, TrainOutcome, Trainer};

/// One sentence mapped onto weight offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    unigram: Vec<Vec<usize>>,
    bigram: Vec<Vec<usize>>,
    /// Gold label indices; empty when unlabeled.
    labels: Vec<usize>,
}

impl Instance {
    pub fn len(&self) -> usize {
        self.unigram.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unigram.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Sum of the weights of every feature the path fires. Computed straight
/// from the feature lists, without the dense score tables.
fn path_score(instance: &Instance, path: &[usize], weights: &[f64], labels: usize) -> f64 {
    let mut score = 0.0;
    let mut prev = labels;
    for (t, &y) in path.iter().enumerate() {
        for &offset in &instance.unigram[t] {
            score += weights[offset + y];
        }
        for &offset in &instance.bigram[t] {
            score += weights[offset + prev * labels + y];
        }
        prev = y;
    }
    score
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FeatureKind {
    Unigram,
    Bigram,
}

impl FeatureKind {
    fn of(feature: &str) -> Self {
        if feature.starts_with('B') {
            FeatureKind::Bigram
        } else {
            FeatureKind::Unigram
        }
    }

    fn block(self, labels: usize) -> usize {
        match self {
            FeatureKind::Unigram => labels,
            FeatureKind::Bigram => (labels + 1) * labels,
        }
    }
}

/// A trained (or hand-built) tagger.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    template: Template,
    feature_columns: usize,
    features: Vec<String>,
    /// Observation string to position in `features`.
    feature_index: HashMap<String, usize>,
    offsets: Vec<usize>,
    weights: Vec<f64>,
}

impl CrfModel {
    /// Assembles a model. `features` are observation strings in index
    /// order; `weights` must match the resulting block layout.
    pub fn from_parts(
        labels: Vec<String>,
        template_text: &str,
        feature_columns: usize,
        features: Vec<String>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let template = parse_template(template_text)?;
        template.validate(feature_columns)?;
        if labels.is_empty() {
            return Err(Error::CorruptModel("model without labels".into()));
        }
        let mut label_index = HashMap::new();
        for (i, label) in labels.iter().enumerate() {
            if label_index.insert(label.clone(), i).is_some() {
                return Err(Error::CorruptModel(format!("duplicate label `{label}`")));
            }
        }
        let mut feature_index = HashMap::new();
        let mut offsets = Vec::with_capacity(features.len());
        let mut next = 0;
        for (i, feature) in features.iter().enumerate() {
            if feature_index.insert(feature.clone(), i).is_some() {
                return Err(Error::CorruptModel(format!("duplicate feature `{feature}`")));
            }
            offsets.push(next);
            next += FeatureKind::of(feature).block(labels.len());
        }
        if weights.len() != next {
            return Err(Error::CorruptModel(format!(
                "{} weights for a layout of {next}",
                weights.len()
            )));
        }
        Ok(CrfModel {
            labels,
            label_index,
            template,
            feature_columns,
            features,
            feature_index,
            offsets,
            weights,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    /// Feature columns the template reads (the label column excluded).
    pub fn feature_columns(&self) -> usize {
        self.feature_columns
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same model with replaced weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), self.weights.len(), "weight vector length");
        CrfModel {
            weights,
            ..self.clone()
        }
    }

    /// Weight for observation `feature` firing with `label` (after `prev`
    /// for bigram observations; `None` is the sentence start).
    pub fn weight(&self, feature: &str, prev: Option<&str>, label: &str) -> Option<f64> {
        let id = *self.feature_index.get(feature)?;
        let y = *self.label_index.get(label)?;
        let offset = self.offsets[id];
        match FeatureKind::of(feature) {
            FeatureKind::Unigram => Some(self.weights[offset + y]),
            FeatureKind::Bigram => {
                let p = match prev {
                    Some(prev) => *self.label_index.get(prev)?,
                    None => self.labels.len(),
                };
                Some(self.weights[offset + p * self.labels.len() + y])
            }
        }
    }

    pub fn label_id(&self, label: &str) -> Result<usize> {
        self.label_index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn check_width(&self, sentence: &Sentence) -> Result<()> {
        let width = sentence.tokens()[0].width();
        if width < self.feature_columns {
            return Err(Error::MissingColumns {
                needed: self.feature_columns,
                found: width,
            });
        }
        Ok(())
    }

    /// Encodes the feature columns of `sentence`. Observations missing
    /// from the index contribute nothing.
    pub fn encode(&self, sentence: &Sentence) -> Result<Instance> {
        self.check_width(sentence)?;
        let mut unigram = Vec::with_capacity(sentence.len());
        let mut bigram = Vec::with_capacity(sentence.len());
        for t in 0..sentence.len() {
            let (u, b) = self.template.expand_split(sentence, t);
            let lookup = |features: Vec<String>| -> Vec<usize> {
                features
                    .iter()
                    .filter_map(|f| self.feature_index.get(f).map(|&id| self.offsets[id]))
                    .collect()
            };
            unigram.push(lookup(u));
            bigram.push(lookup(b));
        }
        Ok(Instance {
            unigram,
            bigram,
            labels: Vec::new(),
        })
    }

    /// Encodes a sentence whose last column is the gold label.
    pub fn encode_labeled(&self, sentence: &Sentence) -> Result<Instance> {
        let mut instance = self.encode(sentence)?;
        instance.labels = sentence
            .labels()
            .into_iter()
            .map(|l| self.label_id(l))
            .collect::<Result<_>>()?;
        Ok(instance)
    }

    fn label_ids<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.label_id(l.as_ref())).collect()
    }

    /// Unnormalized log-score of a label sequence.
    pub fn sequence_score<S: AsRef<str>>(&self, sentence: &Sentence, labels: &[S]) -> Result<f64> {
        if labels.len() != sentence.len() {
            return Err(Error::Alignment(format!(
                "{} labels for {} tokens",
                labels.len(),
                sentence.len()
            )));
        }
        let path = self.label_ids(labels)?;
        let instance = self.encode(sentence)?;
        Ok(path_score(&instance, &path, &self.weights, self.labels.len()))
    }

    pub fn forward_backward(&self, sentence: &Sentence) -> Result<Lattice> {
        let instance = self.encode(sentence)?;
        let scores = lattice::Scores::new(&instance, &self.weights, self.labels.len());
        Ok(Lattice::compute(&scores))
    }

    /// `log P(labels | sentence)`.
    pub fn log_probability<S: AsRef<str>>(&self, sentence: &Sentence, labels: &[S]) -> Result<f64> {
        let score = self.sequence_score(sentence, labels)?;
        Ok(score - self.forward_backward(sentence)?.log_z())
    }

    /// Highest-scoring label index path and its score.
    pub fn viterbi_ids(&self, sentence: &Sentence) -> Result<(Vec<usize>, f64)> {
        let instance = self.encode(sentence)?;
        let scores = lattice::Scores::new(&instance, &self.weights, self.labels.len());
        Ok(lattice::viterbi(&scores))
    }

    /// Highest-scoring label sequence and its score.
    pub fn viterbi(&self, sentence: &Sentence) -> Result<(Vec<&str>, f64)> {
        let (path, score) = self.viterbi_ids(sentence)?;
        Ok((path.into_iter().map(|y| self.labels[y].as_str()).collect(), score))
    }

    /// Appends a predicted-label column to every token.
    pub fn tag_corpus(&self, corpus: &Corpus) -> Result<Corpus> {
        let predictions: Vec<Vec<&str>> = corpus
            .sentences()
            .par_iter()
            .map(|s| self.viterbi(s).map(|(path, _)| path))
            .collect::<Result<_>>()?;
        corpus.append_column(&predictions)
    }
}
