use std::collections::{BTreeSet, HashMap};

use log::{info, warn};

use super::objective::{objective_and_gradient, objective_value};
use super::optimize::{minimize, Method, MinimizeOptions, StopReason};
use super::{CrfModel, Instance};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::template::Template;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Gaussian prior standard deviation.
    pub sigma: f64,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    /// Observations seen fewer times than this in training are dropped.
    pub min_feature_count: usize,
    pub optimizer: Method,
    pub history: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            sigma: 1.0,
            max_iterations: 500,
            gradient_tolerance: 1e-4,
            min_feature_count: 1,
            optimizer: Method::Lbfgs,
            history: 10,
        }
    }
}

/// One optimizer iteration, in terms of the (maximized) objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationLog {
    pub iteration: usize,
    pub objective: f64,
    pub gradient_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: CrfModel,
    /// Penalized log-likelihood at the returned weights.
    pub objective: f64,
    pub iterations: usize,
    pub stop: StopReason,
}

impl TrainOutcome {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::GradientTolerance
    }
}

/// Training data encoded against a fixed feature index.
#[derive(Debug)]
pub struct Trainer {
    skeleton: CrfModel,
    instances: Vec<Instance>,
    config: TrainConfig,
}

impl Trainer {
    /// Builds the label set and observation index from `corpus`, whose last
    /// column is the gold label.
    pub fn new(corpus: &Corpus, template: &Template, config: TrainConfig) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if !(config.sigma > 0.0 && config.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be positive, got {}",
                config.sigma
            )));
        }
        let feature_columns = corpus.column_count() - 1;
        let needed = template.max_column().map_or(1, |c| c + 1);
        if feature_columns < needed {
            return Err(Error::MissingColumns {
                needed: needed + 1,
                found: corpus.column_count(),
            });
        }

        let labels: Vec<String> = corpus
            .tokens()
            .map(|t| t.last().to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if labels.len() == 1 {
            warn!("training data has a single label `{}`", labels[0]);
        }

        let mut order: Vec<String> = Vec::new();
        let mut counts: HashMap<String, usize> = HashMap::new();
        for sentence in corpus.sentences() {
            for t in 0..sentence.len() {
                let (unigram, bigram) = template.expand_split(sentence, t);
                for feature in unigram.into_iter().chain(bigram) {
                    let count = counts.entry(feature.clone()).or_insert(0);
                    if *count == 0 {
                        order.push(feature);
                    }
                    *count += 1;
                }
            }
        }
        let features: Vec<String> = order
            .into_iter()
            .filter(|f| counts[f] >= config.min_feature_count)
            .collect();

        let width: usize = features
            .iter()
            .map(|f| super::FeatureKind::of(f).block(labels.len()))
            .sum();
        let skeleton = CrfModel::from_parts(labels, template.text(), feature_columns, features, vec![0.0; width])?;
        let instances = corpus
            .sentences()
            .iter()
            .map(|s| skeleton.encode_labeled(s))
            .collect::<Result<Vec<_>>>()?;
        info!(
            "{} labels, {} observations, {} weights, {} sentences",
            skeleton.labels().len(),
            skeleton.features().len(),
            width,
            instances.len()
        );
        Ok(Trainer {
            skeleton,
            instances,
            config,
        })
    }

    pub fn num_weights(&self) -> usize {
        self.skeleton.weights().len()
    }

    /// Zero-weight model carrying the label set and observation index.
    pub fn skeleton(&self) -> &CrfModel {
        &self.skeleton
    }

    /// Penalized log-likelihood and gradient at `weights`.
    pub fn objective_and_gradient(&self, weights: &[f64]) -> (f64, Vec<f64>) {
        objective_and_gradient(
            &self.instances,
            weights,
            self.skeleton.labels().len(),
            self.config.sigma,
        )
    }

    pub fn objective(&self, weights: &[f64]) -> f64 {
        objective_value(
            &self.instances,
            weights,
            self.skeleton.labels().len(),
            self.config.sigma,
        )
    }

    /// Maximizes the objective starting at `init`.
    pub fn train_from<O: FnMut(&IterationLog)>(&self, init: Vec<f64>, mut observer: O) -> Result<TrainOutcome> {
        if init.len() != self.num_weights() {
            return Err(Error::InvalidConfig(format!(
                "initial weights have length {}, expected {}",
                init.len(),
                self.num_weights()
            )));
        }
        let options = MinimizeOptions {
            method: self.config.optimizer,
            history: self.config.history,
            max_iterations: self.config.max_iterations,
            gradient_tolerance: self.config.gradient_tolerance,
        };
        let negated = |w: &[f64]| {
            let (value, mut gradient) = self.objective_and_gradient(w);
            gradient.iter_mut().for_each(|g| *g = -*g);
            (-value, gradient)
        };
        let minimum = minimize(negated, init, &options, |p| {
            observer(&IterationLog {
                iteration: p.iteration,
                objective: -p.value,
                gradient_norm: p.gradient_norm,
                step: p.step,
            })
        });
        if minimum.stop != StopReason::GradientTolerance {
            warn!(
                "optimizer stopped ({:?}) after {} iterations with gradient norm {:.3e}",
                minimum.stop, minimum.iterations, minimum.gradient_norm
            );
        }
        Ok(TrainOutcome {
            model: self.skeleton.with_weights(minimum.x),
            objective: -minimum.value,
            iterations: minimum.iterations,
            stop: minimum.stop,
        })
    }

    pub fn train<O: FnMut(&IterationLog)>(&self, observer: O) -> Result<TrainOutcome> {
        self.train_from(vec![0.0; self.num_weights()], observer)
    }
}

/// Trains a model from zero weights.
pub fn train(corpus: &Corpus, template: &Template, config: TrainConfig) -> Result<CrfModel> {
    Ok(Trainer::new(corpus, template, config)?.train(|_| {})?.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_column_file;
    use crate::template::parse_template;

    #[test]
    fn learns_a_separable_toy() {
        let corpus = parse_column_file("a N\nb V\n\nb V\na N\n\na N\n").unwrap();
        let template = parse_template("U00:%x[0,0]\nB\n").unwrap();
        let model = train(&corpus, &template, TrainConfig::default()).unwrap();
        let tagged = model.tag_corpus(&corpus).unwrap();
        for token in tagged.tokens() {
            assert_eq!(token.column(1), token.column(2));
        }
    }

    #[test]
    fn min_count_prunes() {
        let corpus = parse_column_file("a N\nb V\n\na N\n").unwrap();
        let template = parse_template("U00:%x[0,0]\n").unwrap();
        let config = TrainConfig {
            min_feature_count: 2,
            ..TrainConfig::default()
        };
        let trainer = Trainer::new(&corpus, &template, config).unwrap();
        assert_eq!(trainer.skeleton().features(), ["U00:a".to_string()]);
        assert_eq!(trainer.num_weights(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        let template = parse_template("U00:%x[0,1]\n").unwrap();
        let corpus = parse_column_file("a N\n").unwrap();
        assert!(matches!(
            Trainer::new(&corpus, &template, TrainConfig::default()),
            Err(Error::MissingColumns { .. })
        ));
        assert!(matches!(
            Trainer::new(&Corpus::empty(), &template, TrainConfig::default()),
            Err(Error::EmptyCorpus)
        ));
    }
}
