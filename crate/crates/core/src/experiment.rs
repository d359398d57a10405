//! Train-and-evaluate runs over feature configurations.

use std::cmp::Ordering;

use log::{info, warn};

use crate::affix::Stemmer;
use crate::corpus::Corpus;
use crate::crf::{CrfModel, TrainConfig, Trainer};
use crate::error::Result;
use crate::eval::{evaluate, EvalReport, LabelFilter};
use crate::features::{annotate_columns, FeatureConfig, FrequencyTable};
use crate::rmwe::{bio_column, Dictionary};
use crate::template::{default_best_template, parse_template};

type Column = Vec<Vec<String>>;

/// Where the extra (RMWE) column comes from when a config asks for it.
#[derive(Debug, Clone, Default)]
pub enum ExtraColumn {
    #[default]
    None,
    /// Detected with the stemmer's affix list and this dictionary.
    Rmwe(Dictionary),
    /// Supplied per token, for training and test data respectively.
    Provided {
        train: Vec<Vec<String>>,
        test: Vec<Vec<String>>,
    },
}

/// Gold-labeled training and test corpora (surface first, label last)
/// plus everything needed to annotate them.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub train: Corpus,
    pub test: Corpus,
    pub stemmer: Stemmer,
    pub extra: ExtraColumn,
    pub train_config: TrainConfig,
    pub filter: LabelFilter,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: FeatureConfig,
    pub report: EvalReport,
    pub model: CrfModel,
    pub iterations: usize,
}

impl Experiment {
    fn extra_columns(&self) -> (Option<Column>, Option<Column>) {
        match &self.extra {
            ExtraColumn::None => (None, None),
            ExtraColumn::Rmwe(dict) => {
                let affixes = self.stemmer.affixes();
                let owned = |c: &Corpus| {
                    bio_column(c, affixes, dict)
                        .into_iter()
                        .map(|s| s.into_iter().map(String::from).collect())
                        .collect()
                };
                (Some(owned(&self.train)), Some(owned(&self.test)))
            }
            ExtraColumn::Provided { train, test } => (Some(train.clone()), Some(test.clone())),
        }
    }

    /// Annotates both corpora for `config`, trains, tags the test corpus
    /// and scores it.
    pub fn run(&self, config: &FeatureConfig) -> Result<RunResult> {
        let frequencies = FrequencyTable::build(&self.train);
        let (train_extra, test_extra) = if config.use_rmwe {
            self.extra_columns()
        } else {
            (None, None)
        };
        let train = annotate_columns(&self.train, &self.stemmer, &frequencies, train_extra.as_deref(), config)?;
        let test = annotate_columns(&self.test, &self.stemmer, &frequencies, test_extra.as_deref(), config)?;
        let template = parse_template(&default_best_template(config))?;
        let outcome = Trainer::new(&train, &template, self.train_config)?.train(|_| {})?;
        let tagged = outcome.model.tag_corpus(&test)?;
        let report = evaluate(&test, &tagged, &self.filter)?;
        info!(
            "{config}: F {:.2} after {} iterations",
            100.0 * report.f_score,
            outcome.iterations
        );
        Ok(RunResult {
            config: config.clone(),
            report,
            model: outcome.model,
            iterations: outcome.iterations,
        })
    }

    /// Runs every config. A failing config is reported in its row and does
    /// not stop the others. Rows are sorted by F, best first, failures last;
    /// ties keep input order.
    pub fn sweep(&self, configs: &[FeatureConfig]) -> Vec<(FeatureConfig, Result<EvalReport>)> {
        let mut rows: Vec<(FeatureConfig, Result<EvalReport>)> = configs
            .iter()
            .map(|config| {
                let result = self.run(config).map(|r| r.report);
                if let Err(e) = &result {
                    warn!("{config}: {e}");
                }
                (config.clone(), result)
            })
            .collect();
        rows.sort_by(|a, b| match (&a.1, &b.1) {
            (Ok(x), Ok(y)) => y.f_score.partial_cmp(&x.f_score).unwrap_or(Ordering::Equal),
            (Ok(_), Err(_)) => Ordering::Less,
            (Err(_), Ok(_)) => Ordering::Greater,
            (Err(_), Err(_)) => Ordering::Equal,
        });
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affix::AffixList;
    use crate::corpus::parse_column_file;

    fn experiment() -> Experiment {
        let train = parse_column_file("runs V\ndog N\n\ndogs N\nrun V\n\nwalks V\ncat N\n").unwrap();
        let test = parse_column_file("cats N\nwalk V\n").unwrap();
        Experiment {
            train,
            test,
            stemmer: Stemmer::new(AffixList::new::<&str>(&[], &["s"])),
            extra: ExtraColumn::None,
            train_config: TrainConfig::default(),
            filter: LabelFilter::All,
        }
    }

    #[test]
    fn stems_generalize() {
        let config: FeatureConfig = "W[-0,+0], SW[-0,+0]".parse().unwrap();
        let result = experiment().run(&config).unwrap();
        assert_eq!(result.report.f_score, 1.0);
    }

    #[test]
    fn sweep_keeps_failures() {
        let good = FeatureConfig::default();
        let bad = FeatureConfig::default().with_rmwe(true);
        let rows = experiment().sweep(&[bad.clone(), good.clone()]);
        assert_eq!(rows[0].0, good);
        assert!(rows[0].1.is_ok());
        assert!(rows[1].1.is_err());
    }
}
