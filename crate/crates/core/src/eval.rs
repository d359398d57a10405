//! Recall, precision and F-measure of a predicted label column.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Which labels count as answers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum LabelFilter {
    #[default]
    All,
    Exclude(BTreeSet<String>),
    Only(BTreeSet<String>),
}

impl LabelFilter {
    pub fn exclude<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        LabelFilter::Exclude(labels.into_iter().map(Into::into).collect())
    }

    pub fn only<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        LabelFilter::Only(labels.into_iter().map(Into::into).collect())
    }

    pub fn accepts(&self, label: &str) -> bool {
        match self {
            LabelFilter::All => true,
            LabelFilter::Exclude(set) => !set.contains(label),
            LabelFilter::Only(set) => set.contains(label),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Scores {
    pub recall: f64,
    pub precision: f64,
    pub f_score: f64,
    pub correct: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl Scores {
    fn from_counts(correct: usize, predicted: usize, gold: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let recall = ratio(correct, gold);
        let precision = ratio(correct, predicted);
        Scores {
            recall,
            precision,
            f_score: f_measure(precision, recall),
            correct,
            predicted,
            gold,
        }
    }
}

/// Balanced F-measure; 0 when both inputs are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub recall: f64,
    pub precision: f64,
    pub f_score: f64,
    pub correct: usize,
    pub predicted: usize,
    pub gold: usize,
    /// Tokens compared, whether or not they pass the filter.
    pub tokens: usize,
    /// Tokens whose predicted label equals the gold label.
    pub matching: usize,
    /// Singleton-filter scores for every label seen in either column.
    pub per_label: BTreeMap<String, Scores>,
    /// Recall had no gold answers to divide by and was set to 0.
    pub recall_undefined: bool,
    /// Precision had no predicted answers to divide by and was set to 0.
    pub precision_undefined: bool,
}

impl EvalReport {
    pub fn accuracy(&self) -> f64 {
        if self.tokens == 0 {
            0.0
        } else {
            self.matching as f64 / self.tokens as f64
        }
    }
}

/// Compares the last column of `predicted` against the last column of
/// `gold`, token by token.
pub fn evaluate(gold: &Corpus, predicted: &Corpus, filter: &LabelFilter) -> Result<EvalReport> {
    if gold.sentences().len() != predicted.sentences().len() {
        return Err(Error::Alignment(format!(
            "{} gold sentences, {} predicted",
            gold.sentences().len(),
            predicted.sentences().len()
        )));
    }
    let mut pairs: Vec<(&str, &str)> = Vec::with_capacity(gold.token_count());
    for (i, (g, p)) in gold.sentences().iter().zip(predicted.sentences()).enumerate() {
        if g.len() != p.len() {
            return Err(Error::Alignment(format!(
                "sentence {}: {} gold tokens, {} predicted",
                i + 1,
                g.len(),
                p.len()
            )));
        }
        pairs.extend(g.tokens().iter().zip(p.tokens()).map(|(a, b)| (a.last(), b.last())));
    }

    let count = |accept: &dyn Fn(&str) -> bool| {
        let mut c = (0, 0, 0);
        for &(g, p) in &pairs {
            if g == p && accept(g) {
                c.0 += 1;
            }
            if accept(p) {
                c.1 += 1;
            }
            if accept(g) {
                c.2 += 1;
            }
        }
        c
    };
    let (correct, n_predicted, n_gold) = count(&|l| filter.accepts(l));
    let overall = Scores::from_counts(correct, n_predicted, n_gold);

    let labels: BTreeSet<&str> = pairs.iter().flat_map(|&(g, p)| [g, p]).collect();
    let per_label = labels
        .into_iter()
        .map(|label| {
            let (c, p, g) = count(&|l| l == label);
            (label.to_string(), Scores::from_counts(c, p, g))
        })
        .collect();

    Ok(EvalReport {
        recall: overall.recall,
        precision: overall.precision,
        f_score: overall.f_score,
        correct,
        predicted: n_predicted,
        gold: n_gold,
        tokens: pairs.len(),
        matching: pairs.iter().filter(|(g, p)| g == p).count(),
        per_label,
        recall_undefined: n_gold == 0,
        precision_undefined: n_predicted == 0,
    })
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tokens     {}", self.tokens)?;
        writeln!(f, "correct    {}", self.correct)?;
        writeln!(f, "predicted  {}", self.predicted)?;
        writeln!(f, "gold       {}", self.gold)?;
        writeln!(f, "accuracy   {:.2}", 100.0 * self.accuracy())?;
        writeln!(f, "R          {:.2}", 100.0 * self.recall)?;
        writeln!(f, "P          {:.2}", 100.0 * self.precision)?;
        writeln!(f, "FS         {:.2}", 100.0 * self.f_score)?;
        if self.recall_undefined {
            writeln!(f, "note       no gold answers; R set to 0")?;
        }
        if self.precision_undefined {
            writeln!(f, "note       no predicted answers; P set to 0")?;
        }
        writeln!(f)?;
        writeln!(f, "{:<16} {:>7} {:>7} {:>7} {:>8}", "label", "R", "P", "FS", "support")?;
        for (label, s) in &self.per_label {
            writeln!(
                f,
                "{:<16} {:>7.2} {:>7.2} {:>7.2} {:>8}",
                label,
                100.0 * s.recall,
                100.0 * s.precision,
                100.0 * s.f_score,
                s.gold
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_column_file;

    fn col(labels: &[&str]) -> Corpus {
        let text: String = labels.iter().enumerate().map(|(i, l)| format!("w{i} {l}\n")).collect();
        parse_column_file(&text).unwrap()
    }

    #[test]
    fn hand_counted_example() {
        let r = evaluate(
            &col(&["N", "V", "N", "V"]),
            &col(&["N", "V", "V", "V"]),
            &LabelFilter::All,
        )
        .unwrap();
        assert_eq!((r.correct, r.predicted, r.gold), (3, 4, 4));
        assert_eq!(r.recall, 0.75);
        assert_eq!(r.precision, 0.75);
        assert_eq!(r.f_score, 0.75);
        let n = r.per_label["N"];
        assert_eq!((n.correct, n.predicted, n.gold), (1, 1, 2));
        assert_eq!(r.per_label["V"].precision, 2.0 / 3.0);
    }

    #[test]
    fn filter_excludes_outside() {
        let gold = col(&["B", "I", "O", "O"]);
        let pred = col(&["B", "O", "O", "B"]);
        let r = evaluate(&gold, &pred, &LabelFilter::exclude(["O"])).unwrap();
        assert_eq!((r.correct, r.predicted, r.gold), (1, 2, 2));
        assert_eq!(r.recall, 0.5);
    }

    #[test]
    fn zero_predictions() {
        let r = evaluate(&col(&["B"]), &col(&["O"]), &LabelFilter::exclude(["O"])).unwrap();
        assert!(r.precision_undefined && !r.recall_undefined);
        assert_eq!((r.precision, r.f_score), (0.0, 0.0));
        assert!(r.to_string().contains("no predicted answers"));
    }

    #[test]
    fn misaligned() {
        assert!(matches!(
            evaluate(&col(&["N"]), &col(&["N", "V"]), &LabelFilter::All),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn f_bounds() {
        let f = f_measure(0.2, 0.9);
        assert!((0.2..=0.9).contains(&f));
        assert_eq!(f, f_measure(0.9, 0.2));
    }
}
