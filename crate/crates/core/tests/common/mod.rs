//! Oracles and data generators shared by the integration tests.
//!
//! The oracles score label paths through `expand_templates` and
//! `CrfModel::weight`, never through the lattice or encoded instances.

#![allow(dead_code)]

use crfpos::corpus::{Corpus, Sentence, Token};
use crfpos::crf::CrfModel;
use crfpos::rmwe::{BEGIN, INSIDE, OUTSIDE};
use crfpos::template::expand_templates;
use rand::seq::SliceRandom;
use rand::Rng;

pub const RANDOM_TEMPLATE: &str = "U00:%x[0,0]\nU01:%x[-1,0]\nU02:%x[0,0]/%x[1,0]\nB\n";
pub const VOCAB: [&str; 4] = ["a", "b", "c", "d"];

/// Every observation the random template can produce over `VOCAB`.
fn random_features() -> Vec<String> {
    let mut features = Vec::new();
    let with_bos: Vec<&str> = VOCAB.iter().copied().chain(["_B-1"]).collect();
    let with_eos: Vec<&str> = VOCAB.iter().copied().chain(["_B+1"]).collect();
    for w in VOCAB {
        features.push(format!("U00:{w}"));
    }
    for w in &with_bos {
        features.push(format!("U01:{w}"));
    }
    for w in VOCAB {
        for n in &with_eos {
            features.push(format!("U02:{w}/{n}"));
        }
    }
    features.push("B".into());
    features
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("T{i}")).collect()
}

/// Model over `VOCAB` with `n_labels` labels and weights uniform in [-1, 1].
pub fn random_model<R: Rng>(rng: &mut R, n_labels: usize) -> CrfModel {
    let features = random_features();
    let unigrams = features.len() - 1;
    let width = unigrams * n_labels + (n_labels + 1) * n_labels;
    let weights = (0..width).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    CrfModel::from_parts(labels(n_labels), RANDOM_TEMPLATE, 1, features, weights).unwrap()
}

pub fn random_sentence<R: Rng>(rng: &mut R, len: usize) -> Sentence {
    let words: Vec<&str> = (0..len).map(|_| *VOCAB.choose(rng).unwrap()).collect();
    Sentence::from_words(&words)
}

/// All label-index paths of length `len`, in lexicographic order.
pub fn all_paths(n_labels: usize, len: usize) -> Vec<Vec<usize>> {
    let total = n_labels.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut path = vec![0; len];
            for slot in path.iter_mut().rev() {
                *slot = code % n_labels;
                code /= n_labels;
            }
            path
        })
        .collect()
}

/// Expanded observations per position, computed once per sentence.
pub fn observations(model: &CrfModel, sentence: &Sentence) -> Vec<Vec<String>> {
    (0..sentence.len())
        .map(|t| expand_templates(sentence, t, model.template()))
        .collect()
}

/// Score of a label path, summed feature by feature.
pub fn oracle_score(model: &CrfModel, observed: &[Vec<String>], path: &[usize]) -> f64 {
    let names = model.labels();
    let mut score = 0.0;
    for (t, &y) in path.iter().enumerate() {
        let prev = (t > 0).then(|| names[path[t - 1]].as_str());
        for feature in &observed[t] {
            let w = if feature.starts_with('B') {
                model.weight(feature, prev, &names[y])
            } else {
                model.weight(feature, None, &names[y])
            };
            score += w.unwrap_or(0.0);
        }
    }
    score
}

/// `log sum_y exp(score(y))` by enumeration.
pub fn oracle_log_z(model: &CrfModel, sentence: &Sentence) -> f64 {
    let observed = observations(model, sentence);
    let scores: Vec<f64> = all_paths(model.labels().len(), sentence.len())
        .iter()
        .map(|p| oracle_score(model, &observed, p))
        .collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
}

/// Penalized log-likelihood by enumeration; gold is the last column.
pub fn oracle_objective(model: &CrfModel, corpus: &Corpus, sigma: f64) -> f64 {
    let mut total = 0.0;
    for sentence in corpus.sentences() {
        let observed = observations(model, sentence);
        let gold: Vec<usize> = sentence.labels().iter().map(|l| model.label_id(l).unwrap()).collect();
        total += oracle_score(model, &observed, &gold) - oracle_log_z(model, sentence);
    }
    total - model.weights().iter().map(|w| w * w).sum::<f64>() / (2.0 * sigma * sigma)
}

/// Highest-scoring path by enumeration; ties go to the first path in
/// lexicographic order.
pub fn oracle_viterbi(model: &CrfModel, sentence: &Sentence) -> (Vec<usize>, f64) {
    let observed = observations(model, sentence);
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for path in all_paths(model.labels().len(), sentence.len()) {
        let score = oracle_score(model, &observed, &path);
        if score > best.1 {
            best = (path, score);
        }
    }
    best
}

pub const TOY_TEMPLATE: &str = "U00:%x[0,0]\nB\n";

/// Five labeled sentences over seven words and two labels: 7 * 2 unigram
/// plus 3 * 2 transition weights, 20 in all.
pub fn toy_corpus() -> Corpus {
    crfpos::parse_column_file(
        "a N\nb V\nc N\n\n\
         d V\ne N\n\n\
         f N\ng V\na V\nb N\n\n\
         c N\nc V\n\n\
         e V\nf N\ng N\n",
    )
    .unwrap()
}

/// Letters for synthetic roots and suffixes; the sets are disjoint so a
/// suffix never eats into a root.
const ROOT_LETTERS: [char; 16] = [
    'ক', 'খ', 'গ', 'ঘ', 'চ', 'ছ', 'জ', 'ঝ', 'ট', 'ঠ', 'ড', 'ঢ', 'ত', 'থ', 'দ', 'ধ',
];
const SUFFIX_LETTERS: [char; 10] = ['ন', 'প', 'ফ', 'ব', 'ভ', 'ম', 'য', 'র', 'ল', 'শ'];

/// Suffix to tag. Several suffixes share a tag, as inflections do.
pub const SYNTHETIC_TAGS: [(&str, &str); 8] = [
    ("নপ", "NN"),
    ("নফ", "NN"),
    ("বভ", "VM"),
    ("বম", "VM"),
    ("যর", "JJ"),
    ("লশ", "RB"),
    ("রন", "PR"),
    ("মল", "CC"),
];

/// Tag of a bare root standing alone.
pub const BARE_TAG: &str = "NNP";
/// Tag of both tokens of a reduplicated bare-root pair.
pub const REDUP_TAG: &str = "RDP";

pub fn synthetic_suffixes() -> Vec<String> {
    let suffixes: Vec<String> = SYNTHETIC_TAGS.iter().map(|(s, _)| s.to_string()).collect();
    for s in &suffixes {
        assert!(s.chars().all(|c| SUFFIX_LETTERS.contains(&c)));
    }
    suffixes
}

/// Generated labeled corpus and its extra column.
pub struct Synthetic {
    pub corpus: Corpus,
    /// BIO marking of reduplicated pairs, one cell per token.
    pub extra: Vec<Vec<String>>,
}

/// Roughly `tokens` tokens in sentences of 5 to 14 words. Each token is
/// a suffixed word (tag from its suffix), a bare root (`BARE_TAG`) or one
/// half of a reduplicated bare-root pair (`REDUP_TAG`). With probability
/// `noise` the gold tag is replaced by one drawn uniformly from all tags.
pub fn synthetic<R: Rng>(rng: &mut R, tokens: usize, noise: f64) -> Synthetic {
    let roots: Vec<String> = (0..300)
        .map(|_| {
            let len = rng.gen_range(2..=4);
            (0..len).map(|_| *ROOT_LETTERS.choose(rng).unwrap()).collect()
        })
        .collect();
    let mut all_tags: Vec<&str> = SYNTHETIC_TAGS.iter().map(|(_, t)| *t).collect();
    all_tags.extend([BARE_TAG, REDUP_TAG]);
    all_tags.sort();
    all_tags.dedup();

    let mut sentences = Vec::new();
    let mut extra = Vec::new();
    let mut produced = 0;
    while produced < tokens {
        let target = rng.gen_range(5..=14);
        let mut words: Vec<(String, &str, &str)> = Vec::new();
        while words.len() < target {
            let root = roots.choose(rng).unwrap().clone();
            let roll: f64 = rng.gen();
            if roll < 0.02 && words.len() + 2 <= target {
                words.push((root.clone(), REDUP_TAG, BEGIN));
                words.push((root, REDUP_TAG, INSIDE));
            } else if roll < 0.12 {
                words.push((root, BARE_TAG, OUTSIDE));
            } else {
                let (suffix, tag) = SYNTHETIC_TAGS.choose(rng).unwrap();
                words.push((format!("{root}{suffix}"), tag, OUTSIDE));
            }
        }
        let mut tokens_out = Vec::with_capacity(words.len());
        let mut cells = Vec::with_capacity(words.len());
        for (word, tag, bio) in words {
            let tag = if rng.gen_bool(noise) {
                *all_tags.choose(rng).unwrap()
            } else {
                tag
            };
            tokens_out.push(Token::new([word, tag.to_string()]));
            cells.push(bio.to_string());
        }
        produced += tokens_out.len();
        sentences.push(Sentence::new(tokens_out));
        extra.push(cells);
    }
    Synthetic {
        corpus: Corpus::new(sentences).unwrap(),
        extra,
    }
}

/// Splits sentences (and their extra cells) at the first sentence boundary
/// at or after `tokens` tokens.
pub fn split(data: Synthetic, tokens: usize) -> (Synthetic, Synthetic) {
    let mut count = 0;
    let mut cut = 0;
    for sentence in data.corpus.sentences() {
        if count >= tokens {
            break;
        }
        count += sentence.len();
        cut += 1;
    }
    let mut sentences = data.corpus.into_sentences();
    let test_sentences = sentences.split_off(cut);
    let mut extra = data.extra;
    let test_extra = extra.split_off(cut);
    (
        Synthetic {
            corpus: Corpus::new(sentences).unwrap(),
            extra,
        },
        Synthetic {
            corpus: Corpus::new(test_sentences).unwrap(),
            extra: test_extra,
        },
    )
}
