//! Rule-based identification of reduplicated multiword expressions.
//!
//! Two passes run over each sentence. The repetition pass walks adjacent
//! word pairs left to right and classifies the first pair that matches one
//! rung of the ladder
//!
//! ```text
//! Double > Mimic > Complete > Echo > Partial
//! ```
//!
//! jumping past every span it emits. The semantic pass then pairs up
//! remaining adjacent words whose dictionary senses overlap.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use crate::affix::AffixList;
use crate::corpus::{Corpus, Sentence};
use crate::error::{Error, Result};

pub const BEGIN: &str = "B-RMWE";
pub const INSIDE: &str = "I-RMWE";
pub const OUTSIDE: &str = "O";

/// Lexicon with sense identifiers plus onomatopoeic word pairs.
///
/// File format (UTF-8):
///
/// ```text
/// # comment
/// পামবা<TAB>tiger
/// কে<TAB>tiger,other
/// থকসি
/// #MIMIC
/// কৱক<TAB>কৱক
/// ```
///
/// A bare surface line adds a word with no senses. `#MIMIC` switches to
/// pair lines and `#LEXICON` switches back.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    entries: HashMap<String, BTreeSet<String>>,
    mimic_pairs: HashMap<String, HashSet<String>>,
}

impl Dictionary {
    pub fn new() -> Self {
        Dictionary::default()
    }

    pub fn insert<S: Into<String>>(&mut self, surface: impl Into<String>, senses: impl IntoIterator<Item = S>) {
        self.entries
            .entry(surface.into())
            .or_default()
            .extend(senses.into_iter().map(Into::into));
    }

    pub fn insert_mimic(&mut self, first: impl Into<String>, second: impl Into<String>) {
        self.mimic_pairs.entry(first.into()).or_default().insert(second.into());
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(surface)
    }

    pub fn senses(&self, surface: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(surface)
    }

    pub fn is_mimic(&self, first: &str, second: &str) -> bool {
        self.mimic_pairs
            .get(first)
            .is_some_and(|seconds| seconds.contains(second))
    }

    /// True when both words have at least one sense in common.
    pub fn share_sense(&self, first: &str, second: &str) -> bool {
        match (self.entries.get(first), self.entries.get(second)) {
            (Some(a), Some(b)) => !a.is_disjoint(b),
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.mimic_pairs.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut dict = Dictionary::new();
        let mut in_mimic = false;
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') {
                match line {
                    "#MIMIC" => in_mimic = true,
                    "#LEXICON" => in_mimic = false,
                    _ => {}
                }
                continue;
            }
            let error = |message: &str| Error::DictionaryParse {
                line: number + 1,
                message: message.to_string(),
            };
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if in_mimic {
                match fields.as_slice() {
                    [a, b] if !a.is_empty() && !b.is_empty() => dict.insert_mimic(*a, *b),
                    _ => return Err(error("expected `word<TAB>word`")),
                }
            } else {
                match fields.as_slice() {
                    [surface] => dict.insert(*surface, Vec::<String>::new()),
                    [surface, senses] if !surface.is_empty() => {
                        let senses: Vec<&str> = senses.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
                        dict.insert(*surface, senses);
                    }
                    _ => return Err(error("expected `surface<TAB>sense[,sense...]`")),
                }
            }
        }
        Ok(dict)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Dictionary::parse(&fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RmweKind {
    Complete,
    Mimic,
    Echo,
    Partial,
    Double,
    Semantic,
}

impl fmt::Display for RmweKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RmweKind::Complete => "complete",
            RmweKind::Mimic => "mimic",
            RmweKind::Echo => "echo",
            RmweKind::Partial => "partial",
            RmweKind::Double => "double",
            RmweKind::Semantic => "semantic",
        };
        f.write_str(name)
    }
}

/// Inclusive token range of one expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RmweSpan {
    pub start: usize,
    pub end: usize,
    pub kind: RmweKind,
}

impl RmweSpan {
    pub fn new(start: usize, end: usize, kind: RmweKind) -> Self {
        RmweSpan { start, end, kind }
    }
}

/// `word` minus a listed prefix, when something remains.
fn without_prefix<'w>(word: &'w str, prefix: &str) -> Option<&'w str> {
    word.strip_prefix(prefix).filter(|rest| !rest.is_empty())
}

fn without_suffix<'w>(word: &'w str, suffix: &str) -> Option<&'w str> {
    word.strip_suffix(suffix).filter(|rest| !rest.is_empty())
}

fn is_double(first: &str, third: &str, affixes: &AffixList) -> bool {
    if third == first {
        return false;
    }
    let by_prefix = affixes
        .prefixes()
        .iter()
        .filter_map(|p| without_prefix(first, p))
        .any(|core| third.starts_with(core));
    by_prefix
        || affixes
            .suffixes()
            .iter()
            .filter_map(|s| without_suffix(first, s))
            .any(|core| third.starts_with(core))
}

fn is_suffixed_copy(first: &str, second: &str, affixes: &AffixList) -> bool {
    second
        .strip_prefix(first)
        .is_some_and(|tail| affixes.suffixes().iter().any(|s| s == tail))
}

fn shares_suffix(first: &str, second: &str, affixes: &AffixList) -> bool {
    affixes
        .suffixes()
        .iter()
        .any(|s| without_suffix(first, s).is_some() && without_suffix(second, s).is_some())
}

fn is_partial(first: &str, second: &str, affixes: &AffixList) -> bool {
    affixes.prefixes().iter().any(|p| {
        let shared_start = without_prefix(first, p).is_some() && without_prefix(second, p).is_some();
        let carried_over = without_suffix(first, p).is_some() && without_prefix(second, p).is_some();
        shared_start || carried_over
    })
}

/// Classifies the pair starting at `i`, looking one word further for the
/// three-word double form.
fn classify_at(words: &[&str], i: usize, affixes: &AffixList, dict: &Dictionary) -> Option<RmweSpan> {
    let first = words[i];
    let second = *words.get(i + 1)?;
    let pair = |kind| Some(RmweSpan::new(i, i + 1, kind));

    if first == second {
        if let Some(third) = words.get(i + 2) {
            if is_double(first, third, affixes) {
                return Some(RmweSpan::new(i, i + 2, RmweKind::Double));
            }
        }
        if dict.is_mimic(first, second) {
            return pair(RmweKind::Mimic);
        }
        return pair(RmweKind::Complete);
    }
    if is_suffixed_copy(first, second, affixes) {
        return pair(RmweKind::Complete);
    }
    if shares_suffix(first, second, affixes) {
        // A meaningful second word makes the shared ending a partial form.
        return if dict.contains(second) {
            pair(RmweKind::Partial)
        } else {
            pair(RmweKind::Echo)
        };
    }
    if is_partial(first, second, affixes) {
        return pair(RmweKind::Partial);
    }
    None
}

/// Repetition pass: complete, mimic, echo, partial and double forms.
pub fn identify_repetition<S: AsRef<str>>(words: &[S], affixes: &AffixList, dict: &Dictionary) -> Vec<RmweSpan> {
    let words: Vec<&str> = words.iter().map(AsRef::as_ref).collect();
    let mut spans = Vec::new();
    let mut i = 0;
    while i + 1 < words.len() {
        match classify_at(&words, i, affixes, dict) {
            Some(span) => {
                i = span.end + 1;
                spans.push(span);
            }
            None => i += 1,
        }
    }
    spans
}

/// Semantic pass over the tokens not covered by `taken`: adjacent distinct
/// words sharing a dictionary sense.
pub fn identify_semantic_excluding<S: AsRef<str>>(words: &[S], dict: &Dictionary, taken: &[RmweSpan]) -> Vec<RmweSpan> {
    let mut covered = vec![false; words.len()];
    for span in taken {
        for slot in &mut covered[span.start..=span.end.min(words.len() - 1)] {
            *slot = true;
        }
    }
    let mut spans = Vec::new();
    let mut i = 0;
    while i + 1 < words.len() {
        let (first, second) = (words[i].as_ref(), words[i + 1].as_ref());
        if !covered[i] && !covered[i + 1] && first != second && dict.share_sense(first, second) {
            spans.push(RmweSpan::new(i, i + 1, RmweKind::Semantic));
            i += 2;
        } else {
            i += 1;
        }
    }
    spans
}

pub fn identify_semantic(sentence: &Sentence, dict: &Dictionary) -> Vec<RmweSpan> {
    identify_semantic_excluding(&sentence.surfaces(), dict, &[])
}

/// Repetition-pass spans for a sentence.
pub fn identify_rmwe(sentence: &Sentence, affixes: &AffixList, dict: &Dictionary) -> Vec<RmweSpan> {
    identify_repetition(&sentence.surfaces(), affixes, dict)
}

/// Both passes, merged and sorted by start.
pub fn identify_all<S: AsRef<str>>(words: &[S], affixes: &AffixList, dict: &Dictionary) -> Vec<RmweSpan> {
    let mut spans = identify_repetition(words, affixes, dict);
    let semantic = identify_semantic_excluding(words, dict, &spans);
    spans.extend(semantic);
    spans.sort();
    spans
}

/// BIO labels for a sentence of `len` tokens.
pub fn to_bio(len: usize, spans: &[RmweSpan]) -> Result<Vec<&'static str>> {
    let mut labels = vec![OUTSIDE; len];
    for span in spans {
        if span.start > span.end || span.end >= len {
            return Err(Error::SpanOutOfRange {
                start: span.start,
                end: span.end,
                len,
            });
        }
        for (offset, label) in labels[span.start..=span.end].iter_mut().enumerate() {
            if *label != OUTSIDE {
                return Err(Error::Overlap(span.start + offset));
            }
            *label = if offset == 0 { BEGIN } else { INSIDE };
        }
    }
    Ok(labels)
}

/// Inclusive `(start, end)` ranges encoded by a BIO label sequence.
pub fn from_bio<S: AsRef<str>>(labels: &[S]) -> Result<Vec<(usize, usize)>> {
    let mut ranges: Vec<(usize, usize)> = Vec::new();
    let mut open = false;
    for (i, label) in labels.iter().enumerate() {
        match label.as_ref() {
            BEGIN => {
                ranges.push((i, i));
                open = true;
            }
            INSIDE if open => ranges.last_mut().expect("open range").1 = i,
            OUTSIDE => open = false,
            _ => return Err(Error::MalformedBio(i)),
        }
    }
    Ok(ranges)
}

/// Runs both passes on every sentence and returns one BIO column.
pub fn bio_column(corpus: &Corpus, affixes: &AffixList, dict: &Dictionary) -> Vec<Vec<&'static str>> {
    corpus
        .sentences()
        .iter()
        .map(|sentence| {
            let spans = identify_all(&sentence.surfaces(), affixes, dict);
            to_bio(sentence.len(), &spans).expect("identified spans never overlap")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(spans: &[RmweSpan]) -> Vec<(usize, usize, RmweKind)> {
        spans.iter().map(|s| (s.start, s.end, s.kind)).collect()
    }

    fn toy_affixes() -> AffixList {
        AffixList::new(&["i", "c"], &["da", "si", "na"])
    }

    #[test]
    fn ladder_on_ascii() {
        let affixes = toy_affixes();
        let dict = Dictionary::new();
        let run = |w: &[&str]| kinds(&identify_repetition(w, &affixes, &dict));
        assert_eq!(run(&["marik", "marik"]), vec![(0, 1, RmweKind::Complete)]);
        assert_eq!(run(&["yum", "yumda"]), vec![(0, 1, RmweKind::Complete)]);
        assert_eq!(run(&["cthok", "csin"]), vec![(0, 1, RmweKind::Partial)]);
        assert_eq!(run(&["thaksi", "khasi"]), vec![(0, 1, RmweKind::Echo)]);
        assert_eq!(run(&["imun", "imun", "munba"]), vec![(0, 2, RmweKind::Double)]);
        assert_eq!(run(&["achouba", "yum"]), vec![]);
    }

    #[test]
    fn shared_suffix_with_known_second_word_is_partial() {
        let affixes = toy_affixes();
        let mut dict = Dictionary::new();
        dict.insert("lansi", ["army"]);
        let spans = identify_repetition(&["sasi", "lansi"], &affixes, &dict);
        assert_eq!(kinds(&spans), vec![(0, 1, RmweKind::Partial)]);
    }

    #[test]
    fn affix_ending_first_and_starting_second_is_partial() {
        let affixes = AffixList::new(&["ko"], &[]);
        let spans = identify_repetition(&["tako", "kotu"], &affixes, &Dictionary::new());
        assert_eq!(kinds(&spans), vec![(0, 1, RmweKind::Partial)]);
    }

    #[test]
    fn affix_equal_to_word_does_not_count() {
        // "da" + "" is not a shared suffix, and "i" alone is not a prefixed word.
        let affixes = toy_affixes();
        let dict = Dictionary::new();
        assert!(identify_repetition(&["da", "xda"], &affixes, &dict).is_empty());
        assert!(identify_repetition(&["i", "ix"], &affixes, &dict).is_empty());
    }

    #[test]
    fn mimic_needs_pair_entry() {
        let affixes = toy_affixes();
        let mut dict = Dictionary::new();
        dict.insert_mimic("khrak", "khrak");
        let spans = identify_repetition(&["khrak", "khrak"], &affixes, &dict);
        assert_eq!(kinds(&spans), vec![(0, 1, RmweKind::Mimic)]);
        let spans = identify_repetition(&["khrak", "khrak"], &affixes, &Dictionary::new());
        assert_eq!(kinds(&spans), vec![(0, 1, RmweKind::Complete)]);
    }

    #[test]
    fn double_outranks_mimic_and_needs_a_changed_third_word() {
        let affixes = toy_affixes();
        let mut dict = Dictionary::new();
        dict.insert_mimic("imun", "imun");
        let spans = identify_repetition(&["imun", "imun", "munba"], &affixes, &dict);
        assert_eq!(kinds(&spans), vec![(0, 2, RmweKind::Double)]);
        let spans = identify_repetition(&["imun", "imun", "imun"], &affixes, &Dictionary::new());
        assert_eq!(kinds(&spans), vec![(0, 1, RmweKind::Complete)]);
    }

    #[test]
    fn double_via_suffix() {
        let affixes = AffixList::new(&[], &["srok"]);
        let spans = identify_repetition(&["ngasrok", "ngasrok", "ngaba"], &affixes, &Dictionary::new());
        assert_eq!(kinds(&spans), vec![(0, 2, RmweKind::Double)]);
    }

    #[test]
    fn cursor_jumps_past_spans() {
        let affixes = toy_affixes();
        let spans = identify_repetition(&["a", "a", "a", "b", "b"], &affixes, &Dictionary::new());
        assert_eq!(
            kinds(&spans),
            vec![(0, 1, RmweKind::Complete), (3, 4, RmweKind::Complete)]
        );
    }

    #[test]
    fn semantic_pass() {
        let mut dict = Dictionary::new();
        dict.insert("pamba", ["tiger"]);
        dict.insert("ke", ["tiger"]);
        dict.insert("sa", ["animal"]);
        let sentence = Sentence::from_words(&["pamba", "ke"]);
        assert_eq!(
            kinds(&identify_semantic(&sentence, &dict)),
            vec![(0, 1, RmweKind::Semantic)]
        );
        let sentence = Sentence::from_words(&["pamba", "sa"]);
        assert!(identify_semantic(&sentence, &dict).is_empty());
        let sentence = Sentence::from_words(&["pamba", "pamba"]);
        assert!(identify_semantic(&sentence, &dict).is_empty());
    }

    #[test]
    fn identical_pair_is_repetition_not_semantic() {
        let mut dict = Dictionary::new();
        dict.insert("pamba", ["tiger"]);
        let spans = identify_all(&["pamba", "pamba"], &AffixList::default(), &dict);
        assert_eq!(kinds(&spans), vec![(0, 1, RmweKind::Complete)]);
    }

    #[test]
    fn semantic_skips_taken_tokens() {
        let mut dict = Dictionary::new();
        dict.insert("ke", ["tiger"]);
        dict.insert("pamba", ["tiger"]);
        let words = ["x", "x", "ke", "pamba"];
        let spans = identify_all(&words, &AffixList::default(), &dict);
        assert_eq!(
            kinds(&spans),
            vec![(0, 1, RmweKind::Complete), (2, 3, RmweKind::Semantic)]
        );
        let words = ["ke", "ke", "pamba"];
        let spans = identify_all(&words, &AffixList::default(), &dict);
        assert_eq!(kinds(&spans), vec![(0, 1, RmweKind::Complete)]);
    }

    #[test]
    fn bio_encoding() {
        let double = [RmweSpan::new(0, 2, RmweKind::Double)];
        assert_eq!(to_bio(3, &double).unwrap(), vec![BEGIN, INSIDE, INSIDE]);
        assert_eq!(to_bio(2, &[]).unwrap(), vec![OUTSIDE, OUTSIDE]);
        let two = [
            RmweSpan::new(0, 1, RmweKind::Complete),
            RmweSpan::new(2, 3, RmweKind::Echo),
        ];
        assert_eq!(to_bio(4, &two).unwrap(), vec![BEGIN, INSIDE, BEGIN, INSIDE]);
        assert_eq!(from_bio(&to_bio(4, &two).unwrap()).unwrap(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn bio_errors() {
        let overlapping = [
            RmweSpan::new(0, 1, RmweKind::Complete),
            RmweSpan::new(1, 2, RmweKind::Complete),
        ];
        assert!(matches!(to_bio(3, &overlapping), Err(Error::Overlap(1))));
        let outside = [RmweSpan::new(1, 2, RmweKind::Complete)];
        assert!(matches!(to_bio(2, &outside), Err(Error::SpanOutOfRange { .. })));
        assert!(matches!(from_bio(&[OUTSIDE, INSIDE]), Err(Error::MalformedBio(1))));
        assert!(matches!(from_bio(&["B-X"]), Err(Error::MalformedBio(0))));
    }

    #[test]
    fn dictionary_format() {
        let text = "# lexicon\nপামবা\ttiger\nকে\ttiger, cat\nথকসি\n\n#MIMIC\nকৱক\tকৱক\n#LEXICON\nlan\tarmy\n";
        let dict = Dictionary::parse(text).unwrap();
        assert!(dict.contains("থকসি"));
        assert!(dict.senses("থকসি").unwrap().is_empty());
        assert!(dict.share_sense("পামবা", "কে"));
        assert!(dict.senses("কে").unwrap().contains("cat"));
        assert!(dict.is_mimic("কৱক", "কৱক"));
        assert!(dict.contains("lan"));
        assert_eq!(dict.len(), 4);

        match Dictionary::parse("a\tb\tc\n") {
            Err(Error::DictionaryParse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(Dictionary::parse("#MIMIC\nonly-one\n").is_err());
    }
}
