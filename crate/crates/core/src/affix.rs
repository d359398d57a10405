//! Prefix/suffix inventories and the iterative affix-stripping stemmer.
//!
//! Stripping scans the list in load order and restarts from the top after
//! every successful strip, so list order decides which of two overlapping
//! entries wins. A strip that would leave an empty stem is refused.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

const DEFAULT_PREFIXES: &str = include_str!("../data/prefixes.txt");
const DEFAULT_SUFFIXES: &str = include_str!("../data/suffixes.txt");

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AffixList {
    prefixes: Vec<String>,
    suffixes: Vec<String>,
}

impl AffixList {
    /// Drops empty entries and later duplicates, logging a warning for each
    /// duplicate.
    pub fn new<S: AsRef<str>>(prefixes: &[S], suffixes: &[S]) -> Self {
        AffixList {
            prefixes: dedup("prefix", prefixes.iter().map(AsRef::as_ref)),
            suffixes: dedup("suffix", suffixes.iter().map(AsRef::as_ref)),
        }
    }

    /// Parses two one-affix-per-line texts.
    pub fn from_texts(prefixes: &str, suffixes: &str) -> Self {
        AffixList {
            prefixes: dedup("prefix", prefixes.lines()),
            suffixes: dedup("suffix", suffixes.lines()),
        }
    }

    pub fn load(prefix_file: impl AsRef<Path>, suffix_file: impl AsRef<Path>) -> Result<Self> {
        let prefixes = fs::read_to_string(prefix_file)?;
        let suffixes = fs::read_to_string(suffix_file)?;
        Ok(AffixList::from_texts(&prefixes, &suffixes))
    }

    /// The bundled Manipuri (Bengali script) inventory.
    pub fn manipuri() -> Self {
        AffixList::from_texts(DEFAULT_PREFIXES, DEFAULT_SUFFIXES)
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty() && self.suffixes.is_empty()
    }
}

/// Reads a prefix file and a suffix file, one affix per line.
pub fn load_affix_list(prefix_file: impl AsRef<Path>, suffix_file: impl AsRef<Path>) -> Result<AffixList> {
    AffixList::load(prefix_file, suffix_file)
}

fn dedup<'a>(kind: &str, entries: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for entry in entries.map(str::trim).filter(|e| !e.is_empty()) {
        if seen.insert(entry) {
            out.push(entry.to_string());
        } else {
            log::warn!("duplicate {kind} `{entry}` ignored");
        }
    }
    out
}

/// Strips listed prefixes until none applies. Returns the remainder and the
/// stripped prefixes, outermost first.
pub fn strip_prefixes<'w>(word: &'w str, affixes: &AffixList) -> (&'w str, Vec<String>) {
    let (rest, stripped, _) = strip_prefixes_guarded(word, affixes.prefixes());
    (rest, stripped)
}

/// Strips listed suffixes until none applies. Returns the remainder and the
/// stripped suffixes, outermost (word-final) first.
pub fn strip_suffixes<'w>(word: &'w str, affixes: &AffixList) -> (&'w str, Vec<String>) {
    let (rest, stripped, _) = strip_suffixes_guarded(word, affixes.suffixes());
    (rest, stripped)
}

// The bool reports whether some strip was refused by the min-stem guard.
fn strip_prefixes_guarded<'w>(word: &'w str, prefixes: &[String]) -> (&'w str, Vec<String>, bool) {
    let mut rest = word;
    let mut stripped = Vec::new();
    let mut guarded = false;
    'scan: loop {
        for prefix in prefixes {
            if let Some(remainder) = rest.strip_prefix(prefix.as_str()) {
                if remainder.is_empty() {
                    guarded = true;
                    continue;
                }
                rest = remainder;
                stripped.push(prefix.clone());
                continue 'scan;
            }
        }
        return (rest, stripped, guarded);
    }
}

fn strip_suffixes_guarded<'w>(word: &'w str, suffixes: &[String]) -> (&'w str, Vec<String>, bool) {
    let mut rest = word;
    let mut stripped = Vec::new();
    let mut guarded = false;
    'scan: loop {
        for suffix in suffixes {
            if let Some(remainder) = rest.strip_suffix(suffix.as_str()) {
                if remainder.is_empty() {
                    guarded = true;
                    continue;
                }
                rest = remainder;
                stripped.push(suffix.clone());
                continue 'scan;
            }
        }
        return (rest, stripped, guarded);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StripOrder {
    /// Prefix fixpoint, then suffix fixpoint.
    #[default]
    PrefixesFirst,
    SuffixesFirst,
}

impl FromStr for StripOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ps" => Ok(StripOrder::PrefixesFirst),
            "sp" => Ok(StripOrder::SuffixesFirst),
            other => Err(Error::InvalidConfig(format!(
                "strip order must be `ps` or `sp`, got `{other}`"
            ))),
        }
    }
}

/// Decomposition of a word into prefixes, stem and suffixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemResult {
    pub stem: String,
    /// Outermost (leftmost) first.
    pub stripped_prefixes: Vec<String>,
    /// Outermost (rightmost) first.
    pub stripped_suffixes: Vec<String>,
    /// Set when a matching affix was left in place because removing it
    /// would have emptied the stem.
    pub guard_fired: bool,
}

impl StemResult {
    pub fn prefix_count(&self) -> usize {
        self.stripped_prefixes.len()
    }

    pub fn suffix_count(&self) -> usize {
        self.stripped_suffixes.len()
    }

    /// Reassembles the original word.
    pub fn surface(&self) -> String {
        let mut word = self.stripped_prefixes.concat();
        word.push_str(&self.stem);
        for suffix in self.stripped_suffixes.iter().rev() {
            word.push_str(suffix);
        }
        word
    }
}

#[derive(Debug, Clone, Default)]
pub struct Stemmer {
    affixes: AffixList,
    order: StripOrder,
}

impl Stemmer {
    pub fn new(affixes: AffixList) -> Self {
        Stemmer {
            affixes,
            order: StripOrder::default(),
        }
    }

    pub fn with_order(mut self, order: StripOrder) -> Self {
        self.order = order;
        self
    }

    pub fn affixes(&self) -> &AffixList {
        &self.affixes
    }

    pub fn order(&self) -> StripOrder {
        self.order
    }

    pub fn stem(&self, word: &str) -> StemResult {
        let prefixes = self.affixes.prefixes();
        let suffixes = self.affixes.suffixes();
        let (stem, stripped_prefixes, stripped_suffixes, guard_fired) = match self.order {
            StripOrder::PrefixesFirst => {
                let (rest, pre, g1) = strip_prefixes_guarded(word, prefixes);
                let (stem, suf, g2) = strip_suffixes_guarded(rest, suffixes);
                (stem, pre, suf, g1 || g2)
            }
            StripOrder::SuffixesFirst => {
                let (rest, suf, g1) = strip_suffixes_guarded(word, suffixes);
                let (stem, pre, g2) = strip_prefixes_guarded(rest, prefixes);
                (stem, pre, suf, g1 || g2)
            }
        };
        StemResult {
            stem: stem.to_string(),
            stripped_prefixes,
            stripped_suffixes,
            guard_fired,
        }
    }
}

/// Stems with the default prefixes-then-suffixes order.
pub fn stem(word: &str, affixes: &AffixList) -> StemResult {
    Stemmer::new(affixes.clone()).stem(word)
}
