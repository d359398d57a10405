//! Feature configuration and the annotated column layout.
//!
//! [`annotate_columns`] turns a `surface [label]` corpus into the fixed
//! column file the CRF templates read:
//!
//! ```text
//! surface stem NP NS P1..Pp S1..Ss L F D SF [RMWE] [label]
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::affix::Stemmer;
use crate::chars::{is_digit, SymbolClass};
use crate::corpus::{Corpus, Sentence, Token};
use crate::error::{Error, Result};

pub const MAX_PREFIX_SLOTS: usize = 3;
pub const MAX_SUFFIX_SLOTS: usize = 10;
/// Filler for an empty affix slot.
pub const EMPTY_SLOT: &str = "0";

/// Context window: `left` positions before and `right` after the token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Window {
    pub left: usize,
    pub right: usize,
}

impl Window {
    pub const fn new(left: usize, right: usize) -> Self {
        Window { left, right }
    }

    /// Row offsets from `-left` to `+right`.
    pub fn offsets(&self) -> impl Iterator<Item = isize> {
        -(self.left as isize)..=(self.right as isize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureConfig {
    pub word_window: Window,
    /// `None` leaves stems out of the template.
    pub stem_window: Option<Window>,
    pub prefix_slots: usize,
    pub suffix_slots: usize,
    pub use_length: bool,
    pub length_threshold: usize,
    pub use_frequency: bool,
    pub frequency_threshold: usize,
    pub use_suffix_count: bool,
    pub use_prefix_count: bool,
    pub use_digit: bool,
    pub use_symbol: bool,
    pub use_rmwe: bool,
    pub symbols: SymbolClass,
}

impl Default for FeatureConfig {
    /// Current word only, every optional feature off.
    fn default() -> Self {
        FeatureConfig {
            word_window: Window::new(0, 0),
            stem_window: None,
            prefix_slots: 0,
            suffix_slots: 0,
            use_length: false,
            length_threshold: 3,
            use_frequency: false,
            frequency_threshold: 100,
            use_suffix_count: false,
            use_prefix_count: false,
            use_digit: false,
            use_symbol: false,
            use_rmwe: false,
            symbols: SymbolClass::Unicode,
        }
    }
}

impl FeatureConfig {
    /// `W[-2,+1], SW[-1,+1], P[1], S[4], L, F, NS, NP, D, SF`.
    pub fn best() -> Self {
        "W[-2,+1], SW[-1,+1], P[1], S[4], L, F, NS, NP, D, SF"
            .parse()
            .expect("valid notation")
    }

    pub fn with_rmwe(mut self, use_rmwe: bool) -> Self {
        self.use_rmwe = use_rmwe;
        self
    }

    /// The feature combinations of the published comparison table.
    pub fn table4() -> Vec<FeatureConfig> {
        [
            "W[-2,+1], SW[-1,+1], P[1], S[4], L, F, NS, NP, D, SF",
            "W[-2,+2], SW[-2,+1], P[1], S[4], L, F, NS, NP, D, SF",
            "W[-2,+3], SW[-2,+2], P[1], S[4], L, F, NS, NP, D, SF",
            "W[-3,+1], SW[-3,+1], P[1], S[4], L, F, NS, NP, D, SF",
            "W[-3,+3], SW[-3,+2], P[1], S[5], L, F, NS, NP, D",
            "W[-3,+4], SW[-2,+3], P[2], S[5], L, F, NS, SF",
            "W[-4,+1], SW[-4,+1], P[2], S[6], L, NP, D, SF",
            "W[-4,+3], SW[-3,+3], P[3], S[9], L, F, D, SF",
            "W[-4,+4], SW[-4,+4], P[3], S[10], NS, NP",
        ]
        .iter()
        .map(|n| n.parse().expect("valid notation"))
        .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.prefix_slots > MAX_PREFIX_SLOTS {
            return Err(Error::InvalidConfig(format!(
                "at most {MAX_PREFIX_SLOTS} prefix slots, got {}",
                self.prefix_slots
            )));
        }
        if self.suffix_slots > MAX_SUFFIX_SLOTS {
            return Err(Error::InvalidConfig(format!(
                "at most {MAX_SUFFIX_SLOTS} suffix slots, got {}",
                self.suffix_slots
            )));
        }
        Ok(())
    }

    pub fn layout(&self) -> ColumnLayout {
        ColumnLayout::new(self)
    }
}

/// Renders the `W[-i,+j], SW[-i,+j], P[i], S[i], L, F, NS, NP, D, SF` notation.
impl fmt::Display for FeatureConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![format!("W[-{},+{}]", self.word_window.left, self.word_window.right)];
        if let Some(w) = self.stem_window {
            parts.push(format!("SW[-{},+{}]", w.left, w.right));
        }
        if self.prefix_slots > 0 {
            parts.push(format!("P[{}]", self.prefix_slots));
        }
        if self.suffix_slots > 0 {
            parts.push(format!("S[{}]", self.suffix_slots));
        }
        let flags = [
            (self.use_length, "L"),
            (self.use_frequency, "F"),
            (self.use_suffix_count, "NS"),
            (self.use_prefix_count, "NP"),
            (self.use_digit, "D"),
            (self.use_symbol, "SF"),
            (self.use_rmwe, "RMWE"),
        ];
        parts.extend(flags.iter().filter(|(on, _)| *on).map(|(_, name)| name.to_string()));
        f.write_str(&parts.join(", "))
    }
}

fn parse_window(body: &str, item: &str) -> Result<Window> {
    let bad = || Error::InvalidConfig(format!("malformed window `{item}`"));
    let (left, right) = body.split_once(',').ok_or_else(bad)?;
    let left: isize = left.trim().parse().map_err(|_| bad())?;
    let right: isize = right.trim().trim_start_matches('+').parse().map_err(|_| bad())?;
    if left > 0 || right < 0 {
        return Err(bad());
    }
    Ok(Window::new(left.unsigned_abs(), right as usize))
}

impl FromStr for FeatureConfig {
    type Err = Error;

    fn from_str(notation: &str) -> Result<Self> {
        let mut config = FeatureConfig::default();
        let mut saw_word_window = false;
        // Commas inside brackets belong to the window, not the item list.
        let mut items = Vec::new();
        let mut depth = 0usize;
        let mut start = 0;
        for (i, c) in notation.char_indices() {
            match c {
                '[' => depth += 1,
                ']' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    items.push(&notation[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        items.push(&notation[start..]);

        for item in items.into_iter().map(str::trim).filter(|i| !i.is_empty()) {
            let bracketed = |name: &str| {
                item.strip_prefix(name)
                    .and_then(|rest| rest.strip_prefix('['))
                    .and_then(|rest| rest.strip_suffix(']'))
            };
            let count = |body: &str| {
                body.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidConfig(format!("malformed count `{item}`")))
            };
            if let Some(body) = bracketed("SW") {
                config.stem_window = Some(parse_window(body, item)?);
            } else if let Some(body) = bracketed("W") {
                config.word_window = parse_window(body, item)?;
                saw_word_window = true;
            } else if let Some(body) = bracketed("P") {
                config.prefix_slots = count(body)?;
            } else if let Some(body) = bracketed("S") {
                config.suffix_slots = count(body)?;
            } else {
                match item {
                    "L" => config.use_length = true,
                    "F" => config.use_frequency = true,
                    "NS" => config.use_suffix_count = true,
                    "NP" => config.use_prefix_count = true,
                    "D" => config.use_digit = true,
                    "SF" => config.use_symbol = true,
                    "RMWE" => config.use_rmwe = true,
                    _ => return Err(Error::InvalidConfig(format!("unknown feature `{item}`"))),
                }
            }
        }
        if !saw_word_window {
            return Err(Error::InvalidConfig("missing word window W[-i,+j]".into()));
        }
        config.validate()?;
        Ok(config)
    }
}

/// Column positions of the annotated file, excluding the trailing label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnLayout {
    prefix_slots: usize,
    suffix_slots: usize,
    has_rmwe: bool,
}

impl ColumnLayout {
    pub const SURFACE: usize = 0;
    pub const STEM: usize = 1;
    pub const PREFIX_COUNT: usize = 2;
    pub const SUFFIX_COUNT: usize = 3;

    pub fn new(config: &FeatureConfig) -> Self {
        ColumnLayout {
            prefix_slots: config.prefix_slots,
            suffix_slots: config.suffix_slots,
            has_rmwe: config.use_rmwe,
        }
    }

    pub fn prefix_slot(&self, k: usize) -> usize {
        debug_assert!(k < self.prefix_slots);
        4 + k
    }

    pub fn suffix_slot(&self, k: usize) -> usize {
        debug_assert!(k < self.suffix_slots);
        4 + self.prefix_slots + k
    }

    pub fn length(&self) -> usize {
        4 + self.prefix_slots + self.suffix_slots
    }

    pub fn frequency(&self) -> usize {
        self.length() + 1
    }

    pub fn digit(&self) -> usize {
        self.length() + 2
    }

    pub fn symbol(&self) -> usize {
        self.length() + 3
    }

    pub fn rmwe(&self) -> Option<usize> {
        self.has_rmwe.then(|| self.length() + 4)
    }

    /// Number of feature columns.
    pub fn width(&self) -> usize {
        self.length() + 4 + usize::from(self.has_rmwe)
    }
}

/// Surface counts over a training corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<String, usize>,
}

pub fn build_frequency_table(training: &Corpus) -> FrequencyTable {
    FrequencyTable::build(training)
}

impl FrequencyTable {
    pub fn build(training: &Corpus) -> Self {
        let mut counts = HashMap::new();
        for token in training.tokens() {
            *counts.entry(token.surface().to_string()).or_insert(0) += 1;
        }
        FrequencyTable { counts }
    }

    /// 0 for unseen words.
    pub fn count(&self, word: &str) -> usize {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

fn flag(on: bool) -> &'static str {
    if on {
        "1"
    } else {
        "0"
    }
}

/// Builds the annotated corpus.
///
/// Column 0 of `corpus` is the surface form. When the corpus has two or
/// more columns its last column is kept as the label; any columns in
/// between are dropped. `extra` supplies the RMWE (or any other) column,
/// one cell per token, and is required when `config.use_rmwe` is set.
pub fn annotate_columns<S: AsRef<str>>(
    corpus: &Corpus,
    stemmer: &Stemmer,
    frequencies: &FrequencyTable,
    extra: Option<&[Vec<S>]>,
    config: &FeatureConfig,
) -> Result<Corpus> {
    config.validate()?;
    let has_label = corpus.column_count() >= 2;
    let extra = match (config.use_rmwe, extra) {
        (true, Some(extra)) => {
            if extra.len() != corpus.sentences().len() {
                return Err(Error::Alignment(format!(
                    "{} sentences but {} RMWE columns",
                    corpus.sentences().len(),
                    extra.len()
                )));
            }
            Some(extra)
        }
        (true, None) => {
            return Err(Error::InvalidConfig(
                "RMWE feature enabled without an RMWE column".into(),
            ))
        }
        (false, _) => None,
    };

    let mut sentences = Vec::with_capacity(corpus.sentences().len());
    for (index, sentence) in corpus.sentences().iter().enumerate() {
        let extra_cells = match extra {
            Some(extra) => {
                let cells = &extra[index];
                if cells.len() != sentence.len() {
                    return Err(Error::Alignment(format!(
                        "sentence {}: {} tokens but {} RMWE cells",
                        index + 1,
                        sentence.len(),
                        cells.len()
                    )));
                }
                Some(cells)
            }
            None => None,
        };
        let tokens = sentence
            .tokens()
            .iter()
            .enumerate()
            .map(|(i, token)| {
                let extra = extra_cells.map(|cells| cells[i].as_ref());
                let label = has_label.then(|| token.last());
                annotate_token(token.surface(), stemmer, frequencies, extra, label, config)
            })
            .collect();
        sentences.push(Sentence::new(tokens));
    }
    Corpus::new(sentences)
}

fn annotate_token(
    surface: &str,
    stemmer: &Stemmer,
    frequencies: &FrequencyTable,
    extra: Option<&str>,
    label: Option<&str>,
    config: &FeatureConfig,
) -> Token {
    let result = stemmer.stem(surface);
    let mut cells: Vec<String> = Vec::with_capacity(config.layout().width() + 1);
    cells.push(surface.to_string());
    cells.push(result.stem.clone());
    cells.push(result.prefix_count().to_string());
    cells.push(result.suffix_count().to_string());
    for k in 0..config.prefix_slots {
        cells.push(
            result
                .stripped_prefixes
                .get(k)
                .cloned()
                .unwrap_or_else(|| EMPTY_SLOT.into()),
        );
    }
    for k in 0..config.suffix_slots {
        cells.push(
            result
                .stripped_suffixes
                .get(k)
                .cloned()
                .unwrap_or_else(|| EMPTY_SLOT.into()),
        );
    }
    cells.push(flag(surface.chars().count() > config.length_threshold).into());
    cells.push(flag(frequencies.count(surface) >= config.frequency_threshold).into());
    cells.push(flag(surface.chars().any(is_digit)).into());
    cells.push(flag(config.symbols.any_in(surface)).into());
    if let Some(extra) = extra {
        cells.push(extra.to_string());
    }
    if let Some(label) = label {
        cells.push(label.to_string());
    }
    Token::new(cells)
}
