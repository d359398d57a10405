//! Tokens, sentences and the multi-column token file.
//!
//! The column file holds one token per line with whitespace-separated
//! cells; a blank line ends a sentence. Cell 0 is the surface form and,
//! for training and gold files, the last cell is the label.

use std::collections::BTreeSet;

use crate::chars::SymbolClass;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    columns: Vec<String>,
}

impl Token {
    /// Builds a token from its cells. Panics on an empty cell list, an
    /// empty cell, or a cell containing whitespace.
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        let columns: Vec<String> = columns.into_iter().map(Into::into).collect();
        assert!(!columns.is_empty(), "token without columns");
        for cell in &columns {
            assert!(
                !cell.is_empty() && !cell.chars().any(char::is_whitespace),
                "invalid cell {cell:?}"
            );
        }
        Token { columns }
    }

    pub fn surface(&self) -> &str {
        &self.columns[0]
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn column(&self, index: usize) -> Option<&str> {
        self.columns.get(index).map(String::as_str)
    }

    /// The last cell: the label in training, gold and tagged files.
    pub fn last(&self) -> &str {
        self.columns.last().expect("token has at least one column")
    }

    /// Number of cells.
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// Returns a copy with one more cell at the end.
    pub fn with_appended(&self, cell: impl Into<String>) -> Token {
        let mut columns = self.columns.clone();
        columns.push(cell.into());
        Token::new(columns)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        assert!(!tokens.is_empty(), "empty sentence");
        Sentence { tokens }
    }

    /// Sentence of single-column tokens.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Self {
        Sentence::new(words.iter().map(|w| Token::new([w.as_ref()])).collect())
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(Token::surface).collect()
    }

    /// Cells of column `index` for every token.
    pub fn column(&self, index: usize) -> Vec<&str> {
        self.tokens
            .iter()
            .map(|t| t.column(index).expect("column in range"))
            .collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.tokens.iter().map(Token::last).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    column_count: usize,
}

impl Corpus {
    /// Validates that every token has the same number of columns.
    pub fn new(sentences: Vec<Sentence>) -> Result<Self> {
        let mut column_count = None;
        let mut line = 0;
        for sentence in &sentences {
            for token in sentence.tokens() {
                line += 1;
                match column_count {
                    None => column_count = Some(token.width()),
                    Some(expected) if expected != token.width() => {
                        return Err(Error::RaggedColumns {
                            line,
                            expected,
                            found: token.width(),
                        })
                    }
                    Some(_) => {}
                }
            }
            line += 1;
        }
        Ok(Corpus {
            sentences,
            column_count: column_count.unwrap_or(0),
        })
    }

    pub fn empty() -> Self {
        Corpus::default()
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn into_sentences(self) -> Vec<Sentence> {
        self.sentences
    }

    /// Columns per token; 0 only for an empty corpus.
    pub fn column_count(&self) -> usize {
        self.column_count
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens().iter())
    }

    /// Appends one cell per token, taken from `cells` (one list per sentence).
    pub fn append_column<S: AsRef<str>>(&self, cells: &[Vec<S>]) -> Result<Corpus> {
        if cells.len() != self.sentences.len() {
            return Err(Error::Alignment(format!(
                "{} sentences but {} cell lists",
                self.sentences.len(),
                cells.len()
            )));
        }
        let sentences = self
            .sentences
            .iter()
            .zip(cells)
            .enumerate()
            .map(|(i, (sentence, cells))| {
                if cells.len() != sentence.len() {
                    return Err(Error::Alignment(format!(
                        "sentence {}: {} tokens but {} cells",
                        i + 1,
                        sentence.len(),
                        cells.len()
                    )));
                }
                Ok(Sentence::new(
                    sentence
                        .tokens()
                        .iter()
                        .zip(cells)
                        .map(|(t, c)| t.with_appended(c.as_ref()))
                        .collect(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Corpus::new(sentences)
    }
}

/// Parses the column token file. Runs of blank lines separate sentences.
pub fn parse_column_file(text: &str) -> Result<Corpus> {
    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut column_count: Option<usize> = None;

    for (number, line) in text.lines().enumerate() {
        let cells: Vec<&str> = line.split_whitespace().collect();
        if cells.is_empty() {
            if !current.is_empty() {
                sentences.push(Sentence::new(std::mem::take(&mut current)));
            }
            continue;
        }
        let expected = *column_count.get_or_insert(cells.len());
        if cells.len() != expected {
            return Err(Error::RaggedColumns {
                line: number + 1,
                expected,
                found: cells.len(),
            });
        }
        current.push(Token::new(cells));
    }
    if !current.is_empty() {
        sentences.push(Sentence::new(current));
    }
    Ok(Corpus {
        sentences,
        column_count: column_count.unwrap_or(0),
    })
}

/// Single-space cells, one blank line between sentences, trailing newline.
pub fn write_column_file(corpus: &Corpus) -> String {
    let mut out = String::new();
    for (i, sentence) in corpus.sentences().iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for token in sentence.tokens() {
            out.push_str(&token.columns().join(" "));
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    /// Characters that end a sentence. Each one is emitted as its own token.
    pub terminators: BTreeSet<char>,
    /// Characters split off as single-character tokens.
    pub symbols: SymbolClass,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            terminators: ['।', '?', '!', '.'].into_iter().collect(),
            symbols: SymbolClass::Unicode,
        }
    }
}

/// Splits raw text into sentences of single-column tokens.
pub fn tokenize(raw: &str, config: &TokenizerConfig) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    let mut word = String::new();

    fn flush(word: &mut String, tokens: &mut Vec<Token>) {
        if !word.is_empty() {
            tokens.push(Token::new([std::mem::take(word)]));
        }
    }

    for c in raw.chars() {
        if c.is_whitespace() {
            flush(&mut word, &mut tokens);
        } else if config.terminators.contains(&c) {
            flush(&mut word, &mut tokens);
            tokens.push(Token::new([c.to_string()]));
            sentences.push(Sentence::new(std::mem::take(&mut tokens)));
        } else if config.symbols.contains(c) {
            flush(&mut word, &mut tokens);
            tokens.push(Token::new([c.to_string()]));
        } else {
            word.push(c);
        }
    }
    flush(&mut word, &mut tokens);
    if !tokens.is_empty() {
        sentences.push(Sentence::new(tokens));
    }
    sentences
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(sentences: &[Sentence]) -> Vec<Vec<&str>> {
        sentences.iter().map(Sentence::surfaces).collect()
    }

    #[test]
    fn tokenize_basics() {
        let config = TokenizerConfig::default();
        assert!(tokenize("", &config).is_empty());
        assert!(tokenize("  \n\t", &config).is_empty());
        assert_eq!(words(&tokenize("a b", &config)), vec![vec!["a", "b"]]);
        assert_eq!(words(&tokenize("x%y", &config)), vec![vec!["x", "%", "y"]]);
    }

    #[test]
    fn tokenize_splits_sentences_at_terminators() {
        let config = TokenizerConfig::default();
        let got = tokenize("ঐ যুম। কপনা কপনা চৎলি? ok", &config);
        assert_eq!(
            words(&got),
            vec![vec!["ঐ", "যুম", "।"], vec!["কপনা", "কপনা", "চৎলি", "?"], vec!["ok"]]
        );
    }

    #[test]
    fn tokenize_keeps_bengali_marks_inside_words() {
        let config = TokenizerConfig::default();
        let got = tokenize("ল্ম লেংবিরো", &config);
        assert_eq!(words(&got), vec![vec!["ল্ম", "লেংবিরো"]]);
    }

    #[test]
    fn tokenize_custom_symbol_set() {
        let config = TokenizerConfig {
            terminators: BTreeSet::new(),
            symbols: SymbolClass::from_chars(['$']),
        };
        assert_eq!(words(&tokenize("a$b%c.", &config)), vec![vec!["a", "$", "b%c."]]);
    }

    #[test]
    fn parse_two_sentences() {
        let corpus = parse_column_file("a 1 N\nb 0 V\n\nc 1 N\n").unwrap();
        assert_eq!(corpus.sentences().len(), 2);
        assert_eq!(corpus.column_count(), 3);
        assert_eq!(corpus.sentences()[1].labels(), vec!["N"]);
    }

    #[test]
    fn parse_reports_ragged_line() {
        match parse_column_file("a 1\nb 0 V\n") {
            Err(Error::RaggedColumns { line, expected, found }) => {
                assert_eq!((line, expected, found), (2, 2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_tolerates_tabs_and_blank_runs() {
        let corpus = parse_column_file("\n\na\t \tN\n\n\n\nb  V\n\n\n").unwrap();
        assert_eq!(corpus.sentences().len(), 2);
        assert_eq!(write_column_file(&corpus), "a N\n\nb V\n");
    }

    #[test]
    fn write_small_cases() {
        assert_eq!(write_column_file(&Corpus::empty()), "");
        let corpus = Corpus::new(vec![Sentence::new(vec![Token::new(["a", "O"])])]).unwrap();
        assert_eq!(write_column_file(&corpus), "a O\n");
    }

    #[test]
    fn corpus_new_rejects_ragged() {
        let s = Sentence::new(vec![Token::new(["a", "N"]), Token::new(["b"])]);
        assert!(matches!(
            Corpus::new(vec![s]),
            Err(Error::RaggedColumns { line: 2, .. })
        ));
    }

    #[test]
    fn append_column_checks_alignment() {
        let corpus = parse_column_file("a N\nb V\n").unwrap();
        let out = corpus.append_column(&[vec!["x", "y"]]).unwrap();
        assert_eq!(write_column_file(&out), "a N x\nb V y\n");
        assert!(corpus.append_column(&[vec!["x"]]).is_err());
    }
}
