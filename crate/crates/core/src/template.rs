//! Feature templates in the `U..:%x[row,col]` / `B` convention.
//!
//! A `U` rule yields one observation string per position which the CRF pairs
//! with the current label. A `B` rule does the same for label bigrams. Rows
//! outside the sentence read the sentinels `_B-1`, `_B-2`, ... before the
//! start and `_B+1`, `_B+2`, ... after the end.

use std::fmt::Write as _;

use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::features::{ColumnLayout, FeatureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Unigram,
    Bigram,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Literal(String),
    Cell { row: isize, column: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateRule {
    kind: RuleKind,
    pieces: Vec<Piece>,
}

impl TemplateRule {
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    /// `(row, column)` of every `%x` macro in the rule.
    pub fn cells(&self) -> impl Iterator<Item = (isize, usize)> + '_ {
        self.pieces.iter().filter_map(|p| match p {
            Piece::Cell { row, column } => Some((*row, *column)),
            Piece::Literal(_) => None,
        })
    }

    /// Expands the rule at `position`.
    pub fn expand(&self, sentence: &Sentence, position: usize) -> String {
        let mut out = String::new();
        for piece in &self.pieces {
            match piece {
                Piece::Literal(text) => out.push_str(text),
                Piece::Cell { row, column } => {
                    let index = position as isize + row;
                    if index < 0 {
                        write!(out, "_B{index}").unwrap();
                    } else if index as usize >= sentence.len() {
                        write!(out, "_B+{}", index as usize - sentence.len() + 1).unwrap();
                    } else {
                        let token = &sentence.tokens()[index as usize];
                        out.push_str(token.column(*column).expect("template validated against corpus"));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    text: String,
    rules: Vec<TemplateRule>,
}

impl Template {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn rules(&self) -> &[TemplateRule] {
        &self.rules
    }

    pub fn has_bigram(&self) -> bool {
        self.rules.iter().any(|r| r.kind == RuleKind::Bigram)
    }

    /// Largest column any rule reads, if any.
    pub fn max_column(&self) -> Option<usize> {
        self.rules.iter().flat_map(TemplateRule::cells).map(|(_, c)| c).max()
    }

    /// Checks that every referenced column exists among `feature_columns`.
    pub fn validate(&self, feature_columns: usize) -> Result<()> {
        match self.max_column() {
            Some(column) if column >= feature_columns => Err(Error::TemplateColumn {
                column,
                available: feature_columns,
            }),
            _ => Ok(()),
        }
    }

    /// Unigram and bigram observation strings at `position`.
    pub fn expand_split(&self, sentence: &Sentence, position: usize) -> (Vec<String>, Vec<String>) {
        let mut unigram = Vec::new();
        let mut bigram = Vec::new();
        for rule in &self.rules {
            let feature = rule.expand(sentence, position);
            match rule.kind {
                RuleKind::Unigram => unigram.push(feature),
                RuleKind::Bigram => bigram.push(feature),
            }
        }
        (unigram, bigram)
    }
}

impl std::str::FromStr for Template {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_template(text)
    }
}

/// Parses a template file. Blank lines and `#` comments are skipped.
pub fn parse_template(text: &str) -> Result<Template> {
    let mut rules = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let error = |message: String| Error::TemplateParse {
            line: number + 1,
            message,
        };
        let kind = match line.chars().next() {
            Some('U') => RuleKind::Unigram,
            Some('B') => RuleKind::Bigram,
            _ => return Err(error(format!("rule must start with U or B: `{line}`"))),
        };
        rules.push(TemplateRule {
            kind,
            pieces: parse_pieces(line).map_err(error)?,
        });
    }
    Ok(Template {
        text: text.to_string(),
        rules,
    })
}

fn parse_pieces(line: &str) -> std::result::Result<Vec<Piece>, String> {
    let mut pieces = Vec::new();
    let mut rest = line;
    while let Some(at) = rest.find("%x[") {
        if at > 0 {
            pieces.push(Piece::Literal(rest[..at].to_string()));
        }
        let body_start = at + 3;
        let close = rest[body_start..]
            .find(']')
            .ok_or_else(|| format!("unterminated %x macro in `{line}`"))?;
        let body = &rest[body_start..body_start + close];
        let (row, column) = body
            .split_once(',')
            .ok_or_else(|| format!("expected %x[row,col], got `%x[{body}]`"))?;
        let row: isize = row
            .trim()
            .parse()
            .map_err(|_| format!("bad row `{}` in `{line}`", row.trim()))?;
        let column: usize = column
            .trim()
            .parse()
            .map_err(|_| format!("bad column `{}` in `{line}`", column.trim()))?;
        pieces.push(Piece::Cell { row, column });
        rest = &rest[body_start + close + 1..];
    }
    if rest.contains("%x") {
        return Err(format!("malformed %x macro in `{line}`"));
    }
    if !rest.is_empty() {
        pieces.push(Piece::Literal(rest.to_string()));
    }
    Ok(pieces)
}

/// Observation strings at one position, sorted and deduplicated.
pub type FeatureVector = Vec<String>;

/// All observation strings at `position`, sorted and deduplicated.
pub fn expand_templates(sentence: &Sentence, position: usize, template: &Template) -> FeatureVector {
    let mut features: Vec<String> = template
        .rules()
        .iter()
        .map(|rule| rule.expand(sentence, position))
        .collect();
    features.sort();
    features.dedup();
    features
}

/// Template text selecting the columns a [`FeatureConfig`] enables over the
/// [`ColumnLayout`] produced by annotation.
pub fn default_best_template(config: &FeatureConfig) -> String {
    let layout = config.layout();
    let mut cells: Vec<(isize, usize)> = Vec::new();
    cells.extend(config.word_window.offsets().map(|row| (row, ColumnLayout::SURFACE)));
    if let Some(window) = config.stem_window {
        cells.extend(window.offsets().map(|row| (row, ColumnLayout::STEM)));
    }
    cells.extend((0..config.prefix_slots).map(|k| (0, layout.prefix_slot(k))));
    cells.extend((0..config.suffix_slots).map(|k| (0, layout.suffix_slot(k))));
    let flags = [
        (config.use_length, layout.length()),
        (config.use_frequency, layout.frequency()),
        (config.use_suffix_count, ColumnLayout::SUFFIX_COUNT),
        (config.use_prefix_count, ColumnLayout::PREFIX_COUNT),
        (config.use_digit, layout.digit()),
        (config.use_symbol, layout.symbol()),
    ];
    cells.extend(flags.iter().filter(|(on, _)| *on).map(|(_, column)| (0, *column)));
    if let Some(column) = layout.rmwe() {
        cells.push((0, column));
    }

    let mut text = String::new();
    for (id, (row, column)) in cells.iter().enumerate() {
        writeln!(text, "U{id:02}:%x[{row},{column}]").unwrap();
    }
    text.push_str("B\n");
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Sentence, Token};
    use crate::features::Window;

    fn sentence(words: &[&str]) -> Sentence {
        Sentence::from_words(words)
    }

    #[test]
    fn substitution() {
        let template = parse_template("U00:%x[0,0]\nU01:%x[-1,0]\nU02:%x[0,0]/%x[1,0]\nB\n").unwrap();
        let s = sentence(&["a", "b"]);
        let expanded: Vec<String> = template.rules().iter().map(|r| r.expand(&s, 0)).collect();
        assert_eq!(expanded, vec!["U00:a", "U01:_B-1", "U02:a/b", "B"]);
        let expanded: Vec<String> = template.rules().iter().map(|r| r.expand(&s, 1)).collect();
        assert_eq!(expanded, vec!["U00:b", "U01:a", "U02:b/_B+1", "B"]);
        assert!(template.has_bigram());
    }

    #[test]
    fn boundary_sentinels_by_distance() {
        let template = parse_template("U0:%x[-2,0]\nU1:%x[3,0]").unwrap();
        let s = sentence(&["a", "b"]);
        let (u, b) = template.expand_split(&s, 0);
        assert_eq!(u, vec!["U0:_B-2", "U1:_B+2"]);
        assert!(b.is_empty());
        let (u, _) = template.expand_split(&s, 1);
        assert_eq!(u, vec!["U0:_B-1", "U1:_B+3"]);
    }

    #[test]
    fn sentinels_distinct_from_cells() {
        // a position-aware rule never collides across boundary and interior reads
        let template = parse_template("U0:%x[-1,0]").unwrap();
        let s = sentence(&["_B", "x"]);
        assert_ne!(template.rules()[0].expand(&s, 0), template.rules()[0].expand(&s, 1));
    }

    #[test]
    fn multi_column() {
        let template = parse_template("U05:%x[0,1]-%x[0,2]").unwrap();
        let s = Sentence::new(vec![Token::new(["w", "st", "3"])]);
        assert_eq!(expand_templates(&s, 0, &template), vec!["U05:st-3"]);
        assert_eq!(template.max_column(), Some(2));
        assert!(template.validate(3).is_ok());
        assert!(matches!(
            template.validate(2),
            Err(Error::TemplateColumn {
                column: 2,
                available: 2
            })
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("U00:%x[0,0]\nX:%x[0,0]", 2),
            ("# c\n\nU00:%x[0", 3),
            ("U00:%x[a,0]", 1),
            ("U00:%x[0,-1]", 1),
            ("U00:%x[0]", 1),
            ("U00:%x", 1),
        ];
        for (text, line) in cases {
            match parse_template(text) {
                Err(Error::TemplateParse { line: got, .. }) => assert_eq!(got, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn expansion_sorted_unique() {
        let template = parse_template("U1:%x[0,0]\nU0:%x[0,0]\nU0:%x[0,0]").unwrap();
        assert_eq!(expand_templates(&sentence(&["z"]), 0, &template), vec!["U0:z", "U1:z"]);
    }

    #[test]
    fn minimal_template() {
        assert_eq!(default_best_template(&FeatureConfig::default()), "U00:%x[0,0]\nB\n");
    }

    fn referenced(text: &str) -> Vec<(isize, usize)> {
        let template = parse_template(text).unwrap();
        let mut cells: Vec<_> = template
            .rules()
            .iter()
            .flat_map(|r| r.cells().collect::<Vec<_>>())
            .collect();
        cells.sort();
        cells
    }

    #[test]
    fn best_template_columns() {
        let config = FeatureConfig::best();
        let layout = config.layout();
        let mut expected = vec![
            (-2, 0),
            (-1, 0),
            (0, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
            (0, layout.prefix_slot(0)),
            (0, ColumnLayout::PREFIX_COUNT),
            (0, ColumnLayout::SUFFIX_COUNT),
            (0, layout.length()),
            (0, layout.frequency()),
            (0, layout.digit()),
            (0, layout.symbol()),
        ];
        expected.extend((0..4).map(|k| (0, layout.suffix_slot(k))));
        expected.sort();
        let text = default_best_template(&config);
        assert_eq!(referenced(&text), expected);
        assert!(text.ends_with("B\n"));
        assert!(parse_template(&text).unwrap().validate(layout.width()).is_ok());

        let with_rmwe = config.clone().with_rmwe(true);
        let rmwe_column = with_rmwe.layout().rmwe().unwrap();
        let mut plus = expected.clone();
        plus.push((0, rmwe_column));
        plus.sort();
        assert_eq!(referenced(&default_best_template(&with_rmwe)), plus);
    }

    #[test]
    fn windows_expand_to_offsets() {
        let config = FeatureConfig {
            word_window: Window::new(1, 2),
            ..FeatureConfig::default()
        };
        let text = default_best_template(&config);
        assert_eq!(referenced(&text), vec![(-1, 0), (0, 0), (1, 0), (2, 0)]);
    }
}
