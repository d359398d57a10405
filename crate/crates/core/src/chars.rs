//! Character classes shared by the tokenizer and the feature columns.

use std::collections::BTreeSet;

use unicode_general_category::{get_general_category, GeneralCategory};

/// Unicode decimal digit (`Nd`). Covers ASCII and Bengali digits alike.
pub fn is_digit(c: char) -> bool {
    get_general_category(c) == GeneralCategory::DecimalNumber
}

/// Unicode punctuation (`P*`) or symbol (`S*`) category.
pub fn is_punctuation_or_symbol(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
            | MathSymbol
            | CurrencySymbol
            | ModifierSymbol
            | OtherSymbol
    )
}

/// Which characters count as "special symbols".
///
/// Combining marks (vowel signs, virama, nukta) never belong to the default
/// class, so Bengali-script words are not torn apart at their diacritics.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SymbolClass {
    /// Every Unicode punctuation or symbol character.
    #[default]
    Unicode,
    /// An explicit character set.
    Chars(BTreeSet<char>),
}

impl SymbolClass {
    pub fn from_chars(chars: impl IntoIterator<Item = char>) -> Self {
        SymbolClass::Chars(chars.into_iter().collect())
    }

    pub fn contains(&self, c: char) -> bool {
        match self {
            SymbolClass::Unicode => is_punctuation_or_symbol(c),
            SymbolClass::Chars(set) => set.contains(&c),
        }
    }

    pub fn any_in(&self, word: &str) -> bool {
        word.chars().any(|c| self.contains(c))
    }
}
