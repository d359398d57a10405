//! Part-of-speech tagging for agglutinative text: affix-stripping stemmer,
//! reduplicated multiword expression (RMWE) detector, feature-column
//! annotation and a linear-chain CRF with evaluation.

pub mod affix;
pub mod chars;
pub mod corpus;
pub mod crf;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod rmwe;
pub mod template;

pub use affix::{AffixList, StemResult, Stemmer, StripOrder};
pub use corpus::{parse_column_file, write_column_file, Corpus, Sentence, Token};
pub use crf::{CrfModel, TrainConfig};
pub use error::{Error, Result};
pub use eval::{evaluate, EvalReport, LabelFilter};
pub use features::FeatureConfig;
pub use rmwe::{Dictionary, RmweKind, RmweSpan};
pub use template::Template;
