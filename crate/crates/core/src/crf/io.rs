//! Plain-text model files.
//!
//! ```text
//! crfpos-model 1
//! labels <n>
//! <label>...
//! feature-columns <k>
//! template <bytes>
//! <raw template text>
//! features <n>
//! <observation>...
//! weights <n>
//! <weight>...
//! end
//! ```
//!
//! Header keys and their counts are separated by a tab. Weights use Rust's shortest round-trip float formatting, so a saved
//! model reloads bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use super::CrfModel;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "crfpos-model";

pub fn write_model(model: &CrfModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}\t{FORMAT_VERSION}");
    let _ = writeln!(out, "labels\t{}", model.labels().len());
    for label in model.labels() {
        let _ = writeln!(out, "{label}");
    }
    let _ = writeln!(out, "feature-columns\t{}", model.feature_columns());
    let template = model.template().text();
    let _ = writeln!(out, "template\t{}", template.len());
    out.push_str(template);
    out.push('\n');
    let _ = writeln!(out, "features\t{}", model.features().len());
    for feature in model.features() {
        let _ = writeln!(out, "{feature}");
    }
    let _ = writeln!(out, "weights\t{}", model.weights().len());
    for w in model.weights() {
        let _ = writeln!(out, "{w:?}");
    }
    out.push_str("end\n");
    out
}

struct Reader<'a> {
    rest: &'a str,
}

fn corrupt(message: impl Into<String>) -> Error {
    Error::CorruptModel(message.into())
}

impl<'a> Reader<'a> {
    fn line(&mut self) -> Result<&'a str> {
        if self.rest.is_empty() {
            return Err(corrupt("unexpected end of file"));
        }
        let (line, rest) = self.rest.split_once('\n').ok_or_else(|| corrupt("unterminated line"))?;
        self.rest = rest;
        Ok(line)
    }

    fn header(&mut self, key: &str) -> Result<usize> {
        let line = self.line()?;
        let value = line
            .strip_prefix(key)
            .and_then(|v| v.strip_prefix('\t'))
            .ok_or_else(|| corrupt(format!("expected `{key}` header, found `{line}`")))?;
        value.parse().map_err(|_| corrupt(format!("bad count in `{line}`")))
    }

    fn lines(&mut self, n: usize) -> Result<Vec<String>> {
        (0..n).map(|_| self.line().map(str::to_string)).collect()
    }

    fn bytes(&mut self, n: usize) -> Result<&'a str> {
        if self.rest.len() < n + 1 || !self.rest.is_char_boundary(n) || self.rest.as_bytes()[n] != b'\n' {
            return Err(corrupt("template block is truncated"));
        }
        let (text, rest) = self.rest.split_at(n);
        self.rest = &rest[1..];
        Ok(text)
    }
}

pub fn read_model(text: &str) -> Result<CrfModel> {
    let mut reader = Reader { rest: text };
    let first = reader.line()?;
    let version = first
        .strip_prefix(MAGIC)
        .and_then(|v| v.strip_prefix('\t'))
        .ok_or_else(|| corrupt("not a crfpos model file"))?;
    if version.parse::<u32>().ok() != Some(FORMAT_VERSION) {
        return Err(Error::VersionMismatch {
            found: version.to_string(),
            expected: FORMAT_VERSION,
        });
    }
    let n = reader.header("labels")?;
    let labels = reader.lines(n)?;
    let feature_columns = reader.header("feature-columns")?;
    let n = reader.header("template")?;
    let template = reader.bytes(n)?;
    let n = reader.header("features")?;
    let features = reader.lines(n)?;
    let n = reader.header("weights")?;
    let weights = reader
        .lines(n)?
        .iter()
        .map(|w| w.parse::<f64>().map_err(|_| corrupt(format!("bad weight `{w}`"))))
        .collect::<Result<Vec<_>>>()?;
    if reader.line()? != "end" {
        return Err(corrupt("missing `end` marker"));
    }
    CrfModel::from_parts(labels, template, feature_columns, features, weights)
}

/// Writes atomically: a temporary file in the target directory is renamed
/// over `path`.
pub fn save_model(model: &CrfModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("model"),
        std::process::id()
    ));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(write_model(model).as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<CrfModel> {
    read_model(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> CrfModel {
        CrfModel::from_parts(
            vec!["N".into(), "V".into()],
            "# words\nU00:%x[0,0]\nB\n",
            1,
            vec!["U00:a".into(), "B".into()],
            vec![0.1, -2.5e-17, 1.0 / 3.0, 0.0, -0.0, 7.0, f64::MIN_POSITIVE, 1e300],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model();
        let back = read_model(&write_model(&m)).unwrap();
        assert_eq!(back.labels(), m.labels());
        assert_eq!(back.template().text(), m.template().text());
        for (a, b) in back.weights().iter().zip(m.weights()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_damage() {
        let text = write_model(&model());
        for cut in [0, 5, text.len() / 2, text.len() - 4] {
            assert!(
                matches!(read_model(&text[..cut]), Err(Error::CorruptModel(_))),
                "cut {cut}"
            );
        }
        let bumped = text.replacen("crfpos-model\t1", "crfpos-model\t2", 1);
        assert!(matches!(read_model(&bumped), Err(Error::VersionMismatch { .. })));
        assert!(matches!(read_model("hello\n"), Err(Error::CorruptModel(_))));
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.crf");
        save_model(&model(), &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), model());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
