//! Sentiment lexicon loading.

use std::path::{Path, PathBuf};

use fusenews_core::text::Lexicon;
use thiserror::Error;

/// Environment variable naming a lexicon CSV to use instead of the bundled one.
pub const LEXICON_ENV: &str = "FUSENEWS_LEXICON";

const BUNDLED: &str = include_str!("../data/lexicon.csv");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// Parses `token,polarity` rows. Lines starting with `#` are comments and
/// a `token,polarity` header row is skipped.
pub fn parse_lexicon(text: &str) -> Result<Lexicon, LexiconError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("token,polarity") {
            continue;
        }
        let malformed = |reason: String| LexiconError::Malformed { line: i + 1, reason };
        let (token, value) = line
            .rsplit_once(',')
            .ok_or_else(|| malformed("expected token,polarity".into()))?;
        let polarity: f64 = value
            .trim()
            .parse()
            .map_err(|_| malformed(format!("polarity {value:?} is not a number")))?;
        if !polarity.is_finite() {
            return Err(malformed("polarity is not finite".into()));
        }
        pairs.push((token.trim().to_string(), polarity));
    }
    Ok(Lexicon::from_pairs(pairs))
}

pub fn bundled_lexicon() -> Lexicon {
    parse_lexicon(BUNDLED).expect("bundled lexicon parses")
}

pub fn load_lexicon_file(path: &Path) -> Result<Lexicon, LexiconError> {
    let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_lexicon(&text)
}

/// The lexicon named by `FUSENEWS_LEXICON`, or the bundled one.
pub fn load_lexicon() -> Result<Lexicon, LexiconError> {
    match std::env::var_os(LEXICON_ENV) {
        Some(path) if !path.is_empty() => load_lexicon_file(Path::new(&path)),
        _ => Ok(bundled_lexicon()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lexicon_is_populated() {
        let lex = bundled_lexicon();
        assert!(lex.len() > 1000);
        assert!(lex.get("good").unwrap() > 0.0);
        assert!(lex.get("terrible").unwrap() < 0.0);
    }

    #[test]
    fn malformed_rows_name_the_line() {
        let err = parse_lexicon("token,polarity\ngood,0.7\nbad;x\n").unwrap_err();
        assert!(matches!(err, LexiconError::Malformed { line: 3, .. }), "{err}");
    }
}
