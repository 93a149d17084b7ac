use alloc::collections::BTreeMap;
use alloc::string::String;

use super::{stem, TokenList};

/// Token → polarity table. Keys are normalised with the same suffix rules
/// as [`super::preprocess`]; entries that collapse onto one key are
/// averaged and every polarity is clamped to `[-1, 1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    polarity: BTreeMap<String, f64>,
}

impl Lexicon {
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for (word, p) in pairs {
            let lowered = word.as_ref().to_lowercase();
            let Some(key) = stem(lowered.trim()) else {
                continue;
            };
            let entry = acc.entry(key).or_insert((0.0, 0));
            entry.0 += p.clamp(-1.0, 1.0);
            entry.1 += 1;
        }
        Self {
            polarity: acc
                .into_iter()
                .map(|(k, (sum, n))| (k, (sum / n as f64).clamp(-1.0, 1.0)))
                .collect(),
        }
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.polarity.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.polarity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polarity.is_empty()
    }
}

/// Mean polarity of the tokens found in the lexicon, 0 without hits.
pub fn sentiment_polarity(tokens: &TokenList, lexicon: &Lexicon) -> f64 {
    let (sum, hits) = tokens
        .iter()
        .filter_map(|t| lexicon.get(t))
        .fold((0.0, 0usize), |(s, n), p| (s + p, n + 1));
    if hits == 0 {
        0.0
    } else {
        (sum / hits as f64).clamp(-1.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::preprocess;

    #[test]
    fn examples() {
        let lex = Lexicon::from_pairs([("good", 1.0)]);
        assert_eq!(sentiment_polarity(&preprocess("nothing here"), &lex), 0.0);
        assert_eq!(sentiment_polarity(&preprocess("good good"), &lex), 1.0);
        let lex = Lexicon::from_pairs([("good", 1.0), ("bad", -1.0)]);
        assert_eq!(sentiment_polarity(&preprocess("good bad"), &lex), 0.0);
    }

    #[test]
    fn keys_share_the_token_normalisation() {
        let lex = Lexicon::from_pairs([("Amazing", 0.6), ("amazed", 0.4)]);
        // "amazing" -> "amaz", "amazed" -> "amaz": averaged.
        assert_eq!(lex.len(), 1);
        assert!((lex.get("amaz").unwrap() - 0.5).abs() < 1e-15);
        assert!((sentiment_polarity(&preprocess("AMAZING!"), &lex) - 0.5).abs() < 1e-15);
    }
}
