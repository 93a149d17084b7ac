use alloc::string::String;
use alloc::vec::Vec;

/// Normalised tokens of one text, in order of appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenList(pub Vec<String>);

impl TokenList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    /// Tokens of `self` followed by tokens of `other`.
    pub fn concat(&self, other: &TokenList) -> TokenList {
        let mut tokens = self.0.clone();
        tokens.extend(other.0.iter().cloned());
        TokenList(tokens)
    }
}

/// Lowercases, replaces every character that is not alphanumeric or `'`
/// with a space, splits on whitespace and normalises each token with
/// [`stem`].
pub fn preprocess(raw: &str) -> TokenList {
    let cleaned: String = raw
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '\'' { c } else { ' ' })
        .collect();
    TokenList(cleaned.split_whitespace().filter_map(stem).collect())
}

/// Suffix-stripping normaliser applied to one lowercase token.
///
/// Rules, in order:
/// 1. leading apostrophes are dropped; a trailing `'s` is dropped, then any
///    trailing apostrophes;
/// 2. tokens containing a numeric character are left as they are;
/// 3. otherwise exactly one suffix rule fires, first match wins, with
///    lengths counted in characters:
///    - `ing` when the token has at least 6 characters,
///    - `ed` when the token has at least 5 characters,
///    - `s` when the token has at least 5 characters and does not end in
///      `ss`, `us` or `is`.
///
/// Returns `None` when nothing is left.
pub fn stem(token: &str) -> Option<String> {
    let mut t = token.trim_start_matches('\'');
    if let Some(stripped) = t.strip_suffix("'s") {
        t = stripped;
    }
    let t = t.trim_end_matches('\'');
    if t.is_empty() {
        return None;
    }
    if t.chars().any(char::is_numeric) {
        return Some(String::from(t));
    }
    let len = t.chars().count();
    let stemmed = if len >= 6 && t.ends_with("ing") {
        &t[..t.len() - 3]
    } else if len >= 5 && t.ends_with("ed") {
        &t[..t.len() - 2]
    } else if len >= 5
        && t.ends_with('s')
        && !(t.ends_with("ss") || t.ends_with("us") || t.ends_with("is"))
    {
        &t[..t.len() - 1]
    } else {
        t
    };
    Some(String::from(stemmed))
}
