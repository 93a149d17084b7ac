//! Dataset CSV ingestion.
//!
//! The file has a header row naming at least the columns `id`, `title`,
//! `text` and `label` (in any order; extra columns are ignored). Labels are
//! `0` or `1`; which of the two means fake is configurable.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use fusenews_core::text::{Article, Label};
use thiserror::Error;

pub const REQUIRED_COLUMNS: [&str; 4] = ["id", "title", "text", "label"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read dataset {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("dataset is missing required column \"{0}\"")]
    MissingColumn(&'static str),
    #[error("dataset line {line}: {reason}")]
    Row { line: u64, reason: String },
    #[error("dataset header: {0}")]
    Header(String),
}

/// How the `label` column is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    /// Required; the given value (`0` or `1`) marks fake articles.
    Required { fake: u8 },
    /// May be absent or empty (prediction input); missing labels read as real.
    Optional { fake: u8 },
}

impl LabelColumn {
    fn fake(self) -> u8 {
        match self {
            Self::Required { fake } | Self::Optional { fake } => fake,
        }
    }
}

pub fn read_articles<R: Read>(reader: R, labels: LabelColumn) -> Result<Vec<Article>, DatasetError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let headers = csv.headers().map_err(|e| DatasetError::Header(e.to_string()))?.clone();
    let column = |name: &'static str| headers.iter().position(|h| h.trim().trim_start_matches('\u{feff}') == name);
    let mut index = [0usize; 4];
    for (slot, name) in index.iter_mut().zip(REQUIRED_COLUMNS) {
        match column(name) {
            Some(i) => *slot = i,
            None if name == "label" && matches!(labels, LabelColumn::Optional { .. }) => *slot = usize::MAX,
            None => return Err(DatasetError::MissingColumn(name)),
        }
    }
    let [id_col, title_col, text_col, label_col] = index;
    let mut seen = HashSet::new();
    let mut articles = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| DatasetError::Row {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row_error = |reason: String| DatasetError::Row { line, reason };
        let id = record[id_col].to_string();
        if id.is_empty() {
            return Err(row_error("empty id".into()));
        }
        if !seen.insert(id.clone()) {
            return Err(row_error(format!("duplicate id {id:?}")));
        }
        let raw_label = record.get(label_col).map(str::trim).unwrap_or("");
        let label = match (raw_label, labels) {
            ("", LabelColumn::Optional { .. }) => Label::Real,
            ("0" | "1", _) => {
                if raw_label == labels.fake().to_string() {
                    Label::Fake
                } else {
                    Label::Real
                }
            }
            (other, _) => return Err(row_error(format!("label {other:?} is not 0 or 1"))),
        };
        articles.push(Article::new(id, &record[title_col], &record[text_col], label));
    }
    Ok(articles)
}

pub fn load_articles(path: &Path, labels: LabelColumn) -> Result<Vec<Article>, DatasetError> {
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_articles(std::io::BufReader::new(file), labels)
}

/// Writes articles in the dataset schema with `1` marking fake.
pub fn write_articles<W: Write>(writer: W, articles: &[Article]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(REQUIRED_COLUMNS)?;
    for a in articles {
        let label = if a.label == Label::Fake { "1" } else { "0" };
        out.write_record([a.id.as_str(), &a.title, &a.body, label])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const REQUIRED: LabelColumn = LabelColumn::Required { fake: 1 };

    #[test]
    fn reads_columns_in_any_order() {
        let csv = "label,text,extra,id,title\n1,body one,x,a,Title A\n0,\"body, two\",y,b,Title B\n";
        let articles = read_articles(csv.as_bytes(), REQUIRED).unwrap();
        assert_eq!(articles.len(), 2);
        assert_eq!(articles[1].body, "body, two");
        assert_eq!(articles[0].label, Label::Fake);
        assert_eq!(articles[1].label, Label::Real);
    }

    #[test]
    fn label_convention_can_be_flipped() {
        let csv = "id,title,text,label\na,t,b,1\nb,t,b,0\n";
        let articles = read_articles(csv.as_bytes(), LabelColumn::Required { fake: 0 }).unwrap();
        assert_eq!(articles[0].label, Label::Real);
        assert_eq!(articles[1].label, Label::Fake);
    }

    #[test]
    fn missing_column_is_named() {
        let err = read_articles("id,text,label\na,b,1\n".as_bytes(), REQUIRED).unwrap_err();
        assert!(matches!(err, DatasetError::MissingColumn("title")));
        assert!(err.to_string().contains("\"title\""));
    }

    #[test]
    fn bad_rows_report_their_line() {
        let csv = "id,title,text,label\na,t,b,1\nb,t,b,maybe\n";
        let err = read_articles(csv.as_bytes(), REQUIRED).unwrap_err();
        assert!(matches!(err, DatasetError::Row { line: 3, .. }), "{err}");
        let csv = "id,title,text,label\na,t,b,1\nb,t,1\n";
        let err = read_articles(csv.as_bytes(), REQUIRED).unwrap_err();
        assert!(matches!(err, DatasetError::Row { line: 3, .. }), "{err}");
        let csv = "id,title,text,label\na,t,b,1\na,t,b,0\n";
        assert!(read_articles(csv.as_bytes(), REQUIRED).is_err());
    }

    #[test]
    fn optional_labels() {
        let csv = "id,title,text\na,t,b\n";
        let articles = read_articles(csv.as_bytes(), LabelColumn::Optional { fake: 1 }).unwrap();
        assert_eq!(articles[0].label, Label::Real);
        assert!(read_articles(csv.as_bytes(), REQUIRED).is_err());
    }

    #[test]
    fn write_then_read() {
        let articles = vec![
            Article::new("x", "A \"quoted\" title", "line\nbreak, comma", Label::Fake),
            Article::new("y", "", "", Label::Real),
        ];
        let mut buf = Vec::new();
        write_articles(&mut buf, &articles).unwrap();
        assert_eq!(read_articles(buf.as_slice(), REQUIRED).unwrap(), articles);
    }
}
