//! Embedding interchange files.
//!
//! UTF-8 text. The first line is `dim=<d>`; every following line is
//! `id<TAB>v1,v2,...,vd` with decimal floats.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use fusenews_core::encoder::EmbeddingStore;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingFileError {
    #[error("cannot read embeddings {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot read embeddings: {0}")]
    Read(std::io::Error),
    #[error("embeddings line 1: expected header dim=<d>, found {0:?}")]
    Header(String),
    #[error("embeddings line {line}: expected id<TAB>values")]
    MissingTab { line: usize },
    #[error("embeddings line {line}: value {value:?} is not a finite number")]
    BadValue { line: usize, value: String },
    #[error("embeddings line {line}: expected {expected} values, found {found}")]
    Dimension { line: usize, expected: usize, found: usize },
    #[error("embeddings line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
}

pub fn read_embeddings<R: BufRead>(reader: R, source: &str) -> Result<EmbeddingStore, EmbeddingFileError> {
    let io = EmbeddingFileError::Read;
    let mut lines = reader.lines();
    let header = lines.next().transpose().map_err(io)?.unwrap_or_default();
    let dim: usize = header
        .trim_end_matches('\r')
        .strip_prefix("dim=")
        .and_then(|d| d.trim().parse().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| EmbeddingFileError::Header(header.clone()))?;
    let mut store = EmbeddingStore::new(dim, source);
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(io)?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let (id, values) = line
            .split_once('\t')
            .ok_or(EmbeddingFileError::MissingTab { line: line_no })?;
        let parsed = values
            .split(',')
            .map(|v| {
                v.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                    EmbeddingFileError::BadValue {
                        line: line_no,
                        value: v.to_string(),
                    }
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if parsed.len() != dim {
            return Err(EmbeddingFileError::Dimension {
                line: line_no,
                expected: dim,
                found: parsed.len(),
            });
        }
        if store.contains(id) {
            return Err(EmbeddingFileError::DuplicateId {
                line: line_no,
                id: id.to_string(),
            });
        }
        store.insert(id, parsed).expect("dimension and finiteness checked");
    }
    Ok(store)
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingStore, EmbeddingFileError> {
    let file = std::fs::File::open(path).map_err(|source| EmbeddingFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_embeddings(std::io::BufReader::new(file), &path.display().to_string())
}

/// Writes `store` using the shortest decimal that reads back to the same
/// `f64`, so a write/read round trip is bit-exact.
pub fn write_embeddings<W: Write>(mut out: W, store: &EmbeddingStore) -> std::io::Result<()> {
    writeln!(out, "dim={}", store.dim())?;
    for (id, values) in store.iter() {
        let joined: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{id}\t{}", joined.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_rows_of_dim_four() {
        let text = "dim=4\na\t1,2,3,4\nb\t0.5,-1e-3,0,7\nc\t1,1,1,1\n";
        let store = read_embeddings(text.as_bytes(), "t").unwrap();
        assert_eq!((store.len(), store.dim()), (3, 4));
        assert_eq!(store.get("b").unwrap(), &[0.5, -1e-3, 0.0, 7.0]);
    }

    #[test]
    fn distinct_errors_name_the_line() {
        let short = read_embeddings("dim=4\na\t1,2,3,4\nb\t1,2,3\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(
            short,
            EmbeddingFileError::Dimension { line: 3, expected: 4, found: 3 }
        ));
        let bad = read_embeddings("dim=2\na\t1,x\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(bad, EmbeddingFileError::BadValue { line: 2, .. }));
        let tab = read_embeddings("dim=2\na 1,2\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(tab, EmbeddingFileError::MissingTab { line: 2 }));
        let dup = read_embeddings("dim=1\na\t1\na\t2\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(dup, EmbeddingFileError::DuplicateId { line: 3, .. }));
        let header = read_embeddings("d=2\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(header, EmbeddingFileError::Header(_)));
        assert!(matches!(
            load_embeddings(Path::new("/nonexistent/emb.txt")),
            Err(EmbeddingFileError::Io { .. })
        ));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut store = EmbeddingStore::new(3, "t");
        store.insert("x", vec![0.1, 1.0 / 3.0, -2.5e-300]).unwrap();
        store.insert("y", vec![f64::MAX, f64::MIN_POSITIVE, -0.0]).unwrap();
        let mut buf = Vec::new();
        write_embeddings(&mut buf, &store).unwrap();
        let back = read_embeddings(buf.as_slice(), "t").unwrap();
        for (id, v) in store.iter() {
            let w = back.get(id).unwrap();
            assert!(v.iter().zip(w).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }
}
