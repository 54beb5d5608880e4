//! Corpus files: UTF-8, one whitespace-tokenized sentence per line, LF or
//! CRLF endings. Blank lines are skipped.

use std::fs;
use std::path::Path;

use genmetrics_core::corpus::tokenize;
use genmetrics_core::Corpus;

use crate::error::{Error, Location, Result};

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&bytes, path)
}

/// Parses corpus bytes; `path` is only used in diagnostics.
pub fn parse_corpus(bytes: &[u8], path: &Path) -> Result<Corpus> {
    let mut sentences = Vec::new();
    for (i, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line = std::str::from_utf8(raw)
            .map_err(|e| Error::parse(path, Location::Line(i + 1), format!("invalid UTF-8 at column {}", e.valid_up_to() + 1)))?;
        let tokens = tokenize(line);
        if !tokens.is_empty() {
            sentences.push(tokens);
        }
    }
    Corpus::from_sentences(sentences)
        .map(|c| c.with_source_path(path.display().to_string()))
        .map_err(|source| Error::Data {
            path: path.to_path_buf(),
            source,
        })
}

pub fn write_corpus(path: impl AsRef<Path>, corpus: &Corpus) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, corpus.to_text()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_crlf_and_blank_lines() {
        let c = parse_corpus(b"a b\r\n\r\n  \na  c\n", Path::new("x.txt")).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.sentences()[1], vec!["a", "c"]);
        assert_eq!(c.source_path(), Some("x.txt"));
    }

    #[test]
    fn invalid_utf8_names_line() {
        let err = parse_corpus(b"ok\nbad \xff\n", Path::new("g.txt")).unwrap_err();
        assert_eq!(err.to_string(), "g.txt: line 2: invalid UTF-8 at column 5");
    }

    #[test]
    fn empty_corpus_names_file() {
        let err = parse_corpus(b"\n\n", Path::new("g.txt")).unwrap_err();
        assert_eq!(err.to_string(), "g.txt: corpus contains no sentences");
    }
}
