use std::borrow::Cow;
use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{Error, Result};

/// Anything that can hand out a vector for a word.
pub trait WordVectors {
    fn dim(&self) -> usize;

    /// `None` when the word is not represented.
    fn vector(&self, word: &str) -> Option<Cow<'_, [f32]>>;
}

/// Plain word vectors in insertion order, as read from or written to the
/// word2vec text format.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VectorTable {
    dim: usize,
    words: Vec<String>,
    vectors: Vec<Vec<f32>>,
    index: HashMap<String, usize>,
}

impl VectorTable {
    pub fn new(dim: usize) -> Self {
        VectorTable {
            dim,
            ..Default::default()
        }
    }

    /// Inserts or replaces a vector. Fails when its length is not `dim`.
    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<f32>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        let word = word.into();
        match self.index.get(&word) {
            Some(&i) => self.vectors[i] = vector,
            None => {
                self.index.insert(word.clone(), self.words.len());
                self.words.push(word);
                self.vectors.push(vector);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index.get(word).map(|&i| self.vectors[i].as_slice())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.words.iter().map(String::as_str).zip(self.vectors.iter().map(Vec::as_slice))
    }
}

impl WordVectors for VectorTable {
    fn dim(&self) -> usize {
        self.dim
    }

    fn vector(&self, word: &str) -> Option<Cow<'_, [f32]>> {
        self.get(word).map(Cow::Borrowed)
    }
}

/// Reads the word2vec text format: a `count dim` header, then one
/// `word v1 ... v_dim` line per word.
pub fn load_pretrained_text_vectors(path: impl AsRef<Path>) -> Result<VectorTable> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_text_vectors(file, &path.display().to_string())
}

pub fn parse_text_vectors<R: Read>(reader: R, source_name: &str) -> Result<VectorTable> {
    let mut lines = BufReader::new(reader).lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| Error::parse(source_name, 1, e.to_string()))?,
        None => return Err(Error::parse(source_name, 1, "missing header")),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parse_usize = |s: &str| s.parse::<usize>().ok();
    let (count, dim) = match fields.as_slice() {
        [c, d] => match (parse_usize(c), parse_usize(d)) {
            (Some(c), Some(d)) if d > 0 => (c, d),
            _ => return Err(Error::parse(source_name, 1, format!("bad header {header:?}"))),
        },
        _ => return Err(Error::parse(source_name, 1, "header must be \"count dim\"")),
    };

    let mut table = VectorTable::new(dim);
    let mut rows = 0usize;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-empty line");
        let values = parts
            .map(|s| {
                s.parse::<f32>()
                    .map_err(|_| Error::parse(source_name, lineno, format!("not a number: {s:?}")))
            })
            .collect::<Result<Vec<f32>>>()?;
        if values.len() != dim {
            return Err(Error::parse(
                source_name,
                lineno,
                format!("expected {dim} values, found {}", values.len()),
            ));
        }
        rows += 1;
        table.insert(word, values)?;
    }
    if rows != count {
        return Err(Error::parse(
            source_name,
            rows + 2,
            format!("header declares {count} rows, found {rows}"),
        ));
    }
    Ok(table)
}

/// Writes the word2vec text format. Floats use the shortest representation
/// that parses back to the same `f32`.
pub fn write_text_vectors(table: &VectorTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "{} {}", table.len(), table.dim()).map_err(io)?;
    for (word, vector) in table.iter() {
        write!(out, "{word}").map_err(io)?;
        for v in vector {
            write!(out, " {v}").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<VectorTable> {
        parse_text_vectors(s.as_bytes(), "vec.txt")
    }

    #[test]
    fn two_rows() {
        let t = parse("2 3\nrex 1 2 3\nterra 0.5 -1 2e-3\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("terra").unwrap(), &[0.5, -1.0, 0.002]);
    }

    #[test]
    fn count_mismatch() {
        assert!(matches!(parse("2 3\nrex 1 2 3\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn arity_mismatch_names_line() {
        match parse("2 3\nrex 1 2 3\nterra 1 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scientific_notation() {
        let t = parse("1 2\nx 1.5E+2 -3.25e-1\n").unwrap();
        assert_eq!(t.get("x").unwrap(), &[150.0, -0.325]);
    }

    #[test]
    fn trailing_spaces_tolerated() {
        let t = parse("1 2 \nx 1 2 \n").unwrap();
        assert_eq!(t.get("x").unwrap(), &[1.0, 2.0]);
    }

    #[test]
    fn write_then_read_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.vec");
        let mut t = VectorTable::new(3);
        t.insert("a", vec![0.1, -1e-7, 3.4028235e38]).unwrap();
        t.insert("b", vec![1.0 / 3.0, 0.0, -2.5]).unwrap();
        write_text_vectors(&t, &path).unwrap();
        assert_eq!(load_pretrained_text_vectors(&path).unwrap(), t);
    }

    #[test]
    fn insert_checks_dim() {
        let mut t = VectorTable::new(2);
        assert!(matches!(t.insert("a", vec![1.0]), Err(Error::DimMismatch { expected: 2, found: 1 })));
    }
}
