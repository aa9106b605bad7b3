use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A word and its half-open piece range `[start, end)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSpan {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

impl WordSpan {
    pub fn new(surface: impl Into<String>, start: usize, end: usize) -> Self {
        WordSpan {
            surface: surface.into(),
            start,
            end,
        }
    }
}

/// Hidden states of one sentence: `layer_count x piece_count x dim` floats,
/// layer-major, layers ordered shallow to deep.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextualSentenceRecord {
    sentence_id: String,
    period: String,
    dim: usize,
    layer_count: usize,
    piece_count: usize,
    tensor: Vec<f32>,
    words: Vec<WordSpan>,
    truncated_words: usize,
}

#[derive(Serialize, Deserialize)]
struct WireWord {
    surface: String,
    span: [usize; 2],
}

#[derive(Serialize, Deserialize)]
struct WireRecord {
    sentence_id: String,
    period: String,
    dim: usize,
    layer_count: usize,
    piece_count: usize,
    words: Vec<WireWord>,
    /// base64 of little-endian f32
    tensor: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    truncated_words: usize,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

impl ContextualSentenceRecord {
    /// Builds and validates a record.
    pub fn new(
        sentence_id: impl Into<String>,
        period: impl Into<String>,
        layer_count: usize,
        piece_count: usize,
        dim: usize,
        tensor: Vec<f32>,
        words: Vec<WordSpan>,
    ) -> Result<Self> {
        let record = ContextualSentenceRecord {
            sentence_id: sentence_id.into(),
            period: period.into(),
            dim,
            layer_count,
            piece_count,
            tensor,
            words,
            truncated_words: 0,
        };
        record.validate()?;
        Ok(record)
    }

    /// Number of words the exporter dropped because the sentence exceeded the
    /// model's maximum length.
    pub fn with_truncated_words(mut self, n: usize) -> Self {
        self.truncated_words = n;
        self
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        Error::Record {
            sentence_id: self.sentence_id.clone(),
            message: message.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sentence_id.is_empty() {
            return Err(self.fail("empty sentence_id"));
        }
        if self.layer_count == 0 || self.piece_count == 0 || self.dim == 0 {
            return Err(self.fail(format!(
                "layer_count, piece_count and dim must be positive (got {}, {}, {})",
                self.layer_count, self.piece_count, self.dim
            )));
        }
        let expected = self.layer_count * self.piece_count * self.dim;
        if self.tensor.len() != expected {
            return Err(self.fail(format!(
                "tensor holds {} floats, expected {} x {} x {} = {expected}",
                self.tensor.len(),
                self.layer_count,
                self.piece_count,
                self.dim
            )));
        }
        if let Some(pos) = self.tensor.iter().position(|v| !v.is_finite()) {
            return Err(self.fail(format!("non-finite value at tensor index {pos}")));
        }
        let mut prev_end = 0;
        for w in &self.words {
            if w.start >= w.end || w.end > self.piece_count {
                return Err(self.fail(format!(
                    "span [{}, {}) of {:?} is empty or outside [0, {})",
                    w.start, w.end, w.surface, self.piece_count
                )));
            }
            if w.start < prev_end {
                return Err(self.fail(format!("span of {:?} overlaps or precedes the previous word", w.surface)));
            }
            prev_end = w.end;
        }
        Ok(())
    }

    pub fn sentence_id(&self) -> &str {
        &self.sentence_id
    }

    pub fn period(&self) -> &str {
        &self.period
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn piece_count(&self) -> usize {
        self.piece_count
    }

    pub fn words(&self) -> &[WordSpan] {
        &self.words
    }

    pub fn truncated_words(&self) -> usize {
        self.truncated_words
    }

    pub fn tensor(&self) -> &[f32] {
        &self.tensor
    }

    /// `piece_count x dim` slice of one layer.
    pub fn layer(&self, l: usize) -> &[f32] {
        let size = self.piece_count * self.dim;
        &self.tensor[l * size..(l + 1) * size]
    }

    /// One JSON line in the interchange format, without the newline.
    pub fn to_json_line(&self) -> Result<String> {
        let bytes: Vec<u8> = self.tensor.iter().flat_map(|v| v.to_le_bytes()).collect();
        let wire = WireRecord {
            sentence_id: self.sentence_id.clone(),
            period: self.period.clone(),
            dim: self.dim,
            layer_count: self.layer_count,
            piece_count: self.piece_count,
            words: self
                .words
                .iter()
                .map(|w| WireWord {
                    surface: w.surface.clone(),
                    span: [w.start, w.end],
                })
                .collect(),
            tensor: STANDARD.encode(bytes),
            truncated_words: self.truncated_words,
        };
        Ok(serde_json::to_string(&wire)?)
    }

    /// Parses and validates one JSON line.
    pub fn from_json_line(line: &str) -> Result<Self> {
        let wire: WireRecord = serde_json::from_str(line)?;
        let fail = |message: String| Error::Record {
            sentence_id: wire.sentence_id.clone(),
            message,
        };
        let bytes = STANDARD
            .decode(wire.tensor.as_bytes())
            .map_err(|e| fail(format!("tensor is not valid base64: {e}")))?;
        let expected = wire
            .layer_count
            .checked_mul(wire.piece_count)
            .and_then(|n| n.checked_mul(wire.dim))
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| fail("tensor shape overflows".into()))?;
        if bytes.len() != expected {
            return Err(fail(format!(
                "tensor payload is {} bytes, expected {} x {} x {} x 4 = {expected}",
                bytes.len(),
                wire.layer_count,
                wire.piece_count,
                wire.dim
            )));
        }
        let tensor = bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        let words = wire
            .words
            .into_iter()
            .map(|w| WordSpan::new(w.surface, w.span[0], w.span[1]))
            .collect();
        let record = ContextualSentenceRecord {
            sentence_id: wire.sentence_id,
            period: wire.period,
            dim: wire.dim,
            layer_count: wire.layer_count,
            piece_count: wire.piece_count,
            tensor,
            words,
            truncated_words: wire.truncated_words,
        };
        record.validate()?;
        Ok(record)
    }
}

/// Streams validated records from newline-delimited JSON.
pub struct RecordReader<R> {
    lines: std::io::Lines<R>,
    source_name: String,
    line: usize,
}

impl<R: BufRead> RecordReader<R> {
    pub fn new(reader: R, source_name: impl Into<String>) -> Self {
        RecordReader {
            lines: reader.lines(),
            source_name: source_name.into(),
            line: 0,
        }
    }
}

impl<R: BufRead> Iterator for RecordReader<R> {
    type Item = Result<ContextualSentenceRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line += 1;
            let line = match line {
                Ok(l) => l,
                Err(e) => return Some(Err(Error::parse(&self.source_name, self.line, e.to_string()))),
            };
            if line.trim().is_empty() {
                continue;
            }
            return Some(ContextualSentenceRecord::from_json_line(&line).map_err(|e| match e {
                Error::Json(j) => Error::parse(&self.source_name, self.line, format!("invalid record: {j}")),
                other => other,
            }));
        }
    }
}

pub fn read_records(path: impl AsRef<Path>) -> Result<RecordReader<BufReader<fs::File>>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(RecordReader::new(BufReader::new(file), path.display().to_string()))
}

pub fn write_records<'a>(
    records: impl IntoIterator<Item = &'a ContextualSentenceRecord>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for record in records {
        writeln!(out, "{}", record.to_json_line()?).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
