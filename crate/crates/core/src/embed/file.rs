//! Binary space files.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! b"CLEX1"                      magic + format version
//! u64                           header length in bytes
//! JSON header                   dim, words, counts, n-gram range, bucket count
//! f32 * (|V| + buckets) * dim   input matrix, row-major
//! f32 * |V| * dim               output matrix, row-major
//! ```

use std::fs;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EmbeddingSpace, SubwordIndexer, Vocab};
use crate::{Error, Matrix, Result};

pub const SPACE_MAGIC: &[u8; 5] = b"CLEX1";

#[derive(Serialize, Deserialize)]
struct Header {
    dim: usize,
    words: Vec<String>,
    counts: Vec<u64>,
    ngram_min: usize,
    ngram_max: usize,
    bucket_count: usize,
}

pub fn save_space(space: &EmbeddingSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_space(space, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

fn write_space<W: Write>(space: &EmbeddingSpace, out: &mut W) -> std::io::Result<()> {
    let header = Header {
        dim: space.dim(),
        words: space.vocab.words().to_vec(),
        counts: space.vocab.counts().to_vec(),
        ngram_min: space.indexer.ngram_min,
        ngram_max: space.indexer.ngram_max,
        bucket_count: space.indexer.bucket_count,
    };
    let header = serde_json::to_vec(&header).map_err(std::io::Error::other)?;
    out.write_all(SPACE_MAGIC)?;
    out.write_all(&(header.len() as u64).to_le_bytes())?;
    out.write_all(&header)?;
    for v in space.input.as_slice().iter().chain(space.output.as_slice()) {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn load_space(path: impl AsRef<Path>) -> Result<EmbeddingSpace> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_space(BufReader::new(file))
}

fn read_exact_or_truncated<R: Read>(reader: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    reader.read_exact(buf).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => Error::SpaceFormat(format!("truncated file while reading {what}")),
        _ => Error::SpaceFormat(format!("read error in {what}: {e}")),
    })
}

fn read_matrix<R: Read>(reader: &mut R, rows: usize, cols: usize, what: &str) -> Result<Matrix<f32>> {
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::SpaceFormat(format!("{what} size overflows")))?;
    let mut data = Vec::with_capacity(len);
    let mut buf = vec![0u8; 4 * 16_384];
    let mut remaining = len;
    while remaining > 0 {
        let n = remaining.min(16_384);
        read_exact_or_truncated(reader, &mut buf[..4 * n], what)?;
        data.extend(
            buf[..4 * n]
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])),
        );
        remaining -= n;
    }
    Ok(Matrix::from_vec(rows, cols, data))
}

pub(crate) fn read_space<R: Read>(mut reader: R) -> Result<EmbeddingSpace> {
    let mut magic = [0u8; 5];
    read_exact_or_truncated(&mut reader, &mut magic, "magic")?;
    if &magic != SPACE_MAGIC {
        if magic.starts_with(b"CLEX") {
            return Err(Error::VersionMismatch {
                expected: String::from_utf8_lossy(SPACE_MAGIC).into_owned(),
                found: String::from_utf8_lossy(&magic).into_owned(),
            });
        }
        return Err(Error::SpaceFormat("bad magic bytes".into()));
    }
    let mut len = [0u8; 8];
    read_exact_or_truncated(&mut reader, &mut len, "header length")?;
    let len = u64::from_le_bytes(len);
    if len > (1 << 34) {
        return Err(Error::SpaceFormat(format!("implausible header length {len}")));
    }
    let mut header = vec![0u8; len as usize];
    read_exact_or_truncated(&mut reader, &mut header, "header")?;
    let header: Header =
        serde_json::from_slice(&header).map_err(|e| Error::SpaceFormat(format!("bad header: {e}")))?;

    if header.words.len() != header.counts.len() {
        return Err(Error::SpaceFormat("words and counts differ in length".into()));
    }
    if header.dim == 0 || header.bucket_count == 0 || header.ngram_min == 0 || header.ngram_min > header.ngram_max {
        return Err(Error::SpaceFormat("invalid header parameters".into()));
    }
    let vocab_len = header.words.len();
    let input = read_matrix(&mut reader, vocab_len + header.bucket_count, header.dim, "input matrix")?;
    let output = read_matrix(&mut reader, vocab_len, header.dim, "output matrix")?;
    let mut probe = [0u8; 1];
    match reader.read(&mut probe) {
        Ok(0) => {}
        Ok(_) => return Err(Error::SpaceFormat("trailing bytes after output matrix".into())),
        Err(e) => return Err(Error::SpaceFormat(format!("read error: {e}"))),
    }

    let vocab = Vocab::from_parts(header.words, header.counts);
    if vocab.len() != vocab_len {
        return Err(Error::SpaceFormat("duplicate words in header".into()));
    }
    let indexer = SubwordIndexer::new(header.ngram_min, header.ngram_max, header.bucket_count);
    EmbeddingSpace::from_parts(vocab, indexer, input, output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> EmbeddingSpace {
        let vocab = Vocab::from_counts([("rex", 7), ("terra", 5)], 1).unwrap();
        let input = Matrix::from_vec(5, 2, vec![0.5, -0.25, 1.0, 2.0, 3.0, -4.0, 1e-30, 7.5, 0.0, -0.0]);
        let output = Matrix::from_vec(2, 2, vec![0.125, 0.0, -1.0, 100.0]);
        EmbeddingSpace::from_parts(vocab, SubwordIndexer::new(3, 6, 3), input, output).unwrap()
    }

    fn bytes(space: &EmbeddingSpace) -> Vec<u8> {
        let mut buf = Vec::new();
        write_space(space, &mut buf).unwrap();
        buf
    }

    #[test]
    fn round_trip_is_bitwise() {
        let space = tiny();
        let back = read_space(bytes(&space).as_slice()).unwrap();
        assert_eq!(back.vocab.words(), space.vocab.words());
        let bits = |m: &Matrix<f32>| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back.input), bits(&space.input));
        assert_eq!(bits(&back.output), bits(&space.output));
    }

    #[test]
    fn every_truncation_fails() {
        let full = bytes(&tiny());
        for cut in [0, 3, 5, 9, 13, 20, full.len() - 40, full.len() - 1] {
            let err = read_space(&full[..cut]).unwrap_err();
            assert!(matches!(err, Error::SpaceFormat(_)), "cut {cut}: {err:?}");
        }
    }

    #[test]
    fn trailing_garbage_fails() {
        let mut full = bytes(&tiny());
        full.push(0);
        assert!(read_space(full.as_slice()).is_err());
    }

    #[test]
    fn version_tag_checked() {
        let mut full = bytes(&tiny());
        full[4] = b'2';
        assert!(matches!(read_space(full.as_slice()), Err(Error::VersionMismatch { .. })));
        full[0] = b'X';
        assert!(matches!(read_space(full.as_slice()), Err(Error::SpaceFormat(_))));
    }

    #[test]
    fn hand_built_little_endian_file() {
        // one word, one bucket, dim 2, written byte by byte
        let header = br#"{"dim":2,"words":["a"],"counts":[9],"ngram_min":3,"ngram_max":6,"bucket_count":1}"#;
        let mut file = Vec::new();
        file.extend_from_slice(b"CLEX1");
        file.extend_from_slice(&[header.len() as u8, 0, 0, 0, 0, 0, 0, 0]);
        file.extend_from_slice(header);
        // input rows: [1.0, -2.0], [0.5, 0.0]; output row: [0.25, 3.0]
        for bits in [0x3f80_0000u32, 0xc000_0000, 0x3f00_0000, 0, 0x3e80_0000, 0x4040_0000] {
            let b = bits.to_le_bytes();
            file.extend_from_slice(&b);
        }
        let space = read_space(file.as_slice()).unwrap();
        assert_eq!(space.input.as_slice(), &[1.0, -2.0, 0.5, 0.0]);
        assert_eq!(space.output.as_slice(), &[0.25, 3.0]);
        assert_eq!(space.vocab.count(0), 9);
    }
}
