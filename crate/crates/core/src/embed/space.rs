use std::borrow::Cow;

use rand::Rng;

use super::{SubwordIndexer, Vocab, WordVectors};
use crate::{Error, Matrix, Result};

/// A trained (or initialized) embedding space for one period.
///
/// Input rows `0..vocab.len()` hold whole-word vectors; rows
/// `vocab.len()..vocab.len() + bucket_count` hold n-gram bucket vectors.
/// Output rows exist for vocabulary words only.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSpace {
    pub(crate) vocab: Vocab,
    pub(crate) indexer: SubwordIndexer,
    pub(crate) input: Matrix<f32>,
    pub(crate) output: Matrix<f32>,
}

impl EmbeddingSpace {
    /// Assembles a space, checking matrix shapes and finiteness.
    pub fn from_parts(vocab: Vocab, indexer: SubwordIndexer, input: Matrix<f32>, output: Matrix<f32>) -> Result<Self> {
        let expected_rows = vocab.len() + indexer.bucket_count;
        if input.rows() != expected_rows {
            return Err(Error::Validation(format!(
                "input matrix has {} rows, expected {expected_rows}",
                input.rows()
            )));
        }
        if output.rows() != vocab.len() || output.cols() != input.cols() {
            return Err(Error::Validation(format!(
                "output matrix is {}x{}, expected {}x{}",
                output.rows(),
                output.cols(),
                vocab.len(),
                input.cols()
            )));
        }
        if input.cols() == 0 {
            return Err(Error::Validation("dimension must be positive".into()));
        }
        let space = EmbeddingSpace {
            vocab,
            indexer,
            input,
            output,
        };
        if !space.is_finite() {
            return Err(Error::Validation("space contains non-finite values".into()));
        }
        Ok(space)
    }

    /// Input rows uniform in `[-1/dim, 1/dim]`, output rows zero.
    pub(crate) fn random<R: Rng>(vocab: Vocab, indexer: SubwordIndexer, dim: usize, rng: &mut R) -> Self {
        let rows = vocab.len() + indexer.bucket_count;
        let bound = 1.0 / dim as f32;
        let data = (0..rows * dim).map(|_| rng.random_range(-bound..=bound)).collect();
        EmbeddingSpace {
            output: Matrix::zeros(vocab.len(), dim),
            input: Matrix::from_vec(rows, dim, data),
            vocab,
            indexer,
        }
    }

    pub fn dim(&self) -> usize {
        self.input.cols()
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn indexer(&self) -> &SubwordIndexer {
        &self.indexer
    }

    pub fn input_vectors(&self) -> &Matrix<f32> {
        &self.input
    }

    pub fn output_vectors(&self) -> &Matrix<f32> {
        &self.output
    }

    pub fn is_finite(&self) -> bool {
        self.input.as_slice().iter().chain(self.output.as_slice()).all(|v| v.is_finite())
    }

    /// Input-row indices composing `word`: its own row when in vocabulary,
    /// then one bucket row per n-gram.
    pub fn units(&self, word: &str) -> Vec<usize> {
        let offset = self.vocab.len();
        self.vocab
            .index(word)
            .into_iter()
            .chain(self.indexer.buckets(word).into_iter().map(|b| offset + b))
            .collect()
    }

    /// Mean of the input rows of the word's units. Works for out-of-vocabulary
    /// words through their n-grams.
    pub fn word_vector(&self, word: &str) -> Result<Vec<f32>> {
        let units = self.units(word);
        if units.is_empty() {
            return Err(Error::Precondition(format!("no representable units for {word:?}")));
        }
        let dim = self.dim();
        let mut acc = vec![0f64; dim];
        for &u in &units {
            for (a, &v) in acc.iter_mut().zip(self.input.row(u)) {
                *a += v as f64;
            }
        }
        let n = units.len() as f64;
        Ok(acc.into_iter().map(|a| (a / n) as f32).collect())
    }

    pub fn output_vector(&self, word: &str) -> Option<&[f32]> {
        self.vocab.index(word).map(|i| self.output.row(i))
    }
}

/// Only vocabulary words count as present.
impl WordVectors for EmbeddingSpace {
    fn dim(&self) -> usize {
        EmbeddingSpace::dim(self)
    }

    fn vector(&self, word: &str) -> Option<Cow<'_, [f32]>> {
        if !self.vocab.contains(word) {
            return None;
        }
        self.word_vector(word).ok().map(Cow::Owned)
    }
}
