//! Skip-gram training with negative sampling.
//!
//! For a target word `t` with context `c`, the hidden vector `h` is the mean
//! of the input rows of `t`'s units (whole word plus n-gram buckets). The pair
//! loss is
//!
//! ```text
//! L = -log σ(u_c · h) - Σ_n log σ(-u_n · h)
//! ```
//!
//! over `negatives` words drawn from the smoothed unigram distribution. Each
//! step moves the output rows along their gradient and adds the hidden-vector
//! step to every contributing input row, as fastText does.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{build_vocab, EmbeddingSpace, TrainConfig, VectorTable, Vocab};
use crate::corpus::PeriodSlice;
use crate::{Error, Result};

/// Starting point for a training run.
#[derive(Clone, Copy, Debug)]
pub enum Init<'a> {
    /// Copy shared word rows, their output rows, and all bucket rows.
    Space(&'a EmbeddingSpace),
    /// Copy whole-word rows only; buckets stay random.
    Vectors(&'a VectorTable),
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TrainReport {
    /// Mean pair loss per epoch.
    pub epoch_losses: Vec<f64>,
    /// In-vocabulary tokens seen per epoch.
    pub tokens: usize,
    pub vocab_size: usize,
    /// Vocabulary words whose rows came from the init.
    pub copied_words: usize,
}

/// Analytic gradient of the pair loss.
#[derive(Clone, Debug, PartialEq)]
pub struct PairGradient {
    pub loss: f64,
    /// dL/dh
    pub hidden: Vec<f64>,
    /// dL/du_c
    pub positive: Vec<f64>,
    /// dL/du_n, one per negative
    pub negatives: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// log(1 + e^x) without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `-log σ(u_c·h) - Σ log σ(-u_n·h)`.
pub fn pair_loss(hidden: &[f64], positive: &[f64], negatives: &[&[f64]]) -> f64 {
    softplus(-dot(positive, hidden)) + negatives.iter().map(|n| softplus(dot(n, hidden))).sum::<f64>()
}

pub fn pair_gradient(hidden: &[f64], positive: &[f64], negatives: &[&[f64]]) -> PairGradient {
    let mut d_hidden = vec![0.0; hidden.len()];
    // dL/ds = σ(s) - label for score s = u·h
    let pos_coeff = sigmoid(dot(positive, hidden)) - 1.0;
    for (d, u) in d_hidden.iter_mut().zip(positive) {
        *d += pos_coeff * u;
    }
    let positive_grad = hidden.iter().map(|h| pos_coeff * h).collect();
    let negative_grads = negatives
        .iter()
        .map(|n| {
            let coeff = sigmoid(dot(n, hidden));
            for (d, u) in d_hidden.iter_mut().zip(n.iter()) {
                *d += coeff * u;
            }
            hidden.iter().map(|h| coeff * h).collect()
        })
        .collect();
    PairGradient {
        loss: pair_loss(hidden, positive, negatives),
        hidden: d_hidden,
        positive: positive_grad,
        negatives: negative_grads,
    }
}

/// Raw view of a row-major matrix shared between training workers.
///
/// With one worker this is an ordinary exclusive borrow. With several, rows
/// are read and written without synchronization (Hogwild); torn updates only
/// perturb the stochastic gradient.
#[derive(Clone, Copy)]
struct SharedRows {
    ptr: *mut f32,
    rows: usize,
    cols: usize,
}

unsafe impl Send for SharedRows {}
unsafe impl Sync for SharedRows {}

impl SharedRows {
    fn new(data: &mut [f32], cols: usize) -> Self {
        SharedRows {
            ptr: data.as_mut_ptr(),
            rows: data.len() / cols,
            cols,
        }
    }

    /// # Safety
    /// The backing matrix must outlive the returned slice, and the slice must
    /// not be held across another `row` call for the same index in the same
    /// thread.
    #[allow(clippy::mut_from_ref)]
    unsafe fn row(&self, i: usize) -> &mut [f32] {
        debug_assert!(i < self.rows);
        std::slice::from_raw_parts_mut(self.ptr.add(i * self.cols), self.cols)
    }
}

struct Corpus {
    sentences: Vec<Vec<u32>>,
    /// Input-row indices per vocabulary word.
    units: Vec<Vec<u32>>,
    tokens: usize,
}

struct Worker<'a> {
    input: SharedRows,
    output: SharedRows,
    corpus: &'a Corpus,
    negatives: &'a WeightedIndex<f64>,
    config: &'a TrainConfig,
    rng: ChaCha8Rng,
    hidden: Vec<f32>,
    grad: Vec<f32>,
}

impl Worker<'_> {
    /// Predicts `target` (label true) or a negative (label false) from the
    /// current hidden vector, updates the output row and accumulates the
    /// hidden step in `self.grad`. Returns the loss term.
    fn update_output(&mut self, target: usize, label: bool, lr: f32) -> f64 {
        let out = unsafe { self.output.row(target) };
        let score: f32 = out.iter().zip(&self.hidden).map(|(a, b)| a * b).sum();
        let score = score as f64;
        let (loss, residual) = if label {
            (softplus(-score), 1.0 - sigmoid(score))
        } else {
            (softplus(score), -sigmoid(score))
        };
        let g = lr * residual as f32;
        for ((acc, o), h) in self.grad.iter_mut().zip(out.iter_mut()).zip(&self.hidden) {
            *acc += g * *o;
            *o += g * h;
        }
        loss
    }

    /// One (target, context) step; returns the pair loss.
    fn train_pair(&mut self, target: u32, context: u32, lr: f32) -> f64 {
        let units = &self.corpus.units[target as usize];
        let scale = 1.0 / units.len() as f32;
        self.hidden.iter_mut().for_each(|h| *h = 0.0);
        for &u in units {
            let row = unsafe { self.input.row(u as usize) };
            for (h, v) in self.hidden.iter_mut().zip(row.iter()) {
                *h += v;
            }
        }
        self.hidden.iter_mut().for_each(|h| *h *= scale);
        self.grad.iter_mut().for_each(|g| *g = 0.0);

        let mut loss = self.update_output(context as usize, true, lr);
        for _ in 0..self.config.negatives {
            let negative = loop {
                let n = self.negatives.sample(&mut self.rng);
                if n != context as usize {
                    break n;
                }
            };
            loss += self.update_output(negative, false, lr);
        }

        for &u in units {
            let row = unsafe { self.input.row(u as usize) };
            for (v, g) in row.iter_mut().zip(&self.grad) {
                *v += g;
            }
        }
        loss
    }

    /// Trains over `sentences` for all epochs. Returns (loss sum, pair count)
    /// per epoch.
    fn run(&mut self, sentences: &[Vec<u32>], processed: &AtomicU64, total_steps: u64) -> Vec<(f64, u64)> {
        let window = self.config.window;
        let mut per_epoch = Vec::with_capacity(self.config.epochs);
        for _ in 0..self.config.epochs {
            let (mut loss, mut pairs) = (0.0, 0u64);
            for sentence in sentences {
                for (pos, &target) in sentence.iter().enumerate() {
                    let done = processed.fetch_add(1, Ordering::Relaxed);
                    let progress = (done as f64 / total_steps as f64).min(1.0);
                    let lr = self.config.initial_lr * (1.0 - progress) as f32;
                    let span = self.rng.random_range(1..=window);
                    let lo = pos.saturating_sub(span);
                    let hi = (pos + span).min(sentence.len() - 1);
                    for ctx in lo..=hi {
                        if ctx != pos {
                            loss += self.train_pair(target, sentence[ctx], lr);
                            pairs += 1;
                        }
                    }
                }
            }
            per_epoch.push((loss, pairs));
        }
        per_epoch
    }
}

/// Trains one period space. See [`sgns_train_report`].
pub fn sgns_train(slice: &PeriodSlice, config: &TrainConfig, init: Option<Init<'_>>) -> Result<EmbeddingSpace> {
    sgns_train_report(slice, config, init).map(|(space, _)| space)
}

/// Trains one period space and reports per-epoch losses.
///
/// The vocabulary comes from `slice`. With an init, shared words start from
/// the init's rows; new words start random. `config.epochs == 0` is accepted
/// only together with an init and returns the initialized space unchanged.
pub fn sgns_train_report(
    slice: &PeriodSlice,
    config: &TrainConfig,
    init: Option<Init<'_>>,
) -> Result<(EmbeddingSpace, TrainReport)> {
    config.validate()?;
    if slice.is_empty() {
        return Err(Error::Precondition(format!("period {} has no tokens", slice.name())));
    }
    if config.epochs == 0 && init.is_none() {
        return Err(Error::Validation(
            "train config: epochs must be positive when training from scratch".into(),
        ));
    }
    let vocab = build_vocab(slice, config.min_count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mut space, copied_words) = initial_space(vocab, config, init, &mut rng)?;

    let corpus = prepare_corpus(slice, &space);
    let mut report = TrainReport {
        epoch_losses: Vec::with_capacity(config.epochs),
        tokens: corpus.tokens,
        vocab_size: space.vocab.len(),
        copied_words,
    };
    if config.epochs == 0 || corpus.tokens == 0 {
        return Ok((space, report));
    }

    let negatives = WeightedIndex::new(space.vocab.sampling_distribution())
        .map_err(|e| Error::Validation(format!("negative sampling table: {e}")))?;
    let dim = config.dim;
    let input = SharedRows::new(space.input.as_mut_slice(), dim);
    let output = SharedRows::new(space.output.as_mut_slice(), dim);
    let processed = AtomicU64::new(0);
    let total_steps = (corpus.tokens * config.epochs) as u64;

    let make_worker = |seed: u64| Worker {
        input,
        output,
        corpus: &corpus,
        negatives: &negatives,
        config,
        rng: ChaCha8Rng::seed_from_u64(seed),
        hidden: vec![0.0; dim],
        grad: vec![0.0; dim],
    };

    let threads = config.threads.min(corpus.sentences.len()).max(1);
    let per_epoch = if threads == 1 {
        make_worker(rng.random()).run(&corpus.sentences, &processed, total_steps)
    } else {
        let chunk = corpus.sentences.len().div_ceil(threads);
        let seeds: Vec<u64> = (0..threads).map(|_| rng.random()).collect();
        let results: Vec<Vec<(f64, u64)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = corpus
                .sentences
                .chunks(chunk)
                .zip(&seeds)
                .map(|(shard, &seed)| {
                    let mut worker = make_worker(seed);
                    let processed = &processed;
                    scope.spawn(move || worker.run(shard, processed, total_steps))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
        });
        (0..config.epochs)
            .map(|e| {
                results
                    .iter()
                    .fold((0.0, 0), |(l, p), r| (l + r[e].0, p + r[e].1))
            })
            .collect()
    };
    report.epoch_losses = per_epoch
        .into_iter()
        .map(|(loss, pairs)| if pairs == 0 { 0.0 } else { loss / pairs as f64 })
        .collect();

    if !space.is_finite() {
        return Err(Error::Validation("training diverged to non-finite values".into()));
    }
    Ok((space, report))
}

fn initial_space(
    vocab: Vocab,
    config: &TrainConfig,
    init: Option<Init<'_>>,
    rng: &mut ChaCha8Rng,
) -> Result<(EmbeddingSpace, usize)> {
    let indexer = super::SubwordIndexer::new(config.ngram_min, config.ngram_max, config.bucket_count);
    let mut space = EmbeddingSpace::random(vocab, indexer, config.dim, rng);
    let mut copied = 0;
    match init {
        None => {}
        Some(Init::Space(prev)) => {
            if prev.dim() != config.dim {
                return Err(Error::DimMismatch {
                    expected: config.dim,
                    found: prev.dim(),
                });
            }
            if prev.indexer != space.indexer {
                return Err(Error::Validation(format!(
                    "init space uses subword settings {:?}, config asks for {:?}",
                    prev.indexer, space.indexer
                )));
            }
            let (new_off, old_off) = (space.vocab.len(), prev.vocab.len());
            for b in 0..config.bucket_count {
                space.input.row_mut(new_off + b).copy_from_slice(prev.input.row(old_off + b));
            }
            for i in 0..space.vocab.len() {
                if let Some(j) = prev.vocab.index(space.vocab.word(i)) {
                    space.input.row_mut(i).copy_from_slice(prev.input.row(j));
                    space.output.row_mut(i).copy_from_slice(prev.output.row(j));
                    copied += 1;
                }
            }
        }
        Some(Init::Vectors(table)) => {
            if table.dim() != config.dim {
                return Err(Error::DimMismatch {
                    expected: config.dim,
                    found: table.dim(),
                });
            }
            for i in 0..space.vocab.len() {
                if let Some(v) = table.get(space.vocab.word(i)) {
                    space.input.row_mut(i).copy_from_slice(v);
                    copied += 1;
                }
            }
        }
    }
    Ok((space, copied))
}

fn prepare_corpus(slice: &PeriodSlice, space: &EmbeddingSpace) -> Corpus {
    let units = space
        .vocab
        .words()
        .iter()
        .map(|w| space.units(w).into_iter().map(|u| u as u32).collect())
        .collect();
    let sentences: Vec<Vec<u32>> = slice
        .sentences
        .iter()
        .map(|s| {
            s.iter()
                .filter_map(|t| space.vocab.index(t).map(|i| i as u32))
                .collect::<Vec<_>>()
        })
        .filter(|s: &Vec<u32>| s.len() > 1)
        .collect();
    let tokens = sentences.iter().map(Vec::len).sum();
    Corpus {
        sentences,
        units,
        tokens,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PeriodSpec;
    use crate::Matrix;

    fn slice(sentences: &[&str]) -> PeriodSlice {
        PeriodSlice::new(
            PeriodSpec::new("P", 1, 2),
            sentences
                .iter()
                .map(|s| s.split_whitespace().map(str::to_string).collect())
                .collect(),
            1,
        )
    }

    fn small_config() -> TrainConfig {
        TrainConfig {
            dim: 8,
            epochs: 3,
            min_count: 1,
            bucket_count: 50,
            seed: 7,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v = |n: usize| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
        let (h, p, n1, n2) = (v(6), v(6), v(6), v(6));
        let negs = [n1.as_slice(), n2.as_slice()];
        let g = pair_gradient(&h, &p, &negs);
        let eps = 1e-5;
        for i in 0..6 {
            let (mut hp, mut hm) = (h.clone(), h.clone());
            hp[i] += eps;
            hm[i] -= eps;
            let fd = (pair_loss(&hp, &p, &negs) - pair_loss(&hm, &p, &negs)) / (2.0 * eps);
            assert!((fd - g.hidden[i]).abs() < 1e-8);
        }
    }

    /// A single step must equal a plain gradient step on (h, u_c, u_n) when
    /// the target has one unit and the negative differs from the context.
    #[test]
    fn step_follows_the_gradient() {
        let vocab = Vocab::from_counts([("a", 5), ("b", 5)], 1).unwrap();
        let indexer = super::super::SubwordIndexer::new(9, 9, 1);
        let input = Matrix::from_vec(3, 2, vec![0.3, -0.2, 0.1, 0.4, 0.0, 0.0]);
        let output = Matrix::from_vec(2, 2, vec![0.5, 0.25, -0.1, 0.2]);
        let mut space = EmbeddingSpace::from_parts(vocab, indexer, input, output).unwrap();
        let before = space.clone();
        let corpus = Corpus {
            sentences: vec![],
            units: vec![vec![0], vec![1]],
            tokens: 0,
        };
        // with two words, the only valid negative for context "a" is "b"
        let a = space.vocab.index("a").unwrap();
        let b = space.vocab.index("b").unwrap();
        let negatives = WeightedIndex::new([0.5, 0.5]).unwrap();
        let config = TrainConfig {
            negatives: 1,
            dim: 2,
            ..TrainConfig::default()
        };
        let lr = 0.1f32;
        let mut worker = Worker {
            input: SharedRows::new(space.input.as_mut_slice(), 2),
            output: SharedRows::new(space.output.as_mut_slice(), 2),
            corpus: &corpus,
            negatives: &negatives,
            config: &config,
            rng: ChaCha8Rng::seed_from_u64(0),
            hidden: vec![0.0; 2],
            grad: vec![0.0; 2],
        };
        let loss = worker.train_pair(b as u32, a as u32, lr);

        let f = |s: &[f32]| s.iter().map(|&x| x as f64).collect::<Vec<_>>();
        let h = f(before.input.row(b));
        let g = pair_gradient(&h, &f(before.output.row(a)), &[&f(before.output.row(b))]);
        assert!((loss - g.loss).abs() < 1e-6);
        for d in 0..2 {
            let want_h = h[d] - lr as f64 * g.hidden[d];
            let want_pos = before.output.row(a)[d] as f64 - lr as f64 * g.positive[d];
            let want_neg = before.output.row(b)[d] as f64 - lr as f64 * g.negatives[0][d];
            assert!((space.input.row(b)[d] as f64 - want_h).abs() < 1e-6);
            assert!((space.output.row(a)[d] as f64 - want_pos).abs() < 1e-6);
            assert!((space.output.row(b)[d] as f64 - want_neg).abs() < 1e-6);
        }
    }

    #[test]
    fn deterministic_single_thread() {
        let s = slice(&["ego rex dedi", "rex dedi terram", "ego dedi"]);
        let config = TrainConfig { epochs: 1, ..small_config() };
        let a = sgns_train(&s, &config, None).unwrap();
        let b = sgns_train(&s, &config, None).unwrap();
        let bits = |m: &Matrix<f32>| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.input), bits(&b.input));
        assert_eq!(bits(&a.output), bits(&b.output));
        let c = sgns_train(&s, &TrainConfig { seed: 8, ..config }, None).unwrap();
        assert_ne!(bits(&a.input), bits(&c.input));
    }

    #[test]
    fn two_word_corpus() {
        let s = slice(&["alpha beta"]);
        let config = TrainConfig { epochs: 1, ..small_config() };
        let a = sgns_train(&s, &config, None).unwrap();
        let b = sgns_train(&s, &config, None).unwrap();
        assert_eq!(a, b);
        assert!(a.is_finite());
    }

    #[test]
    fn zero_epochs_keeps_init() {
        let s = slice(&["ego rex dedi", "rex dedi terram"]);
        let base = sgns_train(&s, &small_config(), None).unwrap();
        let other = slice(&["rex dedi novum", "novum dedi"]);
        let cont = sgns_train(&other, &TrainConfig { epochs: 0, ..small_config() }, Some(Init::Space(&base))).unwrap();
        for w in ["rex", "dedi"] {
            assert_eq!(cont.output_vector(w), base.output_vector(w));
            assert_eq!(cont.word_vector(w).unwrap(), base.word_vector(w).unwrap());
        }
        // new word: random word row in [-1/dim, 1/dim], zero output
        let i = cont.vocab.index("novum").unwrap();
        assert!(cont.input.row(i).iter().all(|v| v.abs() <= 1.0 / 8.0));
        assert!(cont.output.row(i).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn error_paths() {
        let s = slice(&["ego rex dedi"]);
        let base = sgns_train(&s, &small_config(), None).unwrap();
        let wide = TrainConfig { dim: 9, ..small_config() };
        assert!(matches!(
            sgns_train(&s, &wide, Some(Init::Space(&base))),
            Err(Error::DimMismatch { expected: 9, found: 8 })
        ));
        assert!(sgns_train(&slice(&[]), &small_config(), None).is_err());
        assert!(sgns_train(&s, &TrainConfig { epochs: 0, ..small_config() }, None).is_err());
        let other_buckets = TrainConfig { bucket_count: 51, ..small_config() };
        assert!(sgns_train(&s, &other_buckets, Some(Init::Space(&base))).is_err());
    }

    #[test]
    fn loss_decreases() {
        let sentences: Vec<String> = (0..60)
            .map(|i| match i % 3 {
                0 => "ego rex dedi terram sancto petro",
                1 => "hanc terram dedi ecclesiae sancti petri",
                _ => "testes sunt comes et episcopus",
            })
            .map(String::from)
            .collect();
        let refs: Vec<&str> = sentences.iter().map(String::as_str).collect();
        let config = TrainConfig { epochs: 20, dim: 16, ..small_config() };
        let (_, report) = sgns_train_report(&slice(&refs), &config, None).unwrap();
        let ma: Vec<f64> = report.epoch_losses.windows(5).map(|w| w.iter().sum::<f64>() / 5.0).collect();
        for pair in ma.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-3, "{:?}", report.epoch_losses);
        }
        assert!(report.epoch_losses.last().unwrap() < &report.epoch_losses[0]);
    }

    #[test]
    fn hogwild_runs() {
        let sentences: Vec<&str> = std::iter::repeat_n("ego rex dedi terram sancto petro", 40).collect();
        let config = TrainConfig { threads: 4, ..small_config() };
        let (space, report) = sgns_train_report(&slice(&sentences), &config, None).unwrap();
        assert!(space.is_finite());
        assert_eq!(report.epoch_losses.len(), 3);
    }
}
