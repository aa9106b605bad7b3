//! A generated two-period corpus with planted meaning changes.
//!
//! Words are random letter strings grouped into topics. Every target word
//! appears among the context words of one topic. Stable targets keep their
//! topic in both periods; changed targets move to a different topic in the
//! second period. A detector that works should give changed words lower
//! cross-period similarity.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ChangeLabel, ChangeLabelSet, Charter, PeriodSlice, PeriodSpec};

#[derive(Clone, Debug)]
pub struct PlantedConfig {
    pub sentences_per_period: usize,
    pub changed_words: usize,
    pub stable_words: usize,
    pub topics: usize,
    pub words_per_topic: usize,
    /// Context words per sentence, besides the target.
    pub context_len: usize,
    /// Sentences per generated charter.
    pub sentences_per_charter: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            sentences_per_period: 1200,
            changed_words: 10,
            stable_words: 50,
            topics: 6,
            words_per_topic: 20,
            context_len: 8,
            sentences_per_charter: 4,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlantedCorpus {
    pub specs: Vec<PeriodSpec>,
    pub slices: Vec<PeriodSlice>,
    pub labels: ChangeLabelSet,
    /// Topic of each target in each period, in period order.
    pub topics: BTreeMap<String, [usize; 2]>,
}

fn random_word(rng: &mut ChaCha8Rng, taken: &mut BTreeSet<String>) -> String {
    loop {
        let len = rng.random_range(5..=8);
        let w: String = (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect();
        if taken.insert(w.clone()) {
            return w;
        }
    }
}

/// Periods `EARLY` (1000-1099) and `LATE` (1100-1199).
pub fn planted_specs() -> Vec<PeriodSpec> {
    vec![PeriodSpec::new("EARLY", 1000, 1099), PeriodSpec::new("LATE", 1100, 1199)]
}

pub fn planted_corpus(config: &PlantedConfig) -> PlantedCorpus {
    assert!(config.topics >= 2 && config.words_per_topic > 0 && config.sentences_per_period > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut taken = BTreeSet::new();
    let topic_words: Vec<Vec<String>> = (0..config.topics)
        .map(|_| (0..config.words_per_topic).map(|_| random_word(&mut rng, &mut taken)).collect())
        .collect();

    let mut labels = BTreeMap::new();
    let mut topics = BTreeMap::new();
    let total = config.changed_words + config.stable_words;
    for i in 0..total {
        let word = random_word(&mut rng, &mut taken);
        let first = i % config.topics;
        let (label, second) = if i < config.changed_words {
            (ChangeLabel::Changed, (first + config.topics / 2) % config.topics)
        } else {
            (ChangeLabel::Unchanged, first)
        };
        labels.insert(word.clone(), label);
        topics.insert(word, [first, second]);
    }
    let targets: Vec<&String> = topics.keys().collect();

    let specs = planted_specs();
    let slices = specs
        .iter()
        .enumerate()
        .map(|(p, spec)| {
            let sentences: Vec<Vec<String>> = (0..config.sentences_per_period)
                .map(|s| {
                    // cycle through targets so every one gets an equal share
                    let target = targets[s % targets.len()];
                    let pool = &topic_words[topics[target][p]];
                    let mut sentence: Vec<String> =
                        (0..config.context_len).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
                    let at = rng.random_range(0..=sentence.len());
                    sentence.insert(at, target.clone());
                    sentence
                })
                .collect();
            let charters = sentences.len().div_ceil(config.sentences_per_charter);
            PeriodSlice::new(spec.clone(), sentences, charters)
        })
        .collect();

    PlantedCorpus {
        specs,
        slices,
        labels: ChangeLabelSet { labels },
        topics,
    }
}

impl PlantedCorpus {
    /// The corpus as dated charters, each holding a few sentences.
    pub fn charters(&self, sentences_per_charter: usize) -> Vec<Charter> {
        let mut out = Vec::new();
        for slice in &self.slices {
            let span = (slice.period.end_year - slice.period.start_year + 1) as usize;
            for (i, chunk) in slice.sentences.chunks(sentences_per_charter.max(1)).enumerate() {
                let text = chunk.iter().map(|s| s.join(" ")).collect::<Vec<_>>().join(". ") + ".";
                out.push(Charter {
                    id: format!("{}-{i:05}", slice.name().to_lowercase()),
                    year: slice.period.start_year + (i % span) as i64,
                    text,
                });
            }
        }
        out
    }

    /// Label file contents with a `word,label` header.
    pub fn labels_csv(&self) -> String {
        let mut s = String::from("word,label\n");
        for (w, l) in &self.labels.labels {
            s.push_str(&format!("{w},{}\n", *l as u8));
        }
        s
    }

    pub fn targets(&self) -> BTreeSet<String> {
        self.labels.labels.keys().cloned().collect()
    }
}
