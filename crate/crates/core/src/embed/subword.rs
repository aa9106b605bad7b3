use serde::{Deserialize, Serialize};

/// 32-bit FNV-1a over raw bytes.
pub fn fnv1a_32(bytes: &[u8]) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for &b in bytes {
        h ^= b as u32;
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}

/// 64-bit FNV-1a over raw bytes. Used for file digests.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Maps the character n-grams of `<word>` to hash buckets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubwordIndexer {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub bucket_count: usize,
}

impl SubwordIndexer {
    pub fn new(ngram_min: usize, ngram_max: usize, bucket_count: usize) -> Self {
        assert!(ngram_min >= 1 && ngram_min <= ngram_max && bucket_count >= 1);
        SubwordIndexer {
            ngram_min,
            ngram_max,
            bucket_count,
        }
    }

    /// All character n-grams of the boundary-wrapped word, shortest first,
    /// left to right. Repeated n-grams are kept.
    pub fn ngrams(&self, word: &str) -> Vec<String> {
        let wrapped: Vec<char> = format!("<{word}>").chars().collect();
        let mut out = Vec::new();
        for n in self.ngram_min..=self.ngram_max.min(wrapped.len()) {
            for window in wrapped.windows(n) {
                out.push(window.iter().collect());
            }
        }
        out
    }

    pub fn bucket(&self, ngram: &str) -> usize {
        fnv1a_32(ngram.as_bytes()) as usize % self.bucket_count
    }

    /// Bucket indices in `[0, bucket_count)`, one per n-gram.
    pub fn buckets(&self, word: &str) -> Vec<usize> {
        self.ngrams(word).iter().map(|g| self.bucket(g)).collect()
    }
}
