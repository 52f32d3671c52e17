//! Seeded synthetic corpus with disjoint positive, negative and neutral
//! word sets.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Label, LabeledDocument};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthConfig {
    pub n_docs: usize,
    pub n_pos_words: usize,
    pub n_neg_words: usize,
    pub n_neutral_words: usize,
    pub positive_fraction: f64,
    /// Minimum share of a document's tokens drawn from its label's word set.
    pub polarity_threshold: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_docs: 400,
            n_pos_words: 15,
            n_neg_words: 15,
            n_neutral_words: 10,
            positive_fraction: 0.10,
            polarity_threshold: 0.70,
            min_len: 8,
            max_len: 20,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_docs == 0 {
            return bad(String::from("n_docs must be at least 1"));
        }
        if self.n_pos_words == 0 || self.n_neg_words == 0 || self.n_neutral_words == 0 {
            return bad(String::from("every word class needs at least one word"));
        }
        if !(self.polarity_threshold > 0.5 && self.polarity_threshold <= 1.0) {
            return bad(format!(
                "polarity threshold {} is outside (0.5, 1]",
                self.polarity_threshold
            ));
        }
        if !(0.0..=1.0).contains(&self.positive_fraction) {
            return bad(format!(
                "positive fraction {} is outside [0, 1]",
                self.positive_fraction
            ));
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return bad(format!(
                "document length range [{}, {}] is empty or starts at 0",
                self.min_len, self.max_len
            ));
        }
        Ok(())
    }

    pub fn vocabulary_size(&self) -> usize {
        self.n_pos_words + self.n_neg_words + self.n_neutral_words
    }

    pub fn n_positive_docs(&self) -> usize {
        libm::round(self.n_docs as f64 * self.positive_fraction) as usize
    }
}

fn word_names(prefix: &str, n: usize) -> Vec<String> {
    let width = format!("{n}").len().max(2);
    (1..=n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

/// Smallest token count `c ≤ len` with `c / len ≥ threshold` in floating point.
fn min_polar_count(len: usize, threshold: f64) -> usize {
    let mut c = libm::ceil(threshold * len as f64) as usize;
    while c < len && (c as f64) / (len as f64) < threshold {
        c += 1;
    }
    c.min(len)
}

/// Generates `n_docs` labeled documents. Each document takes at least
/// `polarity_threshold` of its tokens from its own label's word set and the
/// rest from the neutral words; words are named `posNN`, `negNN`, `neuNN`.
pub fn generate_synthetic(config: &SynthConfig) -> Result<Vec<LabeledDocument>> {
    config.validate()?;
    let pos = word_names("pos", config.n_pos_words);
    let neg = word_names("neg", config.n_neg_words);
    let neu = word_names("neu", config.n_neutral_words);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let n_pos = config.n_positive_docs();
    let mut labels: Vec<Label> = (0..config.n_docs)
        .map(|i| {
            if i < n_pos {
                Label::Positive
            } else {
                Label::Negative
            }
        })
        .collect();
    labels.shuffle(&mut rng);

    let mut docs = Vec::with_capacity(config.n_docs);
    let mut tokens: Vec<&str> = Vec::with_capacity(config.max_len);
    for label in labels {
        let len = rng.gen_range(config.min_len..=config.max_len);
        let share = rng.gen_range(config.polarity_threshold..=1.0);
        let n_polar = (libm::ceil(share * len as f64) as usize)
            .max(min_polar_count(len, config.polarity_threshold))
            .min(len);
        let polar = if label.is_positive() { &pos } else { &neg };
        tokens.clear();
        for _ in 0..n_polar {
            tokens.push(&polar[rng.gen_range(0..polar.len())]);
        }
        for _ in n_polar..len {
            tokens.push(&neu[rng.gen_range(0..neu.len())]);
        }
        tokens.shuffle(&mut rng);
        docs.push(LabeledDocument::new(tokens.join(" "), label));
    }
    Ok(docs)
}
