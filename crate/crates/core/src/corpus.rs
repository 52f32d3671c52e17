//! Tokenization, vocabulary, document-term weights, class costs and
//! stratified train/test splits.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::{Error, Result};

/// Binary document polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// `+1.0` or `-1.0`.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Option<Label> {
        match sign {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDocument {
    pub text: String,
    pub label: Label,
}

impl LabeledDocument {
    pub fn new(text: impl Into<String>, label: Label) -> Self {
        LabeledDocument {
            text: text.into(),
            label,
        }
    }
}

/// Lowercases `text` and splits it on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

/// Ordered set of distinct tokens. Positions follow first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn from_words(words: Vec<String>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut index = BTreeMap::new();
        for (j, w) in words.iter().enumerate() {
            if index.insert(w.clone(), j).is_some() {
                return Err(Error::DuplicateWord(w.clone()));
            }
        }
        Ok(Vocabulary { words, index })
    }

    /// Collects every distinct token of `token_docs` in first-occurrence order.
    pub fn from_token_docs<S: AsRef<str>>(token_docs: &[Vec<S>]) -> Result<Self> {
        let mut words = Vec::new();
        let mut index = BTreeMap::new();
        for doc in token_docs {
            for tok in doc {
                let tok = tok.as_ref();
                if !index.contains_key(tok) {
                    index.insert(String::from(tok), words.len());
                    words.push(String::from(tok));
                }
            }
        }
        if words.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(Vocabulary { words, index })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, j: usize) -> &str {
        &self.words[j]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Builds the vocabulary of every token of every document, with no cutoff.
pub fn build_vocabulary(corpus: &[LabeledDocument]) -> Result<Vocabulary> {
    let token_docs: Vec<Vec<String>> = corpus.iter().map(|d| tokenize(&d.text)).collect();
    Vocabulary::from_token_docs(&token_docs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Weighting {
    /// Raw term counts.
    #[default]
    Tf,
    /// `tf * ln(N / df)`.
    TfIdf,
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn from_dense(values: &[f64]) -> Self {
        let mut out = SparseVector {
            dim: values.len(),
            ..Default::default()
        };
        for (i, &v) in values.iter().enumerate() {
            if v != 0.0 {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        out
    }

    /// Builds from `(index, value)` pairs; duplicate indices are summed and
    /// explicit zeros dropped.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, v) in pairs {
            assert!(i < dim, "index {i} out of range for dimension {dim}");
            *acc.entry(i).or_insert(0.0) += v;
        }
        let mut out = SparseVector {
            dim,
            ..Default::default()
        };
        for (i, v) in acc {
            if v != 0.0 {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        out
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn get(&self, i: usize) -> f64 {
        match self.indices.binary_search(&i) {
            Ok(p) => self.values[p],
            Err(_) => 0.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector {
            dim: self.dim,
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// A fitted weighting scheme: maps a token list onto a weight vector over a
/// fixed vocabulary. Tokens outside the vocabulary are ignored.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TermWeighting {
    pub scheme: Weighting,
    /// `ln(N / df_j)` per vocabulary word; present only for [`Weighting::TfIdf`].
    pub idf: Option<Vec<f64>>,
}

impl TermWeighting {
    pub fn fit<S: AsRef<str>>(
        token_docs: &[Vec<S>],
        vocab: &Vocabulary,
        scheme: Weighting,
    ) -> Self {
        let idf = match scheme {
            Weighting::Tf => None,
            Weighting::TfIdf => {
                let mut df = vec![0usize; vocab.len()];
                let mut seen = vec![usize::MAX; vocab.len()];
                for (i, doc) in token_docs.iter().enumerate() {
                    for tok in doc {
                        if let Some(j) = vocab.get(tok.as_ref()) {
                            if seen[j] != i {
                                seen[j] = i;
                                df[j] += 1;
                            }
                        }
                    }
                }
                let n = token_docs.len() as f64;
                Some(
                    df.iter()
                        .map(|&d| if d == 0 { 0.0 } else { libm::log(n / d as f64) })
                        .collect(),
                )
            }
        };
        TermWeighting { scheme, idf }
    }

    pub fn weigh<S: AsRef<str>>(&self, tokens: &[S], vocab: &Vocabulary) -> SparseVector {
        let counts = SparseVector::from_pairs(
            vocab.len(),
            tokens
                .iter()
                .filter_map(|t| vocab.get(t.as_ref()))
                .map(|j| (j, 1.0)),
        );
        match &self.idf {
            None => counts,
            Some(idf) => {
                SparseVector::from_pairs(vocab.len(), counts.iter().map(|(j, tf)| (j, tf * idf[j])))
            }
        }
    }
}

/// The `V × N` document-term weight matrix, stored as sparse columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DocTermMatrix {
    n_words: usize,
    columns: Vec<SparseVector>,
    weighting: TermWeighting,
}

impl DocTermMatrix {
    /// Builds from pre-tokenized documents. Every column must have a nonzero
    /// entry.
    pub fn from_tokens<S: AsRef<str>>(
        token_docs: &[Vec<S>],
        vocab: &Vocabulary,
        scheme: Weighting,
    ) -> Result<Self> {
        let weighting = TermWeighting::fit(token_docs, vocab, scheme);
        let mut columns = Vec::with_capacity(token_docs.len());
        for (i, doc) in token_docs.iter().enumerate() {
            let col = weighting.weigh(doc, vocab);
            if col.nnz() == 0 {
                return Err(Error::EmptyDocument { index: i });
            }
            columns.push(col);
        }
        Ok(DocTermMatrix {
            n_words: vocab.len(),
            columns,
            weighting,
        })
    }

    /// Builds directly from weight columns (all of dimension `n_words`).
    pub fn from_columns(n_words: usize, columns: Vec<SparseVector>) -> Result<Self> {
        for (i, c) in columns.iter().enumerate() {
            if c.dim() != n_words {
                return Err(Error::DimensionMismatch {
                    what: "document weight vector length",
                    expected: n_words,
                    found: c.dim(),
                });
            }
            if c.nnz() == 0 {
                return Err(Error::EmptyDocument { index: i });
            }
            if c.iter().any(|(_, v)| v.is_nan() || v < 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "document {i} has a negative or NaN weight"
                )));
            }
        }
        Ok(DocTermMatrix {
            n_words,
            columns,
            weighting: TermWeighting {
                scheme: Weighting::Tf,
                idf: None,
            },
        })
    }

    #[inline]
    pub fn n_words(&self) -> usize {
        self.n_words
    }

    #[inline]
    pub fn n_docs(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &SparseVector {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[SparseVector] {
        &self.columns
    }

    pub fn weighting(&self) -> &TermWeighting {
        &self.weighting
    }

    pub fn get(&self, word: usize, doc: usize) -> f64 {
        self.columns[doc].get(word)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n_words, self.columns.len());
        for (i, c) in self.columns.iter().enumerate() {
            for (j, v) in c.iter() {
                m[(j, i)] = v;
            }
        }
        m
    }
}

/// Builds `Φ` for `corpus` over `vocab` (which must cover the corpus tokens
/// that should count).
pub fn build_term_matrix(
    corpus: &[LabeledDocument],
    vocab: &Vocabulary,
    weighting: Weighting,
) -> Result<DocTermMatrix> {
    let token_docs: Vec<Vec<String>> = corpus.iter().map(|d| tokenize(&d.text)).collect();
    DocTermMatrix::from_tokens(&token_docs, vocab, weighting)
}

/// Misclassification costs `C₊ = n₋/N`, `C₋ = n₊/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassCosts {
    pub c_plus: f64,
    pub c_minus: f64,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl ClassCosts {
    #[inline]
    pub fn for_label(&self, label: Label) -> f64 {
        match label {
            Label::Positive => self.c_plus,
            Label::Negative => self.c_minus,
        }
    }

    /// Costs with the two classes exchanged.
    pub fn swapped(&self) -> ClassCosts {
        ClassCosts {
            c_plus: self.c_minus,
            c_minus: self.c_plus,
            n_plus: self.n_minus,
            n_minus: self.n_plus,
        }
    }
}

pub fn class_costs(labels: &[Label]) -> Result<ClassCosts> {
    let n_plus = labels.iter().filter(|l| l.is_positive()).count();
    let n_minus = labels.len() - n_plus;
    if n_plus == 0 || n_minus == 0 {
        return Err(Error::SingleClass {
            n_pos: n_plus,
            n_neg: n_minus,
        });
    }
    let n = labels.len() as f64;
    Ok(ClassCosts {
        c_plus: n_minus as f64 / n,
        c_minus: n_plus as f64 / n,
        n_plus,
        n_minus,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitPair {
    /// Sorted document indices.
    pub train: Vec<usize>,
    /// Sorted document indices.
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitSet {
    pub pairs: Vec<SplitPair>,
    pub seed: u64,
    pub n_splits: usize,
}

/// `n_splits` independent stratified shuffles of the documents.
///
/// The test partition receives `round(test_fraction * N)` documents, of which
/// `round(n_test * n₊ / N)` are positive, so both partitions stay within one
/// document of the corpus class ratio.
pub fn stratified_splits(
    labels: &[Label],
    n_splits: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<SplitSet> {
    if n_splits == 0 {
        return Err(Error::InvalidSplit("n_splits must be at least 1".into()));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidSplit(format!(
            "test fraction {test_fraction} is outside (0, 1)"
        )));
    }
    let pos: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i].is_positive())
        .collect();
    let neg: Vec<usize> = (0..labels.len())
        .filter(|&i| !labels[i].is_positive())
        .collect();
    if pos.len() < 2 || neg.len() < 2 {
        return Err(Error::InvalidSplit(format!(
            "each class needs at least 2 documents (positive: {}, negative: {})",
            pos.len(),
            neg.len()
        )));
    }
    let n = labels.len();
    let n_test = libm::round(test_fraction * n as f64) as usize;
    let n_test_pos = libm::round(n_test as f64 * pos.len() as f64 / n as f64) as usize;
    let n_test_neg = n_test.saturating_sub(n_test_pos);
    for (name, k, total) in [
        ("positive", n_test_pos, pos.len()),
        ("negative", n_test_neg, neg.len()),
    ] {
        if k == 0 || k >= total {
            return Err(Error::InvalidSplit(format!(
                "test fraction {test_fraction} leaves an empty {name} partition"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(n_splits);
    for _ in 0..n_splits {
        let mut p = pos.clone();
        let mut q = neg.clone();
        p.shuffle(&mut rng);
        q.shuffle(&mut rng);
        let mut test: Vec<usize> = p[..n_test_pos]
            .iter()
            .chain(&q[..n_test_neg])
            .copied()
            .collect();
        let mut train: Vec<usize> = p[n_test_pos..]
            .iter()
            .chain(&q[n_test_neg..])
            .copied()
            .collect();
        test.sort_unstable();
        train.sort_unstable();
        pairs.push(SplitPair { train, test });
    }
    Ok(SplitSet {
        pairs,
        seed,
        n_splits,
    })
}

/// Everything training needs from a labeled corpus.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    pub vocab: Vocabulary,
    pub phi: DocTermMatrix,
    pub labels: Vec<Label>,
}

impl TrainingSet {
    pub fn from_documents(docs: &[LabeledDocument], weighting: Weighting) -> Result<Self> {
        let token_docs: Vec<Vec<String>> = docs.iter().map(|d| tokenize(&d.text)).collect();
        let vocab = Vocabulary::from_token_docs(&token_docs)?;
        let phi = DocTermMatrix::from_tokens(&token_docs, &vocab, weighting)?;
        Ok(TrainingSet {
            vocab,
            phi,
            labels: docs.iter().map(|d| d.label).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn docs(texts: &[&str]) -> Vec<LabeledDocument> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                LabeledDocument::new(
                    *t,
                    if i % 2 == 0 {
                        Label::Positive
                    } else {
                        Label::Negative
                    },
                )
            })
            .collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("I am HAPPY!"), ["i", "am", "happy"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("it's good-bad"), ["it", "s", "good", "bad"]);
        assert_eq!(tokenize("  \t..."), Vec::<String>::new());
    }

    #[test]
    fn vocabulary_examples() {
        let v = build_vocabulary(&docs(&["good day", "bad day"])).unwrap();
        assert_eq!(v.words(), ["good", "day", "bad"]);
        assert_eq!(v.get("bad"), Some(2));
        let v = build_vocabulary(&docs(&["a a a"])).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(
            build_vocabulary(&docs(&["", "!!"])),
            Err(Error::EmptyCorpus)
        );
        assert!(matches!(
            Vocabulary::from_words(vec!["x".into(), "x".into()]),
            Err(Error::DuplicateWord(_))
        ));
    }

    #[test]
    fn tf_column_counts() {
        let vocab = Vocabulary::from_words(vec!["good".into(), "bad".into()]).unwrap();
        let phi = build_term_matrix(&docs(&["good good bad"]), &vocab, Weighting::Tf).unwrap();
        assert_eq!(phi.column(0).to_dense(), vec![2.0, 1.0]);
    }

    #[test]
    fn tfidf_word_in_every_doc_is_zero() {
        let d = docs(&["the cat", "the dog", "the bird"]);
        let vocab = build_vocabulary(&d).unwrap();
        let phi = build_term_matrix(&d, &vocab, Weighting::TfIdf).unwrap();
        let the = vocab.get("the").unwrap();
        for i in 0..3 {
            assert_eq!(phi.get(the, i), 0.0);
        }
    }

    #[test]
    fn tfidf_spot_value_matches_hand_count() {
        // "good" appears twice in doc 0 and in 2 of 3 documents.
        let d = docs(&["good good plot", "good acting", "bad plot"]);
        let vocab = build_vocabulary(&d).unwrap();
        let phi = build_term_matrix(&d, &vocab, Weighting::TfIdf).unwrap();
        let texts: Vec<Vec<String>> = d.iter().map(|x| tokenize(&x.text)).collect();
        let count = |w: &str, i: usize| texts[i].iter().filter(|t| *t == w).count() as f64;
        let df = |w: &str| texts.iter().filter(|t| t.iter().any(|x| x == w)).count() as f64;
        let expected = count("good", 0) * (3.0f64 / df("good")).ln();
        assert!((phi.get(vocab.get("good").unwrap(), 0) - expected).abs() < 1e-15);
        assert!((expected - 2.0 * 1.5f64.ln()).abs() < 1e-15);
        let acting = count("acting", 1) * (3.0f64 / df("acting")).ln();
        assert!((phi.get(vocab.get("acting").unwrap(), 1) - acting).abs() < 1e-15);
    }

    #[test]
    fn empty_document_is_rejected_with_index() {
        let vocab = Vocabulary::from_words(vec!["good".into()]).unwrap();
        let err =
            build_term_matrix(&docs(&["good", "nothing here"]), &vocab, Weighting::Tf).unwrap_err();
        assert_eq!(err, Error::EmptyDocument { index: 1 });
    }

    #[test]
    fn class_cost_examples() {
        let mk = |p: usize, n: usize| {
            let mut v = vec![Label::Positive; p];
            v.extend(vec![Label::Negative; n]);
            class_costs(&v).unwrap()
        };
        let c = mk(10, 90);
        assert!((c.c_plus - 0.9).abs() < 1e-15 && (c.c_minus - 0.1).abs() < 1e-15);
        let c = mk(50, 50);
        assert_eq!(c.c_plus, 0.5);
        assert_eq!(c.c_minus, 0.5);
        let c = mk(1, 3);
        assert_eq!((c.c_plus, c.c_minus), (0.75, 0.25));
        assert!(matches!(
            class_costs(&[Label::Negative; 4]),
            Err(Error::SingleClass { n_pos: 0, n_neg: 4 })
        ));
    }

    fn labels(n_pos: usize, n_neg: usize) -> Vec<Label> {
        let mut v = vec![Label::Positive; n_pos];
        v.extend(vec![Label::Negative; n_neg]);
        v
    }

    #[test]
    fn split_examples() {
        let l = labels(10, 90);
        let s = stratified_splits(&l, 10, 0.2, 3).unwrap();
        assert_eq!(s.pairs.len(), 10);
        for p in &s.pairs {
            let pos = p.test.iter().filter(|&&i| l[i].is_positive()).count();
            assert_eq!((pos, p.test.len() - pos), (2, 18));
        }
        assert_eq!(s, stratified_splits(&l, 10, 0.2, 3).unwrap());

        let l = labels(2, 2);
        let s = stratified_splits(&l, 1, 0.5, 0).unwrap();
        let p = &s.pairs[0];
        assert_eq!(p.test.len(), 2);
        assert_eq!(p.test.iter().filter(|&&i| l[i].is_positive()).count(), 1);
        assert_eq!(p.train.iter().filter(|&&i| l[i].is_positive()).count(), 1);
    }

    #[test]
    fn split_errors() {
        assert!(stratified_splits(&labels(1, 9), 1, 0.5, 0).is_err());
        assert!(stratified_splits(&labels(5, 95), 1, 0.01, 0).is_err());
        assert!(stratified_splits(&labels(5, 5), 1, 1.0, 0).is_err());
        assert!(stratified_splits(&labels(5, 5), 0, 0.5, 0).is_err());
    }

    proptest! {
        #[test]
        fn tf_column_sum_equals_token_count(texts in proptest::collection::vec("[a-d ,.!']{1,30}", 1..6)) {
            let d: Vec<_> = texts.iter().map(|t| LabeledDocument::new(t.as_str(), Label::Positive)).collect();
            if let Ok(vocab) = build_vocabulary(&d) {
                let toks: Vec<Vec<String>> = d.iter().map(|x| tokenize(&x.text)).collect();
                match build_term_matrix(&d, &vocab, Weighting::Tf) {
                    Ok(phi) => for (i, t) in toks.iter().enumerate() {
                        prop_assert_eq!(phi.column(i).sum(), t.len() as f64);
                    },
                    Err(Error::EmptyDocument { index }) => prop_assert!(toks[index].is_empty()),
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }
        }

        #[test]
        fn tokenize_is_idempotent(text in "\\PC{0,40}") {
            let once = tokenize(&text);
            prop_assert_eq!(tokenize(&once.join(" ")), once);
        }

        #[test]
        fn class_cost_identity(p in 1usize..200, n in 1usize..200) {
            let c = class_costs(&labels(p, n)).unwrap();
            let lhs = c.c_plus * p as f64 + c.c_minus * n as f64;
            let rhs = 2.0 * p as f64 * n as f64 / (p + n) as f64;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }

        #[test]
        fn splits_are_stratified_partitions(p in 2usize..40, n in 2usize..120, frac in 0.05f64..0.95, seed: u64) {
            let l = labels(p, n);
            let Ok(s) = stratified_splits(&l, 3, frac, seed) else { return Ok(()); };
            let corpus_frac = p as f64 / (p + n) as f64;
            for pair in &s.pairs {
                let mut all: Vec<usize> = pair.train.iter().chain(&pair.test).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..p + n).collect::<Vec<_>>());
                for part in [&pair.train, &pair.test] {
                    let pf = part.iter().filter(|&&i| l[i].is_positive()).count() as f64 / part.len() as f64;
                    prop_assert!((pf - corpus_frac).abs() <= 1.0 / part.len() as f64 + 1e-12);
                }
            }
        }
    }
}
