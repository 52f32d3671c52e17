//! Word-vector text format: a `V k` line, then `word v1 … vk` per line.
//! Leading `#` lines are comments.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use polarembed_core::{embeddings_from_lookup, EmbeddingMatrix, Vocabulary};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingFormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("expected {expected} vectors, found {found}")]
    Count { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Vectors read from an embedding file, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    k: usize,
    words: Vec<String>,
    data: Vec<f64>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.data[i * self.k..(i + 1) * self.k])
    }
}

pub fn read_embeddings(r: impl BufRead) -> Result<EmbeddingTable, EmbeddingFormatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut table = EmbeddingTable {
        k: 0,
        words: Vec::new(),
        data: Vec::new(),
        index: HashMap::new(),
    };
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let no = i + 1;
        let err = |message: String| EmbeddingFormatError::Line { line: no, message };
        if line.trim().is_empty() || (header.is_none() && line.starts_with('#')) {
            continue;
        }
        let mut fields = line.split_whitespace();
        let Some((v, k)) = header else {
            let mut num = |what: &str| {
                fields
                    .next()
                    .and_then(|f| f.parse::<usize>().ok())
                    .ok_or_else(|| err(format!("header must be `V k`, missing {what}")))
            };
            let (v, k) = (num("V")?, num("k")?);
            if k == 0 || fields.next().is_some() {
                return Err(err("header must be `V k` with k ≥ 1".into()));
            }
            header = Some((v, k));
            table.k = k;
            continue;
        };
        let word = fields.next().unwrap_or_default().to_string();
        let start = table.data.len();
        for f in fields {
            let x: f64 = f.parse().map_err(|_| err(format!("bad number {f:?}")))?;
            if !x.is_finite() {
                return Err(err(format!("non-finite value {f:?}")));
            }
            table.data.push(x);
        }
        let got = table.data.len() - start;
        if got != k {
            return Err(err(format!("{word:?} has {got} values, expected {k}")));
        }
        if table
            .index
            .insert(word.clone(), table.words.len())
            .is_some()
        {
            return Err(err(format!("duplicate word {word:?}")));
        }
        table.words.push(word);
        if table.words.len() > v {
            return Err(EmbeddingFormatError::Count {
                expected: v,
                found: table.words.len(),
            });
        }
    }
    let Some((v, _)) = header else {
        return Err(EmbeddingFormatError::Line {
            line: 1,
            message: "missing `V k` header".into(),
        });
    };
    if table.words.len() != v {
        return Err(EmbeddingFormatError::Count {
            expected: v,
            found: table.words.len(),
        });
    }
    Ok(table)
}

/// Writes one line per vocabulary word, in vocabulary order.
pub fn write_embeddings(
    mut w: impl Write,
    header: &str,
    vocab: &Vocabulary,
    emb: &EmbeddingMatrix,
) -> std::io::Result<()> {
    w.write_all(header.as_bytes())?;
    writeln!(w, "{} {}", emb.n_words(), emb.k())?;
    for (j, word) in vocab.words().iter().enumerate() {
        w.write_all(word.as_bytes())?;
        for x in emb.column(j) {
            write!(w, " {x}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `W₀` over `vocab` from a table: known words get their normalized vectors,
/// the rest seeded random unit vectors. Returns the number of missing words.
pub fn import_embeddings(
    vocab: &Vocabulary,
    table: &EmbeddingTable,
    seed: u64,
) -> polarembed_core::Result<(EmbeddingMatrix, usize)> {
    embeddings_from_lookup(vocab, table.k(), seed, |w| table.get(w))
}
