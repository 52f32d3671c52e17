//! Corpus TSV: one `label<TAB>text` document per line, `#` comment lines.

use std::io::{BufRead, Write};

use polarembed_core::{Label, LabeledDocument};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusFormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("corpus contains no documents")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How label strings map onto the two classes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelMap {
    /// `1`/`+1` positive, `0`/`-1` negative.
    #[default]
    Auto,
    Explicit {
        positive: String,
        negative: String,
    },
}

impl LabelMap {
    /// Parses `POS,NEG`.
    pub fn parse(spec: &str) -> Result<Self, String> {
        match spec.split_once(',') {
            Some((p, n)) if !p.is_empty() && !n.is_empty() && p != n => Ok(LabelMap::Explicit {
                positive: p.to_string(),
                negative: n.to_string(),
            }),
            _ => Err(format!(
                "label map {spec:?} must be two distinct labels, POS,NEG"
            )),
        }
    }

    pub fn label(&self, s: &str) -> Option<Label> {
        match self {
            LabelMap::Auto => match s {
                "1" | "+1" => Some(Label::Positive),
                "0" | "-1" => Some(Label::Negative),
                _ => None,
            },
            LabelMap::Explicit { positive, negative } => {
                if s == positive {
                    Some(Label::Positive)
                } else if s == negative {
                    Some(Label::Negative)
                } else {
                    None
                }
            }
        }
    }

    pub fn render(&self, label: Label) -> &str {
        match (self, label) {
            (LabelMap::Auto, Label::Positive) => "1",
            (LabelMap::Auto, Label::Negative) => "-1",
            (LabelMap::Explicit { positive, .. }, Label::Positive) => positive,
            (LabelMap::Explicit { negative, .. }, Label::Negative) => negative,
        }
    }
}

fn is_skippable(line: &str) -> bool {
    line.starts_with('#') || line.trim().is_empty()
}

/// Reads a labeled corpus. Documents whose text is blank are rejected.
pub fn read_corpus(
    r: impl BufRead,
    map: &LabelMap,
) -> Result<Vec<LabeledDocument>, CorpusFormatError> {
    let mut docs = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        let no = i + 1;
        if is_skippable(line) {
            continue;
        }
        let err = |message: String| CorpusFormatError::Line { line: no, message };
        let (label, text) = line
            .split_once('\t')
            .ok_or_else(|| err("expected label<TAB>text".into()))?;
        let label = map
            .label(label.trim())
            .ok_or_else(|| err(format!("unknown label {:?}", label.trim())))?;
        if polarembed_core::tokenize(text).is_empty() {
            return Err(err("document has no tokens".into()));
        }
        docs.push(LabeledDocument::new(text, label));
    }
    if docs.is_empty() {
        return Err(CorpusFormatError::Empty);
    }
    Ok(docs)
}

/// Reads documents for prediction: `label<TAB>text` when the first field is a
/// known label, otherwise the whole line is text.
pub fn read_unlabeled(
    r: impl BufRead,
    map: &LabelMap,
) -> Result<Vec<(usize, Option<Label>, String)>, CorpusFormatError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if is_skippable(line) {
            continue;
        }
        let parsed = line
            .split_once('\t')
            .and_then(|(l, t)| map.label(l.trim()).map(|l| (Some(l), t)));
        let (label, text) = parsed.unwrap_or((None, line));
        out.push((i + 1, label, text.to_string()));
    }
    Ok(out)
}

pub fn write_corpus(
    mut w: impl Write,
    header: &str,
    docs: &[LabeledDocument],
    map: &LabelMap,
) -> std::io::Result<()> {
    w.write_all(header.as_bytes())?;
    for d in docs {
        let text = d.text.replace(['\t', '\n', '\r'], " ");
        writeln!(w, "{}\t{}", map.render(d.label), text)?;
    }
    Ok(())
}
