//! Edit distance and the recognition metrics built on it.
//!
//! Characters are Unicode scalar values. Words are whitespace-separated
//! tokens.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Text attached to an image: a ground truth or a recognizer output.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Transcript(String);

impl Transcript {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.contains('\0') {
            return Err(Error::InvalidTranscript("contains NUL".into()));
        }
        Ok(Self(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn char_len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.0.split_whitespace()
    }
}

impl TryFrom<String> for Transcript {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::new(s)
    }
}

impl From<Transcript> for String {
    fn from(t: Transcript) -> String {
        t.0
    }
}

impl std::fmt::Display for Transcript {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Unit-cost Levenshtein distance over arbitrary token sequences.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ta) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, tb) in b.iter().enumerate() {
            let sub = diag + usize::from(ta != tb);
            diag = row[j + 1];
            row[j + 1] = sub.min(row[j] + 1).min(diag + 1);
        }
    }
    row[b.len()]
}

pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein(&a, &b)
}

/// Character error rate: edit distance over ground-truth length.
pub fn cer(pred: &str, gt: &str) -> Result<f64> {
    let n = gt.chars().count();
    if n == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    Ok(edit_distance(pred, gt) as f64 / n as f64)
}

/// Word error rate: word-level edit distance over ground-truth word count.
pub fn wer(pred: &str, gt: &str) -> Result<f64> {
    let gt_words: Vec<&str> = gt.split_whitespace().collect();
    if gt_words.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let pred_words: Vec<&str> = pred.split_whitespace().collect();
    Ok(levenshtein(&pred_words, &gt_words) as f64 / gt_words.len() as f64)
}

/// How [`word_accuracy`] compares strings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Comparison {
    /// Lowercase and keep only alphanumeric characters.
    #[default]
    Normalized,
    Exact,
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Fraction of predictions matching their ground truth.
pub fn word_accuracy<P: AsRef<str>, G: AsRef<str>>(
    preds: &[P],
    gts: &[G],
    cmp: Comparison,
) -> Result<f64> {
    if preds.len() != gts.len() {
        return Err(Error::LengthMismatch {
            expected: gts.len(),
            actual: preds.len(),
        });
    }
    if gts.is_empty() {
        return Err(Error::EmptyGroundTruth);
    }
    let hits = preds
        .iter()
        .zip(gts)
        .filter(|(p, g)| match cmp {
            Comparison::Exact => p.as_ref() == g.as_ref(),
            Comparison::Normalized => normalize(p.as_ref()) == normalize(g.as_ref()),
        })
        .count();
    Ok(hits as f64 / gts.len() as f64)
}
