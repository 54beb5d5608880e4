#![allow(dead_code)]

pub mod oracle;

use genmetrics_core::Corpus;
use proptest::prelude::*;

/// Random corpora over a small vocabulary `w0..w{vocab-1}`.
pub fn sentences(max_sentences: usize, max_len: usize, vocab: usize) -> impl Strategy<Value = Vec<Vec<String>>> {
    prop::collection::vec(
        prop::collection::vec((0..vocab).prop_map(|i| format!("w{i}")), 1..=max_len),
        1..=max_sentences,
    )
}

pub fn corpus(sentences: &[Vec<String>]) -> Corpus {
    Corpus::from_sentences(sentences.to_vec()).unwrap()
}
