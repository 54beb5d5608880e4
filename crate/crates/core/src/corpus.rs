//! Tokenized corpora, preprocessing and n-gram profiles.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Splits a line on runs of unicode whitespace. No case folding, no
/// punctuation handling: corpora are expected to be pre-tokenized.
pub fn tokenize(line: &str) -> Vec<String> {
    line.split_whitespace().map(ToOwned::to_owned).collect()
}

/// An ordered collection of non-empty tokenized sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Vec<String>>,
    source_path: Option<String>,
    vocab: BTreeMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus from already tokenized sentences.
    ///
    /// Fails with [`Error::EmptyCorpus`] when there are no sentences and with
    /// [`Error::InvalidConfig`] when one of them has no tokens.
    pub fn from_sentences(sentences: Vec<Vec<String>>) -> Result<Self> {
        if sentences.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        if let Some(i) = sentences.iter().position(Vec::is_empty) {
            return Err(Error::InvalidConfig(format!("sentence {} has no tokens", i + 1)));
        }
        let vocab = count_tokens(&sentences);
        Ok(Self {
            sentences,
            source_path: None,
            vocab,
        })
    }

    /// Parses one sentence per line. Blank lines are skipped; `\r\n` endings
    /// are accepted.
    pub fn parse(text: &str) -> Result<Self> {
        let sentences = text
            .lines()
            .map(tokenize)
            .filter(|s| !s.is_empty())
            .collect();
        Self::from_sentences(sentences)
    }

    pub fn with_source_path(mut self, path: impl Into<String>) -> Self {
        self.source_path = Some(path.into());
        self
    }

    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }

    pub fn source_path(&self) -> Option<&str> {
        self.source_path.as_deref()
    }

    /// Exact token frequencies over all sentences.
    pub fn vocab(&self) -> &BTreeMap<String, usize> {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    /// Always false for a constructed corpus; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn num_tokens(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    /// Writes the corpus back out, one space-joined sentence per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for sentence in &self.sentences {
            out.push_str(&sentence.join(" "));
            out.push('\n');
        }
        out
    }

    /// Applies UNK replacement and the length / UNK-count filters.
    ///
    /// Token frequencies for UNK replacement are taken from this corpus.
    pub fn preprocess(&self, cfg: &PreprocessConfig) -> Result<Self> {
        cfg.validate()?;
        let replace = cfg.min_word_freq > 0;
        let mut kept = Vec::new();
        for sentence in &self.sentences {
            if sentence.len() < cfg.min_len || sentence.len() > cfg.max_len {
                continue;
            }
            if !replace {
                kept.push(sentence.clone());
                continue;
            }
            let mut unks = 0;
            let replaced: Vec<String> = sentence
                .iter()
                .map(|tok| {
                    let freq = self.vocab.get(tok).copied().unwrap_or(0);
                    if freq < cfg.min_word_freq || *tok == cfg.unk_token {
                        unks += 1;
                        cfg.unk_token.clone()
                    } else {
                        tok.clone()
                    }
                })
                .collect();
            if unks <= cfg.max_unks {
                kept.push(replaced);
            }
        }
        let mut out = Self::from_sentences(kept)?;
        out.source_path = self.source_path.clone();
        Ok(out)
    }
}

fn count_tokens(sentences: &[Vec<String>]) -> BTreeMap<String, usize> {
    let mut vocab = BTreeMap::new();
    for tok in sentences.iter().flatten() {
        *vocab.entry(tok.clone()).or_insert(0) += 1;
    }
    vocab
}

/// Length filter and rare-word replacement settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub min_len: usize,
    pub max_len: usize,
    /// Tokens seen fewer times than this become `unk_token`; 0 disables.
    pub min_word_freq: usize,
    /// Maximum UNK tokens in a kept sentence (ignored when replacement is off).
    pub max_unks: usize,
    pub unk_token: String,
}

impl Default for PreprocessConfig {
    /// The identity configuration.
    fn default() -> Self {
        Self {
            min_len: 1,
            max_len: usize::MAX,
            min_word_freq: 0,
            max_unks: usize::MAX,
            unk_token: "<unk>".into(),
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_len < 1 {
            return Err(Error::InvalidConfig("min_len must be at least 1".into()));
        }
        if self.max_len < self.min_len {
            return Err(Error::InvalidConfig(format!(
                "max_len {} is below min_len {}",
                self.max_len, self.min_len
            )));
        }
        if self.unk_token.split_whitespace().count() != 1 || self.unk_token.trim() != self.unk_token
        {
            return Err(Error::InvalidConfig("unk_token must be a single token".into()));
        }
        Ok(())
    }
}

/// Raw n-gram counts of one order over a corpus.
///
/// Counts are kept as exact integers; the per-sentence normalized count is
/// derived on demand by [`NGramProfile::normalized`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramProfile {
    n: usize,
    counts: BTreeMap<Vec<String>, u64>,
    num_sentences: u64,
}

impl NGramProfile {
    /// Counts every n-gram occurrence in `corpus`. Sentences shorter than
    /// `n` contribute nothing, so the profile may be empty.
    pub fn build(corpus: &Corpus, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidOrder(n));
        }
        let mut counts = BTreeMap::new();
        for sentence in corpus.sentences() {
            for gram in sentence.windows(n) {
                *counts.entry(gram.to_vec()).or_insert(0) += 1;
            }
        }
        Ok(Self {
            n,
            counts,
            num_sentences: corpus.len() as u64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<Vec<String>, u64> {
        &self.counts
    }

    pub fn num_sentences(&self) -> u64 {
        self.num_sentences
    }

    pub fn raw_count(&self, gram: &[String]) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Average occurrences of `gram` per sentence.
    pub fn normalized(&self, gram: &[String]) -> f64 {
        self.raw_count(gram) as f64 / self.num_sentences as f64
    }

    /// Total number of n-gram occurrences.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Shorthand for [`NGramProfile::build`].
pub fn build_profile(corpus: &Corpus, n: usize) -> Result<NGramProfile> {
    NGramProfile::build(corpus, n)
}
