//! Sentence-averaged BLEU against a fixed reference set, and Self-BLEU.
//!
//! Every generated sentence is scored against the *whole* reference corpus,
//! so clipping only needs, for each n-gram, its maximum count within a single
//! reference sentence. [`ReferenceIndex`] precomputes those maxima once;
//! scoring a candidate is then a handful of hash lookups regardless of the
//! reference size.
//!
//! Self-BLEU scores each sentence against all the others. The index keeps
//! the two largest per-sentence counts of every gram (and how many sentences
//! reach the largest), which is enough to answer "maximum over every
//! sentence except this one" exactly without rebuilding anything.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::sum;

type TokenId = u32;

/// Id given to candidate tokens that never occur in the reference set.
const UNKNOWN: TokenId = TokenId::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Smoothing {
    /// Any zero precision makes the sentence score 0.
    None,
    /// Zero precisions are replaced by this value before taking logs.
    Epsilon(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuConfig {
    pub max_n: usize,
    pub weights: Vec<f64>,
    pub smoothing: Smoothing,
}

impl BleuConfig {
    /// Uniform weights `1/max_n`, no smoothing.
    pub fn uniform(max_n: usize) -> Self {
        Self {
            max_n,
            weights: vec![1.0 / max_n.max(1) as f64; max_n],
            smoothing: Smoothing::None,
        }
    }

    pub fn with_smoothing(mut self, smoothing: Smoothing) -> Self {
        self.smoothing = smoothing;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_n < 1 {
            return Err(Error::InvalidOrder(self.max_n));
        }
        if self.weights.len() != self.max_n {
            return Err(Error::InvalidConfig(format!(
                "expected {} BLEU weights, got {}",
                self.max_n,
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig("BLEU weights must be finite and nonnegative".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("BLEU weights sum to {total}, not 1")));
        }
        if let Smoothing::Epsilon(eps) = self.smoothing {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(Error::InvalidConfig(format!("smoothing epsilon {eps} not in (0, 1]")));
            }
        }
        Ok(())
    }

    /// Combines clipped precisions and the brevity penalty into a score.
    ///
    /// Uses the first `self.max_n` orders of `stats`; panics if `stats`
    /// holds fewer orders.
    pub fn score(&self, stats: &SentenceStats) -> f64 {
        let mut log_precision = 0.0;
        for (n, weight) in self.weights.iter().enumerate() {
            let total = stats.totals[n];
            let mut p = if total == 0 {
                0.0
            } else {
                stats.matches[n] as f64 / total as f64
            };
            if p == 0.0 {
                match self.smoothing {
                    Smoothing::None => return 0.0,
                    Smoothing::Epsilon(eps) => p = eps,
                }
            }
            log_precision += weight * libm::log(p);
        }
        let (c, r) = (stats.candidate_len as f64, stats.reference_len as f64);
        let brevity = if c > r { 1.0 } else { libm::exp(1.0 - r / c) };
        (brevity * libm::exp(log_precision)).clamp(0.0, 1.0)
    }
}

/// Clipped match counts of one candidate sentence, per gram order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceStats {
    /// `matches[k]`: clipped matches of order `k + 1`.
    pub matches: Vec<u64>,
    /// `totals[k]`: number of order `k + 1` grams in the candidate.
    pub totals: Vec<u64>,
    pub candidate_len: usize,
    /// Reference length closest to `candidate_len` (ties to the shorter).
    pub reference_len: usize,
}

/// The two largest per-sentence counts of a gram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct TopCounts {
    first: u32,
    /// Number of sentences in which the gram occurs exactly `first` times.
    first_mult: u32,
    second: u32,
}

impl TopCounts {
    fn push(&mut self, count: u32) {
        if count > self.first {
            self.second = self.first;
            self.first = count;
            self.first_mult = 1;
        } else if count == self.first {
            self.first_mult += 1;
        } else if count > self.second {
            self.second = count;
        }
    }

    /// Maximum after removing one sentence holding `own` occurrences.
    fn without(&self, own: u32) -> u32 {
        if own == self.first && self.first_mult == 1 {
            self.second
        } else {
            self.first
        }
    }
}

/// Distinct reference lengths and their multiplicities, sorted by length.
#[derive(Debug, Clone, PartialEq, Eq)]
struct LengthTable(Vec<(usize, usize)>);

impl LengthTable {
    fn new(lengths: impl Iterator<Item = usize>) -> Self {
        let mut all: Vec<usize> = lengths.collect();
        all.sort_unstable();
        let mut table: Vec<(usize, usize)> = Vec::new();
        for len in all {
            match table.last_mut() {
                Some((l, m)) if *l == len => *m += 1,
                _ => table.push((len, 1)),
            }
        }
        Self(table)
    }

    /// Closest length to `target`, ties to the shorter. `exclude` removes one
    /// sentence of that length from consideration.
    fn closest(&self, target: usize, exclude: Option<usize>) -> Option<usize> {
        let available = |&(len, mult): &(usize, usize)| {
            let removed = usize::from(exclude == Some(len));
            mult > removed
        };
        let split = self.0.partition_point(|&(len, _)| len < target);
        let below = self.0[..split].iter().rev().find(|e| available(e)).map(|e| e.0);
        let above = self.0[split..].iter().find(|e| available(e)).map(|e| e.0);
        match (below, above) {
            (Some(b), Some(a)) => Some(if target - b <= a - target { b } else { a }),
            (b, a) => b.or(a),
        }
    }
}

/// Per-gram maximum counts over a reference corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceIndex {
    max_n: usize,
    vocab: HashMap<String, TokenId>,
    /// `orders[k]`: grams of order `k + 1`.
    orders: Vec<HashMap<Vec<TokenId>, TopCounts>>,
    lengths: LengthTable,
}

impl ReferenceIndex {
    /// Indexes grams of orders `1..=max_n` over `reference`.
    pub fn build(reference: &Corpus, max_n: usize) -> Result<Self> {
        Ok(Self::build_encoded(reference, max_n)?.0)
    }

    fn build_encoded(reference: &Corpus, max_n: usize) -> Result<(Self, Vec<Vec<TokenId>>)> {
        if max_n < 1 {
            return Err(Error::InvalidOrder(max_n));
        }
        if reference.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut vocab: HashMap<String, TokenId> = HashMap::new();
        let encoded: Vec<Vec<TokenId>> = reference
            .sentences()
            .iter()
            .map(|sentence| {
                sentence
                    .iter()
                    .map(|tok| {
                        let next = vocab.len() as TokenId;
                        *vocab.entry_ref(tok.as_str()).or_insert(next)
                    })
                    .collect()
            })
            .collect();

        let mut orders = vec![HashMap::<Vec<TokenId>, TopCounts>::new(); max_n];
        let mut local = Vec::new();
        for sentence in &encoded {
            for (k, table) in orders.iter_mut().enumerate() {
                count_grams(sentence, k + 1, &mut local);
                for &(gram, count) in &local {
                    table.entry_ref(gram).or_default().push(count);
                }
            }
        }
        let lengths = LengthTable::new(encoded.iter().map(Vec::len));
        Ok((
            Self {
                max_n,
                vocab,
                orders,
                lengths,
            },
            encoded,
        ))
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Largest number of times `gram` occurs in any single reference sentence.
    pub fn max_count<S: AsRef<str>>(&self, gram: &[S]) -> u32 {
        if gram.is_empty() || gram.len() > self.max_n {
            return 0;
        }
        let ids = self.encode(gram);
        self.orders[gram.len() - 1]
            .get(ids.as_slice())
            .map_or(0, |t| t.first)
    }

    /// Number of distinct grams of order `n`.
    pub fn num_grams(&self, n: usize) -> usize {
        self.orders.get(n.wrapping_sub(1)).map_or(0, HashMap::len)
    }

    fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<TokenId> {
        tokens
            .iter()
            .map(|t| self.vocab.get(t.as_ref()).copied().unwrap_or(UNKNOWN))
            .collect()
    }

    /// Clipped counts of `candidate` for every indexed order.
    pub fn sentence_stats<S: AsRef<str>>(&self, candidate: &[S]) -> Result<SentenceStats> {
        if candidate.is_empty() {
            return Err(Error::EmptyCandidate);
        }
        let ids = self.encode(candidate);
        let reference_len = self
            .lengths
            .closest(ids.len(), None)
            .ok_or(Error::EmptyCorpus)?;
        Ok(self.clip(&ids, reference_len, |top, _| top.first))
    }

    /// BLEU of one candidate against the whole reference set.
    pub fn sentence_bleu<S: AsRef<str>>(&self, candidate: &[S], cfg: &BleuConfig) -> Result<f64> {
        self.check_config(cfg)?;
        Ok(cfg.score(&self.sentence_stats(candidate)?))
    }

    fn check_config(&self, cfg: &BleuConfig) -> Result<()> {
        cfg.validate()?;
        if cfg.max_n > self.max_n {
            return Err(Error::InvalidConfig(format!(
                "BLEU order {} exceeds indexed order {}",
                cfg.max_n, self.max_n
            )));
        }
        Ok(())
    }

    /// Shared clipping loop. `reference_max(top, own)` gives the clip bound
    /// for a gram the candidate holds `own` times.
    fn clip(
        &self,
        ids: &[TokenId],
        reference_len: usize,
        reference_max: impl Fn(&TopCounts, u32) -> u32,
    ) -> SentenceStats {
        let mut matches = vec![0u64; self.max_n];
        let mut totals = vec![0u64; self.max_n];
        let mut local = Vec::new();
        for (k, table) in self.orders.iter().enumerate() {
            let n = k + 1;
            totals[k] = ids.len().saturating_sub(n - 1) as u64;
            count_grams(ids, n, &mut local);
            for &(gram, own) in &local {
                if gram.contains(&UNKNOWN) {
                    continue;
                }
                if let Some(top) = table.get(gram) {
                    matches[k] += u64::from(own.min(reference_max(top, own)));
                }
            }
        }
        SentenceStats {
            matches,
            totals,
            candidate_len: ids.len(),
            reference_len,
        }
    }
}

/// Distinct windows of length `n` in `tokens` with their counts, written
/// into `out` (sorted by gram).
fn count_grams<'a>(tokens: &'a [TokenId], n: usize, out: &mut Vec<(&'a [TokenId], u32)>) {
    out.clear();
    if tokens.len() < n {
        return;
    }
    let mut windows: Vec<&[TokenId]> = tokens.windows(n).collect();
    windows.sort_unstable();
    for w in windows {
        match out.last_mut() {
            Some((g, c)) if *g == w => *c += 1,
            _ => out.push((w, 1)),
        }
    }
}

/// Reference index over a corpus that scores each of its own sentences
/// against all the others.
#[derive(Debug, Clone)]
pub struct SelfBleuIndex {
    index: ReferenceIndex,
    encoded: Vec<Vec<TokenId>>,
}

impl SelfBleuIndex {
    pub fn build(corpus: &Corpus, max_n: usize) -> Result<Self> {
        if corpus.len() < 2 {
            return Err(Error::TooFewSentences(corpus.len()));
        }
        let (index, encoded) = ReferenceIndex::build_encoded(corpus, max_n)?;
        Ok(Self { index, encoded })
    }

    pub fn len(&self) -> usize {
        self.encoded.len()
    }

    /// Always false: construction requires two sentences.
    pub fn is_empty(&self) -> bool {
        self.encoded.is_empty()
    }

    pub fn max_n(&self) -> usize {
        self.index.max_n
    }

    /// Clipped counts of sentence `i` against every other sentence.
    pub fn sentence_stats(&self, i: usize) -> SentenceStats {
        let ids = &self.encoded[i];
        let reference_len = self
            .index
            .lengths
            .closest(ids.len(), Some(ids.len()))
            .expect("at least one other sentence");
        self.index.clip(ids, reference_len, |top, own| top.without(own))
    }

    /// BLEU of sentence `i` with the rest of the corpus as references.
    pub fn sentence_bleu(&self, i: usize, cfg: &BleuConfig) -> Result<f64> {
        self.index.check_config(cfg)?;
        Ok(cfg.score(&self.sentence_stats(i)))
    }

    /// Largest count of `gram` in any sentence other than sentence `i`.
    pub fn max_count_excluding<S: AsRef<str>>(&self, i: usize, gram: &[S]) -> u32 {
        if gram.is_empty() || gram.len() > self.index.max_n {
            return 0;
        }
        let ids = self.index.encode(gram);
        let own = self.encoded[i].windows(ids.len()).filter(|w| *w == ids.as_slice()).count() as u32;
        self.index.orders[ids.len() - 1]
            .get(ids.as_slice())
            .map_or(0, |top| top.without(own))
    }
}

/// BLEU of one candidate against an index (free-function form).
pub fn bleu_sentence<S: AsRef<str>>(candidate: &[S], index: &ReferenceIndex, cfg: &BleuConfig) -> Result<f64> {
    index.sentence_bleu(candidate, cfg)
}

/// Mean sentence BLEU of `generated` with all of `reference` as references.
pub fn bleu_corpus(generated: &Corpus, reference: &Corpus, cfg: &BleuConfig) -> Result<f64> {
    cfg.validate()?;
    if generated.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let index = ReferenceIndex::build(reference, cfg.max_n)?;
    let scores = generated
        .sentences()
        .iter()
        .map(|s| index.sentence_bleu(s, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(sum::mean(&scores).unwrap_or(0.0))
}

/// Mean leave-one-out BLEU of every sentence against the rest of `generated`.
/// Duplicates are kept: another copy of a sentence is a valid reference.
pub fn self_bleu(generated: &Corpus, cfg: &BleuConfig) -> Result<f64> {
    cfg.validate()?;
    let index = SelfBleuIndex::build(generated, cfg.max_n)?;
    let scores: Vec<f64> = (0..index.len())
        .map(|i| cfg.score(&index.sentence_stats(i)))
        .collect();
    Ok(sum::mean(&scores).unwrap_or(0.0))
}
