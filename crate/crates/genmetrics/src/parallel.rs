//! Thread-pool drivers for the corpus-level metrics.
//!
//! Per-sentence work is spread over a rayon pool, collected back in sentence
//! order and reduced with the same pairwise summation as the sequential
//! versions in `genmetrics_core`, so results are bit-identical for any
//! thread count.

use genmetrics_core::bleu::{BleuConfig, ReferenceIndex, SelfBleuIndex, SentenceStats, Smoothing};
use genmetrics_core::corpus::NGramProfile;
use genmetrics_core::ms_jaccard::{score_n, MsJaccardResult};
use genmetrics_core::{sum, Corpus, Error as CoreError};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::Result;

/// A pool with `threads` workers; 0 means one per available CPU.
pub fn pool(threads: usize) -> Result<ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

fn mean_scores(stats: &[SentenceStats], cfg: &BleuConfig) -> f64 {
    let scores: Vec<f64> = stats.iter().map(|s| cfg.score(s)).collect();
    sum::mean(&scores).unwrap_or(0.0)
}

fn reference_stats(generated: &Corpus, reference: &Corpus, max_n: usize, pool: &ThreadPool) -> Result<Vec<SentenceStats>> {
    let index = ReferenceIndex::build(reference, max_n)?;
    let stats = pool.install(|| {
        generated
            .sentences()
            .par_iter()
            .map(|s| index.sentence_stats(s))
            .collect::<std::result::Result<Vec<_>, CoreError>>()
    })?;
    Ok(stats)
}

fn self_stats(generated: &Corpus, max_n: usize, pool: &ThreadPool) -> Result<Vec<SentenceStats>> {
    let index = SelfBleuIndex::build(generated, max_n)?;
    Ok(pool.install(|| (0..index.len()).into_par_iter().map(|i| index.sentence_stats(i)).collect()))
}

/// Mean sentence BLEU of `generated` against the whole of `reference`.
pub fn bleu_corpus(generated: &Corpus, reference: &Corpus, cfg: &BleuConfig, pool: &ThreadPool) -> Result<f64> {
    cfg.validate()?;
    Ok(mean_scores(&reference_stats(generated, reference, cfg.max_n, pool)?, cfg))
}

/// Mean leave-one-out BLEU over `generated`.
pub fn self_bleu(generated: &Corpus, cfg: &BleuConfig, pool: &ThreadPool) -> Result<f64> {
    cfg.validate()?;
    Ok(mean_scores(&self_stats(generated, cfg.max_n, pool)?, cfg))
}

fn by_order(stats: &[SentenceStats], max_n: usize, smoothing: Smoothing) -> Result<Vec<f64>> {
    (1..=max_n)
        .map(|k| {
            let cfg = BleuConfig::uniform(k).with_smoothing(smoothing);
            cfg.validate()?;
            Ok(mean_scores(stats, &cfg))
        })
        .collect()
}

/// Uniform-weight BLEU-1 ..= BLEU-`max_n` from a single pass over the data.
pub fn bleu_by_order(
    generated: &Corpus,
    reference: &Corpus,
    max_n: usize,
    smoothing: Smoothing,
    pool: &ThreadPool,
) -> Result<Vec<f64>> {
    by_order(&reference_stats(generated, reference, max_n, pool)?, max_n, smoothing)
}

/// Uniform-weight Self-BLEU-1 ..= Self-BLEU-`max_n` from a single pass.
pub fn self_bleu_by_order(generated: &Corpus, max_n: usize, smoothing: Smoothing, pool: &ThreadPool) -> Result<Vec<f64>> {
    by_order(&self_stats(generated, max_n, pool)?, max_n, smoothing)
}

/// MS-Jaccard with gram orders evaluated concurrently.
pub fn ms_jaccard(generated: &Corpus, reference: &Corpus, max_n: usize, pool: &ThreadPool) -> Result<MsJaccardResult> {
    if max_n < 1 {
        return Err(CoreError::InvalidOrder(max_n).into());
    }
    let per_n_scores = pool.install(|| {
        (1..=max_n)
            .into_par_iter()
            .map(|n| {
                let a = NGramProfile::build(generated, n)?;
                let b = NGramProfile::build(reference, n)?;
                score_n(&a, &b)
            })
            .collect::<std::result::Result<Vec<_>, CoreError>>()
    })?;
    let mut result = MsJaccardResult {
        aggregate: 0.0,
        per_n_scores,
        max_n,
    };
    result.aggregate = result.aggregate_up_to(max_n).expect("max_n >= 1");
    Ok(result)
}
