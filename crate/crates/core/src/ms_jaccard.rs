//! Multiset Jaccard similarity between the n-gram distributions of two
//! corpora.
//!
//! For one gram order, each corpus is reduced to its per-sentence average
//! n-gram counts; the score is the sum of pointwise minima over the sum of
//! pointwise maxima across the union of grams. Orders `1..=N` are combined
//! with a geometric mean.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, NGramProfile};
use crate::error::{Error, Result};

/// Per-order scores and their geometric mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsJaccardResult {
    /// `per_n_scores[k]` is the score for gram order `k + 1`.
    pub per_n_scores: Vec<f64>,
    pub aggregate: f64,
    pub max_n: usize,
}

impl MsJaccardResult {
    /// MS-Jaccard-`k`: geometric mean of the first `k` per-order scores.
    pub fn aggregate_up_to(&self, k: usize) -> Option<f64> {
        if k == 0 || k > self.per_n_scores.len() {
            return None;
        }
        Some(geometric_mean(&self.per_n_scores[..k]))
    }
}

/// Similarity of two profiles of the same order, in `[0, 1]`.
///
/// With `C(g, S) = count(g, S) / |S|`, the ratio
/// `Σ min(C(g,a), C(g,b)) / Σ max(C(g,a), C(g,b))` is evaluated exactly in
/// integers by scaling both counts with the other corpus' sentence count,
/// so the result is bit-for-bit symmetric. Two empty profiles score 1, one
/// empty profile scores 0.
pub fn score_n(a: &NGramProfile, b: &NGramProfile) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::OrderMismatch(a.n(), b.n()));
    }
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let scale_a = u128::from(b.num_sentences());
    let scale_b = u128::from(a.num_sentences());
    let mut min_sum: u128 = 0;
    let mut max_sum: u128 = 0;
    let mut add = |x: u64, y: u64| {
        let (x, y) = (u128::from(x) * scale_a, u128::from(y) * scale_b);
        min_sum += x.min(y);
        max_sum += x.max(y);
    };

    // Merge walk over the two sorted count maps.
    let mut ia = a.counts().iter().peekable();
    let mut ib = b.counts().iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some((ga, &ca)), Some((gb, &cb))) => match ga.cmp(gb) {
                Ordering::Less => {
                    add(ca, 0);
                    ia.next();
                }
                Ordering::Greater => {
                    add(0, cb);
                    ib.next();
                }
                Ordering::Equal => {
                    add(ca, cb);
                    ia.next();
                    ib.next();
                }
            },
            (Some((_, &ca)), None) => {
                add(ca, 0);
                ia.next();
            }
            (None, Some((_, &cb))) => {
                add(0, cb);
                ib.next();
            }
            (None, None) => break,
        }
    }
    Ok(min_sum as f64 / max_sum as f64)
}

/// MS-Jaccard over gram orders `1..=max_n`.
pub fn ms_jaccard(generated: &Corpus, reference: &Corpus, max_n: usize) -> Result<MsJaccardResult> {
    if max_n < 1 {
        return Err(Error::InvalidOrder(max_n));
    }
    if generated.is_empty() || reference.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let per_n_scores = (1..=max_n)
        .map(|n| {
            let a = NGramProfile::build(generated, n)?;
            let b = NGramProfile::build(reference, n)?;
            score_n(&a, &b)
        })
        .collect::<Result<Vec<_>>>()?;
    let aggregate = geometric_mean(&per_n_scores);
    Ok(MsJaccardResult {
        per_n_scores,
        aggregate,
        max_n,
    })
}

/// Geometric mean of scores in `[0, 1]`; exactly 0 when any factor is 0.
pub(crate) fn geometric_mean(scores: &[f64]) -> f64 {
    if scores.contains(&0.0) {
        return 0.0;
    }
    let log_mean = scores.iter().map(|&s| libm::log(s)).sum::<f64>() / scores.len() as f64;
    libm::exp(log_mean).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(text: &str) -> Corpus {
        Corpus::parse(text).unwrap()
    }

    fn profile(text: &str, n: usize) -> NGramProfile {
        NGramProfile::build(&corpus(text), n).unwrap()
    }

    #[test]
    fn identical_profiles_score_one() {
        let p = profile("a b c\nb c d\n", 2);
        assert_eq!(score_n(&p, &p).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_profiles_score_zero() {
        assert_eq!(score_n(&profile("a b\n", 1), &profile("c d\n", 1)).unwrap(), 0.0);
    }

    #[test]
    fn worked_unigram_example() {
        // C(S1) = {a:1, b:.5, c:.5}, C(S2) = {a:1, b:1} -> 1.5 / 2.5
        let s = score_n(&profile("a b\na c\n", 1), &profile("a b\n", 1)).unwrap();
        assert!((s - 0.6).abs() < 1e-15);
    }

    #[test]
    fn empty_profile_conventions() {
        let e1 = profile("a\n", 2);
        let e2 = profile("b\nc\n", 2);
        assert_eq!(score_n(&e1, &e2).unwrap(), 1.0);
        assert_eq!(score_n(&e1, &profile("a b\n", 2)).unwrap(), 0.0);
    }

    #[test]
    fn order_mismatch() {
        assert_eq!(
            score_n(&profile("a b\n", 1), &profile("a b\n", 2)),
            Err(Error::OrderMismatch(1, 2))
        );
    }

    #[test]
    fn two_orders() {
        let r = ms_jaccard(&corpus("a b\na c\n"), &corpus("a b\n"), 2).unwrap();
        assert!((r.per_n_scores[0] - 0.6).abs() < 1e-15);
        assert!((r.per_n_scores[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.aggregate - libm::sqrt(0.2)).abs() < 1e-12);
        assert_eq!(r.aggregate_up_to(1), Some(r.per_n_scores[0]));
        assert_eq!(r.aggregate_up_to(3), None);
    }

    #[test]
    fn self_similarity() {
        let c = corpus("the cat sat\non the mat\nthe cat\n");
        let r = ms_jaccard(&c, &c, 5).unwrap();
        // order 4 and 5 have no grams on either side -> 1 by convention
        assert!(r.per_n_scores.iter().all(|&s| s == 1.0));
        assert_eq!(r.aggregate, 1.0);
    }

    #[test]
    fn shared_unigrams_no_bigrams() {
        let r = ms_jaccard(&corpus("a b\n"), &corpus("b a\n"), 2).unwrap();
        assert_eq!(r.per_n_scores[0], 1.0);
        assert_eq!(r.aggregate, 0.0);
    }

    #[test]
    fn zero_order_rejected() {
        let c = corpus("a\n");
        assert_eq!(ms_jaccard(&c, &c, 0), Err(Error::InvalidOrder(0)));
    }
}
