//! Naive reference implementations used as test oracles. Nothing here
//! touches the indexed code paths.
#![allow(dead_code)]

use std::collections::HashMap;

pub type Sentence = Vec<String>;

fn grams(sentence: &[String], n: usize) -> Vec<Vec<String>> {
    if sentence.len() < n {
        return Vec::new();
    }
    (0..=sentence.len() - n).map(|i| sentence[i..i + n].to_vec()).collect()
}

/// Direct union enumeration of the normalized-count Jaccard ratio.
pub fn ms_jaccard_score(a: &[Sentence], b: &[Sentence], n: usize) -> f64 {
    let mut counts: HashMap<Vec<String>, (f64, f64)> = HashMap::new();
    for s in a {
        for g in grams(s, n) {
            counts.entry(g).or_default().0 += 1.0;
        }
    }
    for s in b {
        for g in grams(s, n) {
            counts.entry(g).or_default().1 += 1.0;
        }
    }
    if counts.is_empty() {
        return 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut min_sum = 0.0;
    let mut max_sum = 0.0;
    for (ca, cb) in counts.values() {
        let (x, y) = (ca / na, cb / nb);
        min_sum += x.min(y);
        max_sum += x.max(y);
    }
    min_sum / max_sum
}

pub fn ms_jaccard(a: &[Sentence], b: &[Sentence], max_n: usize) -> (Vec<f64>, f64) {
    let scores: Vec<f64> = (1..=max_n).map(|n| ms_jaccard_score(a, b, n)).collect();
    let product: f64 = scores.iter().product();
    (scores.clone(), product.powf(1.0 / max_n as f64))
}

/// Textbook sentence BLEU: clip against each reference sentence in turn.
pub fn sentence_bleu(candidate: &[String], references: &[&Sentence], max_n: usize, weights: &[f64], epsilon: Option<f64>) -> f64 {
    let mut log_p = 0.0;
    for n in 1..=max_n {
        let cand = grams(candidate, n);
        let mut cand_counts: HashMap<&Vec<String>, usize> = HashMap::new();
        for g in &cand {
            *cand_counts.entry(g).or_default() += 1;
        }
        let mut max_ref: HashMap<&Vec<String>, usize> = HashMap::new();
        for r in references {
            let rg = grams(r, n);
            for g in cand_counts.keys() {
                let c = rg.iter().filter(|x| x == g).count();
                let m = max_ref.entry(g).or_default();
                *m = (*m).max(c);
            }
        }
        let clipped: usize = cand_counts.iter().map(|(g, c)| (*c).min(max_ref[g])).sum();
        let mut p = if cand.is_empty() { 0.0 } else { clipped as f64 / cand.len() as f64 };
        if p == 0.0 {
            match epsilon {
                None => return 0.0,
                Some(e) => p = e,
            }
        }
        log_p += weights[n - 1] * p.ln();
    }
    let c = candidate.len();
    let mut r = usize::MAX;
    for reference in references {
        let l = reference.len();
        let (dl, dr) = (l.abs_diff(c), r.abs_diff(c));
        if dl < dr || (dl == dr && l < r) {
            r = l;
        }
    }
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    bp * log_p.exp()
}

pub fn bleu_corpus(generated: &[Sentence], reference: &[Sentence], max_n: usize, epsilon: Option<f64>) -> f64 {
    let weights = vec![1.0 / max_n as f64; max_n];
    let refs: Vec<&Sentence> = reference.iter().collect();
    let total: f64 = generated
        .iter()
        .map(|s| sentence_bleu(s, &refs, max_n, &weights, epsilon))
        .sum();
    total / generated.len() as f64
}

pub fn self_bleu(generated: &[Sentence], max_n: usize, epsilon: Option<f64>) -> f64 {
    let weights = vec![1.0 / max_n as f64; max_n];
    let total: f64 = (0..generated.len())
        .map(|i| {
            let refs: Vec<&Sentence> = generated
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, s)| s)
                .collect();
            sentence_bleu(&generated[i], &refs, max_n, &weights, epsilon)
        })
        .sum();
    total / generated.len() as f64
}

/// Textbook mean and unbiased covariance.
pub fn mean_cov(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let cov = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| rows.iter().map(|r| (r[a] - mean[a]) * (r[b] - mean[b])).sum::<f64>() / (n - 1.0))
                .collect()
        })
        .collect();
    (mean, cov)
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let sy: f64 = y.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    cov / (sx * sy)
}
