//! Oracle-mode metrics over explicit per-sample log-densities.
//!
//! Each record is a sample drawn either from the oracle `P` or from the
//! model `Q`, together with its natural-log density under both. All inputs
//! are logs, so `sqrt(q/p)` is evaluated as `exp((log q - log p) / 2)`.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum;

/// Which distribution a sample was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    /// The oracle (real data).
    P,
    /// The model under evaluation.
    Q,
}

impl Origin {
    pub fn as_char(self) -> char {
        match self {
            Origin::P => 'P',
            Origin::Q => 'Q',
        }
    }

    pub fn swapped(self) -> Self {
        match self {
            Origin::P => Origin::Q,
            Origin::Q => Origin::P,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogProbRecord {
    pub sample_id: String,
    pub origin: Origin,
    /// ln p(x) under the oracle.
    pub logp: f64,
    /// ln q(x) under the model.
    pub logq: f64,
    /// Token count, when known; enables per-token averages.
    pub length: Option<u32>,
}

/// Validated collection of log-density records.
#[derive(Debug, Clone, PartialEq)]
pub struct LogProbTable {
    records: Vec<LogProbRecord>,
    num_p: usize,
    num_q: usize,
}

/// Whether NLL-style averages are per sample or per token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    #[default]
    PerSentence,
    /// Total negative log-density divided by total token count.
    PerToken,
}

impl LogProbTable {
    /// Rejects any record whose `logp` or `logq` is NaN or infinite.
    pub fn new(records: Vec<LogProbRecord>) -> Result<Self> {
        for (index, r) in records.iter().enumerate() {
            if !r.logp.is_finite() || !r.logq.is_finite() {
                return Err(Error::NonFiniteLogProb {
                    index: index + 1,
                    sample_id: r.sample_id.clone(),
                });
            }
        }
        let num_p = records.iter().filter(|r| r.origin == Origin::P).count();
        let num_q = records.len() - num_p;
        Ok(Self { records, num_p, num_q })
    }

    pub fn records(&self) -> &[LogProbRecord] {
        &self.records
    }

    /// Number of oracle samples.
    pub fn num_p(&self) -> usize {
        self.num_p
    }

    /// Number of model samples.
    pub fn num_q(&self) -> usize {
        self.num_q
    }

    pub fn has_lengths(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.length.is_some())
    }

    fn of(&self, origin: Origin) -> impl Iterator<Item = &LogProbRecord> {
        self.records.iter().filter(move |r| r.origin == origin)
    }

    fn require(&self, origin: Origin) -> Result<()> {
        let n = match origin {
            Origin::P => self.num_p,
            Origin::Q => self.num_q,
        };
        if n == 0 {
            Err(Error::MissingOrigin(origin.as_char()))
        } else {
            Ok(())
        }
    }

    /// Mean of `value(record)` over records of `origin`.
    fn average(&self, origin: Origin, mode: Averaging, value: impl Fn(&LogProbRecord) -> f64) -> Result<f64> {
        self.require(origin)?;
        let values: Vec<f64> = self.of(origin).map(&value).collect();
        match mode {
            Averaging::PerSentence => Ok(sum::mean(&values).expect("nonempty")),
            Averaging::PerToken => {
                let mut tokens = 0u64;
                for (index, r) in self.records.iter().enumerate() {
                    if r.origin != origin {
                        continue;
                    }
                    match r.length {
                        Some(len) if len > 0 => tokens += u64::from(len),
                        _ => {
                            return Err(Error::MissingLength {
                                index: index + 1,
                                sample_id: r.sample_id.clone(),
                            })
                        }
                    }
                }
                Ok(sum::pairwise_sum(&values) / tokens as f64)
            }
        }
    }
}

/// Two-sided Monte-Carlo estimate of the Bhattacharyya distance:
///
/// ```text
/// -1/2 [ ln (1/N) Σ_{x~P} sqrt(q(x)/p(x)) + ln (1/M) Σ_{x~Q} sqrt(p(x)/q(x)) ]
/// ```
///
/// Each log-mean is computed with log-sum-exp, so extreme log-ratios do not
/// overflow. Finite-sample estimates can dip slightly below 0 when `P ≈ Q`.
pub fn bhattacharyya_estimate(table: &LogProbTable) -> Result<f64> {
    table.require(Origin::P)?;
    table.require(Origin::Q)?;
    let from_p: Vec<f64> = table.of(Origin::P).map(|r| 0.5 * (r.logq - r.logp)).collect();
    let from_q: Vec<f64> = table.of(Origin::Q).map(|r| 0.5 * (r.logp - r.logq)).collect();
    let log_mean = |v: &[f64]| sum::log_sum_exp(v) - libm::log(v.len() as f64);
    Ok(-0.5 * (log_mean(&from_p) + log_mean(&from_q)))
}

/// Negative log-likelihood of real (oracle) samples under the model.
pub fn nll(table: &LogProbTable) -> Result<f64> {
    nll_with(table, Averaging::PerSentence)
}

pub fn nll_with(table: &LogProbTable, mode: Averaging) -> Result<f64> {
    table.average(Origin::P, mode, |r| -r.logq)
}

/// Negative log-density of model samples under the oracle.
pub fn oracle_nll(table: &LogProbTable) -> Result<f64> {
    oracle_nll_with(table, Averaging::PerSentence)
}

pub fn oracle_nll_with(table: &LogProbTable, mode: Averaging) -> Result<f64> {
    table.average(Origin::Q, mode, |r| -r.logp)
}

/// Monte-Carlo entropy of the model from its own samples.
pub fn entropy_estimate(table: &LogProbTable) -> Result<f64> {
    entropy_estimate_with(table, Averaging::PerSentence)
}

pub fn entropy_estimate_with(table: &LogProbTable, mode: Averaging) -> Result<f64> {
    table.average(Origin::Q, mode, |r| -r.logq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn rec(origin: Origin, logp: f64, logq: f64) -> LogProbRecord {
        LogProbRecord {
            sample_id: format!("{logp}/{logq}"),
            origin,
            logp,
            logq,
            length: None,
        }
    }

    fn table(records: Vec<LogProbRecord>) -> LogProbTable {
        LogProbTable::new(records).unwrap()
    }

    #[test]
    fn equal_densities_give_exact_zero() {
        let t = table(vec![
            rec(Origin::P, -1.0, -1.0),
            rec(Origin::P, -7.5, -7.5),
            rec(Origin::Q, -3.0, -3.0),
        ]);
        assert_eq!(bhattacharyya_estimate(&t).unwrap(), 0.0);
    }

    #[test]
    fn origin_swap_symmetry() {
        let records = vec![
            rec(Origin::P, -1.0, -2.0),
            rec(Origin::P, -0.5, -3.0),
            rec(Origin::Q, -4.0, -0.2),
        ];
        let swapped = records
            .iter()
            .map(|r| LogProbRecord {
                origin: r.origin.swapped(),
                logp: r.logq,
                logq: r.logp,
                ..r.clone()
            })
            .collect();
        assert_eq!(
            bhattacharyya_estimate(&table(records)).unwrap(),
            bhattacharyya_estimate(&table(swapped)).unwrap()
        );
    }

    #[test]
    fn extreme_log_ratios_stay_finite() {
        let t = table(vec![rec(Origin::P, -2000.0, 0.0), rec(Origin::Q, 0.0, -2000.0)]);
        let b = bhattacharyya_estimate(&t).unwrap();
        assert!(b.is_finite());
        assert!((b - -1000.0).abs() < 1e-9);
    }

    #[test]
    fn missing_origin() {
        let t = table(vec![rec(Origin::P, -1.0, -1.0)]);
        assert_eq!(bhattacharyya_estimate(&t), Err(Error::MissingOrigin('Q')));
        assert_eq!(oracle_nll(&t), Err(Error::MissingOrigin('Q')));
        assert_eq!(entropy_estimate(&t), Err(Error::MissingOrigin('Q')));
        let t = table(vec![rec(Origin::Q, -1.0, -1.0)]);
        assert_eq!(nll(&t), Err(Error::MissingOrigin('P')));
    }

    #[test]
    fn infinite_log_density_rejected() {
        let err = LogProbTable::new(vec![rec(Origin::P, -1.0, -1.0), rec(Origin::Q, f64::NEG_INFINITY, -1.0)]);
        assert!(matches!(err, Err(Error::NonFiniteLogProb { index: 2, .. })));
    }

    #[test]
    fn nll_means() {
        let t = table(vec![
            rec(Origin::P, 0.0, -1.0),
            rec(Origin::P, 0.0, -2.0),
            rec(Origin::P, 0.0, -3.0),
            rec(Origin::Q, -1.0, 0.0),
            rec(Origin::Q, -1.0, 0.0),
            rec(Origin::Q, -4.0, 0.0),
        ]);
        assert_eq!(nll(&t).unwrap(), 2.0);
        assert_eq!(oracle_nll(&t).unwrap(), 2.0);
        assert_eq!(entropy_estimate(&t).unwrap(), 0.0);
    }

    #[test]
    fn constant_values() {
        let t = table(vec![rec(Origin::P, 0.0, -2.0), rec(Origin::Q, -5.0, -2.0)]);
        assert_eq!(nll(&t).unwrap(), 2.0);
        assert_eq!(oracle_nll(&t).unwrap(), 5.0);
        assert_eq!(entropy_estimate(&t).unwrap(), 2.0);
    }

    #[test]
    fn per_token_average() {
        let mut a = rec(Origin::P, 0.0, -6.0);
        a.length = Some(3);
        let mut b = rec(Origin::P, 0.0, -4.0);
        b.length = Some(2);
        let t = table(vec![a, b.clone()]);
        assert!(t.has_lengths());
        assert_eq!(nll_with(&t, Averaging::PerToken).unwrap(), 2.0);
        b.length = None;
        let t = table(vec![rec(Origin::P, 0.0, -1.0), b]);
        assert!(matches!(nll_with(&t, Averaging::PerToken), Err(Error::MissingLength { index: 1, .. })));
    }
}
