//! Metric reports, direction normalization and cross-metric correlation.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum;

/// Which way a metric improves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lower,
    Higher,
}

/// Map from a raw metric value to a lower-is-better value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Already lower-is-better.
    Identity,
    /// Similarity in `[0, 1]`: use `1 - value`.
    OneMinus,
    /// Use `-value`.
    Negate,
}

impl Rule {
    pub fn apply(self, value: f64) -> f64 {
        match self {
            Rule::Identity => value,
            Rule::OneMinus => 1.0 - value,
            Rule::Negate => -value,
        }
    }

    /// Direction of the raw (unnormalized) metric.
    pub fn direction(self) -> Direction {
        match self {
            Rule::Identity => Direction::Lower,
            Rule::OneMinus | Rule::Negate => Direction::Higher,
        }
    }
}

/// Name-prefix table of direction rules; the longest matching prefix wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionRegistry {
    prefixes: BTreeMap<String, Rule>,
}

impl Default for DirectionRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl DirectionRegistry {
    pub fn empty() -> Self {
        Self {
            prefixes: BTreeMap::new(),
        }
    }

    /// Rules for every metric this crate produces.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        for (prefix, rule) in [
            ("ms_jaccard", Rule::OneMinus),
            ("bleu", Rule::OneMinus),
            ("self_bleu", Rule::Identity),
            ("fbd", Rule::Identity),
            ("nll", Rule::Identity),
            ("oracle_nll", Rule::Identity),
            ("bhattacharyya", Rule::Identity),
            ("entropy", Rule::Negate),
        ] {
            r.insert(prefix, rule);
        }
        r
    }

    /// Adds or replaces the rule for names starting with `prefix`.
    pub fn insert(&mut self, prefix: impl Into<String>, rule: Rule) {
        self.prefixes.insert(prefix.into(), rule);
    }

    pub fn rule(&self, name: &str) -> Result<Rule> {
        self.prefixes
            .iter()
            .filter(|(prefix, _)| name.starts_with(prefix.as_str()))
            .max_by_key(|(prefix, _)| prefix.len())
            .map(|(_, rule)| *rule)
            .ok_or_else(|| Error::UnknownMetric(name.to_string()))
    }

    pub fn normalize(&self, name: &str, value: f64) -> Result<f64> {
        Ok(self.rule(name)?.apply(value))
    }
}

/// Lower-is-better form of `value` using the built-in rules.
pub fn normalize_direction(name: &str, value: f64) -> Result<f64> {
    DirectionRegistry::builtin().normalize(name, value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub direction: Direction,
}

/// A run parameter echoed into a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<bool> for ConfigValue {
    fn from(v: bool) -> Self {
        ConfigValue::Bool(v)
    }
}

impl From<usize> for ConfigValue {
    fn from(v: usize) -> Self {
        ConfigValue::Int(v as i64)
    }
}

impl From<f64> for ConfigValue {
    fn from(v: f64) -> Self {
        ConfigValue::Float(v)
    }
}

impl From<&str> for ConfigValue {
    fn from(v: &str) -> Self {
        ConfigValue::Text(v.into())
    }
}

impl From<String> for ConfigValue {
    fn from(v: String) -> Self {
        ConfigValue::Text(v)
    }
}

/// Named metric values for one run, plus the configuration that produced
/// them.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricReport {
    pub run_id: String,
    pub dataset: String,
    pub model: String,
    pub metrics: BTreeMap<String, MetricValue>,
    pub config: BTreeMap<String, ConfigValue>,
}

impl MetricReport {
    pub fn new(run_id: impl Into<String>, dataset: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            run_id: run_id.into(),
            dataset: dataset.into(),
            model: model.into(),
            ..Self::default()
        }
    }

    /// Records a metric, taking its direction from `registry`.
    pub fn insert_metric(&mut self, name: &str, value: f64, registry: &DirectionRegistry) -> Result<()> {
        let direction = registry.rule(name)?.direction();
        if !value.is_finite() {
            return Err(Error::NonFiniteMetric(name.to_string()));
        }
        if self.metrics.contains_key(name) {
            return Err(Error::DuplicateMetric(name.to_string()));
        }
        self.metrics.insert(name.to_string(), MetricValue { value, direction });
        Ok(())
    }

    pub fn set_config(&mut self, key: &str, value: impl Into<ConfigValue>) {
        self.config.insert(key.to_string(), value.into());
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).map(|m| m.value)
    }

    /// Checks that every value is finite.
    pub fn validate(&self) -> Result<()> {
        match self.metrics.iter().find(|(_, m)| !m.value.is_finite()) {
            Some((name, _)) => Err(Error::NonFiniteMetric(name.clone())),
            None => Ok(()),
        }
    }
}

/// Pearson correlations between metrics across a set of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub metric_names: Vec<String>,
    /// Row-major, `values[i][j]` correlates metric `i` with metric `j`.
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.metric_names.iter().position(|n| n == a)?;
        let j = self.metric_names.iter().position(|n| n == b)?;
        Some(self.values[i][j])
    }
}

/// Sample Pearson correlation, clamped to `[-1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    pearson_named(x, y, "x", "y")
}

fn pearson_named(x: &[f64], y: &[f64], x_name: &str, y_name: &str) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::TooFewObservations(x.len()));
    }
    let mx = sum::mean(x).expect("nonempty");
    let my = sum::mean(y).expect("nonempty");
    let dx: Vec<f64> = x.iter().map(|v| v - mx).collect();
    let dy: Vec<f64> = y.iter().map(|v| v - my).collect();
    let sxx = sum::pairwise_sum(&dx.iter().map(|d| d * d).collect::<Vec<_>>());
    let syy = sum::pairwise_sum(&dy.iter().map(|d| d * d).collect::<Vec<_>>());
    if sxx == 0.0 {
        return Err(Error::ZeroVariance(x_name.to_string()));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance(y_name.to_string()));
    }
    let sxy = sum::pairwise_sum(&dx.iter().zip(&dy).map(|(a, b)| a * b).collect::<Vec<_>>());
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Pairwise Pearson correlation of direction-normalized metric values across
/// `reports`.
pub fn correlation_matrix(
    reports: &[MetricReport],
    metric_names: &[String],
    registry: &DirectionRegistry,
) -> Result<CorrelationMatrix> {
    if reports.len() < 2 {
        return Err(Error::TooFewObservations(reports.len()));
    }
    let columns = metric_names
        .iter()
        .map(|name| {
            let rule = registry.rule(name)?;
            reports
                .iter()
                .map(|r| {
                    r.value(name).map(|v| rule.apply(v)).ok_or_else(|| Error::MissingMetric {
                        run_id: r.run_id.clone(),
                        metric: name.clone(),
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let k = metric_names.len();
    let mut values = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = pearson_named(&columns[i], &columns[j], &metric_names[i], &metric_names[j])?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    // A lone column still needs a variance check.
    if k == 1 {
        pearson_named(&columns[0], &columns[0], &metric_names[0], &metric_names[0])?;
    }
    Ok(CorrelationMatrix {
        metric_names: metric_names.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_directions() {
        assert!((normalize_direction("ms_jaccard4", 0.6).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(normalize_direction("fbd", 1.7).unwrap(), 1.7);
        assert_eq!(normalize_direction("entropy", 2.5).unwrap(), -2.5);
        assert_eq!(normalize_direction("bleu4", 0.25).unwrap(), 0.75);
        assert_eq!(normalize_direction("self_bleu4", 0.25).unwrap(), 0.25);
        assert_eq!(normalize_direction("self_bleu4_reference", 0.25).unwrap(), 0.25);
        assert_eq!(normalize_direction("oracle_nll", 3.0).unwrap(), 3.0);
        assert_eq!(normalize_direction("bhattacharyya", 0.1).unwrap(), 0.1);
        assert_eq!(
            normalize_direction("rouge", 0.1),
            Err(Error::UnknownMetric("rouge".into()))
        );
    }

    #[test]
    fn one_minus_is_an_involution() {
        let r = Rule::OneMinus;
        assert_eq!(r.apply(r.apply(0.25)), 0.25);
    }

    #[test]
    fn registry_override() {
        let mut reg = DirectionRegistry::builtin();
        reg.insert("rouge", Rule::OneMinus);
        assert_eq!(reg.normalize("rouge_l", 0.25).unwrap(), 0.75);
        reg.insert("fbd", Rule::Negate);
        assert_eq!(reg.normalize("fbd", 2.0).unwrap(), -2.0);
    }

    #[test]
    fn pearson_basics() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(pearson(&x, &x).unwrap(), 1.0);
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 7.0).collect();
        assert_eq!(pearson(&x, &y).unwrap(), -1.0);
        assert_eq!(pearson(&x, &[1.0; 4]), Err(Error::ZeroVariance("y".into())));
        assert_eq!(pearson(&x, &[1.0; 3]), Err(Error::LengthMismatch(4, 3)));
        assert_eq!(pearson(&[1.0], &[2.0]), Err(Error::TooFewObservations(1)));
    }

    #[test]
    fn pearson_textbook_value() {
        // mx = 2.75, my = 3.25; Sxy = 10.25, Sxx = 8.75, Syy = 14.75
        let r = pearson(&[1.0, 2.0, 3.0, 5.0], &[2.0, 1.0, 4.0, 6.0]).unwrap();
        assert!((r - 10.25 / libm::sqrt(8.75 * 14.75)).abs() < 1e-15);
    }

    #[test]
    fn report_rejects_bad_metrics() {
        let reg = DirectionRegistry::builtin();
        let mut r = MetricReport::new("run", "toy", "mle");
        r.insert_metric("fbd", 1.0, &reg).unwrap();
        assert_eq!(r.insert_metric("fbd", 2.0, &reg), Err(Error::DuplicateMetric("fbd".into())));
        assert_eq!(r.insert_metric("nll", f64::NAN, &reg), Err(Error::NonFiniteMetric("nll".into())));
        assert!(r.insert_metric("mystery", 1.0, &reg).is_err());
        assert_eq!(r.metrics["fbd"].direction, Direction::Lower);
        r.insert_metric("bleu4", 0.5, &reg).unwrap();
        assert_eq!(r.metrics["bleu4"].direction, Direction::Higher);
    }

    fn reports(cols: &[(&str, &[f64])]) -> Vec<MetricReport> {
        let reg = DirectionRegistry::builtin();
        (0..cols[0].1.len())
            .map(|i| {
                let mut r = MetricReport::new(alloc::format!("r{i}"), "d", "m");
                for (name, values) in cols {
                    r.insert_metric(name, values[i], &reg).unwrap();
                }
                r
            })
            .collect()
    }

    #[test]
    fn correlation_of_twins() {
        let a = [0.1, 0.4, 0.3, 0.9];
        let twin: Vec<f64> = a.iter().map(|v| 1.0 - v).collect();
        let rs = reports(&[("nll", &a), ("fbd", &twin), ("bleu4", &a)]);
        let names: Vec<String> = ["nll", "fbd", "bleu4"].iter().map(|s| s.to_string()).collect();
        let m = correlation_matrix(&rs, &names, &DirectionRegistry::builtin()).unwrap();
        assert!((m.get("nll", "fbd").unwrap() + 1.0).abs() < 1e-12);
        // bleu4 is normalized to 1 - value, matching fbd
        assert!((m.get("fbd", "bleu4").unwrap() - 1.0).abs() < 1e-12);
        for i in 0..3 {
            assert_eq!(m.values[i][i], 1.0);
        }
    }

    #[test]
    fn correlation_errors() {
        let rs = reports(&[("nll", &[1.0, 2.0]), ("fbd", &[3.0, 3.0])]);
        let names: Vec<String> = ["nll", "fbd"].iter().map(|s| s.to_string()).collect();
        let reg = DirectionRegistry::builtin();
        assert_eq!(
            correlation_matrix(&rs, &names, &reg),
            Err(Error::ZeroVariance("fbd".into()))
        );
        let missing = vec!["nll".to_string(), "entropy".to_string()];
        assert!(matches!(
            correlation_matrix(&rs, &missing, &reg),
            Err(Error::MissingMetric { .. })
        ));
        assert_eq!(
            correlation_matrix(&rs[..1], &names, &reg),
            Err(Error::TooFewObservations(1))
        );
    }
}
