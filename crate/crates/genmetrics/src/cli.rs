//! `genmetrics` command line.
//!
//! Exit status: 0 on success, 1 when an input file or metric fails (the
//! diagnostic names the file and line or row), 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use genmetrics_core::bleu::Smoothing;
use genmetrics_core::density::{self, Averaging};
use genmetrics_core::feature::{fbd_with, SqrtOptions};
use genmetrics_core::report::{correlation_matrix, DirectionRegistry, MetricReport, Rule};
use genmetrics_core::PreprocessConfig;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::{corpus_io, features, logprobs, parallel, report_io};

#[derive(Debug, Parser)]
#[command(name = "genmetrics", version, about = "Quality and diversity metrics for generated text")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// MS-Jaccard, BLEU and Self-BLEU between a generated and a reference corpus.
    Ngram(NgramArgs),
    /// Fréchet distance between two feature matrices.
    Fbd(FbdArgs),
    /// Bhattacharyya, NLL, Oracle-NLL and entropy from a log-prob table.
    Density(DensityArgs),
    /// Length filtering and rare-word replacement for a corpus file.
    Preprocess(PreprocessArgs),
    /// Pearson correlation of direction-normalized metrics across reports.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file [default: stdout].
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; 0 uses every available CPU.
    #[arg(long, env = "GENMETRICS_THREADS", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run identifier [default: <subcommand>-<unix time>].
    #[arg(long)]
    pub run_id: Option<String>,
    #[arg(long, default_value = "")]
    pub dataset: String,
    #[arg(long, default_value = "")]
    pub model: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NgramArgs {
    /// Generated corpus, one tokenized sentence per line.
    #[arg(long)]
    pub generated: PathBuf,
    /// Reference (test) corpus.
    #[arg(long)]
    pub reference: PathBuf,
    /// Largest n-gram order; metrics are reported for every order 1..=max-n.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u16).range(1..))]
    pub max_n: u16,
    /// BLEU smoothing: `none` or `epsilon:<value>`.
    #[arg(long, default_value = "none", value_parser = parse_smoothing)]
    pub smoothing: Smoothing,
    /// Skip Self-BLEU of the reference corpus.
    #[arg(long)]
    pub skip_reference_self_bleu: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct FbdArgs {
    #[arg(long)]
    pub features_a: PathBuf,
    #[arg(long)]
    pub features_b: PathBuf,
    /// Fixed diagonal jitter for near-singular covariances [default: 1e-6 * mean variance].
    #[arg(long)]
    pub jitter: Option<f64>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityMetric {
    Bhattacharyya,
    Nll,
    OracleNll,
    Entropy,
}

impl DensityMetric {
    fn name(self) -> &'static str {
        match self {
            DensityMetric::Bhattacharyya => "bhattacharyya",
            DensityMetric::Nll => "nll",
            DensityMetric::OracleNll => "oracle_nll",
            DensityMetric::Entropy => "entropy",
        }
    }
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// TSV with header `sample_id origin logp logq [length]`.
    #[arg(long)]
    pub logprobs: PathBuf,
    /// Average NLL-style metrics per token (needs the length column).
    #[arg(long)]
    pub per_token: bool,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "bhattacharyya,nll,oracle-nll,entropy"
    )]
    pub metrics: Vec<DensityMetric>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write the filtered corpus.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub min_len: usize,
    /// [default: no limit]
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Replace tokens seen fewer times than this; 0 disables.
    #[arg(long, default_value_t = 0)]
    pub min_word_freq: usize,
    /// Drop sentences with more UNK tokens than this [default: no limit].
    #[arg(long)]
    pub max_unks: Option<usize>,
    #[arg(long, default_value = "<unk>")]
    pub unk_token: String,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Report JSON files, one per run.
    #[arg(required = true, num_args = 2..)]
    pub reports: Vec<PathBuf>,
    /// Metrics to correlate [default: those present in every report].
    #[arg(long, value_delimiter = ',')]
    pub metrics: Option<Vec<String>>,
    /// Extra direction rule `prefix=identity|one_minus|negate`; repeatable.
    #[arg(long = "direction", value_parser = parse_direction)]
    pub directions: Vec<(String, Rule)>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_smoothing(s: &str) -> std::result::Result<Smoothing, String> {
    if s == "none" {
        return Ok(Smoothing::None);
    }
    let value = s
        .strip_prefix("epsilon:")
        .ok_or_else(|| format!("expected `none` or `epsilon:<value>`, got `{s}`"))?;
    match value.parse::<f64>() {
        Ok(eps) if eps > 0.0 && eps <= 1.0 => Ok(Smoothing::Epsilon(eps)),
        _ => Err(format!("epsilon must be a number in (0, 1], got `{value}`")),
    }
}

fn parse_direction(s: &str) -> std::result::Result<(String, Rule), String> {
    let (prefix, rule) = s.split_once('=').ok_or("expected `prefix=rule`")?;
    let rule = match rule {
        "identity" => Rule::Identity,
        "one_minus" => Rule::OneMinus,
        "negate" => Rule::Negate,
        other => return Err(format!("unknown rule `{other}`")),
    };
    Ok((prefix.to_string(), rule))
}

fn smoothing_label(s: Smoothing) -> String {
    match s {
        Smoothing::None => "none".into(),
        Smoothing::Epsilon(e) => format!("epsilon:{e}"),
    }
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<genmetrics_core::Error> for Failure {
    fn from(e: genmetrics_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(command: Command) -> std::result::Result<(), Failure> {
    match command {
        Command::Ngram(args) => ngram(args),
        Command::Fbd(args) => fbd(args),
        Command::Density(args) => density_cmd(args),
        Command::Preprocess(args) => preprocess(args),
        Command::Correlate(args) => correlate(args),
    }
}

fn resolve_threads(threads: usize) -> usize {
    if threads > 0 {
        threads
    } else {
        std::thread::available_parallelism().map_or(1, usize::from)
    }
}

fn new_report(kind: &str, run: &RunArgs, threads: usize) -> MetricReport {
    let run_id = run.run_id.clone().unwrap_or_else(|| {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        format!("{kind}-{secs}")
    });
    let mut report = MetricReport::new(run_id, run.dataset.clone(), run.model.clone());
    report.set_config("command", kind);
    report.set_config("threads", threads);
    report.set_config("format", format!("{:?}", run.out.format).to_lowercase());
    report.set_config("tool_version", env!("CARGO_PKG_VERSION"));
    report
}

fn emit(out: &OutputArgs, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Output(format!("stdout: {e}"))),
    }
}

fn emit_report(out: &OutputArgs, report: &MetricReport) -> Result<()> {
    let text = match out.format {
        Format::Json => report_io::report_to_json(report)?,
        Format::Csv => report_io::reports_to_csv(std::slice::from_ref(report))?,
    };
    emit(out, &text)
}

fn path_label(p: &Path) -> String {
    p.display().to_string()
}

fn ngram(args: NgramArgs) -> std::result::Result<(), Failure> {
    let threads = resolve_threads(args.run.out.threads);
    let pool = parallel::pool(threads)?;
    let generated = corpus_io::load_corpus(&args.generated)?;
    let reference = corpus_io::load_corpus(&args.reference)?;
    let max_n = usize::from(args.max_n);
    if generated.len() < 2 {
        return Err(Error::Data {
            path: args.generated.clone(),
            source: genmetrics_core::Error::TooFewSentences(generated.len()),
        }
        .into());
    }

    let jaccard = parallel::ms_jaccard(&generated, &reference, max_n, &pool)?;
    let bleu = parallel::bleu_by_order(&generated, &reference, max_n, args.smoothing, &pool)?;
    let self_bleu = parallel::self_bleu_by_order(&generated, max_n, args.smoothing, &pool)?;
    let reference_self_bleu = if args.skip_reference_self_bleu {
        None
    } else if reference.len() < 2 {
        return Err(Error::Data {
            path: args.reference.clone(),
            source: genmetrics_core::Error::TooFewSentences(reference.len()),
        }
        .into());
    } else {
        Some(parallel::self_bleu_by_order(&reference, max_n, args.smoothing, &pool)?)
    };

    let reg = DirectionRegistry::builtin();
    let mut report = new_report("ngram", &args.run, threads);
    for k in 1..=max_n {
        let ms = jaccard.aggregate_up_to(k).expect("k <= max_n");
        report.insert_metric(&format!("ms_jaccard{k}"), ms, &reg)?;
        report.insert_metric(&format!("bleu{k}"), bleu[k - 1], &reg)?;
        report.insert_metric(&format!("self_bleu{k}"), self_bleu[k - 1], &reg)?;
        if let Some(r) = &reference_self_bleu {
            report.insert_metric(&format!("self_bleu{k}_reference"), r[k - 1], &reg)?;
        }
    }
    report.set_config("generated", path_label(&args.generated));
    report.set_config("reference", path_label(&args.reference));
    report.set_config("generated_sentences", generated.len());
    report.set_config("reference_sentences", reference.len());
    report.set_config("max_n", max_n);
    report.set_config("smoothing", smoothing_label(args.smoothing));
    report.set_config("bleu_weights", "uniform");
    report.set_config("reference_self_bleu", !args.skip_reference_self_bleu);
    emit_report(&args.run.out, &report)?;
    Ok(())
}

fn read_with_digest(path: &Path) -> Result<(Vec<u8>, String)> {
    let bytes = fs::read(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let digest = hex::encode(Sha256::digest(&bytes));
    Ok((bytes, digest))
}

fn fbd(args: FbdArgs) -> std::result::Result<(), Failure> {
    if let Some(j) = args.jitter {
        if !(j.is_finite() && j >= 0.0) {
            return Err(Failure::Usage(format!("--jitter must be a nonnegative number, got {j}")));
        }
    }
    let threads = resolve_threads(args.run.out.threads);
    let (bytes_a, digest_a) = read_with_digest(&args.features_a)?;
    let (bytes_b, digest_b) = read_with_digest(&args.features_b)?;
    let a = features::decode_features(&bytes_a, &args.features_a)?;
    let b = features::decode_features(&bytes_b, &args.features_b)?;
    for (m, path) in [(&a, &args.features_a), (&b, &args.features_b)] {
        if m.rows() < 2 {
            return Err(Error::Data {
                path: path.clone(),
                source: genmetrics_core::Error::TooFewRows { needed: 2, got: m.rows() },
            }
            .into());
        }
    }
    let opts = SqrtOptions { jitter: args.jitter };
    let distance = fbd_with(&a, &b, opts)?;

    let mut report = new_report("fbd", &args.run, threads);
    report.insert_metric("fbd", distance, &DirectionRegistry::builtin())?;
    report.set_config("features_a", path_label(&args.features_a));
    report.set_config("features_b", path_label(&args.features_b));
    report.set_config("features_a_sha256", digest_a);
    report.set_config("features_b_sha256", digest_b);
    report.set_config("rows_a", a.rows());
    report.set_config("rows_b", b.rows());
    report.set_config("dim", a.dim());
    match args.jitter {
        Some(j) => report.set_config("jitter", j),
        None => report.set_config("jitter", "auto"),
    }
    emit_report(&args.run.out, &report)?;
    Ok(())
}

fn density_cmd(args: DensityArgs) -> std::result::Result<(), Failure> {
    let threads = resolve_threads(args.run.out.threads);
    let (_, digest) = read_with_digest(&args.logprobs)?;
    let table = logprobs::read_logprobs(&args.logprobs)?;
    let mode = if args.per_token {
        Averaging::PerToken
    } else {
        Averaging::PerSentence
    };
    let data_err = |source| Error::Data {
        path: args.logprobs.clone(),
        source,
    };

    let reg = DirectionRegistry::builtin();
    let mut report = new_report("density", &args.run, threads);
    let mut metrics = args.metrics.clone();
    metrics.sort_by_key(|m| m.name());
    metrics.dedup();
    for metric in &metrics {
        let value = match metric {
            DensityMetric::Bhattacharyya => density::bhattacharyya_estimate(&table),
            DensityMetric::Nll => density::nll_with(&table, mode),
            DensityMetric::OracleNll => density::oracle_nll_with(&table, mode),
            DensityMetric::Entropy => density::entropy_estimate_with(&table, mode),
        }
        .map_err(data_err)?;
        report.insert_metric(metric.name(), value, &reg)?;
    }
    report.set_config("logprobs", path_label(&args.logprobs));
    report.set_config("logprobs_sha256", digest);
    report.set_config("num_p", table.num_p());
    report.set_config("num_q", table.num_q());
    report.set_config("averaging", if args.per_token { "per_token" } else { "per_sentence" });
    emit_report(&args.run.out, &report)?;
    Ok(())
}

fn preprocess(args: PreprocessArgs) -> std::result::Result<(), Failure> {
    let cfg = PreprocessConfig {
        min_len: args.min_len,
        max_len: args.max_len.unwrap_or(usize::MAX),
        min_word_freq: args.min_word_freq,
        max_unks: args.max_unks.unwrap_or(usize::MAX),
        unk_token: args.unk_token.clone(),
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let corpus = corpus_io::load_corpus(&args.input)?;
    let out = corpus.preprocess(&cfg).map_err(|source| Error::Data {
        path: args.input.clone(),
        source,
    })?;
    corpus_io::write_corpus(&args.output, &out)?;
    eprintln!(
        "kept {} of {} sentences, vocabulary {} -> {}",
        out.len(),
        corpus.len(),
        corpus.vocab().len(),
        out.vocab().len()
    );
    Ok(())
}

fn correlate(args: CorrelateArgs) -> std::result::Result<(), Failure> {
    let reports = args
        .reports
        .iter()
        .map(report_io::read_report)
        .collect::<Result<Vec<_>>>()?;
    let mut registry = DirectionRegistry::builtin();
    for (prefix, rule) in &args.directions {
        registry.insert(prefix.clone(), *rule);
    }
    let names = match &args.metrics {
        Some(names) => names.clone(),
        None => reports[0]
            .metrics
            .keys()
            .filter(|name| reports.iter().all(|r| r.metrics.contains_key(*name)))
            .cloned()
            .collect(),
    };
    if names.is_empty() {
        return Err(Failure::Usage("no metric is shared by every report".into()));
    }
    let matrix = correlation_matrix(&reports, &names, &registry)?;
    let text = match args.out.format {
        Format::Json => report_io::correlation_to_json(&matrix)?,
        Format::Csv => report_io::correlation_to_csv(&matrix)?,
    };
    emit(&args.out, &text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothing_values() {
        assert_eq!(parse_smoothing("none"), Ok(Smoothing::None));
        assert_eq!(parse_smoothing("epsilon:0.1"), Ok(Smoothing::Epsilon(0.1)));
        assert!(parse_smoothing("epsilon:0").is_err());
        assert!(parse_smoothing("floor").is_err());
    }

    #[test]
    fn direction_values() {
        assert_eq!(parse_direction("rouge=one_minus"), Ok(("rouge".into(), Rule::OneMinus)));
        assert!(parse_direction("rouge").is_err());
        assert!(parse_direction("rouge=up").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
