//! Quality and diversity metrics for unconditional text generation.
//!
//! The crate compares a generated corpus against a reference corpus (or,
//! in oracle mode, against an explicit density) with three families of
//! measures:
//!
//! - n-gram based: [`ms_jaccard`], sentence-averaged [`bleu`] and Self-BLEU;
//! - feature based: the Fréchet distance between Gaussians fitted to
//!   sentence embeddings ([`feature::fbd`]);
//! - density based: Monte-Carlo Bhattacharyya distance, NLL, Oracle-NLL and
//!   entropy over per-sample log-densities ([`density`]).
//!
//! [`report`] turns metric values into direction-aware reports and computes
//! Pearson correlations across runs.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! evaluation and the command-line tool live in the `genmetrics` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bleu;
pub mod corpus;
pub mod density;
mod error;
pub mod feature;
pub mod ms_jaccard;
pub mod report;
pub mod sum;

pub use nalgebra;

pub use bleu::{BleuConfig, ReferenceIndex, SelfBleuIndex, Smoothing};
pub use corpus::{Corpus, NGramProfile, PreprocessConfig};
pub use density::{LogProbRecord, LogProbTable, Origin};
pub use error::{Error, Result};
pub use feature::{FeatureMatrix, GaussianStats};
pub use ms_jaccard::MsJaccardResult;
pub use report::{CorrelationMatrix, Direction, DirectionRegistry, MetricReport};
