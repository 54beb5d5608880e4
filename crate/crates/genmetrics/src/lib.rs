//! File formats, parallel evaluation and the `genmetrics` command-line tool
//! built on [`genmetrics_core`].
//!
//! - [`corpus_io`]: one-sentence-per-line corpora;
//! - [`features`]: the `FBDFEAT1` binary feature-matrix format;
//! - [`logprobs`]: TSV tables of per-sample log-densities;
//! - [`report_io`]: JSON and CSV reports;
//! - [`parallel`]: thread-pool versions of the BLEU and MS-Jaccard drivers
//!   whose results do not depend on the number of threads;
//! - [`cli`]: argument parsing and subcommand dispatch.

pub mod cli;
pub mod corpus_io;
mod error;
pub mod features;
pub mod logprobs;
pub mod parallel;
pub mod report_io;

pub use error::{Error, Location, Result};
pub use genmetrics_core as core;
