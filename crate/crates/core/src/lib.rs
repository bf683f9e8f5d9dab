//! Measuring and removing systematic offensive stereotyping (SOS) bias in
//! masked language models, plus downstream fairness and correlation analysis.
//!
//! The pipeline: [`lexicon`] holds identity terms and profane/non-profane
//! word pairs, [`dataset`] expands them into sentence pairs, [`scoring`]
//! computes the SOS fraction with pseudo-log-likelihood, [`debias`] removes
//! a profanity subspace from model hidden states, [`fairness`] computes group
//! gaps for classifier predictions and [`analysis`] correlates the results.

pub mod analysis;
pub mod dataset;
pub mod debias;
pub mod fairness;
pub mod lexicon;
pub mod provenance;
pub mod scoring;
