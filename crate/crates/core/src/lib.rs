//! Graph-based word sense induction over non-negative embedding bases.
//!
//! The pipeline trains distributional inclusion vector embeddings (DIVE), whose
//! coordinates behave like topics, clusters the coordinates relevant to a query
//! word in a target-dependent ego network, turns each cluster into a dense sense
//! vector and optionally refines the senses with an EM relabel/retrain loop.
//!
//! Module map:
//!
//! * [`corpus`]: tokenization, vocabulary and sliding-window co-occurrence counts.
//! * [`dive`]: non-negative embedding trainer and its exact objective.
//! * [`sgns`]: skip-gram with negative sampling.
//! * [`egograph`]: relevant bases, target-dependent features and the ego network.
//! * [`speccluster`]: normalized-Laplacian spectral clustering.
//! * [`senses`]: topic and sense embeddings.
//! * [`refine`]: EM sense refinement.
//! * [`eval`]: context-relevance precision and pseudoword purity.
//! * [`synth`]: deterministic corpus generators used by tests, demos and the CLI.

pub mod corpus;
pub mod dive;
pub mod egograph;
pub mod embfile;
mod error;
pub mod eval;
mod hogwild;
pub mod linalg;
pub mod math;
pub mod refine;
pub mod senses;
pub mod sgns;
pub mod speccluster;
pub mod stopwords;
pub mod synth;

pub use error::{Error, Result};
