//! Files, storage, fetching and serving around `mediascope-core`.
//!
//! This crate reads the on-disk inputs (tweet streams, tagged and labeled
//! corpora, lemma tables, gazetteer, media roster), runs the batch pipeline
//! into an append-only document store, and exposes the stored documents and
//! their indicators through a read-only HTTP API.

pub mod analyzer;
pub mod config;
pub mod fetch;
pub mod formats;
pub mod pipeline;
pub mod report;
pub mod server;
pub mod store;
pub mod synth;
pub mod training;

pub use config::PipelineConfig;
pub use pipeline::{run_pipeline, Resources, RunSummary};
pub use store::Store;
