//! Behavioral-predisposition (BPD) extraction and BPD-conditioned activity
//! recognition for annotated wrist accelerometer recordings.
//!
//! The pipeline, end to end:
//!
//! 1. [`dataset`] — recording schema, CSV load/store, and a synthetic
//!    generator with known ground-truth behavioral regimes.
//! 2. [`features`] — sliding-window statistical / spatial / spectral
//!    features over the 3-axis acceleration stream.
//! 3. [`bpd`] — per-segment annotation histograms, clustered by k-means or
//!    partitioned by time of day; each cluster is one BPD.
//! 4. [`classifiers`] — majority / Gaussian naive Bayes / linear SVM, one
//!    classifier trained per BPD.
//! 5. [`experiments`] — the factorial grid (strategy x k x segment length x
//!    classifier x subject x repetition), F1 scoring, and the matched-point
//!    comparison between the two BPD strategies.
//!
//! Everything is deterministic given the relevant seed; see [`seeding`] for
//! how per-cell seeds are derived.

pub mod bpd;
pub mod classifiers;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod features;
pub mod seeding;

pub use error::{Error, Result};
