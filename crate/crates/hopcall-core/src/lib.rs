//! Associative-memory primitives for bioacoustic call monitoring.
//!
//! The crate implements the algorithmic core of a lightweight call detector:
//! spectral peak fingerprints are encoded as bipolar patterns, stored in a
//! discrete Hopfield network by Hebbian learning, and retrieved by
//! asynchronous convergence. Second-by-second retrieval labels are then
//! aggregated into call *bouts* and scored against ground-truth annotations.
//!
//! Everything here is pure computation over in-memory data. Audio decoding,
//! Welch spectra, file formats and the command-line pipeline live in the
//! companion `hopcall` crate; keeping them out makes this core usable in
//! `no_std` environments (an allocator is required).
//!
//! # Module map
//!
//! - [`pattern`] — validated `{-1,+1}` state vectors.
//! - [`peaks`] — spectral peak sets, the encoder's input contract.
//! - [`encoder`] — frequency-band binning of peaks into patterns.
//! - [`hopfield`] — Hebbian storage, energy, asynchronous convergence.
//! - [`classification`] — one record per classified audio segment.
//! - [`bout`] — aggregation of consecutive detections into call bouts.
//! - [`metrics`] — greedy bout matching and precision/recall reporting.
//! - [`oracle`] — exhaustive small-network dynamics tables for testing.

#![cfg_attr(not(test), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod bout;
pub mod classification;
pub mod encoder;
pub mod hopfield;
pub mod metrics;
pub mod oracle;
pub mod pattern;
pub mod peaks;

pub use bout::{extract_bouts, noncall_complement, Bout, BoutRules, CallRule};
pub use classification::{ClassificationDetail, SegmentClassification, CLASS_NON_CALL, LABEL_UNID};
pub use encoder::{bin_of, encode, EncoderConfig};
pub use hopfield::{
    CapacityPolicy, CapacityStatus, ConvergenceResult, ConvergenceTrace, HopfieldModel, Outcome,
    StoredPattern,
};
pub use metrics::{match_bouts, report, ClassificationReport, ConfusionCounts};
pub use pattern::BipolarPattern;
pub use peaks::{FrequencyBand, Peak, PeakSet};
