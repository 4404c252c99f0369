//! Call detection for long bioacoustic recordings.
//!
//! This crate wraps the associative-memory core from `hopcall-core` with
//! everything a field workflow needs: WAV decoding, Welch power spectra,
//! per-second classification, bout aggregation, CSV/JSON file formats,
//! spectrogram rendering, synthetic test corpora and the `hopcall`
//! command-line tool.
//!
//! The pipeline, end to end:
//!
//! 1. [`audio`] decodes recordings to mono `f64` samples.
//! 2. [`spectral`] turns each one-second segment into an averaged power
//!    spectrum and extracts its in-band peaks.
//! 3. [`classify`] encodes the peaks as a bipolar pattern and lets the
//!    stored Hopfield network settle; the retrieved exemplar's label (or
//!    `unid`) becomes the segment's classification.
//! 4. `hopcall-core`'s bout rules aggregate consecutive detections into
//!    call bouts, and its metrics score them against annotations.
//!
//! [`fixtures`] builds deterministic synthetic corpora whose ground truth
//! is known by construction — the same generators back this crate's test
//! suite and are handy for demos.

#![warn(missing_docs)]

pub mod audio;
pub mod bench;
pub mod bout_io;
pub mod classify;
pub mod cli;
pub mod fixtures;
pub mod model_file;
pub mod report_fmt;
pub mod spectral;
pub mod spectrogram;
