//! Per-segment classification records.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::hopfield::Outcome;

/// Label given to segments nothing could be retrieved for: silence, spurious
/// fixed points, and non-convergent probes.
pub const LABEL_UNID: &str = "unid";

/// Class name of the bouts covering everything outside detected calls.
pub const CLASS_NON_CALL: &str = "non-call";

/// The verdict for one audio segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentClassification {
    /// The recording the segment came from.
    pub source_id: String,
    /// Zero-based position of the segment within its recording.
    pub segment_index: usize,
    /// Segment start in seconds from the start of the recording.
    pub start_time_s: f64,
    /// Assigned label: a stored class or [`LABEL_UNID`], always lowercase.
    pub label: String,
    /// How the label came about; absent when reloaded from a results file.
    pub detail: Option<ClassificationDetail>,
}

/// Why a segment received its label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClassificationDetail {
    /// No in-band peak cleared the threshold; the network was never
    /// consulted.
    EmptyPeaks,
    /// The network ran; summary of the convergence.
    Network {
        /// Outcome of the run.
        outcome: Outcome,
        /// Passes used by the run.
        passes_used: usize,
        /// Energy of the final state.
        final_energy: f64,
    },
}
