//! Throughput measurements for the two hot paths: storing a model and
//! classifying a recording second by second.
//!
//! The pipeline has to keep up with field recorders that produce hours of
//! audio per day, so the CLI exposes these numbers directly (`hopcall
//! bench`) rather than leaving them to ad-hoc profiling.

use std::time::Instant;

use serde::Serialize;

use crate::audio::AudioBuffer;
use crate::classify::{classify_file, ClassifyParams, PipelineError};
use hopcall_core::{CapacityPolicy, HopfieldModel};

/// Timing results from [`run_bench`].
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    /// Best wall-clock time to build the weight matrix from the model's
    /// stored patterns (best of ten runs).
    pub store_ms: f64,
    /// Segments classified per second of wall-clock time, single-threaded.
    pub segments_per_s: f64,
    /// How many segments the classification pass covered.
    pub segments: usize,
}

/// Times model storage and single-threaded classification of `buffer`.
///
/// Storage is re-run from the model's own stored patterns, so the figure
/// reflects exactly the matrix the caller is using. Classification runs
/// the full per-segment pipeline (spectrum, peaks, encoding, convergence).
pub fn run_bench(
    model: &HopfieldModel,
    buffer: &AudioBuffer,
    params: &ClassifyParams,
) -> Result<BenchReport, PipelineError> {
    let exemplars: Vec<_> = model
        .stored()
        .iter()
        .map(|s| (s.pattern.clone(), s.label.clone()))
        .collect();

    let mut store_ms = f64::INFINITY;
    for _ in 0..10 {
        let input = exemplars.clone();
        let start = Instant::now();
        let rebuilt = HopfieldModel::store_with_policy(
            input,
            *model.encoder_config(),
            CapacityPolicy::Override,
        )
        .expect("re-storing a valid model's own patterns cannot fail");
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        assert_eq!(rebuilt.n_neurons(), model.n_neurons());
        store_ms = store_ms.min(elapsed);
    }

    let start = Instant::now();
    let rows = classify_file(model, buffer, "bench", params)?;
    let elapsed = start.elapsed().as_secs_f64();
    let segments = rows.len();
    let segments_per_s = if elapsed > 0.0 {
        segments as f64 / elapsed
    } else {
        f64::INFINITY
    };

    Ok(BenchReport {
        store_ms,
        segments_per_s,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn bench_reports_sane_numbers() {
        let model = fixtures::two_class_model().unwrap();
        let buffer = fixtures::exemplar("grumble").unwrap();
        let report = run_bench(&model, &buffer, &ClassifyParams::default()).unwrap();
        assert_eq!(report.segments, 2);
        assert!(report.store_ms.is_finite() && report.store_ms >= 0.0);
        assert!(report.segments_per_s > 0.0);
    }

    #[test]
    fn bench_report_serialises_to_json() {
        let report = BenchReport {
            store_ms: 0.25,
            segments_per_s: 1234.5,
            segments: 600,
        };
        let json = serde_json::to_string(&report).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["segments"], 600);
        assert!((value["store_ms"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    }
}
