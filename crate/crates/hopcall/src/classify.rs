//! The second-by-second classification pipeline.
//!
//! A long recording is cut into fixed-length segments; each segment runs
//! through the same stages the model was trained with:
//!
//! 1. Welch power spectrum ([`crate::spectral::power_spectrum`]),
//! 2. in-band peak extraction at the model's threshold,
//! 3. bipolar encoding onto the model's frequency bins,
//! 4. asynchronous convergence in the Hopfield network.
//!
//! A retrieved exemplar gives the segment that exemplar's label; spurious
//! or non-convergent endpoints give [`LABEL_UNID`]. A segment with *no*
//! in-band peaks short-circuits to [`LABEL_UNID`] before touching the
//! network: the all-inactive pattern is an ordinary point in state space
//! and would happily fall into a nearby exemplar's basin, which would turn
//! every quiet second into a detection.

use hopcall_core::{
    encode, CapacityPolicy, ClassificationDetail, EncoderConfig, HopfieldModel, Outcome,
    SegmentClassification, LABEL_UNID,
};
use thiserror::Error;

use crate::audio::AudioBuffer;
use crate::spectral::{extract_peaks, power_spectrum, SpectralError, SpectralParams};

/// Everything configurable about classifying a recording.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyParams {
    /// Segment length in seconds.
    pub segment_len_s: f64,
    /// Frame length and window for the per-segment spectrum.
    pub spectral: SpectralParams,
    /// Convergence budget per segment.
    pub max_passes: usize,
}

impl Default for ClassifyParams {
    /// One-second segments, default spectral analysis, 100 passes.
    fn default() -> Self {
        Self {
            segment_len_s: 1.0,
            spectral: SpectralParams::default(),
            max_passes: 100,
        }
    }
}

/// One fixed-length slice of a recording.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<'a> {
    /// Position in the recording, starting at 0.
    pub index: usize,
    /// Start time in seconds.
    pub start_time_s: f64,
    /// The segment's samples.
    pub samples: &'a [f64],
}

/// Cuts a recording into equal segments of `segment_len_s` seconds.
///
/// A trailing stretch shorter than one segment is dropped. Start times are
/// spaced by the *realised* segment length (`round(len * rate) / rate`), so
/// they stay uniform even when the requested length is not a whole number
/// of samples.
pub fn segment(
    buffer: &AudioBuffer,
    segment_len_s: f64,
) -> Result<Vec<Segment<'_>>, PipelineError> {
    if !(segment_len_s.is_finite() && segment_len_s > 0.0) {
        return Err(PipelineError::InvalidSegmentLength { segment_len_s });
    }
    let samples_per_segment = (segment_len_s * buffer.sample_rate as f64).round() as usize;
    if samples_per_segment == 0 {
        return Err(PipelineError::InvalidSegmentLength { segment_len_s });
    }
    let realised_len_s = samples_per_segment as f64 / buffer.sample_rate as f64;
    let count = buffer.samples.len() / samples_per_segment;
    Ok((0..count)
        .map(|k| Segment {
            index: k,
            start_time_s: k as f64 * realised_len_s,
            samples: &buffer.samples[k * samples_per_segment..(k + 1) * samples_per_segment],
        })
        .collect())
}

/// Classifies one segment's samples, returning the label and what the
/// network did to produce it.
pub fn classify_segment(
    model: &HopfieldModel,
    samples: &[f64],
    sample_rate: u32,
    params: &ClassifyParams,
) -> Result<(String, ClassificationDetail), PipelineError> {
    check_band(model.encoder_config(), sample_rate)?;
    let spectrum = power_spectrum(samples, sample_rate, &params.spectral)?;
    let config = model.encoder_config();
    let peaks = extract_peaks(&spectrum, config.band(), config.threshold())?;
    if peaks.is_empty() {
        return Ok((LABEL_UNID.to_string(), ClassificationDetail::EmptyPeaks));
    }
    let pattern = encode(&peaks, config)?;
    let result = model.converge(&pattern, params.max_passes)?;
    let label = match &result.outcome {
        Outcome::Retrieved(label) => label.clone(),
        Outcome::Spurious | Outcome::NonConvergent => LABEL_UNID.to_string(),
    };
    Ok((
        label,
        ClassificationDetail::Network {
            outcome: result.outcome,
            passes_used: result.passes_used,
            final_energy: result.final_energy,
        },
    ))
}

/// Classifies every segment of a recording.
///
/// `source_id` is recorded verbatim on each row; the library never invents
/// identifiers from paths.
pub fn classify_file(
    model: &HopfieldModel,
    buffer: &AudioBuffer,
    source_id: &str,
    params: &ClassifyParams,
) -> Result<Vec<SegmentClassification>, PipelineError> {
    let segments = segment(buffer, params.segment_len_s)?;
    let mut rows = Vec::with_capacity(segments.len());
    for seg in segments {
        let (label, detail) =
            classify_segment(model, seg.samples, buffer.sample_rate, params)?;
        rows.push(SegmentClassification {
            source_id: source_id.to_string(),
            segment_index: seg.index,
            start_time_s: seg.start_time_s,
            label,
            detail: Some(detail),
        });
    }
    Ok(rows)
}

/// Builds a model by encoding one exemplar recording per class.
///
/// Each exemplar is analysed whole (its full duration feeds one Welch
/// average), peak-picked with the encoder's own band and threshold, and
/// stored under its label. An exemplar with no in-band peaks is refused:
/// storing an all-inactive pattern would teach the model to retrieve it
/// from silence.
pub fn store_from_audio(
    exemplars: Vec<(String, AudioBuffer)>,
    encoder: EncoderConfig,
    spectral: &SpectralParams,
    policy: CapacityPolicy,
) -> Result<HopfieldModel, PipelineError> {
    let mut patterns = Vec::with_capacity(exemplars.len());
    for (label, buffer) in exemplars {
        check_band(&encoder, buffer.sample_rate)?;
        let spectrum = power_spectrum(&buffer.samples, buffer.sample_rate, spectral)?;
        let peaks = extract_peaks(&spectrum, encoder.band(), encoder.threshold())?;
        if peaks.is_empty() {
            return Err(PipelineError::SilentExemplar { label });
        }
        let pattern = encode(&peaks, &encoder)?;
        patterns.push((pattern, label));
    }
    Ok(HopfieldModel::store_with_policy(patterns, encoder, policy)?)
}

fn check_band(config: &EncoderConfig, sample_rate: u32) -> Result<(), PipelineError> {
    let nyquist_hz = sample_rate as f64 / 2.0;
    if config.band().high_hz() > nyquist_hz {
        return Err(PipelineError::BandExceedsNyquist {
            high_hz: config.band().high_hz(),
            sample_rate,
            nyquist_hz,
        });
    }
    Ok(())
}

/// Failures anywhere along the classification pipeline.
#[derive(Debug, Error)]
pub enum PipelineError {
    /// Spectrum estimation failed.
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    /// Peak-to-pattern encoding failed.
    #[error(transparent)]
    Encoder(#[from] hopcall_core::encoder::EncoderError),
    /// The network refused the model or probe.
    #[error(transparent)]
    Network(#[from] hopcall_core::hopfield::HopfieldError),
    /// The analysis band asks for frequencies the recording cannot contain.
    #[error(
        "the analysis band reaches {high_hz} Hz but a {sample_rate} Hz recording \
         only resolves frequencies up to {nyquist_hz} Hz"
    )]
    BandExceedsNyquist {
        /// Upper band edge.
        high_hz: f64,
        /// Recording sample rate.
        sample_rate: u32,
        /// Half the sample rate.
        nyquist_hz: f64,
    },
    /// A non-positive or non-finite segment length.
    #[error("segment length must be positive and finite, got {segment_len_s} s")]
    InvalidSegmentLength {
        /// The offending value.
        segment_len_s: f64,
    },
    /// An exemplar produced no in-band peaks.
    #[error(
        "exemplar '{label}' has no spectral peaks inside the analysis band; \
         it cannot be stored"
    )]
    SilentExemplar {
        /// Label of the offending exemplar.
        label: String,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::synthesize_tone;
    use crate::fixtures;
    use hopcall_core::FrequencyBand;

    fn buffer(samples: Vec<f64>) -> AudioBuffer {
        AudioBuffer {
            samples,
            sample_rate: 8000,
        }
    }

    #[test]
    fn segmentation_drops_the_partial_tail() {
        let b = buffer(vec![0.0; 28_000]); // 3.5 s at 8 kHz
        let segs = segment(&b, 1.0).unwrap();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[0].samples.len(), 8000);
        let starts: Vec<f64> = segs.iter().map(|s| s.start_time_s).collect();
        assert_eq!(starts, vec![0.0, 1.0, 2.0]);

        let segs = segment(&b, 0.5).unwrap();
        assert_eq!(segs.len(), 7);
        assert_eq!(segs[6].start_time_s, 3.0);
    }

    #[test]
    fn degenerate_segment_lengths_are_refused() {
        let b = buffer(vec![0.0; 8000]);
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY, 1e-9] {
            assert!(matches!(
                segment(&b, bad),
                Err(PipelineError::InvalidSegmentLength { .. })
            ));
        }
    }

    #[test]
    fn exemplar_seconds_classify_as_their_own_class() {
        let model = fixtures::two_class_model().unwrap();
        let params = ClassifyParams::default();
        for class in ["grumble", "alarm"] {
            let call = fixtures::exemplar(class).unwrap();
            let (label, detail) =
                classify_segment(&model, &call.samples[..8000], 8000, &params).unwrap();
            assert_eq!(label, class);
            assert!(matches!(
                detail,
                ClassificationDetail::Network {
                    outcome: Outcome::Retrieved(_),
                    ..
                }
            ));
        }
    }

    #[test]
    fn out_of_band_hum_short_circuits_to_unid() {
        let model = fixtures::two_class_model().unwrap();
        let hum = buffer(synthesize_tone(1900.0, 0.002, 1.0, 8000).unwrap());
        let (label, detail) =
            classify_segment(&model, &hum.samples, 8000, &ClassifyParams::default()).unwrap();
        assert_eq!(label, LABEL_UNID);
        assert!(matches!(detail, ClassificationDetail::EmptyPeaks));
    }

    #[test]
    fn band_beyond_nyquist_is_refused() {
        let model = fixtures::two_class_model().unwrap();
        let b = AudioBuffer {
            samples: vec![0.0; 2000],
            sample_rate: 2000, // Nyquist 1000 Hz < band high 1300 Hz
        };
        assert!(matches!(
            classify_segment(&model, &b.samples, b.sample_rate, &ClassifyParams::default()),
            Err(PipelineError::BandExceedsNyquist { .. })
        ));
    }

    #[test]
    fn silent_exemplars_are_refused() {
        let hum = buffer(synthesize_tone(1900.0, 0.002, 2.0, 8000).unwrap());
        let encoder = EncoderConfig::new(14, FrequencyBand::new(0.0, 1300.0).unwrap(), 0.1)
            .unwrap();
        let err = store_from_audio(
            vec![("hum".to_string(), hum)],
            encoder,
            &SpectralParams::default(),
            CapacityPolicy::Enforce,
        )
        .unwrap_err();
        assert!(matches!(err, PipelineError::SilentExemplar { label } if label == "hum"));
    }

    #[test]
    fn classify_file_attaches_the_given_source_id() {
        let model = fixtures::two_class_model().unwrap();
        let call = fixtures::exemplar("grumble").unwrap();
        let rows =
            classify_file(&model, &call, "pen4_morning.wav", &ClassifyParams::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.source_id == "pen4_morning.wav"));
        assert!(rows.iter().all(|r| r.label == "grumble"));
        assert_eq!(rows[1].segment_index, 1);
        assert_eq!(rows[1].start_time_s, 1.0);
    }
}
