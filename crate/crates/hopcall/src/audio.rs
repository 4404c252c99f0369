//! WAV reading, writing and tone synthesis.
//!
//! Recordings are normalised on load to mono `f64` samples in `[-1, 1]`:
//! integer PCM of 8/16/24/32 bits is scaled by its nominal full-scale value,
//! 32-bit float is clamped, and multi-channel audio is averaged down to one
//! channel. Everything downstream of this module works on [`AudioBuffer`]
//! and never touches the container format again.

use std::io::ErrorKind;
use std::path::Path;

use thiserror::Error;

/// Decoded mono audio.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    /// Samples in `[-1, 1]`.
    pub samples: Vec<f64>,
    /// Sampling rate in Hz.
    pub sample_rate: u32,
}

impl AudioBuffer {
    /// Recording length in seconds.
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Loads a WAV file as mono `f64` samples.
pub fn load_wav(path: &Path) -> Result<AudioBuffer, AudioError> {
    let shown = path.display().to_string();
    let mut reader = hound::WavReader::open(path).map_err(|e| map_hound(&shown, e))?;
    let spec = reader.spec();
    if spec.channels == 0 {
        return Err(AudioError::CorruptHeader {
            path: shown,
            detail: "zero channels".to_string(),
        });
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let full_scale = (1i64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 / full_scale))
                .collect::<Result<_, _>>()
                .map_err(|e| map_hound(&shown, e))?
        }
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| (v as f64).clamp(-1.0, 1.0)))
            .collect::<Result<_, _>>()
            .map_err(|e| map_hound(&shown, e))?,
        (format, bits) => {
            return Err(AudioError::UnsupportedFormat {
                path: shown,
                detail: format!("{bits}-bit {format:?} PCM"),
            });
        }
    };

    let channels = spec.channels as usize;
    let frames = interleaved.len() / channels; // ignore a trailing partial frame
    if frames == 0 {
        return Err(AudioError::EmptyAudio { path: shown });
    }
    let samples = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(channels)
            .map(|frame| frame.iter().sum::<f64>() / channels as f64)
            .collect()
    };
    Ok(AudioBuffer {
        samples,
        sample_rate: spec.sample_rate,
    })
}

/// Writes mono samples as 16-bit PCM, clamping to `[-1, 1]`.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate: u32) -> Result<(), AudioError> {
    let shown = path.display().to_string();
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| map_hound(&shown, e))?;
    for &s in samples {
        // Same 32768 full-scale the reader divides by, so a round trip
        // costs at most half a quantisation step (+1.0 clamps to 32767).
        let q = (s.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(q).map_err(|e| map_hound(&shown, e))?;
    }
    writer.finalize().map_err(|e| map_hound(&shown, e))
}

/// Synthesizes `amplitude * sin(2π * freq_hz * t)` for `duration_s` seconds.
///
/// The frequency must sit strictly below the Nyquist limit; a tone at or
/// above `sample_rate / 2` would alias to a different frequency, so it is
/// refused rather than silently folded.
pub fn synthesize_tone(
    freq_hz: f64,
    amplitude: f64,
    duration_s: f64,
    sample_rate: u32,
) -> Result<Vec<f64>, AudioError> {
    let nyquist_hz = sample_rate as f64 / 2.0;
    if !freq_hz.is_finite() || freq_hz < 0.0 || freq_hz >= nyquist_hz {
        return Err(AudioError::AliasedFrequency {
            freq_hz,
            sample_rate,
            nyquist_hz,
        });
    }
    let n = (duration_s * sample_rate as f64).round().max(0.0) as usize;
    let step = 2.0 * std::f64::consts::PI * freq_hz / sample_rate as f64;
    Ok((0..n).map(|k| amplitude * (step * k as f64).sin()).collect())
}

fn map_hound(path: &str, error: hound::Error) -> AudioError {
    let path = path.to_string();
    match error {
        // hound reports truncated streams as custom io errors (kind
        // `Other`, "Failed to read enough bytes.") rather than
        // `UnexpectedEof`; both mean the file ends mid-stream. Real OS
        // failures keep their specific kinds and fall through to `Io`.
        hound::Error::IoError(e)
            if matches!(e.kind(), ErrorKind::UnexpectedEof | ErrorKind::Other) =>
        {
            AudioError::CorruptHeader {
                path,
                detail: format!("file ends mid-stream ({e})"),
            }
        }
        hound::Error::IoError(e) => AudioError::Io { path, source: e },
        hound::Error::FormatError(detail) => AudioError::CorruptHeader {
            path,
            detail: detail.to_string(),
        },
        hound::Error::TooWide | hound::Error::UnfinishedSample => AudioError::CorruptHeader {
            path,
            detail: error.to_string(),
        },
        hound::Error::Unsupported | hound::Error::InvalidSampleFormat => {
            AudioError::UnsupportedFormat {
                path,
                detail: error.to_string(),
            }
        }
    }
}

/// Failures while reading, writing or synthesizing audio.
#[derive(Debug, Error)]
pub enum AudioError {
    /// The file is not parseable as a WAV stream.
    #[error("{path}: cannot read WAV data: {detail}")]
    CorruptHeader {
        /// Offending file.
        path: String,
        /// Parser diagnosis.
        detail: String,
    },
    /// The WAV encoding is valid but not one this reader handles.
    #[error("{path}: unsupported WAV encoding ({detail})")]
    UnsupportedFormat {
        /// Offending file.
        path: String,
        /// Encoding description.
        detail: String,
    },
    /// A structurally valid file with zero samples.
    #[error("{path}: the file contains no audio samples")]
    EmptyAudio {
        /// Offending file.
        path: String,
    },
    /// An underlying filesystem error.
    #[error("{path}: {source}")]
    Io {
        /// Offending file.
        path: String,
        /// The OS-level error.
        #[source]
        source: std::io::Error,
    },
    /// A synthesis frequency at or beyond the Nyquist limit.
    #[error(
        "cannot synthesize {freq_hz} Hz at a {sample_rate} Hz sampling rate; \
         frequencies must stay below the {nyquist_hz} Hz Nyquist limit"
    )]
    AliasedFrequency {
        /// Requested tone frequency.
        freq_hz: f64,
        /// Sampling rate of the buffer.
        sample_rate: u32,
        /// Half the sampling rate.
        nyquist_hz: f64,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_wav(name: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        (dir, path)
    }

    #[test]
    fn sixteen_bit_round_trip_preserves_samples() {
        let (_dir, path) = temp_wav("tone.wav");
        let tone = synthesize_tone(440.0, 0.5, 0.25, 8000).unwrap();
        write_wav(&path, &tone, 8000).unwrap();
        let buffer = load_wav(&path).unwrap();
        assert_eq!(buffer.sample_rate, 8000);
        assert_eq!(buffer.samples.len(), 2000);
        assert!((buffer.duration_s() - 0.25).abs() < 1e-12);
        for (a, b) in tone.iter().zip(&buffer.samples) {
            // 16-bit quantisation error is at most half a step.
            assert!((a - b).abs() <= 0.5 / 32768.0 + 1e-12);
        }
    }

    #[test]
    fn stereo_mixes_down_to_the_channel_mean() {
        let (_dir, path) = temp_wav("stereo.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(&path, spec).unwrap();
        for (left, right) in [(16384i16, 0i16), (-32768, 32767), (1000, 3000)] {
            writer.write_sample(left).unwrap();
            writer.write_sample(right).unwrap();
        }
        writer.finalize().unwrap();

        let buffer = load_wav(&path).unwrap();
        assert_eq!(buffer.samples.len(), 3);
        assert!((buffer.samples[0] - 0.25).abs() < 1e-4);
        assert!(buffer.samples[1].abs() < 1e-4);
        assert!((buffer.samples[2] - 2000.0 / 32768.0).abs() < 1e-9);
    }

    #[test]
    fn eight_bit_and_float_files_load_scaled() {
        let (_dir, path) = temp_wav("eight.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 8,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(&path, spec).unwrap();
        for v in [0i8, 64, -128, 127] {
            writer.write_sample(v).unwrap();
        }
        writer.finalize().unwrap();
        let buffer = load_wav(&path).unwrap();
        assert_eq!(buffer.samples, vec![0.0, 0.5, -1.0, 127.0 / 128.0]);

        let (_dir2, path2) = temp_wav("float.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut writer = hound::WavWriter::create(&path2, spec).unwrap();
        for v in [0.25f32, -2.0, 1.5] {
            writer.write_sample(v).unwrap();
        }
        writer.finalize().unwrap();
        let buffer = load_wav(&path2).unwrap();
        // Out-of-range float samples clamp instead of wrapping.
        assert_eq!(buffer.samples, vec![0.25, -1.0, 1.0]);
    }

    #[test]
    fn empty_and_corrupt_files_are_diagnosed() {
        let (_dir, path) = temp_wav("empty.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        hound::WavWriter::create(&path, spec).unwrap().finalize().unwrap();
        assert!(matches!(
            load_wav(&path),
            Err(AudioError::EmptyAudio { .. })
        ));

        let (_dir2, path2) = temp_wav("garbage.wav");
        std::fs::write(&path2, b"this is not audio").unwrap();
        assert!(matches!(
            load_wav(&path2),
            Err(AudioError::CorruptHeader { .. })
        ));

        let (_dir3, path3) = temp_wav("missing.wav");
        assert!(matches!(load_wav(&path3), Err(AudioError::Io { .. })));
    }

    #[test]
    fn truncated_files_are_corrupt_not_io_errors() {
        let (_dir, path) = temp_wav("cut.wav");
        let tone = synthesize_tone(440.0, 0.5, 1.0, 8000).unwrap();
        write_wav(&path, &tone, 8000).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..20]).unwrap();
        assert!(matches!(
            load_wav(&path),
            Err(AudioError::CorruptHeader { .. })
        ));
    }

    #[test]
    fn tones_have_the_requested_shape() {
        let tone = synthesize_tone(1000.0, 0.8, 0.5, 8000).unwrap();
        assert_eq!(tone.len(), 4000);
        assert_eq!(tone[0], 0.0);
        let expected = 0.8 * (2.0 * std::f64::consts::PI * 1000.0 * 3.0 / 8000.0).sin();
        assert!((tone[3] - expected).abs() < 1e-12);
        assert!(tone.iter().all(|s| s.abs() <= 0.8 + 1e-12));
    }

    #[test]
    fn nyquist_and_faster_tones_are_refused() {
        assert!(matches!(
            synthesize_tone(4000.0, 0.5, 1.0, 8000),
            Err(AudioError::AliasedFrequency { .. })
        ));
        assert!(matches!(
            synthesize_tone(5000.0, 0.5, 1.0, 8000),
            Err(AudioError::AliasedFrequency { .. })
        ));
        assert!(synthesize_tone(3999.0, 0.5, 1.0, 8000).is_ok());
    }
}
