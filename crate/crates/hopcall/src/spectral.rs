//! Power spectra and spectral peak extraction.
//!
//! A segment's spectrum is a Welch average: the samples are cut into
//! half-overlapping windowed frames of `fft_size` samples, each frame's
//! one-sided power spectrum is computed, and the frames are averaged. The
//! per-frame scaling keeps Parseval's identity — the one-sided powers of a
//! frame sum to the energy of the windowed frame — so absolute levels are
//! meaningful even though peak picking later normalises them away.
//!
//! [`extract_peaks`] reduces a spectrum to the strict local maxima inside
//! an analysis band whose *relative* power (fraction of the spectrum's
//! global maximum) reaches a threshold. Comparing relative rather than
//! absolute powers makes the whole pipeline invariant to recording gain.

use hopcall_core::{FrequencyBand, Peak, PeakSet};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

/// Tapering applied to each analysis frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowKind {
    /// `0.54 - 0.46 cos(2πn/(N-1))`; the default, a good sidelobe/width
    /// trade-off for picking tonal peaks.
    #[default]
    Hamming,
    /// `0.5 (1 - cos(2πn/(N-1)))`.
    Hann,
    /// No tapering.
    Rectangular,
}

impl WindowKind {
    /// The window coefficients for a frame of `len` samples.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        if len == 1 {
            return vec![1.0];
        }
        let denom = (len - 1) as f64;
        (0..len)
            .map(|n| {
                let phase = 2.0 * std::f64::consts::PI * n as f64 / denom;
                match self {
                    WindowKind::Hamming => 0.54 - 0.46 * phase.cos(),
                    WindowKind::Hann => 0.5 * (1.0 - phase.cos()),
                    WindowKind::Rectangular => 1.0,
                }
            })
            .collect()
    }
}

/// Frame length and window for spectrum estimation. Frames always overlap
/// by half their length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralParams {
    fft_size: usize,
    window: WindowKind,
}

impl SpectralParams {
    /// Builds parameters; the frame length must be an even number of at
    /// least two samples.
    pub fn new(fft_size: usize, window: WindowKind) -> Result<Self, SpectralError> {
        if fft_size < 2 || !fft_size.is_multiple_of(2) {
            return Err(SpectralError::InvalidParams {
                reason: format!("fft size must be even and at least 2, got {fft_size}"),
            });
        }
        Ok(Self { fft_size, window })
    }

    /// Frame length in samples.
    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    /// Window applied to each frame.
    pub fn window(&self) -> WindowKind {
        self.window
    }

    /// Samples between successive frame starts (half the frame length).
    pub fn hop(&self) -> usize {
        self.fft_size / 2
    }
}

impl Default for SpectralParams {
    /// 1024-sample Hamming frames: 7.8125 Hz bins at an 8 kHz rate.
    fn default() -> Self {
        Self {
            fft_size: 1024,
            window: WindowKind::Hamming,
        }
    }
}

/// A one-sided averaged power spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    power: Vec<f64>,
    bin_width_hz: f64,
}

impl PowerSpectrum {
    /// Wraps raw bin powers; they must be finite and non-negative with a
    /// positive bin width.
    pub fn from_parts(power: Vec<f64>, bin_width_hz: f64) -> Result<Self, SpectralError> {
        if power.is_empty() {
            return Err(SpectralError::InvalidParams {
                reason: "a spectrum needs at least one bin".to_string(),
            });
        }
        if !(bin_width_hz.is_finite() && bin_width_hz > 0.0) {
            return Err(SpectralError::InvalidParams {
                reason: format!("bin width must be positive, got {bin_width_hz}"),
            });
        }
        if let Some(bad) = power.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(SpectralError::InvalidParams {
                reason: format!("bin powers must be finite and non-negative, got {bad}"),
            });
        }
        Ok(Self {
            power,
            bin_width_hz,
        })
    }

    /// Bin powers from DC up to the Nyquist bin.
    pub fn power(&self) -> &[f64] {
        &self.power
    }

    /// Frequency spacing between bins.
    pub fn bin_width_hz(&self) -> f64 {
        self.bin_width_hz
    }

    /// Centre frequency of bin `k`.
    pub fn freq_of_bin(&self, k: usize) -> f64 {
        k as f64 * self.bin_width_hz
    }
}

/// Estimates the Welch power spectrum of one segment.
///
/// Needs at least one full frame of samples; whatever does not fill a final
/// half-overlapping frame is ignored.
pub fn power_spectrum(
    samples: &[f64],
    sample_rate: u32,
    params: &SpectralParams,
) -> Result<PowerSpectrum, SpectralError> {
    let frames = frame_powers(samples, params)?;
    let bins = params.fft_size / 2 + 1;
    let mut power = vec![0.0; bins];
    for frame in &frames {
        for (acc, p) in power.iter_mut().zip(frame) {
            *acc += p;
        }
    }
    let count = frames.len() as f64;
    for p in &mut power {
        *p /= count;
    }
    Ok(PowerSpectrum {
        power,
        bin_width_hz: sample_rate as f64 / params.fft_size as f64,
    })
}

/// One-sided power spectra of each half-overlapping frame, scaled so a
/// frame's bins sum to the energy of the windowed frame.
pub(crate) fn frame_powers(
    samples: &[f64],
    params: &SpectralParams,
) -> Result<Vec<Vec<f64>>, SpectralError> {
    let fft_size = params.fft_size;
    if samples.len() < fft_size {
        return Err(SpectralError::SegmentTooShort {
            needed: fft_size,
            got: samples.len(),
        });
    }
    let hop = params.hop();
    let n_frames = (samples.len() - fft_size) / hop + 1;
    let window = params.window.coefficients(fft_size);
    let plan = FftPlanner::<f64>::new().plan_fft_forward(fft_size);

    let mut frames = Vec::with_capacity(n_frames);
    let mut buffer = vec![Complex::new(0.0, 0.0); fft_size];
    for f in 0..n_frames {
        let chunk = &samples[f * hop..f * hop + fft_size];
        for ((slot, &s), w) in buffer.iter_mut().zip(chunk).zip(&window) {
            *slot = Complex::new(s * w, 0.0);
        }
        plan.process(&mut buffer);
        let frame: Vec<f64> = (0..=fft_size / 2)
            .map(|k| {
                // Fold the redundant negative frequencies into the positive
                // bins; DC and Nyquist have no mirror.
                let one_sided = if k == 0 || k == fft_size / 2 { 1.0 } else { 2.0 };
                one_sided * buffer[k].norm_sqr() / fft_size as f64
            })
            .collect();
        frames.push(frame);
    }
    Ok(frames)
}

/// Finds the in-band spectral peaks at or above `threshold` times the
/// spectrum's global maximum.
///
/// A peak is a strict local maximum among the in-band bins; bins outside
/// the band (or the spectrum) count as minus infinity, so a band-edge bin
/// can be a peak. A plateau of equal-power bins yields one peak at its
/// lowest bin. An all-zero spectrum has no peaks.
pub fn extract_peaks(
    spectrum: &PowerSpectrum,
    band: FrequencyBand,
    threshold: f64,
) -> Result<PeakSet, SpectralError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(SpectralError::InvalidParams {
            reason: format!("threshold must lie strictly between 0 and 1, got {threshold}"),
        });
    }
    let p = spectrum.power();
    let bw = spectrum.bin_width_hz();
    let max = p.iter().cloned().fold(0.0, f64::max);

    let mut peaks = Vec::new();
    if max > 0.0 {
        // In-band bins form one contiguous index range.
        let k_lo = (band.low_hz() / bw).ceil() as usize;
        let k_hi = ((band.high_hz() / bw).floor() as usize).min(p.len() - 1);
        let mut i = k_lo;
        while i <= k_hi {
            let mut j = i;
            while j < k_hi && p[j + 1] == p[i] {
                j += 1;
            }
            let left = if i == k_lo { f64::NEG_INFINITY } else { p[i - 1] };
            let right = if j == k_hi { f64::NEG_INFINITY } else { p[j + 1] };
            let relative = p[i] / max;
            if p[i] > left && p[i] > right && relative >= threshold {
                peaks.push(Peak {
                    freq_hz: spectrum.freq_of_bin(i),
                    power: relative,
                });
            }
            i = j + 1;
        }
    }
    Ok(PeakSet::new(peaks, band, threshold)
        .expect("peaks built from in-band maxima satisfy the set invariants"))
}

/// Failures while estimating spectra.
#[derive(Debug, Error)]
pub enum SpectralError {
    /// Parameters outside their documented domain.
    #[error("invalid spectral parameters: {reason}")]
    InvalidParams {
        /// What was wrong.
        reason: String,
    },
    /// Fewer samples than one analysis frame.
    #[error("segment too short for spectral analysis: need {needed} samples, got {got}")]
    SegmentTooShort {
        /// Samples required for one frame.
        needed: usize,
        /// Samples supplied.
        got: usize,
    },
}
