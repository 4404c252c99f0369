//! Peak-to-pattern encoding.
//!
//! The encoder divides the analysis band into `n_neurons` equal-width
//! frequency bins. A segment's pattern is `+1` in every bin that contains at
//! least one extracted peak and `-1` everywhere else — a coarse spectral
//! fingerprint sized to the network rather than to the FFT.
//!
//! Bin edges follow the half-open convention `[low + k*w, low + (k+1)*w)`
//! with the single exception of the band's upper edge, which folds into the
//! last bin so that the inclusive band maps onto exactly `n_neurons` bins.

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::pattern::BipolarPattern;
use crate::peaks::{FrequencyBand, PeakSet};

/// Encoder configuration: how many bins, over which band, and the
/// normalised-power threshold the peaks must have been extracted with.
///
/// The default mirrors the two-class detector configuration: 14 neurons over
/// 0–1300 Hz with a 0.1 threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEncoderConfig")]
pub struct EncoderConfig {
    n_neurons: usize,
    band: FrequencyBand,
    threshold: f64,
}

#[derive(Deserialize)]
struct RawEncoderConfig {
    n_neurons: usize,
    band: FrequencyBand,
    threshold: f64,
}

impl TryFrom<RawEncoderConfig> for EncoderConfig {
    type Error = EncoderError;

    fn try_from(raw: RawEncoderConfig) -> Result<Self, EncoderError> {
        EncoderConfig::new(raw.n_neurons, raw.band, raw.threshold)
    }
}

impl EncoderConfig {
    /// Builds a configuration, requiring `n_neurons >= 1` and a threshold
    /// in `(0, 1)`.
    pub fn new(
        n_neurons: usize,
        band: FrequencyBand,
        threshold: f64,
    ) -> Result<Self, EncoderError> {
        if n_neurons == 0 {
            return Err(EncoderError::InvalidConfig {
                reason: String::from("n_neurons must be at least 1"),
            });
        }
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(EncoderError::InvalidConfig {
                reason: alloc::format!("threshold {threshold} outside (0, 1)"),
            });
        }
        Ok(Self {
            n_neurons,
            band,
            threshold,
        })
    }

    /// Number of neurons (= frequency bins).
    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    /// The analysis band.
    pub fn band(&self) -> FrequencyBand {
        self.band
    }

    /// The peak-extraction threshold this encoder expects.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            n_neurons: 14,
            band: FrequencyBand::new(0.0, 1300.0).expect("static band is valid"),
            threshold: 0.1,
        }
    }
}

/// Maps a frequency to its encoder bin: `floor((f - low) / width * n)`,
/// with the upper band edge clamped into the last bin.
///
/// Frequencies outside the band are refused rather than clamped — a peak
/// that escaped the band indicates a configuration mix-up upstream.
pub fn bin_of(freq_hz: f64, config: &EncoderConfig) -> Result<usize, EncoderError> {
    let band = config.band;
    if !band.contains(freq_hz) {
        return Err(EncoderError::OutOfBand { freq_hz, band });
    }
    let fraction = (freq_hz - band.low_hz()) / band.width_hz();
    // Truncation is floor here because the fraction is non-negative; the
    // min() guards the upper edge, where rounding could reach n exactly.
    let bin = (fraction * config.n_neurons as f64) as usize;
    Ok(bin.min(config.n_neurons - 1))
}

/// Encodes a peak set as a bipolar pattern: `+1` in every bin holding at
/// least one peak, `-1` elsewhere. An empty peak set encodes to all `-1`.
///
/// The peak set must have been extracted with the same band and threshold
/// as `config`; anything else is a [`EncoderError::ConfigMismatch`].
pub fn encode(peaks: &PeakSet, config: &EncoderConfig) -> Result<BipolarPattern, EncoderError> {
    if peaks.band() != config.band || peaks.threshold() != config.threshold {
        return Err(EncoderError::ConfigMismatch {
            peak_band: peaks.band(),
            peak_threshold: peaks.threshold(),
            config_band: config.band,
            config_threshold: config.threshold,
        });
    }
    let mut states = alloc::vec![-1i8; config.n_neurons];
    for peak in peaks.peaks() {
        let bin = bin_of(peak.freq_hz, config)?;
        states[bin] = 1;
    }
    Ok(BipolarPattern::from_states_unchecked(states))
}

/// Encoding failures.
#[derive(Debug, Clone, PartialEq)]
pub enum EncoderError {
    /// A frequency fell outside the configured band.
    OutOfBand {
        /// The rejected frequency.
        freq_hz: f64,
        /// The band in force.
        band: FrequencyBand,
    },
    /// The peak set was extracted under a different band or threshold.
    ConfigMismatch {
        /// Band recorded on the peak set.
        peak_band: FrequencyBand,
        /// Threshold recorded on the peak set.
        peak_threshold: f64,
        /// Band the encoder expects.
        config_band: FrequencyBand,
        /// Threshold the encoder expects.
        config_threshold: f64,
    },
    /// Rejected constructor arguments.
    InvalidConfig {
        /// Human-readable cause.
        reason: String,
    },
}

impl fmt::Display for EncoderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncoderError::OutOfBand { freq_hz, band } => {
                write!(f, "frequency {freq_hz} Hz outside encoder band {band}")
            }
            EncoderError::ConfigMismatch {
                peak_band,
                peak_threshold,
                config_band,
                config_threshold,
            } => write!(
                f,
                "peak set extracted with band {peak_band}, threshold {peak_threshold} \
                 but encoder expects band {config_band}, threshold {config_threshold}"
            ),
            EncoderError::InvalidConfig { reason } => {
                write!(f, "invalid encoder config: {reason}")
            }
        }
    }
}

impl core::error::Error for EncoderError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peaks::Peak;

    fn config(n: usize) -> EncoderConfig {
        EncoderConfig::new(n, FrequencyBand::new(0.0, 1300.0).unwrap(), 0.1).unwrap()
    }

    /// Slow reference binning: scan bins until the frequency falls inside.
    /// Walks the half-open bins one by one instead of dividing, so it cannot
    /// share a rounding bug with `bin_of`.
    fn bin_by_scan(freq_hz: f64, config: &EncoderConfig) -> usize {
        let n = config.n_neurons();
        let low = config.band().low_hz();
        let width = config.band().width_hz() / n as f64;
        for bin in 0..n {
            let upper = if bin == n - 1 {
                f64::INFINITY // top bin absorbs the inclusive upper edge
            } else {
                low + (bin as f64 + 1.0) * width
            };
            if freq_hz < upper {
                return bin;
            }
        }
        n - 1
    }

    #[test]
    fn fourteen_bin_landmarks() {
        let c = config(14);
        // 1300 / 14 = 92.857 Hz per bin.
        assert_eq!(bin_of(930.0, &c).unwrap(), 10);
        assert_eq!(bin_of(320.0, &c).unwrap(), 3);
        assert_eq!(bin_of(0.0, &c).unwrap(), 0);
        assert_eq!(bin_of(1300.0, &c).unwrap(), 13);
    }

    #[test]
    fn thirty_four_bin_landmarks() {
        let c = config(34);
        assert_eq!(bin_of(70.0, &c).unwrap(), 1);
        assert_eq!(bin_of(320.0, &c).unwrap(), 8);
        assert_eq!(bin_of(930.0, &c).unwrap(), 24);
    }

    #[test]
    fn matches_scan_reference_across_band() {
        for n in [1, 2, 5, 14, 34, 57] {
            let c = config(n);
            let mut f = 0.0;
            while f <= 1300.0 {
                assert_eq!(
                    bin_of(f, &c).unwrap(),
                    bin_by_scan(f, &c),
                    "divergence at {f} Hz with {n} bins"
                );
                f += 0.37; // irregular step to probe bin edges obliquely
            }
            assert_eq!(bin_of(1300.0, &c).unwrap(), n - 1);
        }
    }

    #[test]
    fn out_of_band_is_refused() {
        let c = config(14);
        assert!(matches!(
            bin_of(1300.1, &c),
            Err(EncoderError::OutOfBand { .. })
        ));
        assert!(matches!(
            bin_of(-0.1, &c),
            Err(EncoderError::OutOfBand { .. })
        ));
    }

    #[test]
    fn encode_sets_peak_bins_active() {
        let c = config(14);
        let peaks = PeakSet::new(
            alloc::vec![
                Peak {
                    freq_hz: 320.0,
                    power: 0.4,
                },
                Peak {
                    freq_hz: 930.0,
                    power: 1.0,
                },
            ],
            c.band(),
            c.threshold(),
        )
        .unwrap();
        let pattern = encode(&peaks, &c).unwrap();
        let expected = BipolarPattern::from_active_bins(14, &[3, 10]).unwrap();
        assert_eq!(pattern, expected);
    }

    #[test]
    fn empty_peaks_encode_to_all_negative() {
        let c = config(14);
        let peaks = PeakSet::new(alloc::vec![], c.band(), c.threshold()).unwrap();
        let pattern = encode(&peaks, &c).unwrap();
        assert!(pattern.as_slice().iter().all(|&v| v == -1));
    }

    #[test]
    fn mismatched_band_is_refused() {
        let c = config(14);
        let other_band = FrequencyBand::new(0.0, 4000.0).unwrap();
        let peaks = PeakSet::new(alloc::vec![], other_band, 0.1).unwrap();
        assert!(matches!(
            encode(&peaks, &c),
            Err(EncoderError::ConfigMismatch { .. })
        ));
    }
}
