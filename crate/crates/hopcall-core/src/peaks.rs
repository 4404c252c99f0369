//! Spectral peak sets.
//!
//! A [`PeakSet`] is the hand-off point between spectral analysis and the
//! pattern encoder: the dominant in-band frequencies of one audio segment,
//! with powers normalised to the segment's own maximum. The set remembers
//! the band and threshold it was extracted with so the encoder can refuse
//! peaks produced under a different configuration.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// An inclusive frequency interval in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBand")]
pub struct FrequencyBand {
    low_hz: f64,
    high_hz: f64,
}

#[derive(Deserialize)]
struct RawBand {
    low_hz: f64,
    high_hz: f64,
}

impl TryFrom<RawBand> for FrequencyBand {
    type Error = PeakSetError;

    fn try_from(raw: RawBand) -> Result<Self, PeakSetError> {
        FrequencyBand::new(raw.low_hz, raw.high_hz)
    }
}

impl FrequencyBand {
    /// Builds a band, requiring `0 <= low < high` and finite edges.
    pub fn new(low_hz: f64, high_hz: f64) -> Result<Self, PeakSetError> {
        if !(low_hz.is_finite() && high_hz.is_finite() && low_hz >= 0.0 && low_hz < high_hz) {
            return Err(PeakSetError::InvalidBand { low_hz, high_hz });
        }
        Ok(Self { low_hz, high_hz })
    }

    /// Lower edge in Hz.
    pub fn low_hz(&self) -> f64 {
        self.low_hz
    }

    /// Upper edge in Hz.
    pub fn high_hz(&self) -> f64 {
        self.high_hz
    }

    /// Band width in Hz; positive by construction.
    pub fn width_hz(&self) -> f64 {
        self.high_hz - self.low_hz
    }

    /// True when `freq_hz` lies inside the band (edges included).
    pub fn contains(&self, freq_hz: f64) -> bool {
        freq_hz >= self.low_hz && freq_hz <= self.high_hz
    }
}

impl fmt::Display for FrequencyBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} Hz, {} Hz]", self.low_hz, self.high_hz)
    }
}

/// One spectral peak: a local power maximum inside the analysis band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Peak frequency in Hz.
    pub freq_hz: f64,
    /// Power relative to the spectrum's maximum, in `(0, 1]`.
    pub power: f64,
}

/// The dominant in-band peaks of one segment, sorted by ascending frequency.
///
/// An empty set is meaningful: it is what silence produces, and the
/// classifier short-circuits it to the `unid` label without consulting the
/// network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakSet {
    peaks: Vec<Peak>,
    band: FrequencyBand,
    threshold: f64,
}

impl PeakSet {
    /// Builds a peak set, enforcing its invariants:
    ///
    /// - `threshold` in `(0, 1)`;
    /// - every peak frequency inside `band`;
    /// - every power in `[threshold, 1]`;
    /// - frequencies strictly ascending (no duplicate bins).
    pub fn new(
        peaks: Vec<Peak>,
        band: FrequencyBand,
        threshold: f64,
    ) -> Result<Self, PeakSetError> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(PeakSetError::InvalidThreshold { threshold });
        }
        let mut previous: Option<f64> = None;
        for peak in &peaks {
            if !band.contains(peak.freq_hz) {
                return Err(PeakSetError::PeakOutOfBand {
                    freq_hz: peak.freq_hz,
                    band,
                });
            }
            if !(peak.power > 0.0 && peak.power <= 1.0) || peak.power < threshold {
                return Err(PeakSetError::PowerOutOfRange {
                    freq_hz: peak.freq_hz,
                    power: peak.power,
                    threshold,
                });
            }
            if let Some(prev) = previous {
                if peak.freq_hz <= prev {
                    return Err(PeakSetError::NotAscending {
                        freq_hz: peak.freq_hz,
                    });
                }
            }
            previous = Some(peak.freq_hz);
        }
        Ok(Self {
            peaks,
            band,
            threshold,
        })
    }

    /// The peaks in ascending frequency order.
    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    /// Number of peaks.
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    /// True when no in-band bin cleared the threshold.
    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    /// The band the peaks were restricted to.
    pub fn band(&self) -> FrequencyBand {
        self.band
    }

    /// The normalised-power threshold the peaks were extracted with.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// The frequency of the highest-power peak, if any.
    pub fn dominant(&self) -> Option<&Peak> {
        self.peaks
            .iter()
            .reduce(|best, p| if p.power > best.power { p } else { best })
    }
}

/// Contract violations when assembling a [`PeakSet`] or [`FrequencyBand`].
#[derive(Debug, Clone, PartialEq)]
pub enum PeakSetError {
    /// Band edges were not `0 <= low < high` (or not finite).
    InvalidBand {
        /// Offending lower edge.
        low_hz: f64,
        /// Offending upper edge.
        high_hz: f64,
    },
    /// Threshold outside `(0, 1)`.
    InvalidThreshold {
        /// The rejected threshold.
        threshold: f64,
    },
    /// A peak lay outside the band it claims to come from.
    PeakOutOfBand {
        /// Offending peak frequency.
        freq_hz: f64,
        /// The band that should contain it.
        band: FrequencyBand,
    },
    /// A peak power left `[threshold, 1]`.
    PowerOutOfRange {
        /// Peak frequency for context.
        freq_hz: f64,
        /// The rejected power.
        power: f64,
        /// Threshold in force.
        threshold: f64,
    },
    /// Frequencies were not strictly ascending.
    NotAscending {
        /// First frequency at which order broke.
        freq_hz: f64,
    },
}

impl fmt::Display for PeakSetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeakSetError::InvalidBand { low_hz, high_hz } => {
                write!(f, "invalid band: low {low_hz} Hz, high {high_hz} Hz")
            }
            PeakSetError::InvalidThreshold { threshold } => {
                write!(f, "peak threshold {threshold} outside (0, 1)")
            }
            PeakSetError::PeakOutOfBand { freq_hz, band } => {
                write!(f, "peak at {freq_hz} Hz outside band {band}")
            }
            PeakSetError::PowerOutOfRange {
                freq_hz,
                power,
                threshold,
            } => write!(
                f,
                "peak at {freq_hz} Hz has power {power} outside [{threshold}, 1]"
            ),
            PeakSetError::NotAscending { freq_hz } => {
                write!(f, "peak frequencies not strictly ascending at {freq_hz} Hz")
            }
        }
    }
}

impl core::error::Error for PeakSetError {}
