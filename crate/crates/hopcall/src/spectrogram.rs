//! Spectrogram rendering for visual inspection of recordings.
//!
//! Not part of the detection pipeline — the classifier works on per-segment
//! power spectra — but invaluable when sanity-checking recordings and the
//! synthetic fixtures: one glance shows whether the expected harmonic
//! stacks are present and where they sit in the band.

use std::path::Path;

use image::{Rgb, RgbImage};
use thiserror::Error;

use crate::audio::AudioBuffer;
use crate::spectral::{frame_powers, SpectralError, SpectralParams};

/// Dynamic range of the rendering: power below `peak − 80 dB` is clipped
/// to the floor.
pub const DYNAMIC_RANGE_DB: f64 = 80.0;

/// A time–frequency grid of power values in decibels.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    /// `values_db[frame][bin]`, every value in `[floor_db, peak_db]`.
    values_db: Vec<Vec<f64>>,
    bin_width_hz: f64,
    frame_step_s: f64,
    peak_db: f64,
}

impl Spectrogram {
    /// dB values, outer index time (frame), inner index frequency (bin).
    pub fn values_db(&self) -> &[Vec<f64>] {
        &self.values_db
    }

    /// Frequency spacing between bins.
    pub fn bin_width_hz(&self) -> f64 {
        self.bin_width_hz
    }

    /// Time between successive frames.
    pub fn frame_step_s(&self) -> f64 {
        self.frame_step_s
    }

    /// Loudest value in the grid.
    pub fn peak_db(&self) -> f64 {
        self.peak_db
    }

    /// Quietest representable value (`peak_db − 80`).
    pub fn floor_db(&self) -> f64 {
        self.peak_db - DYNAMIC_RANGE_DB
    }

    /// Renders the grid as an image: time left to right, frequency with the
    /// lowest bin at the bottom, power mapped from blue (floor) to red
    /// (peak).
    pub fn to_image(&self) -> RgbImage {
        let width = self.values_db.len() as u32;
        let height = self.values_db[0].len() as u32;
        let floor = self.floor_db();
        RgbImage::from_fn(width, height, |x, y| {
            let bin = (height - 1 - y) as usize;
            let db = self.values_db[x as usize][bin];
            heat_colour((db - floor) / DYNAMIC_RANGE_DB)
        })
    }
}

/// Computes a spectrogram with Welch-style half-overlapping frames.
///
/// Values are absolute decibels (`10·log10(power)`) clipped at 80 dB below
/// the loudest cell; a silent recording renders as a uniform floor.
pub fn spectrogram_matrix(
    buffer: &AudioBuffer,
    params: &SpectralParams,
) -> Result<Spectrogram, SpectrogramError> {
    let frames = frame_powers(&buffer.samples, params)?;
    let peak = frames
        .iter()
        .flat_map(|f| f.iter().copied())
        .fold(0.0_f64, f64::max);
    let peak_db = if peak > 0.0 { 10.0 * peak.log10() } else { 0.0 };
    let floor_db = peak_db - DYNAMIC_RANGE_DB;
    let values_db = frames
        .into_iter()
        .map(|frame| {
            frame
                .into_iter()
                .map(|p| {
                    if p > 0.0 {
                        (10.0 * p.log10()).max(floor_db)
                    } else {
                        floor_db
                    }
                })
                .collect()
        })
        .collect();
    Ok(Spectrogram {
        values_db,
        bin_width_hz: buffer.sample_rate as f64 / params.fft_size() as f64,
        frame_step_s: params.hop() as f64 / buffer.sample_rate as f64,
        peak_db,
    })
}

/// Renders `buffer` and writes the image as a PNG.
pub fn write_spectrogram_png(
    buffer: &AudioBuffer,
    params: &SpectralParams,
    path: &Path,
) -> Result<(), SpectrogramError> {
    let image = spectrogram_matrix(buffer, params)?.to_image();
    image.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

/// Blue→red heat map for `t` in `[0, 1]`: cold cells keep a visible navy
/// tint so the frequency grid does not vanish into pure black.
fn heat_colour(t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    Rgb([lerp(8.0, 245.0), lerp(12.0, 64.0), lerp(96.0, 32.0)])
}

/// Failures while computing or writing a spectrogram.
#[derive(Debug, Error)]
pub enum SpectrogramError {
    /// The underlying frame analysis failed.
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    /// Encoding or writing the PNG failed.
    #[error("could not write spectrogram image: {0}")]
    Image(#[from] image::ImageError),
}
