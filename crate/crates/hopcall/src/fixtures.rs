//! Deterministic synthetic recordings for tests, benchmarks and demos.
//!
//! Real enclosure recordings cannot ship with the toolkit, so this module
//! fabricates acoustically plausible stand-ins: each call class is a fixed
//! chord of sine components whose frequencies sit exactly on FFT bin
//! centres (8 kHz rate, 1024-sample frames → 7.8125 Hz bins). Component
//! frequencies were chosen so that every class maps to a distinct,
//! reproducible set of encoder bins at both the 14-neuron and 34-neuron
//! model sizes, with enough margin that the per-event frequency jitter
//! (±3 Hz, under half a bin) never moves a component across an FFT or
//! encoder bin edge.
//!
//! A rendered corpus is completely determined by its [`CorpusSpec`]: the
//! same spec yields byte-identical audio and ground truth. Realism noise —
//! a faint out-of-band ventilation hum, per-event amplitude jitter, a low
//! uniform noise floor under each event — is scaled to stay far below the
//! 10% peak-picking threshold so it never changes an encoded pattern.

use std::path::{Path, PathBuf};

use hopcall_core::{
    noncall_complement, Bout, BoutRules, CapacityPolicy, EncoderConfig, FrequencyBand,
    HopfieldModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::audio::{write_wav, AudioBuffer, AudioError};
use crate::bout_io::{bouts_to_csv, CsvError};
use crate::classify::{store_from_audio, PipelineError};
use crate::spectral::SpectralParams;

/// Sampling rate of every synthetic recording.
pub const SAMPLE_RATE: u32 = 8000;

/// Width of one FFT bin at the default analysis settings.
const BIN_HZ: f64 = SAMPLE_RATE as f64 / 1024.0; // 7.8125

/// Out-of-band ventilation hum present in every corpus second.
const HUM_HZ: f64 = 1900.0;
const HUM_AMPLITUDE: f64 = 0.002;

/// Peak amplitude each rendered event is scaled to. Two overlapping events
/// plus hum and noise floor stay safely inside [-1, 1].
const EVENT_PEAK: f64 = 0.45;

/// Uniform noise floor added under each event.
const EVENT_NOISE: f64 = 0.01;

/// Per-event frequency jitter, strictly under half an FFT bin.
const FREQ_JITTER_HZ: f64 = 3.0;

/// One sine component of a call class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    /// Component frequency (an exact FFT bin centre).
    pub freq_hz: f64,
    /// Relative amplitude; the loudest component of a class is 1.
    pub amplitude: f64,
}

const fn comp(bin: f64, amplitude: f64) -> Component {
    Component {
        freq_hz: bin * BIN_HZ,
        amplitude,
    }
}

/// A low, pulsed contact call: components between ~170 and ~630 Hz,
/// loudest near 330 Hz.
const GRUMBLE: [Component; 7] = [
    comp(22.0, 0.55),
    comp(32.0, 0.70),
    comp(42.0, 1.00),
    comp(51.0, 0.75),
    comp(61.0, 0.60),
    comp(71.0, 0.65),
    comp(81.0, 0.50),
];

/// A sharper, higher call: components between ~360 and ~1090 Hz, loudest
/// near 940 Hz.
const ALARM: [Component; 8] = [
    comp(46.0, 0.60),
    comp(76.0, 0.70),
    comp(90.0, 0.55),
    comp(100.0, 0.65),
    comp(110.0, 0.75),
    comp(120.0, 1.00),
    comp(130.0, 0.70),
    comp(140.0, 0.55),
];

/// Broadband-ish low rumble standing in for enclosure sounds (doors,
/// scraping, visitors) that plague the low band.
const NOISE: [Component; 6] = [
    comp(9.0, 1.00),
    comp(13.0, 0.80),
    comp(27.0, 0.70),
    comp(37.0, 0.60),
    comp(56.0, 0.55),
    comp(66.0, 0.50),
];

/// The component chord of one class, if the class is known.
pub fn components(class: &str) -> Option<&'static [Component]> {
    match class {
        "grumble" => Some(&GRUMBLE),
        "alarm" => Some(&ALARM),
        "noise" => Some(&NOISE),
        _ => None,
    }
}

/// One call or noise event inside a corpus, at whole-second resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCall {
    /// Class whose components to render ("grumble", "alarm" or "noise").
    pub class: String,
    /// Start second.
    pub start_s: u32,
    /// Length in seconds.
    pub duration_s: u32,
}

/// A complete description of a synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    /// Source id written into the ground truth (also the WAV file name).
    pub source_name: String,
    /// Corpus length in seconds.
    pub duration_s: u32,
    /// The events to render.
    pub events: Vec<SyntheticCall>,
    /// Seed for jitter, phases and the noise floor.
    pub seed: u64,
}

fn event(class: &str, start_s: u32, duration_s: u32) -> SyntheticCall {
    SyntheticCall {
        class: class.to_string(),
        start_s,
        duration_s,
    }
}

/// A ten-minute corpus of alternating grumble and alarm bouts over a quiet
/// background: every event is separated widely enough that it should be
/// detected as exactly one bout of its own class.
pub fn corpus_a(seed: u64) -> CorpusSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    let mut t: u32 = 5;
    loop {
        let (class, duration) = if rng.gen_bool(0.5) {
            ("grumble", rng.gen_range(2..=6))
        } else {
            ("alarm", rng.gen_range(3..=8))
        };
        if t + duration > 590 {
            break;
        }
        events.push(event(class, t, duration));
        t += duration + rng.gen_range(7..=15);
    }
    CorpusSpec {
        source_name: "corpus_a.wav".to_string(),
        duration_s: 600,
        events,
        seed,
    }
}

/// A two-and-a-half-minute corpus where enclosure noise competes with
/// grumbles: four isolated noise bursts, three true grumble bouts, and one
/// noise burst overlapping the first second of a grumble.
///
/// Under a two-class model the noise bursts read as grumbles (their peaks
/// land in the low band) and become false-positive bouts; a model that also
/// stores the noise exemplar absorbs them instead.
pub fn corpus_b(seed: u64) -> CorpusSpec {
    CorpusSpec {
        source_name: "corpus_b.wav".to_string(),
        duration_s: 150,
        events: vec![
            event("noise", 10, 3),
            event("grumble", 20, 4),
            event("noise", 40, 2),
            event("noise", 59, 2), // runs into the grumble below
            event("grumble", 60, 3),
            event("noise", 80, 4),
            event("noise", 110, 2),
            event("grumble", 130, 4),
        ],
        seed,
    }
}

/// Renders a corpus to audio plus its ground-truth bouts (call bouts for
/// every non-noise event, and the non-call complement chunked by the
/// default rules).
pub fn render(spec: &CorpusSpec) -> Result<(AudioBuffer, Vec<Bout>), FixtureError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total = spec.duration_s as usize * SAMPLE_RATE as usize;
    let mut samples = vec![0.0; total];
    add_tone(&mut samples, HUM_HZ, HUM_AMPLITUDE, 0.0);

    for ev in &spec.events {
        let comps = components(&ev.class).ok_or_else(|| FixtureError::UnknownClass {
            class: ev.class.clone(),
        })?;
        let end_s = ev.start_s + ev.duration_s;
        if ev.duration_s == 0 || end_s > spec.duration_s {
            return Err(FixtureError::EventOutOfRange {
                class: ev.class.clone(),
                start_s: ev.start_s,
                end_s,
                corpus_s: spec.duration_s,
            });
        }
        let lo = ev.start_s as usize * SAMPLE_RATE as usize;
        let hi = end_s as usize * SAMPLE_RATE as usize;
        let scale = EVENT_PEAK / comps.iter().map(|c| c.amplitude).sum::<f64>();
        for c in comps {
            let freq = c.freq_hz + rng.gen_range(-FREQ_JITTER_HZ..=FREQ_JITTER_HZ);
            let amp = c.amplitude * scale * rng.gen_range(0.9..=1.1);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            add_tone(&mut samples[lo..hi], freq, amp, phase);
        }
        for s in &mut samples[lo..hi] {
            *s += rng.gen_range(-EVENT_NOISE..=EVENT_NOISE);
        }
    }

    let calls: Vec<(f64, f64)> = spec
        .events
        .iter()
        .filter(|ev| ev.class != "noise")
        .map(|ev| (ev.start_s as f64, (ev.start_s + ev.duration_s) as f64))
        .collect();
    let rules = BoutRules::default();
    let mut truth: Vec<Bout> = spec
        .events
        .iter()
        .filter(|ev| ev.class != "noise")
        .map(|ev| Bout {
            source_id: spec.source_name.clone(),
            class: ev.class.clone(),
            start_s: ev.start_s as f64,
            end_s: (ev.start_s + ev.duration_s) as f64,
        })
        .collect();
    truth.extend(
        noncall_complement(
            &calls,
            (0.0, spec.duration_s as f64),
            rules.noncall_min_s,
            rules.noncall_max_s,
        )
        .into_iter()
        .map(|(start_s, end_s)| Bout {
            source_id: spec.source_name.clone(),
            class: hopcall_core::CLASS_NON_CALL.to_string(),
            start_s,
            end_s,
        }),
    );
    truth.sort_by(|a, b| a.start_s.partial_cmp(&b.start_s).unwrap());

    Ok((
        AudioBuffer {
            samples,
            sample_rate: SAMPLE_RATE,
        },
        truth,
    ))
}

/// Paths produced by [`write_corpus`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFiles {
    /// The rendered 16-bit WAV.
    pub audio: PathBuf,
    /// The ground-truth bout CSV.
    pub truth: PathBuf,
}

/// Renders a corpus into `dir` as a WAV plus a ground-truth bout CSV.
pub fn write_corpus(dir: &Path, spec: &CorpusSpec) -> Result<CorpusFiles, FixtureError> {
    let (buffer, truth) = render(spec)?;
    let audio = dir.join(&spec.source_name);
    write_wav(&audio, &buffer.samples, buffer.sample_rate)?;
    let truth_name = format!(
        "{}_truth.csv",
        spec.source_name.trim_end_matches(".wav")
    );
    let truth_path = dir.join(truth_name);
    std::fs::write(&truth_path, bouts_to_csv(&truth)?).map_err(|e| FixtureError::Io {
        path: truth_path.display().to_string(),
        source: e,
    })?;
    Ok(CorpusFiles {
        audio,
        truth: truth_path,
    })
}

/// A clean two-second exemplar recording of one class: exact component
/// frequencies, no jitter, hum or noise floor.
pub fn exemplar(class: &str) -> Option<AudioBuffer> {
    let comps = components(class)?;
    let mut samples = vec![0.0; 2 * SAMPLE_RATE as usize];
    let scale = EVENT_PEAK / comps.iter().map(|c| c.amplitude).sum::<f64>();
    for c in comps {
        add_tone(&mut samples, c.freq_hz, c.amplitude * scale, 0.0);
    }
    Some(AudioBuffer {
        samples,
        sample_rate: SAMPLE_RATE,
    })
}

/// The 14-neuron grumble/alarm model built from the synthetic exemplars —
/// the configuration that mistakes low-band noise for grumbles.
pub fn two_class_model() -> Result<HopfieldModel, PipelineError> {
    model_from_exemplars(14, &["grumble", "alarm"])
}

/// The 34-neuron grumble/alarm/noise model built from the synthetic
/// exemplars.
pub fn three_class_model() -> Result<HopfieldModel, PipelineError> {
    model_from_exemplars(34, &["grumble", "alarm", "noise"])
}

fn model_from_exemplars(
    n_neurons: usize,
    classes: &[&str],
) -> Result<HopfieldModel, PipelineError> {
    let encoder = EncoderConfig::new(
        n_neurons,
        FrequencyBand::new(0.0, 1300.0).expect("static band is valid"),
        0.1,
    )
    .expect("static encoder config is valid");
    let exemplars = classes
        .iter()
        .map(|class| {
            (
                class.to_string(),
                exemplar(class).expect("classes are the built-in fixture classes"),
            )
        })
        .collect();
    store_from_audio(
        exemplars,
        encoder,
        &SpectralParams::default(),
        CapacityPolicy::Enforce,
    )
}

fn add_tone(samples: &mut [f64], freq_hz: f64, amplitude: f64, phase: f64) {
    debug_assert!(freq_hz < SAMPLE_RATE as f64 / 2.0);
    let step = std::f64::consts::TAU * freq_hz / SAMPLE_RATE as f64;
    for (k, s) in samples.iter_mut().enumerate() {
        *s += amplitude * (step * k as f64 + phase).sin();
    }
}

/// Failures while rendering or writing fixtures.
#[derive(Debug, Error)]
pub enum FixtureError {
    /// An event names a class with no component table.
    #[error("unknown fixture class '{class}'")]
    UnknownClass {
        /// The unrecognised name.
        class: String,
    },
    /// An event sticks out of the corpus.
    #[error("{class} event [{start_s}, {end_s}) s does not fit a {corpus_s} s corpus")]
    EventOutOfRange {
        /// Event class.
        class: String,
        /// Event start second.
        start_s: u32,
        /// Event end second.
        end_s: u32,
        /// Corpus length.
        corpus_s: u32,
    },
    /// Writing the WAV failed.
    #[error(transparent)]
    Audio(#[from] AudioError),
    /// Serialising the truth CSV failed.
    #[error(transparent)]
    Csv(#[from] CsvError),
    /// Writing the truth CSV failed.
    #[error("{path}: {source}")]
    Io {
        /// Offending file.
        path: String,
        /// The OS-level error.
        source: std::io::Error,
    },
}
