//! Aggregation of per-segment labels into call bouts.
//!
//! A *bout* is the behavioural unit of interest: a maximal stretch of
//! calling, not a single classified second. The aggregation applies three
//! rules, each configurable per call class through [`BoutRules`]:
//!
//! 1. **Persistence** — a run of consecutive identically-labelled segments
//!    only becomes a call bout once it reaches `min_consecutive` records
//!    (two for grumbles, three for alarms by default). Shorter runs are
//!    treated as classifier noise.
//! 2. **Separation** — qualifying runs of the same class count as one bout
//!    unless separated by at least `separation_s` seconds of other labels
//!    (one second for grumbles, five for alarms by default). Merged spans
//!    include the gap.
//! 3. **Complement** — whatever is left outside call bouts becomes
//!    `non-call` bouts, split left-to-right into chunks of at most
//!    `noncall_max_s` (60 s default), discarding a trailing fragment
//!    shorter than `noncall_min_s` (1 s default).
//!
//! Bout intervals are half-open `[start, end)`: a bout covering seconds
//! 287, 288 and 289 is `[287, 290)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::classification::{SegmentClassification, CLASS_NON_CALL, LABEL_UNID};

/// Comparison slack for bout arithmetic; times are sums of segment lengths,
/// so anything below a nanosecond is floating-point dust.
const TIME_EPSILON: f64 = 1e-9;

/// One detected or annotated bout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bout {
    /// Recording the bout belongs to.
    pub source_id: String,
    /// Call class, or [`CLASS_NON_CALL`].
    pub class: String,
    /// Start time in seconds (inclusive).
    pub start_s: f64,
    /// End time in seconds (exclusive).
    pub end_s: f64,
}

impl Bout {
    /// Bout length in seconds.
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// Persistence and separation thresholds for one call class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CallRule {
    /// Consecutive records required before a run counts as a bout.
    pub min_consecutive: usize,
    /// Runs closer than this merge into one bout (seconds).
    pub separation_s: f64,
}

/// Per-class bout rules plus the non-call chunking bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoutRules {
    call_rules: Vec<(String, CallRule)>,
    /// Shortest non-call fragment worth keeping, seconds.
    pub noncall_min_s: f64,
    /// Longest single non-call bout, seconds.
    pub noncall_max_s: f64,
}

impl BoutRules {
    /// Builds rules, validating classes (lowercase, unique, not reserved)
    /// and thresholds (`min_consecutive >= 1`, separations non-negative,
    /// `0 < noncall_min <= noncall_max`).
    pub fn new(
        call_rules: Vec<(String, CallRule)>,
        noncall_min_s: f64,
        noncall_max_s: f64,
    ) -> Result<Self, BoutError> {
        for (class, rule) in &call_rules {
            if class.is_empty()
                || class == LABEL_UNID
                || class == CLASS_NON_CALL
                || !class
                    .bytes()
                    .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-')
            {
                return Err(BoutError::InvalidRules {
                    message: alloc::format!("invalid call class '{class}'"),
                });
            }
            if rule.min_consecutive == 0 {
                return Err(BoutError::InvalidRules {
                    message: alloc::format!("class '{class}': min_consecutive must be >= 1"),
                });
            }
            if rule.separation_s.is_nan() || rule.separation_s < 0.0 {
                return Err(BoutError::InvalidRules {
                    message: alloc::format!("class '{class}': separation must be >= 0"),
                });
            }
        }
        for (i, (a, _)) in call_rules.iter().enumerate() {
            if call_rules.iter().skip(i + 1).any(|(b, _)| a == b) {
                return Err(BoutError::InvalidRules {
                    message: alloc::format!("duplicate call class '{a}'"),
                });
            }
        }
        if !(noncall_min_s > 0.0 && noncall_min_s <= noncall_max_s) {
            return Err(BoutError::InvalidRules {
                message: String::from("need 0 < noncall_min_s <= noncall_max_s"),
            });
        }
        Ok(Self {
            call_rules,
            noncall_min_s,
            noncall_max_s,
        })
    }

    /// The configured call classes and their thresholds.
    pub fn call_rules(&self) -> &[(String, CallRule)] {
        &self.call_rules
    }

    /// The rule for one class, if it is a call class.
    pub fn call_rule(&self, class: &str) -> Option<&CallRule> {
        self.call_rules
            .iter()
            .find(|(c, _)| c == class)
            .map(|(_, r)| r)
    }

    /// Duration bounds `(min, max)` a bout of `class` must satisfy, with
    /// `None` for unbounded. Call-class minima assume one-second records.
    pub fn duration_bounds(&self, class: &str) -> (f64, Option<f64>) {
        if class == CLASS_NON_CALL {
            (self.noncall_min_s, Some(self.noncall_max_s))
        } else if let Some(rule) = self.call_rule(class) {
            (rule.min_consecutive as f64, None)
        } else {
            (0.0, None)
        }
    }

    /// Checks one bout against `duration_bounds` (used when loading
    /// annotation files).
    pub fn validate_bout(&self, bout: &Bout) -> Result<(), BoutError> {
        if !(bout.start_s.is_finite() && bout.end_s.is_finite()) || bout.end_s <= bout.start_s {
            return Err(BoutError::InvariantViolation {
                message: alloc::format!(
                    "bout '{}' [{}, {}) must have end > start",
                    bout.class,
                    bout.start_s,
                    bout.end_s
                ),
            });
        }
        let (min, max) = self.duration_bounds(&bout.class);
        let duration = bout.duration_s();
        if duration < min - TIME_EPSILON {
            return Err(BoutError::InvariantViolation {
                message: alloc::format!(
                    "{} bout [{}, {}) lasts {duration} s, shorter than the {min} s minimum",
                    bout.class,
                    bout.start_s,
                    bout.end_s
                ),
            });
        }
        if let Some(max) = max {
            if duration > max + TIME_EPSILON {
                return Err(BoutError::InvariantViolation {
                    message: alloc::format!(
                        "{} bout [{}, {}) lasts {duration} s, longer than the {max} s maximum",
                        bout.class,
                        bout.start_s,
                        bout.end_s
                    ),
                });
            }
        }
        Ok(())
    }
}

impl Default for BoutRules {
    /// Grumbles need two consecutive records and separate at one second;
    /// alarms need three and separate at five; non-call bouts are 1–60 s.
    fn default() -> Self {
        Self {
            call_rules: alloc::vec![
                (
                    String::from("grumble"),
                    CallRule {
                        min_consecutive: 2,
                        separation_s: 1.0,
                    },
                ),
                (
                    String::from("alarm"),
                    CallRule {
                        min_consecutive: 3,
                        separation_s: 5.0,
                    },
                ),
            ],
            noncall_min_s: 1.0,
            noncall_max_s: 60.0,
        }
    }
}

/// Aggregates a contiguous run of classifications into bouts.
///
/// The records must come from a single recording, sorted by segment index
/// with no gaps; segment length is inferred from the start-time spacing
/// (one second when there is only a single record). Returns call bouts and
/// the non-call complement together, sorted by start time. An empty input
/// yields no bouts.
pub fn extract_bouts(
    classifications: &[SegmentClassification],
    rules: &BoutRules,
) -> Result<Vec<Bout>, BoutError> {
    if classifications.is_empty() {
        return Ok(Vec::new());
    }
    let source = &classifications[0].source_id;
    for c in classifications {
        if &c.source_id != source {
            return Err(BoutError::MixedSources {
                first: source.clone(),
                second: c.source_id.clone(),
            });
        }
        if !c.start_time_s.is_finite() {
            return Err(BoutError::InvariantViolation {
                message: alloc::format!("segment {} has a non-finite start time", c.segment_index),
            });
        }
    }
    let segment_len = infer_segment_length(classifications)?;

    // Pass 1: persistence + separation per call class.
    let mut call_bouts: Vec<Bout> = Vec::new();
    for (class, rule) in rules.call_rules() {
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        let mut run: Option<(usize, usize)> = None; // (first, last) indices
        for (k, c) in classifications.iter().enumerate() {
            if &c.label == class {
                run = match run {
                    None => Some((k, k)),
                    Some((first, _)) => Some((first, k)),
                };
            } else if let Some((first, last)) = run.take() {
                push_qualifying_run(&mut intervals, classifications, first, last, rule, segment_len);
            }
        }
        if let Some((first, last)) = run {
            push_qualifying_run(&mut intervals, classifications, first, last, rule, segment_len);
        }

        // Merge qualifying runs that sit closer than the separation; the
        // gap seconds become part of the bout.
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (start, end) in intervals {
            match merged.last_mut() {
                Some((_, last_end)) if start - *last_end < rule.separation_s - TIME_EPSILON => {
                    *last_end = end;
                }
                _ => merged.push((start, end)),
            }
        }
        call_bouts.extend(merged.into_iter().map(|(start_s, end_s)| Bout {
            source_id: source.clone(),
            class: class.clone(),
            start_s,
            end_s,
        }));
    }

    // Pass 2: the non-call complement over the classified span.
    let span = (
        classifications[0].start_time_s,
        classifications[classifications.len() - 1].start_time_s + segment_len,
    );
    let call_intervals: Vec<(f64, f64)> =
        call_bouts.iter().map(|b| (b.start_s, b.end_s)).collect();
    let mut bouts = call_bouts;
    bouts.extend(
        noncall_complement(&call_intervals, span, rules.noncall_min_s, rules.noncall_max_s)
            .into_iter()
            .map(|(start_s, end_s)| Bout {
                source_id: source.clone(),
                class: String::from(CLASS_NON_CALL),
                start_s,
                end_s,
            }),
    );

    bouts.sort_by(|a, b| {
        (a.start_s, a.end_s)
            .partial_cmp(&(b.start_s, b.end_s))
            .expect("bout times are finite")
            .then_with(|| a.class.cmp(&b.class))
    });
    Ok(bouts)
}

fn push_qualifying_run(
    intervals: &mut Vec<(f64, f64)>,
    classifications: &[SegmentClassification],
    first: usize,
    last: usize,
    rule: &CallRule,
    segment_len: f64,
) {
    if last - first + 1 >= rule.min_consecutive {
        intervals.push((
            classifications[first].start_time_s,
            classifications[last].start_time_s + segment_len,
        ));
    }
}

/// Splits everything outside `call_intervals` (within `span`) into non-call
/// chunks of at most `max_s`, dropping trailing fragments shorter than
/// `min_s`. Shared by bout extraction and the corpus generator so labels
/// and predictions chunk identically.
pub fn noncall_complement(
    call_intervals: &[(f64, f64)],
    span: (f64, f64),
    min_s: f64,
    max_s: f64,
) -> Vec<(f64, f64)> {
    // Union of the call intervals, clamped to the span.
    let mut calls: Vec<(f64, f64)> = call_intervals
        .iter()
        .filter(|(s, e)| *e > span.0 && *s < span.1)
        .map(|(s, e)| (s.max(span.0), e.min(span.1)))
        .collect();
    calls.sort_by(|a, b| a.partial_cmp(b).expect("interval times are finite"));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (start, end) in calls {
        match merged.last_mut() {
            Some((_, last_end)) if start <= *last_end + TIME_EPSILON => {
                *last_end = last_end.max(end);
            }
            _ => merged.push((start, end)),
        }
    }

    // Walk the gaps, chunking left to right.
    let mut chunks = Vec::new();
    let mut cursor = span.0;
    let mut gaps: Vec<(f64, f64)> = Vec::new();
    for (start, end) in &merged {
        if *start - cursor > TIME_EPSILON {
            gaps.push((cursor, *start));
        }
        cursor = *end;
    }
    if span.1 - cursor > TIME_EPSILON {
        gaps.push((cursor, span.1));
    }
    for (gap_start, gap_end) in gaps {
        let mut chunk_start = gap_start;
        while gap_end - chunk_start > max_s + TIME_EPSILON {
            chunks.push((chunk_start, chunk_start + max_s));
            chunk_start += max_s;
        }
        if gap_end - chunk_start >= min_s - TIME_EPSILON {
            chunks.push((chunk_start, gap_end));
        }
    }
    chunks
}

fn infer_segment_length(classifications: &[SegmentClassification]) -> Result<f64, BoutError> {
    if classifications.len() == 1 {
        return Ok(1.0); // lone record: assume the standard one-second segment
    }
    let mut segment_len = None;
    for pair in classifications.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.segment_index != a.segment_index + 1 {
            return Err(BoutError::UnsortedInput {
                message: alloc::format!(
                    "segment indices must be consecutive; found {} after {}",
                    b.segment_index,
                    a.segment_index
                ),
            });
        }
        let delta = b.start_time_s - a.start_time_s;
        if delta <= 0.0 {
            return Err(BoutError::UnsortedInput {
                message: alloc::format!(
                    "start times must increase; found {} after {}",
                    b.start_time_s,
                    a.start_time_s
                ),
            });
        }
        match segment_len {
            None => segment_len = Some(delta),
            Some(len) => {
                if (delta - len).abs() > TIME_EPSILON {
                    return Err(BoutError::UnsortedInput {
                        message: alloc::format!(
                            "uneven segment spacing: {len} s then {delta} s"
                        ),
                    });
                }
            }
        }
    }
    Ok(segment_len.expect("at least one pair exists"))
}

/// Failures while aggregating or validating bouts.
#[derive(Debug, Clone, PartialEq)]
pub enum BoutError {
    /// Classifications were not a contiguous, increasing run.
    UnsortedInput {
        /// What broke, with the offending values.
        message: String,
    },
    /// Records from more than one recording were mixed together.
    MixedSources {
        /// Source of the first record.
        first: String,
        /// The other source encountered.
        second: String,
    },
    /// A bout broke a duration invariant.
    InvariantViolation {
        /// What broke, with the offending values.
        message: String,
    },
    /// Rejected [`BoutRules`] construction.
    InvalidRules {
        /// What was wrong.
        message: String,
    },
}

impl fmt::Display for BoutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoutError::UnsortedInput { message } => write!(f, "unsorted input: {message}"),
            BoutError::MixedSources { first, second } => write!(
                f,
                "classifications mix sources '{first}' and '{second}'; aggregate one recording at a time"
            ),
            BoutError::InvariantViolation { message } => write!(f, "{message}"),
            BoutError::InvalidRules { message } => write!(f, "invalid bout rules: {message}"),
        }
    }
}

impl core::error::Error for BoutError {}

#[cfg(test)]
mod tests {
    use super::*;

    /// Builds a contiguous one-second classification run from compact label
    /// codes: 'g' = grumble, 'a' = alarm, 'n' = noise, 'u' = unid.
    fn run(start_s: usize, codes: &str) -> Vec<SegmentClassification> {
        codes
            .chars()
            .enumerate()
            .map(|(k, code)| SegmentClassification {
                source_id: String::from("rec.wav"),
                segment_index: start_s + k,
                start_time_s: (start_s + k) as f64,
                label: String::from(match code {
                    'g' => "grumble",
                    'a' => "alarm",
                    'n' => "noise",
                    'u' => "unid",
                    other => panic!("unknown code {other}"),
                }),
                detail: None,
            })
            .collect()
    }

    fn bouts_of(bouts: &[Bout], class: &str) -> Vec<(f64, f64)> {
        bouts
            .iter()
            .filter(|b| b.class == class)
            .map(|b| (b.start_s, b.end_s))
            .collect()
    }

    #[test]
    fn replay_two_class_minute() {
        // The published second-by-second trace of the two-class model over
        // seconds 280-294: two grumble bouts separated by two unid seconds.
        let cls = run(280, "uuggguuggguuuuu");
        let bouts = extract_bouts(&cls, &BoutRules::default()).unwrap();
        assert_eq!(
            bouts_of(&bouts, "grumble"),
            alloc::vec![(282.0, 285.0), (287.0, 290.0)]
        );
        assert!(bouts_of(&bouts, "alarm").is_empty());
        assert_eq!(
            bouts_of(&bouts, CLASS_NON_CALL),
            alloc::vec![(280.0, 282.0), (285.0, 287.0), (290.0, 295.0)]
        );
    }

    #[test]
    fn replay_three_class_minute() {
        // The same seconds under the three-class model: noise absorbs the
        // movement sound, leaving a single grumble bout.
        let cls = run(280, "nnuunuggggunnnn");
        let bouts = extract_bouts(&cls, &BoutRules::default()).unwrap();
        assert_eq!(bouts_of(&bouts, "grumble"), alloc::vec![(286.0, 290.0)]);
        assert_eq!(
            bouts_of(&bouts, CLASS_NON_CALL),
            alloc::vec![(280.0, 286.0), (290.0, 295.0)]
        );
    }

    #[test]
    fn lone_grumble_is_noise_not_a_bout() {
        let cls = run(0, "ugu");
        let bouts = extract_bouts(&cls, &BoutRules::default()).unwrap();
        assert!(bouts_of(&bouts, "grumble").is_empty());
        assert_eq!(bouts_of(&bouts, CLASS_NON_CALL), alloc::vec![(0.0, 3.0)]);
    }

    #[test]
    fn alarm_needs_three_consecutive() {
        let cls = run(0, "aauaaa");
        let bouts = extract_bouts(&cls, &BoutRules::default()).unwrap();
        assert_eq!(bouts_of(&bouts, "alarm"), alloc::vec![(3.0, 6.0)]);
    }

    #[test]
    fn alarm_bouts_merge_across_short_gaps() {
        // Two qualifying alarm runs 1 s apart: closer than the 5 s
        // separation, so they are one bout including the gap.
        let cls = run(0, "aaauaaa");
        let bouts = extract_bouts(&cls, &BoutRules::default()).unwrap();
        assert_eq!(bouts_of(&bouts, "alarm"), alloc::vec![(0.0, 7.0)]);
        // The gap second belongs to the bout, not to the complement.
        assert!(bouts_of(&bouts, CLASS_NON_CALL).is_empty());
    }

    #[test]
    fn alarm_bouts_stay_distinct_at_the_separation() {
        let cls = run(0, "aaauuuuuaaa"); // 5 s gap = "at least 5 s apart"
        let bouts = extract_bouts(&cls, &BoutRules::default()).unwrap();
        assert_eq!(
            bouts_of(&bouts, "alarm"),
            alloc::vec![(0.0, 3.0), (8.0, 11.0)]
        );
    }

    #[test]
    fn grumble_bouts_stay_distinct_across_one_second() {
        let cls = run(0, "ggugg");
        let bouts = extract_bouts(&cls, &BoutRules::default()).unwrap();
        assert_eq!(
            bouts_of(&bouts, "grumble"),
            alloc::vec![(0.0, 2.0), (3.0, 5.0)]
        );
    }

    #[test]
    fn long_quiet_stretches_chunk_at_sixty_seconds() {
        let codes = "u".repeat(125);
        let cls = run(0, &codes);
        let bouts = extract_bouts(&cls, &BoutRules::default()).unwrap();
        assert_eq!(
            bouts_of(&bouts, CLASS_NON_CALL),
            alloc::vec![(0.0, 60.0), (60.0, 120.0), (120.0, 125.0)]
        );
    }

    #[test]
    fn sub_second_trailing_fragment_is_dropped() {
        // Half-second records: 121 unid records = 60.5 s of quiet. The
        // first chunk takes 60 s and the remaining 0.5 s fragment dies.
        let cls: Vec<SegmentClassification> = (0..121)
            .map(|k| SegmentClassification {
                source_id: String::from("rec.wav"),
                segment_index: k,
                start_time_s: k as f64 * 0.5,
                label: String::from("unid"),
                detail: None,
            })
            .collect();
        let bouts = extract_bouts(&cls, &BoutRules::default()).unwrap();
        assert_eq!(bouts_of(&bouts, CLASS_NON_CALL), alloc::vec![(0.0, 60.0)]);
    }

    #[test]
    fn empty_input_yields_no_bouts() {
        assert_eq!(extract_bouts(&[], &BoutRules::default()).unwrap(), Vec::new());
    }

    #[test]
    fn mixed_sources_are_refused() {
        let mut cls = run(0, "gg");
        cls[1].source_id = String::from("other.wav");
        assert!(matches!(
            extract_bouts(&cls, &BoutRules::default()),
            Err(BoutError::MixedSources { .. })
        ));
    }

    #[test]
    fn gaps_in_the_index_sequence_are_refused() {
        let mut cls = run(0, "ggg");
        cls[2].segment_index = 5;
        assert!(matches!(
            extract_bouts(&cls, &BoutRules::default()),
            Err(BoutError::UnsortedInput { .. })
        ));
    }

    #[test]
    fn validate_bout_enforces_duration_bounds() {
        let rules = BoutRules::default();
        let ok = Bout {
            source_id: String::from("r"),
            class: String::from("grumble"),
            start_s: 10.0,
            end_s: 12.0,
        };
        assert!(rules.validate_bout(&ok).is_ok());

        let short = Bout {
            end_s: 11.0,
            ..ok.clone()
        };
        assert!(rules.validate_bout(&short).is_err());

        let long_noncall = Bout {
            class: String::from(CLASS_NON_CALL),
            start_s: 0.0,
            end_s: 61.0,
            source_id: String::from("r"),
        };
        assert!(rules.validate_bout(&long_noncall).is_err());

        let inverted = Bout {
            start_s: 12.0,
            end_s: 10.0,
            ..ok
        };
        assert!(rules.validate_bout(&inverted).is_err());
    }

    #[test]
    fn rules_constructor_rejects_nonsense() {
        assert!(BoutRules::new(
            alloc::vec![(
                String::from("unid"),
                CallRule {
                    min_consecutive: 2,
                    separation_s: 1.0
                }
            )],
            1.0,
            60.0
        )
        .is_err());
        assert!(BoutRules::new(alloc::vec![], 0.0, 60.0).is_err());
        assert!(BoutRules::new(
            alloc::vec![(
                String::from("grumble"),
                CallRule {
                    min_consecutive: 0,
                    separation_s: 1.0
                }
            )],
            1.0,
            60.0
        )
        .is_err());
    }
}
