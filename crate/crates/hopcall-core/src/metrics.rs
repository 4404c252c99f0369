//! Bout-level scoring against ground-truth annotations.
//!
//! Detection quality is judged on bouts, not on individual seconds: a
//! predicted bout counts as a true positive when a ground-truth bout of the
//! same class overlaps it by at least [`MIN_OVERLAP_S`]. Matching is greedy
//! and deterministic — predictions are taken in start order and each claims
//! the earliest-starting unmatched truth it overlaps sufficiently. Each
//! ground-truth bout can be matched at most once; leftover predictions are
//! false positives and leftover truths are false negatives.
//!
//! From the matched counts, [`report`] derives per-class precision, recall
//! and F1, plus an overall accuracy defined as the fraction of all
//! predicted bouts that were correct (micro-averaged precision across
//! every class, non-call included).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::bout::Bout;

/// Minimum temporal overlap, in seconds, for a prediction to match a
/// ground-truth bout of the same class.
pub const MIN_OVERLAP_S: f64 = 1.0;

/// Slack for the overlap comparison; bout edges are sums of segment
/// lengths, so a nanosecond absorbs any floating-point dust.
const TIME_EPSILON: f64 = 1e-9;

/// Match counts for one class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    /// Predictions that matched a ground-truth bout.
    pub true_positives: usize,
    /// Predictions that matched nothing.
    pub false_positives: usize,
    /// Ground-truth bouts no prediction matched.
    pub false_negatives: usize,
    /// Ground-truth bouts of this class (`true_positives + false_negatives`).
    pub support: usize,
}

impl ClassCounts {
    /// Fraction of predictions that were correct; `0.0` when nothing was
    /// predicted.
    pub fn precision(&self) -> f64 {
        ratio(self.true_positives, self.true_positives + self.false_positives)
    }

    /// Fraction of ground-truth bouts that were found; `0.0` on empty
    /// support.
    pub fn recall(&self) -> f64 {
        ratio(self.true_positives, self.support)
    }

    /// Harmonic mean of precision and recall; `0.0` when both are zero.
    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    /// Adds another set of counts (e.g. from a different recording).
    pub fn absorb(&mut self, other: &ClassCounts) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.false_negatives += other.false_negatives;
        self.support += other.support;
    }
}

fn ratio(numerator: usize, denominator: usize) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

/// Per-class match counts, keyed by class name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionCounts {
    per_class: BTreeMap<String, ClassCounts>,
}

impl ConfusionCounts {
    /// An empty tally.
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts for one class, if it appeared anywhere.
    pub fn get(&self, class: &str) -> Option<&ClassCounts> {
        self.per_class.get(class)
    }

    /// Iterates classes in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&String, &ClassCounts)> {
        self.per_class.iter()
    }

    /// True when no class was seen at all.
    pub fn is_empty(&self) -> bool {
        self.per_class.is_empty()
    }

    /// Merges another tally into this one, summing per-class counts
    /// (used to accumulate across recordings).
    pub fn absorb(&mut self, other: &ConfusionCounts) {
        for (class, counts) in other.iter() {
            self.per_class.entry(class.clone()).or_default().absorb(counts);
        }
    }

    /// Adds raw counts for one class, accumulating with any existing
    /// figures. Lets callers build a tally from counts obtained elsewhere
    /// instead of from [`match_bouts`].
    pub fn record(&mut self, class: &str, counts: ClassCounts) {
        self.entry(class).absorb(&counts);
    }

    fn entry(&mut self, class: &str) -> &mut ClassCounts {
        self.per_class.entry(String::from(class)).or_default()
    }
}

/// Matches predicted bouts against ground truth for a single recording.
///
/// Both lists may arrive in any order; they are sorted internally, so the
/// result is permutation-invariant. All bouts must share one source id —
/// score recordings separately and combine with
/// [`ConfusionCounts::absorb`]. Classes appearing in either list get an
/// entry in the result.
pub fn match_bouts(predicted: &[Bout], truth: &[Bout]) -> Result<ConfusionCounts, MetricsError> {
    let mut source: Option<&str> = None;
    for bout in predicted.iter().chain(truth) {
        match source {
            None => source = Some(&bout.source_id),
            Some(first) if first != bout.source_id => {
                return Err(MetricsError::MixedSources {
                    first: String::from(first),
                    second: bout.source_id.clone(),
                });
            }
            Some(_) => {}
        }
        if !(bout.start_s.is_finite() && bout.end_s.is_finite()) || bout.end_s <= bout.start_s {
            return Err(MetricsError::InvalidBout {
                message: alloc::format!(
                    "{} bout [{}, {}) must have finite end > start",
                    bout.class,
                    bout.start_s,
                    bout.end_s
                ),
            });
        }
    }

    let mut counts = ConfusionCounts::new();
    let mut classes: Vec<&str> = predicted
        .iter()
        .chain(truth)
        .map(|b| b.class.as_str())
        .collect();
    classes.sort_unstable();
    classes.dedup();

    for class in classes {
        let mut preds: Vec<&Bout> = predicted.iter().filter(|b| b.class == class).collect();
        let mut truths: Vec<&Bout> = truth.iter().filter(|b| b.class == class).collect();
        preds.sort_by(|a, b| by_start(a, b));
        truths.sort_by(|a, b| by_start(a, b));

        let mut matched = alloc::vec![false; truths.len()];
        let entry = counts.entry(class);
        entry.support = truths.len();
        for pred in preds {
            let hit = truths.iter().enumerate().find(|(k, t)| {
                let overlap = pred.end_s.min(t.end_s) - pred.start_s.max(t.start_s);
                !matched[*k] && overlap >= MIN_OVERLAP_S - TIME_EPSILON
            });
            match hit {
                Some((k, _)) => {
                    matched[k] = true;
                    entry.true_positives += 1;
                }
                None => entry.false_positives += 1,
            }
        }
        entry.false_negatives = matched.iter().filter(|m| !**m).count();
    }
    Ok(counts)
}

fn by_start(a: &Bout, b: &Bout) -> core::cmp::Ordering {
    (a.start_s, a.end_s)
        .partial_cmp(&(b.start_s, b.end_s))
        .expect("bout times are finite")
}

/// Quality figures for one class: the raw counts plus derived rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    /// Predictions that matched a ground-truth bout.
    pub true_positives: usize,
    /// Predictions that matched nothing.
    pub false_positives: usize,
    /// Ground-truth bouts no prediction matched.
    pub false_negatives: usize,
    /// Ground-truth bouts of this class.
    pub support: usize,
    /// `tp / (tp + fp)`, `0.0` on an empty denominator.
    pub precision: f64,
    /// `tp / support`, `0.0` on empty support.
    pub recall: f64,
    /// Harmonic mean of precision and recall, `0.0` when both are zero.
    pub f1: f64,
}

impl From<&ClassCounts> for ClassMetrics {
    fn from(counts: &ClassCounts) -> Self {
        Self {
            true_positives: counts.true_positives,
            false_positives: counts.false_positives,
            false_negatives: counts.false_negatives,
            support: counts.support,
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
        }
    }
}

/// Full evaluation summary across all classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    /// Per-class figures, keyed by class name.
    pub per_class: BTreeMap<String, ClassMetrics>,
    /// Fraction of all predicted bouts (every class) that were correct;
    /// `0.0` when nothing was predicted.
    pub overall_accuracy: f64,
    /// Total ground-truth bouts across classes.
    pub total_support: usize,
}

/// Derives rates and the overall accuracy from matched counts. Values are
/// kept at full precision; rounding is a presentation concern.
pub fn report(counts: &ConfusionCounts) -> ClassificationReport {
    let mut per_class = BTreeMap::new();
    let mut tp_total = 0usize;
    let mut fp_total = 0usize;
    let mut total_support = 0usize;
    for (class, c) in counts.iter() {
        per_class.insert(class.clone(), ClassMetrics::from(c));
        tp_total += c.true_positives;
        fp_total += c.false_positives;
        total_support += c.support;
    }
    ClassificationReport {
        per_class,
        overall_accuracy: ratio(tp_total, tp_total + fp_total),
        total_support,
    }
}

/// Failures while scoring bouts.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    /// Bouts from more than one recording were mixed together.
    MixedSources {
        /// Source of the first bout seen.
        first: String,
        /// The other source encountered.
        second: String,
    },
    /// A bout had a non-finite or inverted time span.
    InvalidBout {
        /// What broke, with the offending values.
        message: String,
    },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::MixedSources { first, second } => write!(
                f,
                "bouts mix sources '{first}' and '{second}'; score one recording at a time"
            ),
            MetricsError::InvalidBout { message } => write!(f, "invalid bout: {message}"),
        }
    }
}

impl core::error::Error for MetricsError {}
