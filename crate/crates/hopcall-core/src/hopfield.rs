//! Discrete Hopfield network: Hebbian storage, energy, convergence.
//!
//! A network over `N` neurons stores `p` exemplar patterns in a symmetric
//! weight matrix by the outer-product (Hebbian) rule
//!
//! ```text
//! W = (1/N) * sum_k X_k X_k^T,   with the diagonal forced to zero,
//! ```
//!
//! and retrieves by asynchronous updates `x_i <- sign(sum_j w_ij x_j + I_i)`
//! applied in fixed index order `0..N`. Each accepted flip strictly lowers
//! the energy
//!
//! ```text
//! E(x) = -1/2 * sum_ij w_ij x_i x_j - sum_i I_i x_i,
//! ```
//!
//! so the dynamics terminate in a fixed point (or are cut off after a pass
//! budget). A fixed point equal to a stored exemplar is a retrieval; any
//! other fixed point — including negated exemplars and blends — is spurious.
//!
//! # Determinism
//!
//! Convergence is a pure function of `(model, initial state, max_passes)`:
//! updates sweep neurons in index order, local fields accumulate in index
//! order, and there is no randomness. Two runs anywhere produce identical
//! trajectories.
//!
//! # Capacity
//!
//! The classic retrieval-capacity estimate for Hebbian storage is
//! `p <= 0.138 * N`. Useful detectors sit right at this edge (two patterns
//! in fourteen neurons, for instance), so the constructor distinguishes
//! three zones: within the estimate; at the boundary (allowed, flagged via
//! [`CapacityStatus::AtBoundary`] so callers can warn); and exceeded, which
//! is an error unless explicitly overridden with [`CapacityPolicy::Override`].
//! At least two patterns are always admitted at the boundary — a classifier
//! needs two classes to discriminate — while a single pattern is always a
//! perfect fixed point and counts as within capacity.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::encoder::EncoderConfig;
use crate::pattern::BipolarPattern;

/// Default pass budget for convergence; generous, since well-posed probes
/// settle in a handful of passes.
pub const DEFAULT_MAX_PASSES: usize = 100;

/// Local fields with magnitude at or below this are treated as exactly zero,
/// keeping the neuron's current state.
///
/// For Hebbian weights every mathematically nonzero field has magnitude at
/// least `1/N`, while a mathematically zero field accumulates at most a few
/// ULPs of floating-point dust (about 1e-15). The epsilon sits many orders
/// of magnitude from both, so floating-point evaluation reproduces exact
/// `sign(0) = keep state` semantics — flips on rounding noise would
/// otherwise defeat the energy-descent guarantee.
pub const FIELD_TIE_EPSILON: f64 = 1e-9;

/// An exemplar held by the network: the encoded pattern plus its class label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredPattern {
    /// Encoded spectral fingerprint.
    pub pattern: BipolarPattern,
    /// Class label, lowercase (`grumble`, `alarm`, `noise`, ...).
    pub label: String,
}

/// Where the stored pattern count sits relative to the capacity estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityStatus {
    /// `p <= floor(0.138 * N)` (or a single pattern): comfortably stable.
    Within,
    /// Above the estimate but within the admitted margin; retrieval works
    /// for well-separated patterns. Callers should surface a warning.
    AtBoundary,
    /// Beyond the admitted margin; only reachable via
    /// [`CapacityPolicy::Override`].
    Exceeded,
}

impl fmt::Display for CapacityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacityStatus::Within => write!(f, "within capacity"),
            CapacityStatus::AtBoundary => write!(f, "at capacity boundary"),
            CapacityStatus::Exceeded => write!(f, "capacity exceeded"),
        }
    }
}

/// Whether `store` enforces the capacity rule or builds the model anyway.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapacityPolicy {
    /// Reject pattern counts beyond the admitted margin (the default).
    #[default]
    Enforce,
    /// Build the model regardless; its status reports
    /// [`CapacityStatus::Exceeded`].
    Override,
}

/// How one asynchronous convergence run ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// The final state equals the stored pattern with this label.
    Retrieved(String),
    /// The dynamics reached a fixed point that is not a stored pattern
    /// (negated exemplars and blends land here).
    Spurious,
    /// The pass budget ran out before a full no-change pass.
    NonConvergent,
}

impl Outcome {
    /// The retrieved label, if any.
    pub fn label(&self) -> Option<&str> {
        match self {
            Outcome::Retrieved(label) => Some(label),
            _ => None,
        }
    }
}

/// The result of one convergence run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    /// State after the final pass.
    pub final_state: BipolarPattern,
    /// Classification of the final state.
    pub outcome: Outcome,
    /// Passes executed, including the terminating no-change pass.
    pub passes_used: usize,
    /// Energy of the final state.
    pub final_energy: f64,
}

/// Energy bookkeeping recorded by [`HopfieldModel::converge_traced`].
///
/// Test instrumentation: the energies let a test assert that every accepted
/// flip lowered (never raised) the energy, without the production path
/// paying for per-flip energy evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    /// Energy of the initial state.
    pub initial_energy: f64,
    /// Energy immediately after each accepted flip, in order.
    pub energies_after_flips: Vec<f64>,
}

/// A trained Hopfield network plus the encoder configuration its patterns
/// were produced with.
///
/// A built model is immutable; classification only reads it, so sharing one
/// across worker threads is safe.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfieldModel {
    n: usize,
    /// Row-major `n * n`, symmetric, zero diagonal.
    weights: Vec<f64>,
    /// Per-neuron bias `I_i`; all zeros unless explicitly set.
    bias: Vec<f64>,
    stored: Vec<StoredPattern>,
    encoder: EncoderConfig,
    capacity: CapacityStatus,
}

impl HopfieldModel {
    /// Stores exemplars by the Hebbian rule, enforcing the capacity rule.
    ///
    /// Every pattern must have length `encoder.n_neurons()`; labels must be
    /// unique, lowercase, and not collide with the reserved `unid` /
    /// `non-call` outputs of the wider pipeline.
    pub fn store(
        exemplars: Vec<(BipolarPattern, String)>,
        encoder: EncoderConfig,
    ) -> Result<Self, HopfieldError> {
        Self::store_with_policy(exemplars, encoder, CapacityPolicy::Enforce)
    }

    /// [`store`](Self::store) with an explicit capacity policy.
    pub fn store_with_policy(
        exemplars: Vec<(BipolarPattern, String)>,
        encoder: EncoderConfig,
        policy: CapacityPolicy,
    ) -> Result<Self, HopfieldError> {
        if exemplars.is_empty() {
            return Err(HopfieldError::NoPatterns);
        }
        let n = encoder.n_neurons();
        for (pattern, label) in &exemplars {
            if pattern.len() != n {
                return Err(HopfieldError::DimensionMismatch {
                    expected: n,
                    found: pattern.len(),
                    context: "stored pattern",
                });
            }
            validate_label(label)?;
        }
        for (i, (_, a)) in exemplars.iter().enumerate() {
            if exemplars.iter().skip(i + 1).any(|(_, b)| a == b) {
                return Err(HopfieldError::DuplicateLabel { label: a.clone() });
            }
        }

        let p = exemplars.len();
        let capacity = capacity_status(n, p);
        if capacity == CapacityStatus::Exceeded && policy == CapacityPolicy::Enforce {
            return Err(HopfieldError::CapacityExceeded {
                patterns: p,
                n_neurons: n,
                max_allowed: admitted_capacity(n),
            });
        }

        // Accumulate co-occurrence counts exactly in integers and divide
        // once, so each weight is the correctly rounded value of m/N.
        let mut weights = alloc::vec![0.0f64; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let mut m: i64 = 0;
                for (pattern, _) in &exemplars {
                    let s = pattern.as_slice();
                    m += (s[i] as i64) * (s[j] as i64);
                }
                let w = m as f64 / n as f64;
                weights[i * n + j] = w;
                weights[j * n + i] = w;
            }
        }

        let stored = exemplars
            .into_iter()
            .map(|(pattern, label)| StoredPattern { pattern, label })
            .collect();
        Ok(Self {
            n,
            weights,
            bias: alloc::vec![0.0; n],
            stored,
            encoder,
            capacity,
        })
    }

    /// Reassembles a model from serialized parts, re-validating every
    /// structural invariant (dimensions, exact symmetry, zero diagonal,
    /// label rules).
    pub fn from_parts(
        weights: Vec<f64>,
        bias: Vec<f64>,
        stored: Vec<StoredPattern>,
        encoder: EncoderConfig,
    ) -> Result<Self, HopfieldError> {
        let n = encoder.n_neurons();
        if stored.is_empty() {
            return Err(HopfieldError::NoPatterns);
        }
        if weights.len() != n * n {
            return Err(HopfieldError::DimensionMismatch {
                expected: n * n,
                found: weights.len(),
                context: "weight matrix",
            });
        }
        if bias.len() != n {
            return Err(HopfieldError::DimensionMismatch {
                expected: n,
                found: bias.len(),
                context: "bias vector",
            });
        }
        for value in weights.iter().chain(bias.iter()) {
            if !value.is_finite() {
                return Err(HopfieldError::InvalidWeights {
                    reason: String::from("non-finite entry"),
                });
            }
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(HopfieldError::InvalidWeights {
                    reason: alloc::format!("nonzero diagonal at ({i}, {i})"),
                });
            }
            for j in (i + 1)..n {
                if weights[i * n + j] != weights[j * n + i] {
                    return Err(HopfieldError::InvalidWeights {
                        reason: alloc::format!("asymmetry at ({i}, {j})"),
                    });
                }
            }
        }
        for entry in &stored {
            if entry.pattern.len() != n {
                return Err(HopfieldError::DimensionMismatch {
                    expected: n,
                    found: entry.pattern.len(),
                    context: "stored pattern",
                });
            }
            validate_label(&entry.label)?;
        }
        for (i, a) in stored.iter().enumerate() {
            if stored.iter().skip(i + 1).any(|b| a.label == b.label) {
                return Err(HopfieldError::DuplicateLabel {
                    label: a.label.clone(),
                });
            }
        }
        let capacity = capacity_status(n, stored.len());
        Ok(Self {
            n,
            weights,
            bias,
            stored,
            encoder,
            capacity,
        })
    }

    /// Replaces the bias vector (all zeros by default).
    pub fn with_bias(mut self, bias: Vec<f64>) -> Result<Self, HopfieldError> {
        if bias.len() != self.n {
            return Err(HopfieldError::DimensionMismatch {
                expected: self.n,
                found: bias.len(),
                context: "bias vector",
            });
        }
        if bias.iter().any(|b| !b.is_finite()) {
            return Err(HopfieldError::InvalidWeights {
                reason: String::from("non-finite bias entry"),
            });
        }
        self.bias = bias;
        Ok(self)
    }

    /// Number of neurons `N`.
    pub fn n_neurons(&self) -> usize {
        self.n
    }

    /// The stored exemplars, in storage order.
    pub fn stored(&self) -> &[StoredPattern] {
        &self.stored
    }

    /// The weight matrix in row-major order (`n * n` entries).
    pub fn weights_row_major(&self) -> &[f64] {
        &self.weights
    }

    /// Single weight `w_ij`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "weight index out of range");
        self.weights[i * self.n + j]
    }

    /// The per-neuron bias vector `I`.
    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// The encoder configuration the stored patterns were produced with.
    pub fn encoder_config(&self) -> &EncoderConfig {
        &self.encoder
    }

    /// Where the stored pattern count sits relative to capacity.
    pub fn capacity_status(&self) -> CapacityStatus {
        self.capacity
    }

    /// Network energy of a state.
    pub fn energy(&self, state: &BipolarPattern) -> Result<f64, HopfieldError> {
        if state.len() != self.n {
            return Err(HopfieldError::DimensionMismatch {
                expected: self.n,
                found: state.len(),
                context: "energy state",
            });
        }
        Ok(self.energy_of(state.as_slice()))
    }

    fn energy_of(&self, x: &[i8]) -> f64 {
        let n = self.n;
        let mut quadratic = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let row = &self.weights[i * n..(i + 1) * n];
            let field: f64 = row.iter().zip(x).map(|(w, &xj)| w * xj as f64).sum();
            quadratic += xi as f64 * field;
        }
        let linear: f64 = self.bias.iter().zip(x).map(|(b, &xi)| b * xi as f64).sum();
        -0.5 * quadratic - linear
    }

    /// Runs asynchronous convergence from `initial`.
    ///
    /// Each pass updates neurons `0..N` in order; the run stops at the first
    /// pass with no accepted flip (a fixed point) or after `max_passes`
    /// passes. A fixed point equal to a stored pattern classifies as
    /// [`Outcome::Retrieved`]; any other fixed point is
    /// [`Outcome::Spurious`]; running out of passes is
    /// [`Outcome::NonConvergent`].
    ///
    /// # Panics
    ///
    /// Panics if `max_passes` is zero.
    pub fn converge(
        &self,
        initial: &BipolarPattern,
        max_passes: usize,
    ) -> Result<ConvergenceResult, HopfieldError> {
        self.converge_impl(initial, max_passes, false)
            .map(|(result, _)| result)
    }

    /// [`converge`](Self::converge) with per-flip energy instrumentation.
    pub fn converge_traced(
        &self,
        initial: &BipolarPattern,
        max_passes: usize,
    ) -> Result<(ConvergenceResult, ConvergenceTrace), HopfieldError> {
        self.converge_impl(initial, max_passes, true)
            .map(|(result, trace)| (result, trace.expect("trace was requested")))
    }

    fn converge_impl(
        &self,
        initial: &BipolarPattern,
        max_passes: usize,
        want_trace: bool,
    ) -> Result<(ConvergenceResult, Option<ConvergenceTrace>), HopfieldError> {
        assert!(max_passes >= 1, "max_passes must be at least 1");
        if initial.len() != self.n {
            return Err(HopfieldError::DimensionMismatch {
                expected: self.n,
                found: initial.len(),
                context: "initial state",
            });
        }

        let n = self.n;
        let mut x: Vec<i8> = initial.as_slice().to_vec();
        let mut trace = want_trace.then(|| ConvergenceTrace {
            initial_energy: self.energy_of(&x),
            energies_after_flips: Vec::new(),
        });

        let mut converged = false;
        let mut passes_used = 0;
        for _ in 0..max_passes {
            passes_used += 1;
            let mut flips = 0usize;
            for i in 0..n {
                let row = &self.weights[i * n..(i + 1) * n];
                let field = self.bias[i]
                    + row
                        .iter()
                        .zip(&x)
                        .map(|(w, &xj)| w * xj as f64)
                        .sum::<f64>();
                let next = if field > FIELD_TIE_EPSILON {
                    1
                } else if field < -FIELD_TIE_EPSILON {
                    -1
                } else {
                    x[i] // tied field keeps the current state
                };
                if next != x[i] {
                    x[i] = next;
                    flips += 1;
                    if let Some(t) = trace.as_mut() {
                        t.energies_after_flips.push(self.energy_of(&x));
                    }
                }
            }
            if flips == 0 {
                converged = true;
                break;
            }
        }

        let final_energy = self.energy_of(&x);
        let outcome = match self
            .stored
            .iter()
            .find(|entry| entry.pattern.as_slice() == x.as_slice())
        {
            Some(entry) => Outcome::Retrieved(entry.label.clone()),
            None if converged => Outcome::Spurious,
            None => Outcome::NonConvergent,
        };
        let result = ConvergenceResult {
            final_state: BipolarPattern::from_states_unchecked(x),
            outcome,
            passes_used,
            final_energy,
        };
        Ok((result, trace))
    }
}

/// Largest pattern count admitted without [`CapacityPolicy::Override`].
fn admitted_capacity(n: usize) -> usize {
    let estimate = HEBBIAN_CAPACITY_FACTOR * n as f64;
    let mut ceil = estimate as usize;
    if (ceil as f64) < estimate {
        ceil += 1;
    }
    ceil.max(2)
}

/// Classic retrieval-capacity factor for Hebbian storage.
pub const HEBBIAN_CAPACITY_FACTOR: f64 = 0.138;

fn capacity_status(n: usize, p: usize) -> CapacityStatus {
    let estimate = HEBBIAN_CAPACITY_FACTOR * n as f64;
    if p == 1 || p as f64 <= estimate {
        CapacityStatus::Within
    } else if p <= admitted_capacity(n) {
        CapacityStatus::AtBoundary
    } else {
        CapacityStatus::Exceeded
    }
}

fn validate_label(label: &str) -> Result<(), HopfieldError> {
    if label.is_empty() {
        return Err(HopfieldError::InvalidLabel {
            label: String::from(label),
            reason: "label must not be empty",
        });
    }
    if label == crate::classification::LABEL_UNID || label == crate::classification::CLASS_NON_CALL
    {
        return Err(HopfieldError::InvalidLabel {
            label: String::from(label),
            reason: "label is reserved by the pipeline",
        });
    }
    if !label
        .bytes()
        .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-')
    {
        return Err(HopfieldError::InvalidLabel {
            label: String::from(label),
            reason: "labels are lowercase ASCII words ([a-z0-9_-])",
        });
    }
    Ok(())
}

/// Failures raised by network construction and dynamics.
#[derive(Debug, Clone, PartialEq)]
pub enum HopfieldError {
    /// `store` was called with no exemplars.
    NoPatterns,
    /// A vector or matrix had the wrong length for this network.
    DimensionMismatch {
        /// Expected length.
        expected: usize,
        /// Actual length.
        found: usize,
        /// Which argument was malformed.
        context: &'static str,
    },
    /// Two exemplars carried the same label.
    DuplicateLabel {
        /// The repeated label.
        label: String,
    },
    /// A label broke the lowercase-word rule or used a reserved name.
    InvalidLabel {
        /// The rejected label.
        label: String,
        /// Why it was rejected.
        reason: &'static str,
    },
    /// More patterns than the network can reliably retrieve.
    CapacityExceeded {
        /// Patterns offered.
        patterns: usize,
        /// Network size.
        n_neurons: usize,
        /// Largest admissible count at this size.
        max_allowed: usize,
    },
    /// A deserialized weight matrix or bias broke a structural invariant.
    InvalidWeights {
        /// Human-readable cause.
        reason: String,
    },
}

impl fmt::Display for HopfieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HopfieldError::NoPatterns => write!(f, "at least one exemplar pattern is required"),
            HopfieldError::DimensionMismatch {
                expected,
                found,
                context,
            } => write!(f, "{context} has length {found}, expected {expected}"),
            HopfieldError::DuplicateLabel { label } => {
                write!(f, "duplicate exemplar label '{label}'")
            }
            HopfieldError::InvalidLabel { label, reason } => {
                write!(f, "invalid exemplar label '{label}': {reason}")
            }
            HopfieldError::CapacityExceeded {
                patterns,
                n_neurons,
                max_allowed,
            } => write!(
                f,
                "{patterns} patterns exceed the capacity of a {n_neurons}-neuron network \
                 (at most {max_allowed} admitted; estimate 0.138*N)"
            ),
            HopfieldError::InvalidWeights { reason } => {
                write!(f, "invalid weight data: {reason}")
            }
        }
    }
}

impl core::error::Error for HopfieldError {}
