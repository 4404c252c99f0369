//! Bipolar state vectors.
//!
//! A [`BipolarPattern`] is a fixed-length vector whose entries are exactly
//! `-1` or `+1`. The constructor enforces this, so the rest of the crate can
//! rely on it without re-checking.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// A validated `{-1, +1}` state vector of a Hopfield network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct BipolarPattern {
    states: Vec<i8>,
}

impl BipolarPattern {
    /// Builds a pattern from raw states, rejecting anything outside `{-1, +1}`.
    pub fn from_states(states: Vec<i8>) -> Result<Self, PatternError> {
        if states.is_empty() {
            return Err(PatternError::Empty);
        }
        for (index, &value) in states.iter().enumerate() {
            if value != -1 && value != 1 {
                return Err(PatternError::InvalidState { index, value });
            }
        }
        Ok(Self { states })
    }

    /// Builds an all `-1` pattern with `+1` at the given active indices.
    ///
    /// This is the natural form of an encoded peak set: most bins silent,
    /// a few firing. Indices may repeat; out-of-range indices are rejected.
    pub fn from_active_bins(len: usize, active: &[usize]) -> Result<Self, PatternError> {
        if len == 0 {
            return Err(PatternError::Empty);
        }
        let mut states = alloc::vec![-1i8; len];
        for &bin in active {
            if bin >= len {
                return Err(PatternError::BinOutOfRange { bin, len });
            }
            states[bin] = 1;
        }
        Ok(Self { states })
    }

    /// Wraps states already known to be valid (used by the dynamics loop).
    pub(crate) fn from_states_unchecked(states: Vec<i8>) -> Self {
        debug_assert!(!states.is_empty() && states.iter().all(|&v| v == -1 || v == 1));
        Self { states }
    }

    /// Number of neurons.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// True when the pattern has no entries (never holds for a constructed value).
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// The underlying states.
    pub fn as_slice(&self) -> &[i8] {
        &self.states
    }

    /// The element-wise negation, `-x`.
    pub fn negated(&self) -> Self {
        Self {
            states: self.states.iter().map(|&v| -v).collect(),
        }
    }

    /// Inner product `<self, other>`; `len` for identical patterns,
    /// `-len` for negated ones.
    pub fn overlap(&self, other: &Self) -> i64 {
        debug_assert_eq!(self.len(), other.len());
        self.states
            .iter()
            .zip(other.states.iter())
            .map(|(&a, &b)| (a as i64) * (b as i64))
            .sum()
    }

    /// Number of positions at which the two patterns differ.
    pub fn hamming_distance(&self, other: &Self) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.states
            .iter()
            .zip(other.states.iter())
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl core::ops::Index<usize> for BipolarPattern {
    type Output = i8;

    fn index(&self, index: usize) -> &i8 {
        &self.states[index]
    }
}

impl TryFrom<Vec<i8>> for BipolarPattern {
    type Error = PatternError;

    fn try_from(states: Vec<i8>) -> Result<Self, PatternError> {
        Self::from_states(states)
    }
}

impl From<BipolarPattern> for Vec<i8> {
    fn from(pattern: BipolarPattern) -> Vec<i8> {
        pattern.states
    }
}

/// Rejection reasons for malformed state vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternError {
    /// Zero-length patterns carry no information and are refused outright.
    Empty,
    /// An entry was something other than `-1` or `+1`.
    InvalidState {
        /// Position of the offending entry.
        index: usize,
        /// The rejected value.
        value: i8,
    },
    /// An active-bin index fell outside the pattern.
    BinOutOfRange {
        /// The rejected index.
        bin: usize,
        /// Pattern length.
        len: usize,
    },
}

impl fmt::Display for PatternError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternError::Empty => write!(f, "bipolar pattern must not be empty"),
            PatternError::InvalidState { index, value } => write!(
                f,
                "bipolar pattern entry {index} is {value}; entries must be -1 or +1"
            ),
            PatternError::BinOutOfRange { bin, len } => {
                write!(f, "active bin {bin} out of range for pattern of length {len}")
            }
        }
    }
}

impl core::error::Error for PatternError {}
