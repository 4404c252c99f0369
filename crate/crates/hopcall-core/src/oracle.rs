//! Exhaustive dynamics tables for small networks.
//!
//! [`brute_force_attractors`] enumerates every bipolar state of a small
//! network and follows the asynchronous dynamics to its end, using exact
//! integer arithmetic throughout. The resulting table is the ground truth
//! the floating-point implementation in [`crate::hopfield`] is tested
//! against: same update order and stopping rule, but an independently
//! written evaluation path with no shared rounding behaviour.
//!
//! This is test support, not shipped behaviour — the table is exponential
//! in `N` and refuses networks beyond [`MAX_ORACLE_NEURONS`].

use alloc::vec::Vec;
use core::fmt;

use crate::hopfield::{HopfieldModel, Outcome};
use crate::pattern::BipolarPattern;

/// Largest network the exhaustive table will enumerate (4096 states).
pub const MAX_ORACLE_NEURONS: usize = 12;

/// Where one enumerated state ends up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    /// Classification of the final state.
    pub outcome: Outcome,
    /// The state id reached after the final pass.
    pub final_state_id: u32,
    /// Passes executed, including the terminating no-change pass.
    pub passes_used: usize,
}

/// The complete dynamics table of a small network: one entry per state.
///
/// State ids pack the pattern into bits: bit `b` set means neuron `b` is
/// `+1`, so id 0 is the all `-1` state and id `2^N - 1` is all `+1`.
#[derive(Debug, Clone)]
pub struct AttractorTable {
    n: usize,
    entries: Vec<TableEntry>,
}

impl AttractorTable {
    /// Network size the table was built for.
    pub fn n_neurons(&self) -> usize {
        self.n
    }

    /// Number of enumerated states, `2^N`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True only for an impossible empty table.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The entry for a state id.
    pub fn entry(&self, state_id: u32) -> &TableEntry {
        &self.entries[state_id as usize]
    }

    /// All entries, indexed by state id.
    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    /// Decodes a state id into the pattern it represents.
    pub fn state_of(&self, state_id: u32) -> BipolarPattern {
        id_to_pattern(state_id, self.n)
    }

    /// Encodes a pattern as its state id.
    pub fn id_of(&self, pattern: &BipolarPattern) -> u32 {
        pattern_to_id(pattern)
    }

    /// True when the state is a fixed point of the dynamics.
    pub fn is_fixed_point(&self, state_id: u32) -> bool {
        let entry = self.entry(state_id);
        entry.final_state_id == state_id && entry.passes_used == 1
    }
}

/// Decodes `state_id` (bit `b` set = neuron `b` at `+1`) into a pattern.
pub fn id_to_pattern(state_id: u32, n: usize) -> BipolarPattern {
    let states: Vec<i8> = (0..n)
        .map(|b| if state_id >> b & 1 == 1 { 1 } else { -1 })
        .collect();
    BipolarPattern::from_states(states).expect("states are bipolar by construction")
}

/// Encodes a pattern as a state id.
pub fn pattern_to_id(pattern: &BipolarPattern) -> u32 {
    debug_assert!(pattern.len() <= 32);
    pattern
        .as_slice()
        .iter()
        .enumerate()
        .fold(0u32, |id, (b, &s)| if s == 1 { id | 1 << b } else { id })
}

/// Builds the exhaustive dynamics table for a small Hebbian network.
///
/// The integer weight counts are recomputed from the model's stored
/// patterns; if the model's floating-point weights do not correspond to
/// them (its matrix was not produced by Hebbian storage over its own
/// exemplars) the table would describe a different network, so the
/// mismatch is an error. The model must also be bias-free — the exact
/// integer route has no way to represent an arbitrary real bias.
pub fn brute_force_attractors(
    model: &HopfieldModel,
    max_passes: usize,
) -> Result<AttractorTable, OracleError> {
    assert!(max_passes >= 1, "max_passes must be at least 1");
    let n = model.n_neurons();
    if n > MAX_ORACLE_NEURONS {
        return Err(OracleError::TooLarge {
            n_neurons: n,
            max: MAX_ORACLE_NEURONS,
        });
    }
    if model.bias().iter().any(|&b| b != 0.0) {
        return Err(OracleError::BiasedModel);
    }

    // Exact integer co-occurrence counts, and a consistency check that the
    // model's floating-point weights are precisely m/N for these counts.
    let stored = model.stored();
    let mut counts = alloc::vec![0i32; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut m = 0i32;
            for entry in stored {
                let s = entry.pattern.as_slice();
                m += (s[i] as i32) * (s[j] as i32);
            }
            counts[i * n + j] = m;
            if model.weight(i, j) != m as f64 / n as f64 {
                return Err(OracleError::NotHebbian { i, j });
            }
        }
    }

    let states = 1usize << n;
    let mut entries = Vec::with_capacity(states);
    for id in 0..states as u32 {
        entries.push(follow_dynamics(id, n, &counts, stored, max_passes));
    }
    Ok(AttractorTable { n, entries })
}

/// Runs the integer dynamics from one state to completion.
fn follow_dynamics(
    state_id: u32,
    n: usize,
    counts: &[i32],
    stored: &[crate::hopfield::StoredPattern],
    max_passes: usize,
) -> TableEntry {
    let mut x: Vec<i8> = (0..n)
        .map(|b| if state_id >> b & 1 == 1 { 1i8 } else { -1i8 })
        .collect();

    let mut converged = false;
    let mut passes_used = 0;
    for _ in 0..max_passes {
        passes_used += 1;
        let mut flips = 0;
        for i in 0..n {
            let mut field = 0i64;
            for j in 0..n {
                field += counts[i * n + j] as i64 * x[j] as i64;
            }
            let next = match field {
                f if f > 0 => 1,
                f if f < 0 => -1,
                _ => x[i],
            };
            if next != x[i] {
                x[i] = next;
                flips += 1;
            }
        }
        if flips == 0 {
            converged = true;
            break;
        }
    }

    let outcome = match stored
        .iter()
        .find(|entry| entry.pattern.as_slice() == x.as_slice())
    {
        Some(entry) => Outcome::Retrieved(entry.label.clone()),
        None if converged => Outcome::Spurious,
        None => Outcome::NonConvergent,
    };
    let final_state_id = x
        .iter()
        .enumerate()
        .fold(0u32, |id, (b, &s)| if s == 1 { id | 1 << b } else { id });
    TableEntry {
        outcome,
        final_state_id,
        passes_used,
    }
}

/// Why a table could not be built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The network is too large to enumerate.
    TooLarge {
        /// Requested size.
        n_neurons: usize,
        /// Enumeration limit.
        max: usize,
    },
    /// The model carries a nonzero bias, which the integer route cannot
    /// represent.
    BiasedModel,
    /// The model's weights are not the Hebbian matrix of its own patterns.
    NotHebbian {
        /// Row of the first mismatch.
        i: usize,
        /// Column of the first mismatch.
        j: usize,
    },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge { n_neurons, max } => write!(
                f,
                "cannot enumerate 2^{n_neurons} states; the oracle handles at most {max} neurons"
            ),
            OracleError::BiasedModel => {
                write!(f, "the exhaustive oracle requires a zero bias vector")
            }
            OracleError::NotHebbian { i, j } => write!(
                f,
                "model weight ({i}, {j}) is not the Hebbian value of the stored patterns"
            ),
        }
    }
}

impl core::error::Error for OracleError {}
