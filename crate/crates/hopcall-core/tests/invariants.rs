//! Property-based invariants across the core types.
//!
//! Each block states a law the implementation must uphold for *all* inputs,
//! then lets proptest hunt for counterexamples: pattern algebra identities,
//! encoder monotonicity, network determinism and energy descent, exhaustive
//! agreement with the integer oracle, bout-structure guarantees, and
//! counting identities in the scorer.

use proptest::prelude::*;

use hopcall_core::oracle::brute_force_attractors;
use hopcall_core::{
    bin_of, extract_bouts, match_bouts, report, BipolarPattern, Bout, BoutRules, EncoderConfig,
    FrequencyBand, HopfieldModel, Outcome, SegmentClassification, CLASS_NON_CALL,
};

const MAX_PASSES: usize = 100;

fn arb_pattern(n: usize) -> impl Strategy<Value = BipolarPattern> {
    prop::collection::vec(any::<bool>(), n).prop_map(|bits| {
        let states: Vec<i8> = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
        BipolarPattern::from_states(states).expect("states are bipolar")
    })
}

fn encoder(n: usize) -> EncoderConfig {
    EncoderConfig::new(n, FrequencyBand::new(0.0, 1300.0).unwrap(), 0.1).unwrap()
}

/// A stored model over `patterns` with labels `c0`, `c1`, ...
fn model_of(patterns: Vec<BipolarPattern>) -> HopfieldModel {
    let n = patterns[0].len();
    let exemplars = patterns
        .into_iter()
        .enumerate()
        .map(|(k, p)| (p, format!("c{k}")))
        .collect();
    HopfieldModel::store(exemplars, encoder(n)).expect("p <= 2 is always within capacity")
}

fn arb_model(max_n: usize) -> impl Strategy<Value = HopfieldModel> {
    (4..=max_n).prop_flat_map(|n| {
        prop::collection::vec(arb_pattern(n), 1..=2).prop_map(model_of)
    })
}

mod pattern_laws {
    use super::*;

    proptest! {
        #[test]
        fn negation_is_an_involution(p in (1usize..=40).prop_flat_map(arb_pattern)) {
            prop_assert_eq!(p.negated().negated(), p);
        }

        #[test]
        fn overlap_and_hamming_are_two_views_of_agreement(
            (a, b) in (1usize..=40).prop_flat_map(|n| (arb_pattern(n), arb_pattern(n)))
        ) {
            // overlap counts (agreements - disagreements); together with
            // n = agreements + disagreements this pins both quantities.
            let n = a.len() as i64;
            let d = a.hamming_distance(&b) as i64;
            prop_assert_eq!(a.overlap(&b), n - 2 * d);
            prop_assert_eq!(a.overlap(&a), n);
            prop_assert_eq!(a.overlap(&a.negated()), -n);
        }

        #[test]
        fn active_bins_round_trip(
            (n, bins) in (1usize..=40).prop_flat_map(|n| {
                (Just(n), prop::collection::btree_set(0..n, 0..=n.min(8)))
            })
        ) {
            let bins: Vec<usize> = bins.into_iter().collect();
            let p = BipolarPattern::from_active_bins(n, &bins).unwrap();
            let recovered: Vec<usize> = (0..n).filter(|&i| p[i] == 1).collect();
            prop_assert_eq!(recovered, bins);
        }
    }
}

mod encoder_laws {
    use super::*;

    proptest! {
        #[test]
        fn bin_of_is_monotone_and_in_range(
            n in 1usize..=64,
            fractions in prop::collection::vec(0.0f64..=1.0, 2)
        ) {
            let config = encoder(n);
            let band = config.band();
            let freq = |f: f64| band.low_hz() + f * band.width_hz();
            let (lo, hi) = if fractions[0] <= fractions[1] {
                (fractions[0], fractions[1])
            } else {
                (fractions[1], fractions[0])
            };
            let bin_lo = bin_of(freq(lo), &config).unwrap();
            let bin_hi = bin_of(freq(hi), &config).unwrap();
            prop_assert!(bin_lo <= bin_hi, "bin order must follow frequency order");
            prop_assert!(bin_hi < n);
        }
    }
}

mod network_laws {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn weights_are_symmetric_bounded_and_hollow(m in arb_model(20)) {
            let n = m.n_neurons();
            let p = m.stored().len() as f64;
            for i in 0..n {
                prop_assert_eq!(m.weight(i, i), 0.0);
                for j in 0..n {
                    let w = m.weight(i, j);
                    prop_assert_eq!(w, m.weight(j, i));
                    prop_assert!(w.abs() <= p / n as f64 + 1e-15);
                }
            }
        }

        #[test]
        fn convergence_is_deterministic(
            (m, probe) in arb_model(20).prop_flat_map(|m| {
                let n = m.n_neurons();
                (Just(m), arb_pattern(n))
            })
        ) {
            let a = m.converge(&probe, MAX_PASSES).unwrap();
            let b = m.converge(&probe, MAX_PASSES).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn energy_never_increases_and_outcomes_are_consistent(
            (m, probe) in arb_model(20).prop_flat_map(|m| {
                let n = m.n_neurons();
                (Just(m), arb_pattern(n))
            })
        ) {
            let (result, trace) = m.converge_traced(&probe, MAX_PASSES).unwrap();
            let mut last = trace.initial_energy;
            for &e in &trace.energies_after_flips {
                prop_assert!(e <= last + 1e-12, "energy rose from {last} to {e}");
                last = e;
            }
            prop_assert!(result.passes_used >= 1 && result.passes_used <= MAX_PASSES);
            prop_assert!((result.final_energy - last).abs() <= 1e-12);

            match &result.outcome {
                Outcome::Retrieved(label) => {
                    let hit = m
                        .stored()
                        .iter()
                        .find(|s| s.pattern == result.final_state)
                        .expect("retrieval must land on a stored pattern");
                    prop_assert_eq!(label, &hit.label);
                }
                Outcome::Spurious => {
                    prop_assert!(m.stored().iter().all(|s| s.pattern != result.final_state));
                }
                Outcome::NonConvergent => prop_assert_eq!(result.passes_used, MAX_PASSES),
            }

            if result.outcome != Outcome::NonConvergent {
                // A converged state is a fixed point: probing from it comes
                // straight back in a single verification pass.
                let again = m.converge(&result.final_state, MAX_PASSES).unwrap();
                prop_assert_eq!(&again.final_state, &result.final_state);
                prop_assert_eq!(again.passes_used, 1);
            }
        }
    }
}

mod oracle_laws {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        /// Float dynamics and the pure-integer oracle must agree exactly on
        /// every one of the 2^N states, ties included.
        #[test]
        fn float_dynamics_match_the_integer_oracle(m in arb_model(9)) {
            let table = brute_force_attractors(&m, MAX_PASSES).unwrap();
            for id in 0..table.len() as u32 {
                let probe = table.state_of(id);
                let got = m.converge(&probe, MAX_PASSES).unwrap();
                let want = table.entry(id);
                prop_assert_eq!(&got.outcome, &want.outcome, "outcome differs at state {}", id);
                prop_assert_eq!(
                    table.id_of(&got.final_state),
                    want.final_state_id,
                    "endpoint differs at state {}",
                    id
                );
                prop_assert_eq!(got.passes_used, want.passes_used);
            }
        }
    }
}

mod bout_laws {
    use super::*;

    fn arb_labels() -> impl Strategy<Value = Vec<&'static str>> {
        prop::collection::vec(
            prop::sample::select(vec!["grumble", "alarm", "noise", "unid"]),
            1..200,
        )
    }

    fn classifications(labels: &[&str]) -> Vec<SegmentClassification> {
        labels
            .iter()
            .enumerate()
            .map(|(k, label)| SegmentClassification {
                source_id: "rec.wav".to_string(),
                segment_index: k,
                start_time_s: k as f64,
                label: (*label).to_string(),
                detail: None,
            })
            .collect()
    }

    proptest! {
        #[test]
        fn bout_structure_invariants(labels in arb_labels()) {
            let rules = BoutRules::default();
            let cls = classifications(&labels);
            let bouts = extract_bouts(&cls, &rules).unwrap();
            let span_end = labels.len() as f64;

            let mut per_class: std::collections::BTreeMap<&str, Vec<&Bout>> = Default::default();
            for b in &bouts {
                prop_assert!(b.start_s >= 0.0 && b.end_s <= span_end + 1e-9);
                prop_assert!(b.end_s > b.start_s);
                per_class.entry(b.class.as_str()).or_default().push(b);
            }

            for (class, list) in &per_class {
                for pair in list.windows(2) {
                    prop_assert!(
                        pair[1].start_s >= pair[0].end_s - 1e-9,
                        "{class} bouts overlap"
                    );
                }
                if let Some(rule) = rules.call_rule(class) {
                    for b in list {
                        prop_assert!(
                            b.duration_s() >= rule.min_consecutive as f64 - 1e-9,
                            "{class} bout shorter than its persistence rule"
                        );
                    }
                    // After merging, surviving same-class gaps respect the
                    // separation threshold.
                    for pair in list.windows(2) {
                        prop_assert!(
                            pair[1].start_s - pair[0].end_s >= rule.separation_s - 1e-9,
                            "{class} bouts closer than their separation"
                        );
                    }
                }
            }

            // Non-call bouts obey their duration window and never intrude
            // on call bouts.
            let noncall: Vec<&&Bout> = per_class
                .get(CLASS_NON_CALL)
                .into_iter()
                .flatten()
                .collect();
            for nc in &noncall {
                prop_assert!(nc.duration_s() >= rules.noncall_min_s - 1e-9);
                prop_assert!(nc.duration_s() <= rules.noncall_max_s + 1e-9);
                for b in &bouts {
                    if b.class != CLASS_NON_CALL {
                        let overlap = nc.end_s.min(b.end_s) - nc.start_s.max(b.start_s);
                        prop_assert!(overlap <= 1e-9, "non-call overlaps a call bout");
                    }
                }
            }

            // A second can sit in at most two bouts (one per call class;
            // non-call never overlaps calls), and any second belonging to a
            // label run long enough to qualify must be covered by a bout of
            // its own class.
            for (k, label) in labels.iter().enumerate() {
                let mid = k as f64 + 0.5;
                let containing = bouts
                    .iter()
                    .filter(|b| b.start_s <= mid && mid < b.end_s)
                    .count();
                prop_assert!(containing <= 2, "second {k} sits in 3+ bouts");

                if let Some(rule) = rules.call_rule(label) {
                    let mut lo = k;
                    while lo > 0 && labels[lo - 1] == *label {
                        lo -= 1;
                    }
                    let mut hi = k;
                    while hi + 1 < labels.len() && labels[hi + 1] == *label {
                        hi += 1;
                    }
                    if hi - lo + 1 >= rule.min_consecutive {
                        prop_assert!(
                            bouts.iter().any(|b| {
                                b.class == *label && b.start_s <= mid && mid < b.end_s
                            }),
                            "qualifying {label} second {k} not covered by a {label} bout"
                        );
                    }
                }
            }
        }

        #[test]
        fn all_call_input_gives_one_bout(len in 2usize..150) {
            let labels = vec!["grumble"; len];
            let bouts = extract_bouts(&classifications(&labels), &BoutRules::default()).unwrap();
            prop_assert_eq!(bouts.len(), 1);
            prop_assert_eq!(&bouts[0].class, "grumble");
            prop_assert_eq!((bouts[0].start_s, bouts[0].end_s), (0.0, len as f64));
        }
    }
}

mod metric_laws {
    use super::*;

    fn arb_bouts(source: &'static str) -> impl Strategy<Value = Vec<Bout>> {
        prop::collection::vec(
            (
                prop::sample::select(vec!["grumble", "alarm", CLASS_NON_CALL]),
                0.0f64..500.0,
                1.0f64..20.0,
            ),
            0..12,
        )
        .prop_map(move |rows| {
            rows.into_iter()
                .map(|(class, start, len)| Bout {
                    source_id: source.to_string(),
                    class: class.to_string(),
                    start_s: start,
                    end_s: start + len,
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn counting_identities_hold(
            predicted in arb_bouts("rec.wav"),
            truth in arb_bouts("rec.wav")
        ) {
            let counts = match_bouts(&predicted, &truth).unwrap();
            for (class, c) in counts.iter() {
                let n_pred = predicted.iter().filter(|b| &b.class == class).count();
                let n_true = truth.iter().filter(|b| &b.class == class).count();
                prop_assert_eq!(c.true_positives + c.false_positives, n_pred);
                prop_assert_eq!(c.true_positives + c.false_negatives, n_true);
                prop_assert_eq!(c.support, n_true);
            }

            let rep = report(&counts);
            for m in rep.per_class.values() {
                for rate in [m.precision, m.recall, m.f1] {
                    prop_assert!((0.0..=1.0).contains(&rate));
                }
            }
            prop_assert!((0.0..=1.0).contains(&rep.overall_accuracy));

            // Scoring truth against itself is perfect (every bout is at
            // least 1 s long, so it overlaps itself enough).
            let self_counts = match_bouts(&truth, &truth).unwrap();
            for (_, c) in self_counts.iter() {
                prop_assert_eq!(c.false_positives, 0);
                prop_assert_eq!(c.false_negatives, 0);
            }
        }

        #[test]
        fn matching_is_order_independent(
            predicted in arb_bouts("rec.wav"),
            truth in arb_bouts("rec.wav"),
            seed in any::<u64>()
        ) {
            let forward = match_bouts(&predicted, &truth).unwrap();
            let mut p = predicted.clone();
            let mut t = truth.clone();
            // cheap deterministic shuffle
            let mut s = seed;
            for i in (1..p.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                p.swap(i, (s >> 33) as usize % (i + 1));
            }
            for i in (1..t.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                t.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(match_bouts(&p, &t).unwrap(), forward);
        }
    }
}
