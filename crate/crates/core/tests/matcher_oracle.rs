mod support;

use std::collections::BTreeSet;

use lorener::gazetteer::{build_gazetteer, GazetteerConfig};
use lorener::tagger::{spans_to_bio, MatchMode, SpanMatcher};
use lorener::textspan::tokenize;
use lorener::{bio, extract_spans_from_bio};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{oracle_order, oracle_spans, random_instance};

fn check(sentence: &str, names: &[String], mode: MatchMode) {
    let g = build_gazetteer(names, &BTreeSet::new(), &GazetteerConfig::default());
    let order = oracle_order(names);
    let keys: Vec<&str> = g.entries().iter().map(|e| e.norm.as_str()).collect();
    assert_eq!(keys, order, "gazetteer order");

    let got: Vec<(usize, usize, usize)> = SpanMatcher::new(&g, mode)
        .find_spans(sentence)
        .iter()
        .map(|s| (s.start, s.end, order.iter().position(|k| *k == s.gazetteer_key).unwrap()))
        .collect();
    let want = oracle_spans(sentence, &order, mode == MatchMode::WordBoundary);
    assert_eq!(got, want, "sentence {sentence:?} names {names:?} mode {mode:?}");
}

#[test]
fn matches_brute_force_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..3000 {
        let (sentence, names) = random_instance(&mut rng, 40, 50);
        check(&sentence, &names, MatchMode::Substring);
        check(&sentence, &names, MatchMode::WordBoundary);
    }
}

#[test]
fn hand_picked_overlaps() {
    let names: Vec<String> = ["steam mephit", "mephit", "steam", "imp", "impressive", "ape", "drake"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for s in [
        "The steam mephit hissed.",
        "steam mephit mephit steam",
        "An impressive imp-like ape",
        "impressive",
        "drakeape drake ape",
        "STEAM MEPHIT",
    ] {
        check(s, &names, MatchMode::Substring);
        check(s, &names, MatchMode::WordBoundary);
    }
}

proptest! {
    #[test]
    fn spans_are_disjoint_and_bio_is_valid(seed in any::<u64>(), substring in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sentence, names) = random_instance(&mut rng, 40, 20);
        let mode = if substring { MatchMode::Substring } else { MatchMode::WordBoundary };
        let g = build_gazetteer(&names, &BTreeSet::new(), &GazetteerConfig::default());
        let spans = SpanMatcher::new(&g, mode).find_spans(&sentence);
        let chars: Vec<char> = sentence.chars().collect();
        for w in spans.windows(2) {
            prop_assert!(w[0].end <= w[1].start);
        }
        for s in &spans {
            prop_assert_eq!(chars[s.start..s.end].iter().collect::<String>(), s.surface.clone());
        }
        let tokens = tokenize(&sentence);
        let tags = spans_to_bio(&tokens, &spans).unwrap();
        prop_assert_eq!(tags.len(), tokens.len());
        prop_assert!(bio::is_well_formed(&tags));
    }

    /// For two entries matching at the same start, the longer one wins.
    #[test]
    fn longer_entry_has_priority(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sentence, names) = random_instance(&mut rng, 30, 20);
        let g = build_gazetteer(&names, &BTreeSet::new(), &GazetteerConfig::default());
        let spans = SpanMatcher::new(&g, MatchMode::Substring).find_spans(&sentence);
        let folded: String = sentence.to_lowercase();
        let chars: Vec<char> = sentence.chars().collect();
        if folded.chars().count() != chars.len() {
            return Ok(());
        }
        let fchars: Vec<char> = folded.chars().collect();
        for s in &spans {
            for e in g.entries() {
                let pat: Vec<char> = e.norm.chars().collect();
                let len = pat.len();
                if s.start + len <= fchars.len() && fchars[s.start..s.start + len] == pat[..] {
                    // an entry matching at the same start that is longer must have been blocked
                    if len > s.end - s.start {
                        let blocked = spans.iter().any(|o| o.start < s.start + len && o.end > s.start && o != s);
                        prop_assert!(blocked);
                    }
                }
            }
        }
    }

    /// Word-boundary spans align with tokens, so BIO decoding recovers them.
    #[test]
    fn bio_round_trip_for_word_boundary_spans(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sentence, names) = random_instance(&mut rng, 30, 20);
        let g = build_gazetteer(&names, &BTreeSet::new(), &GazetteerConfig::default());
        let spans = SpanMatcher::new(&g, MatchMode::WordBoundary).find_spans(&sentence);
        let tokens = tokenize(&sentence);
        let tags = spans_to_bio(&tokens, &spans).unwrap();
        let decoded = extract_spans_from_bio(&tags);
        prop_assert_eq!(decoded.repairs, 0);
        let recovered: Vec<(usize, usize)> = decoded
            .spans
            .iter()
            .map(|s| (tokens[s.start].start, tokens[s.end - 1].end))
            .collect();
        let original: Vec<(usize, usize)> = spans.iter().map(|s| (s.start, s.end)).collect();
        prop_assert_eq!(recovered, original);
    }

    /// Substring spans decode to the tokens they touch.
    #[test]
    fn bio_round_trip_token_projection(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sentence, names) = random_instance(&mut rng, 30, 20);
        let g = build_gazetteer(&names, &BTreeSet::new(), &GazetteerConfig::default());
        let spans = SpanMatcher::new(&g, MatchMode::Substring).find_spans(&sentence);
        let tokens = tokenize(&sentence);
        let tags = spans_to_bio(&tokens, &spans).unwrap();
        let mut touched = vec![false; tokens.len()];
        for s in &spans {
            for (i, t) in tokens.iter().enumerate() {
                if t.start < s.end && t.end > s.start {
                    touched[i] = true;
                }
            }
        }
        let decoded = extract_spans_from_bio(&tags);
        let mut covered = vec![false; tokens.len()];
        for s in &decoded.spans {
            covered[s.start..s.end].iter_mut().for_each(|c| *c = true);
        }
        prop_assert_eq!(covered, touched);
    }
}
